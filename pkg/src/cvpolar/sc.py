"""Min-sum successive cancellation decoding of convolutional polar codes.

Two engines share the same state layout and phase logic:

``"sf"``
    straightforward: generic cluster operators on 2- and 3-clusters,
    channel LLRs enter on layer 1 (needs n >= 8);
``"eff"``
    efficient: Max2D based operators, clusters of dimension 2 to 5 and a
    Gray-code initialization of layer 2 (needs n >= 16).

Both compute exact min-sum LLRs, so they make the same decisions.

Sign conventions: ``Y[i] = ln W(1|y_i) / W(0|y_i)``, the phase LLR is
``L(0) - L(1)`` and an information bit is decided as 1 iff its LLR is
negative.
"""
from __future__ import annotations

import numpy as np

from . import _engine as E
from .clusters import OpCounter
from .schedule import EFF, MIN_M, MODES
from .transform import CodeSpec, encode_inverse


def _mode_id(mode) -> int:
    if isinstance(mode, str):
        try:
            return MODES[mode.lower()]
        except KeyError:
            raise ValueError(f"unknown engine {mode!r}; use 'sf' or 'eff'") from None
    if mode not in MODES.values():
        raise ValueError(f"unknown engine {mode!r}")
    return int(mode)


def _check_llrs(spec: CodeSpec, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (spec.n,):
        raise ValueError(f"expected {spec.n} channel LLRs, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("channel LLRs must be finite")
    return y


def _counter_from(ops: np.ndarray) -> OpCounter:
    c = OpCounter()
    c.array[:] = ops.sum(axis=0)
    return c


class SCState:
    """Single-path decoder state: cluster arrays, decision arrays, counters.

    Built by :func:`sc_init`.  Phases must be processed in order, each by
    :func:`calct`, :meth:`decide` and :func:`updatec`.
    """

    def __init__(self, spec: CodeSpec, mode="eff"):
        self.spec = spec
        self.mode = _mode_id(mode)
        if spec.m < MIN_M[self.mode]:
            raise ValueError(f"n = {spec.n} is below the minimum {1 << MIN_M[self.mode]} "
                             f"for the {'eff' if self.mode == EFF else 'sf'} engine")
        self.pool = E.make_pool(spec.m, 1, self.mode, spec.frozen_mask)
        self._next = 0
        self._pending = False

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def counter(self) -> OpCounter:
        return _counter_from(self.pool.ops)

    @property
    def layer_ops(self) -> np.ndarray:
        """Counted operations per layer 0..m, then the LLR conversions."""
        return self.pool.ops.sum(axis=1).copy()

    def clusters(self, lam: int, dim: int) -> np.ndarray | None:
        """The 2**(m-lam) clusters of dimension ``dim`` on layer lam (None if unused)."""
        d = dim - 1
        if not (1 <= lam <= self.m and 1 <= d < E.N_CLASSES) or self.pool.t_stride[lam, d] == 0:
            raise ValueError(f"no cluster storage for layer {lam}, dimension {dim}")
        s = self.pool.array_index[lam, 0, d]
        if s == self.pool.params[E.P_L]:
            return None
        off = self.pool.t_base[lam, d] + s * self.pool.t_stride[lam, d]
        size = self.pool.t_stride[lam, d]
        return self.pool.T[off:off + size].reshape(-1, 1 << dim)

    def decisions(self, lam: int) -> np.ndarray:
        """Decision array of layer lam (length 2**(m-lam+1))."""
        off = E.c_offset(self.pool, 0, lam)
        size = int(self.pool.c_stride[lam])
        if off < 0:
            return np.zeros(size, dtype=np.uint8)
        return self.pool.C[off:off + size]

    def decide(self, phi: int, bit: int):
        """Store the decision of phase phi on the top layer."""
        if phi != self._next - 1 or not self._pending:
            raise ValueError(f"phase {phi} has no pending LLR")
        E.write_decision(self.pool, 0, phi, int(bit) & 1)

    def u_hat(self) -> np.ndarray:
        """Decoded input vector, valid after the last phase."""
        return encode_inverse(self.decisions(0)[:self.n])


def sc_init(spec: CodeSpec, y, mode="eff") -> SCState:
    """Fresh decoder state with bottom-layer clusters computed from the channel LLRs."""
    state = SCState(spec, mode)
    state.pool.y[:] = _check_llrs(spec, y)
    E.start(state.pool)
    return state


def calct(state: SCState, phi: int) -> float:
    """LLR of input bit phi given the decisions on the earlier bits."""
    if phi != state._next or state._pending:
        raise ValueError(f"phases must be processed in order; expected {state._next}, got {phi}")
    if not 0 <= phi < state.n:
        raise ValueError(f"phase {phi} out of range")
    E.calct(state.pool, 0, phi, True)
    state._next += 1
    state._pending = True
    return float(state.pool.R[0])


def updatec(state: SCState, phi: int):
    """Propagate the decision of phase phi into the partial sums of lower layers."""
    if phi != state._next - 1 or not state._pending:
        raise ValueError(f"phase {phi} is not the current phase")
    E.updatec(state.pool, 0, phi)
    state._pending = False


def decision(spec: CodeSpec, phi: int, llr: float) -> int:
    """Hard decision: frozen bits are 0, information bits are 1 iff the LLR is negative."""
    return int(phi not in spec.frozen and llr < 0)


class SCDecoder:
    """Reusable SC decoder for one code and engine.

    After :meth:`decode`, ``llrs`` holds the per-phase LLRs, ``u_hat`` the
    decoded input vector and ``counter`` the counted operations.
    """

    def __init__(self, spec: CodeSpec, mode="eff"):
        self.spec = spec
        self._state = SCState(spec, mode)
        self.pool = self._state.pool
        self.pool.params[E.P_TRACE] = 1

    @property
    def mode(self) -> str:
        return "eff" if self._state.mode == EFF else "sf"

    def decode(self, y) -> np.ndarray:
        """Information bits decoded from channel LLRs ``y``."""
        self.pool.y[:] = _check_llrs(self.spec, y)
        E.decode_all(self.pool)
        return self.spec.extract(self.u_hat)

    @property
    def u_hat(self) -> np.ndarray:
        return self._state.u_hat()

    @property
    def llrs(self) -> np.ndarray:
        return self.pool.trace.copy()

    @property
    def counter(self) -> OpCounter:
        return self._state.counter

    @property
    def layer_ops(self) -> np.ndarray:
        return self._state.layer_ops

    def genie_errors(self, y, u_true) -> np.ndarray:
        """Per-phase indicator of SC decision errors when every earlier bit is known."""
        self.pool.y[:] = _check_llrs(self.spec, y)
        self.pool.u_true[:] = np.asarray(u_true, dtype=np.uint8)
        self.pool.params[E.P_GENIE] = 1
        try:
            E.decode_all(self.pool)
        finally:
            self.pool.params[E.P_GENIE] = 0
        return self.pool.errors.copy()


def decode_sc(spec: CodeSpec, y, mode="eff") -> tuple[np.ndarray, OpCounter]:
    """Decode one frame; returns the information bits and the operation count."""
    dec = SCDecoder(spec, mode)
    info = dec.decode(y)
    return info, dec.counter
