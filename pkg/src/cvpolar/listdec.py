"""Min-sum list decoding on top of the SC engines.

Paths share cluster and decision arrays through reference counts; a path
is only given its own copy of an array when it writes to a shared one.
Cluster arrays are always fully recomputed before they are read, so
rebinding them never copies data.  Decision arrays are copied on rebind.

Path scores are min-sum path metrics: 0 at the start and decreased by
``|L|`` whenever a path takes the decision that disagrees with its LLR.

Options
-------
skip_head
    phases before the first information bit are decoded without computing
    LLRs (frozen bits are known, and the score penalty of a single path
    does not affect its ranking);
sc_tail
    after the last frozen bit only the best path survives and the
    remaining phases run as plain SC.
"""
from __future__ import annotations

import numpy as np

from . import _engine as E
from .clusters import OpCounter
from .sc import _check_llrs, _counter_from, _mode_id
from .schedule import MIN_M
from .transform import CodeSpec, encode_inverse


class ListPool:
    """Shared array pool of up to ``l`` decoding paths.

    Thin wrapper over the compiled pool with the path-management primitives
    and an invariant check for tests and audits.
    """

    def __init__(self, spec: CodeSpec, l: int, mode="eff"):
        if int(l) < 1:
            raise ValueError(f"list size must be >= 1, got {l}")
        self.spec = spec
        self.l = int(l)
        self.mode = _mode_id(mode)
        if spec.m < MIN_M[self.mode]:
            raise ValueError(f"n = {spec.n} is too short for this engine")
        self.pool = E.make_pool(spec.m, self.l, self.mode, spec.frozen_mask)
        E.reset(self.pool)

    # -- path management --------------------------------------------------------

    @property
    def active(self) -> list[int]:
        return [int(p) for p in np.flatnonzero(self.pool.active)]

    @property
    def scores(self) -> np.ndarray:
        return self.pool.score.copy()

    @property
    def parents(self) -> np.ndarray:
        """For each path, the path it was extended from in the last phase (-1 if inactive)."""
        return self.pool.parent.copy()

    def clone(self, p: int) -> int:
        self._check_active(p)
        return int(E.clone_path(self.pool, p))

    def kill(self, p: int):
        self._check_active(p)
        E.kill_path(self.pool, p)

    def acquire_clusters(self, p: int, lam: int, dim: int) -> np.ndarray:
        """Writable cluster array of path p (layer lam, dimension dim)."""
        self._check_active(p)
        d = dim - 1
        if not (1 <= lam <= self.spec.m and 1 <= d < E.N_CLASSES) or self.pool.t_stride[lam, d] == 0:
            raise ValueError(f"no cluster storage for layer {lam}, dimension {dim}")
        E.acquire_t(self.pool, p, lam, d)
        off = E.t_offset(self.pool, p, lam, d)
        return self.pool.T[off:off + self.pool.t_stride[lam, d]]

    def acquire_decisions(self, p: int, lam: int) -> np.ndarray:
        """Writable decision array of path p on layer lam."""
        self._check_active(p)
        if not 0 <= lam <= self.spec.m:
            raise ValueError(f"layer {lam} out of range")
        E.acquire_c(self.pool, p, lam)
        off = E.c_offset(self.pool, p, lam)
        return self.pool.C[off:off + self.pool.c_stride[lam]]

    def decisions(self, p: int, lam: int) -> np.ndarray:
        """Read-only view of path p's decision array (zeros if never written)."""
        off = E.c_offset(self.pool, p, lam)
        size = int(self.pool.c_stride[lam])
        if off < 0:
            return np.zeros(size, dtype=np.uint8)
        view = self.pool.C[off:off + size].view()
        view.flags.writeable = False
        return view

    def slot(self, p: int, lam: int, dim: int) -> int:
        """Slot index bound to path p (l means the zero sentinel, -1 unbound)."""
        return int(self.pool.array_index[lam, p, dim - 1 if dim else 0])

    @property
    def cluster_copies(self) -> int:
        return int(self.pool.copies[0])

    @property
    def decision_copies(self) -> int:
        return int(self.pool.copies[1])

    def _check_active(self, p: int):
        if not (0 <= p < self.l and self.pool.active[p]):
            raise ValueError(f"path {p} is not active")

    # -- invariants -------------------------------------------------------------

    def audit(self) -> list[str]:
        """Violated pool invariants (empty when consistent).

        Checked per layer and array class: every reference count equals the
        number of active paths bound to the slot; the free stack holds exactly
        the unreferenced slots, each once; sentinel counts are untouched;
        inactive paths are unbound and active paths are bound.
        """
        pool, l, m = self.pool, self.l, self.spec.m
        problems = []
        classes = [0] + [d for d in range(1, E.N_CLASSES) if pool.t_stride[1, d] > 0]
        active = pool.active
        for lam in range(m + 1):
            for d in classes:
                idx = pool.array_index[lam, :, d]
                where = f"layer {lam} class {d}"
                if pool.ref_count[lam, l, d] != E.SENTINEL_COUNT:
                    problems.append(f"{where}: sentinel count changed")
                for p in range(l):
                    if active[p] and not 0 <= idx[p] <= l:
                        problems.append(f"{where}: active path {p} unbound")
                    if not active[p] and idx[p] != -1:
                        problems.append(f"{where}: inactive path {p} still bound")
                for s in range(l):
                    users = int(np.sum(active & (idx == s)))
                    if pool.ref_count[lam, s, d] != users:
                        problems.append(f"{where}: slot {s} count "
                                        f"{pool.ref_count[lam, s, d]} != {users} users")
                free = list(pool.free_stack[lam, d, :pool.free_top[lam, d]])
                unused = [s for s in range(l) if pool.ref_count[lam, s, d] == 0]
                if sorted(free) != unused:
                    problems.append(f"{where}: free stack {sorted(free)} != unused {unused}")
        if np.any(pool.score[active] > 0):
            problems.append("positive path score")
        return problems


def list_init(spec: CodeSpec, l: int, mode="eff") -> ListPool:
    """Empty pool holding the single path 0 bound to the zero sentinels."""
    return ListPool(spec, l, mode)


class ListDecoder:
    """Reusable list decoder for one code, list size and engine."""

    def __init__(self, spec: CodeSpec, l: int, mode="eff", skip_head=False, sc_tail=False):
        self.spec = spec
        self.paths = ListPool(spec, l, mode)
        self.pool = self.paths.pool
        self.skip_head = bool(skip_head)
        self.sc_tail = bool(sc_tail)
        pr = self.pool.params
        pr[E.P_SKIP_HEAD] = int(self.skip_head)
        pr[E.P_SC_TAIL] = int(self.sc_tail and spec.last_frozen is not None)
        pr[E.P_PHI0] = spec.first_info if spec.first_info is not None else spec.n
        pr[E.P_PHI1] = spec.last_frozen if spec.last_frozen is not None else -1
        self._best = -1

    @property
    def l(self) -> int:
        return self.paths.l

    def _check(self, y):
        self.pool.y[:] = _check_llrs(self.spec, y)

    def decode(self, y) -> np.ndarray:
        """Information bits of the best surviving path."""
        self._check(y)
        self._best = int(E.decode_all(self.pool))
        return self.spec.extract(self.u_hat)

    def steps(self, y):
        """Decode phase by phase, yielding the phase index after each one."""
        self._check(y)
        E.start(self.pool)
        for phi in range(self.spec.n):
            E.run_phase(self.pool, phi)
            yield phi
        self._best = int(E.best_path(self.pool))

    @property
    def best(self) -> int:
        return self._best

    @property
    def score(self) -> float:
        return float(self.pool.score[self._best])

    @property
    def u_hat(self) -> np.ndarray:
        return encode_inverse(self.paths.decisions(self._best, 0)[:self.spec.n])

    @property
    def counter(self) -> OpCounter:
        return _counter_from(self.pool.ops)

    @property
    def cluster_copies(self) -> int:
        return self.paths.cluster_copies

    @property
    def decision_copies(self) -> int:
        return self.paths.decision_copies


def decode_list(spec: CodeSpec, y, l: int, mode="eff", skip_head=False,
                sc_tail=False) -> tuple[np.ndarray, float, OpCounter]:
    """Decode one frame; returns the information bits, best score and op count."""
    dec = ListDecoder(spec, l, mode, skip_head, sc_tail)
    info = dec.decode(y)
    return info, dec.score, dec.counter
