"""Numba kernels shared by the SC and list decoders.

All decoder state lives in a :class:`Pool`, a numba structref holding numpy
arrays, so kernels pass it around as a single pointer.  A single-path SC decoder is a pool with
``l = 1``.

Storage is organized per layer ``lam`` and dimension class ``d``: class 0
holds the hard-decision array of the layer, class ``d >= 1`` holds the
2**(m-lam) clusters of dimension ``d + 1``.  Every path maps each
``(lam, d)`` to a slot through ``array_index``; slots are reference counted
and shared between paths until one of them writes.  Slot ``l`` is a
sentinel meaning "never written" and has an effectively infinite count.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from numba.core import types
from numba.experimental import structref

from .clusters import (
    _delta_mu,
    _gray_init,
    _mu_bar,
    _mu_generic,
    _sigma_031_fast,
    _sigma_121_fast,
    _sigma_141_fast,
    _sigma_231_fast,
    _sigma_bar,
    _sigma_generic,
    _sigma_max2d,
)
from .schedule import DMU, EFF, MU, MU_BAR, SIGMA, SIGMA_BAR, build_schedule

N_CLASSES = 5
SENTINEL_COUNT = np.int64(1) << np.int64(60)

# params layout
P_M, P_N, P_L, P_MODE, P_LEFF, P_PHI0, P_PHI1, P_SKIP_HEAD, P_SC_TAIL, P_GENIE, P_TRACE = range(11)
N_PARAMS = 11

POOL_FIELDS = [
    "params",       # int64[N_PARAMS]
    "frozen",       # uint8[n], 1 for frozen positions
    "y",            # float64[n] channel LLRs
    "T", "t_base", "t_stride",
    "C", "c_base", "c_stride",
    "array_index",  # int64[m+1, l, N_CLASSES]
    "ref_count",    # int64[m+1, l+1, N_CLASSES]
    "free_stack",   # int64[m+1, N_CLASSES, l]
    "free_top",     # int64[m+1, N_CLASSES]
    "active",       # bool[l]
    "score", "R",   # float64[l]
    "ops",          # int64[m+2, 2]; row m+1 collects LLR conversions
    "copies",       # int64[2]: cluster copies, decision-array copies
    "sched", "nops",
    "cand_score", "cand_path", "cand_bit",  # scratch, length 2l
    "keep",         # int64[l]
    "parent",       # int64[l]: path each active path was extended from in the last phase
    "pen",          # float64[l]
    "dscratch",     # float64[2, 32] scratch for Max2D differences
    "hscratch",     # bool[2, 32]
    "u_true",       # uint8[n] genie bits
    "errors",       # int64[n] genie error counts
    "trace",        # float64[n] per-phase LLR of path 0
]


@structref.register
class PoolType(types.StructRef):
    def preprocess_fields(self, fields):
        return tuple((name, types.unliteral(typ)) for name, typ in fields)


class Pool(structref.StructRefProxy):
    """Decoder state; attribute access from Python returns the live arrays."""


structref.define_proxy(Pool, PoolType, POOL_FIELDS)


def make_pool(m: int, l: int, mode: int, frozen_mask: np.ndarray) -> Pool:
    """Allocate an empty pool for codes of length 2**m and list size l."""
    n = 1 << m
    params = np.zeros(N_PARAMS, dtype=np.int64)
    params[P_M], params[P_N], params[P_L], params[P_MODE] = m, n, l, mode
    params[P_LEFF] = l
    t_base = np.zeros((m + 1, N_CLASSES), dtype=np.int64)
    t_stride = np.zeros((m + 1, N_CLASSES), dtype=np.int64)
    off = 0
    for lam in range(1, m + 1):
        for d in range(1, N_CLASSES):
            if mode != EFF and d > 2:
                continue
            t_base[lam, d] = off
            t_stride[lam, d] = (1 << (m - lam)) << (d + 1)
            off += l * t_stride[lam, d]
    c_base = np.zeros(m + 1, dtype=np.int64)
    c_stride = np.zeros(m + 1, dtype=np.int64)
    coff = 0
    for lam in range(m + 1):
        c_base[lam] = coff
        c_stride[lam] = 1 << (m - lam + 1)
        coff += l * c_stride[lam]
    sched, nops = build_schedule(m, mode)
    fields = dict(
        params=params,
        frozen=np.ascontiguousarray(frozen_mask, dtype=np.uint8),
        y=np.zeros(n),
        T=np.zeros(off),
        t_base=t_base,
        t_stride=t_stride,
        C=np.zeros(coff, dtype=np.uint8),
        c_base=c_base,
        c_stride=c_stride,
        array_index=np.full((m + 1, l, N_CLASSES), -1, dtype=np.int64),
        ref_count=np.zeros((m + 1, l + 1, N_CLASSES), dtype=np.int64),
        free_stack=np.zeros((m + 1, N_CLASSES, l), dtype=np.int64),
        free_top=np.zeros((m + 1, N_CLASSES), dtype=np.int64),
        active=np.zeros(l, dtype=np.bool_),
        score=np.zeros(l),
        R=np.zeros(l),
        ops=np.zeros((m + 2, 2), dtype=np.int64),
        copies=np.zeros(2, dtype=np.int64),
        sched=sched,
        nops=nops,
        cand_score=np.zeros(2 * l),
        cand_path=np.zeros(2 * l, dtype=np.int64),
        cand_bit=np.zeros(2 * l, dtype=np.int64),
        keep=np.zeros(l, dtype=np.int64),
        parent=np.full(l, -1, dtype=np.int64),
        pen=np.zeros(l),
        dscratch=np.zeros((2, 32)),
        hscratch=np.zeros((2, 32), dtype=np.bool_),
        u_true=np.zeros(n, dtype=np.uint8),
        errors=np.zeros(n, dtype=np.int64),
        trace=np.zeros(n),
    )
    pool = Pool(*(fields[name] for name in POOL_FIELDS))
    # Python-side views of the same buffers the compiled code mutates.
    for name in POOL_FIELDS:
        setattr(pool, name, fields[name])
    return pool


# -- pool management ----------------------------------------------------------------


@njit(cache=True)
def reset(pool):
    """Free every slot and make path 0 the only active path, bound to sentinels."""
    m = pool.params[P_M]
    l = pool.params[P_L]
    for lam in range(m + 1):
        for d in range(N_CLASSES):
            pool.ref_count[lam, l, d] = SENTINEL_COUNT
            for s in range(l):
                pool.ref_count[lam, s, d] = 0
                # pushed in reverse so slot 0 is popped first
                pool.free_stack[lam, d, s] = l - 1 - s
            pool.free_top[lam, d] = l
            for p in range(l):
                pool.array_index[lam, p, d] = -1
            pool.array_index[lam, 0, d] = l
    for p in range(l):
        pool.active[p] = False
        pool.score[p] = 0.0
        pool.R[p] = 0.0
    pool.active[0] = True
    pool.parent[:] = -1
    pool.parent[0] = 0
    pool.params[P_LEFF] = l
    pool.ops[:, :] = 0
    pool.copies[:] = 0
    pool.errors[:] = 0
    pool.trace[:] = 0.0


@njit(cache=True)
def _pop(pool, lam, d, p):
    top = pool.free_top[lam, d] - 1
    if top < 0:
        raise RuntimeError("slot pool exhausted")
    pool.free_top[lam, d] = top
    s = pool.free_stack[lam, d, top]
    pool.ref_count[lam, s, d] = 1
    pool.array_index[lam, p, d] = s
    return s


@njit(cache=True)
def acquire_t(pool, p, lam, d):
    """Writable cluster slot of path p; rebinding never copies contents."""
    l = pool.params[P_L]
    s = pool.array_index[lam, p, d]
    if s != l:
        if pool.ref_count[lam, s, d] == 1:
            return s
        pool.ref_count[lam, s, d] -= 1
    return _pop(pool, lam, d, p)


@njit(cache=True)
def acquire_c(pool, p, lam):
    """Writable decision slot of path p; rebinding copies the old contents."""
    l = pool.params[P_L]
    s = pool.array_index[lam, p, 0]
    if s != l and pool.ref_count[lam, s, 0] == 1:
        return s
    if s != l:
        pool.ref_count[lam, s, 0] -= 1
    ns = _pop(pool, lam, 0, p)
    size = pool.c_stride[lam]
    dst = pool.c_base[lam] + ns * size
    if s == l:
        pool.C[dst:dst + size] = 0
    else:
        src = pool.c_base[lam] + s * size
        pool.C[dst:dst + size] = pool.C[src:src + size]
        pool.copies[1] += 1
    return ns


@njit(cache=True)
def c_offset(pool, p, lam):
    """Read-only offset of path p's decision array on layer lam, or -1 if never written."""
    s = pool.array_index[lam, p, 0]
    if s == pool.params[P_L]:
        return -1
    return pool.c_base[lam] + s * pool.c_stride[lam]


@njit(cache=True)
def t_offset(pool, p, lam, d):
    s = pool.array_index[lam, p, d]
    if s == pool.params[P_L]:
        return -1
    return pool.t_base[lam, d] + s * pool.t_stride[lam, d]


@njit(cache=True)
def kill_path(pool, p):
    m = pool.params[P_M]
    l = pool.params[P_L]
    if not pool.active[p]:
        raise RuntimeError("kill of an inactive path")
    for lam in range(m + 1):
        for d in range(N_CLASSES):
            s = pool.array_index[lam, p, d]
            if s != l:
                pool.ref_count[lam, s, d] -= 1
                if pool.ref_count[lam, s, d] == 0:
                    pool.free_stack[lam, d, pool.free_top[lam, d]] = s
                    pool.free_top[lam, d] += 1
            pool.array_index[lam, p, d] = -1
    pool.active[p] = False
    pool.parent[p] = -1


@njit(cache=True)
def clone_path(pool, p):
    m = pool.params[P_M]
    l = pool.params[P_L]
    q = -1
    for k in range(l):
        if not pool.active[k]:
            q = k
            break
    if q < 0:
        raise RuntimeError("clone with a full list")
    for lam in range(m + 1):
        for d in range(N_CLASSES):
            s = pool.array_index[lam, p, d]
            pool.array_index[lam, q, d] = s
            if s != l:
                pool.ref_count[lam, s, d] += 1
    pool.active[q] = True
    pool.score[q] = pool.score[p]
    pool.R[q] = pool.R[p]
    return q


# -- initialization -------------------------------------------------------------------


@njit(cache=True)
def init_clusters(pool):
    """Bottom-layer clusters of path 0 from the channel LLRs."""
    n = pool.params[P_N]
    y = pool.y
    if pool.params[P_MODE] == EFF:
        q = n >> 2
        s = acquire_t(pool, 0, 2, 3)
        base = pool.t_base[2, 3] + s * pool.t_stride[2, 3]
        cnt = pool.ops[2]
        for i in range(q):
            _gray_init(y[i], y[i + q], y[i + 2 * q], y[i + 3 * q], pool.T, base + 16 * i, cnt)
    else:
        h = n >> 1
        s = acquire_t(pool, 0, 1, 1)
        base = pool.t_base[1, 1] + s * pool.t_stride[1, 1]
        for i in range(h):
            o = base + 4 * i
            pool.T[o] = 0.0
            pool.T[o + 1] = y[i]
            pool.T[o + 2] = y[i] + y[i + h]
            pool.T[o + 3] = y[i + h]
        pool.ops[1, 0] += h


# -- phase processing -------------------------------------------------------------------


@njit(cache=True, inline="always")
def _ubits(C, coff, I, psi, i):
    """The last i decisions of sub-transform I before local phase psi."""
    if i == 0 or coff < 0:
        return 0
    last = np.int64(C[coff + 2 * I + ((psi - 1) & 1)])
    if i == 1:
        return last
    return np.int64(C[coff + 2 * I + (psi & 1)]) | (last << 1)


@njit(cache=True)
def process_phase(pool, p, lam, psi, with_llr):
    """Run the schedule row of (lam, psi) for path p; sets R[p] on LLR rows."""
    m = pool.params[P_M]
    T = pool.T
    C = pool.C
    row = (1 << lam) + psi
    N = 1 << (m - lam)
    coff = c_offset(pool, p, lam)
    cnt = pool.ops[lam]
    for k in range(pool.nops[row]):
        code = pool.sched[row, k, 0]
        i = pool.sched[row, k, 1]
        t = pool.sched[row, k, 2]
        j = pool.sched[row, k, 3]
        if code == DMU:
            if with_llr:
                src = t_offset(pool, p, lam, i + j)
                u = _ubits(C, coff, 0, psi, i)
                pool.R[p] = _delta_mu(i, j, T, src, u, pool.ops[m + 1])
            continue
        dst = pool.t_base[lam, t - 1] + acquire_t(pool, p, lam, t - 1) * pool.t_stride[lam, t - 1]
        if code == MU or code == MU_BAR:
            dim = i + t + j
            src = t_offset(pool, p, lam, dim - 1)
            for I in range(N):
                u = _ubits(C, coff, I, psi, i)
                if code == MU:
                    _mu_generic(i, t, j, T, src + (I << dim), u, T, dst + (I << t), cnt)
                else:
                    _mu_bar(i, t, T, src + (I << dim), u, T, dst + (I << t))
            continue
        tp = (i + t + j) // 2
        src = t_offset(pool, p, lam - 1, tp - 1)
        for I in range(N):
            ao = src + (I << tp)
            bo = src + ((I + N) << tp)
            oo = dst + (I << t)
            u = _ubits(C, coff, I, psi, i)
            if code == SIGMA:
                _sigma_generic(i, t, j, T, ao, T, bo, u, T, oo, cnt)
            elif code == SIGMA_BAR:
                _sigma_bar(i, t, T, ao, T, bo, u, T, oo, cnt)
            elif i == 0 and t == 3:
                _sigma_031_fast(T, ao, T, bo, T, oo, cnt)
            elif i == 1 and t == 4:
                _sigma_141_fast(T, ao, T, bo, u, T, oo, cnt)
            elif i == 1 and t == 2:
                _sigma_121_fast(T, ao, T, bo, u, T, oo, cnt)
            elif i == 2 and t == 3:
                _sigma_231_fast(T, ao, T, bo, u, T, oo, cnt)
            else:
                _sigma_max2d(i, t, T, ao, T, bo, u, T, oo, cnt, pool.dscratch[0], pool.dscratch[1],
                             pool.hscratch[0], pool.hscratch[1])


@njit(cache=True)
def calct(pool, p, phi, with_llr):
    """Bring path p's clusters up to phase phi; R[p] receives the phase LLR."""
    m = pool.params[P_M]
    if phi == 0:
        for lam in range(2, m + 1):
            process_phase(pool, p, lam, 0, with_llr)
        return
    lam = m
    psi = phi
    while lam > 2 and (psi & 1) and 1 < psi < (1 << lam) - 1:
        psi = (psi - 1) >> 1
        lam -= 1
    while lam <= m:
        process_phase(pool, p, lam, psi, with_llr)
        psi = 2 * psi + 1
        lam += 1


@njit(cache=True)
def updatec(pool, p, phi):
    """Propagate path p's decision at phase phi to the lower layers' partial sums."""
    m = pool.params[P_M]
    lam = m
    N = 1
    while phi != 0 and lam != 0:
        cs = c_offset(pool, p, lam)
        ds = pool.c_base[lam - 1] + acquire_c(pool, p, lam - 1) * pool.c_stride[lam - 1]
        psi = (phi - 1) >> 1
        b = psi & 1
        if phi & 1:
            for i in range(N):
                c0 = pool.C[cs + 2 * i]
                c1 = pool.C[cs + 2 * i + 1]
                if lam == 1:
                    pool.C[ds + i] = c0 ^ c1
                    pool.C[ds + i + N] = c1
                else:
                    pool.C[ds + 2 * i + b] = c0 ^ c1
                    pool.C[ds + 2 * i + b + 2 * N] = c1
            if phi != (1 << lam) - 1:
                break
        else:
            for i in range(N):
                c0 = pool.C[cs + 2 * i]
                pool.C[ds + 2 * i + b] ^= c0
                pool.C[ds + 2 * i + b + 2 * N] ^= c0
        lam -= 1
        phi = psi
        N *= 2


@njit(cache=True)
def write_decision(pool, p, phi, bit):
    m = pool.params[P_M]
    s = acquire_c(pool, p, m)
    pool.C[pool.c_base[m] + s * pool.c_stride[m] + (phi & 1)] = bit


# -- path selection --------------------------------------------------------------------


@njit(cache=True)
def continue_frozen(pool, phi, scored):
    l = pool.params[P_L]
    for p in range(l):
        if pool.active[p]:
            if scored and pool.R[p] < 0:
                pool.score[p] += pool.R[p]
            pool.parent[p] = p
            write_decision(pool, p, phi, 0)


@njit(cache=True)
def continue_info(pool, phi):
    l = pool.params[P_L]
    nc = 0
    for p in range(l):
        if pool.active[p]:
            r = pool.R[p]
            x = 1 if r < 0 else 0
            pool.cand_score[nc] = pool.score[p]
            pool.cand_path[nc] = p
            pool.cand_bit[nc] = x
            pool.cand_score[nc + 1] = pool.score[p] - abs(r)
            pool.cand_path[nc + 1] = p
            pool.cand_bit[nc + 1] = x ^ 1
            pool.pen[p] = pool.score[p] - abs(r)
            nc += 2
    keep = min(nc, pool.params[P_LEFF])
    order = np.argsort(-pool.cand_score[:nc], kind="mergesort")
    for p in range(l):
        pool.keep[p] = 0
    for k in range(keep):
        pool.keep[pool.cand_path[order[k]]] += 1
    for p in range(l):
        if pool.active[p] and pool.keep[p] == 0:
            kill_path(pool, p)
    snapshot = pool.active.copy()
    for p in range(l):
        if not snapshot[p]:
            continue
        x = 1 if pool.R[p] < 0 else 0
        pool.parent[p] = p
        write_decision(pool, p, phi, x)
        if pool.keep[p] == 2:
            q = clone_path(pool, p)
            pool.parent[q] = p
            pool.score[q] = pool.pen[p]
            write_decision(pool, q, phi, x ^ 1)


@njit(cache=True)
def continue_genie(pool, phi):
    """Single path: count a genie error if the SC decision is wrong, then follow the truth."""
    x = 1 if pool.R[0] < 0 else 0
    truth = pool.u_true[phi]
    if x != truth:
        pool.errors[phi] += 1
    write_decision(pool, 0, phi, truth)


@njit(cache=True)
def best_path(pool):
    l = pool.params[P_L]
    best = -1
    for p in range(l):
        if pool.active[p] and (best < 0 or pool.score[p] > pool.score[best]):
            best = p
    return best


@njit(cache=True)
def run_phase(pool, phi):
    """One decoding phase for all active paths."""
    l = pool.params[P_L]
    head = pool.params[P_SKIP_HEAD] != 0 and phi < pool.params[P_PHI0]
    for p in range(l):
        if pool.active[p]:
            calct(pool, p, phi, not head)
    if pool.params[P_TRACE]:
        pool.trace[phi] = pool.R[0]
    if pool.params[P_GENIE]:
        continue_genie(pool, phi)
    elif pool.frozen[phi]:
        continue_frozen(pool, phi, not head)
    else:
        continue_info(pool, phi)
    for p in range(l):
        if pool.active[p]:
            updatec(pool, p, phi)
    if pool.params[P_SC_TAIL] and phi == pool.params[P_PHI1] and pool.params[P_LEFF] > 1:
        b = best_path(pool)
        for p in range(l):
            if pool.active[p] and p != b:
                kill_path(pool, p)
        pool.params[P_LEFF] = 1


@njit(cache=True)
def start(pool):
    reset(pool)
    init_clusters(pool)


@njit(cache=True)
def decode_all(pool):
    start(pool)
    for phi in range(pool.params[P_N]):
        run_phase(pool, phi)
    return best_path(pool)
