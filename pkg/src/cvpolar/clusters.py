"""Min-sum cluster operators and their arithmetic cost model.

A t-cluster is a float array of length 2**t indexed by bits x_0..x_{t-1},
x_0 least significant.  Entries are relative log-likelihoods: larger means
more likely, and a constant shared by all entries carries no information.

Every kernel writes into ``out`` and adds its counted operations to
``cnt`` (an int64 array ``[additions, comparisons]``).  Subtractions count as
additions; absolute value, negation, sign tests and halving are free.

The underscore kernels are numba-compiled and used by the decoders.  The
public wrappers allocate outputs, accept bit tuples and an optional
:class:`OpCounter`, and validate arguments.
"""
from __future__ import annotations

import numpy as np
from numba import njit

ADD = 0
CMP = 1


class OpCounter:
    """Tally of floating point additions and comparisons."""

    def __init__(self):
        self.array = np.zeros(2, dtype=np.int64)

    @property
    def additions(self) -> int:
        return int(self.array[ADD])

    @property
    def comparisons(self) -> int:
        return int(self.array[CMP])

    @property
    def total(self) -> int:
        return int(self.array.sum())

    def __repr__(self):
        return f"OpCounter(additions={self.additions}, comparisons={self.comparisons})"


# -- index arithmetic ---------------------------------------------------------


@njit(cache=True, inline="always")
def _xz_index(w, tp):
    """Indices (w·X, w·Z) for a 2*tp bit word w (bit k is w_k)."""
    a = 0
    b = 0
    for c in range(tp):
        w0 = (w >> (2 * c)) & 1
        w1 = (w >> (2 * c + 1)) & 1
        w2 = (w >> (2 * c + 2)) & 1 if c < tp - 1 else 0
        a |= (w0 ^ w1 ^ w2) << c
        b |= (w1 ^ w2) << c
    return a, b


# -- generic operators ---------------------------------------------------------
#
# Kernels read clusters at offsets ``ao``/``bo`` of buffers ``A``/``B`` and
# write at offset ``oo`` of ``O``; the decoders keep all clusters in one flat
# buffer and pass it for all three.


@njit(cache=True)
def _sigma_generic(i, t, j, A, ao, B, bo, u, O, oo, cnt):
    tp = (i + t + j) // 2
    for x in range(1 << t):
        best = 0.0
        for tail in range(1 << j):
            w = u | (x << i) | (tail << (i + t))
            ia, ib = _xz_index(w, tp)
            v = A[ao + ia] + B[bo + ib]
            if tail == 0 or v > best:
                best = v
        O[oo + x] = best
    cnt[ADD] += (1 << t) << j
    cnt[CMP] += (1 << t) * ((1 << j) - 1)


@njit(cache=True)
def _mu_generic(i, t, j, A, ao, u, O, oo, cnt):
    for x in range(1 << t):
        base = ao + (u | (x << i))
        best = A[base]
        for tail in range(1, 1 << j):
            v = A[base + (tail << (i + t))]
            if v > best:
                best = v
        O[oo + x] = best
    cnt[CMP] += (1 << t) * ((1 << j) - 1)


@njit(cache=True)
def _delta_mu(i, j, A, ao, u, cnt):
    m0 = A[ao + u]
    m1 = A[ao + (u | (1 << i))]
    for tail in range(1, 1 << j):
        base = ao + (u | (tail << (i + 1)))
        v0 = A[base]
        v1 = A[base + (1 << i)]
        if v0 > m0:
            m0 = v0
        if v1 > m1:
            m1 = v1
    cnt[CMP] += 2 * ((1 << j) - 1)
    cnt[ADD] += 1
    return m0 - m1


# -- Max2D based operators -------------------------------------------------------


@njit(cache=True, inline="always")
def _max2d(s0, s1, t0, t1, d_s, d_t, O, k0, k1, cnt):
    """Write max(s0+t0, s1+t1) to O[k0] and max(s0+t1, s1+t0) to O[k1]."""
    s = 1 if d_s < 0 else 0
    t = 1 if d_t < 0 else 0
    ss = s1 if s else s0
    tt = t1 if t else t0
    top = ss + tt
    # The runner-up drops the smaller of the two gaps.  Summing the pair it
    # keeps, instead of subtracting the gap from top, stays bit-exact.
    if abs(d_s) <= abs(d_t):
        low = (s0 if s else s1) + tt
    else:
        low = ss + (t0 if t else t1)
    if s ^ t:
        O[k1] = top
        O[k0] = low
    else:
        O[k0] = top
        O[k1] = low
    cnt[ADD] += 2
    cnt[CMP] += 1


@njit(cache=True)
def _sigma_031_fast(A, ao, B, bo, O, oo, cnt):
    d_s = (A[ao] - A[ao + 2], A[ao + 1] - A[ao + 3])
    d_t = (B[bo] - B[bo + 2], B[bo + 1] - B[bo + 3])
    cnt[ADD] += 4
    for x0 in range(2):
        for x1 in range(2):
            s = x0 ^ x1
            _max2d(A[ao + s], A[ao + (s | 2)], B[bo + x1], B[bo + (x1 | 2)], d_s[s], d_t[x1],
                   O, oo + (x0 | (x1 << 1)), oo + (x0 | ((x1 ^ 1) << 1) | 4), cnt)


@njit(cache=True)
def _sigma_141_fast(A, ao, B, bo, u, O, oo, cnt):
    d_s = (A[ao] - A[ao + 4], A[ao + 1] - A[ao + 5], A[ao + 2] - A[ao + 6], A[ao + 3] - A[ao + 7])
    d_t = (B[bo] - B[bo + 4], B[bo + 1] - B[bo + 5], B[bo + 2] - B[bo + 6], B[bo + 3] - B[bo + 7])
    cnt[ADD] += 8
    for x in range(8):
        x0 = x & 1
        x1 = (x >> 1) & 1
        x2 = (x >> 2) & 1
        s = (u ^ x0 ^ x1) | ((x1 ^ x2) << 1)
        t = (x0 ^ x1) | (x2 << 1)
        _max2d(A[ao + s], A[ao + (s | 4)], B[bo + t], B[bo + (t | 4)], d_s[s], d_t[t],
               O, oo + x, oo + ((x ^ 4) | 8), cnt)


@njit(cache=True)
def _sigma_121_fast(A, ao, B, bo, u, O, oo, cnt):
    for x0 in range(2):
        s = u ^ x0
        _max2d(A[ao + s], A[ao + (s | 2)], B[bo + x0], B[bo + (x0 | 2)],
               A[ao + s] - A[ao + (s | 2)], B[bo + x0] - B[bo + (x0 | 2)],
               O, oo + x0, oo + (x0 ^ 3), cnt)
    cnt[ADD] += 4


@njit(cache=True)
def _sigma_231_fast(A, ao, B, bo, u, O, oo, cnt):
    u0 = u & 1
    u1 = u >> 1
    for x in range(4):
        x0 = x & 1
        x1 = x >> 1
        s = (u0 ^ u1 ^ x0) | ((x0 ^ x1) << 1)
        t = (u1 ^ x0) | (x1 << 1)
        _max2d(A[ao + s], A[ao + (s | 4)], B[bo + t], B[bo + (t | 4)],
               A[ao + s] - A[ao + (s | 4)], B[bo + t] - B[bo + (t | 4)],
               O, oo + x, oo + (x ^ 6), cnt)
    cnt[ADD] += 8


@njit(cache=True)
def _sigma_max2d(i, t, A, ao, B, bo, u, O, oo, cnt, d_s, d_t, have_s, have_t):
    """sigma_{i,t,1} for t >= 2 via Max2D, sharing repeated differences.

    ``d_s, d_t, have_s, have_t`` are scratch arrays of length >= 2**(t'-1).
    """
    tp = (i + t + 1) // 2
    last = 1 << (tp - 1)
    have_s[:last] = False
    have_t[:last] = False
    flip = 3 << (t - 2)
    for x in range(1 << (t - 1)):
        ia, ib = _xz_index(u | (x << i), tp)
        if not have_s[ia]:
            d_s[ia] = A[ao + ia] - A[ao + (ia | last)]
            have_s[ia] = True
            cnt[ADD] += 1
        if not have_t[ib]:
            d_t[ib] = B[bo + ib] - B[bo + (ib | last)]
            have_t[ib] = True
            cnt[ADD] += 1
        _max2d(A[ao + ia], A[ao + (ia | last)], B[bo + ib], B[bo + (ib | last)], d_s[ia], d_t[ib],
               O, oo + x, oo + (x ^ flip), cnt)


# -- reduced operators for antisymmetric clusters --------------------------------


@njit(cache=True)
def _sigma_bar(i, t, A, ao, B, bo, u, O, oo, cnt):
    tp = (i + t) // 2
    half = 1 << (t - 1)
    for x in range(half):
        ia, ib = _xz_index(u | (x << i), tp)
        v = A[ao + ia] + B[bo + ib]
        O[oo + x] = v
        O[oo + (x | half)] = -v
    cnt[ADD] += half


@njit(cache=True)
def _mu_bar(i, t, A, ao, u, O, oo):
    for x in range(1 << t):
        O[oo + x] = abs(A[ao + (u | (x << i))])


# Gray-code walk over x = v·Q(4) with x_3 = 0: for step h the position that
# flips, whether it goes 0 -> 1, and the cluster index v of the new word.
_GRAY_FLIP = np.array([0, 1, 0, 2, 0, 1, 0], dtype=np.int64)
_GRAY_UP = np.zeros(7, dtype=np.int64)
_GRAY_V = np.zeros(8, dtype=np.int64)


def _gray_tables():
    from .transform import encode_inverse

    x = 0
    words = [0]
    for h in range(7):
        x ^= 1 << int(_GRAY_FLIP[h])
        words.append(x)
        _GRAY_UP[h] = (x >> int(_GRAY_FLIP[h])) & 1
    for h, w in enumerate(words):
        bits = np.array([(w >> k) & 1 for k in range(4)], dtype=np.uint8)
        v = encode_inverse(bits)
        _GRAY_V[h] = sum(int(v[k]) << k for k in range(4))


_gray_tables()


@njit(cache=True)
def _gray_init(y0, y1, y2, y3, O, oo, cnt):
    ys = (y0, y1, y2, y3)
    val = -0.5 * (y0 + y1 + y2 + y3)
    O[oo + _GRAY_V[0]] = val
    O[oo + (_GRAY_V[0] | 8)] = -val
    for h in range(7):
        y = ys[_GRAY_FLIP[h]]
        if _GRAY_UP[h]:
            val = val + y
        else:
            val = val - y
        O[oo + _GRAY_V[h + 1]] = val
        O[oo + (_GRAY_V[h + 1] | 8)] = -val
    cnt[ADD] += 10


# -- public wrappers -------------------------------------------------------------


def _bits_to_int(ubits) -> int:
    return sum((int(b) & 1) << k for k, b in enumerate(ubits))


def _cluster(a, dim, name="cluster"):
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.shape != (1 << dim,):
        raise ValueError(f"{name} must have {1 << dim} entries, got shape {arr.shape}")
    return arr


def _counter(counter):
    return (counter or OpCounter()).array


def _check_ubits(ubits, i):
    if len(ubits) != i:
        raise ValueError(f"expected {i} known bits, got {len(ubits)}")
    return _bits_to_int(ubits)


def sigma_generic(i, t, j, a, b, ubits=(), counter=None) -> np.ndarray:
    """Combine two child clusters into a parent t-cluster by direct maximization."""
    if (i + t + j) % 2:
        raise ValueError("i + t + j must be even")
    tp = (i + t + j) // 2
    u = _check_ubits(ubits, i)
    out = np.empty(1 << t)
    _sigma_generic(i, t, j, _cluster(a, tp, "A"), 0, _cluster(b, tp, "B"), 0, u, out, 0,
                   _counter(counter))
    return out


def mu_generic(i, t, j, a, ubits=(), counter=None) -> np.ndarray:
    """Fix the first i bits, keep the next t, maximize over the last j."""
    u = _check_ubits(ubits, i)
    out = np.empty(1 << t)
    _mu_generic(i, t, j, _cluster(a, i + t + j), 0, u, out, 0, _counter(counter))
    return out


def delta_mu(i, j, a, ubits=(), counter=None) -> float:
    """LLR of bit i of cluster ``a`` given its first i bits."""
    u = _check_ubits(ubits, i)
    return float(_delta_mu(i, j, _cluster(a, i + 1 + j), 0, u, _counter(counter)))


def max2d(s, t, delta, Delta, counter=None) -> np.ndarray:
    """Both crosswise maxima of pairwise sums, from the differences S0-S1 and T0-T1."""
    out = np.empty(2)
    _max2d(float(s[0]), float(s[1]), float(t[0]), float(t[1]), float(delta), float(Delta),
           out, 0, 1, _counter(counter))
    return out


def sigma_031_fast(a, b, counter=None) -> np.ndarray:
    out = np.empty(8)
    _sigma_031_fast(_cluster(a, 2, "S"), 0, _cluster(b, 2, "T"), 0, out, 0, _counter(counter))
    return out


def sigma_141_fast(a, b, u, counter=None) -> np.ndarray:
    out = np.empty(16)
    _sigma_141_fast(_cluster(a, 3, "S"), 0, _cluster(b, 3, "T"), 0, int(u) & 1, out, 0,
                    _counter(counter))
    return out


def sigma_121_fast(a, b, ubits, counter=None) -> np.ndarray:
    out = np.empty(4)
    _sigma_121_fast(_cluster(a, 2, "S"), 0, _cluster(b, 2, "T"), 0, _check_ubits(ubits, 1), out, 0,
                    _counter(counter))
    return out


def sigma_231_fast(a, b, ubits, counter=None) -> np.ndarray:
    out = np.empty(8)
    _sigma_231_fast(_cluster(a, 3, "S"), 0, _cluster(b, 3, "T"), 0, _check_ubits(ubits, 2), out, 0,
                    _counter(counter))
    return out


def sigma_max2d(i, t, a, b, ubits=(), counter=None) -> np.ndarray:
    """sigma_{i,t,1} computed through Max2D pairs (t >= 2)."""
    if (i + t + 1) % 2 or t < 2:
        raise ValueError("need i + t odd and t >= 2")
    tp = (i + t + 1) // 2
    u = _check_ubits(ubits, i)
    out = np.empty(1 << t)
    half = 1 << (tp - 1)
    _sigma_max2d(i, t, _cluster(a, tp, "A"), 0, _cluster(b, tp, "B"), 0, u, out, 0, _counter(counter),
                 np.empty(half), np.empty(half), np.empty(half, dtype=np.bool_),
                 np.empty(half, dtype=np.bool_))
    return out


def sigma_bar(i, t, a, b, ubits=(), counter=None) -> np.ndarray:
    """sigma_{i,t,0} for outputs antisymmetric in their last bit.

    Only the half with last bit 0 is computed; the other half is its negation.
    The antisymmetry is the caller's guarantee and is not checked.
    """
    if (i + t) % 2:
        raise ValueError("i + t must be even")
    tp = (i + t) // 2
    u = _check_ubits(ubits, i)
    out = np.empty(1 << t)
    _sigma_bar(i, t, _cluster(a, tp, "A"), 0, _cluster(b, tp, "B"), 0, u, out, 0, _counter(counter))
    return out


def mu_bar(i, t, a, ubits=(), counter=None) -> np.ndarray:
    """mu_{i,t,1} for a cluster antisymmetric in its last bit; free of cost."""
    u = _check_ubits(ubits, i)
    out = np.empty(1 << t)
    _mu_bar(i, t, _cluster(a, i + t + 1), 0, u, out, 0)
    return out


def gray_init_layer2(y4, counter=None) -> np.ndarray:
    """4-cluster over the inputs of a size-4 transform from its 4 channel LLRs.

    Entry v holds sum_k (x_k - 1/2) * y_k with x = v·Q(4): exact, with no
    additive constant, hence antisymmetric in v_3.
    """
    y = np.asarray(y4, dtype=np.float64)
    if y.shape != (4,):
        raise ValueError("need exactly 4 channel LLRs")
    out = np.empty(16)
    _gray_init(y[0], y[1], y[2], y[3], out, 0, _counter(counter))
    return out


def _max2d_cost(i, t):
    # 3 per Max2D pair plus one subtraction per distinct difference used.
    tp = (i + t + 1) // 2
    pairs = [_xz_index(x << i, tp) for x in range(1 << (t - 1))]
    return 3 * len(pairs) + len({p[0] for p in pairs}) + len({p[1] for p in pairs})


def cost_of(op: str, i: int = 0, t: int = 1, j: int = 0) -> int:
    """Counted cost of one operator call.

    ``op`` is one of ``sigma``, ``sigma_eff`` (Max2D based, j=1),
    ``sigma_bar`` (j=0), ``mu``, ``mu_bar``, ``delta_mu`` (t=1), ``gray``.
    """
    if op == "sigma":
        if (i + t + j) % 2:
            raise ValueError("i + t + j must be even")
        return (1 << t) * ((1 << (j + 1)) - 1)
    if op == "sigma_eff":
        if j != 1 or (i + t + j) % 2 or t < 2:
            raise ValueError(f"no Max2D form for sigma_{i},{t},{j}")
        return _max2d_cost(i, t)
    if op == "sigma_bar":
        if j != 0 or (i + t) % 2:
            raise ValueError(f"no reduced form for sigma_{i},{t},{j}")
        return 1 << (t - 1)
    if op == "mu":
        return (1 << t) * ((1 << j) - 1)
    if op == "mu_bar":
        return 0
    if op == "delta_mu":
        if t != 1:
            raise ValueError("delta_mu has t = 1")
        return (1 << (j + 1)) - 1
    if op == "gray":
        return 10
    raise ValueError(f"unknown operator {op!r}")
