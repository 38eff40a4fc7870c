"""Per-layer, per-phase operator schedules of the two SC engines.

Layer lam has 2**lam local phases.  A schedule row is an ordered list of
operator calls ``(code, i, t, j)``; rows are stored flat at index
``2**lam + psi`` so a length-n code needs ``2n`` rows.

Data flow of one call at layer lam (N = 2**(m - lam) sub-transforms):

* sigma variants read the dimension (i+t+j)/2 clusters of sub-transforms
  I and I+N on layer lam-1 and write dimension t clusters on layer lam;
* mu variants read dimension i+t+j and write dimension t on layer lam;
* delta-mu reads the single dimension i+1+j cluster of layer m and yields
  the decision LLR.
"""
from __future__ import annotations

import numpy as np

SIGMA = 0
SIGMA_FAST = 1
SIGMA_BAR = 2
MU = 3
MU_BAR = 4
DMU = 5

SF = 0
EFF = 1
MODES = {"sf": SF, "eff": EFF}

OP_NAMES = {SIGMA: "sigma", SIGMA_FAST: "sigma_eff", SIGMA_BAR: "sigma_bar",
            MU: "mu", MU_BAR: "mu_bar", DMU: "delta_mu"}

MAX_OPS = 4

# minimal code lengths per engine
MIN_M = {SF: 3, EFF: 4}


def sf_row(m: int, lam: int, psi: int) -> list[tuple[int, int, int, int]]:
    """Operators of the straightforward engine at layer lam (2 <= lam <= m)."""
    p = 1 << lam
    if lam < m:
        if psi == 0:
            return [(SIGMA, 0, 2, 2), (SIGMA, 0, 3, 1)]
        if psi == p - 3:
            return [(SIGMA, 1, 3, 0)]
        if psi == p - 2:
            return [(SIGMA, 2, 2, 0)]
        if psi == p - 1:
            return []
        return [(SIGMA, 1, 3, 2)] if psi % 2 else [(SIGMA, 2, 3, 1)]
    if psi == p - 2:
        return [(DMU, 1, 1, 1)]
    if psi == p - 1:
        return [(DMU, 2, 1, 0)]
    if psi == 0:
        ops = [(SIGMA, 0, 3, 1)]
    elif psi == p - 3:
        ops = [(SIGMA, 1, 3, 0)]
    else:
        ops = [(SIGMA, 1, 3, 2)] if psi % 2 else [(SIGMA, 2, 3, 1)]
    return ops + [(DMU, 0, 1, 2)]


def eff_row(m: int, lam: int, psi: int) -> list[tuple[int, int, int, int]]:
    """Operators of the efficient engine at layer lam (2 <= lam <= m).

    The layer-2 phase-0 cluster itself comes from the Gray-code initializer.
    """
    p = 1 << lam
    if lam == 2:
        return {0: [(MU_BAR, 0, 3, 1), (MU, 0, 2, 1)],
                1: [(MU, 1, 3, 0)],
                2: [(MU, 1, 2, 0)],
                3: []}[psi]
    if lam == m:
        if psi == 0:
            return [(SIGMA_FAST, 0, 3, 1), (MU, 0, 2, 1), (DMU, 0, 1, 1)]
        if psi in (1, p - 2):
            return [(DMU, 1, 1, 0), (MU, 1, 2, 0)]
        if psi in (2, p - 1):
            return [(DMU, 1, 1, 0)]
        if psi == p - 3:
            return [(SIGMA_BAR, 1, 3, 0), (MU_BAR, 0, 2, 1), (DMU, 0, 1, 1)]
        return [(SIGMA_FAST, 1, 2, 1), (DMU, 0, 1, 1)] if psi % 2 else [(DMU, 1, 1, 0)]
    if lam == m - 1:
        if psi == 0:
            return [(SIGMA_FAST, 0, 3, 1), (MU, 0, 2, 1)]
        if psi == p - 4:
            return [(SIGMA_BAR, 2, 4, 0), (MU_BAR, 0, 3, 1), (MU, 0, 2, 1)]
        if psi == p - 3:
            return [(MU, 1, 2, 0), (MU, 1, 3, 0)]
        if psi == p - 1:
            return []
        if psi % 2 or psi == p - 2:
            return [(MU, 1, 2, 0)]
        return [(SIGMA_FAST, 2, 3, 1), (MU, 0, 2, 1)]
    if psi == 0:
        return [(SIGMA_FAST, 0, 3, 1), (MU, 0, 2, 1)]
    if psi == p - 5:
        return [(SIGMA_BAR, 1, 5, 0), (MU_BAR, 0, 4, 1), (MU, 0, 3, 1)]
    if psi == p - 4:
        return [(MU, 1, 3, 0), (MU, 1, 4, 0)]
    if psi == p - 3:
        return [(MU, 1, 3, 0)]
    if psi == p - 2:
        return [(MU, 1, 2, 0)]
    if psi == p - 1:
        return []
    return [(SIGMA_FAST, 1, 4, 1), (MU, 0, 3, 1)] if psi % 2 else [(MU, 1, 3, 0)]


def row_cost(row) -> int:
    """Counted cost of one schedule row for a single sub-transform."""
    from .clusters import cost_of

    return sum(cost_of(OP_NAMES[code], i, t, j) for code, i, t, j in row)


def build_schedule(m: int, mode: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat operator table of shape (2n, MAX_OPS, 4) and per-row op counts."""
    if m < MIN_M[mode]:
        raise ValueError(f"code length 2**{m} is below the minimum for this engine")
    n = 1 << m
    table = np.zeros((2 * n, MAX_OPS, 4), dtype=np.int64)
    nops = np.zeros(2 * n, dtype=np.int64)
    row_fn = sf_row if mode == SF else eff_row
    for lam in range(2, m + 1):
        for psi in range(1 << lam):
            row = row_fn(m, lam, psi)
            r = (1 << lam) + psi
            nops[r] = len(row)
            for k, op in enumerate(row):
                table[r, k] = op
    return table, nops
