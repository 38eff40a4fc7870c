"""Acceptance suite: one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a pass/fail line per criterion
is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from _oracles import phase_llrs, random_spec
from cvpolar import clusters as cl
from cvpolar import sim
from cvpolar.listdec import ListDecoder
from cvpolar.sc import SCDecoder, calct, decision, sc_init, updatec
from cvpolar.sim import ChannelModel, DecoderConfig, run_fer
from cvpolar.transform import CodeSpec, encode

TITLES = {
    1: "efficient engine operation counts",
    2: "straightforward engine per-layer counts",
    3: "fast operators equal their generic definitions",
    4: "SC phase LLRs equal exhaustive maximization",
    5: "straightforward and efficient engines agree",
    6: "list decoder reduces to SC and to ML",
    7: "pool integrity and zero cluster copies",
    8: "shift, scale and score invariants",
    9: "end-to-end decoding of a (1024, 512) code",
}


def noisy(rng, spec, sigma=1.0):
    msg = rng.integers(0, 2, spec.k).astype(np.uint8)
    y = (1.0 - 2.0 * encode(spec.embed(msg))) + sigma * rng.standard_normal(spec.n)
    return msg, -2.0 * y / sigma**2


def eff_total(n):
    return 20 * n * math.log2(n) - 76.5 * n + 216


def test_criterion_1_eff_counts():
    t0 = time.perf_counter()
    expected = {16: 272, 32: 968, 64: 3000, 128: 8344, 1024: 126680}
    for n in [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]:
        dec = SCDecoder(CodeSpec(n, ()), "eff")
        dec.decode(np.random.default_rng(n).standard_normal(n))
        assert dec.counter.total == eff_total(n)
        if n in expected:
            assert dec.counter.total == expected[n]
    (row,) = sim.opcount_report(16384, 16384, "eff")
    assert row["measured"] == 3334360 == eff_total(16384)
    assert "10x" in row["note"]
    assert time.perf_counter() - t0 < 10


def test_criterion_2_sf_layer_counts():
    for m in (4, 6, 8):
        n = 1 << m
        dec = SCDecoder(CodeSpec(n, ()), "sf")
        dec.decode(np.random.default_rng(m).standard_normal(n))
        layers = dec.layer_ops
        assert layers[1] == n // 2
        for lam in range(2, m):
            assert layers[lam] == (1 << (m - lam)) * (40 * (1 << lam) - 96)
        assert layers[m + 1] == 7 * n - 10
    # the reference closed form is reported, not asserted
    rows = sim.opcount_report(16, 256, "sf")
    assert all(r["closed_form"] for r in rows)


def test_criterion_3_operator_oracles():
    rng = np.random.default_rng(3)
    trials = 10_000
    for _ in range(trials):
        s, t = rng.normal(size=(2, 2))
        np.testing.assert_allclose(cl.max2d(s, t, s[0] - s[1], t[0] - t[1]),
                                   [max(s[0] + t[0], s[1] + t[1]), max(s[0] + t[1], s[1] + t[0])],
                                   rtol=0, atol=1e-9)
        a, b = rng.normal(size=(2, 4))
        np.testing.assert_allclose(cl.sigma_031_fast(a, b), cl.sigma_generic(0, 3, 1, a, b),
                                   rtol=0, atol=1e-9)
        a, b = rng.normal(size=(2, 8))
        u = int(rng.integers(0, 2))
        np.testing.assert_allclose(cl.sigma_141_fast(a, b, u), cl.sigma_generic(1, 4, 1, a, b, (u,)),
                                   rtol=0, atol=1e-9)
        # reduced operators apply to clusters antisymmetric in their last bit
        h = rng.normal(size=(2, 4))
        a, b = np.concatenate([h[0], -h[0]]), np.concatenate([h[1], -h[1]])
        np.testing.assert_allclose(cl.sigma_bar(1, 5, a, b, (u,)), cl.sigma_generic(1, 5, 0, a, b, (u,)),
                                   rtol=0, atol=1e-9)
        a = np.concatenate([h[0], -h[0]])
        np.testing.assert_allclose(cl.mu_bar(0, 2, a), cl.mu_generic(0, 2, 1, a), rtol=0, atol=1e-9)
        y = rng.normal(size=4)
        # generic layer-2 cluster: -1/2 sum of (-1)^x_k y_k over the four codeword bits
        x = GRAY_CODEWORDS
        np.testing.assert_allclose(cl.gray_init_layer2(y), -0.5 * ((-1.0) ** x) @ y, rtol=0, atol=1e-9)


def _gray_codewords():
    from cvpolar.transform import cvpt_matrix

    q = cvpt_matrix(4).astype(int)
    v = np.arange(16)
    bits = (v[:, None] >> np.arange(4)) & 1
    return (bits @ q) % 2


GRAY_CODEWORDS = _gray_codewords()


def test_criterion_4_sc_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    for n, mode in [(8, "sf"), (16, "sf"), (16, "eff")]:
        for _ in range(200):
            spec = random_spec(rng, n, int(rng.integers(0, n + 1)))
            _, y = noisy(rng, spec)
            dec = SCDecoder(spec, mode)
            dec.decode(y)
            np.testing.assert_allclose(dec.llrs, phase_llrs(y, dec.u_hat), rtol=0, atol=1e-9)
    assert time.perf_counter() - t0 < 60


def test_criterion_5_engine_equivalence():
    rng = np.random.default_rng(5)
    for n in (16, 64, 256):
        spec = random_spec(rng, n, n // 2)
        sf, eff = SCDecoder(spec, "sf"), SCDecoder(spec, "eff")
        for _ in range(1000):
            _, y = noisy(rng, spec)
            sf.decode(y)
            eff.decode(y)
            np.testing.assert_array_equal(sf.u_hat, eff.u_hat)


def test_criterion_6_list_reductions():
    rng = np.random.default_rng(6)
    for n in (16, 64):
        spec = random_spec(rng, n, n // 2)
        sc, ld = SCDecoder(spec, "eff"), ListDecoder(spec, 1)
        for _ in range(1000):
            _, y = noisy(rng, spec)
            np.testing.assert_array_equal(ld.decode(y), sc.decode(y))
    spec = sim.mc_construct(16, 6, 1.0, 1000, 6)
    dec = ListDecoder(spec, 1 << spec.k)
    ch = ChannelModel.awgn(1.0)
    for _ in range(1000):
        msg = rng.integers(0, 2, spec.k)
        y = sim.transmit(encode(spec.embed(msg)), ch, rng)
        np.testing.assert_array_equal(dec.decode(y), sim.ml_oracle(spec, y))


def test_criterion_7_pool_integrity():
    rng = np.random.default_rng(7)
    for _ in range(100):
        spec = random_spec(rng, 64, int(rng.integers(8, 57)))
        dec = ListDecoder(spec, 8, skip_head=bool(rng.integers(0, 2)), sc_tail=bool(rng.integers(0, 2)))
        _, y = noisy(rng, spec)
        for _phi in dec.steps(y):
            assert dec.paths.audit() == []
        assert dec.cluster_copies == 0


def test_criterion_8_invariances():
    rng = np.random.default_rng(8)
    # constant shifts of individual bottom-layer clusters leave every LLR unchanged
    for _ in range(200):
        spec = random_spec(rng, 32, 16)
        _, y = noisy(rng, spec)
        ref, shifted = sc_init(spec, y, "sf"), sc_init(spec, y, "sf")
        shifted.clusters(1, 2)[:] += rng.uniform(-20, 20, size=(16, 1))
        for phi in range(spec.n):
            a, b = calct(ref, phi), calct(shifted, phi)
            assert abs(a - b) <= 1e-9
            for s in (ref, shifted):
                s.decide(phi, decision(spec, phi, a))
                updatec(s, phi)
    # positive scaling of the channel LLRs keeps every hard decision
    spec = random_spec(rng, 64, 32)
    decoders = [SCDecoder(spec, "sf"), SCDecoder(spec, "eff"), ListDecoder(spec, 4)]
    for _ in range(200):
        _, y = noisy(rng, spec)
        scale = float(np.exp(rng.uniform(-5, 5)))
        for dec in decoders:
            np.testing.assert_array_equal(dec.decode(scale * y), dec.decode(y))
    # scores never increase along a path and stay non-positive
    dec = ListDecoder(spec, 8)
    for _ in range(200):
        _, y = noisy(rng, spec)
        prev = None
        for _phi in dec.steps(y):
            scores, parents = dec.paths.scores, dec.paths.parents
            for p in dec.paths.active:
                assert scores[p] <= 0
                if prev is not None:
                    assert scores[p] <= prev[parents[p]]
            prev = scores


def test_criterion_9_end_to_end():
    t0 = time.perf_counter()
    spec = sim.mc_construct(1024, 512, sim.ebn0_to_sigma(2.0, 0.5), 1000, 9)
    assert spec.k == 512
    rng = np.random.default_rng(90)
    sc = SCDecoder(spec, "eff")
    for _ in range(1000):
        msg = rng.integers(0, 2, 512).astype(np.uint8)
        y = -2.0 * (1.0 - 2.0 * encode(spec.embed(msg)))
        np.testing.assert_array_equal(sc.decode(y), msg)
    ch = ChannelModel.awgn_ebn0(2.0, 0.5)
    fer1 = run_fer(spec, ch, DecoderConfig(1), 10_000, 91)
    fer8 = run_fer(spec, ch, DecoderConfig(8), 10_000, 91)
    print(f"\nFER at 2 dB: l=1 {fer1.errors}/10000, l=8 {fer8.errors}/10000")
    assert fer8.errors <= fer1.errors
    assert time.perf_counter() - t0 < 300


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
