import numpy as np
import pytest

from _oracles import ml_message, random_spec
from cvpolar.listdec import ListDecoder, decode_list, list_init
from cvpolar.sc import SCDecoder
from cvpolar.transform import CodeSpec, encode


def noisy_llrs(rng, spec, sigma=1.0):
    msg = rng.integers(0, 2, spec.k).astype(np.uint8)
    y = (1.0 - 2.0 * encode(spec.embed(msg))) + sigma * rng.standard_normal(spec.n)
    return msg, -2.0 * y / sigma**2


# -- pool primitives --------------------------------------------------------------------


def pool_state(lp):
    p = lp.pool
    return (p.array_index.copy(), p.ref_count.copy(), p.free_top.copy(),
            [sorted(p.free_stack[lam, d, :p.free_top[lam, d]]) for lam in range(lp.spec.m + 1)
             for d in range(5)])


def assert_same_state(a, b):
    for x, y in zip(a[:3], b[:3]):
        np.testing.assert_array_equal(x, y)
    assert a[3] == b[3]


def test_initial_pool():
    lp = list_init(CodeSpec(16, ()), 4)
    assert lp.active == [0]
    assert lp.audit() == []
    assert lp.slot(0, 2, 0) == 4  # bound to the sentinel
    np.testing.assert_array_equal(lp.decisions(0, 3), 0)


def test_clone_then_kill_restores_pool():
    lp = list_init(CodeSpec(16, ()), 4)
    lp.acquire_clusters(0, 2, 4)[:] = 1.0
    lp.acquire_decisions(0, 3)[:] = 1
    before = pool_state(lp)
    q = lp.clone(0)
    assert q == 1 and lp.active == [0, 1]
    assert lp.audit() == []
    lp.kill(q)
    assert lp.audit() == []
    assert_same_state(pool_state(lp), before)


def test_clone_shares_until_write():
    lp = list_init(CodeSpec(16, ()), 4)
    lp.acquire_decisions(0, 3)[:] = [1, 0, 1, 1]
    t = lp.acquire_clusters(0, 2, 4)
    t[:] = 7.0
    q = lp.clone(0)
    assert lp.slot(q, 3, 0) == lp.slot(0, 3, 0)
    mine = lp.acquire_decisions(q, 3)
    np.testing.assert_array_equal(mine, [1, 0, 1, 1])  # decision arrays copy on rebind
    assert lp.slot(q, 3, 0) != lp.slot(0, 3, 0)
    assert lp.decision_copies == 1
    lp.acquire_clusters(q, 2, 4)  # cluster arrays rebind without copying
    assert lp.slot(q, 2, 4) != lp.slot(0, 2, 4)
    assert lp.cluster_copies == 0
    assert lp.audit() == []


def test_kill_of_last_sharer_frees_slot():
    lp = list_init(CodeSpec(16, ()), 2)
    lp.acquire_decisions(0, 3)
    s = lp.slot(0, 3, 0)
    q = lp.clone(0)
    lp.kill(0)
    assert s not in lp.pool.free_stack[3, 0, :lp.pool.free_top[3, 0]]
    lp.kill(q)
    assert s in lp.pool.free_stack[3, 0, :lp.pool.free_top[3, 0]]
    assert lp.audit() == []
    assert lp.pool.ref_count[3, 2, 0] == lp.pool.ref_count[0, 2, 1]  # sentinel untouched


def test_clone_and_kill_errors():
    lp = list_init(CodeSpec(16, ()), 2)
    lp.clone(0)
    with pytest.raises(RuntimeError):
        lp.clone(0)
    lp.kill(1)
    with pytest.raises(ValueError):
        lp.kill(1)
    with pytest.raises(ValueError):
        list_init(CodeSpec(16, ()), 0)


def test_audit_detects_corruption():
    lp = list_init(CodeSpec(16, ()), 2)
    lp.acquire_decisions(0, 3)
    lp.pool.ref_count[3, lp.slot(0, 3, 0), 0] += 1
    assert any("count" in msg for msg in lp.audit())


# -- decoding -----------------------------------------------------------------------------


def test_first_information_phase_splits():
    spec = CodeSpec(16, ())
    dec = ListDecoder(spec, 2)
    y = np.random.default_rng(0).standard_normal(16)
    steps = dec.steps(y)
    next(steps)
    sc = SCDecoder(spec)
    sc.decode(y)
    r0 = sc.llrs[0]
    assert dec.paths.active == [0, 1]
    np.testing.assert_allclose(dec.paths.scores, [0.0, -abs(r0)])
    bit0 = int(r0 < 0)
    assert dec.paths.decisions(0, spec.m)[0] == bit0
    assert dec.paths.decisions(1, spec.m)[0] == bit0 ^ 1


@pytest.mark.parametrize("n", [16, 64])
def test_list_of_one_is_sc(n):
    rng = np.random.default_rng(n)
    spec = random_spec(rng, n, n // 2)
    sc, ld = SCDecoder(spec, "eff"), ListDecoder(spec, 1)
    for _ in range(200):
        _, y = noisy_llrs(rng, spec)
        np.testing.assert_array_equal(ld.decode(y), sc.decode(y))


def test_large_list_is_ml():
    rng = np.random.default_rng(6)
    spec = random_spec(rng, 16, 6)
    dec = ListDecoder(spec, 64)
    for _ in range(200):
        _, y = noisy_llrs(rng, spec)
        np.testing.assert_array_equal(dec.decode(y), ml_message(spec, y))
        assert dec.score <= 0


def test_pool_integrity_every_phase():
    rng = np.random.default_rng(7)
    spec = random_spec(rng, 64, 32)
    dec = ListDecoder(spec, 8)
    for _ in range(10):
        _, y = noisy_llrs(rng, spec)
        prev = None
        for _phi in dec.steps(y):
            assert dec.paths.audit() == []
            scores, parents = dec.paths.scores, dec.paths.parents
            for p in dec.paths.active:
                assert scores[p] <= 0
                if prev is not None:
                    assert scores[p] <= prev[parents[p]]
            prev = scores
        assert dec.cluster_copies == 0


@pytest.mark.parametrize("l", [2, 4])
def test_options_do_not_change_result(l):
    rng = np.random.default_rng(l)
    spec = CodeSpec(32, tuple(range(8)) + (9, 10, 12, 16, 17, 30))
    plain = ListDecoder(spec, l)
    variants = [ListDecoder(spec, l, skip_head=True), ListDecoder(spec, l, sc_tail=True),
                ListDecoder(spec, l, skip_head=True, sc_tail=True)]
    for _ in range(200):
        _, y = noisy_llrs(rng, spec)
        ref = plain.decode(y)
        for v in variants:
            np.testing.assert_array_equal(v.decode(y), ref)
    assert variants[0].counter.total < plain.counter.total


def test_determinism():
    rng = np.random.default_rng(9)
    spec = random_spec(rng, 32, 16)
    _, y = noisy_llrs(rng, spec)
    a = decode_list(spec, y, 4)
    b = decode_list(spec, y, 4)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1] and a[2].total == b[2].total


@pytest.mark.parametrize("l", [1, 2, 8])
def test_all_information_noiseless(l):
    rng = np.random.default_rng(l)
    spec = CodeSpec(32, ())
    dec = ListDecoder(spec, l)
    for _ in range(10):
        msg = rng.integers(0, 2, 32).astype(np.uint8)
        np.testing.assert_array_equal(dec.decode(-2.0 * (1.0 - 2.0 * encode(msg))), msg)
        assert dec.score == 0


def test_sf_engine_list():
    rng = np.random.default_rng(11)
    spec = random_spec(rng, 16, 5)
    dec = ListDecoder(spec, 32, mode="sf")
    for _ in range(50):
        _, y = noisy_llrs(rng, spec)
        np.testing.assert_array_equal(dec.decode(y), ml_message(spec, y))
