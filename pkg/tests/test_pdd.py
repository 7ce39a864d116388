import json

import numpy as np
import pytest

from fh2lab import pdd
from fh2lab.circuit import H, X, Z, general, hc1q, iqp, random_general, random_hc1q, write_circuit
from fh2lab.errors import CircuitError, ResourceLimitError
from fh2lab.statevector import distribution, fidelity, simulate


@pytest.fixture
def yes_instance():
    return pdd.make_instance(hc1q(3), hc1q(3, [X(3)]), 0.9, 0.1)


@pytest.fixture
def no_instance():
    return pdd.make_instance(hc1q(3), hc1q(3), 0.9, 0.1)


def test_make_instance_validation(yes_instance):
    assert yes_instance.families == ("hc1q", "hc1q")
    with pytest.raises(ValueError):
        pdd.make_instance(hc1q(3), hc1q(3), 0.5, 0.5)
    with pytest.raises(ValueError):
        pdd.make_instance(hc1q(3), hc1q(3), 1.2, 0.1)
    with pytest.raises(ValueError):
        pdd.make_instance(hc1q(3), hc1q(3), 0.5, 0.4, min_gap=0.2)
    with pytest.raises(CircuitError):
        pdd.make_instance(hc1q(3), hc1q(4), 0.9, 0.1)


def test_yes_instance_is_analytic(yes_instance):
    p, q = distribution(yes_instance.u1), distribution(yes_instance.u2)
    assert abs(p[0] - q[0]) == pytest.approx(1, abs=1e-12)


def test_honest_merlin_point_masses(no_instance, yes_instance):
    assert all(str(pdd.honest_merlin(no_instance, s)) == "000" for s in range(20))
    for s in range(20):
        coin, z = pdd.honest_merlin_draw(yes_instance, s)
        assert str(z) == ("000" if coin == 0 else "001")


def test_honest_merlin_distribution():
    inst = pdd.make_instance(random_hc1q(3, 6, 1), random_hc1q(3, 6, 2), 0.9, 0.1)
    mix = (distribution(inst.u1) + distribution(inst.u2)) / 2
    n = 10_000
    counts = np.bincount([pdd.honest_merlin(inst, s).to_int() for s in range(n)], minlength=8)
    sigma = np.sqrt(mix * (1 - mix) / n)
    assert np.all(np.abs(counts / n - mix) <= 4 * sigma + 1e-12)


def test_arthur_yes(yes_instance):
    out = pdd.arthur_verify(yes_instance, "000", 5, seed=1)
    assert out.accepted and out.transcript["T"] == 1000
    assert out.p_estimate.value == 1 and out.q_estimate.value == 0
    assert out.threshold == pytest.approx(0.7)


def test_arthur_no_rejects(no_instance):
    assert not any(pdd.arthur_verify(no_instance, "000", 5, s).accepted for s in range(20))


def test_arthur_iqp_pair():
    inst = pdd.make_instance(iqp(2), iqp(2, [Z(1)]), 0.9, 0.1)
    out = pdd.arthur_verify(inst, "00", 5, seed=0)
    assert out.accepted
    # f is identically 1 for D empty; for Z(1) it is a mean-zero +-1 variable
    assert out.p_estimate.value == 1
    assert abs(out.q_estimate.value) <= out.q_estimate.epsilon


def test_arthur_refuses_general_and_bad_width(yes_instance):
    inst = pdd.make_instance(general(2, [H(1)]), general(2), 0.9, 0.1)
    with pytest.raises(CircuitError):
        pdd.arthur_verify(inst, "00", 5)
    with pytest.raises(ValueError):
        pdd.arthur_verify(yes_instance, "00", 5)


def test_arthur_makes_no_oracle_calls(monkeypatch, yes_instance):
    def boom(*a, **k):
        raise AssertionError("oracle used")
    monkeypatch.setattr(pdd, "simulate", boom)
    pdd._state.cache_clear()
    assert pdd.arthur_verify(yes_instance, "001", 5, 3).accepted


def test_bounds():
    assert pdd.completeness_bound(0.9, 5) == pytest.approx(0.4380, abs=5e-5)
    assert pdd.soundness_bound(5) == pytest.approx(0.02677, abs=5e-6)
    for k in range(5, 30):
        for a in np.linspace(0.5, 1.0, 11):
            gap = pdd.completeness_bound(a, k) - pdd.soundness_bound(k)
            assert gap > a / 2 - 0.07
            if a >= 0.9:
                assert gap > 0.4


def test_threshold_sandwich():
    eps_grid = np.linspace(-1, 1, 9)
    for a, b in ((0.9, 0.1), (0.6, 0.3), (0.5, 0.0)):
        eps, thr = (a - b) / 8, pdd.acceptance_threshold(a, b)
        for p, q in ((a, 0.0), (1.0, 0.0), (0.0, a), (b, 0.0), (0.3, 0.3), (0.5, 0.5 - b)):
            for ep in eps_grid:
                for eq in eps_grid:
                    pt, qt = p + ep * eps, q + eq * eps
                    if abs(p - q) >= a:
                        assert abs(pt - qt) >= thr - 1e-12
                    if abs(p - q) <= b:
                        assert abs(pt - qt) < thr


def test_run_ma_and_decider(yes_instance, no_instance):
    assert sum(pdd.run_ma(yes_instance, 5, s).accepted for s in range(50)) >= 45
    assert sum(pdd.run_ma(no_instance, 5, s).accepted for s in range(50)) == 0
    assert sum(pdd.bqp_decider(yes_instance, 5, s).accepted for s in range(50)) >= 45
    assert sum(pdd.bqp_decider(no_instance, 5, s).accepted for s in range(50)) == 0
    out = pdd.bqp_decider(yes_instance, 5, 1)
    assert "statevector" in out.transcript["sampling"]
    assert out.p_estimate.T == 1000


def test_merlin_width_cap():
    inst = pdd.make_instance(hc1q(6), hc1q(6), 0.9, 0.1)
    with pytest.raises(ResourceLimitError):
        pdd.honest_merlin(inst, 0, max_width=5)


def test_reduction_identity():
    inst = pdd.bqp_reduction(general(2), r=3, m=3)
    p, q = distribution(inst.u1), distribution(inst.u2)
    assert p[0] == pytest.approx(1, abs=1e-12)
    assert abs(p[0] - q[0]) == pytest.approx(1 - 2.0**-6, abs=1e-12)
    assert abs(p[0] - q[0]) >= inst.a


def test_reduction_rejecting_verifier():
    inst = pdd.bqp_reduction(general(2, [X(1)]), r=3, m=3)
    diff = np.abs(distribution(inst.u1) - distribution(inst.u2))
    assert diff.max() <= max(2.0**-3, 0) + 2.0**-6 + 1e-12
    assert diff.max() <= inst.b


def test_reduction_decomposition():
    for seed in range(10):
        v = random_general(3, 10, seed)
        inst = pdd.bqp_reduction(v, 3, 2)
        assert fidelity(simulate(inst.u1), pdd.reduction_branch_state(v, 2)) >= 1 - 1e-10


def test_reduction_parameters():
    assert pdd.reduction_thresholds(2, 3, 3) == ((1 - 1 / 8) ** 2 - 1 / 64, 1 / 8 + 1 / 64)
    with pytest.raises(ValueError):
        pdd.bqp_reduction(general(1), r=1, m=1)
    with pytest.raises(ValueError):
        pdd.bqp_reduction(general(2), r=0, m=3)


def test_instance_files(tmp_path, yes_instance):
    (tmp_path / "c").mkdir()
    write_circuit(yes_instance.u1, tmp_path / "c" / "u1.hc1q")
    write_circuit(yes_instance.u2, tmp_path / "c" / "u2.hc1q")
    doc = pdd.instance_document("c/u1.hc1q", "c/u2.hc1q", 0.9, 0.1)
    (tmp_path / "inst.json").write_text(json.dumps(doc))
    assert pdd.load_instance(tmp_path / "inst.json") == yes_instance
    (tmp_path / "bad.json").write_text(json.dumps({"u1": "c/u1.hc1q"}))
    with pytest.raises(ValueError):
        pdd.load_instance(tmp_path / "bad.json")


def test_outcome_json_replay(yes_instance):
    out = pdd.run_ma(yes_instance, 5, seed=9)
    doc = json.loads(json.dumps(out.to_dict()))
    assert doc["transcript"]["T"] == 1000
    again = pdd.arthur_verify(yes_instance, doc["z"], 5, pdd._rng.derive_seed(9, "ma/arthur"))
    assert again.to_dict()["p_estimate"] == doc["p_estimate"]
