"""Smoke tests for the python module against known closed-form values."""

import math

import pytest

import qotto


BATHS = qotto.BathPair(3.0, 0.1)


def test_no_transition_probability():
    assert qotto.tls_no_transition_prob(1.0, 2.0, 1.0) == pytest.approx(
        math.cos(1.5) ** 2, abs=1e-14
    )
    with pytest.raises(ValueError):
        qotto.tls_no_transition_prob(1.0, 1.0, 0.0)


def test_engine_invariants():
    with pytest.raises(ValueError):
        qotto.TwoLevelEngine(2.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        qotto.HarmonicEngine(1.0, 2.0, 0.5)
    engine = qotto.TwoLevelEngine(1.0, 2.0, 0.95)
    assert engine.q_star() == pytest.approx(0.9)


def test_macroscopic_efficiencies():
    eta_th, eta_ca = qotto.macroscopic_efficiencies(qotto.HarmonicEngine(1.0, 2.0, 1.2), BATHS)
    assert eta_th == pytest.approx(0.5)
    assert eta_ca == pytest.approx(29.0 / 30.0)


def test_adiabatic_anticorrelation():
    dist = qotto.build_joint_two_level(qotto.TwoLevelEngine(1.0, 2.0, 1.0), BATHS)
    m = qotto.moments(dist)
    assert m.pearson == pytest.approx(-1.0, abs=1e-12)
    assert dist.total_mass() == pytest.approx(1.0, abs=1e-13)

    ho = qotto.build_joint_harmonic(qotto.HarmonicEngine(1.0, 2.0, 1.0), BATHS, 160)
    assert qotto.moments(ho).pearson == pytest.approx(-1.0, abs=1e-9)


def test_cgf_normalization_and_oracle():
    engine = qotto.TwoLevelEngine(1.0, 2.0, 0.95)
    assert qotto.cgf_two_level(0.0, 0.0, engine, BATHS) == 0.0
    dist = qotto.build_joint_two_level(engine, BATHS)
    direct = qotto.cgf_two_level(0.1, -0.2, engine, BATHS)
    oracle = qotto.cgf_from_distribution(0.1, -0.2, dist) - qotto.cgf_from_distribution(
        0.0, 0.0, dist
    )
    assert direct == pytest.approx(oracle, abs=1e-12)


def test_cgf_domain_returns_none():
    engine = qotto.HarmonicEngine(1.0, 2.0, 1.2)
    assert qotto.cgf_harmonic(-3.0, 2.0, engine, BATHS) is None
    assert qotto.cgf_harmonic(-0.05, 0.1, engine, BATHS) is not None


def test_transition_matrix():
    rows = qotto.harmonic_transitions(1.2, 32)
    assert rows[0][0] == pytest.approx(math.sqrt(2.0 / 2.2), abs=1e-12)
    assert rows[0][1] == 0.0
    assert rows[2][4] == pytest.approx(rows[4][2], abs=1e-13)
    identity = qotto.harmonic_transitions(1.0, 8)
    assert all(identity[i][i] == 1.0 for i in range(8))


def test_rate_curves():
    engine = qotto.TwoLevelEngine(1.0, 2.0, 0.95)
    eta_th = qotto.moments(qotto.build_joint_two_level(engine, BATHS)).eta_macroscopic
    curve = qotto.rate_curve_two_level(engine, BATHS, [eta_th - 0.2, eta_th, eta_th + 0.2])
    assert curve[1][1] < 1e-8
    assert curve[0][1] > 0.0 and curve[2][1] > 0.0

    adiabatic = qotto.TwoLevelEngine(1.0, 2.0, 1.0)
    plateau = qotto.rate_curve_two_level(adiabatic, BATHS, [0.2, 0.5, 0.8])
    assert math.isinf(plateau[0][1])
    assert plateau[1][1] < 1e-8
    assert plateau[2][2] == "diverged-to-minus-infinity"


def test_degeneracy_checks():
    assert qotto.degeneracy_check_two_level(qotto.TwoLevelEngine(1.0, 2.0, 1.0), BATHS, 0.5)
    assert not qotto.degeneracy_check_two_level(qotto.TwoLevelEngine(1.0, 2.0, 0.95), BATHS, 0.5)


def test_sampling_determinism():
    sampler = qotto.CycleSampler(qotto.TwoLevelEngine(1.0, 2.0, 0.95), BATHS)
    a = qotto.sample_blocks(sampler, 10, 200, seed=7)
    b = qotto.sample_blocks(sampler, 10, 200, seed=7)
    assert a.eta_values == b.eta_values
    assert a.counts == b.counts
    rate = qotto.empirical_rate(a)
    assert rate and all(r[2] >= 0.0 for r in rate)
