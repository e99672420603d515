import numpy as np
import pytest

from irsdof.bounds import (
    KIND_CLOSED,
    KIND_MC,
    active_curve_points,
    active_lower_sum,
    active_upper_sum,
    best_silenced_count,
    eps_relaxed_lower_sum_mc,
    outer_pair_value,
    passive_lower_sum_mc,
    passive_upper_sum_mc,
    region_contains,
    rho_limited_lower_sum_mc,
    silencing_cost,
    timeshare_contains,
)
from irsdof.channel import SystemConfig
from irsdof.errors import WeightSumError
from irsdof.montecarlo import wilson_interval
from irsdof.topology import NetworkMatrix, full_network, no_cross_network

UNIT_GEOMETRY = dict(wavelength_m=4.0 * np.pi, dist_irs_m=1.0, dist_direct_m=1.0)


def test_region_contains_oracle_points():
    full2 = full_network(2)
    assert region_contains(full2, (0.5, 0.5))
    assert region_contains(full2, (1.0, 0.0))
    assert not region_contains(full2, (0.6, 0.5))
    iso2 = no_cross_network(2)
    assert region_contains(iso2, (1.0, 1.0))
    assert not region_contains(iso2, (1.1, 0.0))
    assert not region_contains(iso2, (-0.1, 0.5))
    one_way = NetworkMatrix.from_lines(["11", "01"])
    # only one cross link present still caps the pair sum at 1
    assert region_contains(one_way, (0.7, 0.3))
    assert not region_contains(one_way, (0.7, 0.4))
    with pytest.raises(ValueError):
        region_contains(full2, (0.5, 0.5, 0.5))


def test_timeshare_certificates():
    full3 = full_network(3)
    e = np.eye(3)
    assert timeshare_contains(full3, (1 / 3, 1 / 3, 1 / 3), e,
                              (1 / 3, 1 / 3, 1 / 3))
    assert timeshare_contains(full3, (0.5, 0.5, 0.0), e, (0.5, 0.5, 0.0))
    # a vertex outside the region invalidates the certificate
    assert not timeshare_contains(full3, (0.5, 0.5, 0.0),
                                  [(1, 1, 0), (0, 0, 0)], (0.5, 0.5))
    # the combination must actually hit the claimed point
    assert not timeshare_contains(full3, (0.5, 0.5, 0.5), e, (0.5, 0.5, 0.0))
    with pytest.raises(WeightSumError):
        timeshare_contains(full3, (0.5, 0.5, 0.0), e, (0.7, 0.6, -0.3))
    with pytest.raises(WeightSumError):
        timeshare_contains(full3, (0.5, 0.5, 0.0), e, (0.4, 0.4, 0.1))
    with pytest.raises(ValueError):
        timeshare_contains(full3, (0.5, 0.5, 0.0), e, (0.5, 0.5))


def test_outer_pair_values():
    assert outer_pair_value(0, 0) == 2.0
    assert outer_pair_value(1, 0) == 1.5
    assert outer_pair_value(0, 1) == 1.5
    assert outer_pair_value(1, 1) == 1.0
    with pytest.raises(ValueError):
        outer_pair_value(2, 0)


def test_silencing_cost_tables():
    assert [silencing_cost(3, w) for w in range(4)] == [0, 4, 6, 6]
    assert [silencing_cost(4, w) for w in range(5)] == [0, 6, 10, 12, 12]
    assert [silencing_cost(5, w) for w in range(6)] == [0, 8, 14, 18, 20, 20]
    with pytest.raises(ValueError):
        silencing_cost(3, 4)
    with pytest.raises(ValueError):
        silencing_cost(3, -1)


def test_lower_bound_steps_for_small_k():
    assert [active_lower_sum(3, q) for q in range(9)] == [
        1.5, 1.5, 1.5, 1.5, 2.0, 2.0, 3.0, 3.0, 3.0,
    ]
    for q in range(16):
        expected = (2.0 if q < 6 else 2.5 if q < 10 else 3.0 if q < 12 else 4.0)
        assert active_lower_sum(4, q) == expected
    for q in range(24):
        expected = (2.5 if q < 8 else 3.0 if q < 14 else 3.5 if q < 18
                    else 4.0 if q < 20 else 5.0)
        assert active_lower_sum(5, q) == expected
    assert best_silenced_count(3, 5) == 1
    with pytest.raises(ValueError):
        best_silenced_count(1, 4)
    with pytest.raises(ValueError):
        best_silenced_count(3, -1)


def test_upper_bound_formula_spot_values():
    assert active_upper_sum(3, 0) == 1.5
    assert active_upper_sum(3, 4) == 2.5
    assert active_upper_sum(3, 6) == 3.0
    assert active_upper_sum(3, 100) == 3.0
    assert active_upper_sum(5, 8) == 3.5
    assert active_upper_sum(5, 19) == pytest.approx(2.5 + 19 / 8)
    assert active_upper_sum(5, 40) == 5.0
    with pytest.raises(ValueError):
        active_upper_sum(1, 4)


def test_lower_never_exceeds_upper_and_endpoints_meet():
    for k in range(2, 7):
        for q in range(41):
            lo = active_lower_sum(k, q)
            hi = active_upper_sum(k, q)
            assert lo <= hi + 1e-12
            if q == 0:
                assert lo == hi == k / 2.0
            if q >= k * (k - 1):
                assert lo == hi == float(k)


def test_active_curve_points_layout():
    pts = active_curve_points(3, (0, 4, 6))
    assert len(pts) == 9
    tags = [p.method_tag for p in pts[:3]]
    assert tags == ["active-lower/closed-form", "active-upper/closed-form",
                    "no-surface/closed-form"]
    for p in pts:
        assert p.kind == KIND_CLOSED
        assert p.ci_low == p.value == p.ci_high
        assert p.seed == 0 and p.samples == 0
    by_tag = {(p.q, p.method_tag): p.value for p in pts}
    assert by_tag[(4, "active-lower/closed-form")] == 2.0
    assert by_tag[(4, "active-upper/closed-form")] == 2.5
    assert by_tag[(6, "no-surface/closed-form")] == 1.5


def test_passive_estimators_with_no_elements():
    cfg = SystemConfig(K=3, Q=0)
    lo = passive_lower_sum_mc(cfg, samples=40, seed=1)
    hi = passive_upper_sum_mc(cfg, samples=40, seed=1)
    for p in (lo, hi):
        assert p.kind == KIND_MC
        assert p.value == p.ci_low == p.ci_high == 1.5
        assert p.q == 0 and p.samples == 40
    assert lo.method_tag == "passive-lower/pinv-w/all"
    assert hi.method_tag == "passive-upper/min-linf"


def test_passive_estimators_saturate_when_direct_is_blocked():
    # negligible direct gains make every nulling system solvable inside
    # the cap, so both estimators sit at their K-user ceilings
    cfg = SystemConfig(K=3, Q=8, blockage=1e-20)
    lo = passive_lower_sum_mc(cfg, samples=60, seed=2)
    hi = passive_upper_sum_mc(cfg, samples=60, seed=2)
    assert lo.value == lo.ci_low == lo.ci_high == 3.0
    assert hi.value == hi.ci_low == hi.ci_high == 3.0


def test_passive_canonical_subset_never_beats_full_search():
    cfg = SystemConfig(K=3, Q=10, blockage=2.5e-7)
    full = passive_lower_sum_mc(cfg, samples=150, seed=4)
    canon = passive_lower_sum_mc(cfg, samples=150, seed=4, canonical_b=True)
    assert canon.method_tag == "passive-lower/pinv-w/canonical"
    assert canon.value <= full.value + 1e-12
    assert canon.value >= 1.5 and full.value <= 3.0


def test_passive_upper_dominates_lower_on_shared_draws():
    for q in (6, 10, 20):
        cfg = SystemConfig(K=3, Q=q, blockage=2.5e-7)
        lo = passive_lower_sum_mc(cfg, samples=150, seed=11)
        hi = passive_upper_sum_mc(cfg, samples=150, seed=11)
        assert hi.value >= lo.value - 1e-12
        assert 1.5 <= lo.value <= 3.0
        assert 1.5 <= hi.value <= 3.0


def test_eps_point_maps_a_wilson_interval():
    cfg = SystemConfig(K=3, Q=18, blockage=5e-10)
    p = eps_relaxed_lower_sum_mc(cfg, 0.9, samples=400, seed=3)
    assert p.method_tag == "eps-relaxed/disjoint_blocks/eps=0.9"
    prob = p.value / 1.5 - 1.0
    successes = round(prob * 400)
    lo, hi = wilson_interval(successes, 400)
    assert p.ci_low == pytest.approx(1.5 + 1.5 * lo, rel=1e-12)
    assert p.ci_high == pytest.approx(1.5 + 1.5 * hi, rel=1e-12)
    assert 1.5 <= p.ci_low <= p.value <= p.ci_high <= 3.0


def test_eps_value_monotone_in_q_and_in_eps():
    # shared seed, prefix-stable channel draws and nested amplitude bands
    # make both orderings hold sample by sample, not just on average
    values = {}
    for q in (9, 18, 36):
        for eps in (0.7, 0.8, 0.9):
            cfg = SystemConfig(K=3, Q=q, blockage=5e-10)
            values[q, eps] = eps_relaxed_lower_sum_mc(
                cfg, eps, samples=300, seed=5).value
    assert values[9, 0.9] <= values[18, 0.9] <= values[36, 0.9]
    assert values[9, 0.7] <= values[18, 0.7] <= values[36, 0.7]
    assert values[18, 0.7] <= values[18, 0.8] <= values[18, 0.9]
    assert values[36, 0.9] > 1.5  # the regime is not degenerate


def test_eps_all_subsets_dominates_disjoint_blocks():
    cfg = SystemConfig(K=2, Q=8, blockage=0.25, **UNIT_GEOMETRY)
    dis = eps_relaxed_lower_sum_mc(cfg, 0.9, samples=120, seed=9)
    full = eps_relaxed_lower_sum_mc(cfg, 0.9, samples=120, seed=9,
                                    strategy="all_subsets")
    assert full.method_tag == "eps-relaxed/all_subsets/eps=0.9"
    assert full.value >= dis.value - 1e-12


def test_rho_point_mapping_and_validation():
    cfg = SystemConfig(K=2, Q=16, snr_rho=25.0, **UNIT_GEOMETRY)
    p = rho_limited_lower_sum_mc(cfg, 0.3, samples=300, seed=6)
    assert p.method_tag == "rho-limited/phase-align/eps=0.3"
    ceiling = 2.0 * 0.7
    assert 0.0 <= p.ci_low <= p.value <= p.ci_high <= ceiling + 1e-12
    prob = p.value / ceiling
    successes = round(prob * 300)
    lo, hi = wilson_interval(successes, 300)
    assert p.ci_low == pytest.approx(ceiling * lo, rel=1e-12, abs=1e-12)
    assert p.ci_high == pytest.approx(ceiling * hi, rel=1e-12)
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            rho_limited_lower_sum_mc(cfg, bad, samples=10, seed=1)
