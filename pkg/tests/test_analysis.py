import numpy as np
import pytest
from numpy.testing import assert_allclose

from xyquench.analysis import (
    CollapseRevivalRecord,
    SweepGrid,
    derivative_scan,
    discord_slope,
    field_profile,
    find_collapse,
    find_revival,
    grid_sweep,
    is_exceptional,
    revival_predicate,
    state_at,
)
from xyquench.discord import discord
from xyquench.entanglement import log_negativity

GAMMA = 0.5
# Regression fixture produced by find_collapse itself (bisection to 1e-6).
A_C_T1 = 0.75337616


def ln_at(a, t):
    return log_negativity(state_at(a, t, GAMMA))


def record(a_c, slope):
    return CollapseRevivalRecord(1.0, a_c, slope, True, 0.1, None, False, is_exceptional(a_c))


def test_field_profile_polarized_limit():
    # perturbatively the pair entanglement decays like 1/a
    pts = field_profile(0.0, GAMMA, [1e2, 1e3, 1e4])
    ln = [p.ln for p in pts]
    assert ln[0] > ln[1] > ln[2] and ln[2] < 1e-4
    assert_allclose(ln[1] / ln[2], 10, rtol=0.05)
    assert all(p.discord < 1e-4 for p in pts[1:])


def test_field_profile_stationary_row():
    p0, p5 = field_profile(0.0, GAMMA, [0.0])[0], field_profile(5.0, GAMMA, [0.0])[0]
    assert_allclose([p0.ln, p0.discord], [p5.ln, p5.discord], atol=1e-8)


def test_field_profile_preserves_order_and_measures():
    a = [2.0, 0.5, 1.0]
    pts = field_profile(1.0, GAMMA, a, measures=("ln", "deficit", "mi"), workers=2)
    assert [p.a_tilde for p in pts] == a
    assert all(p.discord is None and p.deficit is not None and p.mutual_info is not None for p in pts)
    with pytest.raises(ValueError):
        field_profile(1.0, GAMMA, a, measures=("bogus",))


def test_field_profile_collapse_then_revival_at_t1():
    a = np.linspace(0, 3, 61)
    ln = np.array([p.ln for p in field_profile(1.0, GAMMA, a, measures=("ln",))])
    zero = np.flatnonzero(ln == 0)
    assert ln[0] > 0 and zero.size > 0 and ln[zero[-1] + 1:].min() > 0


def test_find_collapse_t1():
    a_c = find_collapse(1.0, GAMMA, (0.0, 3.0))
    assert_allclose(a_c, A_C_T1, atol=1e-6)
    assert ln_at(a_c - 1e-4, 1.0) > 0
    assert ln_at(a_c + 1e-4, 1.0) == 0


def test_find_collapse_narrow_window():
    # at t = 0.5 the zero-entanglement interval is only ~2e-3 wide
    a_c = find_collapse(0.5, GAMMA, step=0.05)
    assert a_c is not None
    assert ln_at(a_c - 1e-4, 0.5) > 0 and ln_at(a_c + 1e-4, 0.5) == 0


def test_find_collapse_synthetic():
    assert find_collapse(0, window=(0, 3), lam_min=lambda a: 0.1) is None
    assert find_collapse(0, window=(0, 3), lam_min=lambda a: -0.1 - a) is None
    a_c = find_collapse(0, window=(0, 3), lam_min=lambda a: a - 1.2345)
    assert_allclose(a_c, 1.2345, atol=1e-6)
    # touches zero between grid points
    a_c = find_collapse(0, window=(0, 3), step=0.1, lam_min=lambda a: 1e-3 - 10 * (a - 1.234) ** 2)
    assert_allclose(a_c, 1.234 - np.sqrt(1e-4), atol=1e-6)


def test_find_revival():
    for t, revived in ((1.0, True), (3.0, False), (4.0, True)):
        a_c = find_collapse(t, GAMMA)
        max_ln, peak = find_revival(t, GAMMA, a_c)
        assert (max_ln > 1e-4) == revived
        assert (peak is not None) == revived
        if revived:
            assert peak > a_c
            assert_allclose(ln_at(peak, t), max_ln, rtol=1e-6)


def test_discord_slope_signs():
    assert discord_slope(1.0, GAMMA, find_collapse(1.0, GAMMA)) > 0
    a_c3 = find_collapse(3.0, GAMMA)
    s3 = discord_slope(3.0, GAMMA, a_c3)
    assert s3 <= 0
    # discord is even in the field, so the slope flips sign on the negative axis
    assert_allclose(discord_slope(3.0, GAMMA, -a_c3), -s3, atol=1e-5)


def test_revival_predicate():
    assert revival_predicate(record(1.5, 0.2))
    assert not revival_predicate(record(1.5, -0.2))
    assert revival_predicate(record(-1.5, -0.2))
    assert record(1.05, 0.1).exceptional_near_qpt
    assert not record(1.5, 0.1).exceptional_near_qpt
    with pytest.raises(ValueError):
        revival_predicate(record(None, None))


def test_derivative_scan_records():
    recs = derivative_scan([1.0, 3.0], GAMMA)
    assert [r.t_tilde for r in recs] == [1.0, 3.0]
    r1, r3 = recs
    assert r1.revived and r1.predicate_holds and r1.slope > 0
    assert not r3.revived and not r3.predicate_holds
    assert r1.a_revival_onset is not None and r1.a_revival_onset > r1.a_c
    assert r3.a_revival_onset is None


def test_derivative_scan_empty_window():
    # entanglement stays positive over [2, 3] at t = 1
    assert derivative_scan([1.0], GAMMA, window=(2.0, 3.0)) == []


def test_grid_sweep_toy():
    grid = SweepGrid(0.0, 2.0, 3, 0.0, 2.0, 3, GAMMA)
    rows = grid_sweep(grid)
    assert len(rows) == 9
    assert [(r.t_tilde, r.a_tilde) for r in rows[:3]] == [(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]
    zero_col = [r for r in rows if r.a_tilde == 0.0]
    for r in zero_col[1:]:
        assert_allclose([r.ln, r.discord], [zero_col[0].ln, zero_col[0].discord], atol=1e-8)


def test_grid_sweep_deterministic_across_workers():
    grid = SweepGrid(0.2, 2.2, 4, 0.5, 3.5, 3, GAMMA)
    assert grid_sweep(grid) == grid_sweep(grid, workers=3)


def test_sweep_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(1.0, 1.0, 3, 0, 1, 3)
    with pytest.raises(ValueError):
        SweepGrid(0.0, 1.0, 0, 0, 1, 3)


@pytest.mark.parametrize("a,t", [(0.6, 1.0), (1.3, 2.5), (2.5, 4.0), (0.9, 0.3)])
def test_reflection_symmetry(a, t):
    sp, sm = state_at(a, t, GAMMA), state_at(-a, t, GAMMA)
    assert_allclose(log_negativity(sp), log_negativity(sm), atol=1e-12)
    assert_allclose(discord(sp).discord, discord(sm).discord, atol=1e-8)


def test_discord_positive_where_entanglement_vanishes():
    a_c = find_collapse(3.0, GAMMA)
    for a in (a_c + 0.1, 1.5, 3.0):
        s = state_at(a, 3.0, GAMMA)
        assert log_negativity(s) == 0
        assert discord(s).discord > 1e-3
