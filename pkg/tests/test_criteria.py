import math
from fractions import Fraction

import numpy as np
import pytest

from torusmhd.criteria import (
    BOOTSTRAP_TAGS,
    CriterionSpec,
    MonitorStatus,
    Theorem,
    admissible,
    bootstrap_trigger,
    gronwall_rhs,
    monitor_update,
    monitored_components,
    monitored_field,
    p_label,
)
from torusmhd.field import (
    gradient,
    partial_derivative,
    synth_random_divfree,
    synth_random_field,
)
from torusmhd.norms import NormSeries, accumulate, lp_norm, wxyz

INF = math.inf


# ---------------------------------------------------------------- admissible


def test_velocity_region_boundary():
    # closed boundary 6/p + 4/r <= 1 with p > 6 strict
    assert admissible(Theorem.T1_1, 8, 16)
    assert not admissible(Theorem.T1_1, 8, 15)
    assert admissible(Theorem.T1_1, 8, 17)
    # the endpoint exponent is reachable only through the smallness clause
    assert not admissible(Theorem.T1_1, 6, INF)
    assert not admissible(Theorem.T1_1, 6, 100)
    assert admissible(Theorem.T1_1, INF, 4)
    assert not admissible(Theorem.T1_1, INF, 3)
    assert admissible(Theorem.T1_1, INF, INF)
    # exact rational arithmetic on the boundary: one part in 16000 decides
    assert admissible(Theorem.T1_1, Fraction(8), Fraction(16))
    assert not admissible(Theorem.T1_1, Fraction(8), Fraction(15999, 1000))
    # mirrored region with the magnetic component
    assert admissible(Theorem.T1_3, 8, 16)
    assert not admissible(Theorem.T1_3, 8, 15)


def test_gradient_region_branches_meet_at_four():
    # both branch bounds give r = 4 at p = 4
    assert admissible(Theorem.T1_2, 4, 4)
    assert not admissible(Theorem.T1_2, 4, Fraction(399, 100))
    # just above p = 4 the other branch formula takes over, continuously
    assert admissible(Theorem.T1_2, Fraction(41, 10), 4)
    assert not admissible(Theorem.T1_2, Fraction(39, 10), 4)
    # below the lower endpoint nothing is admissible, r notwithstanding
    assert not admissible(Theorem.T1_2, Fraction(12, 5), INF)
    assert not admissible(Theorem.T1_2, 2, INF)
    assert admissible(Theorem.T1_2, INF, 2)
    assert not admissible(Theorem.T1_2, INF, Fraction(199, 100))
    assert admissible(Theorem.T1_4, 4, 4)
    assert not admissible(Theorem.T1_4, 4, Fraction(399, 100))


def test_pressure_region_is_open():
    assert admissible(Theorem.T1_5, 2, 4)
    # the scaling line itself is excluded
    assert not admissible(Theorem.T1_5, 2, 3)
    assert admissible(Theorem.T1_5, 2, Fraction(301, 100))
    assert admissible(Theorem.T1_5, 2, INF)
    assert not admissible(Theorem.T1_5, Fraction(12, 7), 100)
    assert not admissible(Theorem.T1_5, 6, 100)
    assert admissible(Theorem.T1_5, Fraction(599, 100), INF)


def test_classical_regions_track_dimension():
    assert admissible(Theorem.CLASSICAL_U, 5, 5, dim=3)
    assert not admissible(Theorem.CLASSICAL_U, 5, 5, dim=4)
    assert admissible(Theorem.CLASSICAL_U, 8, 4, dim=4)
    assert not admissible(Theorem.CLASSICAL_U, 4, INF, dim=4)
    assert admissible(Theorem.CLASSICAL_U, INF, 2, dim=4)

    # gradient criterion: equality line with r capped at min(2, d/(d-2))
    assert admissible(Theorem.CLASSICAL_GRADU, 4, 2, dim=4)
    assert admissible(Theorem.CLASSICAL_GRADU, 6, Fraction(3, 2), dim=4)
    assert not admissible(Theorem.CLASSICAL_GRADU, 5, 2, dim=4)
    assert not admissible(Theorem.CLASSICAL_GRADU, INF, 1, dim=4)
    assert admissible(Theorem.CLASSICAL_GRADU, 2, 2, dim=2)
    assert admissible(Theorem.CLASSICAL_GRADU, 3, 2, dim=3)

    assert admissible(Theorem.CLASSICAL_GRADPI, Fraction(4, 3), INF, dim=4)
    assert not admissible(Theorem.CLASSICAL_GRADPI, Fraction(4, 3), 100, dim=4)
    assert admissible(Theorem.CLASSICAL_GRADPI, 2, 4, dim=4)
    assert not admissible(Theorem.CLASSICAL_GRADPI, Fraction(13, 10), INF, dim=4)


def test_admissible_rejects_exponents_below_one():
    with pytest.raises(ValueError):
        admissible(Theorem.T1_1, 0.5, 4)
    with pytest.raises(ValueError):
        admissible(Theorem.T1_1, 8, 0)
    with pytest.raises(ValueError):
        admissible(Theorem.T1_5, -1, 4)


def test_p_label():
    assert p_label(6) == "6"
    assert p_label(2.5) == "2.5"
    assert p_label(INF) == "inf"
    assert p_label(Fraction(12, 5)) == "2.4"


# ------------------------------------------------------------- CriterionSpec


def test_spec_smallness_fills_endpoint_pairs():
    spec = CriterionSpec(Theorem.T1_1, smallness=True)
    assert spec.pairs == (("u3", (6.0, INF)), ("u4", (6.0, INF)))
    spec2 = CriterionSpec(Theorem.T1_2, smallness=True)
    assert spec2.pairs == (("grad_u3", (2.4, INF)), ("grad_u4", (2.4, INF)))
    with pytest.raises(ValueError):
        CriterionSpec(Theorem.T1_5, smallness=True)
    with pytest.raises(ValueError):
        CriterionSpec(Theorem.CLASSICAL_U, smallness=True)


def test_spec_requires_exactly_the_monitored_components():
    with pytest.raises(ValueError):
        CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)),))
    with pytest.raises(ValueError):
        CriterionSpec(
            Theorem.T1_1,
            pairs=(("u3", (8, 16)), ("u4", (8, 16)), ("b", (8, 16))),
        )
    with pytest.raises(ValueError, match="admissible region"):
        CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 15)), ("u4", (8, 16))))


def test_spec_labels_and_keys():
    spec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    assert spec.label == "T1_1"
    assert spec.norm_tag("u3") == "L8_u3"
    assert spec.accumulator_key("u4") == "acc_T1_1_u4"
    assert not spec.needs_pressure
    pspec = CriterionSpec(Theorem.T1_5, pairs=(("dpi3", (2, 4)), ("dpi4", (2, 4))))
    assert pspec.norm_tag("dpi3") == "L2_dpi3"
    assert pspec.needs_pressure
    assert monitored_components(Theorem.T1_3) == ("u3", "u4", "b")


# ----------------------------------------------------------- monitored_field


def test_monitored_field_resolution(grid4, rng):
    u = synth_random_divfree(grid4, 4, seed=3)
    b = synth_random_divfree(grid4, 4, seed=4)
    pi = synth_random_field(grid4, 1, seed=5)

    assert np.array_equal(monitored_field("u", u, b).coeffs, u.coeffs)
    assert np.array_equal(
        monitored_field("u3", u, b).coeffs, u.component(2).coeffs
    )
    assert np.array_equal(
        monitored_field("u4", u, b).coeffs, u.component(3).coeffs
    )
    assert np.array_equal(
        monitored_field("u3", u, b, free_axes=(0, 1)).coeffs,
        u.component(0).coeffs,
    )
    assert np.array_equal(monitored_field("b", u, b).coeffs, b.coeffs)
    assert np.array_equal(
        monitored_field("grad_u3", u, b).coeffs,
        gradient(u.component(2)).coeffs,
    )
    assert np.array_equal(
        monitored_field("grad_b", u, b).coeffs, gradient(b).coeffs
    )
    assert np.array_equal(
        monitored_field("dpi3", u, b, pi).coeffs,
        partial_derivative(pi, 2).coeffs,
    )
    assert np.array_equal(
        monitored_field("dpi4", u, b, pi).coeffs,
        partial_derivative(pi, 3).coeffs,
    )
    assert np.array_equal(
        monitored_field("grad_pi", u, b, pi).coeffs, gradient(pi).coeffs
    )


def test_monitored_field_errors(grid4):
    u = synth_random_divfree(grid4, 4, seed=3)
    with pytest.raises(ValueError, match="'b'"):
        monitored_field("b", u, None)
    with pytest.raises(ValueError, match="pressure"):
        monitored_field("dpi3", u, None, None)
    with pytest.raises(ValueError, match="unknown"):
        monitored_field("vorticity", u, None)


# ------------------------------------------------------------------ monitor


def two_row_series(tags, rows):
    series = NormSeries()
    times = [0.0, 0.1]
    for t, row in zip(times, rows):
        series.record(t, dict(zip(tags, row)))
    return series


def test_monitor_status_seeding():
    spec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    status = MonitorStatus.for_spec(spec)
    assert status.accumulators == {"u3": 0.0, "u4": 0.0}
    assert status.sup_values == {"u3": -INF, "u4": -INF}
    assert status.verdict == "tracking"
    assert status.finite


def test_monitor_update_trapezoid_and_sup():
    spec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    status = MonitorStatus.for_spec(spec)
    series = NormSeries()
    series.record(0.0, {"L8_u3": 2.0, "L8_u4": 3.0})
    monitor_update(status, series, 0.0)
    assert status.accumulators == {"u3": 0.0, "u4": 0.0}
    assert status.sup_values == {"u3": 2.0, "u4": 3.0}
    series.record(0.1, {"L8_u3": 1.0, "L8_u4": 4.0})
    monitor_update(status, series, 0.1)
    want_u3 = 0.1 * (2.0**16 + 1.0**16) / 2
    want_u4 = 0.1 * (3.0**16 + 4.0**16) / 2
    assert status.accumulators["u3"] == pytest.approx(want_u3, rel=1e-15)
    assert status.accumulators["u4"] == pytest.approx(want_u4, rel=1e-15)
    assert status.sup_values == {"u3": 2.0, "u4": 4.0}
    assert status.finite


def test_monitor_update_smallness_tracks_sup_only():
    spec = CriterionSpec(Theorem.T1_1, smallness=True)
    status = MonitorStatus.for_spec(spec)
    series = NormSeries()
    series.record(0.0, {"L6_u3": 2.0, "L6_u4": 5.0})
    monitor_update(status, series, 0.0)
    series.record(0.1, {"L6_u3": 3.0, "L6_u4": 1.0})
    monitor_update(status, series, 0.1)
    # r = inf accumulators carry the running sup, not an integral
    assert status.accumulators == {"u3": 3.0, "u4": 5.0}


def test_monitor_update_missing_tag_names_it():
    spec = CriterionSpec(
        Theorem.T1_3,
        pairs=(("u3", (8, 16)), ("u4", (8, 16)), ("b", (8, 16))),
    )
    status = MonitorStatus.for_spec(spec)
    series = two_row_series(["L8_u3", "L8_u4"], [(1.0, 1.0), (1.0, 1.0)])
    with pytest.raises(ValueError, match="L8_b"):
        monitor_update(status, series, 0.1)


def test_monitor_detects_divergent_accumulator():
    spec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    status = MonitorStatus.for_spec(spec)
    series = two_row_series(["L8_u3", "L8_u4"], [(1.0, 1.0), (INF, 1.0)])
    monitor_update(status, series, 0.0)
    monitor_update(status, series, 0.1)
    assert not status.finite


def test_bootstrap_trigger_sums_gradient_accumulators():
    series = NormSeries()
    series.record(0.0, {"gradu_LN": 2.0, "gradb_LN": 1.0})
    series.record(0.5, {"gradu_LN": 4.0, "gradb_LN": 3.0})
    for tag in BOOTSTRAP_TAGS:
        accumulate(series, tag, 2, 0.5, key=f"acc_bootstrap_{tag}")
    # trapezoid of the squares: (4+16)/2*0.5 + (1+9)/2*0.5
    assert bootstrap_trigger(series) == pytest.approx(5.0 + 2.5, rel=1e-15)

    bare = NormSeries()
    bare.record(0.0, {"gradu_LN": 1.0})
    with pytest.raises(ValueError, match="gradb_LN"):
        bootstrap_trigger(bare)


# ------------------------------------------------------------- gronwall_rhs


def test_gronwall_rhs_velocity_family(grid4):
    u = synth_random_divfree(grid4, 4, seed=11)
    b = synth_random_divfree(grid4, 4, seed=12)
    spec = CriterionSpec(Theorem.T1_3, pairs=(
        ("u3", (8, 16)), ("u4", (8, 16)), ("b", (8, 16)),
    ))
    out = gronwall_rhs(u, b, spec)
    vals = wxyz(u, b, plane=(0, 1))
    assert out["W"] == vals.W and out["X"] == vals.X
    assert out["Y"] == vals.Y and out["Z"] == vals.Z
    # exponents at p = 8: norm 2p/(p-2), X (p-4)/(p-2), Z 2/(p-2)
    for comp in ("u3", "u4", "b"):
        n = lp_norm(monitored_field(comp, u, b), 8)
        want = n ** (16 / 6) * vals.X ** (4 / 6) * vals.Z ** (2 / 6)
        assert out[f"rhs_T1_3_{comp}"] == pytest.approx(want, rel=1e-12)


def test_gronwall_rhs_velocity_endpoint(grid4):
    u = synth_random_divfree(grid4, 4, seed=13)
    spec = CriterionSpec(Theorem.T1_1, smallness=True)
    out = gronwall_rhs(u, None, spec)
    vals = wxyz(u, plane=(0, 1))
    n3 = lp_norm(u.component(2), 6.0)
    # the pinned endpoint keeps its finite-p exponents (3, 1/2, 1/2)
    want = n3**3 * math.sqrt(vals.X * vals.Z)
    assert out["rhs_T1_1_u3"] == pytest.approx(want, rel=1e-12)


def test_gronwall_rhs_gradient_family(grid4):
    u = synth_random_divfree(grid4, 4, seed=14)
    vals = wxyz(u, plane=(0, 1))

    spec4 = CriterionSpec(Theorem.T1_2, pairs=(
        ("grad_u3", (4, 4)), ("grad_u4", (4, 4)),
    ))
    out4 = gronwall_rhs(u, None, spec4)
    n = lp_norm(gradient(u.component(2)), 4)
    # p = 4 sits on the branch seam: exponents (2, 1, 0) from either side
    assert out4["rhs_T1_2_grad_u3"] == pytest.approx(n**2 * vals.X, rel=1e-12)

    spec3 = CriterionSpec(Theorem.T1_2, pairs=(
        ("grad_u3", (3, 12)), ("grad_u4", (3, 12)),
    ))
    out3 = gronwall_rhs(u, None, spec3)
    n = lp_norm(gradient(u.component(2)), 3)
    want = n ** (12 / 5) * vals.X ** (4 / 5) * vals.Z ** (1 / 5)
    assert out3["rhs_T1_2_grad_u3"] == pytest.approx(want, rel=1e-12)

    spec6 = CriterionSpec(Theorem.T1_2, pairs=(
        ("grad_u3", (6, 3)), ("grad_u4", (6, 3)),
    ))
    out6 = gronwall_rhs(u, None, spec6)
    n = lp_norm(gradient(u.component(2)), 6)
    assert out6["rhs_T1_2_grad_u3"] == pytest.approx(n**1.5 * vals.X, rel=1e-12)


def test_gronwall_rhs_respects_free_axes(grid4):
    u = synth_random_divfree(grid4, 4, seed=15)
    spec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    out = gronwall_rhs(u, None, spec, free_axes=(0, 1))
    vals = wxyz(u, plane=(2, 3))
    n = lp_norm(u.component(0), 8)
    want = n ** (16 / 6) * vals.X ** (4 / 6) * vals.Z ** (2 / 6)
    assert out["rhs_T1_1_u3"] == pytest.approx(want, rel=1e-12)


def test_gronwall_rhs_rejections(grid2, grid4):
    u4 = synth_random_divfree(grid4, 4, seed=16)
    pspec = CriterionSpec(Theorem.T1_5, pairs=(("dpi3", (2, 4)), ("dpi4", (2, 4))))
    with pytest.raises(ValueError, match="Gronwall"):
        gronwall_rhs(u4, None, pspec)
    cspec = CriterionSpec(Theorem.CLASSICAL_U, pairs=(("u", (8, 4)),))
    with pytest.raises(ValueError, match="Gronwall"):
        gronwall_rhs(u4, None, cspec)
    u2 = synth_random_divfree(grid2, 2, seed=17)
    vspec = CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16))))
    with pytest.raises(ValueError, match="dim-4"):
        gronwall_rhs(u2, None, vspec, free_axes=(0, 1))
