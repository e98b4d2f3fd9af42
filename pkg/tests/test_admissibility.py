import numpy as np
import pytest

from conftest import concentric_ramp_data, constant_data, tangent_ramp_data
from lgp.admissibility import (
    check_normal_clearance,
    check_separation,
    check_total_variation_inequality,
    check_visibility,
    diagnostics,
    evaluate,
    pair_arcs,
)
from lgp.boundary import (
    BoundaryFunction,
    clamped_linear_trace,
    constant_trace,
    decompose_monotone,
    fold_bump,
    table_trace,
    tangential_derivative,
)
from lgp.geometry import Annulus, ConvexBoundary

SQRT3 = np.sqrt(3.0)


def tv_mismatch_data(annulus):
    """Inner trace constant, outer trace y itself: no pairing can exist."""
    return BoundaryFunction(
        outer=clamped_linear_trace(annulus.outer, "y", (-2.0, 2.0), (-2.0, 2.0)),
        inner=constant_trace(annulus.inner, 0.0),
    )


@pytest.fixture(scope="module")
def thin_shell():
    outer = ConvexBoundary.circle((0.0, 0.0), 10.0, 4096, "outer")
    inner = ConvexBoundary.circle((0.0, 0.0), 9.9, 4096, "inner")
    return Annulus(outer=outer, inner=inner)


def thin_shell_crossed_data(annulus):
    """Monotone bands keyed to different axes on the two curves of a thin shell."""
    return BoundaryFunction(
        outer=clamped_linear_trace(annulus.outer, "y", (0.0, 1.0), (0.0, 1.0)),
        inner=clamped_linear_trace(annulus.inner, "x", (0.0, 1.0), (0.0, 1.0)),
    )


def angle_table(boundary, deg_values):
    """Trace linear in arclength between values prescribed at angles (degrees)."""
    p = boundary.perimeter
    pts = [(np.deg2rad(d) / (2 * np.pi) * p, v) for d, v in deg_values]
    return table_trace(boundary, pts)


# -- total variation inequality -------------------------------------------------


def test_tv_inequality_ramp(unit_two_annulus, concentric_ramp):
    tv_in, tv_out, res = check_total_variation_inequality(concentric_ramp)
    assert res.status == "pass"
    assert tv_in == pytest.approx(2.0, abs=1e-9)
    assert tv_out == pytest.approx(2.0, abs=1e-9)


def test_tv_inequality_holds_even_without_pairing(unit_two_annulus):
    g = tv_mismatch_data(unit_two_annulus)
    tv_in, tv_out, res = check_total_variation_inequality(g)
    assert res.status == "pass"
    assert tv_in == pytest.approx(0.0, abs=1e-12)
    assert tv_out == pytest.approx(8.0, abs=1e-3)


def test_tv_inequality_constant(unit_two_annulus):
    tv_in, tv_out, res = check_total_variation_inequality(constant_data(unit_two_annulus))
    assert (tv_in, tv_out, res.status) == (0.0, 0.0, "pass")


def test_tv_inequality_fails_when_inner_larger(unit_two_annulus):
    g = BoundaryFunction(
        outer=constant_trace(unit_two_annulus.outer, 0.0),
        inner=clamped_linear_trace(unit_two_annulus.inner, "y", (-1, 1), (-1, 1)),
    )
    _, _, res = check_total_variation_inequality(g)
    assert res.status == "fail"


# -- pairing ---------------------------------------------------------------------


def test_pairing_ramp(unit_two_annulus, concentric_ramp):
    dec = decompose_monotone(concentric_ramp)
    f = tangential_derivative(concentric_ramp)
    pairing, res = pair_arcs(dec, f)
    assert res.status == "pass"
    kinds = sorted((fam.kind for fam in pairing.families))
    assert kinds == ["chi", "gamma"]
    for fam in pairing.families:
        assert fam.tv == pytest.approx(1.0, abs=1e-9)
    assert pairing.consistent_shift_count == 1


def test_pairing_mismatch_witness(unit_two_annulus):
    g = tv_mismatch_data(unit_two_annulus)
    dec = decompose_monotone(g)
    pairing, res = pair_arcs(dec, tangential_derivative(g))
    assert pairing is None
    assert res.status == "fail"
    joined = " ".join(res.witnesses)
    assert "inner TV 0" in joined and "outer TV 8" in joined


def test_pairing_constant_vacuous(unit_two_annulus):
    g = constant_data(unit_two_annulus)
    pairing, res = pair_arcs(decompose_monotone(g), tangential_derivative(g))
    assert res.status == "pass"
    assert pairing.families == ()


def test_pairing_warns_on_adjacent_monotone(unit_two_annulus, tangent_ramp):
    dec = decompose_monotone(tangent_ramp)
    pairing, res = pair_arcs(dec, tangential_derivative(tangent_ramp))
    assert pairing is not None
    assert res.status == "warn"


def test_pairing_tv_mismatch_between_paired_arcs(unit_two_annulus):
    g = BoundaryFunction(
        outer=clamped_linear_trace(unit_two_annulus.outer, "y", (-1, 1), (0.0, 2.0)),
        inner=clamped_linear_trace(unit_two_annulus.inner, "y", (-0.5, 0.5), (0.0, 1.0)),
    )
    pairing, res = pair_arcs(decompose_monotone(g), tangential_derivative(g))
    assert pairing is None
    assert res.status == "fail"


# -- visibility -------------------------------------------------------------------


def test_visibility_ramp_passes(unit_two_annulus, concentric_ramp):
    _, pairing = evaluate(unit_two_annulus, concentric_ramp)[1], None
    report, pairing = evaluate(unit_two_annulus, concentric_ramp)
    assert report.conditions["visibility"].status == "pass"


def test_visibility_thin_shell_fails(thin_shell):
    g = thin_shell_crossed_data(thin_shell)
    report, pairing = evaluate(thin_shell, g)
    assert report.conditions["visibility"].status == "fail"
    assert report.overall == "fail"


def test_visibility_radial_bands(unit_two_annulus):
    g = BoundaryFunction(
        outer=angle_table(unit_two_annulus.outer, [(0, 0.0), (20, 1.0), (180, 1.0), (200, 0.0)]),
        inner=angle_table(unit_two_annulus.inner, [(0, 0.0), (20, 1.0), (180, 1.0), (200, 0.0)]),
    )
    report, pairing = evaluate(unit_two_annulus, g)
    assert report.conditions["visibility"].status == "pass"


def test_visibility_tangent_ramp_fails(unit_two_annulus, tangent_ramp):
    report, _ = evaluate(unit_two_annulus, tangent_ramp)
    assert report.conditions["visibility"].status == "fail"


# -- separation --------------------------------------------------------------------


def test_separation_ramp_values(unit_two_annulus, concentric_ramp):
    report, pairing = evaluate(unit_two_annulus, concentric_ramp)
    res = report.conditions["separation"]
    assert res.status == "pass"
    assert len(report.separation_margins) == 2
    for lhs, rhs in report.separation_margins:
        assert lhs == pytest.approx(2 * SQRT3, abs=1e-3)
        assert rhs == pytest.approx(3 * SQRT3, abs=1e-3)
        assert rhs - lhs == pytest.approx(SQRT3, abs=1e-3)


def test_separation_vacuous_for_single_folded_family(unit_two_annulus):
    g = BoundaryFunction(
        outer=angle_table(unit_two_annulus.outer, [(0, 0.0), (40, 1.0), (80, 0.0)]),
        inner=constant_trace(unit_two_annulus.inner, 0.0),
    )
    dec = decompose_monotone(g)
    folded_outer = fold_bump(dec.outer, 0, 0, g.outer)
    from lgp.boundary import ArcDecomposition

    dec2 = ArcDecomposition(outer=folded_outer, inner=dec.inner)
    pairing, res = pair_arcs(dec2, tangential_derivative(g))
    assert res.status == "pass"
    assert [fam.kind for fam in pairing.families] == ["flat"]
    margins, sep = check_separation(pairing)
    assert sep.status == "pass"
    assert margins[0][1] == np.inf
    vis = check_visibility(unit_two_annulus, pairing)
    assert vis.status == "pass"


def test_separation_fails_for_adjacent_bands(unit_two_annulus):
    g = BoundaryFunction(
        outer=angle_table(unit_two_annulus.outer, [(-30, 0.0), (30, 1.0), (40, 1.0), (100, 0.0), (110, 0.0)]),
        inner=angle_table(unit_two_annulus.inner, [(-30, 0.0), (30, 1.0), (40, 1.0), (100, 0.0), (110, 0.0)]),
    )
    report, pairing = evaluate(unit_two_annulus, g)
    assert report.conditions["separation"].status == "fail"
    assert report.overall == "fail"


# -- normal clearance ---------------------------------------------------------------


def test_clearance_radial_pair(unit_two_annulus):
    x = unit_two_annulus.inner.point_at(0.0)
    nu = unit_two_annulus.inner.outward_normal(0.0)
    y = unit_two_annulus.outer.point_at(0.0)
    assert float((y - x) @ nu) == pytest.approx(1.0, abs=1e-3)


def test_clearance_ramp_constant_near_zero(unit_two_annulus, concentric_ramp):
    report, pairing = evaluate(unit_two_annulus, concentric_ramp)
    c = report.clearance_constant
    # brute-force oracle over a 512 x 512 sample grid of the paired arcs
    fam = pairing.family("chi", 0)
    ys = fam.outer_arc.sample_points(512)
    ss = fam.inner_arc.sample_s(512)
    xs = np.atleast_2d(fam.inner_arc.boundary.point_at(ss))
    nus = np.array([fam.inner_arc.boundary.outward_normal(s) for s in ss])
    vals = np.einsum("pqk,qk->pq", ys[:, None, :] - xs[None, :, :], nus)
    assert c <= vals.min() + 1e-9
    assert abs(c) <= 2e-3
    assert report.overall in ("pass", "warn")  # clearance never gates


def test_clearance_tangent_ramp_fails(unit_two_annulus, tangent_ramp):
    report, pairing = evaluate(unit_two_annulus, tangent_ramp)
    c, res = check_normal_clearance(unit_two_annulus, pairing)
    assert res.status == "fail"
    assert c == pytest.approx(-2.0, abs=1e-2)
    assert report.sup_norm_regime is False


# -- diagnostics ---------------------------------------------------------------------


def test_diagnostics_ramp(unit_two_annulus, concentric_ramp):
    f = tangential_derivative(concentric_ramp)
    dec = decompose_monotone(concentric_ramp)
    changes, special = diagnostics(concentric_ramp, f, dec)
    assert changes == 2
    assert special == []


def test_diagnostics_tangent_ramp_special_points(unit_two_annulus, tangent_ramp):
    f = tangential_derivative(tangent_ramp)
    dec = decompose_monotone(tangent_ramp)
    changes, special = diagnostics(tangent_ramp, f, dec)
    assert changes == 2
    assert len(special) == 2
    pts = sorted(special, key=lambda p: p[1])
    assert np.allclose(pts[0], (0.0, -1.0), atol=1e-3)
    assert np.allclose(pts[1], (0.0, 1.0), atol=1e-3)


def test_diagnostics_constant(unit_two_annulus):
    g = constant_data(unit_two_annulus)
    changes, special = diagnostics(g, tangential_derivative(g), decompose_monotone(g))
    assert changes == 0
    assert special == []


# -- report invariances ----------------------------------------------------------------


def rotated_instance(annulus, g, angle, shift):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])

    def move(boundary):
        return ConvexBoundary(boundary.vertices @ R.T + shift, boundary.orientation)

    outer, inner = move(annulus.outer), move(annulus.inner)
    ann2 = Annulus(outer=outer, inner=inner)
    from lgp.boundary import ComponentFunction

    g2 = BoundaryFunction(
        outer=ComponentFunction(outer, g.outer.knots, g.outer.values, g.outer.jumps),
        inner=ComponentFunction(inner, g.inner.knots, g.inner.values, g.inner.jumps),
    )
    return ann2, g2


def scaled_instance(annulus, g, lam):
    def scale(boundary):
        return ConvexBoundary(boundary.vertices * lam, boundary.orientation)

    outer, inner = scale(annulus.outer), scale(annulus.inner)
    ann2 = Annulus(outer=outer, inner=inner)
    from lgp.boundary import ComponentFunction

    g2 = BoundaryFunction(
        outer=ComponentFunction(outer, g.outer.knots * lam, g.outer.values, g.outer.jumps),
        inner=ComponentFunction(inner, g.inner.knots * lam, g.inner.values, g.inner.jumps),
    )
    return ann2, g2


def test_separation_margins_rigid_motion_invariant(unit_two_annulus, concentric_ramp):
    base, _ = evaluate(unit_two_annulus, concentric_ramp)
    ann2, g2 = rotated_instance(unit_two_annulus, concentric_ramp, 0.7, np.array([3.0, -1.5]))
    moved, _ = evaluate(ann2, g2)
    for (l0, r0), (l1, r1) in zip(base.separation_margins, moved.separation_margins):
        assert abs((r0 - l0) - (r1 - l1)) < 1e-9
    assert moved.overall == base.overall


def test_separation_margins_scale_linearly(unit_two_annulus, concentric_ramp):
    lam = 2.5
    base, _ = evaluate(unit_two_annulus, concentric_ramp)
    ann2, g2 = scaled_instance(unit_two_annulus, concentric_ramp, lam)
    scaled, _ = evaluate(ann2, g2)
    for (l0, r0), (l1, r1) in zip(base.separation_margins, scaled.separation_margins):
        assert l1 == pytest.approx(lam * l0, rel=1e-12)
        assert r1 == pytest.approx(lam * r0, rel=1e-12)
    assert scaled.overall == base.overall


def test_failed_pairing_still_reports_tv_and_diagnostics(unit_two_annulus):
    g = tv_mismatch_data(unit_two_annulus)
    report, pairing = evaluate(unit_two_annulus, g)
    assert pairing is None
    assert report.overall == "fail"
    assert report.conditions["tv_inequality"].status == "pass"
    assert report.tv_outer == pytest.approx(8.0, abs=1e-3)
    assert isinstance(report.monotonicity_changes_inner, int)
    assert "separation" not in report.conditions  # no pairing to measure against
