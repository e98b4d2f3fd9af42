"""Structural admissibility checks gating the solver.

The checks certify that boundary transport can realize the trace: finite
variation with the inner total variation dominated by the outer one, monotone
arcs pairing across the two components with equal variation, pairwise
visibility of paired arcs through the annulus, a strict distance inequality
separating competing arc families, and a positive lower bound on the normal
component of ray directions at the inner curve (the constant behind the
density bound in the sup-norm regime).

A failing pairing, visibility or separation check blocks the solver; the
normal-clearance constant only downgrades the sup-norm density claim and is
recorded separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .boundary import (
    ArcDecomposition,
    BoundaryFunction,
    BoundaryMeasure,
    ComponentDecomposition,
    DecompositionAmbiguous,
    decompose_monotone,
    tangential_derivative,
)
from .geometry import (
    EPS_GEOM,
    Annulus,
    BoundaryArc,
    arc_min_distance,
    family_max_distance,
    family_min_distance,
)

PASS, WARN, FAIL = "pass", "warn", "fail"

_RANK = {PASS: 0, WARN: 1, FAIL: 2}


@dataclass
class ConditionResult:
    name: str
    status: str
    witnesses: List[str] = field(default_factory=list)
    data: Dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "status": self.status, "witnesses": self.witnesses, "data": self.data}


@dataclass(frozen=True)
class PairedFamily:
    """One transport family: a source arc (carrying f+) and a target arc (f-)."""

    kind: str                 # "chi" | "gamma" | "flat"
    index: int
    source_arc: BoundaryArc   # on the outer curve for chi/flat, inner for gamma
    target_arc: BoundaryArc
    tv: float

    @property
    def outer_arc(self) -> BoundaryArc:
        return self.source_arc if self.kind in ("chi", "flat") else self.target_arc

    @property
    def inner_arc(self) -> Optional[BoundaryArc]:
        if self.kind == "flat":
            return None
        return self.target_arc if self.kind == "chi" else self.source_arc


@dataclass(frozen=True)
class Pairing:
    families: Tuple[PairedFamily, ...]
    chi_shift: int
    gamma_shift: int
    consistent_shift_count: int
    lambda_plus: Tuple[BoundaryArc, ...]
    lambda_minus: Tuple[BoundaryArc, ...]
    decomposition: ArcDecomposition

    def family(self, kind: str, index: int) -> PairedFamily:
        for fam in self.families:
            if fam.kind == kind and fam.index == index:
                return fam
        raise KeyError((kind, index))


# ---------------------------------------------------------------------------
# individual conditions
# ---------------------------------------------------------------------------


def check_total_variation_inequality(g: BoundaryFunction) -> Tuple[float, float, ConditionResult]:
    """Inner total variation must not exceed the outer one."""
    tv_inner = g.inner.total_variation()
    tv_outer = g.outer.total_variation()
    eps = 1e-9 * max(tv_inner + tv_outer, 1.0)
    ok = tv_inner <= tv_outer + eps
    res = ConditionResult(
        "tv_inequality",
        PASS if ok else FAIL,
        [] if ok else [f"inner TV {tv_inner:.6g} exceeds outer TV {tv_outer:.6g}"],
        {"tv_inner": tv_inner, "tv_outer": tv_outer},
    )
    return tv_inner, tv_outer, res


def _consistent_shifts(tv_out: Sequence[float], tv_in: Sequence[float], eps: float) -> List[int]:
    n = len(tv_out)
    if n == 0:
        return [0]
    return [
        k for k in range(n)
        if all(abs(tv_out[i] - tv_in[(i + k) % n]) <= eps for i in range(n))
    ]


def pair_arcs(dec: ArcDecomposition, f: BoundaryMeasure) -> Tuple[Optional[Pairing], ConditionResult]:
    """Match monotone arcs across components by cyclic order with equal variation.

    On ambiguity every cyclic shift satisfying the variation equalities is
    recorded and the first one is used.  Monotone arcs meeting with no flat arc
    between them are a warning, not a failure.
    """
    out, inn = dec.outer, dec.inner
    witnesses: List[str] = []
    status = PASS
    eps = 1e-9 * max(f.abs_mass(), 1.0)

    n_chi_out, n_gam_out = len(out.chi), len(out.gamma)
    n_chi_in, n_gam_in = len(inn.chi), len(inn.gamma)
    if (n_chi_out, n_gam_out) != (n_chi_in, n_gam_in):
        tv_o = sum(m.tv for m in out.chi + out.gamma)
        tv_i = sum(m.tv for m in inn.chi + inn.gamma)
        witnesses.append(
            f"monotone arc counts differ: outer has {n_chi_out} increasing / {n_gam_out} decreasing, "
            f"inner has {n_chi_in} / {n_gam_in} (inner TV {tv_i:.6g} vs outer TV {tv_o:.6g})"
        )
        return None, ConditionResult("pairing", FAIL, witnesses, {
            "outer_counts": [n_chi_out, n_gam_out], "inner_counts": [n_chi_in, n_gam_in],
            "tv_outer_monotone": tv_o, "tv_inner_monotone": tv_i,
        })

    chi_shifts = _consistent_shifts([m.tv for m in out.chi], [m.tv for m in inn.chi], eps)
    gam_shifts = _consistent_shifts([m.tv for m in out.gamma], [m.tv for m in inn.gamma], eps)
    if not chi_shifts or not gam_shifts:
        if not chi_shifts:
            witnesses.append(
                "no cyclic pairing of increasing arcs matches variations: outer "
                f"{[round(m.tv, 6) for m in out.chi]} vs inner {[round(m.tv, 6) for m in inn.chi]}"
            )
        if not gam_shifts:
            witnesses.append(
                "no cyclic pairing of decreasing arcs matches variations: outer "
                f"{[round(m.tv, 6) for m in out.gamma]} vs inner {[round(m.tv, 6) for m in inn.gamma]}"
            )
        return None, ConditionResult("pairing", FAIL, witnesses, {})

    for comp in (out, inn):
        for a, b in comp.adjacent_monotone_pairs:
            status = WARN
            witnesses.append(
                f"{comp.component}: {a} arc meets {b} arc with no flat part between them"
            )
    for fl in inn.flats:
        if fl.tv > eps:
            status = FAIL
            witnesses.append(f"inner flat arc at s={fl.arc.s_start:.6g} is not constant (TV {fl.tv:.3g})")
    for fl in out.flats:
        if abs(fl.net_mass) > eps:
            status = FAIL
            witnesses.append(f"outer remainder arc at s={fl.arc.s_start:.6g} carries net mass {fl.net_mass:.3g}")
    if status == FAIL:
        return None, ConditionResult("pairing", FAIL, witnesses, {})

    n_shifts = len(chi_shifts) * len(gam_shifts)
    if n_shifts > 1:
        status = WARN
        witnesses.append(
            f"{n_shifts} cyclic pairings are variation-consistent; solving with the first "
            f"(chi shifts {chi_shifts}, gamma shifts {gam_shifts})"
        )
    k_chi, k_gam = chi_shifts[0], gam_shifts[0]

    families: List[PairedFamily] = []
    for i, m in enumerate(out.chi):
        partner = inn.chi[(i + k_chi) % max(n_chi_in, 1)]
        families.append(PairedFamily("chi", i, m.arc, partner.arc, m.tv))
    for i, m in enumerate(out.gamma):
        partner = inn.gamma[(i + k_gam) % max(n_gam_in, 1)]
        families.append(PairedFamily("gamma", i, partner.arc, m.arc, m.tv))
    for i, fl in enumerate(out.flats):
        if not fl.is_flat:
            families.append(PairedFamily("flat", i, fl.sub_plus, fl.sub_minus, fl.tv / 2))

    lam_plus = tuple(f.source_arc for f in families)
    lam_minus = tuple(f.target_arc for f in families)
    pairing = Pairing(tuple(families), k_chi, k_gam, n_shifts, lam_plus, lam_minus, dec)
    return pairing, ConditionResult("pairing", status, witnesses, {
        "families": [f"{fam.kind}[{fam.index}] tv={fam.tv:.6g}" for fam in families],
        "chi_shift": k_chi, "gamma_shift": k_gam, "consistent_pairings": n_shifts,
    })


def _sample_with_cone_normals(arc: BoundaryArc):
    """Arc sample points with the outward normals of their incident edges.

    Vertex samples carry both incident edge normals (the full normal cone);
    mid-edge samples carry the edge normal twice.
    """
    b = arc.boundary
    s = arc.sample_s()
    pts = np.atleast_2d(b.point_at(s))
    k = b.edge_index_at(s)
    n1 = b.edge_normals[k].copy()
    n2 = b.edge_normals[k].copy()
    at_vertex = np.abs(s - b.cumulative[k]) <= EPS_GEOM
    prev_edge = (k - 1) % b.n_vertices
    n2[at_vertex] = b.edge_normals[prev_edge[at_vertex]]
    return pts, n1, n2


def _visible_from_inner(outer_pts, inner_pts, n1, n2, tol):
    """Mask of (outer, inner) pairs whose segment avoids the open inner region.

    A segment from a boundary point q of a convex region to an exterior point p
    enters the region's interior exactly when p - q points into the interior
    cone at q, so visibility reduces to normal-cone sign tests at q.
    """
    ok = np.ones((len(outer_pts), len(inner_pts)), dtype=bool)
    for lo in range(0, len(outer_pts), 512):
        hi = min(lo + 512, len(outer_pts))
        d = outer_pts[lo:hi, None, :] - inner_pts[None, :, :]
        dot1 = np.einsum("pqk,qk->pq", d, n1)
        dot2 = np.einsum("pqk,qk->pq", d, n2)
        ok[lo:hi] = np.maximum(dot1, dot2) >= -tol
    return ok


def check_visibility(annulus: Annulus, pairing: Pairing, max_report=500_000) -> ConditionResult:
    """Every paired cross pair must see each other through the closed annulus.

    The normal-cone test at the inner endpoint is an exact and fast predicate
    up to angular tolerance; pairs it rejects are re-examined with the segment
    clipping test, whose tolerance measures penetration depth, so tangent-grade
    contact of the sampled polylines never counts as a crossing.
    """
    tol = annulus.contain_tol
    witnesses: List[str] = []
    total_bad = 0
    for fam in pairing.families:
        if fam.kind == "flat":
            p = fam.source_arc.sample_points(256)
            q = fam.target_arc.sample_points(256)
            P = np.repeat(p, len(q), axis=0)
            Q = np.tile(q, (len(p), 1))
            ok = annulus.segments_avoid_hole(P, Q)
            bad = np.nonzero(~ok)[0]
            if len(bad):
                total_bad += len(bad)
                i, j = divmod(int(bad[0]), len(q))
                witnesses.append(
                    f"flat[{fam.index}]: {len(bad)} blocked pairs, e.g. "
                    f"{tuple(np.round(p[i], 4))} to {tuple(np.round(q[j], 4))}"
                )
            continue
        outer_pts = fam.outer_arc.sample_points()
        inner_pts, n1, n2 = _sample_with_cone_normals(fam.inner_arc)
        ok = _visible_from_inner(outer_pts, inner_pts, n1, n2, tol)
        suspects = np.argwhere(~ok)
        n_bad = 0
        example = None
        for lo in range(0, min(len(suspects), max_report), 4096):
            batch = suspects[lo:lo + 4096]
            P = outer_pts[batch[:, 0]]
            Q = inner_pts[batch[:, 1]]
            crossing = ~annulus.segments_avoid_hole(P, Q)
            n_bad += int(crossing.sum())
            if example is None and crossing.any():
                k = int(np.argmax(crossing))
                example = (P[k], Q[k])
            if n_bad:
                # the verdict is settled; counting every crossing pair adds nothing
                break
        if n_bad:
            total_bad += n_bad
            witnesses.append(
                f"{fam.kind}[{fam.index}]: {n_bad} blocked pairs of {ok.size}, e.g. "
                f"{tuple(np.round(example[0], 4))} to {tuple(np.round(example[1], 4))}"
            )
    status = PASS if total_bad == 0 else FAIL
    return ConditionResult("visibility", status, witnesses, {"blocked_pairs": int(total_bad)})


def check_separation(pairing: Pairing) -> Tuple[List[Tuple[float, float]], ConditionResult]:
    """Strict distance inequality keeping each family's rays shorter than any swap.

    For each family, the maximal in-family distances must stay below the
    minimal distances to the competing arcs; families with no competitors pass
    vacuously.
    """
    margins: List[Tuple[float, float]] = []
    witnesses: List[str] = []
    status = PASS
    for fam in pairing.families:
        others_plus = [a for a in pairing.lambda_plus if a is not fam.source_arc]
        others_minus = [a for a in pairing.lambda_minus if a is not fam.target_arc]
        if not others_plus or not others_minus:
            margins.append((0.0, np.inf))
            continue
        lhs = family_max_distance([fam.source_arc], [fam.target_arc]) + family_max_distance(
            others_plus, others_minus
        )
        rhs = family_min_distance([fam.source_arc], others_minus) + family_min_distance(
            [fam.target_arc], others_plus
        )
        margins.append((lhs, rhs))
        if not lhs < rhs - EPS_GEOM:
            status = FAIL
            witnesses.append(
                f"{fam.kind}[{fam.index}]: swap bound {lhs:.6g} is not below "
                f"the separation bound {rhs:.6g}"
            )
    data = {"margins": [[float(l), float(r)] for l, r in margins],
            "min_margin": float(min((r - l for l, r in margins), default=np.inf))}
    return margins, ConditionResult("separation", status, witnesses, data)


def check_normal_clearance(annulus: Annulus, pairing: Pairing) -> Tuple[float, ConditionResult]:
    """Least normal advance (y - x) . nu(x) over paired arcs, x inner, y outer.

    Positive clearance is the constant behind the sup-norm transport density
    bound; it never gates the solver.
    """
    c = np.inf
    arg = None
    for fam in pairing.families:
        if fam.kind == "flat":
            continue
        y = fam.outer_arc.sample_points(1024)
        s = fam.inner_arc.sample_s(1024)
        x = np.atleast_2d(fam.inner_arc.boundary.point_at(s))
        nu = np.array([fam.inner_arc.boundary.outward_normal(si) for si in s])
        for lo in range(0, len(y), 512):
            d = y[lo:lo + 512, None, :] - x[None, :, :]
            vals = np.einsum("pqk,qk->pq", d, nu)
            k = np.unravel_index(np.argmin(vals), vals.shape)
            if vals[k] < c:
                c = float(vals[k])
                arg = (y[lo + k[0]], x[k[1]])
    if not np.isfinite(c):
        return np.inf, ConditionResult("clearance", PASS, ["no paired monotone arcs"], {"constant": None})
    ok = c > 0.0
    witnesses = []
    if arg is not None:
        witnesses.append(
            f"minimum {c:.6g} at outer {tuple(np.round(arg[0], 4))}, inner {tuple(np.round(arg[1], 4))}"
        )
    return c, ConditionResult("clearance", PASS if ok else FAIL, witnesses, {"constant": c})


def diagnostics(g: BoundaryFunction, f: BoundaryMeasure, dec: ArcDecomposition):
    """Inner monotonicity-change count and meeting points of the two inner sign supports."""
    signs = [ (1 if kind == "chi" else -1)
              for kind, _ in dec.inner.cyclic if kind in ("chi", "gamma") ]
    changes = 0
    if len(signs) > 1:
        changes = sum(1 for k in range(len(signs)) if signs[k] != signs[k - 1])
    elif len(signs) == 1:
        changes = 0
    P = g.inner.perimeter
    plus = f.inner.support_intervals(+1)
    minus = f.inner.support_intervals(-1)
    tol = 1e-9 * max(P, 1.0)

    def on_arc(s, a0, a1):
        length = np.mod(a1 - a0, P) if a1 != a0 else 0.0
        rel = np.mod(s - a0, P)
        return rel <= length + tol or rel >= P - tol

    pts_s: List[float] = []
    for a0, a1 in plus:
        for b0, b1 in minus:
            for endpoint in (a0, a1):
                if on_arc(endpoint, b0, b1):
                    pts_s.append(float(np.mod(endpoint, P)))
            for endpoint in (b0, b1):
                if on_arc(endpoint, a0, a1):
                    pts_s.append(float(np.mod(endpoint, P)))
    dedup: List[float] = []
    for s in sorted(pts_s):
        circular_dup = any(
            min(abs(s - t), P - abs(s - t)) <= 1e-6 * max(P, 1.0) for t in dedup
        )
        if not circular_dup:
            dedup.append(s)
    points = [tuple(map(float, g.inner.boundary.point_at(s))) for s in dedup]
    return changes, points


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    conditions: Dict[str, ConditionResult]
    tv_inner: float
    tv_outer: float
    separation_margins: List[Tuple[float, float]]
    clearance_constant: Optional[float]
    monotonicity_changes_inner: int
    special_points: List[Tuple[float, float]]
    overall: str
    sup_norm_regime: bool

    GATING = ("bv", "tv_inequality", "pairing", "visibility", "separation")

    def to_dict(self):
        return {
            "overall": self.overall,
            "sup_norm_density_bound": self.sup_norm_regime,
            "tv_inner": self.tv_inner,
            "tv_outer": self.tv_outer,
            "separation_margins": [[float(a), float(b)] for a, b in self.separation_margins],
            "clearance_constant": self.clearance_constant,
            "monotonicity_changes_inner": self.monotonicity_changes_inner,
            "special_points": [list(p) for p in self.special_points],
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
        }


def evaluate(annulus: Annulus, g: BoundaryFunction) -> Tuple[AdmissibilityReport, Optional[Pairing]]:
    """Run every admissibility check; no check short-circuits the others."""
    conditions: Dict[str, ConditionResult] = {}
    f = tangential_derivative(g)
    conditions["bv"] = ConditionResult(
        "bv", PASS, [], {"abs_mass": f.abs_mass()}
    )
    tv_inner, tv_outer, tv_res = check_total_variation_inequality(g)
    conditions["tv_inequality"] = tv_res

    pairing = None
    try:
        dec = decompose_monotone(g)
    except DecompositionAmbiguous as exc:
        dec = None
        conditions["pairing"] = ConditionResult("pairing", FAIL, [str(exc)], {})
    if dec is not None:
        pairing, conditions["pairing"] = pair_arcs(dec, f)

    margins: List[Tuple[float, float]] = []
    clearance = None
    if pairing is not None:
        conditions["visibility"] = check_visibility(annulus, pairing)
        margins, conditions["separation"] = check_separation(pairing)
        clearance, conditions["clearance"] = check_normal_clearance(annulus, pairing)
        if not np.isfinite(clearance):
            clearance = None

    changes, special = (0, [])
    if dec is not None:
        changes, special = diagnostics(g, f, dec)

    gating = [conditions[k].status for k in AdmissibilityReport.GATING if k in conditions]
    if FAIL in gating:
        overall = FAIL
    elif WARN in gating:
        overall = WARN
    else:
        overall = PASS
    sup_ok = bool(
        overall != FAIL
        and "clearance" in conditions
        and conditions["clearance"].status == PASS
        and all(fl.is_flat for fl in (dec.outer.flats if dec else ()))
    )
    report = AdmissibilityReport(
        conditions=conditions,
        tv_inner=tv_inner,
        tv_outer=tv_outer,
        separation_margins=margins,
        clearance_constant=clearance,
        monotonicity_changes_inner=changes,
        special_points=special,
        overall=overall,
        sup_norm_regime=sup_ok,
    )
    return report, pairing
