"""Boundary traces of bounded variation and their tangential derivatives.

A trace g on the two boundary components is stored per component as a
piecewise-linear function of arclength plus jump atoms; this class is closed
under every operation used here and has exact total variation.  Differentiating
along the boundary yields a signed measure f (densities from slopes, atoms from
jumps) whose positive and negative parts are the transport marginals.

Orientation convention: both curves are parameterized counterclockwise, but the
boundary of the annulus runs the inner curve clockwise, so on the inner
component the measure is the derivative along the clockwise direction (the
negated counterclockwise slope).  Monotone arcs are always classified in the
counterclockwise sense of each standalone curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import EPS_GEOM, Annulus, BoundaryArc, ConvexBoundary

EPS_SLOPE = 1e-12

COMPONENTS = ("outer", "inner")


class DataError(ValueError):
    pass


class DecompositionAmbiguous(DataError):
    pass


class MassMismatch(DataError):
    pass


class MissingAnchor(DataError):
    pass


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentFunction:
    """Piecewise-linear periodic function of arclength with jump atoms.

    ``values[i]`` is the right limit at ``knots[i]``; a nonzero ``jumps[i]``
    means the left limit at that knot is ``values[i] - jumps[i]``.  Between
    consecutive knots the function is affine from ``values[i]`` to the left
    limit at the next knot.  The additive ``offset`` is kept separate so that
    shifting a trace by a constant never perturbs derivative data.
    """

    boundary: ConvexBoundary
    knots: np.ndarray
    values: np.ndarray
    jumps: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        s = np.mod(np.asarray(self.knots, dtype=float), self.boundary.perimeter)
        order = np.argsort(s, kind="stable")
        s = s[order]
        v = np.asarray(self.values, dtype=float)[order]
        j = np.asarray(self.jumps, dtype=float)[order]
        if len(s) == 0:
            s, v, j = np.array([0.0]), np.array([0.0]), np.array([0.0])
        keep = np.concatenate([[True], np.diff(s) > 0])
        if not keep.all():
            # merge coincident knots: keep the last value, sum the jumps
            uniq = np.nonzero(keep)[0]
            groups = np.searchsorted(s[uniq], s, side="right") - 1
            jj = np.zeros(len(uniq))
            np.add.at(jj, groups, j)
            vv = np.zeros(len(uniq))
            vv[groups] = v
            s, v, j = s[uniq], vv, jj
        object.__setattr__(self, "knots", s)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "jumps", j)

    @property
    def perimeter(self):
        return self.boundary.perimeter

    def _interval_data(self):
        """Per-interval (s0, s1, v0, v1) with s1 possibly past the perimeter wrap."""
        s0 = self.knots
        s1 = np.concatenate([self.knots[1:], [self.knots[0] + self.perimeter]])
        v0 = self.values
        v1 = np.concatenate([self.values[1:] - self.jumps[1:], [self.values[0] - self.jumps[0]]])
        return s0, s1, v0, v1

    def slopes(self):
        s0, s1, v0, v1 = self._interval_data()
        return (v1 - v0) / (s1 - s0)

    def value(self, s, midpoint_at_jumps=False):
        """Evaluate the trace; at a jump knot returns the right limit by default."""
        P = self.perimeter
        sq = np.mod(np.asarray(s, dtype=float), P)
        scalar = sq.ndim == 0
        sq = np.atleast_1d(sq)
        idx = np.searchsorted(self.knots, sq, side="right") - 1
        wrapped = idx < 0
        idx = np.where(wrapped, len(self.knots) - 1, idx)
        s0, s1, v0, v1 = self._interval_data()
        rel = np.where(wrapped, sq + P - s0[idx], sq - s0[idx])
        t = rel / (s1[idx] - s0[idx])
        out = v0[idx] * (1 - t) + v1[idx] * t
        if midpoint_at_jumps:
            at_knot = np.abs(rel) <= EPS_GEOM
            out = np.where(at_knot, v0[idx] - 0.5 * self.jumps[idx], out)
        out = out + self.offset
        return float(out[0]) if scalar else out

    def total_variation(self, arc: Optional[BoundaryArc] = None) -> float:
        s0, s1, v0, v1 = self._interval_data()
        if arc is None:
            return float(np.sum(np.abs(v1 - v0)) + np.sum(np.abs(self.jumps)))
        if arc.is_point:
            rel = np.mod(self.knots - arc.s_start, self.perimeter)
            k = np.nonzero(np.minimum(rel, self.perimeter - rel) <= EPS_GEOM)[0]
            return float(np.abs(self.jumps[k]).sum())
        slope = (v1 - v0) / (s1 - s0)
        overlap = _overlap_lengths(s0, s1, arc.s_start, arc.length, self.perimeter)
        tv = float(np.sum(np.abs(slope) * overlap))
        rel = np.mod(self.knots - arc.s_start, self.perimeter)
        interior = (rel > EPS_GEOM) & (rel <= arc.length + EPS_GEOM)
        tv += float(np.abs(self.jumps[interior]).sum())
        return tv

    def with_offset(self, c: float) -> "ComponentFunction":
        return replace(self, offset=self.offset + c)


def _overlap_lengths(s0, s1, a, length, period):
    """Lengths of the overlaps of intervals [s0, s1] with the arc [a, a+length] mod period."""
    rel0 = np.mod(s0 - a, period)
    out = np.zeros_like(s0)
    # each interval [rel0, rel0 + (s1-s0)] may wrap at most once relative to the arc
    width = s1 - s0
    for shift in (0.0, -period):
        lo = rel0 + shift
        hi = lo + width
        out += np.maximum(0.0, np.minimum(hi, length) - np.maximum(lo, 0.0))
    return out


@dataclass(frozen=True)
class BoundaryFunction:
    """Trace g on both boundary components."""

    outer: ComponentFunction
    inner: ComponentFunction

    def component(self, name: str) -> ComponentFunction:
        return getattr(self, name)

    def shifted(self, c: float) -> "BoundaryFunction":
        return BoundaryFunction(outer=self.outer.with_offset(c), inner=self.inner.with_offset(c))

    def total_variation(self, component: str, arc: Optional[BoundaryArc] = None) -> float:
        return self.component(component).total_variation(arc)


def total_variation(g: BoundaryFunction, arc: BoundaryArc) -> float:
    """Total variation of g restricted to an arc (slope integrals plus interior jumps)."""
    for name in COMPONENTS:
        if g.component(name).boundary is arc.boundary:
            return g.component(name).total_variation(arc)
    raise DataError("arc does not lie on either component of g")


# -- constructors of traces --------------------------------------------------


def constant_trace(boundary: ConvexBoundary, value: float) -> ComponentFunction:
    return ComponentFunction(boundary, np.array([0.0]), np.array([float(value)]), np.array([0.0]))


def _axis_crossings(boundary: ConvexBoundary, axis: int, levels: Sequence[float]) -> List[float]:
    pts = boundary.vertices[:, axis]
    nxt = np.roll(pts, -1)
    cum = boundary.cumulative
    out = []
    for c in levels:
        lo = np.minimum(pts, nxt)
        hi = np.maximum(pts, nxt)
        hit = np.nonzero((lo < c) & (c < hi))[0]
        for k in hit:
            t = (c - pts[k]) / (nxt[k] - pts[k])
            out.append(float(cum[k] + t * (cum[k + 1] - cum[k])))
    return out


def clamped_linear_trace(boundary: ConvexBoundary, axis: str, coord_range, value_range) -> ComponentFunction:
    """g(p) affine in one coordinate, clamped outside ``coord_range``.

    Exact in the piecewise-linear class: knots sit at every polyline vertex plus
    the points where the coordinate crosses the clamp bounds.
    """
    ax = {"x": 0, "y": 1}[axis]
    c0, c1 = float(coord_range[0]), float(coord_range[1])
    v0, v1 = float(value_range[0]), float(value_range[1])
    if not c1 > c0:
        raise DataError("coordinate range must be increasing")
    knots = list(boundary.cumulative[:-1]) + _axis_crossings(boundary, ax, [c0, c1])
    knots = np.unique(np.mod(np.asarray(knots, dtype=float), boundary.perimeter))
    pts = np.atleast_2d(boundary.point_at(knots))
    frac = np.clip((pts[:, ax] - c0) / (c1 - c0), 0.0, 1.0)
    values = v0 + (v1 - v0) * frac
    return ComponentFunction(boundary, knots, values, np.zeros_like(values))


def table_trace(boundary: ConvexBoundary, breakpoints, jump_table=None) -> ComponentFunction:
    """Trace from an explicit (arclength, value) table with an optional jump table."""
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 2 or bp.shape[1] != 2 or len(bp) == 0:
        raise DataError("breakpoints must be a nonempty (K, 2) table of (s, value)")
    knots = list(bp[:, 0])
    values = list(bp[:, 1])
    jumps = [0.0] * len(knots)
    if jump_table is not None:
        for s, j in np.asarray(jump_table, dtype=float).reshape(-1, 2):
            s = float(np.mod(s, boundary.perimeter))
            hit = [k for k, sk in enumerate(knots) if abs(np.mod(sk - s, boundary.perimeter)) <= EPS_GEOM]
            if hit:
                jumps[hit[0]] += float(j)
            else:
                # insert a knot at the jump carrying the post-jump value
                base = ComponentFunction(boundary, np.array(knots), np.array(values), np.array(jumps))
                knots.append(s)
                values.append(base.value(s) + float(j))
                jumps.append(float(j))
    return ComponentFunction(boundary, np.array(knots), np.array(values), np.array(jumps))


# ---------------------------------------------------------------------------
# boundary measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentMeasure:
    """Signed measure on one component: piecewise-constant densities plus atoms.

    Pieces are (s0, s1, density-per-unit-length) with 0 <= s0 < s1 <= perimeter.
    """

    boundary: ConvexBoundary
    pieces: np.ndarray  # (K, 3)
    atoms: np.ndarray   # (A, 2): (s, signed mass)

    @classmethod
    def empty(cls, boundary):
        return cls(boundary, np.zeros((0, 3)), np.zeros((0, 2)))

    def piece_masses(self):
        if len(self.pieces) == 0:
            return np.zeros(0)
        return self.pieces[:, 2] * (self.pieces[:, 1] - self.pieces[:, 0])

    def mass(self) -> float:
        return float(self.piece_masses().sum() + (self.atoms[:, 1].sum() if len(self.atoms) else 0.0))

    def abs_mass(self) -> float:
        return float(np.abs(self.piece_masses()).sum() + (np.abs(self.atoms[:, 1]).sum() if len(self.atoms) else 0.0))

    def density_sup(self) -> float:
        return float(np.abs(self.pieces[:, 2]).max()) if len(self.pieces) else 0.0

    def restrict_mass(self, arc: BoundaryArc) -> Tuple[float, float]:
        """(net mass, absolute mass) of the measure restricted to the arc."""
        P = self.boundary.perimeter
        net = tot = 0.0
        if len(self.pieces):
            ov = _overlap_lengths(self.pieces[:, 0], self.pieces[:, 1], arc.s_start, arc.length, P)
            net += float(np.sum(self.pieces[:, 2] * ov))
            tot += float(np.sum(np.abs(self.pieces[:, 2]) * ov))
        for s, m in self.atoms:
            rel = np.mod(s - arc.s_start, P)
            if arc.is_point:
                inside = min(rel, P - rel) <= EPS_GEOM
            else:
                inside = EPS_GEOM < rel <= arc.length + EPS_GEOM
            if inside:
                net += m
                tot += abs(m)
        return net, tot

    def signed_part(self, sign: int) -> "ComponentMeasure":
        pieces = self.pieces[sign * self.pieces[:, 2] > 0] if len(self.pieces) else self.pieces
        atoms = self.atoms[sign * self.atoms[:, 1] > 0] if len(self.atoms) else self.atoms
        if len(pieces):
            pieces = np.column_stack([pieces[:, :2], np.abs(pieces[:, 2])])
        if len(atoms):
            atoms = np.column_stack([atoms[:, 0], np.abs(atoms[:, 1])])
        return ComponentMeasure(self.boundary, pieces, atoms)

    def support_intervals(self, sign: int):
        """Closed arclength intervals (s0, s1) carrying the given sign (atoms as points)."""
        out = []
        for s0, s1, rho in self.pieces:
            if sign * rho > 0:
                out.append((float(s0), float(s1)))
        for s, m in self.atoms:
            if sign * m > 0:
                out.append((float(s), float(s)))
        return out


@dataclass(frozen=True)
class BoundaryMeasure:
    outer: ComponentMeasure
    inner: ComponentMeasure

    def component(self, name: str) -> ComponentMeasure:
        return getattr(self, name)

    def abs_mass(self) -> float:
        return self.outer.abs_mass() + self.inner.abs_mass()

    def mass_tolerance(self) -> float:
        return 1e-9 * max(self.abs_mass(), 1e-300)

    def is_zero(self) -> bool:
        return self.abs_mass() == 0.0

    def density_sup(self) -> float:
        return max(self.outer.density_sup(), self.inner.density_sup())


def _component_derivative(fn: ComponentFunction, flip: bool) -> ComponentMeasure:
    s0, s1, v0, v1 = fn._interval_data()
    sign = -1.0 if flip else 1.0
    P = fn.perimeter
    pieces = []
    for a, b, va, vb in zip(s0, s1, v0, v1):
        rho = sign * (vb - va) / (b - a)
        if b <= P + EPS_GEOM:
            pieces.append((a, min(b, P), rho))
        else:  # wrapping interval: split at the seam
            pieces.append((a, P, rho))
            pieces.append((0.0, b - P, rho))
    pieces = np.array([p for p in pieces if p[1] - p[0] > 0], dtype=float).reshape(-1, 3)
    nz = np.abs(fn.jumps) > 0
    atoms = np.column_stack([fn.knots[nz], sign * fn.jumps[nz]]) if nz.any() else np.zeros((0, 2))
    meas = ComponentMeasure(fn.boundary, pieces, atoms)
    balance = abs(meas.mass())
    if balance > 1e-12 * max(1.0, meas.abs_mass()):
        raise DataError(f"derivative mass balance violated: residual {balance:.3e}")
    return meas


def tangential_derivative(g: BoundaryFunction) -> BoundaryMeasure:
    """Derivative of the trace along the boundary of the annulus.

    The outer component is differentiated counterclockwise; the inner component
    clockwise, because that is its orientation as part of the annulus boundary.
    """
    return BoundaryMeasure(
        outer=_component_derivative(g.outer, flip=False),
        inner=_component_derivative(g.inner, flip=True),
    )


# ---------------------------------------------------------------------------
# monotone decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneArc:
    arc: BoundaryArc
    sign: int            # +1 increasing, -1 decreasing (counterclockwise sense)
    tv: float

    @property
    def kind(self) -> str:
        return "chi" if self.sign > 0 else "gamma"


@dataclass(frozen=True)
class FlatArc:
    arc: BoundaryArc
    value: float          # trace value on the arc (mid value if not exactly flat)
    tv: float
    net_mass: float
    is_flat: bool = True
    sub_plus: Optional[BoundaryArc] = None   # increasing part of a non-flat arc
    sub_minus: Optional[BoundaryArc] = None  # decreasing part


@dataclass(frozen=True)
class ComponentDecomposition:
    component: str
    chi: Tuple[MonotoneArc, ...]
    gamma: Tuple[MonotoneArc, ...]
    flats: Tuple[FlatArc, ...]
    cyclic: Tuple[Tuple[str, int], ...]   # ("chi"|"gamma"|"flat", index) in ccw order
    adjacent_monotone_pairs: Tuple[Tuple[str, str], ...]  # empty-flat warnings

    @property
    def monotone_count(self):
        return len(self.chi), len(self.gamma)


@dataclass(frozen=True)
class ArcDecomposition:
    """Monotone/flat decomposition of both components of the trace."""

    outer: ComponentDecomposition
    inner: ComponentDecomposition

    def component(self, name: str) -> ComponentDecomposition:
        return getattr(self, name)


def _decompose_component(fn: ComponentFunction, name: str) -> ComponentDecomposition:
    P = fn.perimeter
    s0, s1, v0, v1 = fn._interval_data()
    elements = []  # (s_lo, s_hi, sign, tv, value_for_flat)
    for i in range(len(fn.knots)):
        j = fn.jumps[i]
        if abs(j) > 0:
            elements.append((fn.knots[i], fn.knots[i], 1 if j > 0 else -1, abs(j), None))
        slope = (v1[i] - v0[i]) / (s1[i] - s0[i])
        sign = 0 if abs(slope) <= EPS_SLOPE else (1 if slope > 0 else -1)
        elements.append((s0[i], s1[i], sign, abs(v1[i] - v0[i]), 0.5 * (v0[i] + v1[i])))
    signs = [e[2] for e in elements]
    n = len(elements)
    if all(sg == 0 for sg in signs):
        flat = FlatArc(BoundaryArc.full(fn.boundary), float(fn.value(fn.knots[0])) ,
                       sum(e[3] for e in elements), 0.0)
        return ComponentDecomposition(name, (), (), (flat,), (("flat", 0),), ())
    # rotate so that element 0 starts a run (its predecessor has a different sign)
    start = next(k for k in range(n) if signs[k] != signs[k - 1])
    order = [(start + k) % n for k in range(n)]
    runs = []  # (sign, [element indices])
    for k in order:
        if runs and signs[k] == runs[-1][0]:
            runs[-1][1].append(k)
        else:
            runs.append((signs[k], [k]))
    chi: List[MonotoneArc] = []
    gamma: List[MonotoneArc] = []
    flats: List[FlatArc] = []
    cyclic: List[Tuple[str, int]] = []
    warnings: List[Tuple[str, str]] = []
    for sign, idxs in runs:
        lo = elements[idxs[0]][0]
        hi = elements[idxs[-1]][1]
        if hi >= lo:
            length = min(float(hi - lo), P)
        else:
            length = float(np.mod(hi - lo, P))
        arc = BoundaryArc(fn.boundary, lo, length)
        tv = float(sum(elements[k][3] for k in idxs))
        if sign == 0:
            vals = [elements[k][4] for k in idxs if elements[k][4] is not None]
            net = float(sum(elements[k][3] * elements[k][2] for k in idxs))  # ~0 by construction
            flats.append(FlatArc(arc, float(np.median(vals)) + fn.offset, tv, net))
            cyclic.append(("flat", len(flats) - 1))
        elif sign > 0:
            chi.append(MonotoneArc(arc, 1, tv))
            cyclic.append(("chi", len(chi) - 1))
        else:
            gamma.append(MonotoneArc(arc, -1, tv))
            cyclic.append(("gamma", len(gamma) - 1))
    for k in range(len(cyclic)):
        a, b = cyclic[k], cyclic[(k + 1) % len(cyclic)]
        if a[0] != "flat" and b[0] != "flat":
            warnings.append((a[0], b[0]))
    return ComponentDecomposition(name, tuple(chi), tuple(gamma), tuple(flats), tuple(cyclic), tuple(warnings))


def decompose_monotone(g: BoundaryFunction) -> ArcDecomposition:
    """Split each component into maximal strictly monotone arcs and flat remainders.

    Flat remainders carry zero net derivative mass by construction; adjacent
    monotone arcs with no flat part between them are recorded as warnings
    rather than failures.
    """
    dec = ArcDecomposition(
        outer=_decompose_component(g.outer, "outer"),
        inner=_decompose_component(g.inner, "inner"),
    )
    scale = max(1.0, g.outer.total_variation() + g.inner.total_variation())
    for comp in (dec.outer, dec.inner):
        for fl in comp.flats:
            if abs(fl.net_mass) > 1e-9 * scale:
                raise DecompositionAmbiguous(
                    f"flat grouping on {comp.component} at s={fl.arc.s_start:.6g} "
                    f"carries net mass {fl.net_mass:.3e}"
                )
    return dec


def fold_bump(dec: ComponentDecomposition, chi_idx: int, gamma_idx: int, g: ComponentFunction) -> ComponentDecomposition:
    """Reinterpret an adjacent increasing/decreasing pair of equal variation as a
    single zero-net-mass arc with recorded monotone sub-arcs.

    This is never done automatically: a mismatched count of monotone arcs is a
    pairing failure, not a licence to hide variation in the remainder arcs.
    """
    up = dec.chi[chi_idx]
    down = dec.gamma[gamma_idx]
    if abs(up.tv - down.tv) > 1e-9 * max(1.0, up.tv):
        raise DecompositionAmbiguous("sub-arcs must carry equal variation")
    P = up.arc.boundary.perimeter
    if abs(np.mod(down.arc.s_start - up.arc.s_end, P)) > EPS_GEOM:
        raise DecompositionAmbiguous("sub-arcs must be adjacent (increasing then decreasing)")
    merged = BoundaryArc(up.arc.boundary, up.arc.s_start, up.arc.length + down.arc.length)
    folded = FlatArc(
        merged,
        float(g.value(up.arc.s_end)),
        up.tv + down.tv,
        0.0,
        is_flat=False,
        sub_plus=up.arc,
        sub_minus=down.arc,
    )
    chi = tuple(c for k, c in enumerate(dec.chi) if k != chi_idx)
    gamma = tuple(c for k, c in enumerate(dec.gamma) if k != gamma_idx)
    flats = dec.flats + (folded,)
    cyclic = []
    for kind, idx in dec.cyclic:
        if (kind, idx) == ("chi", chi_idx):
            cyclic.append(("flat", len(flats) - 1))
        elif (kind, idx) == ("gamma", gamma_idx):
            continue
        else:
            shift = 0
            if kind == "chi" and idx > chi_idx:
                shift = 1
            if kind == "gamma" and idx > gamma_idx:
                shift = 1
            cyclic.append((kind, idx - shift))
    warnings = tuple(
        (a[0], b[0])
        for a, b in zip(cyclic, cyclic[1:] + cyclic[:1])
        if a[0] != "flat" and b[0] != "flat"
    )
    return replace(dec, chi=chi, gamma=gamma, flats=flats, cyclic=tuple(cyclic),
                   adjacent_monotone_pairs=warnings)


# ---------------------------------------------------------------------------
# anchored trace
# ---------------------------------------------------------------------------


def _component_antiderivative(meas: ComponentMeasure, boundary: ConvexBoundary, flip: bool) -> ComponentFunction:
    """Cumulative integral of the measure, as a trace on the component.

    Measure pieces are assumed non-overlapping (the form produced by
    differentiation); knots are placed at every piece boundary and atom.
    """
    sign = -1.0 if flip else 1.0
    P = boundary.perimeter
    ks = [0.0]
    for a, b, _ in meas.pieces:
        ks.append(float(a) % P)
        ks.append(b if b <= P else float(b) % P)
    for s, _ in meas.atoms:
        ks.append(float(s) % P)
    ks = np.unique(np.clip(np.asarray(ks), 0.0, P))
    ks = ks[ks < P]
    nxt = np.concatenate([ks[1:], [ks[0] + P]])
    jumps = np.zeros(len(ks))
    if len(meas.atoms):
        idx = np.searchsorted(ks, np.mod(meas.atoms[:, 0], P))
        np.add.at(jumps, np.clip(idx, 0, len(ks) - 1), sign * meas.atoms[:, 1])
    seg = np.zeros(len(ks))
    mid = 0.5 * (ks + nxt)
    widths = nxt - ks
    for a, b, rho in meas.pieces:
        inside = ((mid >= a) & (mid <= b)) | ((mid - P >= a) & (mid - P <= b))
        seg += np.where(inside, sign * rho * widths, 0.0)
    values = np.cumsum(jumps) + np.concatenate([[0.0], np.cumsum(seg[:-1])])
    return ComponentFunction(boundary, ks, values, jumps)


def anchor_trace(f: BoundaryMeasure, dec: ArcDecomposition, chi_shift: int = 0) -> BoundaryFunction:
    """The unique trace with derivative f vanishing at the first-arc anchors.

    Anchored at the counterclockwise start of the designated increasing arc on
    each component (the point it shares with the preceding remainder arc), which
    places the inner range inside the outer range.
    """
    tol = f.mass_tolerance()
    mass_out = f.outer.abs_mass()
    mass_in = f.inner.abs_mass()
    if abs(mass_out - mass_in) > tol and mass_out > 0 and mass_in > 0:
        raise MassMismatch(
            f"component masses differ: outer {mass_out:.12g} vs inner {mass_in:.12g}"
        )
    parts = {}
    for name, comp_dec in (("outer", dec.outer), ("inner", dec.inner)):
        meas = f.component(name)
        boundary = meas.boundary
        if meas.abs_mass() == 0.0:
            parts[name] = constant_trace(boundary, 0.0)
            continue
        if not comp_dec.chi:
            raise MissingAnchor(f"no increasing arc on the {name} component to anchor at")
        idx = chi_shift % len(comp_dec.chi) if name == "inner" else 0
        anchor_s = comp_dec.chi[idx].arc.s_start
        raw = _component_antiderivative(meas, boundary, flip=(name == "inner"))
        # anchor at the left limit: the increasing arc starts there, so a jump
        # atom sitting exactly at the anchor belongs to the arc, not the base
        rel = np.mod(raw.knots - anchor_s, boundary.perimeter)
        at = np.nonzero(np.minimum(rel, boundary.perimeter - rel) <= EPS_GEOM)[0]
        base = raw.value(anchor_s)
        if len(at):
            base -= raw.jumps[at[0]]
        parts[name] = ComponentFunction(boundary, raw.knots, raw.values - base, raw.jumps)
    return BoundaryFunction(outer=parts["outer"], inner=parts["inner"])
