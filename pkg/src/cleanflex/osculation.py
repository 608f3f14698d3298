"""Osculating polynomials, flexes, minimal supporting functions.

A flex of order ``2n+1`` of ``u`` is a point where the osculating
trigonometric polynomial of degree ``n`` agrees with ``u`` to one extra
derivative; equivalently a zero of the disconjugate operator applied to
``u``.  A flex is clean maximal (minimal) when the osculating polynomial
stays above (below) ``u`` everywhere and touches it in a connected set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .chebyshev import (
    TWO_PI,
    HermiteData,
    SpaceDescriptor,
    TrigPoly,
    disconjugate_operator,
    hermite_interpolate,
    hermite_matrix,
    wrap_angle,
)
from .errors import FunctionInSpace, NotOneSided, NotSupporting
from .funcmodel import (
    DEFAULT_GRID,
    Arc,
    DifferenceFunction,
    GridProfile,
    PeriodicFunction,
    bracketed_root,
    circular_distance,
    near_zero_components,
    scan_zeros,
    sup_of_ratio,
)

INF = math.inf

KINDS = ("plain", "global-max", "global-min", "clean-max", "clean-min")


@dataclass(frozen=True)
class ContactProfile:
    """Multiplicity map of a supporting polynomial against ``u``.

    ``entries`` maps a representative location of every contact component
    to an even multiplicity or ``inf``; ``arcs`` are the components
    themselves (possibly degenerate point arcs).
    """

    entries: dict
    arcs: tuple = ()
    phi: TrigPoly | None = field(default=None, compare=False, repr=False)
    u: PeriodicFunction | None = field(default=None, compare=False, repr=False)

    @property
    def support(self) -> list[float]:
        return sorted(self.entries)

    @property
    def total(self) -> float:
        return float(sum(self.entries.values())) if self.entries else 0.0

    @property
    def connected(self) -> bool:
        return len(self.arcs) == 1

    def multiplicity_at(self, t: float, tol: float = 1e-6) -> float:
        for loc, m in self.entries.items():
            if circular_distance(loc, t) <= tol:
                return m
        for arc in self.arcs:
            if arc.contains(t, slack=tol):
                # inside a contact component but away from its representative
                loc = min(self.entries, key=lambda x: arc.distance(x))
                return self.entries[loc]
        return 0

    def matches(self, other: "ContactProfile", loc_tol: float = 1e-6) -> bool:
        """Same support (within ``loc_tol``) with identical multiplicities."""
        if len(self.entries) != len(other.entries):
            return False
        for loc, m in self.entries.items():
            hits = [m2 for l2, m2 in other.entries.items()
                    if circular_distance(loc, l2) <= loc_tol]
            if len(hits) != 1 or hits[0] != m:
                return False
        return True

    def describe(self) -> str:
        return "{" + ", ".join(f"{loc:.6g}: {_fmt_mult(m)}" for loc, m in sorted(self.entries.items())) + "}"


def _fmt_mult(m) -> str:
    return "inf" if m == INF else str(int(m))


@dataclass(frozen=True)
class FlexRecord:
    location: Arc
    kind: str
    osculating: TrigPoly
    contact: ContactProfile

    @property
    def is_clean(self) -> bool:
        return self.kind.startswith("clean")

    @property
    def is_global(self) -> bool:
        return self.kind != "plain"

    @property
    def is_max(self) -> bool:
        return self.kind.endswith("max")

    @property
    def is_min(self) -> bool:
        return self.kind.endswith("min")


@dataclass(frozen=True)
class MinimalFunctionResult:
    phi: TrigPoly
    multiplier: float
    contact: ContactProfile
    phi1: TrigPoly = field(repr=False, default=None)
    phi2: TrigPoly = field(repr=False, default=None)


def osculating_polynomial(u: PeriodicFunction, s: float, n: int | None = None,
                          space: SpaceDescriptor | None = None) -> TrigPoly:
    """Member of the space matching ``u`` at ``s`` to order ``order-1``.

    By default the space is the trigonometric polynomials of degree ``n``.
    """
    if space is None:
        space = SpaceDescriptor.trig(n)
    data = HermiteData.sample(u, [(float(s), space.order)])
    return hermite_interpolate(space, data)


def _grid_derivs(f, grid: GridProfile, max_order: int) -> np.ndarray:
    if isinstance(f, PeriodicFunction):
        return f.grid_values(grid.base_samples, max_order)
    return f.derivatives(grid.points(), max_order)


def operator_values(u: PeriodicFunction, space: SpaceDescriptor,
                    grid: GridProfile = DEFAULT_GRID) -> tuple[np.ndarray, float]:
    """``L u`` on the grid and the pointwise-absolute operator scale."""
    op = disconjugate_operator(space)
    d = _grid_derivs(u, grid, op.order)
    c = op.coefficients
    return c @ d, float(np.max(np.abs(c) @ np.abs(d)))


def flex_scan(u: PeriodicFunction, space: SpaceDescriptor,
              grid: GridProfile = DEFAULT_GRID) -> list[Arc]:
    """Flexes of ``u`` for ``space``: zeros of the disconjugate operator.

    Isolated zeros come back as point arcs; maximal runs of grid points
    where ``|L u|`` stays below ``zero_tol`` come back as flex intervals.
    """
    op = disconjugate_operator(space)
    lu, op_scale = operator_values(u, space, grid)
    lu_scale = float(np.max(np.abs(lu)))
    if lu_scale <= grid.zero_tol * op_scale:
        raise FunctionInSpace(
            f"L u vanishes identically ({lu_scale:.3g} vs scale {op_scale:.3g})"
        )
    h = grid.step
    t = grid.points()
    flat = np.abs(lu) <= grid.zero_tol * lu_scale
    arcs: list[Arc] = []
    if flat.any():
        n = len(t)
        off = int(np.argmin(flat))
        idx = (np.arange(n) + off) % n
        m = flat[idx]
        i = 0
        while i < n:
            if m[i]:
                j = i
                while j + 1 < n and m[j + 1]:
                    j += 1
                if j - i >= 2:
                    arcs.append(Arc(t[idx[i]], t[idx[i]] + (j - i) * h))
                i = j + 1
            else:
                i += 1

    coeffs = op.coefficients

    def lu_fn(x):
        return coeffs @ u.derivatives(np.atleast_1d(x), op.order)

    for z in scan_zeros(lu_fn, grid, parity=space.sign, scale=lu_scale):
        if any(a.contains(z.location, slack=3 * h) for a in arcs):
            continue
        arcs.append(Arc.point(z.location))
    return sorted(arcs, key=lambda a: a.start)


def _refined_min(gfun, t: np.ndarray, v: np.ndarray, h: float, k: int = 8) -> float:
    """Minimum of ``gfun`` polished around the ``k`` lowest grid local minima."""
    best = float(v.min())
    local = (v <= np.roll(v, 1)) & (v <= np.roll(v, -1))
    idx = np.nonzero(local)[0]
    idx = idx[np.argsort(v[idx])[:k]]
    for i in idx:
        res = minimize_scalar(lambda x: float(gfun(np.array([x]))[0]),
                              bounds=(t[i] - h, t[i] + h), method="bounded",
                              options={"xatol": 1e-13})
        best = min(best, float(res.fun))
    return best


def _contact_order(d: np.ndarray, scales: np.ndarray, n: int, tol: float) -> float:
    """Contact multiplicity from derivatives ``d[0..2n]`` of ``phi - u``."""
    if abs(d[0]) > tol * scales[0]:
        return 0
    for j in range(1, 2 * n + 1):
        if abs(d[j]) > tol * scales[j]:
            return j + (j % 2)
    return INF


FLAT_RUN = 8
FLAT_TOL = 1e-13


def _flat_run(gv: np.ndarray, gscale: float, arc: Arc, grid: GridProfile) -> int:
    """Longest run of grid points in ``arc`` where ``|g|`` is at round-off level.

    Epsilon-band arcs around an isolated high-order contact can be wide;
    a run like this separates a true contact interval from them.
    """
    N = grid.base_samples
    i0 = int(np.ceil(arc.start / grid.step))
    i1 = int(np.floor(arc.end / grid.step))
    if i1 < i0:
        return 0
    flat = np.abs(gv[np.arange(i0, i1 + 1) % N]) <= FLAT_TOL * gscale
    best = run = 0
    for f in flat:
        run = run + 1 if f else 0
        best = max(best, run)
    return best


BUMP_TOL = 1e-14


def _bump_between(gfun, a: float, b: float, scale: float) -> bool:
    """True when ``|g|`` rises above round-off between two nearby minima.

    Two double contacts a fraction of a grid step apart share one
    epsilon-band arc; only this rise tells them apart from one contact.
    """
    xs = np.linspace(a, b, 33)[1:-1]
    return bool(np.max(np.abs(gfun(xs))) > BUMP_TOL * scale)


def contact_profile(u: PeriodicFunction, phi: TrigPoly, n: int,
                    grid: GridProfile = DEFAULT_GRID) -> ContactProfile:
    """Contact multiplicities of a one-sided ``phi`` against ``u``.

    Multiplicity ``2k`` means derivatives ``0..2k-1`` of ``phi - u`` vanish
    (to ``contact_tol`` times the grid size of that derivative) and the
    ``2k``-th does not; agreement through order ``2n`` is reported as
    ``inf``.
    """
    g = DifferenceFunction(phi, u)
    du = _grid_derivs(u, grid, 2 * n)
    dphi = phi.derivatives(grid.points(), 2 * n)
    scales = np.max(np.abs(du) + np.abs(dphi), axis=1)
    scales[scales == 0] = 1.0
    gv = dphi[0] - du[0]
    gscale = float(np.max(np.abs(gv)))
    if gscale == 0.0 or gscale <= 1e-14 * scales[0]:
        whole = Arc(0.0, TWO_PI - 1e-12)
        return ContactProfile({0.0: INF}, (whole,), phi, u)
    thr = grid.support_tol * gscale
    if gv.min() < -thr and gv.max() > thr:
        raise NotOneSided("phi - u changes sign")

    def gfun(x):
        return g.derivatives(np.atleast_1d(x), 0)[0]

    comps = near_zero_components(gfun, grid.contact_tol, grid, scale=gscale)
    sgn = 1.0 if gv.max() > -gv.min() else -1.0
    h = grid.step
    entries = {}

    def deriv(j):
        return lambda x: float(g.derivatives(np.array([x]), j)[j][0])

    def order_at(x):
        return _contact_order(g.derivatives(np.array([x]), 2 * n)[:, 0], scales, n,
                              grid.contact_tol)

    for arc in comps:
        lo, hi = arc.start - 2 * h, arc.end + 2 * h
        if _flat_run(gv, gscale, arc, grid) >= FLAT_RUN:
            # a genuine contact interval: one entry for the whole arc
            entries[wrap_angle(arc.midpoint)] = INF
            continue
        xs = np.linspace(lo, hi, max(65, int((hi - lo) / h) * 4 + 1))
        d1 = sgn * g.derivatives(xs, 1)[1]
        found = []
        # local minima of the one-sided difference: g' goes from - to +
        for i in np.nonzero((d1[:-1] < 0) & (d1[1:] >= 0))[0]:
            r = bracketed_root(deriv(1), xs[i], xs[i + 1])
            found.append(xs[i] if r is None else r)
        res = minimize_scalar(lambda x: abs(float(gfun(x)[0])), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14})
        if not found:
            found.append(float(res.x))
        cands = []
        for x in found:
            m = order_at(x)
            if m == 0:
                continue
            if m != INF and m >= 4:
                # the (m-1)-th derivative pins a high-order contact sharply
                r = bracketed_root(deriv(m - 1), x - 4 * h, x + 4 * h)
                if r is not None and order_at(r) >= m:
                    x = r
            cands.append((x, m))
        if not cands:
            # inside the tolerance band but the derivative test says no contact
            cands = [(float(res.x), 2)]
        cands.sort()
        merged = [cands[0]]
        for x, m in cands[1:]:
            if x - merged[-1][0] <= 4 * h and not _bump_between(gfun, merged[-1][0], x, scales[0]):
                if m > merged[-1][1]:
                    merged[-1] = (x, m)
            else:
                merged.append((x, m))
        for x, m in merged:
            entries[wrap_angle(x)] = m
    return ContactProfile(entries, tuple(comps), phi, u)


def classify_flex(u: PeriodicFunction, s, n: int,
                  grid: GridProfile = DEFAULT_GRID) -> FlexRecord:
    """Classify the (forced) flex ``s`` as plain, global or clean, max or min."""
    loc = s if isinstance(s, Arc) else Arc.point(float(s))
    phi = osculating_polynomial(u, loc.midpoint, n)
    t = grid.points()
    dphi = phi(t)
    du = _grid_derivs(u, grid, 0)[0]
    gv = dphi - du
    scale = float(np.max(np.abs(gv)))
    if scale == 0.0:
        prof = ContactProfile({loc.midpoint: INF}, (Arc(0.0, TWO_PI - 1e-12),), phi, u)
        return FlexRecord(loc, "global-max", phi, prof)

    def gfun(x):
        return phi(x) - u.derivatives(np.atleast_1d(x), 0)[0]

    thr = grid.support_tol * scale
    h = grid.step
    above = _refined_min(gfun, t, gv, h) >= -thr
    below = (not above) and _refined_min(lambda x: -gfun(x), t, -gv, h) >= -thr
    if not (above or below):
        return FlexRecord(loc, "plain", phi, ContactProfile({}, (), phi, u))
    comps = near_zero_components(gfun, grid.contact_tol, grid, scale=scale)
    side = "max" if above else "min"
    kind = ("clean-" if len(comps) == 1 else "global-") + side
    try:
        prof = contact_profile(u, phi, n, grid)
    except NotOneSided:
        prof = ContactProfile({}, tuple(comps), phi, u)
    return FlexRecord(loc, kind, phi, prof)


def _largest_gap_midpoint(points: Sequence[float]) -> float:
    pts = sorted(wrap_angle(p) for p in points)
    gaps = [(b - a, a) for a, b in zip(pts, pts[1:] + [pts[0] + TWO_PI])]
    g, a = max(gaps)
    return wrap_angle(a + g / 2)


def _normalize_points(points) -> list[tuple[float, int]]:
    """Accept ``[(p, mu), ...]`` or a plain tuple of (possibly repeated) points."""
    pts = list(points)
    if pts and not isinstance(pts[0], (tuple, list)):
        out: list[list] = []
        for p in pts:
            p = wrap_angle(p)
            for item in out:
                if circular_distance(item[0], p) < 1e-12:
                    item[1] += 1
                    break
            else:
                out.append([p, 1])
        return [(p, mu) for p, mu in out]
    res = [(wrap_angle(p), int(mu)) for p, mu in pts]
    for (a, _), (b, _) in itertools.combinations(res, 2):
        if circular_distance(a, b) < 1e-12:
            raise ValueError("points must be pairwise distinct")
    return res


def minimal_function(u: PeriodicFunction, points, n: int,
                     grid: GridProfile = DEFAULT_GRID) -> MinimalFunctionResult:
    """Smallest degree-``n`` trigonometric polynomial above ``u`` with prescribed contacts.

    ``points`` is ``[(p_i, mu_i), ...]`` with ``sum(mu_i) == n`` (or a tuple of
    ``n`` possibly repeated angles).  The polynomial matches ``u`` to order
    ``2*mu_i - 1`` at each ``p_i``.
    """
    pts = _normalize_points(points)
    if sum(mu for _, mu in pts) != n:
        raise ValueError(f"multiplicities sum to {sum(mu for _, mu in pts)}, expected {n}")
    space = SpaceDescriptor.trig(n)
    nodes = [(p, 2 * mu) for p, mu in pts]
    A, _ = hermite_matrix(space, nodes)
    _, _, vt = np.linalg.svd(A)
    phi2 = TrigPoly(space, vt[-1])
    aux = _largest_gap_midpoint([p for p, _ in pts])
    if phi2(aux) < 0:
        phi2 = phi2.scaled(-1.0)
    phi2 = phi2.scaled(1.0 / phi2.grid_scale())

    data = HermiteData.sample(u, nodes + [(aux, 1)])
    phi1 = hermite_interpolate(space, data)
    num = DifferenceFunction(u, phi1)
    m, _ = sup_of_ratio(num, phi2, [(p, 2 * mu) for p, mu in pts], grid)
    phi = phi1 + phi2.scaled(m)

    t = grid.points()
    gv = phi(t) - _grid_derivs(u, grid, 0)[0]
    uscale = float(np.max(np.abs(_grid_derivs(u, grid, 0)[0]))) or 1.0
    if gv.min() < -grid.support_tol * uscale:
        raise NotSupporting(
            f"minimal function dips below u by {-gv.min():.3g} (scale {uscale:.3g})"
        )
    prof = contact_profile(u, phi, n, grid)
    return MinimalFunctionResult(phi, m, prof, phi1, phi2)


# ---------------------------------------------------------------- axiom audit


@dataclass
class AxiomResult:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class AuditReport:
    n: int
    results: dict
    assumed: tuple = ("A1", "A5", "A7", "A8")

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def lines(self) -> list[str]:
        out = []
        for name, r in self.results.items():
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{name}: {status} ({r.checked} checks, {len(r.failures)} failures)")
        out.append(f"{', '.join(self.assumed)}: analytically assumed, not sampled")
        return out


def _same_function(a: TrigPoly, b: TrigPoly, tol: float) -> bool:
    scale = max(1.0, float(np.max(np.abs(a.coeffs))))
    return bool(np.max(np.abs(a.coeffs - b.coeffs)) <= tol * scale)


def _agreement_tol(points, n: int, coeff_tol: float) -> float:
    """Coefficient tolerance for minimal functions built from ``points``.

    Nearby contacts make the confluent system ill-conditioned, so two
    solves of the same problem can only agree to ``cond * eps``.
    """
    pts = _normalize_points(points)
    nodes = [(p, 2 * mu) for p, mu in pts] + [(_largest_gap_midpoint([p for p, _ in pts]), 1)]
    A, _ = hermite_matrix(SpaceDescriptor.trig(n), nodes)
    return max(coeff_tol, 10 * float(np.linalg.cond(A)) * np.finfo(float).eps)


def axiom_audit(u: PeriodicFunction, n: int, tuples: Iterable[Sequence[float]],
                grid: GridProfile = DEFAULT_GRID, coeff_tol: float = 1e-8,
                loc_tol: float = 1e-6) -> AuditReport:
    """Check symmetry, supporting property, exchangeability and total multiplicity.

    Each tuple is ``n`` angles (repetition allowed).  Profiles are compared
    through their minimal functions (coefficientwise) and supports.
    ``coeff_tol`` is raised to the conditioning floor of the contact system
    when prescribed points nearly coincide.
    """
    res = {name: AxiomResult() for name in ("A2", "A3", "A4", "A6")}
    for tup in tuples:
        tup = [wrap_angle(p) for p in tup]
        base = minimal_function(u, tup, n, grid)
        prof = base.contact
        base_tol = _agreement_tol(tup, n, coeff_tol)

        # A2: permutations give the same minimal function and profile
        for perm in itertools.islice(itertools.permutations(tup), 1, 3):
            other = minimal_function(u, list(perm), n, grid)
            res["A2"].checked += 1
            if not (_same_function(base.phi, other.phi, base_tol) and prof.matches(other.contact, loc_tol)):
                res["A2"].failures.append((tuple(tup), tuple(perm)))

        # A3: every prescribed point is in the support
        res["A3"].checked += 1
        if any(prof.multiplicity_at(p, loc_tol) == 0 for p in tup):
            res["A3"].failures.append((tuple(tup), prof.describe()))

        # A6: total multiplicity
        res["A6"].checked += 1
        if prof.total < 2 * n + 2:
            res["A6"].failures.append((tuple(tup), prof.describe()))

        # A4: exchange prescribed points for a contact point of multiplicity >= 2j
        for r, mult in prof.entries.items():
            jmax = n if mult == INF else min(n, int(mult) // 2)
            for j in range(1, jmax + 1):
                ordered = sorted(tup, key=lambda p: circular_distance(p, r) < loc_tol)
                keep = ordered[: n - j]
                if any(circular_distance(p, r) < loc_tol for p in keep):
                    continue
                new = keep + [r] * j
                try:
                    other = minimal_function(u, new, n, grid)
                except Exception as exc:  # report, do not abort the audit
                    res["A4"].checked += 1
                    res["A4"].failures.append((tuple(tup), tuple(new), repr(exc)))
                    continue
                res["A4"].checked += 1
                tol = max(base_tol, _agreement_tol(new, n, coeff_tol))
                if not (_same_function(base.phi, other.phi, tol) and prof.matches(other.contact, loc_tol)):
                    res["A4"].failures.append((tuple(tup), tuple(new)))
    return AuditReport(n, res)
