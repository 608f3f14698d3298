"""Counting clean flexes and checking the counts against the known lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from .chebyshev import TWO_PI, SpaceDescriptor, TrigPoly, wrap_angle
from .errors import EmptyCensus, FunctionInSpace, InfiniteCount
from .funcmodel import (
    DEFAULT_GRID,
    Arc,
    DifferenceFunction,
    FourierFunction,
    GridProfile,
    NegatedFunction,
    PeriodicFunction,
    circular_distance,
    near_zero_components,
)
from .osculation import (
    FlexRecord,
    classify_flex,
    flex_scan,
    minimal_function,
    operator_values,
)


@dataclass(frozen=True)
class Check:
    required: int
    observed: int

    @property
    def passed(self) -> bool:
        return self.observed >= self.required


@dataclass
class CensusReport:
    n: int
    records: list = field(default_factory=list)
    clean_max: list = field(default_factory=list)
    clean_min: list = field(default_factory=list)
    global_only: list = field(default_factory=list)
    plain: list = field(default_factory=list)
    sign_changes: int = 0
    theorem_checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.theorem_checks.values())


def _collapse(arcs: list[Arc], gap: float) -> list[Arc]:
    """Merge arcs that touch or overlap (within ``gap``)."""
    arcs = sorted(arcs, key=lambda a: a.start)
    out: list[Arc] = []
    for a in arcs:
        if out and a.start - out[-1].end <= gap:
            last = out.pop()
            out.append(Arc(last.start, max(last.end, a.end)))
        else:
            out.append(a)
    if len(out) > 1 and out[0].start + TWO_PI - out[-1].end <= gap:
        last = out.pop()
        out[0] = Arc(last.start, max(last.end, out[0].end + TWO_PI))
    return out


def clean_flex_census(u: PeriodicFunction, n: int,
                      grid: GridProfile = DEFAULT_GRID) -> CensusReport:
    """Classify every flex of order ``2n+1`` and check the clean-flex bounds."""
    if n < 1:
        raise ValueError("n must be at least 1")
    space = SpaceDescriptor.trig(n)
    flexes = flex_scan(u, space, grid)
    report = CensusReport(n)
    for arc in flexes:
        rec = classify_flex(u, arc, n, grid)
        report.records.append(rec)
        if rec.kind == "plain":
            report.plain.append(rec)
        elif not rec.is_clean:
            report.global_only.append(rec)
    report.clean_max = _collapse([r.location for r in report.records if r.kind == "clean-max"],
                                 grid.step)
    report.clean_min = _collapse([r.location for r in report.records if r.kind == "clean-min"],
                                 grid.step)
    try:
        report.sign_changes = sign_change_count(report)
    except EmptyCensus:
        report.sign_changes = 0
    report.theorem_checks["thm1.1"] = Check(
        n + 1, min(len(report.clean_max), len(report.clean_min)))
    report.theorem_checks["thm6.1"] = Check(4, report.sign_changes)
    return report


def sign_change_count(report: CensusReport) -> int:
    """Number of alternations between clean-max and clean-min around the circle.

    The value is ``2m`` for the largest ``m`` admitting an alternating
    cyclic sequence ``p1 < q1 < ... < pm < qm`` of clean-max ``p`` and
    clean-min ``q`` representatives.
    """
    if not report.clean_max or not report.clean_min:
        raise EmptyCensus("need at least one clean maximal and one clean minimal flex")
    labels = sorted([(a.midpoint, 1) for a in report.clean_max] +
                    [(a.midpoint, -1) for a in report.clean_min])
    seq = [lab for _, lab in labels]
    return sum(1 for a, b in zip(seq, seq[1:] + seq[:1]) if a != b)


# ---------------------------------------------------------------- Bose tally


@dataclass(frozen=True)
class BoseTally:
    s_count: int
    t_count: int
    tritangents: tuple = ()

    @property
    def difference(self) -> int:
        return self.s_count - self.t_count

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s_count, self.t_count, self.difference)


def _lower_support(u: PeriodicFunction, s: float, grid: GridProfile):
    """Largest degree-1 trigonometric polynomial below ``u`` touching it at ``s``."""
    res = minimal_function(NegatedFunction(u), [(s, 1)], 1, grid)
    return res


def _has_flat_contact(res, grid: GridProfile, tol: float = 1e-12) -> bool:
    """True when ``u`` and its support agree to round-off on a run of grid points.

    Contact components themselves are epsilon-band arcs, so their length
    says little; a genuine contact interval shows up as a run where the
    difference is at the round-off level.
    """
    g = np.abs(DifferenceFunction(res.contact.u, res.phi).grid_values(grid.base_samples, 0)[0])
    scale = float(np.max(g))
    if scale == 0.0:
        return True
    flat = g <= tol * scale
    if flat.all():
        return True
    # longest cyclic run
    k = int(np.argmin(flat))
    run = best = 0
    for v in np.roll(flat, -k):
        run = run + 1 if v else 0
        best = max(best, run)
    return best * (TWO_PI / grid.base_samples) > 4 * grid.gap


def _refine_tritangent(u: PeriodicFunction, coeffs: np.ndarray, pts,
                       grid: GridProfile) -> tuple[np.ndarray, int] | None:
    """Polish a near-tritangent lower support by Newton on its three contacts.

    Unknowns are the three coefficients and the three contact points; the
    equations ask ``u - phi`` and its derivative to vanish at each point.
    Returns the coefficients and the number of contact components, or
    ``None`` when the solve fails or the result does not stay below ``u``.
    """
    space = SpaceDescriptor(3)

    def eqs(z):
        c, x = z[:3], z[3:]
        d = u.derivatives(x, 2)
        b0, b1, b2 = (space.basis_derivatives(x, m) for m in range(3))
        f = np.concatenate([d[0] - b0 @ c, d[1] - b1 @ c])
        J = np.zeros((6, 6))
        J[:3, :3], J[3:, :3] = -b0, -b1
        J[:3, 3:] = np.diag(d[1] - b1 @ c)
        J[3:, 3:] = np.diag(d[2] - b2 @ c)
        return f, J

    sol = root(eqs, np.concatenate([coeffs, pts]), jac=True, method="hybr")
    uscale = float(np.max(np.abs(u.grid_values(grid.base_samples, 1))))
    # judge by the residual: hybr may stall once it sits at round-off
    if not np.all(np.isfinite(sol.x)) or np.max(np.abs(sol.fun)) > 1e-12 * uscale:
        return None
    c, x = sol.x[:3], sol.x[3:]
    if min(circular_distance(a, b) for a, b in ((x[0], x[1]), (x[1], x[2]), (x[0], x[2]))) < 2 * grid.gap:
        return None
    g = DifferenceFunction(u, TrigPoly(space, c))
    gv = g.grid_values(grid.base_samples, 0)[0]
    scale = float(np.max(np.abs(gv)))
    if gv.min() < -grid.support_tol * scale:
        return None
    k = len(near_zero_components(g, grid.contact_tol, grid, scale=scale))
    return c, k


def _partner(res, s: float, sep: float) -> float:
    far = [loc for loc in res.contact.entries if circular_distance(loc, s) > sep]
    if not far:
        return s
    return max(far, key=lambda q: circular_distance(q, s))


def bose_tally(u: PeriodicFunction, grid: GridProfile = DEFAULT_GRID,
               anchors: int = 512, dedupe_tol: float = 1e-6) -> BoseTally:
    """Count single-contact and excess-contact lower supporting functions.

    ``s_count`` is the number of anchors ``s`` whose lower support touches
    ``u`` only at ``s`` (the clean minimal flexes of order 3).  ``t_count``
    sums ``k - 2`` over the distinct lower supports with ``k > 2`` contact
    components; these are located where the second contact point jumps as
    the anchor moves, by bisection on the anchor.
    """
    try:
        census = clean_flex_census(u, 1, grid)
    except FunctionInSpace as exc:
        raise InfiniteCount(f"function lies in the space: {exc}") from exc
    for arc in census.clean_min:
        if arc.length > 0:
            raise InfiniteCount(f"clean minimal flex interval [{arc.start:.6g}, {arc.end:.6g}]")
    s_count = len(census.clean_min)

    sep = 2 * grid.gap
    ss = np.arange(anchors) * (TWO_PI / anchors)
    partners = []
    for s in ss:
        res = _lower_support(u, s, grid)
        if _has_flat_contact(res, grid):
            raise InfiniteCount(f"contact arc of positive length for anchor {s:.6g}")
        partners.append(_partner(res, s, sep))

    jump_thr = 4 * TWO_PI / anchors
    found: list[tuple[np.ndarray, int]] = []
    for i in range(anchors):
        lo, hi = ss[i], ss[i] + TWO_PI / anchors
        qlo, qhi = partners[i], partners[(i + 1) % anchors]
        if circular_distance(qlo, qhi) <= jump_thr:
            continue
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            qm = _partner(_lower_support(u, mid, grid), wrap_angle(mid), sep)
            if circular_distance(qlo, qm) >= circular_distance(qm, qhi):
                hi, qhi = mid, qm
            else:
                lo, qlo = mid, qm
            if circular_distance(qlo, qhi) <= jump_thr * (hi - lo) * anchors / TWO_PI:
                break
        if circular_distance(qlo, qhi) <= 1e-3:
            continue
        mid = 0.5 * (lo + hi)
        res = _lower_support(u, mid, grid)
        # the bracket stops where the third gap crosses the contact
        # tolerance, so polish the three-point contact before counting
        polished = _refine_tritangent(u, -res.phi.coeffs, np.array([mid, qlo, qhi]), grid)
        if polished is None:
            coeffs, k = -res.phi.coeffs, len(res.contact.arcs)
        else:
            coeffs, k = polished
        if k <= 2:
            continue
        if any(np.max(np.abs(coeffs - c)) < dedupe_tol for c, _ in found):
            continue
        found.append((coeffs, k))
    t_count = sum(k - 2 for _, k in found)
    return BoseTally(s_count, t_count, tuple(tuple(c) for c, _ in found))


# ---------------------------------------------------------------- operator sign changes


def count_sign_changes(values: np.ndarray, parity: int = 1, tol: float = 0.0) -> int:
    """Cyclic sign changes of grid samples; ``parity=-1`` flips across the seam."""
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    keep = np.abs(values) > tol * scale
    sgn = np.sign(values[keep])
    if sgn.size == 0:
        return 0
    inner = int(np.count_nonzero(sgn[1:] != sgn[:-1]))
    seam = int(sgn[-1] != parity * sgn[0])
    return inner + seam


def operator_sign_change_check(u: PeriodicFunction, space: SpaceDescriptor,
                               grid: GridProfile = DEFAULT_GRID) -> tuple[int, bool]:
    """Sign changes of ``L u`` on the circle; passes when at least ``order + 1``."""
    if u.parity != space.parity:
        raise ValueError(f"{u.parity} function checked against {space.parity} space")
    lu, op_scale = operator_values(u, space, grid)
    if np.max(np.abs(lu)) <= grid.zero_tol * op_scale:
        raise FunctionInSpace("L u vanishes identically")
    count = count_sign_changes(lu, space.sign, grid.zero_tol)
    return count, count >= space.order + 1


# ---------------------------------------------------------------- corpora


def in_space_ratio(u: PeriodicFunction, space: SpaceDescriptor,
                   grid: GridProfile = DEFAULT_GRID) -> float:
    """``max |L u| / max |u|`` on the grid; near zero when ``u`` is in the space."""
    lu, _ = operator_values(u, space, grid)
    uscale = float(np.max(np.abs(u.grid_values(grid.base_samples, 0)[0])))
    return float(np.max(np.abs(lu))) / uscale if uscale else 0.0


def random_fourier(rng: np.random.Generator, n: int, extra: tuple[int, int] = (1, 3),
                   grid: GridProfile = DEFAULT_GRID, reject_below: float = 1e-6) -> FourierFunction:
    """Random periodic Fourier function of degree ``n+extra[0] .. n+extra[1]``.

    Coefficients are uniform on ``[-1, 1]``; draws too close to the space of
    degree-``n`` polynomials are rejected.
    """
    space = SpaceDescriptor.trig(n)
    while True:
        degree = int(rng.integers(n + extra[0], n + extra[1] + 1))
        coeffs = rng.uniform(-1.0, 1.0, 2 * degree + 1)
        u = FourierFunction(coeffs)
        if in_space_ratio(u, space, grid) >= reject_below:
            return u


def random_antiperiodic(rng: np.random.Generator, order: int, extra: int = 3,
                        grid: GridProfile = DEFAULT_GRID,
                        reject_below: float = 1e-6) -> FourierFunction:
    """Random antiperiodic function with half-integer harmonics beyond the space."""
    space = SpaceDescriptor(order)
    while True:
        pairs = space.degree + int(rng.integers(1, extra + 1))
        coeffs = rng.uniform(-1.0, 1.0, 2 * pairs)
        u = FourierFunction(coeffs, "antiperiodic")
        if in_space_ratio(u, space, grid) >= reject_below:
            return u


def corpus(seed: int, count: int, n: int, grid: GridProfile = DEFAULT_GRID) -> list[FourierFunction]:
    rng = np.random.default_rng(seed)
    return [random_fourier(rng, n, grid=grid) for _ in range(count)]
