"""Strictly convex curves given by support functions.

A curve is encoded by its support function ``h`` about an interior origin
``o``: at parameter ``t`` the outward unit normal is ``e(t) = (cos t, sin t)``
and the curve point is ``o + h e + h' e'``.  Vertices are flexes of ``h``
of order three; sextactic points are zeros of the fifth derivative of the
osculating-conic residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import comb

from .chebyshev import TWO_PI, SpaceDescriptor, wrap_angle
from .errors import (
    CircleDegenerate,
    ConicDegenerate,
    DerivativeUnavailable,
    FunctionInSpace,
    NotConvex,
    NotOneSided,
    RankDeficient,
    TangentLinesParallel,
)
from .funcmodel import (
    DEFAULT_GRID,
    Arc,
    GridProfile,
    PeriodicFunction,
    near_zero_components,
    scan_zeros,
    sup_of_ratio,
)
from .osculation import INF, FlexRecord, classify_flex, flex_scan

CONIC_ORDER = 5
NON_CONIC_SAMPLES = 256
NON_CONIC_RESIDUAL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SupportCurve:
    """Strictly convex closed curve with support function ``h`` about ``origin``."""

    h: PeriodicFunction
    origin: tuple = (0.0, 0.0)
    grid: GridProfile = field(default=DEFAULT_GRID, compare=False, repr=False)

    def __post_init__(self):
        if self.h.parity != "periodic":
            raise ValueError("a support function must be 2*pi-periodic")
        if self.h.max_derivative_order < 2:
            raise DerivativeUnavailable("support function needs two derivatives")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        d = self.h.grid_values(self.grid.base_samples, 2)
        rho = d[0] + d[2]
        i = int(np.argmin(rho))
        if rho[i] <= 0.0:
            raise NotConvex(f"h + h'' = {rho[i]:.6g} <= 0 at t = {self.grid.points()[i]:.6g}")

    def points(self, t) -> np.ndarray:
        """Curve points, shape ``(len(t), 2)``."""
        return curve_from_support(self, np.atleast_1d(t), 0)[0].T


def _normal_derivative(t: np.ndarray, m: int) -> np.ndarray:
    """``m``-th derivative of ``e(t) = (cos t, sin t)``, shape ``(2, len(t))``."""
    a = t + m * math.pi / 2
    return np.stack([np.cos(a), np.sin(a)])


def curve_from_support(c: SupportCurve, t, order: int = 0) -> np.ndarray:
    """Point and derivatives of the curve with respect to the normal angle.

    Returns shape ``(order+1, 2)`` for scalar ``t`` and
    ``(order+1, 2, len(t))`` otherwise.  Uses ``gamma' = rho e'`` with
    ``rho = h + h''`` and Leibniz for the higher derivatives.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    need = max(1, order + 1)
    if c.h.max_derivative_order < need:
        raise DerivativeUnavailable(f"need {need} derivatives of h")
    d = c.h.derivatives(t, need)
    out = np.empty((order + 1, 2, t.size))
    out[0] = np.array(c.origin)[:, None] + d[0] * _normal_derivative(t, 0) \
        + d[1] * _normal_derivative(t, 1)
    # rho^(j) = h^(j) + h^(j+2)
    for k in range(1, order + 1):
        acc = np.zeros((2, t.size))
        for j in range(k):
            rho_j = d[j] + d[j + 2]
            acc += comb(k - 1, j, exact=True) * rho_j * _normal_derivative(t, k - j)
        out[k] = acc
    return out[:, :, 0] if scalar else out


def curvature_radius(c: SupportCurve, t):
    d = c.h.derivatives(np.atleast_1d(np.asarray(t, dtype=float)), 2)
    r = d[0] + d[2]
    return float(r[0]) if np.ndim(t) == 0 else r


# ---------------------------------------------------------------- vertices


@dataclass(frozen=True)
class VertexRecord:
    """Vertex with its osculating circle.

    ``kind`` follows the curve picture: ``clean-max`` is an inscribed
    osculating circle meeting the curve in a connected set, ``clean-min``
    a circumscribed one; ``global-*`` drops connectedness.
    """

    location: Arc
    kind: str
    center: tuple
    radius: float
    contact: tuple = ()
    flex: FlexRecord | None = field(default=None, compare=False, repr=False)

    @property
    def is_clean(self) -> bool:
        return self.kind.startswith("clean")

    @property
    def inscribed(self) -> bool:
        return self.kind.endswith("max")


# a circle with support phi <= h lies inside the curve
_VERTEX_KIND = {
    "clean-min": "clean-max",
    "clean-max": "clean-min",
    "global-min": "global-max",
    "global-max": "global-min",
    "plain": "plain",
}


def osculating_circle(c: SupportCurve, t: float) -> tuple[tuple[float, float], float]:
    p = curve_from_support(c, t, 0)[0]
    r = curvature_radius(c, t)
    center = p - r * np.array([math.cos(t), math.sin(t)])
    return (float(center[0]), float(center[1])), r


def vertex_scan(c: SupportCurve) -> list[VertexRecord]:
    """Vertices as flexes of ``h`` (zeros of ``h''' + h'``), classified."""
    if c.h.max_derivative_order < 3:
        raise DerivativeUnavailable("vertex scan needs three derivatives of h")
    try:
        arcs = flex_scan(c.h, SpaceDescriptor.trig(1), c.grid)
    except FunctionInSpace as exc:
        raise CircleDegenerate("support function is a0 + a1 cos t + b1 sin t") from exc
    out = []
    for arc in arcs:
        rec = classify_flex(c.h, arc, 1, c.grid)
        center, r = osculating_circle(c, arc.midpoint)
        out.append(VertexRecord(arc, _VERTEX_KIND[rec.kind], center, r,
                                tuple(rec.contact.arcs), rec))
    return out


# ---------------------------------------------------------------- conics


MONOMIALS = ("x^2", "xy", "y^2", "x", "y", "1")


@dataclass(frozen=True)
class Conic:
    """``A x^2 + B xy + C y^2 + D x + E y + F`` with unit coefficient vector."""

    coeffs: tuple

    def __post_init__(self):
        v = np.asarray(self.coeffs, dtype=float).ravel()
        if v.size != 6:
            raise ValueError("a conic has six coefficients")
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise ValueError("zero conic")
        object.__setattr__(self, "coeffs", tuple(float(x) for x in v / nrm))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs)

    def matrix(self) -> np.ndarray:
        A, B, C, D, E, F = self.coeffs
        return np.array([[A, B / 2, D / 2], [B / 2, C, E / 2], [D / 2, E / 2, F]])

    @property
    def classification(self) -> str:
        A, B, C = self.coeffs[:3]
        M = self.matrix()
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            return "degenerate"
        disc = B * B - 4 * A * C
        quad = max(abs(A), abs(B), abs(C))
        if abs(disc) <= 1e-12 * max(quad * quad, 1e-300):
            return "parabola"
        return "ellipse" if disc < 0 else "hyperbola"

    def __call__(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        x, y = xy[..., 0], xy[..., 1]
        A, B, C, D, E, F = self.coeffs
        return A * x * x + B * x * y + C * y * y + D * x + E * y + F

    def gradient(self, xy) -> np.ndarray:
        x, y = float(xy[0]), float(xy[1])
        A, B, C, D, E, _ = self.coeffs
        return np.array([2 * A * x + B * y + D, B * x + 2 * C * y + E])

    def center(self):
        """Centre of a central conic, ``None`` for parabolas."""
        A, B, C, D, E, _ = self.coeffs
        M = np.array([[2 * A, B], [B, 2 * C]])
        if abs(np.linalg.det(M)) < 1e-14:
            return None
        return tuple(np.linalg.solve(M, [-D, -E]))

    def __str__(self) -> str:
        return " + ".join(f"{c:.6g}*{m}" for c, m in zip(self.coeffs, MONOMIALS))


def monomial_derivatives(c: SupportCurve, t, order: int) -> np.ndarray:
    """``d^k/dt^k`` of ``(x^2, xy, y^2, x, y, 1)`` along the curve.

    Shape ``(order+1, 6, len(t))``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = curve_from_support(c, t, order)
    X, Y = g[:, 0, :], g[:, 1, :]
    out = np.zeros((order + 1, 6, t.size))
    for k in range(order + 1):
        for i in range(k + 1):
            w = comb(k, i, exact=True)
            out[k, 0] += w * X[i] * X[k - i]
            out[k, 1] += w * X[i] * Y[k - i]
            out[k, 2] += w * Y[i] * Y[k - i]
        out[k, 3] = X[k]
        out[k, 4] = Y[k]
    out[0, 5] = 1.0
    return out


def _outward(c: SupportCurve, t: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Flip columns of ``q`` (shape ``(6, N)``) so the gradient points outward."""
    p = curve_from_support(c, t, 0)[0]
    A, B, C, D, E, _ = q
    gx = 2 * A * p[0] + B * p[1] + D
    gy = B * p[0] + 2 * C * p[1] + E
    s = np.sign(gx * np.cos(t) + gy * np.sin(t))
    s[s == 0] = 1.0
    return q * s


def osculating_conic(c: SupportCurve, t: float) -> Conic:
    """Conic meeting the curve with multiplicity at least five at ``t``.

    Sign convention: the conic polynomial increases along the outward
    normal at ``t``, so it is negative just inside the curve.
    """
    M = monomial_derivatives(c, t, CONIC_ORDER - 1)[:, :, 0]
    # column scaling keeps the monomials comparable
    col = np.maximum(np.max(np.abs(M), axis=0), 1e-300)
    _, sv, vt = np.linalg.svd(M / col)
    if sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficient(f"contact system has rank < 5 at t = {t:.6g}")
    q = (vt[-1] / col)[:, None]
    q = _outward(c, np.array([float(t)]), q)[:, 0]
    return Conic(q)


def _kernel_cofactors(M: np.ndarray) -> np.ndarray:
    """Kernel of each 5x6 matrix in a stack ``(N, 5, 6)`` by signed minors.

    Unlike an SVD kernel this is a polynomial in the entries, hence
    continuous along the curve.
    """
    N = M.shape[0]
    out = np.empty((6, N))
    for i in range(6):
        minor = np.delete(M, i, axis=2)
        out[i] = (-1) ** i * np.linalg.det(minor)
    return out


def sextactic_indicator(c: SupportCurve, t) -> np.ndarray:
    """Fifth derivative of the osculating-conic residual at ``t``.

    The kernel vector is unit-normalised with the outward sign, so the
    indicator is continuous in ``t``; its zeros are the sextactic points.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    D = monomial_derivatives(c, t, CONIC_ORDER)
    M = np.transpose(D[:CONIC_ORDER], (2, 0, 1))
    col = np.maximum(np.max(np.abs(M), axis=(0, 1)), 1e-300)
    q = _kernel_cofactors(M / col) / col[:, None]
    q = q / np.linalg.norm(q, axis=0)
    q = _outward(c, t, q)
    return np.einsum("in,in->n", D[CONIC_ORDER], q)


def conic_fit_residual(c: SupportCurve, samples: int = NON_CONIC_SAMPLES) -> float:
    """Relative residual of the best least-squares conic through curve samples."""
    t = np.arange(samples) * (TWO_PI / samples)
    p = c.points(t)
    x, y = p[:, 0], p[:, 1]
    V = np.stack([x * x, x * y, y * y, x, y, np.ones_like(x)], axis=1)
    V = V / np.linalg.norm(V, axis=0)
    sv = np.linalg.svd(V, compute_uv=False)
    return float(sv[-1] / sv[0])


def check_not_conic(c: SupportCurve, tol: float = NON_CONIC_RESIDUAL) -> float:
    r = conic_fit_residual(c)
    if r < tol:
        raise ConicDegenerate(f"curve is a conic (fit residual {r:.3g})")
    return r


def conic_along_curve(c: SupportCurve, conic: Conic, t) -> np.ndarray:
    return conic(c.points(t))


@dataclass(frozen=True)
class ConicContact:
    """Contact of a conic with the curve: multiplicity per component."""

    entries: dict
    arcs: tuple = ()

    @property
    def total(self) -> float:
        return float(sum(self.entries.values())) if self.entries else 0.0

    @property
    def connected(self) -> bool:
        return len(self.arcs) == 1

    def multiplicity_at(self, t: float, tol: float = 1e-6) -> float:
        for loc, m in self.entries.items():
            if abs((loc - t + math.pi) % TWO_PI - math.pi) <= tol:
                return m
        for arc in self.arcs:
            if arc.contains(t, slack=tol):
                return self.entries.get(wrap_angle(arc.midpoint), 0)
        return 0


def conic_contact(c: SupportCurve, conic: Conic, grid: GridProfile | None = None,
                  max_order: int = 6, points=()) -> ConicContact:
    """Contact multiplicities of ``conic`` with the curve.

    The multiplicity at a contact is the order of the first derivative of
    ``t -> Q(gamma(t))`` exceeding ``contact_tol`` times its grid scale;
    agreement through ``max_order`` is reported as ``inf``.  Extra
    ``points`` are always examined (useful for prescribed tangencies).
    """
    grid = grid or c.grid
    q = conic.vector
    tg = grid.points()
    D = monomial_derivatives(c, tg, max_order)
    vals = np.einsum("kin,i->kn", D, q)
    scales = np.max(np.einsum("kin,i->kn", np.abs(D), np.abs(q)), axis=1)
    scale0 = float(np.max(np.abs(vals[0])))

    def gfun(x):
        return conic_along_curve(c, conic, x)

    comps = near_zero_components(gfun, grid.contact_tol, grid, scale=scale0) if scale0 else []

    def order_at(x):
        d = np.einsum("ki,i->k", monomial_derivatives(c, x, max_order)[:, :, 0], q)
        for j in range(max_order + 1):
            if abs(d[j]) > grid.contact_tol * scales[j]:
                return j
        return INF

    entries = {}
    for arc in comps:
        res = minimize_scalar(lambda x: abs(float(gfun(x)[0])),
                              bounds=(arc.start - 2 * grid.step, arc.end + 2 * grid.step),
                              method="bounded", options={"xatol": 1e-14})
        cands = [float(res.x), arc.midpoint]
        cands += [p for p in points if arc.contains(p, slack=2 * grid.step)]
        best = max(cands, key=order_at)
        entries[wrap_angle(best)] = order_at(best)
    return ConicContact(entries, tuple(comps))


@dataclass(frozen=True)
class SextacticRecord:
    """Sextactic point with its osculating conic.

    ``kind`` is ``clean-max`` for an inscribed conic (curve outside it)
    meeting the curve in a connected set, ``clean-min`` for a circumscribed
    one, ``global-*`` without connectedness and ``plain`` otherwise.
    """

    location: Arc
    kind: str
    conic: Conic
    contact: tuple = ()

    @property
    def is_clean(self) -> bool:
        return self.kind.startswith("clean")


def classify_sextactic(c: SupportCurve, t: float, grid: GridProfile | None = None) -> SextacticRecord:
    grid = grid or c.grid
    conic = osculating_conic(c, t)
    tg = grid.points()
    v = conic_along_curve(c, conic, tg)
    scale = float(np.max(np.abs(v)))
    loc = Arc.point(wrap_angle(t))
    if scale == 0.0:
        return SextacticRecord(loc, "global-max", conic, (Arc(0.0, TWO_PI - 1e-12),))
    thr = grid.support_tol * scale
    outside = v.min() >= -thr
    inside = (not outside) and v.max() <= thr
    if not (outside or inside):
        return SextacticRecord(loc, "plain", conic)

    def gfun(x):
        return conic_along_curve(c, conic, x)

    try:
        comps = near_zero_components(gfun, grid.contact_tol, grid, scale=scale)
    except NotOneSided:
        return SextacticRecord(loc, "plain", conic)
    side = "max" if outside else "min"
    kind = ("clean-" if len(comps) == 1 else "global-") + side
    return SextacticRecord(loc, kind, conic, tuple(comps))


def sextactic_scan(c: SupportCurve, grid: GridProfile | None = None) -> list[SextacticRecord]:
    """Zeros of the sextactic indicator, each classified by its osculating conic."""
    grid = grid or c.grid
    if c.h.max_derivative_order < CONIC_ORDER + 1:
        raise DerivativeUnavailable("sextactic scan needs six derivatives of h")
    check_not_conic(c)
    zeros = scan_zeros(lambda x: sextactic_indicator(c, x), grid)
    return [classify_sextactic(c, z.location, grid) for z in zeros]


# ---------------------------------------------------------------- doubly tangent conics


def _line(normal: np.ndarray, point: np.ndarray) -> np.ndarray:
    """Coefficients ``(a, b, c)`` of ``a x + b y + c``."""
    return np.array([normal[0], normal[1], -float(normal @ point)])


def _product(l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    return np.array([a1 * a2, a1 * b2 + a2 * b1, b1 * b2,
                     a1 * c2 + a2 * c1, b1 * c2 + b2 * c1, c1 * c2])


class _Along(PeriodicFunction):
    """``t -> Q(gamma(t))`` for a fixed coefficient vector, with derivatives."""

    def __init__(self, c: SupportCurve, q: np.ndarray):
        self.c, self.q = c, np.asarray(q, dtype=float)
        self.max_derivative_order = c.h.max_derivative_order - 1

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        D = monomial_derivatives(self.c, t, max_order)
        return np.einsum("kin,i->kn", D, self.q)


def doubly_tangent_conic(c: SupportCurve, p: float, q: float,
                         side: str = "inscribed") -> Conic:
    """Extremal conic tangent to the curve at ``p`` and ``q``.

    Works in the pencil ``l_p l_q - lam m^2`` (tangent lines and chord).
    Along the curve both generators are non-negative with double zeros at
    ``p`` and ``q``; ``lam = sup`` of their ratio gives the largest
    inscribed member and ``lam = inf`` the smallest circumscribed one.
    """
    if side not in ("inscribed", "circumscribed"):
        raise ValueError("side must be 'inscribed' or 'circumscribed'")
    p, q = wrap_angle(p), wrap_angle(q)
    if abs((p - q + math.pi) % TWO_PI - math.pi) < 1e-9:
        raise TangentLinesParallel("p and q coincide: the tangent lines agree")
    gp, gq = c.points([p, q])
    ep = np.array([math.cos(p), math.sin(p)])
    eq = np.array([math.cos(q), math.sin(q)])
    lp, lq = _line(ep, gp), _line(eq, gq)
    chord = gq - gp
    m = _line(np.array([-chord[1], chord[0]]), gp)
    A = _product(lp, lq)
    B = _product(m, m)
    contacts = [(p, 2), (q, 2)]
    if side == "inscribed":
        lam, _ = sup_of_ratio(_Along(c, A), _Along(c, B), contacts, c.grid)
    else:
        neg, _ = sup_of_ratio(_Along(c, -A), _Along(c, B), contacts, c.grid)
        lam = -neg
    vec = A - lam * B
    conic = Conic(_outward(c, np.array([p]), vec[:, None])[:, 0])
    tg = c.grid.points()
    v = conic_along_curve(c, conic, tg)
    # generator size guards the case where the curve is itself the conic
    ref = float(np.max(np.abs(_Along(c, A)(tg)) + abs(lam) * np.abs(_Along(c, B)(tg))))
    ref /= float(np.linalg.norm(vec))
    thr = c.grid.support_tol * max(float(np.max(np.abs(v))), 1e-6 * ref)
    ok = v.min() >= -thr if side == "inscribed" else v.max() <= thr
    if not ok:
        raise NotOneSided(f"extremal {side} conic is not one-sided")
    return conic


def conic_residual_slope(c: SupportCurve, t: float,
                         steps=None) -> float:
    """Log-log slope of ``max |Q_t(gamma(t +- d))|`` against ``d``."""
    if steps is None:
        # small enough that a nearby sextactic point's d^6 term stays minor,
        # large enough that the residual sits well above round-off
        steps = np.geomspace(5e-3, 3e-2, 8)
    conic = osculating_conic(c, t)
    steps = np.asarray(steps)
    # both sides: the d^5 term flips sign with d, the d^6 term does not, so
    # the larger side cannot cancel near a sextactic point
    res = np.maximum(np.abs(conic_along_curve(c, conic, t + steps)),
                     np.abs(conic_along_curve(c, conic, t - steps)))
    slope, _ = np.polyfit(np.log(steps), np.log(res), 1)
    return float(slope)
