"""Periodic test functions and the global numeric primitives built on them.

Every function object exposes ``derivatives(t, max_order)`` returning an
array of shape ``(max_order + 1, len(t))`` together with the attributes
``parity`` (``"periodic"`` or ``"antiperiodic"``) and
``max_derivative_order``.  Scans over the circle use a :class:`GridProfile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
import sympy as sp
from scipy.optimize import brentq, minimize_scalar

from .chebyshev import TWO_PI, SpaceDescriptor, TrigPoly, wrap_angle
from .errors import DenominatorVanishesElsewhere, DerivativeUnavailable, NotOneSided


@dataclass(frozen=True)
class GridProfile:
    """Sampling density and tolerance ladder for scans over the circle.

    All tolerances are relative to a function scale (maximum of ``|g|`` on
    the base grid).  ``gap`` is in radians.
    """

    base_samples: int = 4096
    refine_depth: int = 40
    zero_tol: float = 1e-9
    contact_tol: float = 1e-7
    support_tol: float = 1e-8
    gap: float = TWO_PI / 1024

    def __post_init__(self):
        if self.base_samples < 64:
            raise ValueError("base_samples must be at least 64")
        for name in ("zero_tol", "contact_tol", "support_tol", "gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def step(self) -> float:
        return TWO_PI / self.base_samples

    def points(self) -> np.ndarray:
        return np.arange(self.base_samples) * self.step


DEFAULT_GRID = GridProfile()


# ---------------------------------------------------------------- functions


class PeriodicFunction:
    """Base class: value-and-derivative oracle on the circle."""

    parity: str = "periodic"
    max_derivative_order: int = 0

    @property
    def sign(self) -> int:
        return 1 if self.parity == "periodic" else -1

    def derivatives(self, t, max_order: int) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t, order: int = 0):
        scalar = np.ndim(t) == 0
        vals = self.derivatives(np.atleast_1d(np.asarray(t, dtype=float)), order)[order]
        return float(vals[0]) if scalar else vals

    def _check_order(self, max_order: int):
        if max_order > self.max_derivative_order:
            raise DerivativeUnavailable(
                f"{self.describe()} provides derivatives up to order "
                f"{self.max_derivative_order}, {max_order} requested"
            )

    def grid_values(self, samples: int, max_order: int = 0) -> np.ndarray:
        """Derivatives on the uniform grid of ``samples`` points (cached)."""
        return _grid_cache(self, samples, max_order)

    def check_parity(self, probes: int = 32, tol: float = 1e-10) -> bool:
        t = np.linspace(0.0, TWO_PI, probes, endpoint=False) + 0.1234
        a = self(t)
        b = self(t + TWO_PI)
        scale = max(1.0, float(np.max(np.abs(a))))
        return bool(np.all(np.abs(b - self.sign * a) <= tol * scale))

    def describe(self) -> str:
        return type(self).__name__


@lru_cache(maxsize=256)
def _grid_cache(f: PeriodicFunction, samples: int, max_order: int) -> np.ndarray:
    t = np.arange(samples) * (TWO_PI / samples)
    out = f.derivatives(t, max_order)
    out.setflags(write=False)
    return out


class FourierFunction(PeriodicFunction):
    """Finite Fourier series.

    Periodic coefficients are ``a0, a1, b1, a2, b2, ...``; antiperiodic
    ones are ``a_{1/2}, b_{1/2}, a_{3/2}, b_{3/2}, ...``.
    """

    def __init__(self, coeffs: Sequence[float], parity: str = "periodic",
                 max_derivative_order: int = 64):
        coeffs = [float(c) for c in coeffs]
        if parity == "periodic":
            if len(coeffs) % 2 == 0:
                coeffs.append(0.0)
        elif parity == "antiperiodic":
            if len(coeffs) % 2 == 1:
                coeffs.append(0.0)
        else:
            raise ValueError(f"unknown parity {parity!r}")
        self.parity = parity
        self.max_derivative_order = max_derivative_order
        self.poly = TrigPoly(SpaceDescriptor(len(coeffs)), coeffs, max_derivative_order)

    @classmethod
    def from_trigpoly(cls, p: TrigPoly) -> "FourierFunction":
        return cls(p.coeffs, p.parity)

    @property
    def coeffs(self) -> np.ndarray:
        return self.poly.coeffs

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        return self.poly.derivatives(t, max_order)

    def describe(self) -> str:
        return f"fourier[{self.parity}]({', '.join(f'{c:g}' for c in self.coeffs)})"

    def __eq__(self, other):
        return (isinstance(other, FourierFunction) and self.parity == other.parity
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.parity, self.coeffs.tobytes()))


_t = sp.Symbol("t", real=True)


class SymbolicFunction(PeriodicFunction):
    """Closed-form function with exact derivatives generated by sympy."""

    def __init__(self, expr, name: str = "", parity: str = "periodic",
                 max_derivative_order: int = 24):
        expr = sp.sympify(expr)
        free = expr.free_symbols
        if len(free) > 1:
            raise ValueError(f"expression has several free symbols: {sorted(map(str, free))}")
        # differentiate with respect to our own variable whatever the caller named it
        self.expr = expr.subs({s: _t for s in free})
        self.name = name or str(self.expr)
        self.parity = parity
        self.max_derivative_order = max_derivative_order
        self._compiled: list[Callable] = []
        self._exprs: list = []

    def _derivative_fn(self, k: int) -> Callable:
        while len(self._compiled) <= k:
            j = len(self._compiled)
            if j == 0:
                e = self.expr
            else:
                e = sp.diff(self._exprs[-1], _t)
            self._exprs.append(e)
            self._compiled.append(sp.lambdify(_t, e, modules="numpy", cse=True))
        return self._compiled[k]

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        rows = []
        for k in range(max_order + 1):
            v = self._derivative_fn(k)(t)
            rows.append(np.broadcast_to(np.asarray(v, dtype=float), t.shape))
        return np.array(rows)

    def describe(self) -> str:
        return self.name

    def __eq__(self, other):
        return isinstance(other, SymbolicFunction) and self.name == other.name

    def __hash__(self):
        return hash(("sym", self.name))


class PlateauBump(PeriodicFunction):
    """Smooth 0/1 bump built from the ``exp(-1/x)`` mollifier.

    Equal to 0 outside ``[rise, fall_end]``, to 1 on ``[top, fall]``, with
    C-infinity transitions on ``[rise, top]`` and ``[fall, fall_end]``.
    """

    max_derivative_order = 16

    def __init__(self, rise: float, top: float, fall: float, fall_end: float):
        if not rise < top <= fall < fall_end <= rise + TWO_PI:
            raise ValueError("need rise < top <= fall < fall_end <= rise + 2*pi")
        self.rise, self.top, self.fall, self.fall_end = rise, top, fall, fall_end

    @staticmethod
    @lru_cache(maxsize=None)
    def _step_derivative(k: int) -> Callable:
        x = sp.Symbol("x", positive=True)
        f = lambda y: sp.exp(-1 / y)
        step = f(x) / (f(x) + f(1 - x))
        return sp.lambdify(x, sp.diff(step, x, k), modules="numpy", cse=True)

    def _step(self, x: np.ndarray, k: int) -> np.ndarray:
        out = np.zeros_like(x) if k else (x >= 1).astype(float)
        inside = (x > 0.0) & (x < 1.0)
        if np.any(inside):
            with np.errstate(all="ignore"):
                v = np.asarray(self._step_derivative(k)(x[inside]), dtype=float)
            out[inside] = np.nan_to_num(np.broadcast_to(v, x[inside].shape),
                                        nan=0.0, posinf=0.0, neginf=0.0)
        return out

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s = np.mod(t - self.rise, TWO_PI)
        w_up = self.top - self.rise
        w_dn = self.fall_end - self.fall
        x_up = s / w_up
        x_dn = (self.fall_end - self.rise - s) / w_dn
        up = s < (self.top - self.rise)
        dn = s > (self.fall - self.rise)
        rows = []
        for k in range(max_order + 1):
            row = np.zeros_like(t)
            if k == 0:
                row[:] = np.where(s <= self.fall_end - self.rise, 1.0, 0.0)
            row[up] = self._step(x_up[up], k) / w_up**k
            row[dn] = self._step(x_dn[dn], k) * (-1.0 / w_dn) ** k
            rows.append(row)
        return np.array(rows)

    def describe(self) -> str:
        return (f"plateau({self.rise:.6g},{self.top:.6g},{self.fall:.6g},"
                f"{self.fall_end:.6g})")


class ShiftedSum(PeriodicFunction):
    """``u(t) + lam * u(t + shift)``."""

    def __init__(self, u: PeriodicFunction, lam: float, shift: float = math.pi):
        self.u, self.lam, self.shift = u, float(lam), float(shift)
        self.parity = u.parity
        self.max_derivative_order = u.max_derivative_order

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.u.derivatives(t, max_order) + self.lam * self.u.derivatives(t + self.shift, max_order)

    def describe(self) -> str:
        return f"{self.u.describe()} + {self.lam:g}*shift({self.shift:.6g})"


class NegatedFunction(PeriodicFunction):
    def __init__(self, u: PeriodicFunction):
        self.u = u
        self.parity = u.parity
        self.max_derivative_order = u.max_derivative_order

    def derivatives(self, t, max_order: int) -> np.ndarray:
        return -self.u.derivatives(t, max_order)

    def grid_values(self, samples: int, max_order: int = 0) -> np.ndarray:
        return -self.u.grid_values(samples, max_order)

    def describe(self) -> str:
        return f"-({self.u.describe()})"


class DifferenceFunction(PeriodicFunction):
    """``f - g`` for two function-like objects (TrigPoly included)."""

    def __init__(self, f, g):
        self.f, self.g = f, g
        self.parity = getattr(f, "parity", "periodic")
        self.max_derivative_order = min(f.max_derivative_order, g.max_derivative_order)

    def derivatives(self, t, max_order: int) -> np.ndarray:
        return self.f.derivatives(t, max_order) - self.g.derivatives(t, max_order)

    def grid_values(self, samples: int, max_order: int = 0) -> np.ndarray:
        return _grid_of(self.f, samples, max_order) - _grid_of(self.g, samples, max_order)


def _grid_of(f, samples: int, max_order: int) -> np.ndarray:
    if isinstance(f, PeriodicFunction):
        return f.grid_values(samples, max_order)
    return f.derivatives(np.arange(samples) * (TWO_PI / samples), max_order)


class CallableFunction(PeriodicFunction):
    """Plain vectorised callable without derivative information."""

    def __init__(self, fn: Callable, parity: str = "periodic"):
        self.fn = fn
        self.parity = parity
        self.max_derivative_order = 0

    def derivatives(self, t, max_order: int) -> np.ndarray:
        self._check_order(max_order)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.atleast_2d(np.broadcast_to(np.asarray(self.fn(t), dtype=float), t.shape))


def as_function(f) -> PeriodicFunction:
    if isinstance(f, PeriodicFunction):
        return f
    if isinstance(f, TrigPoly):
        return FourierFunction.from_trigpoly(f)
    if callable(f):
        return CallableFunction(f)
    raise TypeError(f"cannot interpret {f!r} as a periodic function")


def section2_example(lam: float) -> ShiftedSum:
    """Plateau family ``u(t) + lam*u(t+pi)`` with ``u = 1`` on ``[2pi/5, 3pi/5]``."""
    u = PlateauBump(math.pi / 5, 2 * math.pi / 5, 3 * math.pi / 5, 4 * math.pi / 5)
    return ShiftedSum(u, lam, math.pi)


def catalog(name: str, n: int = 1, **params) -> PeriodicFunction:
    """Named closed-form test functions.

    ``sharp``: ``sin((n+1)t)``; ``sharp_half``: ``sin((2n+1)t/2)``
    (antiperiodic); ``expcos``: ``exp(a cos t)``; ``ellipse``: support
    function ``sqrt(a^2 cos^2 t + b^2 sin^2 t)``; ``trefoil``:
    ``1 + eps cos 3t``; ``oval``: ``1 + eps cos 2t``; ``plateau``: the
    plateau family with parameter ``lam``.
    """
    if name == "sharp":
        k = int(params.get("k", n + 1))
        coeffs = [0.0] * (2 * k + 1)
        coeffs[2 * k] = 1.0
        return FourierFunction(coeffs)
    if name == "sharp_half":
        k = int(params.get("k", n + 1))
        coeffs = [0.0] * (2 * k)
        coeffs[2 * k - 1] = 1.0
        return FourierFunction(coeffs, "antiperiodic")
    if name == "expcos":
        a = float(params.get("a", 1.0))
        return SymbolicFunction(sp.exp(a * sp.cos(_t)), name=f"expcos(a={a:g})")
    if name == "ellipse":
        a = float(params.get("a", 2.0))
        b = float(params.get("b", 1.0))
        return SymbolicFunction(sp.sqrt(a**2 * sp.cos(_t) ** 2 + b**2 * sp.sin(_t) ** 2),
                                name=f"ellipse(a={a:g},b={b:g})")
    if name == "trefoil":
        eps = float(params.get("eps", 0.05))
        return FourierFunction([1.0, 0, 0, 0, 0, eps, 0])
    if name == "oval":
        eps = float(params.get("eps", 0.1))
        return FourierFunction([1.0, 0, 0, eps, 0])
    if name == "plateau":
        return section2_example(float(params.get("lam", 0.5)))
    raise KeyError(f"unknown catalog function {name!r}")


CATALOG_NAMES = ("sharp", "sharp_half", "expcos", "ellipse", "trefoil", "oval", "plateau")


def evaluate_with_derivatives(u: PeriodicFunction, t: float, max_order: int) -> np.ndarray:
    """Value and derivatives ``0..max_order`` of ``u`` at a single angle."""
    return u.derivatives(np.array([float(t)]), max_order)[:, 0]


# ---------------------------------------------------------------- arcs


@dataclass(frozen=True)
class Arc:
    """Closed arc ``[start, end]`` on the circle, lifted so ``start <= end``."""

    start: float
    end: float

    def __post_init__(self):
        s = wrap_angle(self.start)
        e = s + (self.end - self.start)
        if e < s or e - s >= TWO_PI:
            raise ValueError(f"invalid arc [{self.start}, {self.end}]")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @classmethod
    def point(cls, t: float) -> "Arc":
        t = wrap_angle(t)
        return cls(t, t)

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def is_point(self) -> bool:
        return self.length == 0.0

    @property
    def midpoint(self) -> float:
        return wrap_angle(0.5 * (self.start + self.end))

    def contains(self, t: float, slack: float = 0.0) -> bool:
        d = (t - self.start + slack) % TWO_PI
        return d <= self.length + 2 * slack

    def distance(self, t: float) -> float:
        """Circular distance from ``t`` to the arc."""
        if self.contains(t):
            return 0.0
        return min(circular_distance(t, self.start), circular_distance(t, self.end))


def circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _merge_arcs(arcs: list[tuple[float, float]], gap: float) -> list[Arc]:
    """Merge lifted intervals (start in [0, 2pi)) whose gaps are below ``gap``."""
    if not arcs:
        return []
    arcs = sorted(arcs)
    merged = [list(arcs[0])]
    for s, e in arcs[1:]:
        if s - merged[-1][1] < gap:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    # wrap-around merge
    if len(merged) > 1 and merged[0][0] + TWO_PI - merged[-1][1] < gap:
        last = merged.pop()
        merged[0] = [last[0], max(merged[0][1] + TWO_PI, last[1])]
    out = []
    for s, e in merged:
        if e - s >= TWO_PI - gap:
            e = s + TWO_PI - 1e-12
        out.append(Arc(s, e))
    return sorted(out, key=lambda a: a.start)


# ---------------------------------------------------------------- zeros


def bracketed_root(f: Callable[[float], float], a: float, b: float,
                   maxiter: int = 100) -> float | None:
    """Brent root of ``f`` on ``[a, b]``; ``None`` when the bracket is not valid."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0 or not (np.isfinite(fa) and np.isfinite(fb)):
        return None
    return brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=maxiter)


class Zero(NamedTuple):
    location: float
    tangential: bool


def _as_scalar_fn(g):
    if isinstance(g, PeriodicFunction) or isinstance(g, TrigPoly):
        return lambda t: g.derivatives(np.atleast_1d(t), 0)[0]
    return g


def _eval1(g, t: float) -> float:
    return float(np.atleast_1d(g(np.array([t])))[0])


def scan_zeros(g, grid: GridProfile = DEFAULT_GRID, parity: int = 1,
               scale: float | None = None) -> list[Zero]:
    """Zeros of ``g`` on ``[0, 2*pi)`` with a tangency flag.

    Sign changes on the base grid are refined with Brent's method; local
    minima of ``|g|`` without a sign change are refined by bounded
    minimisation and kept when ``|g| < zero_tol * scale``.
    """
    g = _as_scalar_fn(g)
    t = grid.points()
    v = np.asarray(g(t), dtype=float)
    if scale is None:
        scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return []
    h = grid.step
    v_next = np.append(v[1:], parity * v[0])
    found: list[Zero] = []

    change = v * v_next < 0
    t_next = np.append(t[1:], TWO_PI)
    for i in np.nonzero(change)[0]:
        # None when pointwise and vectorised evaluation disagree (noise level)
        r = bracketed_root(lambda x: _eval1(g, x), t[i], t_next[i],
                           maxiter=max(100, grid.refine_depth))
        if r is None:
            # the sign flip sits on a grid node at round-off level
            j = i if abs(v[i]) <= abs(v_next[i]) else i + 1
            if min(abs(v[i]), abs(v_next[i])) <= grid.zero_tol * scale:
                r = t[j] if j < len(t) else TWO_PI
        if r is not None:
            found.append(Zero(wrap_angle(r), False))

    absv = np.abs(v)
    prev = np.roll(absv, 1)
    nxt = np.roll(absv, -1)
    near_change = change | np.roll(change, 1)
    cand = (absv <= prev) & (absv <= nxt) & ~near_change & (absv < 1e-3 * scale)
    for i in np.nonzero(cand)[0]:
        if v[i] == 0.0:
            found.append(Zero(wrap_angle(t[i]), True))
            continue
        res = minimize_scalar(lambda x: abs(_eval1(g, x)), bounds=(t[i] - h, t[i] + h),
                              method="bounded", options={"xatol": 1e-13})
        if abs(res.fun) < grid.zero_tol * scale:
            found.append(Zero(wrap_angle(res.x), True))
    # exact zeros on grid points flanked by a sign change are already bracketed
    for i in np.nonzero((v == 0.0) & near_change)[0]:
        found.append(Zero(wrap_angle(t[i]), False))

    found.sort()
    out: list[Zero] = []
    for z in found:
        if out and circular_distance(z.location, out[-1].location) < 1e-10:
            continue
        out.append(z)
    if len(out) > 1 and circular_distance(out[0].location, out[-1].location) < 1e-10:
        out.pop()
    return out


def find_zeros(g, grid: GridProfile = DEFAULT_GRID, parity: int = 1) -> list[float]:
    """Locations of the zeros of ``g`` on ``[0, 2*pi)``, sorted."""
    return [z.location for z in scan_zeros(g, grid, parity)]


def near_zero_components(g, eps: float, grid: GridProfile = DEFAULT_GRID,
                         scale: float | None = None) -> list[Arc]:
    """Maximal arcs where ``|g| <= eps * scale`` for a one-sided ``g``.

    Isolated touching points between grid nodes are caught by refining
    every local minimum of ``|g|``.  Arcs closer than ``grid.gap`` merge.
    """
    g = _as_scalar_fn(g)
    t = grid.points()
    v = np.asarray(g(t), dtype=float)
    if scale is None:
        scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return [Arc(0.0, TWO_PI - 1e-12)]
    thr = eps * scale
    if v.min() < -thr and v.max() > thr:
        raise NotOneSided(f"function takes values in [{v.min():.3g}, {v.max():.3g}]")
    h = grid.step
    mask = np.abs(v) <= thr

    intervals: list[tuple[float, float]] = []
    n = len(v)
    if mask.all():
        return [Arc(0.0, TWO_PI - 1e-12)]
    if mask.any():
        # rotate so index 0 is outside the mask, then collect runs
        off = int(np.argmin(mask))
        idx = (np.arange(n) + off) % n
        m = mask[idx]
        i = 0
        while i < n:
            if m[i]:
                j = i
                while j + 1 < n and m[j + 1]:
                    j += 1
                s = t[idx[i]]
                intervals.append((s, s + (j - i) * h))
                i = j + 1
            else:
                i += 1

    absv = np.abs(v)
    prev = np.roll(absv, 1)
    nxt = np.roll(absv, -1)
    cand = (absv <= prev) & (absv <= nxt) & ~mask & (absv < 1e-2 * scale)
    for i in np.nonzero(cand)[0]:
        res = minimize_scalar(lambda x: abs(_eval1(g, x)), bounds=(t[i] - h, t[i] + h),
                              method="bounded", options={"xatol": 1e-13})
        if abs(res.fun) <= thr:
            x = wrap_angle(res.x)
            intervals.append((x, x))
    return _merge_arcs(intervals, grid.gap)


# ---------------------------------------------------------------- sup of ratio


def _taylor_ratio(num_d: np.ndarray, den_d: np.ndarray, k: int, delta: np.ndarray) -> np.ndarray:
    """Ratio of Taylor series about a common zero of order ``k``."""
    K = min(len(num_d), len(den_d)) - 1 - k
    j = np.arange(K + 1)
    fact = np.array([math.factorial(k + i) for i in j], dtype=float)
    a = num_d[k:k + K + 1] / fact
    b = den_d[k:k + K + 1] / fact
    powers = delta[:, None] ** j[None, :]
    return (powers @ a) / (powers @ b)


def sup_of_ratio(num, den, contact_points: Sequence[tuple[float, int]] = (),
                 grid: GridProfile = DEFAULT_GRID, taylor_radius: float = 0.1,
                 taylor_terms: int = 14) -> tuple[float, float]:
    """Supremum over the circle of ``num/den`` and a point where it is attained.

    ``den`` must be non-negative and vanish only at ``contact_points``,
    given as ``(location, vanishing_order)``; ``num`` vanishes there to at
    least the same order.  Near a contact point the ratio is evaluated from
    Taylor coefficients (ratio of leading derivatives at the point itself).
    Without derivative information the neighbourhood of radius 1e-3 is
    excluded and the ratio is extrapolated linearly.
    """
    num = as_function(num)
    den = as_function(den)
    contacts = [(wrap_angle(p), int(k)) for p, k in contact_points]
    avail = min(num.max_derivative_order, den.max_derivative_order)
    analytic = all(avail >= k for _, k in contacts)
    radius = taylor_radius if analytic else 1e-3

    series = []
    for p, k in contacts:
        if analytic:
            top = min(avail, k + taylor_terms)
            series.append((num.derivatives(np.array([p]), top)[:, 0],
                           den.derivatives(np.array([p]), top)[:, 0]))
        else:
            series.append(None)

    t = grid.points()
    den_scale = float(np.max(np.abs(_grid_of(den, grid.base_samples, 0)[0])))
    if den_scale == 0.0:
        raise DenominatorVanishesElsewhere("denominator vanishes identically")

    def ratio(x: np.ndarray, on_grid: bool = False) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(x.shape, np.nan)
        owner = np.full(x.shape, -1)
        best = np.full(x.shape, np.inf)
        for ci, (p, _) in enumerate(contacts):
            d = np.abs((x - p + math.pi) % TWO_PI - math.pi)
            sel = (d < radius) & (d < best)
            owner[sel] = ci
            best[sel] = d[sel]
        far = owner < 0
        if np.any(far):
            if on_grid:
                nv = _grid_of(num, grid.base_samples, 0)[0][far]
                dv = _grid_of(den, grid.base_samples, 0)[0][far]
            else:
                nv = num(x[far])
                dv = den(x[far])
            if np.any(dv <= 1e-13 * den_scale):
                bad = x[far][np.argmin(dv)]
                raise DenominatorVanishesElsewhere(
                    f"denominator vanishes at t={bad:.6g}, not a listed contact point")
            out[far] = nv / dv
        for ci, (p, k) in enumerate(contacts):
            sel = owner == ci
            if not np.any(sel) or series[ci] is None:
                continue
            delta = (x[sel] - p + math.pi) % TWO_PI - math.pi
            out[sel] = _taylor_ratio(series[ci][0], series[ci][1], k, delta)
        return out

    vals = ratio(t, on_grid=True)
    extra_t, extra_v = [], []
    for ci, (p, k) in enumerate(contacts):
        if series[ci] is not None:
            extra_t.append(p)
            extra_v.append(float(ratio(np.array([p]))[0]))
        else:
            # linear extrapolation from both sides
            side = []
            for sgn in (-1.0, 1.0):
                x1, x2 = p + sgn * 2 * radius, p + sgn * 3 * radius
                r1 = float(num(x1)) / float(den(x1))
                r2 = float(num(x2)) / float(den(x2))
                side.append(3 * r1 - 2 * r2)
            extra_t.append(p)
            extra_v.append(float(np.mean(side)))
    finite = np.isfinite(vals)
    if not np.any(finite) and not extra_v:
        return 0.0, 0.0

    h = grid.step
    cand = []
    v = np.where(finite, vals, -np.inf)
    local = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1)) & finite
    order = np.argsort(-v[local])[:6]
    for i in np.nonzero(local)[0][order]:
        f = lambda x: -float(ratio(np.array([x]))[0])
        res = minimize_scalar(f, bounds=(t[i] - h, t[i] + h), method="bounded",
                              options={"xatol": 1e-13})
        val = -res.fun if np.isfinite(res.fun) else -np.inf
        if val >= v[i]:
            cand.append((val, wrap_angle(res.x)))
        else:
            cand.append((float(v[i]), float(t[i])))
    cand.extend(zip(extra_v, extra_t))
    if not cand:
        i = int(np.nanargmax(v))
        return float(v[i]), float(t[i])
    best_v, best_t = max(cand, key=lambda c: c[0])
    return float(best_v), float(best_t)
