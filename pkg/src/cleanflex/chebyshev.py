"""Trigonometric Chebyshev spaces.

Two families are supported:

* periodic spaces of odd order ``2k+1`` spanned by
  ``1, cos t, sin t, ..., cos kt, sin kt``;
* antiperiodic spaces of even order ``2k`` spanned by
  ``cos((2j-1)t/2), sin((2j-1)t/2)`` for ``j = 1..k``.

Every element is a finite sum ``sum_j c_j cos(w_j t - phase_j)`` with
``phase_j`` equal to ``0`` (cosine) or ``pi/2`` (sine), so derivatives are
exact: differentiating ``m`` times multiplies by ``w_j**m`` and shifts the
phase by ``m*pi/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DerivativeUnavailable, DimensionMismatch, IllConditioned, ZeroPolynomial

TWO_PI = 2.0 * math.pi

CONDITION_LIMIT = 1e12


def wrap_angle(t: float) -> float:
    """Reduce ``t`` to ``[0, 2*pi)``, snapping values within 1e-13 of ``2*pi`` to 0."""
    r = float(t) % TWO_PI
    return 0.0 if TWO_PI - r < 1e-13 else r


@dataclass(frozen=True)
class SpaceDescriptor:
    """A trigonometric Chebyshev space identified by its order."""

    order: int

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")

    @classmethod
    def trig(cls, n: int) -> "SpaceDescriptor":
        """Periodic space of trigonometric polynomials of degree ``n``."""
        return cls(2 * n + 1)

    @property
    def periodic(self) -> bool:
        return self.order % 2 == 1

    @property
    def parity(self) -> str:
        return "periodic" if self.periodic else "antiperiodic"

    @property
    def sign(self) -> int:
        """Factor picked up by members under ``t -> t + 2*pi``."""
        return 1 if self.periodic else -1

    @property
    def degree(self) -> int:
        """Number of cos/sin pairs."""
        return self.order // 2

    @cached_property
    def frequencies(self) -> np.ndarray:
        if self.periodic:
            freqs = [0.0] + [float(j) for j in range(1, self.degree + 1) for _ in (0, 1)]
        else:
            freqs = [(2 * j - 1) / 2.0 for j in range(1, self.degree + 1) for _ in (0, 1)]
        return np.array(freqs)

    @cached_property
    def phases(self) -> np.ndarray:
        if self.periodic:
            ph = [0.0] + [0.0, math.pi / 2] * self.degree
        else:
            ph = [0.0, math.pi / 2] * self.degree
        return np.array(ph)

    @property
    def max_frequency(self) -> float:
        return float(self.frequencies[-1])

    def basis_derivatives(self, t, m: int = 0) -> np.ndarray:
        """Matrix of ``m``-th derivatives of the basis, shape ``(len(t), order)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = self.frequencies
        arg = np.outer(t, w) - self.phases + m * math.pi / 2
        return np.cos(arg) * w**m

    def basis_labels(self) -> list[str]:
        labels = []
        for w, ph in zip(self.frequencies, self.phases):
            if w == 0:
                labels.append("1")
            else:
                labels.append(("sin" if ph else "cos") + f"({w:g}t)")
        return labels


@dataclass(frozen=True)
class TrigPoly:
    """Element of a trigonometric Chebyshev space.

    Coefficients follow the basis order of :class:`SpaceDescriptor`:
    constant first (periodic case), then cos/sin pairs by frequency.
    """

    space: SpaceDescriptor
    coeffs: np.ndarray
    max_derivative_order: int = field(default=-1, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size != self.space.order:
            raise DimensionMismatch(
                f"expected {self.space.order} coefficients, got {c.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.max_derivative_order < 0:
            # derivatives are exact rotations, so any order is available
            object.__setattr__(self, "max_derivative_order", max(64, 2 * self.space.order))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float], **kw) -> "TrigPoly":
        return cls(SpaceDescriptor(len(coeffs)), np.asarray(coeffs, dtype=float), **kw)

    @property
    def parity(self) -> str:
        return self.space.parity

    def __call__(self, t, order: int = 0):
        return evaluate(self, t, order)

    def derivatives(self, t, max_order: int) -> np.ndarray:
        """Values and derivatives ``0..max_order``; shape ``(max_order+1, len(t))``."""
        if max_order > self.max_derivative_order:
            raise DerivativeUnavailable(
                f"derivative order {max_order} exceeds {self.max_derivative_order}"
            )
        t = np.atleast_1d(np.asarray(t, dtype=float))
        arg = np.multiply.outer(t, self.space.frequencies) - self.space.phases
        c, s = np.cos(arg).T, np.sin(arg).T
        M = self._scaled_coeffs[:max_order + 1]
        # D^m cos(x) = cos(x + m pi/2) cycles through cos, -sin, -cos, sin
        out = np.empty((max_order + 1, t.size))
        out[0::4] = M[0::4] @ c
        out[1::4] = -(M[1::4] @ s)
        out[2::4] = -(M[2::4] @ c)
        out[3::4] = M[3::4] @ s
        return out

    @cached_property
    def _scaled_coeffs(self) -> np.ndarray:
        w = self.space.frequencies
        return self.coeffs[None, :] * w[None, :] ** np.arange(self.max_derivative_order + 1)[:, None]

    def derivative(self, m: int = 1) -> "TrigPoly":
        """Exact ``m``-th derivative as a member of the same space."""
        c = np.zeros_like(self.coeffs)
        w = self.space.frequencies
        # pairs (cos, sin) rotate: D cos = -w sin, D sin = w cos
        start = 1 if self.space.periodic else 0
        for i in range(start, self.space.order, 2):
            a, b = self.coeffs[i], self.coeffs[i + 1]
            ang = m * math.pi / 2
            scale = w[i] ** m
            # a cos + b sin = R cos(wt - phi); derivative shifts phi by -m*pi/2
            c[i] = scale * (a * math.cos(ang) + b * math.sin(ang))
            c[i + 1] = scale * (b * math.cos(ang) - a * math.sin(ang))
        if self.space.periodic and m == 0:
            c[0] = self.coeffs[0]
        return TrigPoly(self.space, c, self.max_derivative_order)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if other.space != self.space:
            raise DimensionMismatch("cannot add members of different spaces")
        return TrigPoly(self.space, self.coeffs + other.coeffs, self.max_derivative_order)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> "TrigPoly":
        return TrigPoly(self.space, factor * self.coeffs, self.max_derivative_order)

    def grid_scale(self, samples: int = 512) -> float:
        t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        return float(np.max(np.abs(self(t))))

    def __str__(self):
        terms = [f"{c:+.6g}*{lab}" for c, lab in zip(self.coeffs, self.space.basis_labels())
                 if c != 0]
        return " ".join(terms) if terms else "0"


def evaluate(p: TrigPoly, t, order: int = 0):
    """Exact ``order``-th derivative of ``p`` at ``t`` (scalar or array)."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if order > p.max_derivative_order:
        raise DerivativeUnavailable(
            f"derivative order {order} exceeds {p.max_derivative_order}"
        )
    scalar = np.ndim(t) == 0
    vals = p.space.basis_derivatives(t, order) @ p.coeffs
    return float(vals[0]) if scalar else vals


@dataclass(frozen=True)
class HermiteData:
    """Confluent interpolation data.

    ``nodes`` is a sequence of ``(location, multiplicity)``; ``values`` holds,
    node by node, the prescribed derivatives of orders ``0..multiplicity-1``.
    """

    nodes: tuple
    values: np.ndarray

    def __post_init__(self):
        nodes = tuple((float(t), int(mu)) for t, mu in self.nodes)
        if any(mu < 1 for _, mu in nodes):
            raise ValueError("node multiplicities must be >= 1")
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size != sum(mu for _, mu in nodes):
            raise DimensionMismatch(
                f"{vals.size} values given for total multiplicity "
                f"{sum(mu for _, mu in nodes)}"
            )
        locs = sorted(t % TWO_PI for t, _ in nodes)
        for a, b in zip(locs, locs[1:] + [locs[0] + TWO_PI]):
            if len(locs) > 1 and abs(b - a) < 1e-14:
                raise ValueError("node locations must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", vals)

    @property
    def total_multiplicity(self) -> int:
        return sum(mu for _, mu in self.nodes)

    @classmethod
    def sample(cls, f, nodes) -> "HermiteData":
        """Build data by sampling ``f.derivatives`` at the given nodes."""
        vals = []
        for t, mu in nodes:
            d = f.derivatives(np.array([t]), mu - 1)[:, 0]
            vals.extend(d)
        return cls(tuple(nodes), np.array(vals))


def hermite_matrix(space: SpaceDescriptor, nodes) -> tuple[np.ndarray, np.ndarray]:
    """Row-scaled confluent collocation matrix and the row scale factors.

    Row for derivative ``k`` is divided by ``max(1, w_max**k)``.
    """
    rows, scales = [], []
    wmax = space.max_frequency
    for t, mu in nodes:
        for k in range(mu):
            s = 1.0 / max(1.0, wmax**k)
            rows.append(space.basis_derivatives([t], k)[0] * s)
            scales.append(s)
    return np.array(rows).reshape(len(rows), space.order), np.array(scales)


def hermite_interpolate(space: SpaceDescriptor, data: HermiteData,
                        condition_limit: float = CONDITION_LIMIT) -> TrigPoly:
    """Unique member of ``space`` matching all prescribed derivatives."""
    if data.total_multiplicity != space.order:
        raise DimensionMismatch(
            f"total multiplicity {data.total_multiplicity} != order {space.order}"
        )
    A, scales = hermite_matrix(space, data.nodes)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > condition_limit:
        raise IllConditioned(f"confluent system condition {cond:.3g}", condition=cond)
    b = data.values * scales
    lu = scipy.linalg.lu_factor(A)
    x = scipy.linalg.lu_solve(lu, b)
    # one refinement step with the residual in extended precision
    r = b.astype(np.longdouble) - A.astype(np.longdouble) @ x.astype(np.longdouble)
    x = x + scipy.linalg.lu_solve(lu, r.astype(float))
    return TrigPoly(space, x)


def _derivative_scales(p: TrigPoly, max_order: int, samples: int = 512) -> np.ndarray:
    t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    d = p.derivatives(t, max_order)
    return np.max(np.abs(d), axis=1)


def count_zeros(p: TrigPoly, tol: float = 1e-9) -> list[tuple[float, int]]:
    """Zeros of ``p`` on ``[0, 2*pi)`` with multiplicities.

    Candidate locations come from the roots of the associated algebraic
    polynomial in ``w = exp(i*t)`` (or ``exp(i*t/2)`` for antiperiodic
    spaces). Each candidate is polished and its multiplicity taken as the
    order of the first derivative exceeding ``tol`` times that derivative's
    grid maximum.
    """
    space = p.space
    if np.linalg.norm(p.coeffs) <= tol:
        raise ZeroPolynomial("polynomial is identically zero")
    # integer exponents e_j = w_j / base
    base = 1.0 if space.periodic else 0.5
    expo = np.rint(space.frequencies / base).astype(int)
    M = int(expo.max())
    poly = np.zeros(2 * M + 1, dtype=complex)  # ascending powers of w
    start = 0
    if space.periodic:
        poly[M] += p.coeffs[0]
        start = 1
    for i in range(start, space.order, 2):
        e = expo[i]
        a, b = p.coeffs[i], p.coeffs[i + 1]
        poly[M + e] += 0.5 * (a - 1j * b)
        poly[M - e] += 0.5 * (a + 1j * b)
    big = np.max(np.abs(poly))
    nz = np.nonzero(np.abs(poly) > 1e-14 * big)[0]
    poly = poly[nz[0]:nz[-1] + 1]
    if poly.size < 2:
        return []
    roots = np.roots(poly[::-1])
    near = roots[np.abs(np.abs(roots) - 1.0) < 0.05]
    theta = np.mod(np.angle(near), 2 * math.pi)
    if not space.periodic:
        theta = theta[theta < math.pi - 1e-15]
    ts = np.sort(theta / base)
    if ts.size == 0:
        return []

    # cluster candidate angles; multiple zeros split by ~eps**(1/m)
    clusters: list[list[float]] = [[ts[0]]]
    for t in ts[1:]:
        if t - clusters[-1][-1] < 1e-2:
            clusters[-1].append(t)
        else:
            clusters.append([t])
    if len(clusters) > 1 and ts[0] + TWO_PI - clusters[-1][-1] < 1e-2:
        clusters[0] = [t - TWO_PI for t in clusters[-1]] + clusters[0]
        clusters.pop()

    scales = _derivative_scales(p, space.order)
    out = []
    for cl in clusters:
        m = len(cl)
        t0 = float(np.mean(cl))
        dp = p.derivative(m - 1)
        d2 = p.derivative(m)
        for _ in range(6):
            f1 = evaluate(dp, t0)
            f2 = evaluate(d2, t0)
            if f2 == 0:
                break
            step = f1 / f2
            if abs(step) > 1e-2:
                break
            t0 -= step
        d = p.derivatives(np.array([t0]), space.order)[:, 0]
        if abs(d[0]) > tol * scales[0]:
            continue
        mult = space.order
        for j in range(1, space.order + 1):
            if abs(d[j]) > tol * scales[j]:
                mult = j
                break
        out.append((wrap_angle(t0), mult))
    out.sort()
    return out


@dataclass(frozen=True)
class DisconjugateOperator:
    """Constant-coefficient operator whose kernel is ``space``.

    ``coefficients[i]`` multiplies ``D**i``; the leading coefficient is 1.
    """

    space: SpaceDescriptor

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def factors(self) -> list[float]:
        """The ``w`` of each ``D**2 + w**2`` factor (plus a bare ``D`` if periodic)."""
        if self.space.periodic:
            return [float(k) for k in range(1, self.space.degree + 1)]
        return [(2 * j - 1) / 2.0 for j in range(1, self.space.degree + 1)]

    @property
    def coefficients(self) -> np.ndarray:
        P = np.polynomial.polynomial
        c = np.array([0.0, 1.0]) if self.space.periodic else np.array([1.0])
        for w in self.factors:
            c = P.polymul(c, [w * w, 0.0, 1.0])
        return c

    def describe(self) -> str:
        parts = ["D"] if self.space.periodic else []
        parts += [f"(D^2+{w * w:g})" for w in self.factors]
        return "".join(parts)


def disconjugate_operator(space: SpaceDescriptor) -> DisconjugateOperator:
    return DisconjugateOperator(space)


def apply_disconjugate(op: DisconjugateOperator, u, t):
    """``sum_i c_i u^(i)(t)`` for the expanded operator.

    ``u`` is anything exposing ``derivatives(t, max_order)`` and
    ``max_derivative_order``.
    """
    if getattr(u, "max_derivative_order", op.order) < op.order:
        raise DerivativeUnavailable(
            f"operator of order {op.order} needs derivatives up to {op.order}"
        )
    scalar = np.ndim(t) == 0
    d = u.derivatives(np.atleast_1d(np.asarray(t, dtype=float)), op.order)
    vals = op.coefficients @ d
    return float(vals[0]) if scalar else vals


def operator_scale(op: DisconjugateOperator, u, t) -> np.ndarray:
    """Pointwise ``sum_i |c_i u^(i)(t)|``; the natural size of ``L u`` at ``t``."""
    d = u.derivatives(np.atleast_1d(np.asarray(t, dtype=float)), op.order)
    return np.abs(op.coefficients) @ np.abs(d)
