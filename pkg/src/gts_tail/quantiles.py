"""Quantiles from a tabulated CDF via a local degree-4 polynomial equation.

For a level alpha bracketed by table nodes x_i < x_alpha < x_{i+1}, the CDF
restricted to the five nearest nodes is represented exactly by its Lagrange
interpolant of degree 4 in the normalized coordinate y = (x - x_i)/dx.  The
quantile is the root in (0,1) of

    b0 + b1*y + b2*y**2 + b3*y**3 + b4*y**4 = 0

with b the interpolant's coefficients shifted by alpha, and

    x_alpha = x_i + y * (x_{i+1} - x_i).

Inverse-CDF sampling reuses the same root solve on seeded uniforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketFailure,
    MultipleRootsWarning,
    NoBracket,
    OutOfRange,
)
from .returns_io import ReturnSeries
from .spectral import CdfTable

__all__ = ["QuarticCoeffs", "solve_quartic_unit", "quantile", "sample"]

_LEVEL_MARGIN = 1e-9
_RESIDUAL_TOL = 1e-12

# Inverse Vandermonde matrices mapping 5 stencil values to monomial
# coefficients in y, one per stencil offset.  Offset o means the stencil
# nodes sit at y = o, o+1, .., o+4 with the bracket always at [0, 1], so
# o = -2 is the centered stencil and o in {0, -1, -3} covers grid edges.
_STENCILS = {}
for _o in (0, -1, -2, -3):
    _nodes = np.arange(_o, _o + 5, dtype=float)
    _V = np.vander(_nodes, 5, increasing=True)
    _STENCILS[_o] = np.linalg.inv(_V)
del _o, _nodes, _V


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients b0..b4 of b0 + b1 y + ... + b4 y**4."""

    b0: float
    b1: float
    b2: float
    b3: float
    b4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2, self.b3, self.b4])


def _poly_val(c: np.ndarray, y: float) -> float:
    # Horner, ascending coefficients.
    acc = 0.0
    for v in c[::-1]:
        acc = acc * y + v
    return acc


def _deriv_val(c, y: float) -> float:
    return ((4.0 * c[4] * y + 3.0 * c[3]) * y + 2.0 * c[2]) * y + c[1]


def _newton_bisect(c, seed: float, p0: float) -> float:
    """Safeguarded Newton on [0,1] with a guaranteed sign-change bracket."""
    lo, hi = 0.0, 1.0
    flo = p0
    y = seed
    for _ in range(200):
        py = _poly_val(c, y)
        if abs(py) <= _RESIDUAL_TOL:
            return float(y)
        if (py > 0.0) == (flo > 0.0):
            lo, flo = y, py
        else:
            hi = y
        d = _deriv_val(c, y)
        y_next = 0.5 * (lo + hi)
        if d != 0.0:
            cand = y - py / d
            if lo < cand < hi:
                y_next = cand
        y = y_next
    py = _poly_val(c, y)
    if abs(py) <= 1e-10:
        return float(y)
    raise NoBracket(f"root polish stalled at residual {py:.3e}")


def solve_quartic_unit(b: QuarticCoeffs) -> float:
    """Root of the quartic in (0, 1), given a sign change across the interval.

    Safeguarded Newton from the secant seed, falling back to bisection
    whenever an iterate leaves the bracket; terminates at |poly(y)| <= 1e-12.
    If the derivative changes sign more than once inside (0,1) the
    polynomial may cross several times (an interpolation artifact when the
    underlying CDF is monotone); the root nearest the straight-line seed is
    then chosen and a MultipleRootsWarning is emitted.
    """
    c = b.as_array()
    p0 = _poly_val(c, 0.0)
    p1 = _poly_val(c, 1.0)
    if p0 == 0.0:
        return 0.0
    if p1 == 0.0:
        return 1.0
    if (p0 > 0.0) == (p1 > 0.0):
        raise NoBracket(f"no sign change on [0,1]: p(0)={p0:.3e}, p(1)={p1:.3e}")

    denom = p1 - p0
    seed = min(max(-p0 / denom, 1e-12), 1.0 - 1e-12) if denom != 0.0 else 0.5

    # Wiggle sniff: more than one derivative sign change on a coarse scan
    # means the crossing may not be unique.
    dvals = [_deriv_val(c, t) for t in (0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0)]
    changes = sum(
        1 for a, b_ in zip(dvals, dvals[1:]) if a != 0.0 and b_ != 0.0 and (a > 0) != (b_ > 0)
    )
    if changes >= 2:
        roots = np.roots(c[::-1])
        real = roots[np.abs(roots.imag) < 1e-9].real
        inside = np.sort(real[(real > 0.0) & (real < 1.0)])
        if inside.size > 1:
            warnings.warn(
                f"{inside.size} candidate roots in (0,1); choosing nearest to the linear seed",
                MultipleRootsWarning,
                stacklevel=2,
            )
            seed = float(inside[np.argmin(np.abs(inside - seed))])
        elif inside.size == 1:
            seed = float(inside[0])

    return _newton_bisect(c, seed, p0)


def _bracket_index(values: np.ndarray, alpha: float) -> int:
    i = int(np.searchsorted(values, alpha, side="right") - 1)
    return min(max(i, 0), values.shape[0] - 2)


def quantile(table: CdfTable, alpha: float) -> float:
    """alpha-quantile of the tabulated law.

    Levels must lie strictly inside the tabulated mass; the bracket is found
    by binary search and refined by the degree-4 root solve.  Exact node hits
    return the node abscissa.
    """
    alpha = float(alpha)
    F = table.values
    g = table.grid
    if not (F[0] + _LEVEL_MARGIN < alpha < F[-1] - _LEVEL_MARGIN):
        raise OutOfRange(
            f"alpha={alpha!r} outside tabulated mass [{F[0]:.3e}, {F[-1]:.8f}]"
        )
    i = _bracket_index(F, alpha)
    if F[i] == alpha:
        return float(g.x_min + i * g.dx)
    if F[i + 1] == alpha:
        return float(g.x_min + (i + 1) * g.dx)
    if not (F[i] < alpha < F[i + 1]):
        raise BracketFailure(
            f"table not monotone at bracket {i}: F_i={F[i]!r}, F_i1={F[i + 1]!r}"
        )

    m = F.shape[0]
    start = min(max(i - 2, 0), m - 5)
    offset = start - i
    coeff = _STENCILS[offset] @ F[start : start + 5]
    coeff = np.asarray(coeff, dtype=float)
    coeff[0] -= alpha
    y = solve_quartic_unit(QuarticCoeffs(*coeff))
    return float(g.x_min + (i + y) * g.dx)


def quartic_for_level(table: CdfTable, alpha: float):
    """The (bracket index, QuarticCoeffs) pair backing quantile(table, alpha).

    Exposed for verification: the returned coefficients satisfy
    poly(y*) ~ 0 at the normalized solution y*.
    """
    F = table.values
    i = _bracket_index(F, alpha)
    m = F.shape[0]
    start = min(max(i - 2, 0), m - 5)
    coeff = np.asarray(_STENCILS[start - i] @ F[start : start + 5], dtype=float)
    coeff[0] -= alpha
    return i, QuarticCoeffs(*coeff)


def sample(table: CdfTable, n: int, seed: int) -> ReturnSeries:
    """n inverse-CDF draws from the tabulated law; same seed, same output.

    Uniforms are generated by a PCG64 generator and clamped into the
    tabulated mass range (the clamp touches a draw with probability equal to
    the endpoint masses, below 1e-6 on default grids).
    """
    n = int(n)
    if n < 1:
        raise OutOfRange(f"need n >= 1 draws, got {n}")
    rng = np.random.default_rng(int(seed))
    u = rng.uniform(0.0, 1.0, size=n)
    lo = table.values[0] + 2.0 * _LEVEL_MARGIN
    hi = table.values[-1] - 2.0 * _LEVEL_MARGIN
    u = np.clip(u, lo, hi)
    vals = np.empty(n)
    for k in range(n):
        vals[k] = quantile(table, u[k])
    return ReturnSeries(values=vals, source=f"gts-sample(seed={seed},n={n})")
