"""Density and CDF tables by Fourier inversion of the characteristic function.

The density on a uniform x-grid comes from the truncated inversion integral

    f(x) = (1/2pi) * integral_{-Xi..Xi} cf(xi) exp(-i x xi) dxi

with the frequency samples weighted by a composite Newton-Cotes (Simpson)
rule and the oscillatory sum over all grid points evaluated in one shot by a
fractional FFT.  The CDF uses the same machinery on the integrand

    (cf(xi) - cf_ref(xi)) / (i xi)

where cf_ref is the characteristic function of the moment-matched normal
law N(kappa_1, kappa_2).  Subtracting the reference removes the simple pole
at xi = 0 (both CFs share the first moment) and restores fast decay at the
truncation boundary, and its own inversion is known in closed form:

    F(x) = Phi((x - kappa_1)/sqrt(kappa_2))
         - (1/2pi) * integral (cf - cf_ref)(xi)/(i xi) exp(-i x xi) dxi

A slow adaptive-quadrature oracle (`direct_quadrature_oracle`) evaluates the
one-sided forms of the same inversion integrals at a single point for
verification; it shares no code with the FRFT path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.special import ndtr

from .core import GTSParams, characteristic_exponent, characteristic_function, cumulant, mgf_exponent
from .errors import ConfigError, ConvergenceFailure, NumericalFailure, SizeError

__all__ = [
    "GridConfig",
    "SpectralGrid",
    "DensityTable",
    "CdfTable",
    "frft",
    "newton_cotes_weights",
    "build_grid",
    "pdf_table",
    "cdf_table",
    "direct_quadrature_oracle",
    "write_table_csv",
]

# Negative density excursions beyond this bound indicate a bad grid rather
# than roundoff; anything milder is clamped to zero.
_NEG_DENSITY_HARD = 1e-9
_NORMALIZATION_TOL = 1e-6
_MONOTONE_SLACK = 1e-10
_ENDPOINT_TOL = 1e-6


# --------------------------------------------------------------------------
# fractional FFT
# --------------------------------------------------------------------------

def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def frft(seq, delta: float) -> np.ndarray:
    """G(k) = sum_j seq[j] * exp(-2 pi i j k delta) for k = 0..m-1.

    Evaluates the sum for arbitrary real spacing ``delta`` in O(m log m) via
    the Bluestein identity 2jk = j**2 + k**2 - (k-j)**2, which turns the sum
    into a linear convolution of chirped sequences; the convolution runs on
    zero-padded length-2m FFT buffers (three FFTs total).

    ``len(seq)`` must be a power of two.
    """
    a = np.asarray(seq, dtype=complex)
    m = a.shape[0]
    if not _is_pow2(m):
        raise SizeError(f"frft length must be a power of two, got {m}")
    j = np.arange(m)
    chirp = np.exp(-1j * np.pi * delta * j * j)
    u = np.zeros(2 * m, dtype=complex)
    u[:m] = a * chirp
    v = np.zeros(2 * m, dtype=complex)
    v[:m] = np.conj(chirp)
    v[m + 1 :] = v[1:m][::-1]
    conv = np.fft.ifft(np.fft.fft(u) * np.fft.fft(v))
    return chirp * conv[:m]


@lru_cache(maxsize=32)
def _newton_cotes_cached(n: int) -> tuple:
    if n < 8:
        raise SizeError(f"need at least 8 quadrature nodes, got {n}")
    w = np.zeros(n)
    if (n - 1) % 2 == 0:
        w[0] = w[-1] = 1.0 / 3.0
        w[1:-1:2] = 4.0 / 3.0
        w[2:-1:2] = 2.0 / 3.0
    else:
        # Odd interval count: Simpson on the first n-4 intervals, a closed
        # 3/8 rule on the final three.
        ns = n - 3
        w[0] = w[ns - 1] = 1.0 / 3.0
        w[1 : ns - 1 : 2] = 4.0 / 3.0
        w[2 : ns - 1 : 2] = 2.0 / 3.0
        w[ns - 1] += 3.0 / 8.0
        w[ns] = w[ns + 1] = 9.0 / 8.0
        w[ns + 2] = 3.0 / 8.0
    # Average with the mirrored rule so the weight vector is palindromic;
    # this keeps conjugate-symmetric integrands exactly real after summation.
    w = 0.5 * (w + w[::-1])
    w.setflags(write=False)
    return (w,)


def newton_cotes_weights(n: int) -> np.ndarray:
    """Composite closed Newton-Cotes weights (Simpson, order 4) on n nodes.

    Weights are for unit spacing; multiply by the actual step.  When the
    interval count n-1 is odd a 3/8-rule patch closes the rule, and the
    vector is symmetrized end-for-end.
    """
    return _newton_cotes_cached(int(n))[0]


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    """User-tunable knobs for table construction.

    m:              number of spatial points (rounded up to a power of two,
                    minimum 256)
    width_sds:      half-width of the x-range in standard deviations
    min_half_width: absolute floor for the half-width (percent)
    freq_eps:       |cf| threshold defining the frequency cutoff
    n_freq:         frequency node count override (power of two, >= m);
                    None selects automatically from an aliasing bound
    freq_cutoff:    explicit truncation frequency; None selects by bisection
    max_n_freq:     budget on frequency nodes; slowly decaying characteristic
                    functions (stability indices near zero) can demand more
                    nodes than any sane budget, which raises ConfigError
    """

    m: int = 2**14
    width_sds: float = 20.0
    min_half_width: float = 0.0
    freq_eps: float = 1e-12
    n_freq: int | None = None
    freq_cutoff: float | None = None
    max_n_freq: int = 2**22


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform evaluation grid plus the frequency discretization behind it."""

    x_min: float
    x_max: float
    m: int
    dx: float
    n_freq: int
    freq_cutoff: float

    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.m)


def _next_pow2(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(1.0, n))))


def _freq_cutoff(p: GTSParams, eps: float) -> float:
    """Smallest Xi with |cf(Xi)| < eps, found by doubling plus bisection.

    |cf| = exp(Re psi) is strictly decreasing in |xi| on the admissible
    domain, so bisection is valid.
    """
    target = math.log(eps)

    def logcf(x):
        return float(np.real(characteristic_exponent(p, complex(x))))

    hi = 1.0
    for _ in range(64):
        if logcf(hi) < target:
            break
        hi *= 2.0
    else:
        raise ConfigError(
            "characteristic function decays too slowly to reach freq_eps"
        )
    # Resolve the cutoff to machine precision: downstream quantities must be
    # smooth functions of the parameters (finite-difference Hessians of the
    # likelihood difference them at relative steps of 1e-4).
    lo = hi / 2.0 if hi > 1.0 else 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if logcf(mid) < target:
            hi = mid
        else:
            lo = mid
    return hi


def _tail_radius(p: GTSParams, eps: float) -> float:
    """Distance t from kappa_1 with P(|Y - kappa_1| > t) < eps (Chernoff).

    Minimizes the exponential-moment bound exp(mgf(theta) - theta*a) over a
    theta grid inside the tempering strip, separately per tail.
    """
    k1 = cumulant(p, 1)
    log_eps = math.log(eps)
    radii = []
    for sign, lam in ((+1.0, p.lambda_plus), (-1.0, p.lambda_minus)):
        thetas = lam * np.linspace(0.30, 0.995, 40)
        best = math.inf
        for th in thetas:
            # P(sign*(Y-k1) > t) <= exp(mgf(sign*th) - th*(sign*k1) - th*t)
            m = mgf_exponent(p, sign * th)
            t = (m - th * sign * k1 - log_eps) / th
            best = min(best, t)
        radii.append(max(best, 0.0))
    return max(radii)


def build_grid(p: GTSParams, cfg: GridConfig = GridConfig()) -> SpectralGrid:
    """Size the spatial and frequency grids for a parameter set.

    The x-range is centered on the mean kappa_1 with half-width
    max(width_sds * sqrt(kappa_2), min_half_width).  The frequency cutoff Xi
    is the bisection solution of |cf(Xi)| = freq_eps.  The frequency node
    count is chosen so that half the implied spatial period pi*(n-1)/Xi
    clears the grid half-width plus a Chernoff tail radius, which keeps both
    plain and Nyquist-shifted aliases of the density off the grid.
    """
    m = max(256, _next_pow2(cfg.m))
    k1 = cumulant(p, 1)
    k2 = cumulant(p, 2)
    half_width = max(cfg.width_sds * math.sqrt(k2), cfg.min_half_width)
    if not half_width > 0.0:
        raise ConfigError("grid half-width must be positive")

    if cfg.freq_cutoff is not None:
        cutoff = float(cfg.freq_cutoff)
        if abs(characteristic_function(p, complex(cutoff))) >= 1e-6:
            raise ConfigError(
                "configured freq_cutoff leaves |cf| >= 1e-6; integrand tail not captured"
            )
    else:
        cutoff = _freq_cutoff(p, cfg.freq_eps)

    # Aliasing bound: the sampled transform repeats with spatial period
    # 2*pi/dxi, and the Newton-Cotes weights add copies shifted by half of
    # it, so half the period must clear the grid plus the density support.
    guard = half_width + _tail_radius(p, 1e-9)
    needed = 2.0 * cutoff * guard / math.pi + 1.0
    if cfg.n_freq is not None:
        n_freq = int(cfg.n_freq)
        if not _is_pow2(n_freq) or n_freq < m:
            raise ConfigError("n_freq must be a power of two and >= m")
        if n_freq < needed:
            raise ConfigError(
                f"n_freq={n_freq} below the aliasing bound {int(needed)} for this "
                "parameter set; results would fold back onto the grid"
            )
    else:
        n_freq = max(m, _next_pow2(needed))
    if n_freq > cfg.max_n_freq:
        raise ConfigError(
            f"frequency grid needs {n_freq} nodes, over the budget {cfg.max_n_freq}; "
            "the characteristic function decays too slowly for this inversion"
        )

    x_min = k1 - half_width
    x_max = k1 + half_width
    return SpectralGrid(
        x_min=x_min,
        x_max=x_max,
        m=m,
        dx=(x_max - x_min) / (m - 1),
        n_freq=n_freq,
        freq_cutoff=cutoff,
    )


# --------------------------------------------------------------------------
# tables
# --------------------------------------------------------------------------

# Inverse Vandermonde for a 5-node stencil at local coordinates 0..4; maps
# stencil values to monomial coefficients for degree-4 local interpolation.
_LAGRANGE5_M = np.linalg.inv(np.vander(np.arange(5.0), 5, increasing=True)).T


def _lagrange5_eval(x0: float, dx: float, values: np.ndarray, xq: np.ndarray) -> np.ndarray:
    """Degree-4 local Lagrange interpolation on a uniform grid (vectorized)."""
    m = values.shape[0]
    pos = (xq - x0) / dx
    start = np.clip(np.floor(pos).astype(int) - 2, 0, m - 5)
    y = pos - start
    win = values[start[:, None] + np.arange(5)[None, :]]
    coeff = win @ _LAGRANGE5_M
    out = coeff[:, 4]
    for k in (3, 2, 1, 0):
        out = out * y + coeff[:, k]
    return out


@dataclass(frozen=True)
class DensityTable:
    """Tabulated density values on a SpectralGrid."""

    grid: SpectralGrid
    values: np.ndarray

    def interpolate(self, x):
        """Locally degree-4 interpolated density; zero outside the grid."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xq = np.atleast_1d(x)
        out = _lagrange5_eval(self.grid.x_min, self.grid.dx, self.values, xq)
        out = np.maximum(out, 0.0)
        out[(xq < self.grid.x_min) | (xq > self.grid.x_max)] = 0.0
        return float(out[0]) if scalar else out

    @cached_property
    def monotone_interpolator(self) -> PchipInterpolator:
        """Shape-preserving cubic through the table (used by the likelihood)."""
        return PchipInterpolator(self.grid.x(), self.values, extrapolate=False)

    def trapezoid_mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.grid.dx))


@dataclass(frozen=True)
class CdfTable:
    """Tabulated distribution function values on a SpectralGrid."""

    grid: SpectralGrid
    values: np.ndarray

    def evaluate(self, x):
        """Locally degree-4 interpolated CDF, clamped to the table ends."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xq = np.atleast_1d(x)
        out = _lagrange5_eval(self.grid.x_min, self.grid.dx, self.values, xq)
        out[xq <= self.grid.x_min] = self.values[0]
        out[xq >= self.grid.x_max] = self.values[-1]
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out


def _cf_samples(p: GTSParams, xi: np.ndarray) -> np.ndarray:
    """cf on a symmetric grid, computed on the positive half and mirrored.

    The grid must satisfy xi[n-1-l] = -xi[l] (true for our symmetric
    endpoints with an even node count); mirroring enforces exact Hermitian
    symmetry, halving the cost of complex powers.
    """
    n = xi.shape[0]
    half = characteristic_function(p, xi[n // 2 :])
    return np.concatenate([np.conj(half[::-1]), half])


def _invert(weighted: np.ndarray, grid: SpectralGrid, dxi: float) -> np.ndarray:
    """Real part of (1/2pi) sum_l weighted[l] exp(-i x_j xi_l) for all j."""
    m = grid.m
    delta = grid.dx * dxi / (2.0 * np.pi)
    j = np.arange(m)
    phase = np.exp(1j * j * (grid.dx * grid.freq_cutoff))
    return (phase * frft(weighted, delta)[:m]).real / (2.0 * np.pi)


def _freq_nodes(grid: SpectralGrid):
    n = grid.n_freq
    dxi = 2.0 * grid.freq_cutoff / (n - 1)
    xi = -grid.freq_cutoff + dxi * np.arange(n)
    return xi, dxi


def _pdf_values(p: GTSParams, grid: SpectralGrid) -> np.ndarray:
    """Raw inverted density values, unclamped and unchecked."""
    xi, dxi = _freq_nodes(grid)
    w = newton_cotes_weights(grid.n_freq) * dxi
    a = w * _cf_samples(p, xi) * np.exp(-1j * grid.x_min * xi)
    return _invert(a, grid, dxi)


def pdf_table(p: GTSParams, grid: SpectralGrid) -> DensityTable:
    """Invert the characteristic function to density values on the grid.

    Raises NumericalFailure when the result violates its invariants
    (pre-clamp negative excursion beyond 1e-9, or trapezoid mass off 1 by
    more than 1e-6), both symptoms of a misconfigured grid.
    """
    f = _pdf_values(p, grid)

    worst = f.min()
    if worst < -_NEG_DENSITY_HARD:
        raise NumericalFailure(
            f"density excursion {worst:.3e} below -1e-9; grid misconfigured"
        )
    f = np.maximum(f, 0.0)
    table = DensityTable(grid=grid, values=f)
    mass = table.trapezoid_mass()
    if abs(mass - 1.0) > _NORMALIZATION_TOL:
        raise NumericalFailure(
            f"density mass {mass!r} deviates from 1 beyond 1e-6; grid misconfigured"
        )
    return table


def cdf_table(p: GTSParams, grid: SpectralGrid) -> CdfTable:
    """Invert to distribution-function values on the grid.

    The pole of cf(xi)/(i xi) at 0 is removed by subtracting the
    characteristic function of N(kappa_1, kappa_2); its closed-form CDF
    supplies the subtracted mass, including the constant split carried by
    the Dirac term of the distributional Fourier pair.
    """
    xi, dxi = _freq_nodes(grid)
    k1 = cumulant(p, 1)
    k2 = cumulant(p, 2)
    w = newton_cotes_weights(grid.n_freq) * dxi
    cf_ref = np.exp(1j * k1 * xi - 0.5 * k2 * xi * xi)
    h = (_cf_samples(p, xi) - cf_ref) / (1j * xi)
    corr = _invert(w * h * np.exp(-1j * grid.x_min * xi), grid, dxi)
    F = ndtr((grid.x() - k1) / math.sqrt(k2)) - corr

    steps = np.diff(F)
    if steps.min() < -_MONOTONE_SLACK:
        raise NumericalFailure(
            f"CDF not monotone (min step {steps.min():.3e}); grid misconfigured"
        )
    if F[0] >= _ENDPOINT_TOL or 1.0 - F[-1] >= _ENDPOINT_TOL:
        raise NumericalFailure(
            f"CDF endpoints not settled: F(x_min)={F[0]:.3e}, 1-F(x_max)={1 - F[-1]:.3e}"
        )
    return CdfTable(grid=grid, values=np.clip(F, 0.0, 1.0))


# --------------------------------------------------------------------------
# slow direct-quadrature oracle
# --------------------------------------------------------------------------

def _oracle_cutoff(p: GTSParams) -> float:
    return _freq_cutoff(p, 1e-16)


def direct_quadrature_oracle(p: GTSParams, x: float, abs_tol: float = 1e-10):
    """(pdf, cdf) at a single point by adaptive quadrature.  Slow; test use.

    Uses the one-sided inversion forms

        f(x) = (1/pi) * int_0^Xi Re[cf(y) exp(-i x y)] dy
        F(x) = 1/2 - (1/pi) * int_0^Xi Im[cf(y) exp(-i x y)] / y dy

    with QUADPACK oscillatory-weight integration on the trigonometric
    factors.  Raises ConvergenceFailure when the reported error estimate
    exceeds ``abs_tol``.
    """
    x = float(x)
    cutoff = _oracle_cutoff(p)

    def cf_re(y):
        return float(np.real(characteristic_function(p, complex(y))))

    def cf_im(y):
        return float(np.imag(characteristic_function(p, complex(y))))

    opts = dict(limit=600, epsabs=1e-12, epsrel=1e-12)
    with np.errstate(over="ignore"):
        p1, e1 = quad(cf_re, 0.0, cutoff, weight="cos", wvar=x, **opts)[:2]
        p2, e2 = quad(cf_im, 0.0, cutoff, weight="sin", wvar=x, **opts)[:2]

        # CDF integrand has a removable singularity at 0; integrate the full
        # complex form on (0, 1] where QUADPACK never touches the endpoint,
        # then oscillatory-weighted pieces on [1, Xi].
        def near(y):
            return float(
                np.imag(characteristic_function(p, complex(y)) * np.exp(-1j * x * y)) / y
            )

        c0, e3 = quad(near, 0.0, 1.0, **opts)[:2]
        c1, e4 = quad(lambda y: cf_im(y) / y, 1.0, cutoff, weight="cos", wvar=x, **opts)[:2]
        c2, e5 = quad(lambda y: cf_re(y) / y, 1.0, cutoff, weight="sin", wvar=x, **opts)[:2]

    err = e1 + e2 + e3 + e4 + e5
    if not math.isfinite(err) or err > abs_tol:
        raise ConvergenceFailure(
            f"oracle error estimate {err:.2e} exceeds tolerance {abs_tol:.2e}"
        )
    pdf = (p1 + p2) / math.pi
    cdf = 0.5 - (c0 + c1 - c2) / math.pi
    return pdf, cdf


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

def write_table_csv(table, path) -> None:
    """Two-column CSV (x, value) with 17-significant-digit decimals."""
    x = table.grid.x()
    if hasattr(path, "write"):
        path.write("x,value\n")
        for xi_, v in zip(x, table.values):
            path.write(f"{xi_:.17g},{v:.17g}\n")
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,value\n")
        for xi_, v in zip(x, table.values):
            fh.write(f"{xi_:.17g},{v:.17g}\n")
