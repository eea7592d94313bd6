"""Quantile-quantile analysis and goodness-of-fit statistics.

Observed quantiles are order statistics placed at Hazen plotting positions
p_k = (k - 0.5)/n and paired with reference quantiles at the same levels.
Points hugging the X = Y line mean the laws agree; a lower tail dipping
below the line with an upper tail rising above it is the long-tail
signature, the opposite pattern is short-tailed, and a one-sided mismatch
shows up as an S shape.

Statistics: Kolmogorov-Smirnov sup-distance (with its 5% critical value
1.358/sqrt(n)), the Anderson-Darling A^2 statistic (no p-value), and
Pearson's chi-squared on equiprobable bins with a survival-function p-value
computed by a series / continued-fraction regularized incomplete gamma.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import (
    BinUnderflow,
    BoundaryObservation,
    DomainError,
    TooShort,
)
from .returns_io import ReturnSeries
from .spectral import CdfTable

__all__ = [
    "QQData",
    "GofReport",
    "TailSide",
    "ShapeNote",
    "TailVerdict",
    "qq_points",
    "normal_quantile",
    "tail_verdict",
    "gof_ks",
    "gof_chi2",
    "gof_ad",
    "chi2_sf",
    "emit",
]

_MIN_POINTS = 20


# --------------------------------------------------------------------------
# data containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QQData:
    """Paired (theoretical, observed) quantiles at common probability levels."""

    levels: np.ndarray
    theoretical: np.ndarray
    observed: np.ndarray
    reference: str = ""

    def __post_init__(self):
        for name in ("levels", "theoretical", "observed"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.levels.shape[0]
        if self.theoretical.shape[0] != n or self.observed.shape[0] != n:
            raise DomainError("QQ coordinate lengths differ")
        if n and (self.levels.min() <= 0.0 or self.levels.max() >= 1.0):
            raise DomainError("plotting positions must lie strictly inside (0,1)")

    @property
    def n(self) -> int:
        return int(self.levels.shape[0])


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_critical_5pct: float
    ad_stat: float
    chi2_stat: float
    chi2_df: int
    chi2_pvalue: float
    n: int


class TailSide(str, Enum):
    HEAVIER = "heavier"
    LIGHTER = "lighter"
    COMPARABLE = "comparable"


class ShapeNote(str, Enum):
    S_SHAPED = "S-shaped"
    LONG_TAILED = "long-tailed"
    SHORT_TAILED = "short-tailed"
    LINEAR = "linear"


@dataclass(frozen=True)
class TailVerdict:
    lower: TailSide
    upper: TailSide
    shape: ShapeNote
    tau: float


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def hazen_levels(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def qq_points(observed: ReturnSeries, ref_quantile, levels=None, reference: str = "") -> QQData:
    """Build QQ pairs against a reference quantile function.

    ``ref_quantile`` maps a probability level to a quantile (scalar in,
    scalar out).  With ``levels=None`` every order statistic is used at its
    Hazen position; an integer subsamples to that many Hazen levels, with
    observed quantiles interpolated between order statistics.
    """
    x = np.sort(np.asarray(observed.values, dtype=float))
    n = x.shape[0]
    if n < _MIN_POINTS:
        raise TooShort(f"need >= {_MIN_POINTS} observations for a QQ plot, got {n}")
    if levels is None:
        p = hazen_levels(n)
        obs_q = x
    else:
        k = int(levels)
        if k < _MIN_POINTS:
            raise TooShort(f"need >= {_MIN_POINTS} levels, got {k}")
        p = hazen_levels(k)
        obs_q = np.interp(p, hazen_levels(n), x)
    theo = np.array([float(ref_quantile(pk)) for pk in p])
    return QQData(levels=p, theoretical=theo, observed=obs_q, reference=reference)


def normal_quantile(mean: float, sd: float, p: float) -> float:
    """mean + sd * Phi^{-1}(p), with one Newton polish step on Phi.

    The base inverse is a high-accuracy rational approximation; the polish
    step divides the CDF residual by the density, which is a no-op at the
    achieved accuracy but pins the round trip Phi(q) = p to first order.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0,1), got {p}")
    if not sd > 0.0:
        raise DomainError(f"sd must be positive, got {sd}")
    z = float(ndtri(p))
    dens = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    if dens > 0.0:
        z -= (float(ndtr(z)) - p) / dens
    return mean + sd * z


# --------------------------------------------------------------------------
# tail verdict
# --------------------------------------------------------------------------

def _side(mean_dev: float, tau: float) -> TailSide:
    if mean_dev < -tau:
        return TailSide.HEAVIER
    if mean_dev > tau:
        return TailSide.LIGHTER
    return TailSide.COMPARABLE


def tail_verdict(q: QQData, tau: float | None = None) -> TailVerdict:
    """Classify the tails from mean signed deviations in the extreme 1%.

    The default threshold tau = 0.5 * sd(observed) * n**(-1/4) is a
    scale-aware heuristic that tightens with sample size; override it for
    stricter or looser calls.  Requires at least 5 points per decile of
    levels.
    """
    n = q.n
    counts = np.histogram(q.levels, bins=np.linspace(0.0, 1.0, 11))[0]
    if counts.min() < 5:
        raise TooShort("need >= 5 QQ points in each decile of levels")
    if tau is None:
        tau = 0.5 * float(np.std(q.observed)) * n ** (-0.25)

    k = max(1, int(math.floor(0.01 * n)))
    order = np.argsort(q.levels)
    dev = q.observed[order] - q.theoretical[order]
    low = float(np.mean(dev[:k]))
    high = float(np.mean(dev[-k:]))

    # Heavier lower tail: observed extremes sit below the line (more
    # negative); heavier upper tail: observed extremes sit above it.
    lower = _side(low, tau)
    upper = TailSide.HEAVIER if high > tau else (TailSide.LIGHTER if high < -tau else TailSide.COMPARABLE)

    if lower is TailSide.HEAVIER and upper is TailSide.HEAVIER:
        shape = ShapeNote.LONG_TAILED
    elif lower is TailSide.LIGHTER and upper is TailSide.LIGHTER:
        shape = ShapeNote.SHORT_TAILED
    elif lower is TailSide.COMPARABLE and upper is TailSide.COMPARABLE:
        shape = ShapeNote.LINEAR
    else:
        shape = ShapeNote.S_SHAPED
    return TailVerdict(lower=lower, upper=upper, shape=shape, tau=float(tau))


# --------------------------------------------------------------------------
# goodness of fit
# --------------------------------------------------------------------------

def _check_n(x, floor=_MIN_POINTS):
    if x.shape[0] < floor:
        raise TooShort(f"need >= {floor} observations, got {x.shape[0]}")


def gof_ks(observed: ReturnSeries, table: CdfTable):
    """(D_n, 5% critical value 1.358/sqrt(n))."""
    x = np.sort(np.asarray(observed.values, dtype=float))
    _check_n(x)
    n = x.shape[0]
    u = table.evaluate(x)
    k = np.arange(1, n + 1)
    d = np.maximum(np.abs(u - k / n), np.abs(u - (k - 1) / n)).max()
    return float(d), 1.358 / math.sqrt(n)


def gof_ad(observed: ReturnSeries, table: CdfTable) -> float:
    """Anderson-Darling A^2 against the tabulated law (statistic only)."""
    x = np.sort(np.asarray(observed.values, dtype=float))
    _check_n(x)
    n = x.shape[0]
    if x[0] < table.grid.x_min or x[-1] > table.grid.x_max:
        raise BoundaryObservation(
            "observation outside the tabulated range; its tail mass is unresolved"
        )
    u = table.evaluate(x)
    eps = 1e-12
    if u.min() < eps or u.max() > 1.0 - eps:
        raise BoundaryObservation(
            "observation maps to CDF value at the boundary; law cannot explain it"
        )
    k = np.arange(1, n + 1)
    s = np.sum((2 * k - 1) * (np.log(u) + np.log1p(-u[::-1])))
    return float(-n - s / n)


def gof_chi2(observed: ReturnSeries, table: CdfTable, bins: int = 50, n_fitted_params: int = 0):
    """(statistic, df, p-value) for Pearson's test on equiprobable bins.

    ``n_fitted_params`` reduces the degrees of freedom when the reference
    law was fitted on this same sample.  Expected counts below 5 raise
    BinUnderflow.
    """
    x = np.asarray(observed.values, dtype=float)
    _check_n(x)
    bins = int(bins)
    if bins < 2:
        raise DomainError("need at least 2 bins")
    n = x.shape[0]
    expected = n / bins
    if expected < 5.0:
        raise BinUnderflow(f"expected count {expected:.2f} < 5; reduce bins")
    u = np.clip(table.evaluate(x), 0.0, np.nextafter(1.0, 0.0))
    idx = np.minimum((u * bins).astype(int), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    stat = float(np.sum((counts - expected) ** 2) / expected)
    df = bins - 1 - int(n_fitted_params)
    if df < 1:
        raise DomainError("degrees of freedom fell below 1")
    return stat, df, chi2_sf(stat, df)


# --------------------------------------------------------------------------
# chi-squared survival function (regularized incomplete gamma)
# --------------------------------------------------------------------------

def _gamma_series(a: float, x: float) -> float:
    """Lower regularized P(a,x) by power series; valid for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(500):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    else:
        raise DomainError("incomplete-gamma series failed to converge")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized Q(a,x) by Lentz continued fraction; for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise DomainError("incomplete-gamma continued fraction failed to converge")
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi2_sf(x: float, df: int) -> float:
    """Survival function of the chi-squared law: Q(df/2, x/2).

    Series expansion below the a+1 crossover, Lentz continued fraction
    above; relative accuracy ~1e-14.
    """
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    x = float(x)
    if x < 0.0:
        raise DomainError(f"chi-squared statistic must be >= 0, got {x}")
    if x == 0.0:
        return 1.0
    a = 0.5 * df
    half = 0.5 * x
    if half < a + 1.0:
        return max(0.0, min(1.0, 1.0 - _gamma_series(a, half)))
    return max(0.0, min(1.0, _gamma_cf(a, half)))


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------

def _qq_csv(q: QQData) -> str:
    lines = ["level,theoretical,observed"]
    for p, t, o in zip(q.levels, q.theoretical, q.observed):
        lines.append(f"{p:.17g},{t:.17g},{o:.17g}")
    return "\n".join(lines) + "\n"


def _qq_svg(q: QQData) -> str:
    width, height, pad = 640.0, 480.0, 56.0
    lo = min(q.theoretical.min(), q.observed.min())
    hi = max(q.theoretical.max(), q.observed.max())
    span = hi - lo if hi > lo else 1.0
    lo -= 0.05 * span
    hi += 0.05 * span

    def sx(v):
        return pad + (v - lo) / (hi - lo) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f"<title>Q-Q plot vs {q.reference}</title>" if q.reference else "<title>Q-Q plot</title>",
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<line class="axis" x1="{pad:.3f}" y1="{height - pad:.3f}" x2="{width - pad:.3f}" '
        f'y2="{height - pad:.3f}" stroke="black" stroke-width="1"/>',
        f'<line class="axis" x1="{pad:.3f}" y1="{pad:.3f}" x2="{pad:.3f}" '
        f'y2="{height - pad:.3f}" stroke="black" stroke-width="1"/>',
        f'<line class="refline" x1="{sx(lo):.3f}" y1="{sy(lo):.3f}" x2="{sx(hi):.3f}" '
        f'y2="{sy(hi):.3f}" stroke="red" stroke-width="1.5"/>',
    ]
    for t, o in zip(q.theoretical, q.observed):
        out.append(f'<circle class="pt" cx="{sx(t):.3f}" cy="{sy(o):.3f}" r="2" fill="steelblue"/>')
    out.append(
        f'<text x="{width / 2:.0f}" y="{height - 12:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">theoretical quantile (%)</text>'
    )
    out.append(
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 16 {height / 2:.0f})">observed quantile (%)</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _report_json(r: GofReport) -> str:
    payload = {
        "ks_stat": r.ks_stat,
        "ks_critical_5pct": r.ks_critical_5pct,
        "ad_stat": r.ad_stat,
        "chi2_stat": r.chi2_stat,
        "chi2_df": r.chi2_df,
        "chi2_pvalue": r.chi2_pvalue,
        "n": r.n,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _report_csv(r: GofReport) -> str:
    rows = [
        ("ks_stat", f"{r.ks_stat:.17g}"),
        ("ks_critical_5pct", f"{r.ks_critical_5pct:.17g}"),
        ("ad_stat", f"{r.ad_stat:.17g}"),
        ("chi2_stat", f"{r.chi2_stat:.17g}"),
        ("chi2_df", str(r.chi2_df)),
        ("chi2_pvalue", f"{r.chi2_pvalue:.17g}"),
        ("n", str(r.n)),
    ]
    return "statistic,value\n" + "\n".join(f"{k},{v}" for k, v in rows) + "\n"


def emit(data, fmt: str, path) -> None:
    """Render QQData (csv, svg) or a GofReport (csv, json) to a file.

    Output bytes are a pure function of the input values, so identical
    inputs produce identical files.
    """
    fmt = fmt.lower()
    if isinstance(data, QQData):
        if fmt == "csv":
            text = _qq_csv(data)
        elif fmt == "svg":
            text = _qq_svg(data)
        else:
            raise DomainError(f"QQ data renders to csv or svg, not {fmt!r}")
    elif isinstance(data, GofReport):
        if fmt == "json":
            text = _report_json(data)
        elif fmt == "csv":
            text = _report_csv(data)
        else:
            raise DomainError(f"GOF report renders to json or csv, not {fmt!r}")
    else:
        raise DomainError(f"cannot emit {type(data).__name__}")
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
