"""Generalized tempered stable distributions for heavy-tailed return analysis.

Seven-parameter GTS law (drift, two stability indices, two jump
intensities, two tempering rates), with characteristic-function evaluation,
FFT-based density/CDF tables, quantile extraction and sampling, maximum
likelihood fitting with nested restrictions, and Q-Q / goodness-of-fit
tooling.  All returns and parameters are in percent log-return units.
"""

from .core import (
    GTSParams,
    PathClassification,
    RestrictedKind,
    bilateral_gamma_params,
    cgmy_params,
    characteristic_exponent,
    characteristic_function,
    cumulant,
    kobol_params,
    levy_density,
    path_classification,
    read_params_file,
    restricted_model,
    validate_params,
    write_params_file,
)
from .errors import GtsError, NumericalError, ValidationError
from .estimation import (
    FitOptions,
    FitResult,
    NormalFit,
    fit_mle,
    fit_normal,
    information_criteria,
    log_likelihood,
    standard_errors,
)
from .presets import BITCOIN_DAILY, ETHEREUM_DAILY
from .qq import (
    GofReport,
    QQData,
    TailVerdict,
    chi2_sf,
    emit,
    gof_ad,
    gof_chi2,
    gof_ks,
    normal_quantile,
    qq_points,
    tail_verdict,
)
from .quantiles import QuarticCoeffs, quantile, sample, solve_quartic_unit
from .returns_io import (
    PriceSeries,
    ReturnSeries,
    load_price_csv,
    load_returns_csv,
    log_returns,
    summary_stats,
    write_returns_csv,
)
from .spectral import (
    CdfTable,
    DensityTable,
    GridConfig,
    SpectralGrid,
    build_grid,
    cdf_table,
    direct_quadrature_oracle,
    frft,
    pdf_table,
    write_table_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "GTSParams",
    "PathClassification",
    "RestrictedKind",
    "validate_params",
    "characteristic_exponent",
    "characteristic_function",
    "levy_density",
    "path_classification",
    "cumulant",
    "restricted_model",
    "kobol_params",
    "cgmy_params",
    "bilateral_gamma_params",
    "read_params_file",
    "write_params_file",
    "GridConfig",
    "SpectralGrid",
    "DensityTable",
    "CdfTable",
    "build_grid",
    "pdf_table",
    "cdf_table",
    "frft",
    "direct_quadrature_oracle",
    "write_table_csv",
    "QuarticCoeffs",
    "solve_quartic_unit",
    "quantile",
    "sample",
    "FitOptions",
    "FitResult",
    "NormalFit",
    "log_likelihood",
    "fit_mle",
    "standard_errors",
    "information_criteria",
    "fit_normal",
    "PriceSeries",
    "ReturnSeries",
    "load_price_csv",
    "log_returns",
    "summary_stats",
    "write_returns_csv",
    "load_returns_csv",
    "QQData",
    "GofReport",
    "TailVerdict",
    "qq_points",
    "normal_quantile",
    "tail_verdict",
    "gof_ks",
    "gof_chi2",
    "gof_ad",
    "chi2_sf",
    "emit",
    "BITCOIN_DAILY",
    "ETHEREUM_DAILY",
    "GtsError",
    "ValidationError",
    "NumericalError",
]
