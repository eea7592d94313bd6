"""Bundled reference parameter sets.

Published seven-parameter estimates for daily Bitcoin and Ethereum percent
log returns (close prices, multi-year daily history), together with their
reported asymptotic standard errors and two-sided p-values.  These serve as
ready-made inputs for the CLI and the test suite; they are fixtures, not
targets the fitter is expected to reproduce from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import GTSParams, validate_params

__all__ = ["ReferenceEstimate", "BITCOIN_DAILY", "ETHEREUM_DAILY"]


@dataclass(frozen=True)
class ReferenceEstimate:
    """A published fit: point estimates, standard errors, p-values."""

    name: str
    params: GTSParams
    std_errors: tuple
    p_values: tuple


BITCOIN_DAILY = ReferenceEstimate(
    name="bitcoin-daily",
    params=validate_params(
        -0.121571, 0.315548, 0.406563, 0.747714, 0.544565, 0.246530, 0.174772
    ),
    std_errors=(0.375, 0.136, 0.117, 0.047, 0.037, 0.036, 0.026),
    p_values=(7.5e-01, 2.0e-02, 4.9e-04, 6.2e-56, 4.8e-48, 4.9e-12, 2.2e-11),
)

ETHEREUM_DAILY = ReferenceEstimate(
    name="ethereum-daily",
    params=validate_params(-0.4854, 0.3904, 0.4045, 0.9582, 0.8005, 0.1667, 0.1708),
    std_errors=(1.008, 0.164, 0.210, 0.106, 0.110, 0.029, 0.036),
    p_values=(6.3e-01, 1.7e-02, 5.4e-02, 1.1e-19, 4.2e-13, 1.1e-08, 2.5e-06),
)
