import numpy as np
import pytest

import gts_tail as gt

# The two bundled reference estimates double as the standard fixtures for
# the whole suite.  Heavy artifacts (tables, large samples) are built once
# per session.


@pytest.fixture(scope="session")
def btc_params():
    return gt.BITCOIN_DAILY.params


@pytest.fixture(scope="session")
def eth_params():
    return gt.ETHEREUM_DAILY.params


@pytest.fixture(scope="session")
def btc_tables(btc_params):
    grid = gt.build_grid(btc_params)
    return gt.pdf_table(btc_params, grid), gt.cdf_table(btc_params, grid)


@pytest.fixture(scope="session")
def eth_tables(eth_params):
    grid = gt.build_grid(eth_params)
    return gt.pdf_table(eth_params, grid), gt.cdf_table(eth_params, grid)


@pytest.fixture(scope="session")
def symmetric_params():
    return gt.validate_params(0.0, 0.4, 0.4, 0.8, 0.8, 0.25, 0.25)


@pytest.fixture(scope="session")
def symmetric_tables(symmetric_params):
    grid = gt.build_grid(symmetric_params)
    return gt.pdf_table(symmetric_params, grid), gt.cdf_table(symmetric_params, grid)


@pytest.fixture(scope="session")
def btc_sample_100k(btc_tables):
    _, cdf = btc_tables
    return gt.sample(cdf, 100_000, seed=20240704)


@pytest.fixture(scope="session")
def btc_sample_5k(btc_tables):
    _, cdf = btc_tables
    return gt.sample(cdf, 5000, seed=7)
