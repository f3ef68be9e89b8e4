from __future__ import annotations

import numpy as np
import pytest

from effectregions import (
    HPYLORI_FORMULA,
    build_design,
    covariate_distribution,
    fit_logistic,
    load_hpylori,
    parse_formula,
)

# Reference fit of the bundled table, rounded to two decimals.
REFERENCE_PI = np.array([1.19, -0.87, -0.57, -1.82, 0.10, 0.55, 1.96, 2.18])
REFERENCE_SIGMA = np.array(
    [
        [0.64, -0.53, -0.12, -0.42, -0.32, -0.13, 0.47, 0.29],
        [-0.53, 1.06, -0.14, 0.45, 0.31, 0.10, -0.89, -0.67],
        [-0.12, -0.14, 0.37, -0.04, 0.00, -0.05, 0.03, 0.05],
        [-0.42, 0.45, -0.04, 0.69, 0.05, -0.01, -0.69, -0.05],
        [-0.32, 0.31, 0.00, 0.05, 0.72, 0.06, -0.07, -0.71],
        [-0.13, 0.10, -0.05, -0.01, 0.06, 0.39, -0.10, -0.04],
        [0.47, -0.89, 0.03, -0.69, -0.07, -0.10, 1.40, 0.32],
        [0.29, -0.67, 0.05, -0.05, -0.71, -0.04, 0.32, 1.86],
    ]
)


@pytest.fixture(scope="session")
def hpylori():
    return load_hpylori()


@pytest.fixture(scope="session")
def hpylori_formula(hpylori):
    return parse_formula(HPYLORI_FORMULA, hpylori.covariates)


@pytest.fixture(scope="session")
def hpylori_design(hpylori, hpylori_formula):
    return build_design(hpylori, hpylori_formula)


@pytest.fixture(scope="session")
def hpylori_weights(hpylori):
    return covariate_distribution(hpylori)


@pytest.fixture(scope="session")
def hpylori_fit(hpylori_design):
    return fit_logistic(hpylori_design, dispersion="deviance")


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
