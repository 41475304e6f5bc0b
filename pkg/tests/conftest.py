import numpy as np
import pytest

from qrelax import worked_examples


@pytest.fixture
def row_case():
    """(rows-normalized system, x0, [(t, lam), ...]) of the row worked example."""
    return worked_examples.row_example()


@pytest.fixture
def column_case():
    """(columns-normalized system, x0, [(t, omega), ...]) of the column worked example."""
    return worked_examples.column_example()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
