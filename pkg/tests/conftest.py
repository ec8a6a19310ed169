import warnings

import pytest

from grapheneopto.errors import ValidityWarning
from grapheneopto.model import ModelParameters


@pytest.fixture
def fig3():
    return ModelParameters.figure3()


@pytest.fixture
def fig4():
    return ModelParameters.figure4()


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        yield
