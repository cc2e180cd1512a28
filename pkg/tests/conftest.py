import mpmath
import pytest
from hypothesis import settings

from multisum.corpus import LAURENT, LAURENT_FREE, TERMS, load_builtin_laurent, load_builtin_term
from multisum.variational import SolverConfig

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

TERM_NAMES = sorted(TERMS)
LAURENT_NAMES = sorted(LAURENT)


@pytest.fixture(autouse=True)
def _reset_precision():
    dps = mpmath.mp.dps
    yield
    mpmath.mp.dps = dps


@pytest.fixture(scope="session")
def cfg():
    return SolverConfig()


@pytest.fixture(params=TERM_NAMES)
def corpus_term(request):
    return request.param, load_builtin_term(request.param)


@pytest.fixture(params=LAURENT_NAMES)
def corpus_laurent(request):
    return request.param, load_builtin_laurent(request.param), LAURENT_FREE.get(request.param)
