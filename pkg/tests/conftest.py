from functools import lru_cache

import pytest

from gausscub.measures import catalog_moments, parse_measure_spec
from gausscub.ortho import build_orthobasis


@lru_cache(maxsize=None)
def catalog(spec_text: str, d_max: int):
    return catalog_moments(parse_measure_spec(spec_text), d_max)


@lru_cache(maxsize=None)
def basis_for(spec_text: str, d: int):
    return build_orthobasis(catalog(spec_text, 2 * d), d)


@pytest.fixture
def leb1():
    return catalog("lebesgue", 12)


@pytest.fixture
def leb2():
    return catalog("lebesgue^2", 8)
