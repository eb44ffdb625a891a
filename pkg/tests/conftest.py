import random

import pytest
from gmpy2 import mpq

from folsing.exactalg import parse_poly
from folsing.foliation import parse_one_form


@pytest.fixture
def rng():
    return random.Random(1234)


def P(text, gens=("x", "y")):
    return parse_poly(text, gens)


def form(text):
    return parse_one_form(text)


def q(a, b=1):
    return mpq(a, b)
