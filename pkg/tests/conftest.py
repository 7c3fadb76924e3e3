from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from mhahn.repn import ModuleParams, genericity_check


def rational(rng: random.Random, height: int = 97) -> mpq:
    return mpq(rng.choice((-1, 1)) * rng.randint(1, height), rng.randint(1, height))


def generic_module(rng: random.Random, N: int, gauge: str = "random", backend: str = "exact"):
    """(params, mu) with every genericity condition satisfied."""
    while True:
        al, be, mu = rational(rng), rational(rng), rational(rng)
        g = [rational(rng) for _ in range(N)] if gauge == "random" else None
        p = ModuleParams.make(N, al, be, g)
        if genericity_check(p, mu) or genericity_check(p.with_alpha(al + 1)):
            continue
        if backend == "float":
            p = ModuleParams.make(N, float(al), float(be),
                                  None if g is None else [float(x) for x in g], "float")
            mu = float(mu)
        return p, mu


@pytest.fixture
def rng():
    return random.Random(20240611)
