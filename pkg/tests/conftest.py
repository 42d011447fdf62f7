import numpy as np
import pytest
from hypothesis import settings

from bisectlimit import MultiGraph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SMALL_DEGREES = (2, 2, 1, 1)
SMALL_A = frozenset({1, 3})
SMALL_B = frozenset({2, 4})


def random_multigraph(rng, n, m, loops=True) -> MultiGraph:
    edges = []
    for _ in range(m):
        u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
        if not loops:
            while u == v and n > 1:
                v = int(rng.integers(1, n + 1))
        edges.append((u, v))
    return MultiGraph(n, tuple(edges))


def random_split(rng, n):
    perm = [int(x) + 1 for x in rng.permutation(n)]
    k = int(rng.integers(1, n)) if n > 1 else 1
    return frozenset(perm[:k]), frozenset(perm[k:])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
