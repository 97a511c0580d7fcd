import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from modonet.core import to_tuples
from modonet.network import Network

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"

PACKING_FRONTIER = {(6, 7, 19), (8, 13, 17), (7, 14, 13), (10, 21, 8)}

# the 14 path weights of the hand-reduced seven-item packing network
PACKING_PATH_WEIGHTS = [
    (8, 13, 17), (6, 10, 11), (7, 15, 8), (6, 7, 19), (4, 4, 13), (5, 9, 10), (3, 6, 11),
    (1, 3, 5), (2, 8, 2), (7, 14, 13), (6, 13, 6), (5, 11, 7), (6, 16, 4), (10, 21, 8),
]

# node ids of the hand-built network, layer by layer
R, U21, U22, U31, U32, U33, U41, U42, U51, U52, U61, U62, U63, U71, U72, T = range(16)


def hand_packing_network() -> Network:
    """Reduced network for the seven-item packing instance, arc for arc.

    Arcs with a zero weight encode x_j = 0, the others x_j = 1.
    """
    z = (0, 0, 0)
    arcs = [
        (R, U21, z), (R, U22, (4, 8, 2)),
        (U21, U31, (5, 7, 6)), (U21, U32, z), (U22, U33, z),
        (U31, U41, z), (U32, U41, (3, 1, 8)), (U32, U42, z), (U33, U42, z),
        (U41, U51, z), (U42, U51, z), (U42, U52, (4, 5, 4)),
        (U51, U61, (2, 3, 6)), (U51, U62, z), (U52, U63, z),
        (U61, U71, (1, 3, 5)), (U62, U71, (1, 3, 5)), (U62, U72, z), (U63, U72, z),
        (U71, T, z), (U72, T, (2, 8, 2)),
    ]
    arcs = [(a, b, w, int(any(w))) for a, b, w in arcs]
    return Network.from_layers([1, 2, 3, 2, 2, 3, 2, 1], arcs)


@pytest.fixture
def hand_network():
    return hand_packing_network()


def as_set(points) -> set:
    return set(to_tuples(points))


def path_weight_multiset(net: Network) -> list:
    return sorted(to_tuples(net.all_path_weights()))


def random_network(rng: np.random.Generator, n: int, k: int, width: int = 3, lo: int = -5, hi: int = 9) -> Network:
    """Random valid layered multigraph: every node gets an in- and an out-arc."""
    sizes = [1] + [int(rng.integers(1, width + 1)) for _ in range(n - 1)] + [1]
    starts = np.cumsum([0] + sizes)
    arcs = []
    for j in range(n):
        src = range(starts[j], starts[j + 1])
        dst = range(starts[j + 1], starts[j + 2])
        for u in src:
            arcs.append((u, int(rng.choice(dst))))
        for v in dst:
            arcs.append((int(rng.choice(src)), v))
        for _ in range(int(rng.integers(0, len(src) * len(dst) + 1))):
            arcs.append((int(rng.choice(src)), int(rng.choice(dst))))
    out = []
    for a, b in arcs:
        out.append((a, b, tuple(int(x) for x in rng.integers(lo, hi, k)), int(rng.integers(0, 2))))
    return Network.from_layers(sizes, out, k=k)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
