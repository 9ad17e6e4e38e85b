import numpy as np
import pytest

from superres.model import make_signal


def _random_separated_signal(rng, d, omega, span=0.7, min_gap_factor=2.0,
                             amp_range=(0.5, 2.0)):
    """Positive signal with d nodes in [-span, span], gaps >= min_gap_factor/omega."""
    min_gap = min_gap_factor / omega
    free = 2.0 * span - min_gap * (d - 1)
    if free <= 0:
        raise ValueError("span too small for the requested gaps")
    u = np.sort(rng.uniform(0.0, free, size=d))
    nodes = -span + u + min_gap * np.arange(d)
    amps = rng.uniform(*amp_range, size=d)
    return make_signal(amps, nodes, require_positive=True)


@pytest.fixture
def random_signal_factory():
    return _random_separated_signal
