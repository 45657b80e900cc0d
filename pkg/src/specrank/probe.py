"""Random probe vectors for the stochastic trace estimator.

Each probe is a pure function of (seed, probe index): streams come from a
counter-based generator keyed on that pair, so serial and parallel runs
produce bitwise-identical vectors and aggregation order never matters.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from specrank.errors import InvalidConfig

__all__ = [
    "Distribution",
    "ProbeConfig",
    "SampleSeries",
    "probe_vector",
    "generate_probes",
    "running_average",
    "map_over_probes",
]

_SEED_MASK = (1 << 64) - 1
# Stream index reserved for internal draws (spectrum bounds); probe l uses stream l.
AUX_STREAM = 1 << 32


class Distribution(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


@dataclass(frozen=True)
class ProbeConfig:
    """Number, distribution, and seed of the sample vectors."""

    num_probes: int = 30
    distribution: Distribution = Distribution.GAUSSIAN
    seed: int = 42

    def __post_init__(self):
        if self.num_probes < 1:
            raise InvalidConfig(f"num_probes must be >= 1, got {self.num_probes}")


def _rng(seed, stream):
    return np.random.Generator(np.random.Philox(key=[seed & _SEED_MASK, stream & _SEED_MASK]))


def probe_vector(n, config, index):
    """Unit-norm probe ``index`` of the sequence determined by ``config``."""
    rng = _rng(config.seed, index)
    if config.distribution is Distribution.RADEMACHER:
        v = (rng.integers(0, 2, size=n) * 2 - 1) / np.sqrt(n)
        return v
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def generate_probes(n, config):
    """All ``config.num_probes`` unit probes for dimension ``n``."""
    if n < 1:
        raise InvalidConfig(f"dimension must be >= 1, got {n}")
    return [probe_vector(n, config, l) for l in range(config.num_probes)]


@dataclass
class SampleSeries:
    """Per-probe estimates with their cumulative running average."""

    per_probe: np.ndarray
    running_mean: np.ndarray = field(default=None)

    def __post_init__(self):
        self.per_probe = np.asarray(self.per_probe, dtype=float)
        if self.per_probe.size == 0:
            raise InvalidConfig("sample series needs at least one estimate")
        if self.running_mean is None:
            counts = np.arange(1, self.per_probe.size + 1)
            self.running_mean = np.cumsum(self.per_probe) / counts

    @property
    def mean(self):
        """Headline estimate: the final running average."""
        return float(self.running_mean[-1])


def running_average(values):
    """SampleSeries of ``values`` with prefix means."""
    return SampleSeries(np.asarray(values, dtype=float))


def map_over_probes(fn, count, threads=1):
    """Evaluate ``fn(l)`` for l = 0..count-1 and return results in probe order.

    The ordered gather makes the reduction deterministic, so the thread
    count never changes numeric output.
    """
    if threads is None or threads <= 1 or count <= 1:
        return [fn(l) for l in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))
