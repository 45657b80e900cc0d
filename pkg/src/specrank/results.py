"""Result container for the rank estimators."""

from dataclasses import dataclass, field

from specrank.dos import DosCurve
from specrank.probe import SampleSeries
from specrank.threshold import ThresholdResult

__all__ = ["RankEstimate"]


@dataclass
class RankEstimate:
    """Per-probe rank estimates plus the threshold and curve behind them.

    ``series`` holds one estimate per probe with its running average;
    ``eps`` is the cutoff actually used (auto-selected unless the caller
    supplied one, in which case ``threshold.method == "manual"``).
    ``timings`` breaks the wall time into pipeline phases.
    """

    series: SampleSeries
    eps: float
    method: str
    window: tuple[float, float]
    threshold: ThresholdResult | None = None
    dos: DosCurve | None = None
    steps: int | None = None
    num_probes: int | None = None
    damping: str | None = None
    timings: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def mean(self):
        """Headline rank estimate: mean over all probes."""
        return self.series.mean
