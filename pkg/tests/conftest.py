"""Shared fixtures: the three canonical noisy low-rank test matrices.

Session-scoped because generating each 2048 x 2048 case and its exact
spectrum costs a few seconds and many tests reuse them.
"""

from collections import namedtuple

import pytest

from specrank import dense_eigs, hadamard_lowrank

HadamardCase = namedtuple("HadamardCase", ["op", "truth", "spectrum", "gap"])

N, K, SEED = 2048, 128, 42


def _build_case(sigma):
    op, truth = hadamard_lowrank(N, K, sigma=sigma, seed=SEED)
    spectrum = dense_eigs(op)
    ev = spectrum.eigenvalues
    # Largest noise eigenvalue and smallest signal eigenvalue by position;
    # a meaningful gap only exists while the noise stays below the signals.
    gap = (float(ev[N - K - 1]), float(ev[N - K]))
    return HadamardCase(op, truth, spectrum, gap)


@pytest.fixture(scope="session")
def case1():
    return _build_case(0.001)


@pytest.fixture(scope="session")
def case2():
    return _build_case(0.004)


@pytest.fixture(scope="session")
def case3():
    return _build_case(0.014)
