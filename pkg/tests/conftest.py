from __future__ import annotations

import pytest

from subshock_lab.model import (
    Branch,
    ModelSpec,
    PowerPlusLinearCoupling,
    QuadraticFlux,
    WaveProblem,
)
from subshock_lab import slowdyn


def cubic_model() -> ModelSpec:
    return ModelSpec(QuadraticFlux(1.0, 0.0), PowerPlusLinearCoupling(0.2, 3))


@pytest.fixture(scope="session")
def hamer_problem() -> WaveProblem:
    return WaveProblem.build(ModelSpec.hamer(), 1.0, -1.0)


@pytest.fixture(scope="session")
def asym_problem() -> WaveProblem:
    return WaveProblem.build(ModelSpec.hamer(), 1.5, -0.9)


@pytest.fixture(scope="session")
def cubic_problem() -> WaveProblem:
    return WaveProblem.build(cubic_model(), 1.1, -1.1)


def compute_matching(problem: WaveProblem) -> slowdyn.MatchingData:
    cm = slowdyn.integrate_phase_curve(problem, Branch.MINUS)
    cp = slowdyn.integrate_phase_curve(problem, Branch.PLUS)
    return slowdyn.find_matching_point(problem, cm, cp)


@pytest.fixture(scope="session")
def hamer_matching(hamer_problem) -> slowdyn.MatchingData:
    return compute_matching(hamer_problem)


@pytest.fixture(scope="session")
def asym_matching(asym_problem) -> slowdyn.MatchingData:
    return compute_matching(asym_problem)


@pytest.fixture(scope="session")
def cubic_matching(cubic_problem) -> slowdyn.MatchingData:
    return compute_matching(cubic_problem)
