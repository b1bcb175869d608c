"""
Reliability of the two components and of the system under absorbing Down sets.
"""
import logging
from dataclasses import dataclass

import numpy as np

from config import Config
from utils.errors import A3ViolationError, ZeroDenominatorError
from utils.model import BivariateModel, InitialCondition, check_initial, validate
from utils.phi_solver import PhiSolver, solver_for
from utils.univariate import UnivariateModel, UnivariateSolver, freeze_component

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ReliabilityCurve:
    init: InitialCondition
    values: np.ndarray  # R(k), k = 0..K
    kind: str

    @property
    def horizon(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class DependenceRatio:
    init: InitialCondition
    values: np.ndarray       # joint / independent, k = 0..K
    joint: np.ndarray        # R^1(k) R^2(k) from the bivariate model
    independent: np.ndarray  # univariate baselines multiplied


def require_a3(model: BivariateModel, config=Config) -> None:
    """Raise A3ViolationError unless every Down state is absorbing."""
    report = validate(model, config)
    if not report.a3_holds:
        reason = report.a3_violations[0] if report.a3_violations else "model is invalid"
        raise A3ViolationError(f"Down states must be absorbing: {reason}")


def marginal_reliability(model: BivariateModel, component: int, init: InitialCondition,
                         horizon: int, solver: PhiSolver = None, config=Config) -> ReliabilityCurve:
    """R^a(k) = sum over j in Up^a of Phi^a(init; j, ., k), k = 0..horizon."""
    require_a3(model, config)
    check_initial(model, init)
    solver = solver or solver_for(model, config)
    table = solver.ensure([init], horizon)
    up = list(model.states.up(component))
    curve = table.marginal_curve(component, init, horizon)[up, :].sum(axis=0)
    return ReliabilityCurve(init=init, values=curve, kind=f"marginal-{component}")


def system_reliability(model: BivariateModel, init: InitialCondition, horizon: int,
                       solver: PhiSolver = None, config=Config) -> ReliabilityCurve:
    """R(k) = R^1(k) R^2(k)."""
    r1 = marginal_reliability(model, 1, init, horizon, solver, config)
    r2 = marginal_reliability(model, 2, init, horizon, solver, config)
    return ReliabilityCurve(init=init, values=r1.values * r2.values, kind="system")


def univariate_reliability(uni: UnivariateModel, component: int, state: int, backward: int,
                           horizon: int) -> ReliabilityCurve:
    values = UnivariateSolver(uni, horizon).reliability(state, backward, horizon)
    init = InitialCondition(state, state, backward, backward)
    return ReliabilityCurve(init=init, values=values, kind=f"univariate-{component}")


def dependence_ratio(model: BivariateModel, uni1: UnivariateModel, uni2: UnivariateModel,
                     init: InitialCondition, horizon: int, solver: PhiSolver = None,
                     config=Config) -> DependenceRatio:
    """Ratio of bivariate to independent reliability products.

    Args:
        model: Bivariate model with absorbing Down sets
        uni1: Univariate baseline for component 1, or None to freeze
              component 2 at its initial state
        uni2: Univariate baseline for component 2, or None likewise
        init: Initial condition
        horizon: Last k

    Returns:
        DependenceRatio; values deviating from 1 indicate dependence

    Raises:
        ZeroDenominatorError: a baseline reliability hits zero before the horizon
    """
    uni1 = uni1 or freeze_component(model, 1, init.i2)
    uni2 = uni2 or freeze_component(model, 2, init.i1)
    joint = system_reliability(model, init, horizon, solver, config).values
    base1 = univariate_reliability(uni1, 1, init.i1, init.v1, horizon).values
    base2 = univariate_reliability(uni2, 2, init.i2, init.v2, horizon).values
    independent = base1 * base2
    if np.any(independent <= 0.0):
        first = int(np.argmax(independent <= 0.0))
        raise ZeroDenominatorError(f"univariate reliability reaches zero at k={first}")
    ratio = joint / independent
    logger.info(f"Dependence ratio at k={horizon}: {ratio[-1]:.6f}")
    return DependenceRatio(init=init, values=ratio, joint=joint, independent=independent)
