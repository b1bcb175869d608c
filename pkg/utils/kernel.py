"""
Semi-Markov kernel tables.

Q^a[i1][i2][j][k] = p^a[(i1,i2)][j] * F^a_{i_a}(k), the point masses
q^a(k) = Q^a(k) - Q^a(k-1) and the unconditional sojourn CDF H^a = F^a.
Sojourns last at least one period, so q(0) = 0 everywhere.
"""
import logging
from dataclasses import dataclass

import numpy as np

from config import Config
from utils.errors import DegenerateBackwardError
from utils.model import BivariateModel, SojournLaw

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelTables:
    component: int
    bigQ: np.ndarray  # [i1][i2][j][k]
    q: np.ndarray     # [i1][i2][j][k], point mass at exactly k
    H: np.ndarray     # [i][k]


def sojourn_cdf(law: SojournLaw, horizon: int, tol: float = Config.CDF_TERMINAL_TOL) -> np.ndarray:
    """F[i][m] for m = 0..horizon, extended by 1 past Kmax.

    Values within `tol` of 1 are snapped to exactly 1 so that survival
    probabilities that the validator accepted as zero are exactly zero.
    """
    d, kmax = law.d, law.kmax
    F = np.ones((d, max(horizon, kmax) + 1))
    F[:, :kmax + 1] = law.F
    F[F >= 1.0 - tol] = 1.0
    return F[:, :horizon + 1]


def backward_density(law: SojournLaw, state: int, backward: int, horizon: int) -> np.ndarray:
    """P(X = backward + t | X > backward) for t = 0..horizon (zero at t = 0).

    Raises:
        DegenerateBackwardError: when F(backward) = 1
    """
    F = sojourn_cdf(law, horizon + backward)[state]
    tail = 1.0 - F[backward]
    if tail <= 0.0:
        raise DegenerateBackwardError(law.component, state, backward)
    density = np.zeros(horizon + 1)
    density[1:] = (F[backward + 1:backward + horizon + 1] - F[backward:backward + horizon]) / tail
    return density


def build_kernel(model: BivariateModel, component: int) -> KernelTables:
    """Cumulative kernel, one-step densities and H for one component.

    Args:
        model: A valid bivariate model
        component: 1 or 2

    Returns:
        KernelTables indexed in joint (i1, i2) order
    """
    p = model.own_other_matrix(component)  # [i1][i2][j]
    F = sojourn_cdf(model.sojourn(component), model.kmax)
    own = np.arange(model.d)

    # F of the component's own state, broadcast over the other index
    if component == 1:
        F_own = F[own][:, None, None, :]
    else:
        F_own = F[own][None, :, None, :]

    bigQ = p[:, :, :, None] * F_own
    q = np.zeros_like(bigQ)
    q[..., 1:] = np.diff(bigQ, axis=-1)

    for arr in (bigQ, q, F):
        arr.setflags(write=False)
    logger.debug(f"Built kernel for component {component}: d={model.d}, Kmax={model.kmax}")
    return KernelTables(component=component, bigQ=bigQ, q=q, H=F)


def backward_q(model: BivariateModel, component: int, i1: int, i2: int, j: int,
               v: int, k: int) -> float:
    """One-step probability of jumping to j after k more periods, given age v.

    q^a_{(i1,i2),j}(v, k) = [F(k+v) - F(k+v-1)] / [1 - H(v)] * p^a_{(i1,i2),j}
    """
    if k < 1:
        return 0.0
    own = i1 if component == 1 else i2
    law = model.sojourn(component)
    F = sojourn_cdf(law, k + v)[own]
    tail = 1.0 - F[v]
    if tail <= 0.0:
        raise DegenerateBackwardError(component, model.states.labels[own], v)
    p = model.own_other_matrix(component)[i1, i2, j]
    return float((F[k + v] - F[k + v - 1]) / tail * p)
