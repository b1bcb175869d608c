"""
Standalone univariate semi-Markov chain with backward recurrence times.

Used as the independent baseline for the dependence ratio, for risk-free
CDS pricing on a single name, and for close-out values with the
counterparty frozen in default.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import HorizonOverflowError
from utils.kernel import backward_density, sojourn_cdf
from utils.model import BivariateModel, SojournLaw

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnivariateModel:
    labels: Tuple[str, ...]
    p: np.ndarray  # [i][j]
    sojourn: SojournLaw
    up: Tuple[int, ...]
    down: Tuple[int, ...]

    @property
    def d(self) -> int:
        return self.p.shape[0]

    @property
    def kmax(self) -> int:
        return self.sojourn.kmax


def freeze_component(model: BivariateModel, component: int, other_state: int) -> UnivariateModel:
    """Univariate view of one component with the other held in `other_state`.

    p_bar[i][j] = p^a[(i, other_state)][j]
    """
    p = np.array(model.transition(component).p[:, other_state, :])
    p.setflags(write=False)
    return UnivariateModel(
        labels=model.states.labels,
        p=p,
        sojourn=model.sojourn(component),
        up=model.states.up(component),
        down=model.states.down(component),
    )


class UnivariateSolver:
    """Transition probabilities phi(i, v; j, k) of a univariate semi-Markov chain.

    Only chains restarted at a jump (backward 0) appear inside the renewal
    equation, so the table kept here is phi(l, 0; j, m); any (i, v) start is
    one convolution away from it.
    """

    def __init__(self, model: UnivariateModel, horizon: int):
        self.model = model
        self.horizon = horizon
        self._phi0 = self._solve_from_jump(horizon)

    def _density(self, state: int, backward: int, horizon: int) -> np.ndarray:
        return backward_density(self.model.sojourn, state, backward, horizon)

    def _no_jump(self, state: int, backward: int, horizon: int) -> np.ndarray:
        F = sojourn_cdf(self.model.sojourn, backward + horizon)[state]
        return (1.0 - F[backward:backward + horizon + 1]) / (1.0 - F[backward])

    def _solve_from_jump(self, horizon: int) -> np.ndarray:
        d = self.model.d
        # q0[l][j][t] for chains entering l at time 0
        f0 = np.stack([self._density(state, 0, horizon) for state in range(d)])
        q0 = self.model.p[:, :, None] * f0[:, None, :]
        phi0 = np.zeros((d, d, horizon + 1))
        for state in range(d):
            phi0[state, state, :] = self._no_jump(state, 0, horizon)
        for m in range(1, horizon + 1):
            for tau in range(1, m + 1):
                phi0[:, :, m] += q0[:, :, tau] @ phi0[:, :, m - tau]
        return phi0

    def transition(self, state: int, backward: int, horizon: int) -> np.ndarray:
        """phi(state, backward; j, k) as an array [j][k], k = 0..horizon."""
        if horizon > self.horizon:
            raise HorizonOverflowError(f"horizon {horizon} beyond solved {self.horizon}")
        d = self.model.d
        density = self._density(state, backward, horizon)
        q = self.model.p[state][:, None] * density[None, :]  # [l][tau]
        out = np.zeros((d, horizon + 1))
        out[state, :] = self._no_jump(state, backward, horizon)
        for k in range(1, horizon + 1):
            for tau in range(1, k + 1):
                out[:, k] += q[:, tau] @ self._phi0[:, :, k - tau]
        return out

    def reliability(self, state: int, backward: int, horizon: int) -> np.ndarray:
        """P(state at k in Up | start), k = 0..horizon."""
        phi = self.transition(state, backward, horizon)
        return phi[list(self.model.up), :].sum(axis=0)
