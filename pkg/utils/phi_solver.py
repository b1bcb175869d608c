"""
Transition probabilities with backward recurrence times for the bivariate chain.

Phi^a(i, v; j, u, k) = P(Z^a(k) = j, B^a(k) = u | Z(0) = i, B(0) = v)

solved forward in k from the coupled system

    Phi^1(i, v; j, u, k) = d(i1, j) 1{u = k + v1} S^1_{i1}(k + v1) / S^1_{i1}(v1)
        + sum_{tau=1..k} sum_{l1, l2} sum_{w=0..tau+v2}
              Phi^1((l1, l2), (0, w); j, u, k - tau)
            * Phi^2(i, v; l2, w, tau)
            * q^1_{i, l1}(v1, tau)

and its mirror image for component 2 (S = 1 - H).

Layout: every sub-problem restarts one component at backward 0, so the
set of initial conditions that can ever be needed is closed once it holds
(l1, l2, 0, w) and (l1, l2, w, 0) for every w. The jumped part of Phi
(u < k) is kept per layer as an array [init][j][u]; the no-jump part is
closed form and is added on lookup. One layer is a batch of matrix
products over all initial conditions at once.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from config import Config
from utils.errors import HorizonOverflowError
from utils.kernel import sojourn_cdf
from utils.model import BivariateModel, InitialCondition, check_initial, model_fingerprint

logger = logging.getLogger(__name__)

InitKey = Tuple[int, int, int, int]


@dataclass(frozen=True)
class PhiQuery:
    component: int
    init: InitialCondition
    target: int
    final_backward: int
    horizon: int


def _key(init: InitialCondition) -> InitKey:
    return (init.i1, init.i2, init.v1, init.v2)


def _compensated_add(acc, comp, term):
    """Kahan-Babuska step: acc += term with the rounding error carried in comp."""
    y = term - comp
    t = acc + y
    comp[...] = (t - acc) - y
    acc[...] = t


class PhiTable:
    """Solved Phi values for a closed set of initial conditions up to a horizon.

    An entry (init, k) is exact when max(v1, v2) + k <= bound; lookups
    outside that domain raise HorizonOverflowError.
    """

    def __init__(self, model, fingerprint, horizon, bound, keys, requested, jumps, no_jump, alive):
        self.model = model
        self.fingerprint = fingerprint
        self.horizon = horizon
        self.bound = bound
        self.keys: List[InitKey] = keys
        self.index: Dict[InitKey, int] = {key: n for n, key in enumerate(keys)}
        self.requested: Tuple[InitKey, ...] = tuple(requested)
        self._jumps = jumps        # component -> [k][n][j][u]
        self._no_jump = no_jump    # component -> [n][k]
        self._alive = alive        # [n], both components admissible

    def covers(self, init: InitialCondition, horizon: int) -> bool:
        key = _key(init)
        return (
            key in self.index
            and horizon <= self.horizon
            and max(init.v1, init.v2) + horizon <= self.bound
        )

    def _locate(self, init: InitialCondition, horizon: int) -> int:
        if not self.covers(init, horizon):
            raise HorizonOverflowError(
                f"init {_key(init)} at horizon {horizon} is outside the solved table "
                f"(horizon {self.horizon}, backward bound {self.bound})"
            )
        return self.index[_key(init)]

    def value(self, component: int, init: InitialCondition, target: int,
              final_backward: int, horizon: int) -> float:
        n = self._locate(init, horizon)
        val = 0.0
        if 0 <= final_backward < horizon:
            val += float(self._jumps[component][horizon][n, target, final_backward])
        own, v_own = init.state(component), init.backward(component)
        if target == own and final_backward == horizon + v_own:
            val += float(self._no_jump[component][n, horizon])
        return val

    def distribution(self, component: int, init: InitialCondition, horizon: int) -> np.ndarray:
        """Phi over (j, u) as an array [j][u], u = 0..horizon + v_own."""
        n = self._locate(init, horizon)
        own, v_own = init.state(component), init.backward(component)
        out = np.zeros((self.model.d, horizon + v_own + 1))
        out[:, :horizon] = self._jumps[component][horizon][n, :, :horizon]
        out[own, horizon + v_own] += self._no_jump[component][n, horizon]
        return out

    def marginal(self, component: int, init: InitialCondition, horizon: int) -> np.ndarray:
        """Phi summed over the final backward, as an array over j."""
        n = self._locate(init, horizon)
        out = self._jumps[component][horizon][n, :, :horizon].sum(axis=1)
        out[init.state(component)] += self._no_jump[component][n, horizon]
        return out

    def marginal_curve(self, component: int, init: InitialCondition, horizon: int = None) -> np.ndarray:
        """Phi summed over the final backward as an array [j][k], k = 0..horizon."""
        horizon = self.horizon if horizon is None else horizon
        return np.stack([self.marginal(component, init, k) for k in range(horizon + 1)], axis=1)

    def entries(self) -> Iterable[Tuple[InitialCondition, int]]:
        """Every admissible (init, k) the table holds exactly."""
        for n, key in enumerate(self.keys):
            if not self._alive[n]:
                continue
            init = InitialCondition(*key)
            for k in range(min(self.horizon, self.bound - max(key[2], key[3])) + 1):
                yield init, k


def solve_grid(model: BivariateModel, inits, horizon: int, config=Config) -> PhiTable:
    """Fill the Phi table forward in k for both components.

    Args:
        model: A valid bivariate model
        inits: Initial conditions that must be answerable
        horizon: Last layer K to solve
        config: Configuration class providing the table bounds

    Returns:
        PhiTable holding every layer 0..K for the closure of `inits`

    Raises:
        DegenerateBackwardError: a requested init conditions on an impossible age
        HorizonOverflowError: K or K + max backward exceeds the configured bounds
    """
    inits = list(inits)
    for init in inits:
        check_initial(model, init)
    v_max = max((max(init.v1, init.v2) for init in inits), default=0)
    bound = horizon + v_max
    if horizon < 0 or horizon > config.PHI_MAX_HORIZON or bound > config.PHI_MAX_BACKWARD:
        raise HorizonOverflowError(
            f"horizon {horizon} with backward {v_max} exceeds table bounds "
            f"({config.PHI_MAX_HORIZON}, {config.PHI_MAX_BACKWARD})"
        )

    d, K = model.d, horizon
    # ages at or past Kmax have zero survival, so w never needs to go further
    wc = min(bound, model.kmax - 1)
    ws = range(wc + 1)

    keys: List[InitKey] = [(l1, l2, 0, w) for w in ws for l1 in range(d) for l2 in range(d)]
    keys += [(l1, l2, w, 0) for w in ws if w > 0 for l1 in range(d) for l2 in range(d)]
    index = {key: n for n, key in enumerate(keys)}
    requested = []
    for init in inits:
        key = _key(init)
        requested.append(key)
        if key not in index:
            index[key] = len(keys)
            keys.append(key)

    N = len(keys)
    arr = np.array(keys, dtype=np.int64)
    states = {1: arr[:, 0], 2: arr[:, 1]}
    backs = {1: arr[:, 2], 2: arr[:, 3]}
    rows = np.arange(N)
    ks = np.arange(K + 1)

    grid = np.meshgrid(np.arange(d), np.arange(d), np.arange(wc + 1), indexing="ij")
    l1s, l2s, w_s = (g.reshape(-1) for g in grid)
    subs = {
        1: np.array([index[(a, b, 0, w)] for a, b, w in zip(l1s, l2s, w_s)]),
        2: np.array([index[(a, b, w, 0)] for a, b, w in zip(l1s, l2s, w_s)]),
    }
    sub_own = {1: l1s, 2: l2s}
    n_sub = len(l1s)

    F, S, q, no_jump, alive = {}, {}, {}, {}, {}
    for a in (1, 2):
        F[a] = sojourn_cdf(model.sojourn(a), int(backs[a].max()) + K + 1)
        S[a] = 1.0 - F[a]
        own, v = states[a], backs[a]
        s0 = S[a][own, v]
        alive[a] = s0 > 0.0
        safe = np.where(alive[a], s0, 1.0)
        surv = S[a][own[:, None], v[:, None] + ks[None, :]]
        no_jump[a] = np.where(alive[a][:, None], surv / safe[:, None], 0.0)
        dens = np.zeros((N, K + 1))
        if K > 0:
            upper = F[a][own[:, None], v[:, None] + ks[None, 1:]]
            lower = F[a][own[:, None], v[:, None] + ks[None, 1:] - 1]
            dens[:, 1:] = np.where(alive[a][:, None], (upper - lower) / safe[:, None], 0.0)
        p_joint = model.own_other_matrix(a)
        q[a] = p_joint[states[1], states[2], :][:, :, None] * dens[:, None, :]  # [n][l][tau]

    u_dim = max(K, 1)
    jumps = {a: np.zeros((K + 1, N, d, u_dim)) for a in (1, 2)}

    def full_other(b, tau):
        """Phi^b(n; l, w, tau) for w = 0..wc, as [n][l][w]."""
        out = np.zeros((N, d, wc + 1))
        upto = min(tau, wc + 1)
        out[:, :, :upto] = jumps[b][tau][:, :, :upto]
        w_nj = backs[b] + tau
        mask = w_nj <= wc
        out[rows[mask], states[b][mask], w_nj[mask]] += no_jump[b][mask, tau]
        return out

    def restarted_block(a, m):
        """Phi^a at the restarted inits, layer m, as [(l1, l2, w)][j][u], u = 0..m."""
        block = np.zeros((n_sub, d, m + 1))
        if m > 0:
            block[:, :, :m] = jumps[a][m][subs[a], :, :m]
        block[np.arange(n_sub), sub_own[a], m] += S[a][sub_own[a], m]
        return block

    for k in range(1, K + 1):
        layer = {}
        for a in (1, 2):
            b = 2 if a == 1 else 1
            acc = np.zeros((N, d, u_dim))
            comp = np.zeros_like(acc)
            for tau in range(1, k):
                m = k - tau
                other = full_other(b, tau)
                if a == 1:
                    weights = q[1][:, :, tau][:, :, None, None] * other[:, None, :, :]
                else:
                    weights = other[:, :, None, :] * q[2][:, :, tau][:, None, :, None]
                block = restarted_block(a, m)
                term = (weights.reshape(N, n_sub) @ block.reshape(n_sub, d * (m + 1))).reshape(N, d, m + 1)
                _compensated_add(acc[:, :, :m + 1], comp[:, :, :m + 1], term)
            # tau = k: the restarted chain is at its base case and the other
            # component's distribution at k sums to one
            last = q[a][:, :, k] * alive[b][:, None]
            _compensated_add(acc[:, :, :1], comp[:, :, :1], last[:, :, None])
            layer[a] = acc
        for a in (1, 2):
            jumps[a][k] = layer[a]
        logger.debug(f"Phi layer {k}/{K} solved for {N} initial conditions")

    logger.info(f"Solved Phi grid: d={d}, K={K}, {N} initial conditions, backward bound {bound}")
    return PhiTable(
        model=model,
        fingerprint=model_fingerprint(model),
        horizon=K,
        bound=bound,
        keys=keys,
        requested=requested,
        jumps=jumps,
        no_jump=no_jump,
        alive=alive[1] & alive[2],
    )


class PhiSolver:
    """Answers Phi queries for one model, growing its table on demand."""

    def __init__(self, model: BivariateModel, config=Config):
        self.model = model
        self.config = config
        self.fingerprint = model_fingerprint(model)
        self.table = None

    def ensure(self, inits, horizon: int) -> PhiTable:
        inits = list(inits)
        if self.table is not None and all(self.table.covers(init, horizon) for init in inits):
            return self.table
        merged = {_key(init): init for init in inits}
        if self.table is not None:
            for key in self.table.requested:
                merged.setdefault(key, InitialCondition(*key))
            horizon = max(horizon, self.table.horizon)
        self.table = solve_grid(self.model, merged.values(), horizon, self.config)
        return self.table

    def phi(self, query: PhiQuery) -> float:
        table = self.ensure([query.init], query.horizon)
        return table.value(query.component, query.init, query.target,
                           query.final_backward, query.horizon)

    def phi_marginal(self, component: int, init: InitialCondition, target: int, horizon: int) -> float:
        table = self.ensure([init], horizon)
        return float(table.marginal(component, init, horizon)[target])


_solvers: Dict[Tuple[str, type], PhiSolver] = {}


def solver_for(model: BivariateModel, config=Config) -> PhiSolver:
    """Shared solver per model fingerprint and configuration."""
    key = (model_fingerprint(model), config)
    if key not in _solvers:
        if len(_solvers) >= 8:
            _solvers.pop(next(iter(_solvers)))
        _solvers[key] = PhiSolver(model, config)
    return _solvers[key]


def phi(model: BivariateModel, query: PhiQuery, solver: PhiSolver = None) -> float:
    """Phi^a(init; target, final_backward, horizon)."""
    check_initial(model, query.init)
    return (solver or solver_for(model)).phi(query)


def phi_marginal(model: BivariateModel, component: int, init: InitialCondition,
                 target: int, horizon: int, solver: PhiSolver = None) -> float:
    """Phi^a(init; target, ., horizon), summed over the final backward."""
    check_initial(model, init)
    return (solver or solver_for(model)).phi_marginal(component, init, target, horizon)
