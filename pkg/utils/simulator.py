"""
Monte Carlo simulator of the coupled rating process.

Each component holds its state for a sojourn drawn from its own CDF. At a
jump the new state is drawn from p^a indexed by the component's state and
the other component's state at that instant; simultaneous jumps both read
the pre-jump states.

Paths are simulated in blocks of `SIM_BLOCK_SIZE`. Block b draws from
PCG64(SeedSequence(seed, spawn_key=(b,))), so any block can be reproduced
alone and a run split across workers gives the same ensemble as a serial one.
"""
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import Config
from utils.errors import EmptyEnsembleError, HorizonOverflowError, ModelParseError
from utils.kernel import sojourn_cdf
from utils.model import BivariateModel, InitialCondition, check_initial

logger = logging.getLogger(__name__)

SEMANTICS = "jump-time-states"
FUNCTIONALS = ("state-dist", "reliability", "joint-default", "cds-legs")


@dataclass(frozen=True)
class SimConfig:
    paths: int
    horizon: int
    seed: int
    init: InitialCondition
    semantics: str = SEMANTICS
    block_size: int = Config.SIM_BLOCK_SIZE

    def __post_init__(self):
        if self.paths < 1:
            raise ModelParseError(f"paths must be >= 1, got {self.paths}")
        if self.horizon < 1:
            raise ModelParseError(f"horizon must be >= 1, got {self.horizon}")
        if self.seed < 0:
            raise ModelParseError(f"seed must be >= 0, got {self.seed}")
        if self.block_size < 1:
            raise ModelParseError(f"block size must be >= 1, got {self.block_size}")
        if self.semantics != SEMANTICS:
            raise ModelParseError(f"unsupported semantics {self.semantics!r}")


@dataclass(frozen=True)
class PathRecord:
    """One simulated path. Event lists start with the initial state at time 0."""
    path_id: int
    events1: List[Tuple[int, int]]
    events2: List[Tuple[int, int]]
    tau1: Optional[int]  # None when no default within the horizon
    tau2: Optional[int]

    def events(self, component: int) -> List[Tuple[int, int]]:
        return self.events1 if component == 1 else self.events2

    def tau(self, component: int) -> Optional[int]:
        return self.tau1 if component == 1 else self.tau2


@dataclass
class Ensemble:
    """Trajectories of all paths.

    states[c][n][t] and backwards[c][n][t] for t = 0..horizon, with c = 0 for
    component 1. default_times[c][n] is the first t with the component in
    Down, or horizon + 1 when it never defaults within the horizon.
    """
    model: BivariateModel
    config: SimConfig
    states: np.ndarray
    backwards: np.ndarray
    default_times: np.ndarray
    seed: int = field(init=False)

    def __post_init__(self):
        self.seed = self.config.seed

    @property
    def n_paths(self) -> int:
        return self.states.shape[1]

    @property
    def horizon(self) -> int:
        return self.states.shape[2] - 1

    @property
    def censored(self) -> int:
        return self.horizon + 1

    def path(self, n: int) -> PathRecord:
        events = []
        for c in range(2):
            jumps = np.flatnonzero(self.backwards[c, n, 1:] == 0) + 1
            events.append([(0, int(self.states[c, n, 0]))] +
                          [(int(t), int(self.states[c, n, t])) for t in jumps])
        taus = [int(t) if t <= self.horizon else None for t in self.default_times[:, n]]
        return PathRecord(path_id=n, events1=events[0], events2=events[1], tau1=taus[0], tau2=taus[1])

    def a3_violations(self) -> int:
        """Number of paths on which a component leaves its Down set."""
        bad = np.zeros(self.n_paths, dtype=bool)
        for c in range(2):
            down = np.isin(self.states[c], self.model.states.down(c + 1))
            entered = np.maximum.accumulate(down, axis=1)
            bad |= np.any(entered & ~down, axis=1)
        return int(bad.sum())


@dataclass(frozen=True)
class Estimate:
    functional: str
    value: np.ndarray
    std_error: np.ndarray
    paths: int
    seed: int
    semantics: str = SEMANTICS

    def as_dict(self) -> Dict:
        return {
            "functional": self.functional,
            "value": np.asarray(self.value).tolist(),
            "std_error": np.asarray(self.std_error).tolist(),
            "paths": self.paths,
            "seed": self.seed,
            "semantics": self.semantics,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _draw_sojourn(F: np.ndarray, state: np.ndarray, age: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Residual sojourn beyond `age` by inversion of the conditioned CDF."""
    rows = F[state]
    floor = rows[np.arange(len(state)), age]
    target = floor + u * (1.0 - floor)
    total = (rows < target[:, None]).sum(axis=1)
    return np.maximum(total - age, 1)


def _draw_state(cum: np.ndarray, own: np.ndarray, other: np.ndarray, u: np.ndarray) -> np.ndarray:
    rows = cum[own, other]
    return np.minimum((rows < u[:, None]).sum(axis=1), cum.shape[-1] - 1)


def _simulate_block(sim: SimConfig, block: int, n: int, F, cum):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(sim.seed, spawn_key=(block,))))
    H = sim.horizon
    states = np.empty((2, n, H + 1), dtype=np.uint8)
    backwards = np.empty((2, n, H + 1), dtype=np.uint16)

    state = [np.full(n, sim.init.i1, dtype=np.intp), np.full(n, sim.init.i2, dtype=np.intp)]
    age = [np.full(n, sim.init.v1, dtype=np.intp), np.full(n, sim.init.v2, dtype=np.intp)]
    u = rng.random((2, n))
    remaining = [_draw_sojourn(F[c], state[c], age[c], u[c]) for c in range(2)]
    for c in range(2):
        states[c, :, 0] = state[c]
        backwards[c, :, 0] = age[c]

    for t in range(1, H + 1):
        # targets and fresh sojourns drawn for every path so stream use is fixed
        u_state = rng.random((2, n))
        u_sojourn = rng.random((2, n))
        before = [s.copy() for s in state]
        for c in range(2):
            remaining[c] -= 1
            age[c] += 1
            jump = remaining[c] == 0
            if jump.any():
                new = _draw_state(cum[c], before[c][jump], before[1 - c][jump], u_state[c, jump])
                state[c][jump] = new
                age[c][jump] = 0
                remaining[c][jump] = _draw_sojourn(F[c], new, age[c][jump], u_sojourn[c, jump])
            states[c, :, t] = state[c]
            backwards[c, :, t] = age[c]
    return states, backwards


def simulate(model: BivariateModel, sim: SimConfig) -> Ensemble:
    """Simulate `sim.paths` independent trajectories up to `sim.horizon`.

    Args:
        model: A valid bivariate model
        sim: Path count, horizon, seed and initial condition

    Returns:
        Ensemble with state and backward trajectories and default times
    """
    check_initial(model, sim.init)
    if max(sim.init.v1, sim.init.v2) + sim.horizon > np.iinfo(np.uint16).max:
        raise HorizonOverflowError("backward recurrence times do not fit the trajectory store")
    if model.d > np.iinfo(np.uint8).max:
        raise HorizonOverflowError(f"{model.d} states do not fit the trajectory store")

    width = max(sim.init.v1, sim.init.v2) + model.kmax + 1
    F = [sojourn_cdf(model.sojourn(c), width) for c in (1, 2)]
    cum = [np.cumsum(model.transition(c).p, axis=-1) for c in (1, 2)]  # [own][other][j]

    blocks = []
    for block, start in enumerate(range(0, sim.paths, sim.block_size)):
        n = min(sim.block_size, sim.paths - start)
        blocks.append(_simulate_block(sim, block, n, F, cum))
    states = np.concatenate([b[0] for b in blocks], axis=1)
    backwards = np.concatenate([b[1] for b in blocks], axis=1)

    default_times = np.full((2, sim.paths), sim.horizon + 1, dtype=np.int32)
    for c in range(2):
        down = np.isin(states[c], model.states.down(c + 1))
        hit = down.any(axis=1)
        default_times[c, hit] = np.argmax(down[hit], axis=1)

    ensemble = Ensemble(model=model, config=sim, states=states, backwards=backwards,
                        default_times=default_times)
    logger.info(f"Simulated {sim.paths} paths to horizon {sim.horizon} (seed {sim.seed})")
    return ensemble


def _mean_and_error(samples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Column means with compensated sums and their standard errors."""
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[0]
    flat = samples.reshape(n, -1)
    mean = np.array([math.fsum(flat[:, m]) for m in range(flat.shape[1])]) / n
    if n > 1:
        centered = flat - mean
        var = np.array([math.fsum(centered[:, m] ** 2) for m in range(flat.shape[1])]) / (n - 1)
        error = np.sqrt(var / n)
    else:
        error = np.zeros_like(mean)
    return mean.reshape(samples.shape[1:]), error.reshape(samples.shape[1:])


def estimate(ensemble: Ensemble, functional: str, component: int = 1, k: int = None,
             cashflows: np.ndarray = None) -> Estimate:
    """Sample mean and standard error of a path functional.

    functional:
        state-dist    P(Z^a(k) = j), j over the state space
        reliability   P(tau > k), k = 0..horizon; component 0 for the system
        joint-default P(tau1 = h1, tau2 = h2), h = 1..horizon; the last row and
                      column hold the mass censored beyond the horizon
        cds-legs      means of caller-supplied per-path cash flows [n][leg]
    """
    if ensemble.n_paths == 0:
        raise EmptyEnsembleError("no paths to estimate from")
    if functional not in FUNCTIONALS:
        raise ModelParseError(f"unknown functional {functional!r}")

    H = ensemble.horizon
    if functional == "state-dist":
        k = H if k is None else k
        if not 0 <= k <= H:
            raise HorizonOverflowError(f"k={k} outside the simulated horizon {H}")
        at_k = ensemble.states[component - 1, :, k]
        samples = at_k[:, None] == np.arange(ensemble.model.d)[None, :]
    elif functional == "reliability":
        taus = ensemble.default_times if component == 0 else ensemble.default_times[[component - 1]]
        first = taus.min(axis=0)
        samples = first[:, None] > np.arange(H + 1)[None, :]
    elif functional == "joint-default":
        # a Down initial state (tau = 0) is counted in h = 1
        h1 = np.clip(ensemble.default_times[0], 1, H + 1) - 1
        h2 = np.clip(ensemble.default_times[1], 1, H + 1) - 1
        samples = np.zeros((ensemble.n_paths, H + 1, H + 1), dtype=bool)
        samples[np.arange(ensemble.n_paths), h1, h2] = True
    else:
        if cashflows is None or len(cashflows) != ensemble.n_paths:
            raise ModelParseError("cds-legs needs one row of cash flows per path")
        samples = cashflows

    value, error = _mean_and_error(samples)
    return Estimate(functional=functional, value=value, std_error=error,
                    paths=ensemble.n_paths, seed=ensemble.seed)


def dump_paths(ensemble: Ensemble, path) -> None:
    """Write one `path_id,component,time,state` row per event, initial states included."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    labels = ensemble.model.states.labels
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "w", encoding="utf-8", newline="") as f:
        f.write("path_id,component,time,state\n")
        for n in range(ensemble.n_paths):
            record = ensemble.path(n)
            for component in (1, 2):
                for t, state in record.events(component):
                    f.write(f"{n},{component},{t},{labels[state]}\n")
    os.replace(tmp_path, path)
    logger.info(f"Wrote {ensemble.n_paths} paths to {path}")
