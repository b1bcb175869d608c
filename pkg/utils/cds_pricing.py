"""
CDS pricing with a defaultable protection seller.

Component C (the reference name) and component B (the protection seller)
are the two components of a bivariate model; `reference` says which one
is C. Prices are from the protection buyer's side, quoted at time t:
every cash flow at s is discounted to 0 with beta_s and the sum is divided
by beta_t. The initial condition describes both components at time t, so
curve index m corresponds to calendar time t + m.

Premium leg (buyer pays K at s = t..T while the relevant names survive):
    -K sum_s beta_s P(tau > s)
Protection leg (buyer receives 1 - rho_C when C defaults first):
    (1 - rho_C) sum_h beta_h P(tau_C = h, tau_C < tau_B)
Simultaneous default (seller pays a fraction rho_B of the protection):
    (1 - rho_C) rho_B sum_h beta_h P(tau_C = tau_B = h)
Close-out at the seller's default, on the risk-free value P of the rest:
    beta_{tau_B} (rho_B P+ - P-)   (full-expectation mode only)
"""
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from config import Config
from utils.errors import (
    A3ViolationError,
    HorizonOverflowError,
    InitInDownError,
    ModelParseError,
    TMaxTooSmallError,
    ZeroAnnuityError,
)
from utils.model import BivariateModel, InitialCondition, check_initial
from utils.phi_solver import PhiSolver
from utils.reliability import marginal_reliability
from utils.simulator import SimConfig, estimate, simulate
from utils.univariate import UnivariateModel, UnivariateSolver, freeze_component

logger = logging.getLogger(__name__)

PAPER = "paper-proposition"
FULL = "full-expectation"
RISK_FREE = "risk-free"
MODES = (PAPER, FULL)


@dataclass(frozen=True)
class CdsContract:
    maturity: int
    spread: float
    recovery_c: float
    recovery_b: float
    discount: np.ndarray  # beta_s, s = 0..len - 1

    def __post_init__(self):
        if self.maturity < 1:
            raise ModelParseError(f"maturity must be >= 1, got {self.maturity}")
        for name in ("recovery_c", "recovery_b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ModelParseError(f"{name} must lie in [0, 1], got {value}")
        beta = np.asarray(self.discount, dtype=np.float64)
        if beta.ndim != 1 or len(beta) == 0 or np.any(beta <= 0.0):
            raise ModelParseError("discount factors must be a positive 1-D table")
        if len(beta) <= self.maturity:
            raise HorizonOverflowError(
                f"discount table ends at s={len(beta) - 1}, maturity is {self.maturity}"
            )
        if np.any(np.diff(beta) > 0.0):
            logger.warning("Discount factors are not non-increasing")
        beta.setflags(write=False)
        object.__setattr__(self, "discount", beta)

    def with_spread(self, spread: float) -> "CdsContract":
        return replace(self, spread=float(spread))


@dataclass(frozen=True)
class JointDefaultGrid:
    """P(tau_C = hC, tau_B = hB | init at t) for h = t+1..tmax.

    cells[a][b] is hC = t+1+a, hB = t+1+b. tail_c[a] is hC = t+1+a with
    tau_B beyond tmax, tail_b[b] the converse and tail_both both beyond.
    """
    init: InitialCondition
    t: int
    tmax: int
    reference: int
    cells: np.ndarray
    tail_c: np.ndarray
    tail_b: np.ndarray
    tail_both: float
    survival_c: np.ndarray  # R^C(m), m = 0..tmax - t
    survival_b: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t + 1, self.tmax + 1)

    @property
    def residual(self) -> float:
        """Round-off left after summing cells and tails.

        Cells plus tails telescope to R^C(0) R^B(0) = 1, so mass beyond tmax is
        never lost; the unresolved part is carried by the tails and by
        `survival_b[-1]`, reported as the counterparty tail.
        """
        total = self.cells.sum() + self.tail_c.sum() + self.tail_b.sum() + self.tail_both
        return abs(1.0 - total)

    def as_matrix(self) -> np.ndarray:
        """Cells with the tails as last row and column, the simulator's layout."""
        n = len(self.tail_c)
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = self.cells
        out[:n, n] = self.tail_c
        out[n, :n] = self.tail_b
        out[n, n] = self.tail_both
        return out


@dataclass(frozen=True)
class FirstDefaultDistribution:
    times: np.ndarray
    probabilities: np.ndarray  # P(tau = h)
    beyond: float              # P(tau > tmax)


@dataclass
class PricingReport:
    mode: str
    t: int
    maturity: int
    spread: float
    premium: float
    protection: float
    simultaneous: float
    closeout: float
    risk_free_price: float
    annuity: float  # premium leg per unit spread, quoted at t
    tmax: int = None
    residual_mass: float = 0.0
    counterparty_tail: float = None  # R^B(tmax)
    std_error: Optional[float] = None
    leg_std_errors: Optional[Dict[str, float]] = None
    paths: Optional[int] = None
    seed: Optional[int] = None
    semantics: Optional[str] = None
    risky_price: float = field(init=False)
    cva: float = field(init=False)

    def __post_init__(self):
        self.risky_price = self.premium + self.protection + self.simultaneous + self.closeout
        self.cva = self.risk_free_price - self.risky_price

    def legs(self) -> Dict[str, float]:
        return {
            "premium": self.premium,
            "protection": self.protection,
            "simultaneous": self.simultaneous,
            "closeout": self.closeout,
        }

    def as_dict(self) -> Dict:
        data = {
            "mode": self.mode,
            "t": self.t,
            "maturity": self.maturity,
            "spread": self.spread,
            "legs": self.legs(),
            "annuity": self.annuity,
            "risk_free_price": self.risk_free_price,
            "risky_price": self.risky_price,
            "cva": self.cva,
            "tmax": self.tmax,
            "residual_mass": self.residual_mass,
            "counterparty_tail": self.counterparty_tail,
        }
        if self.mode == FULL:
            data.update(std_error=self.std_error, leg_std_errors=self.leg_std_errors,
                        paths=self.paths, seed=self.seed, semantics=self.semantics)
        return data


@dataclass(frozen=True)
class ModeComparison:
    paper: PricingReport
    full: PricingReport

    @property
    def difference(self) -> float:
        return self.full.risky_price - self.paper.risky_price

    @property
    def semantic_gap(self) -> float:
        return self.difference - self.full.closeout

    def as_dict(self) -> Dict:
        return {
            "paper": self.paper.as_dict(),
            "full": self.full.as_dict(),
            "difference": self.difference,
            "closeout": self.full.closeout,
            "semantic_gap": self.semantic_gap,
            "std_error": self.full.std_error,
        }


def load_discount(source: str, tmax: int) -> np.ndarray:
    """Discount factors beta_0..beta_tmax from `flat:RATE` or a CSV `s,beta` file."""
    if source.startswith("flat:"):
        try:
            rate = float(source[len("flat:"):])
        except ValueError:
            raise ModelParseError(f"bad flat discount rate in {source!r}") from None
        if rate <= -1.0:
            raise ModelParseError(f"flat rate must exceed -1, got {rate}")
        return (1.0 + rate) ** -np.arange(tmax + 1, dtype=np.float64)

    if not os.path.exists(source):
        raise ModelParseError(f"discount file {source} not found")
    try:
        with open(source, "r", encoding="utf-8") as f:
            first = f.readline()
        skip = 0 if first.strip()[:1].isdigit() else 1
        table = np.loadtxt(source, delimiter=",", skiprows=skip, ndmin=2)
    except ValueError as e:
        raise ModelParseError(f"cannot parse discount file {source}: {e}") from None
    if table.shape[1] != 2:
        raise ModelParseError(f"discount file {source} must have columns s,beta")
    s = table[:, 0]
    if not np.array_equal(s, np.arange(len(s))):
        raise ModelParseError(f"discount file {source} must list s = 0, 1, 2, ... in order")
    if len(s) <= tmax:
        raise HorizonOverflowError(f"discount file {source} ends at s={len(s) - 1}, need {tmax}")
    return table[:tmax + 1, 1].copy()


def _counterparty(reference: int) -> int:
    if reference not in (1, 2):
        raise ModelParseError(f"reference component must be 1 or 2, got {reference}")
    return 3 - reference


def _require_up(model: BivariateModel, init: InitialCondition, components) -> None:
    for component in components:
        if not model.states.is_up(component, init.state(component)):
            label = model.states.labels[init.state(component)]
            raise InitInDownError(f"component {component} starts in Down state {label}")


def _leg_values(survival: np.ndarray, contract: CdsContract, t: int) -> Tuple[float, float]:
    """Annuity and protection value of a risk-free CDS, discounted to time 0.

    survival[m] = P(tau_C > t + m) for m = 0..T - t.
    """
    T = contract.maturity
    beta = contract.discount[t:T + 1]
    annuity = float(np.dot(beta, survival[:T - t + 1]))
    defaults = survival[:T - t] - survival[1:T - t + 1]
    protection = (1.0 - contract.recovery_c) * float(np.dot(beta[1:], defaults))
    return annuity, protection


def _check_times(contract: CdsContract, t: int) -> None:
    if not 0 <= t < contract.maturity:
        raise ModelParseError(f"valuation time t={t} must satisfy 0 <= t < T={contract.maturity}")


def _univariate_a3(uni: UnivariateModel, tol: float = Config.ROW_SUM_TOL) -> None:
    for i in uni.down:
        if abs(uni.p[i, i] - 1.0) > tol:
            raise A3ViolationError(f"Down state {uni.labels[i]} is not absorbing")


def _reference_survival(model, init, horizon: int, reference: int, solver, config) -> np.ndarray:
    if isinstance(model, UnivariateModel):
        _univariate_a3(model)
        if isinstance(init, InitialCondition):
            state, backward = init.state(reference), init.backward(reference)
        else:
            state, backward = init
        if state not in model.up:
            raise InitInDownError(f"reference starts in Down state {model.labels[state]}")
        return UnivariateSolver(model, horizon).reliability(state, backward, horizon)
    _require_up(model, init, (reference,))
    return marginal_reliability(model, reference, init, horizon, solver, config).values


def price_risk_free_cds(model, init, contract: CdsContract, t: int = 0,
                        reference: int = Config.REFERENCE_COMPONENT,
                        solver: PhiSolver = None, config=Config) -> PricingReport:
    """Price of a CDS whose protection seller cannot default.

    Args:
        model: BivariateModel (C is component `reference`) or a UnivariateModel
        init: InitialCondition, or (state, backward) for a univariate model
        contract: Contract terms and discount table
        t: Valuation time, 0 <= t < T

    Returns:
        PricingReport with mode "risk-free"
    """
    _check_times(contract, t)
    survival = _reference_survival(model, init, contract.maturity - t, reference, solver, config)
    annuity, protection = _leg_values(survival, contract, t)
    beta_t = contract.discount[t]
    premium = -contract.spread * annuity / beta_t
    protection = protection / beta_t
    return PricingReport(
        mode=RISK_FREE,
        t=t,
        maturity=contract.maturity,
        spread=contract.spread,
        premium=premium,
        protection=protection,
        simultaneous=0.0,
        closeout=0.0,
        risk_free_price=premium + protection,
        annuity=annuity / beta_t,
    )


def joint_default_grid(model: BivariateModel, init: InitialCondition, tmax: int, t: int = 0,
                       reference: int = Config.REFERENCE_COMPONENT,
                       solver: PhiSolver = None, config=Config) -> JointDefaultGrid:
    """Product-form joint law of the two default times, conditional on `init`.

    g[hC][hB] = (R^C(hC-1) - R^C(hC)) (R^B(hB-1) - R^B(hB)), times relative to t.
    """
    counterparty = _counterparty(reference)
    check_initial(model, init)
    _require_up(model, init, (reference, counterparty))
    if tmax <= t:
        raise TMaxTooSmallError(f"tmax={tmax} must exceed t={t}")
    n = tmax - t
    rc = marginal_reliability(model, reference, init, n, solver, config).values
    rb = marginal_reliability(model, counterparty, init, n, solver, config).values
    dc = rc[:-1] - rc[1:]
    db = rb[:-1] - rb[1:]
    grid = JointDefaultGrid(
        init=init,
        t=t,
        tmax=tmax,
        reference=reference,
        cells=np.outer(dc, db),
        tail_c=dc * rb[-1],
        tail_b=rc[-1] * db,
        tail_both=float(rc[-1] * rb[-1]),
        survival_c=rc,
        survival_b=rb,
    )
    logger.debug(f"Joint default grid t={t} tmax={tmax}: residual {grid.residual:.3e}")
    return grid


def first_default_dist(grid: JointDefaultGrid) -> FirstDefaultDistribution:
    """P(min(tau_C, tau_B) = h) by inclusion-exclusion over the grid."""
    n = len(grid.tail_c)
    upper_rows = np.array([grid.cells[h, h:].sum() for h in range(n)]) + grid.tail_c
    upper_cols = np.array([grid.cells[h:, h].sum() for h in range(n)]) + grid.tail_b
    # (h, h) is in both sums
    probabilities = upper_rows + upper_cols - np.diag(grid.cells)
    return FirstDefaultDistribution(times=grid.times, probabilities=probabilities,
                                    beyond=grid.tail_both)


def _paper_report(model, init, contract, t, tmax, reference, solver, config) -> PricingReport:
    grid = joint_default_grid(model, init, tmax, t, reference, solver, config)
    if grid.residual > config.RESIDUAL_MASS_TOL:
        raise TMaxTooSmallError(f"joint default grid misses mass {grid.residual:.3e}")
    T = contract.maturity
    n = T - t
    beta = contract.discount
    beta_t = beta[t]
    loss = 1.0 - contract.recovery_c

    both_alive = grid.survival_c[:n + 1] * grid.survival_b[:n + 1]
    annuity = float(np.dot(beta[t:T + 1], both_alive))
    # C first: cells with hB > hC plus the tail beyond tmax
    first = np.array([grid.cells[a, a + 1:].sum() for a in range(n)]) + grid.tail_c[:n]
    same = np.diag(grid.cells)[:n]
    protection = loss * float(np.dot(beta[t + 1:T + 1], first))
    simultaneous = loss * contract.recovery_b * float(np.dot(beta[t + 1:T + 1], same))

    risk_free = price_risk_free_cds(model, init, contract, t, reference, solver, config)
    return PricingReport(
        mode=PAPER,
        t=t,
        maturity=T,
        spread=contract.spread,
        premium=-contract.spread * annuity / beta_t,
        protection=protection / beta_t,
        simultaneous=simultaneous / beta_t,
        closeout=0.0,
        risk_free_price=risk_free.risk_free_price,
        annuity=annuity / beta_t,
        tmax=tmax,
        residual_mass=grid.residual,
        counterparty_tail=float(grid.survival_b[-1]),
    )


class FullExpectation:
    """Pathwise cash flows of the risky CDS on one simulated ensemble.

    Everything that does not depend on the spread is computed once, so the
    price can be re-evaluated for any K on the same paths.
    """

    def __init__(self, model: BivariateModel, init: InitialCondition, contract: CdsContract,
                 t: int, reference: int, paths: int, seed: int, config=Config):
        self.model = model
        self.contract = contract
        self.t = t
        self.reference = reference
        self.counterparty = _counterparty(reference)
        n = contract.maturity - t
        sim = SimConfig(paths=paths, horizon=n, seed=seed, init=init, block_size=config.SIM_BLOCK_SIZE)
        self.ensemble = simulate(model, sim)

        beta = contract.discount[t:contract.maturity + 1]
        self.beta_t = beta[0]
        tau_c = self.ensemble.default_times[reference - 1]
        tau_b = self.ensemble.default_times[self.counterparty - 1]
        tau = np.minimum(tau_c, tau_b)

        alive = tau[:, None] > np.arange(n + 1)[None, :]
        self.annuity_paths = alive @ beta
        loss = 1.0 - contract.recovery_c
        padded = np.append(beta, 0.0)
        c_first = (tau_c <= n) & (tau_c < tau_b)
        same = (tau_c <= n) & (tau_c == tau_b)
        self.protection_paths = np.where(c_first, loss * padded[np.minimum(tau_c, n + 1)], 0.0)
        self.simultaneous_paths = np.where(
            same, loss * contract.recovery_b * padded[np.minimum(tau_c, n + 1)], 0.0
        )

        # close-out: B defaults first, C still alive
        self.closeout_mask = (tau_b <= n) & (tau_b < tau_c)
        self.closeout_beta = np.where(self.closeout_mask, padded[np.minimum(tau_b, n + 1)], 0.0)
        self.closeout_annuity = np.zeros(len(tau))
        self.closeout_protection = np.zeros(len(tau))
        self._value_closeouts(tau_b)

    def _value_closeouts(self, tau_b: np.ndarray) -> None:
        ensemble, c, b = self.ensemble, self.reference - 1, self.counterparty - 1
        rows = np.flatnonzero(self.closeout_mask)
        if rows.size == 0:
            return
        keys = np.stack([
            tau_b[rows],
            ensemble.states[c, rows, tau_b[rows]],
            ensemble.backwards[c, rows, tau_b[rows]],
            ensemble.states[b, rows, tau_b[rows]],
        ], axis=1).astype(np.int64)
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)

        solvers: Dict[int, UnivariateSolver] = {}
        values = np.zeros((len(unique), 2))
        n = self.contract.maturity - self.t
        for m, (when, state, backward, seller_state) in enumerate(unique):
            seller_state = int(seller_state)
            if seller_state not in solvers:
                frozen = freeze_component(self.model, self.reference, seller_state)
                solvers[seller_state] = UnivariateSolver(frozen, n)
            at = self.t + int(when)
            remaining = self.contract.maturity - at
            survival = solvers[seller_state].reliability(int(state), int(backward), remaining)
            values[m] = _leg_values(survival, self.contract, at)
        self.closeout_annuity[rows] = values[inverse, 0]
        self.closeout_protection[rows] = values[inverse, 1]
        logger.debug(f"Valued {len(unique)} distinct close-out states")

    def cashflows(self, spread: float) -> np.ndarray:
        """Per-path discounted cash flows [n][premium, protection, simultaneous, closeout, total]."""
        premium = -spread * self.annuity_paths
        with np.errstate(divide="ignore", invalid="ignore"):
            at = np.where(self.closeout_mask, self.closeout_beta, 1.0)
            value = (self.closeout_protection - spread * self.closeout_annuity) / at
        value = np.where(self.closeout_mask, value, 0.0)
        settle = self.contract.recovery_b * np.maximum(value, 0.0) - np.maximum(-value, 0.0)
        closeout = self.closeout_beta * settle
        flows = np.stack([premium, self.protection_paths, self.simultaneous_paths, closeout], axis=1)
        flows = np.column_stack([flows, flows.sum(axis=1)])
        return flows / self.beta_t

    def price(self, spread: float) -> float:
        result = estimate(self.ensemble, "cds-legs", cashflows=self.cashflows(spread))
        return float(result.value[:4].sum())

    def annuity(self) -> float:
        return float(estimate(self.ensemble, "cds-legs",
                              cashflows=self.annuity_paths[:, None] / self.beta_t).value[0])

    def report(self, spread: float, risk_free_price: float, tmax: int) -> PricingReport:
        result = estimate(self.ensemble, "cds-legs", cashflows=self.cashflows(spread))
        premium, protection, simultaneous, closeout, _ = (float(x) for x in result.value)
        names = ("premium", "protection", "simultaneous", "closeout")
        return PricingReport(
            mode=FULL,
            t=self.t,
            maturity=self.contract.maturity,
            spread=spread,
            premium=premium,
            protection=protection,
            simultaneous=simultaneous,
            closeout=closeout,
            risk_free_price=risk_free_price,
            annuity=self.annuity(),
            tmax=tmax,
            std_error=float(result.std_error[4]),
            leg_std_errors={name: float(e) for name, e in zip(names, result.std_error[:4])},
            paths=result.paths,
            seed=result.seed,
            semantics=result.semantics,
        )


def _risky_setup(model, init, contract, t, tmax, mode, reference):
    if mode not in MODES:
        raise ModelParseError(f"unknown pricing mode {mode!r}, expected one of {', '.join(MODES)}")
    _check_times(contract, t)
    tmax = contract.maturity if tmax is None else tmax
    if tmax < contract.maturity:
        raise TMaxTooSmallError(f"tmax={tmax} is below the maturity {contract.maturity}")
    check_initial(model, init)
    _require_up(model, init, (reference, _counterparty(reference)))
    return tmax


def price_risky_cds(model: BivariateModel, init: InitialCondition, contract: CdsContract,
                    t: int = 0, mode: str = PAPER, tmax: int = None,
                    reference: int = Config.REFERENCE_COMPONENT, paths: int = None,
                    seed: int = None, solver: PhiSolver = None, config=Config) -> PricingReport:
    """Price of a CDS whose protection seller may default.

    Args:
        model: Bivariate model with absorbing Down sets
        init: Both components' state and backward at time t, both in Up
        contract: Contract terms and discount table
        t: Valuation time
        mode: "paper-proposition" (grid summation, no close-out leg) or
              "full-expectation" (Monte Carlo with the close-out leg)
        tmax: Truncation horizon of the joint default grid (default T)
        paths, seed: Monte Carlo settings for full-expectation mode

    Returns:
        PricingReport with the leg breakdown, P, Pi and CVA

    Raises:
        A3ViolationError, InitInDownError, TMaxTooSmallError
    """
    tmax = _risky_setup(model, init, contract, t, tmax, mode, reference)
    if mode == PAPER:
        report = _paper_report(model, init, contract, t, tmax, reference, solver, config)
    else:
        risk_free = price_risk_free_cds(model, init, contract, t, reference, solver, config)
        engine = FullExpectation(model, init, contract, t, reference,
                                 paths or config.SIM_PATHS,
                                 config.SIM_SEED if seed is None else seed, config)
        report = engine.report(contract.spread, risk_free.risk_free_price, tmax)
        rb = marginal_reliability(model, _counterparty(reference), init, tmax - t, solver, config).values
        report.counterparty_tail = float(rb[-1])
    logger.info(f"Priced risky CDS ({mode}): Pi={report.risky_price:.10g}, CVA={report.cva:.10g}")
    return report


def par_spread(model, init, contract: CdsContract, t: int = 0, mode: str = RISK_FREE,
               tmax: int = None, reference: int = Config.REFERENCE_COMPONENT,
               paths: int = None, seed: int = None, solver: PhiSolver = None,
               config=Config) -> float:
    """Spread K* at which the price at t is zero.

    The risk-free and paper-proposition prices are affine in K, so K* is
    the protection-side value over the annuity. The full-expectation price
    is not (the close-out settles on max/min of the remaining value) but is
    decreasing in K; it is solved by root bracketing on common paths.

    Raises:
        ZeroAnnuityError: when the premium annuity is zero
    """
    probe = contract.with_spread(0.0)
    if mode == RISK_FREE:
        report = price_risk_free_cds(model, init, probe, t, reference, solver, config)
    elif mode == PAPER:
        report = price_risky_cds(model, init, probe, t, PAPER, tmax, reference,
                                 solver=solver, config=config)
    elif mode == FULL:
        tmax = _risky_setup(model, init, contract, t, tmax, mode, reference)
        engine = FullExpectation(model, init, contract, t, reference,
                                 paths or config.SIM_PATHS,
                                 config.SIM_SEED if seed is None else seed, config)
        if engine.annuity() <= 0.0:
            raise ZeroAnnuityError("premium annuity is zero")
        at_zero = engine.price(0.0)
        if at_zero <= 0.0:
            return 0.0
        high = max(at_zero / engine.annuity(), 1e-8)
        for _ in range(64):
            if engine.price(high) < 0.0:
                break
            high *= 2.0
        return float(brentq(engine.price, 0.0, high, xtol=1e-14, rtol=1e-12))
    else:
        raise ModelParseError(f"unknown pricing mode {mode!r}")

    if report.annuity <= 0.0:
        raise ZeroAnnuityError("premium annuity is zero")
    return (report.protection + report.simultaneous + report.closeout) / report.annuity


def cva(model: BivariateModel, init: InitialCondition, contract: CdsContract, t: int = 0,
        mode: str = PAPER, **kwargs) -> PricingReport:
    """P_t - Pi_t; the returned report carries the value in `cva` with its legs."""
    return price_risky_cds(model, init, contract, t, mode, **kwargs)


def compare_modes(model: BivariateModel, init: InitialCondition, contract: CdsContract,
                  t: int = 0, tmax: int = None, paths: int = None, seed: int = None,
                  reference: int = Config.REFERENCE_COMPONENT, solver: PhiSolver = None,
                  config=Config) -> ModeComparison:
    """Both pricing modes on one contract; the gap splits into close-out and the rest."""
    paper = price_risky_cds(model, init, contract, t, PAPER, tmax, reference,
                            solver=solver, config=config)
    full = price_risky_cds(model, init, contract, t, FULL, tmax, reference,
                           paths=paths, seed=seed, solver=solver, config=config)
    comparison = ModeComparison(paper=paper, full=full)
    logger.info(f"Mode gap {comparison.difference:.6g}: close-out {full.closeout:.6g}, "
                f"semantic {comparison.semantic_gap:.6g}")
    return comparison
