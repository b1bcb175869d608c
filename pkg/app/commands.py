"""
Command handlers for the engine's command-line interface
"""
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from rich.table import Table

from app import Engine, create_app
from utils.cds_pricing import (
    FULL,
    PAPER,
    RISK_FREE,
    CdsContract,
    compare_modes,
    cva,
    load_discount,
    par_spread,
    price_risk_free_cds,
    price_risky_cds,
)
from utils.errors import EngineError, HorizonOverflowError, ModelParseError, ModelValidationError
from utils.model import initial_condition, parse_pair
from utils.reliability import dependence_ratio, marginal_reliability
from utils.simulator import SimConfig, dump_paths, estimate, simulate

logger = logging.getLogger(__name__)

COMMANDS = ("phi", "reliability", "ratio", "price", "cva", "par-spread", "simulate", "validate")

# fixed column orders
PHI_COLUMNS = ("k", "state", "backward", "probability")
RELIABILITY_COLUMNS = ("k", "component1", "component2", "system")
RATIO_COLUMNS = ("k", "joint", "independent", "ratio")
LEG_COLUMNS = ("leg", "value")
PAR_SPREAD_COLUMNS = ("mode", "spread")
SIMULATE_COLUMNS = ("k", "component1", "se1", "component2", "se2", "system", "se_system")


@dataclass
class RunSpec:
    command: str
    model: str
    component: int = 1
    init: Optional[str] = None
    backward: str = "0,0"
    horizon: Optional[int] = None
    target: Optional[str] = None
    maturity: Optional[int] = None
    spread: float = 0.0
    recovery_c: float = 0.4
    recovery_b: float = 0.4
    discount: str = "flat:0"
    mode: str = PAPER
    paths: Optional[int] = None
    seed: Optional[int] = None
    tmax: Optional[int] = None
    time: int = 0
    out: Optional[str] = None
    paths_out: Optional[str] = None

    def check(self, config) -> None:
        """Raise ModelParseError when a parameter the command needs is missing."""
        if self.command not in COMMANDS:
            raise ModelParseError(f"unknown command {self.command!r}")
        needs = {
            "phi": ("init", "horizon"),
            "reliability": ("init", "horizon"),
            "ratio": ("init", "horizon"),
            "simulate": ("init", "horizon"),
            "price": ("init", "maturity"),
            "cva": ("init", "maturity"),
            "par-spread": ("init", "maturity"),
            "validate": (),
        }[self.command]
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            raise ModelParseError(f"{self.command} needs --{', --'.join(missing)}")
        if self.seed is not None and self.seed < 0:
            raise ModelParseError(f"seed must be >= 0, got {self.seed}")
        if self.paths is not None and self.paths < 1:
            raise ModelParseError(f"paths must be >= 1, got {self.paths}")
        if self.component not in (1, 2):
            raise ModelParseError(f"component must be 1 or 2, got {self.component}")
        if self.horizon is not None and not 0 <= self.horizon <= config.PHI_MAX_HORIZON:
            raise HorizonOverflowError(
                f"horizon {self.horizon} outside 0..{config.PHI_MAX_HORIZON}"
            )


def format_number(value: float, digits: int) -> str:
    return f"{float(value):.{digits}g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence], digits: int) -> None:
    """Header plus rows; floats with `digits` significant digits."""
    def cell(value):
        if isinstance(value, (float, np.floating)):
            return format_number(value, digits)
        return str(value)

    lines = [",".join(header)]
    lines.extend(",".join(cell(value) for value in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")
    logger.info(f"Wrote {len(lines) - 1} rows to {path}")


def write_summary(path: str, summary: Dict) -> None:
    _atomic_write(path, json.dumps(summary, indent=2, default=float) + "\n")


def _summary_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".json"


def _init(model, spec: RunSpec):
    return initial_condition(model, parse_pair(spec.init), parse_pair(spec.backward, int))


def _contract(spec: RunSpec) -> CdsContract:
    tmax = max(spec.maturity, spec.tmax or spec.maturity)
    return CdsContract(
        maturity=spec.maturity,
        spread=spec.spread,
        recovery_c=spec.recovery_c,
        recovery_b=spec.recovery_b,
        discount=load_discount(spec.discount, tmax),
    )


def _render(engine: Engine, title: str, values: Dict) -> None:
    table = Table(title=title)
    table.add_column("Field")
    table.add_column("Value", justify="right")
    for name, value in values.items():
        table.add_row(name, format_number(value, 10) if isinstance(value, float) else str(value))
    engine.console.print(table)


def cmd_validate(engine: Engine, spec: RunSpec) -> Dict:
    try:
        model = engine.load(spec.model)
    except ModelValidationError as e:
        for violation in e.report.violations:
            engine.console.print(f"[red]{violation}[/red]")
        raise
    print("OK")
    return {"status": "OK", "d": model.d, "kmax": model.kmax}


def cmd_phi(engine: Engine, spec: RunSpec) -> Dict:
    model = engine.load(spec.model)
    init = _init(model, spec)
    solver = engine.solver(model)
    table = solver.ensure([init], spec.horizon)
    target = None if spec.target is None else model.states.index(spec.target)

    rows = []
    for k in range(spec.horizon + 1):
        dist = table.distribution(spec.component, init, k)
        for j in range(model.d):
            if target is not None and j != target:
                continue
            for u in range(dist.shape[1]):
                rows.append((k, model.states.labels[j], u, float(dist[j, u])))
    write_csv(spec.out, PHI_COLUMNS, rows, engine.config.CSV_DIGITS)

    final = table.distribution(spec.component, init, spec.horizon)
    summary = {"component": spec.component, "horizon": spec.horizon,
               "total": float(final.sum()), "rows": len(rows)}
    if target is not None:
        summary["marginal"] = solver.phi_marginal(spec.component, init, target, spec.horizon)
    return summary


def cmd_reliability(engine: Engine, spec: RunSpec) -> Dict:
    model = engine.load(spec.model)
    init = _init(model, spec)
    solver = engine.solver(model)
    r1 = marginal_reliability(model, 1, init, spec.horizon, solver, engine.config).values
    r2 = marginal_reliability(model, 2, init, spec.horizon, solver, engine.config).values
    system = r1 * r2
    rows = [(k, float(r1[k]), float(r2[k]), float(system[k])) for k in range(spec.horizon + 1)]
    write_csv(spec.out, RELIABILITY_COLUMNS, rows, engine.config.CSV_DIGITS)
    return {"horizon": spec.horizon, "component1": float(r1[-1]),
            "component2": float(r2[-1]), "system": float(system[-1])}


def cmd_ratio(engine: Engine, spec: RunSpec) -> Dict:
    model = engine.load(spec.model)
    init = _init(model, spec)
    result = dependence_ratio(model, None, None, init, spec.horizon, engine.solver(model), engine.config)
    rows = [(k, float(result.joint[k]), float(result.independent[k]), float(result.values[k]))
            for k in range(spec.horizon + 1)]
    write_csv(spec.out, RATIO_COLUMNS, rows, engine.config.CSV_DIGITS)
    return {"horizon": spec.horizon, "ratio": float(result.values[-1])}


def _price(engine: Engine, spec: RunSpec):
    model = engine.load(spec.model)
    init = _init(model, spec)
    contract = _contract(spec)
    solver = engine.solver(model)
    if spec.mode == RISK_FREE:
        return price_risk_free_cds(model, init, contract, spec.time, solver=solver, config=engine.config)
    return price_risky_cds(model, init, contract, spec.time, spec.mode, spec.tmax,
                           paths=spec.paths, seed=spec.seed, solver=solver, config=engine.config)


def _write_report(engine: Engine, spec: RunSpec, report) -> Dict:
    rows = [(name, float(value)) for name, value in report.legs().items()]
    rows += [("risky_price", float(report.risky_price)),
             ("risk_free_price", float(report.risk_free_price)),
             ("cva", float(report.cva))]
    write_csv(spec.out, LEG_COLUMNS, rows, engine.config.CSV_DIGITS)
    _render(engine, f"CDS ({report.mode})", dict(rows))
    return report.as_dict()


def cmd_price(engine: Engine, spec: RunSpec) -> Dict:
    return _write_report(engine, spec, _price(engine, spec))


def cmd_cva(engine: Engine, spec: RunSpec) -> Dict:
    if spec.mode == RISK_FREE:
        raise ModelParseError("cva needs a risky pricing mode")
    model = engine.load(spec.model)
    init = _init(model, spec)
    if spec.mode == FULL:
        comparison = compare_modes(model, init, _contract(spec), spec.time, spec.tmax, spec.paths,
                                   spec.seed, solver=engine.solver(model), config=engine.config)
        summary = _write_report(engine, spec, comparison.full)
        summary["comparison"] = comparison.as_dict()
        return summary
    report = cva(model, init, _contract(spec), spec.time, spec.mode, tmax=spec.tmax,
                 solver=engine.solver(model), config=engine.config)
    return _write_report(engine, spec, report)


def cmd_par_spread(engine: Engine, spec: RunSpec) -> Dict:
    model = engine.load(spec.model)
    init = _init(model, spec)
    value = par_spread(model, init, _contract(spec), spec.time, spec.mode, spec.tmax,
                       paths=spec.paths, seed=spec.seed, solver=engine.solver(model),
                       config=engine.config)
    write_csv(spec.out, PAR_SPREAD_COLUMNS, [(spec.mode, float(value))], engine.config.CSV_DIGITS)
    return {"mode": spec.mode, "spread": value}


def cmd_simulate(engine: Engine, spec: RunSpec) -> Dict:
    model = engine.load(spec.model)
    init = _init(model, spec)
    sim = SimConfig(
        paths=spec.paths or engine.config.SIM_PATHS,
        horizon=spec.horizon,
        seed=engine.config.SIM_SEED if spec.seed is None else spec.seed,
        init=init,
        block_size=engine.config.SIM_BLOCK_SIZE,
    )
    ensemble = simulate(model, sim)
    curves = [estimate(ensemble, "reliability", component=c) for c in (1, 2, 0)]
    rows = []
    for k in range(spec.horizon + 1):
        row: List = [k]
        for curve in curves:
            row += [float(curve.value[k]), float(curve.std_error[k])]
        rows.append(row)
    write_csv(spec.out, SIMULATE_COLUMNS, rows, engine.config.CSV_DIGITS)
    if spec.paths_out:
        dump_paths(ensemble, spec.paths_out)
    return {
        "reliability": [curve.as_dict() for curve in curves],
        "joint_default": estimate(ensemble, "joint-default").as_dict(),
        "a3_violations": ensemble.a3_violations(),
    }


HANDLERS: Dict[str, Callable[[Engine, RunSpec], Dict]] = {
    "validate": cmd_validate,
    "phi": cmd_phi,
    "reliability": cmd_reliability,
    "ratio": cmd_ratio,
    "price": cmd_price,
    "cva": cmd_cva,
    "par-spread": cmd_par_spread,
    "simulate": cmd_simulate,
}


def run(spec: RunSpec, engine: Engine = None) -> int:
    """Run one command; returns the process exit status."""
    engine = engine or create_app()
    try:
        spec.check(engine.config)
        if spec.command != "validate" and spec.out is None:
            spec.out = os.path.join(engine.config.OUTPUT_DIR, f"{spec.command}.csv")
        summary = HANDLERS[spec.command](engine, spec)
        if spec.out is not None:
            write_summary(_summary_path(spec.out), summary)
        return 0
    except EngineError as e:
        logger.error(f"{spec.command} failed: {e}")
        engine.console.print(f"[red]error:[/red] {e}")
        return e.exit_code
