"""
Bivariate semi-Markov model: domain types, validation and model files.

A model couples two rating components on one shared label set. Each
component has its own embedded transition law p^a[i_own][i_other][j]
and its own sojourn CDF table F^a[i][k], k = 0..Kmax.
"""
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from config import Config
from utils.errors import (
    DegenerateBackwardError,
    DimensionMismatchError,
    ModelParseError,
    ModelValidationError,
)

logger = logging.getLogger(__name__)

MODEL_FIELDS = ("states", "up1", "down1", "up2", "down2", "kmax", "p1", "p2", "f1", "f2")


def _frozen(array, ndim):
    arr = np.array(array, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"expected a {ndim}-D array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateSpace:
    """Shared label set E with one Up/Down partition per component."""
    labels: Tuple[str, ...]
    up1: Tuple[int, ...]
    down1: Tuple[int, ...]
    up2: Tuple[int, ...]
    down2: Tuple[int, ...]

    @classmethod
    def from_labels(cls, labels, up1, down1, up2, down2):
        labels = tuple(str(label) for label in labels)
        position = {label: n for n, label in enumerate(labels)}

        def indices(names, key):
            try:
                return tuple(sorted(position[str(name)] for name in names))
            except KeyError as e:
                raise ModelParseError(f"{key} names unknown state {e.args[0]!r}") from None

        return cls(
            labels=labels,
            up1=indices(up1, "up1"),
            down1=indices(down1, "down1"),
            up2=indices(up2, "up2"),
            down2=indices(down2, "down2"),
        )

    @property
    def d(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ModelParseError(f"unknown state {label!r}") from None

    def up(self, component: int) -> Tuple[int, ...]:
        return self.up1 if component == 1 else self.up2

    def down(self, component: int) -> Tuple[int, ...]:
        return self.down1 if component == 1 else self.down2

    def is_up(self, component: int, state: int) -> bool:
        return state in self.up(component)


@dataclass(frozen=True)
class MarginalTransitionLaw:
    """Embedded-chain law of one component, p[i_own][i_other][j]."""
    component: int
    p: np.ndarray

    @property
    def d(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class SojournLaw:
    """Cumulative sojourn-time table F[i][k], k = 0..Kmax."""
    component: int
    F: np.ndarray

    @property
    def d(self) -> int:
        return self.F.shape[0]

    @property
    def kmax(self) -> int:
        return self.F.shape[1] - 1

    def cdf(self, state: int, k: int) -> float:
        """F_state(k), equal to 1 past the truncation horizon."""
        if k < 0:
            return 0.0
        if k > self.kmax:
            return 1.0
        return float(self.F[state, k])


@dataclass(frozen=True)
class BivariateModel:
    states: StateSpace
    p1: MarginalTransitionLaw
    p2: MarginalTransitionLaw
    f1: SojournLaw
    f2: SojournLaw

    @property
    def d(self) -> int:
        return self.states.d

    @property
    def kmax(self) -> int:
        return self.f1.kmax

    def transition(self, component: int) -> MarginalTransitionLaw:
        return self.p1 if component == 1 else self.p2

    def sojourn(self, component: int) -> SojournLaw:
        return self.f1 if component == 1 else self.f2

    def own_other_matrix(self, component: int) -> np.ndarray:
        """p^a re-indexed as [i1][i2][j] regardless of which component a is."""
        p = self.transition(component).p
        return p if component == 1 else np.swapaxes(p, 0, 1)


@dataclass(frozen=True)
class InitialCondition:
    """Joint state (i1, i2) and backward recurrence times (v1, v2) at the start."""
    i1: int
    i2: int
    v1: int = 0
    v2: int = 0

    def state(self, component: int) -> int:
        return self.i1 if component == 1 else self.i2

    def backward(self, component: int) -> int:
        return self.v1 if component == 1 else self.v2


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    a3_holds: bool = True
    a3_violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> Dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "a3_holds": self.a3_holds,
            "a3_violations": list(self.a3_violations),
        }


def validate(model: BivariateModel, config=Config) -> ValidationReport:
    """Check every structural and probabilistic invariant of a model.

    Args:
        model: Model to check
        config: Configuration class providing ROW_SUM_TOL and CDF_TERMINAL_TOL

    Returns:
        ValidationReport: empty violation list means valid; a3_holds tells
        whether the Down sets are absorbing (needed for reliability and pricing)
    """
    report = ValidationReport()
    states = model.states
    labels = states.labels
    d = states.d
    everything = set(range(d))

    if d < 2:
        report.violations.append(f"state space needs at least 2 states, got {d}")

    for component in (1, 2):
        up, down = set(states.up(component)), set(states.down(component))
        if up & down:
            shared = ", ".join(labels[i] for i in sorted(up & down))
            report.violations.append(f"up{component} and down{component} overlap on {shared}")
        if up | down != everything:
            missing = ", ".join(labels[i] for i in sorted(everything - (up | down)))
            report.violations.append(f"up{component} and down{component} do not cover {missing}")

    kmax = model.f1.kmax
    if model.f2.kmax != kmax:
        report.violations.append(f"f1 and f2 disagree on Kmax ({kmax} vs {model.f2.kmax})")

    for component in (1, 2):
        p = model.transition(component).p
        name = f"p{component}"
        if p.shape != (d, d, d):
            report.violations.append(f"{name} has shape {p.shape}, expected {(d, d, d)}")
            continue
        if not np.all(np.isfinite(p)):
            report.violations.append(f"{name} has non-finite entries")
        else:
            if np.any(p < 0.0) or np.any(p > 1.0):
                report.violations.append(f"{name} has entries outside [0, 1]")
            sums = p.sum(axis=2)
            for i_own, i_other in zip(*np.nonzero(np.abs(sums - 1.0) > config.ROW_SUM_TOL)):
                report.violations.append(
                    f"{name} row sum {sums[i_own, i_other]:.12g} ≠ 1 at "
                    f"({labels[i_own]},{labels[i_other]})"
                )

        f = model.sojourn(component).F
        name = f"f{component}"
        if f.shape[0] != d or f.shape[1] < 2:
            report.violations.append(f"{name} has shape {f.shape}, expected ({d}, Kmax+1)")
            continue
        if not np.all(np.isfinite(f)):
            report.violations.append(f"{name} has non-finite entries")
            continue
        for i in range(d):
            row = f[i]
            if row[0] != 0.0:
                report.violations.append(f"{name}[{labels[i]}]: F(0) must be 0, got {row[0]:.12g}")
            if np.any(np.diff(row) < 0.0):
                report.violations.append(f"{name}[{labels[i]}]: non-monotone CDF")
            if np.any(row < 0.0) or np.any(row > 1.0 + config.CDF_TERMINAL_TOL):
                report.violations.append(f"{name}[{labels[i]}]: CDF values outside [0, 1]")
            if abs(row[-1] - 1.0) > config.CDF_TERMINAL_TOL:
                report.violations.append(
                    f"{name}[{labels[i]}]: F(Kmax) must be 1, got {row[-1]:.17g}"
                )

    if report.ok:
        for component in (1, 2):
            p = model.transition(component).p
            for i in states.down(component):
                stay = p[i, :, i]
                if np.any(np.abs(stay - 1.0) > config.ROW_SUM_TOL):
                    report.a3_violations.append(
                        f"p{component}: down state {labels[i]} is not absorbing"
                    )
        report.a3_holds = not report.a3_violations
    else:
        report.a3_holds = False

    if report.violations:
        logger.warning(f"Model validation found {len(report.violations)} violation(s)")
    return report


def survival(law: SojournLaw, state: int, backward: int, tol: float = Config.CDF_TERMINAL_TOL) -> float:
    """1 - F(backward), snapped to zero inside the terminal tolerance."""
    s = 1.0 - law.cdf(state, backward)
    return 0.0 if s <= tol else s


def check_initial(model: BivariateModel, init: InitialCondition) -> None:
    """Raise DegenerateBackwardError when an initial condition has probability zero."""
    for component in (1, 2):
        state, backward = init.state(component), init.backward(component)
        if not 0 <= state < model.d:
            raise ModelParseError(f"component {component}: state index {state} out of range")
        if backward < 0:
            raise ModelParseError(f"component {component}: backward must be >= 0, got {backward}")
        if survival(model.sojourn(component), state, backward) == 0.0:
            raise DegenerateBackwardError(component, model.states.labels[state], backward)


def model_from_dict(data: Dict) -> BivariateModel:
    """Build a model from the parsed JSON document (no validation)."""
    if not isinstance(data, dict):
        raise ModelParseError("model document must be a JSON object")
    unknown = sorted(set(data) - set(MODEL_FIELDS))
    if unknown:
        raise ModelParseError(f"unknown model fields: {', '.join(unknown)}")
    missing = [key for key in MODEL_FIELDS if key not in data]
    if missing:
        raise ModelParseError(f"missing model fields: {', '.join(missing)}")

    states = StateSpace.from_labels(
        data["states"], data["up1"], data["down1"], data["up2"], data["down2"]
    )
    d, kmax = states.d, data["kmax"]
    if not isinstance(kmax, int) or kmax < 1:
        raise ModelParseError(f"kmax must be a positive integer, got {kmax!r}")

    try:
        p1, p2 = _frozen(data["p1"], 3), _frozen(data["p2"], 3)
        f1, f2 = _frozen(data["f1"], 2), _frozen(data["f2"], 2)
    except (TypeError, ValueError) as e:
        raise ModelParseError(f"malformed probability array: {e}") from None

    for name, arr in (("p1", p1), ("p2", p2)):
        if arr.shape != (d, d, d):
            raise DimensionMismatchError(f"{name} has shape {arr.shape}, expected {(d, d, d)}")
    for name, arr in (("f1", f1), ("f2", f2)):
        if arr.shape != (d, kmax + 1):
            raise DimensionMismatchError(f"{name} has shape {arr.shape}, expected {(d, kmax + 1)}")

    return BivariateModel(
        states=states,
        p1=MarginalTransitionLaw(1, p1),
        p2=MarginalTransitionLaw(2, p2),
        f1=SojournLaw(1, f1),
        f2=SojournLaw(2, f2),
    )


def model_to_dict(model: BivariateModel) -> Dict:
    labels = model.states.labels

    def names(indices):
        return [labels[i] for i in indices]

    return {
        "states": list(labels),
        "up1": names(model.states.up1),
        "down1": names(model.states.down1),
        "up2": names(model.states.up2),
        "down2": names(model.states.down2),
        "kmax": model.kmax,
        "p1": model.p1.p.tolist(),
        "p2": model.p2.p.tolist(),
        "f1": model.f1.F.tolist(),
        "f2": model.f2.F.tolist(),
    }


def load_model(path, config=Config) -> BivariateModel:
    """Read, parse and validate a model file.

    Args:
        path: Path of the JSON model document
        config: Configuration class for tolerances

    Returns:
        BivariateModel: the validated model

    Raises:
        ModelParseError: unreadable or malformed document
        DimensionMismatchError: arrays disagree with the state space or kmax
        ModelValidationError: an invariant is violated
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ModelParseError(f"cannot read model file {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ModelParseError(f"model file {path} is not valid JSON: {e}") from None

    model = model_from_dict(data)
    report = validate(model, config)
    if not report.ok:
        logger.error(f"Model {path} rejected: {report.violations[0]}")
        raise ModelValidationError(report)

    logger.info(f"Loaded model {path} with d={model.d}, Kmax={model.kmax}")
    return model


def dump_model(model: BivariateModel, path) -> None:
    """Write a model in the same JSON format load_model reads."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=2)
    os.replace(tmp_path, path)


def model_fingerprint(model: BivariateModel) -> str:
    """Hash of every label and probability in the model."""
    digest = hashlib.md5()
    digest.update(json.dumps(model.states.labels).encode())
    for indices in (model.states.up1, model.states.down1, model.states.up2, model.states.down2):
        digest.update(json.dumps(indices).encode())
    for arr in (model.p1.p, model.p2.p, model.f1.F, model.f2.F):
        digest.update(np.ascontiguousarray(arr).tobytes())
    return digest.hexdigest()


def parse_pair(text: str, cast=str) -> Tuple:
    """Split 'A,B' into a typed pair."""
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) != 2 or not all(parts):
        raise ModelParseError(f"expected two comma-separated values, got {text!r}")
    try:
        return cast(parts[0]), cast(parts[1])
    except ValueError:
        raise ModelParseError(f"cannot parse {text!r}") from None


def initial_condition(model: BivariateModel, labels: Sequence, backwards=(0, 0)) -> InitialCondition:
    """InitialCondition from state labels, checked for admissibility."""
    init = InitialCondition(
        i1=model.states.index(labels[0]),
        i2=model.states.index(labels[1]),
        v1=int(backwards[0]),
        v2=int(backwards[1]),
    )
    check_initial(model, init)
    return init
