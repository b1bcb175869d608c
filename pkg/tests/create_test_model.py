import os

import numpy as np
from hypothesis import strategies as st

from utils.model import BivariateModel, dump_model, model_from_dict


def _model(labels, up, down, p1, p2, f1, f2) -> BivariateModel:
    return model_from_dict({
        "states": list(labels),
        "up1": list(up), "down1": list(down),
        "up2": list(up), "down2": list(down),
        "kmax": len(f1[0]) - 1,
        "p1": np.asarray(p1, dtype=float).tolist(),
        "p2": np.asarray(p2, dtype=float).tolist(),
        "f1": np.asarray(f1, dtype=float).tolist(),
        "f2": np.asarray(f2, dtype=float).tolist(),
    })


def example_model() -> BivariateModel:
    """Two states A (Up) and D (Down); component 2 is more likely to default when 1 has."""
    p1 = [[[0.8, 0.2], [0.6, 0.4]],
          [[0.0, 1.0], [0.0, 1.0]]]
    p2 = [[[0.9, 0.1], [0.5, 0.5]],
          [[0.0, 1.0], [0.0, 1.0]]]
    f1 = [[0.0, 0.3, 0.6, 0.85, 1.0],
          [0.0, 0.5, 0.8, 0.9, 1.0]]
    f2 = [[0.0, 0.25, 0.5, 0.75, 1.0],
          [0.0, 0.4, 0.7, 0.9, 1.0]]
    return _model(("A", "D"), ("A",), ("D",), p1, p2, f1, f2)


def random_model(seed, d=3, kmax=6, coupled=True, n_down=1) -> BivariateModel:
    """Random valid model with absorbing Down states (the last `n_down` labels).

    Rows of p are Dirichlet draws; CDF increments are Dirichlet draws over 1..kmax.
    """
    rng = np.random.default_rng(seed)
    labels = [f"S{i}" for i in range(d)]
    up, down = labels[:d - n_down], labels[d - n_down:]

    def transitions():
        if coupled:
            p = rng.dirichlet(np.ones(d), size=(d, d))
        else:
            p = np.repeat(rng.dirichlet(np.ones(d), size=(d, 1)), d, axis=1)
        for i in range(d - n_down, d):
            p[i, :, :] = 0.0
            p[i, :, i] = 1.0
        return p

    def cdfs():
        increments = rng.dirichlet(np.ones(kmax), size=d)
        F = np.zeros((d, kmax + 1))
        F[:, 1:] = np.minimum(np.cumsum(increments, axis=1), 1.0)
        F[:, -1] = 1.0
        return F

    return _model(labels, up, down, transitions(), transitions(), cdfs(), cdfs())


def geometric_cdf(kmax, ratio=0.5):
    """F(k) = 1 - ratio^k, truncated so that F(kmax) = 1."""
    F = 1.0 - ratio ** np.arange(kmax + 1, dtype=float)
    F[-1] = 1.0
    return F


def geometric_model(kmax=8, ratio=0.5) -> BivariateModel:
    """Decoupled model whose sojourns are geometric up to the truncation."""
    row = geometric_cdf(kmax, ratio)
    p = [[[0.7, 0.3], [0.7, 0.3]],
         [[0.0, 1.0], [0.0, 1.0]]]
    return _model(("A", "D"), ("A",), ("D",), p, p, [row, row], [row, row])


def hazard_model(hazard_c, hazard_b, contagion=0.0, kmax=1) -> BivariateModel:
    """Both names jump every period; C (component 1) defaults with hazard_c,
    B with hazard_b, plus `contagion` once C is in default."""
    p1 = [[[1.0 - hazard_c, hazard_c], [1.0 - hazard_c, hazard_c]],
          [[0.0, 1.0], [0.0, 1.0]]]
    p2 = [[[1.0 - hazard_b, hazard_b], [1.0 - hazard_b - contagion, hazard_b + contagion]],
          [[0.0, 1.0], [0.0, 1.0]]]
    F = [[0.0] + [1.0] * kmax, [0.0] + [1.0] * kmax]
    return _model(("A", "D"), ("A",), ("D",), p1, p2, F, F)


def always_up_model(kmax=3) -> BivariateModel:
    """Every state Up except an unreachable D; nothing ever moves."""
    p = [[[1.0, 0.0], [1.0, 0.0]],
         [[0.0, 1.0], [0.0, 1.0]]]
    F = [[0.0] + [1.0] * kmax, [0.0] + [1.0] * kmax]
    return _model(("A", "D"), ("A",), ("D",), p, p, F, F)


@st.composite
def models(draw, min_d=2, max_d=4, max_kmax=10, coupled=None):
    """Hypothesis strategy for random valid models."""
    d = draw(st.integers(min_value=min_d, max_value=max_d))
    kmax = draw(st.integers(min_value=1, max_value=max_kmax))
    seed = draw(st.integers(min_value=0, max_value=2 ** 32 - 1))
    is_coupled = draw(st.booleans()) if coupled is None else coupled
    return random_model(seed, d=d, kmax=kmax, coupled=is_coupled)


def create_sample_model(output_path, model=None):
    """Write a model file for CLI tests."""
    dump_model(model or example_model(), output_path)
    print(f"Sample model created at {output_path}")


if __name__ == "__main__":
    test_files_dir = os.path.join(os.path.dirname(__file__), "test_files")
    os.makedirs(test_files_dir, exist_ok=True)
    create_sample_model(os.path.join(test_files_dir, "example_model.json"))
