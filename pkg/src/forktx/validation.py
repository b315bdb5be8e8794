"""Cross-checks of the solver against independent routes.

Each check draws from a seeded generator, so reports are reproducible.
"""

from dataclasses import dataclass

import numpy as np

from .andreev import AndreevModel, andreev_matrix
from .errors import SingularLoopError
from .numerics import unitarity_error
from .transport import (
    _blocks,
    btk_reference,
    conductance_kernel,
    loop_spectral_radius,
    path_sum_amplitudes,
    two_lead_reflection,
    _reflect,
)
from .vertex import VertexParams, star_vertex

DEFAULT_SEED = 20180101


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_error < self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<24} max_error={self.max_error:.3e}  tol={self.tolerance:.0e}"


def _random_vertex(rng, n=3):
    k = (1.0,) + tuple(rng.uniform(0.1, 10.0, size=n - 1))
    return VertexParams(k, rng.uniform(0.0, 10.0))


def _random_device(rng):
    return _random_vertex(rng), AndreevModel(tuple(rng.uniform(0.2, 3.0, size=2)))


def unitarity_sweep(draws=1000, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        k = tuple(rng.uniform(0.1, 10.0, size=3))
        worst = max(worst, unitarity_error(star_vertex(VertexParams(k, rng.uniform(0.0, 10.0)))))
    return CheckResult("unitarity sweep", worst, 1e-12)


def btk_reduction(zs=(0.0, 0.5, 1.0, 3.0), points=601, k=1.0, delta=1.0):
    eps = np.linspace(-3 * delta, 3 * delta, points)
    worst = 0.0
    for z in zs:
        res = two_lead_reflection(VertexParams((k, k), 2 * k * z), AndreevModel((delta,)), eps)
        _, _, g_btk = btk_reference(eps, delta, z)
        worst = max(worst, float(np.max(np.abs(conductance_kernel(res) - g_btk))))
    return CheckResult("BTK reduction", worst, 1e-10)


def draw_convergent(rng, count, max_radius=0.999):
    """Random ``(vertex, model, eps)`` triples whose loop spectral radius < ``max_radius``."""
    out = []
    while len(out) < count:
        vertex, model = _random_device(rng)
        eps = rng.uniform(-3.0, 3.0)
        if loop_spectral_radius(vertex, model, eps) < max_radius:
            out.append((vertex, model, eps))
    return out


def series_equivalence(draws=200, seed=DEFAULT_SEED):
    """Closed-form inverse vs the truncated path sum (no inversion)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for vertex, model, eps in draw_convergent(rng, draws):
        res = _reflect(vertex, model, eps)
        ree, reh, _ = path_sum_amplitudes(vertex, model, eps)
        worst = max(worst, abs(res.r_eh - reh), abs(res.r_ee - ree))
    return CheckResult("series equivalence", worst, 1e-10)


def hole_exit_electron_loop(vertex, model, eps):
    """``T~_h R_eh (I - R_e R_he R_h R_eh)^-1 T_e``: the loop started on the electron side."""
    be, bh = _blocks(vertex)
    d = andreev_matrix(eps, model)
    m = be.R @ d @ bh.R @ d
    x = np.linalg.solve(np.eye(m.shape[-1]) - m, be.T)
    return bh.T_tilde @ d @ x


def ordering_equivalence(draws=200, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for vertex, model, eps in draw_convergent(rng, draws):
        worst = max(worst, abs(_reflect(vertex, model, eps).r_eh - hole_exit_electron_loop(vertex, model, eps)))
    return CheckResult("ordering equivalence", worst, 1e-10)


def subgap_conservation(draws=500, seed=DEFAULT_SEED):
    """``A + B = 1`` below the smaller gap: no quasiparticle leaves through the arms."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    done = 0
    while done < draws:
        vertex, model = _random_device(rng)
        eps = rng.uniform(-1.0, 1.0) * min(model.gaps)
        try:
            res = _reflect(vertex, model, eps)
        except SingularLoopError:
            continue
        worst = max(worst, abs(res.A + res.B - 1.0))
        done += 1
    return CheckResult("sub-gap conservation", worst, 1e-10)


def run_all(seed=DEFAULT_SEED):
    return [
        btk_reduction(),
        unitarity_sweep(seed=seed),
        series_equivalence(seed=seed),
        ordering_equivalence(seed=seed),
        subgap_conservation(seed=seed),
    ]
