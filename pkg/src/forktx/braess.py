"""Escape probability of the normal fork with and without the inter-arm link.

With the link (coherent node) an electron leaves lead 1 with probability
``D = 1 - |r11|^2``. Without it the two arms act as independent two-lead
junctions that each receive half of the incident flux. The Braess paradox
is ``D_classical > D_quantum``: adding the coherent link lowers the total
transmission.

The closed forms below use plain arithmetic, so ``fractions.Fraction``
inputs give exact results when ``K = 0``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .vertex import VertexParams, star_vertex

PARADOX_TOL = 1e-12


@dataclass(frozen=True)
class BraessPoint:
    k2: float
    k3: float
    K: float
    D_quantum: float
    D_classical: float

    @property
    def paradox(self):
        return self.D_classical > self.D_quantum + PARADOX_TOL


@dataclass(frozen=True)
class BraessScan:
    points: list

    @property
    def paradox_fraction(self):
        if not self.points:
            return 0.0
        return sum(p.paradox for p in self.points) / len(self.points)


def _unpack(params):
    if isinstance(params, VertexParams):
        if params.n != 3:
            raise DomainError("Braess comparison needs a 3-lead vertex", key="k")
        return params.k[0], params.k[1], params.k[2], params.K
    k1, k2, k3, K = params
    for name, v in (("k1", k1), ("k2", k2), ("k3", k3)):
        if v <= 0:
            raise DomainError(f"{name} must be positive, got {v}", key=name)
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}", key="K")
    return k1, k2, k3, K


def transmission_quantum(params):
    """``4 k1 (k2 + k3) / ((k1 + k2 + k3)^2 + K^2)``, i.e. ``1 - |r11|^2``.

    ``params`` is a :class:`VertexParams` or a tuple ``(k1, k2, k3, K)``;
    tuples keep exact arithmetic types such as ``Fraction``.
    """
    k1, k2, k3, K = _unpack(params)
    s = k1 + k2 + k3
    return 4 * k1 * (k2 + k3) / (s * s + K * K)


def transmission_quantum_matrix(params):
    """Same quantity read off the scattering matrix element ``r11``."""
    return 1.0 - abs(star_vertex(params)[0, 0]) ** 2


def _two_lead(k1, kj, K):
    return 4 * k1 * kj / ((k1 + kj) ** 2 + K * K)


def transmission_classical(params, weighted=True):
    """Total transmission of two decoupled injector-arm junctions.

    With ``weighted=True`` each channel carries half the incident flux,
    which gives ``2 k1 k2/(k1 + k2)^2 + 2 k1 k3/(k1 + k3)^2`` at ``K = 0``.
    ``weighted=False`` adds the two channel probabilities unweighted.
    """
    k1, k2, k3, K = _unpack(params)
    total = _two_lead(k1, k2, K) + _two_lead(k1, k3, K)
    return total / 2 if weighted else total


def _axis(rng, name):
    lo, hi, steps = rng
    if lo <= 0 and name != "K":
        raise DomainError(f"{name} range must be positive", key=name)
    if name == "K" and lo < 0:
        raise DomainError("K range must be >= 0", key=name)
    if hi < lo:
        raise DomainError(f"{name} range has max < min", key=name)
    if lo == hi:
        return np.array([float(lo)])
    if steps < 2:
        raise DomainError(f"{name} range needs at least 2 steps", key=name)
    return np.linspace(lo, hi, int(steps))


def braess_scan(k2_range, k3_range, K_range, weighted=True):
    """Evaluate both probabilities on a ``(min, max, steps)`` grid per axis.

    Points are ordered by ``(K, k2, k3)``. A degenerate range (``min == max``)
    contributes a single value.
    """
    k2s = _axis(k2_range, "k2")
    k3s = _axis(k3_range, "k3")
    Ks = _axis(K_range, "K")
    points = []
    for K in Ks:
        for k2 in k2s:
            for k3 in k3s:
                p = (1.0, float(k2), float(k3), float(K))
                points.append(
                    BraessPoint(
                        float(k2), float(k3), float(K),
                        float(transmission_quantum(p)),
                        float(transmission_classical(p, weighted)),
                    )
                )
    return BraessScan(points)
