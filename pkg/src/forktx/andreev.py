"""Andreev reflection amplitudes at the N/S interfaces ending each arm.

Inside the gap an electron is retroreflected as a hole with unit
probability and phase ``-arccos(eps/delta)``. Above the gap the amplitude is
continued analytically to the real value

    a = eps/delta - sign(eps) * sqrt((eps/delta)**2 - 1),

which is the BTK ratio ``v0/u0`` and decays as ``delta / (2 eps)``. The same
amplitude is used for electron-to-hole and hole-to-electron conversion (no
phase difference between the superconductors).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AndreevModel:
    """Per-arm superconducting gaps, in units of the reference gap.

    A zero gap marks a normal arm. ``hard_cutoff`` switches the above-gap
    amplitude to zero instead of the analytic continuation.
    """

    gaps: tuple
    hard_cutoff: bool = False

    def __post_init__(self):
        gaps = tuple(float(g) for g in self.gaps)
        object.__setattr__(self, "gaps", gaps)
        for j, g in enumerate(gaps):
            if not np.isfinite(g) or g < 0:
                raise DomainError(f"gap delta{j + 2} must be >= 0, got {g}", key=f"delta{j + 2}")

    def arm(self, j):
        """Single-arm model for outgoing arm ``j`` (1-based)."""
        return AndreevModel((self.gaps[j - 1],), self.hard_cutoff)

    def normal(self):
        return AndreevModel((0.0,) * len(self.gaps), self.hard_cutoff)


def andreev_amplitude(eps, delta, hard_cutoff=False):
    """Electron-hole conversion amplitude at energy ``eps`` for gap ``delta``.

    Vectorized over ``eps``; returns a complex scalar for scalar input.
    """
    if delta < 0:
        raise DomainError(f"gap must be >= 0, got {delta}", key="delta")
    e = np.asarray(eps, dtype=float)
    if delta == 0:
        out = np.zeros(e.shape, dtype=np.complex128)
        return out if out.ndim else complex(out)
    x = e / delta
    inside = np.abs(x) < 1
    with np.errstate(invalid="ignore"):
        sub = x - 1j * np.sqrt(np.where(inside, 1 - x * x, 0.0))
        above = x - np.sign(x) * np.sqrt(np.where(inside, 0.0, x * x - 1))
    if hard_cutoff:
        above = np.zeros_like(above)
    out = np.where(inside, sub, above).astype(np.complex128)
    return out if out.ndim else complex(out)


def andreev_matrix(eps, model):
    """Diagonal Andreev matrix over the arms, stacked over ``eps``.

    Returns shape ``(m, m)`` for scalar ``eps`` and ``(*eps.shape, m, m)``
    otherwise, with ``m = len(model.gaps)``.
    """
    e = np.asarray(eps, dtype=float)
    m = len(model.gaps)
    out = np.zeros(e.shape + (m, m), dtype=np.complex128)
    for j, g in enumerate(model.gaps):
        out[..., j, j] = andreev_amplitude(e, g, model.hard_cutoff)
    return out
