"""Normal-state scattering matrix of a star vertex joining 2 or 3 leads.

Each lead is a one-dimensional ballistic wire with Fermi wavenumber ``k_i``.
Continuity of the wavefunction at the node plus flux conservation with an
effective point barrier ``K`` give the closed form

    S = 2 / (sum(k) + iK) * sqrt(k) sqrt(k)^T - I,

which is unitary and symmetric for every positive ``k`` and real ``K``.
Wavenumbers are taken at the Fermi level, so ``S`` is energy independent.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class VertexParams:
    """Wavenumbers of the joined leads (in units of ``k[0]``) and barrier ``K``.

    Lead 0 is the normal injector; the others are the outgoing arms.
    """

    k: tuple
    K: float = 0.0

    def __post_init__(self):
        k = tuple(float(x) for x in self.k)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "K", float(self.K))
        if len(k) not in (2, 3):
            raise DomainError(f"a vertex joins 2 or 3 leads, got {len(k)}", key="k")
        for i, ki in enumerate(k):
            if not np.isfinite(ki) or ki <= 0:
                raise DomainError(f"wavenumber k{i + 1} must be positive, got {ki}", key=f"k{i + 1}")
        if not np.isfinite(self.K) or self.K < 0:
            raise DomainError(f"barrier K must be finite and >= 0, got {self.K}", key="K")

    @property
    def n(self):
        return len(self.k)

    @classmethod
    def three_lead(cls, k2=1.0, k3=1.0, K=0.0):
        return cls((1.0, k2, k3), K)

    def arm(self, j):
        """Two-lead vertex made of the injector and outgoing arm ``j`` (1-based)."""
        return VertexParams((self.k[0], self.k[j]), self.K)


@dataclass(frozen=True)
class LeadBlocks:
    """Decomposition of ``S`` around the injector lead.

    ``T`` holds amplitudes from lead 1 into the arms, ``T_tilde`` those from
    the arms back into lead 1, ``R`` the arm-to-arm block.
    """

    r11: complex
    T: np.ndarray
    T_tilde: np.ndarray
    R: np.ndarray

    def assemble(self):
        n = self.R.shape[0] + 1
        s = np.empty((n, n), dtype=np.complex128)
        s[0, 0] = self.r11
        s[1:, 0] = self.T
        s[0, 1:] = self.T_tilde
        s[1:, 1:] = self.R
        return s


def star_vertex(params):
    """Electron-sector scattering matrix ``S[i, j]`` (amplitude from j into i)."""
    k = np.asarray(params.k, dtype=float)
    u = np.sqrt(k)
    return 2.0 / (k.sum() + 1j * params.K) * np.outer(u, u) - np.eye(k.size)


def hole_vertex(s_e):
    """Hole-sector matrix: the entrywise complex conjugate of ``s_e``."""
    s_e = np.asarray(s_e, dtype=np.complex128)
    if s_e.ndim != 2 or s_e.shape[0] != s_e.shape[1]:
        raise DimensionError(f"expected a square matrix, got {s_e.shape}")
    return np.conj(s_e)


def lead_blocks(s):
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 2:
        raise DimensionError(f"lead_blocks needs an n x n matrix with n >= 2, got {s.shape}")
    return LeadBlocks(
        r11=complex(s[0, 0]),
        T=s[1:, 0].copy(),
        T_tilde=s[0, 1:].copy(),
        R=s[1:, 1:].copy(),
    )
