"""Reflection amplitudes, conductance kernels and voltage spectra.

An electron injected from lead 1 enters the arms through ``T_e``, is
converted into a hole at the superconducting interfaces, and bounces between
the node and the interfaces until it leaves through lead 1. Summing every
such path gives the geometric series

    r_eh = T~_h (I - R_eh R_e R_he R_h)^-1 R_eh T_e
    r_ee = r11 + T~_e R_he R_h R_eh (I - R_e R_he R_h R_eh)^-1 T_e

The arms have zero length, so no propagation phases appear. All energies are
in units of the reference gap; all kernels are in units of the ballistic
conductance of lead 1. Functions are vectorized over energy.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import numerics
from .andreev import AndreevModel, andreev_matrix
from .errors import DomainError, SingularLoopError, SingularMatrixError
from .vertex import VertexParams, hole_vertex, lead_blocks, star_vertex

QUANTUM = "quantum"
CLASSICAL = "classical"
MODES = (QUANTUM, CLASSICAL)

#: Offset applied to grid points that land on a gap edge (square-root branch point).
EDGE_NUDGE = 1e-9
#: Offset applied once to energies where the reflection loop is singular.
SINGULAR_NUDGE = 1e-9


@dataclass(frozen=True)
class DeviceConfig:
    """Three-terminal fork: vertex, arm gaps, coherence mode and temperature.

    ``mode="quantum"`` keeps the two arms coherently linked through the node
    (arm separation below the decoherence length). ``mode="classical"``
    replaces the node by two independent two-lead junctions whose currents add.
    """

    vertex: VertexParams
    gaps: AndreevModel
    mode: str = QUANTUM
    temperature: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}", key="mode")
        if self.vertex.n != 3:
            raise DomainError("the fork needs a 3-lead vertex", key="k")
        if len(self.gaps.gaps) != 2:
            raise DomainError("the fork needs exactly two arm gaps", key="gaps")
        t = float(self.temperature)
        if not np.isfinite(t) or t < 0:
            raise DomainError(f"temperature T must be >= 0, got {t}", key="T")
        object.__setattr__(self, "temperature", t)

    @classmethod
    def build(cls, k2=1.0, k3=1.0, K=0.0, delta2=1.0, delta3=1.0, mode=QUANTUM, T=0.0, hard_cutoff=False):
        return cls(
            VertexParams.three_lead(k2, k3, K),
            AndreevModel((delta2, delta3), hard_cutoff),
            mode,
            T,
        )

    def normal_state(self):
        """Same device with superconductivity switched off in both arms."""
        return replace(self, gaps=self.gaps.normal())

    def channels(self):
        """The two independent (vertex, gaps) pairs used in classical mode."""
        return [(self.vertex.arm(j), self.gaps.arm(j)) for j in (1, 2)]


@dataclass(frozen=True)
class ReflectionResult:
    r_ee: complex
    r_eh: complex

    @property
    def A(self):
        """Andreev reflection probability ``|r_eh|^2``."""
        return np.abs(self.r_eh) ** 2

    @property
    def B(self):
        """Normal reflection probability ``|r_ee|^2``."""
        return np.abs(self.r_ee) ** 2


@dataclass(frozen=True)
class SpectrumResult:
    """Conductance spectrum on a voltage grid (voltages in units of gap/e).

    In classical mode ``A`` and ``B`` are channel averages, so that
    ``kernel = 2 * (1 + A - B)``.
    """

    voltages: np.ndarray
    kernel: np.ndarray
    g_normal: float
    normalized: np.ndarray
    A: np.ndarray
    B: np.ndarray
    mode: str = QUANTUM


def _blocks(vertex):
    s = star_vertex(vertex)
    return lead_blocks(s), lead_blocks(hole_vertex(s))


def loop_matrix(vertex, model, eps):
    """Hole round-trip matrix ``R_eh R_e R_he R_h`` stacked over ``eps``."""
    be, bh = _blocks(vertex)
    d = andreev_matrix(eps, model)
    return d @ be.R @ d @ bh.R


def loop_spectral_radius(vertex, model, eps):
    m = loop_matrix(vertex, model, eps)
    return np.max(np.abs(np.linalg.eigvals(m)), axis=-1)


def _solve(vertex, model, eps):
    e = np.atleast_1d(np.asarray(eps, dtype=float))
    be, bh = _blocks(vertex)
    d = andreev_matrix(e, model)
    eye = numerics.identity(d.shape[-1])
    loop_h = d @ be.R @ d @ bh.R
    loop_e = be.R @ d @ bh.R @ d
    try:
        inv_h = numerics.inverse(eye - loop_h)
        inv_e = numerics.inverse(eye - loop_e)
    except SingularMatrixError as exc:
        idx = exc.indices if exc.indices is not None else np.arange(e.size)
        bad = e[idx]
        raise SingularLoopError(
            f"reflection loop is singular at eps = {', '.join(f'{x:.12g}' for x in bad)}",
            exc.det_magnitude,
            bad,
            idx,
        ) from exc
    x_h = (inv_h @ (d @ be.T)[..., None])[..., 0]
    r_eh = x_h @ bh.T_tilde
    x_e = (inv_e @ be.T)[..., None]
    r_ee = be.r11 + ((d @ bh.R @ d @ x_e)[..., 0]) @ be.T_tilde
    return r_ee, r_eh


def _scalarize(x, eps):
    return complex(x[0]) if np.ndim(eps) == 0 else x.reshape(np.shape(eps))


def _reflect(vertex, model, eps):
    shape = np.shape(eps)
    r_ee, r_eh = _solve(vertex, model, np.ravel(eps))
    if not shape:
        return ReflectionResult(complex(r_ee[0]), complex(r_eh[0]))
    return ReflectionResult(r_ee.reshape(shape), r_eh.reshape(shape))


def reflection_amplitudes(cfg, eps):
    """Total ``r_ee`` and ``r_eh`` at lead 1 of a quantum-mode device.

    Raises:
        SingularLoopError: if ``I - M`` is singular at any requested energy.
    """
    if cfg.mode != QUANTUM:
        raise ValueError("reflection_amplitudes needs a quantum-mode device")
    return _reflect(cfg.vertex, cfg.gaps, eps)


def two_lead_reflection(vertex, model, eps):
    """Reflection amplitudes of a single injector-arm junction."""
    if vertex.n != 2 or len(model.gaps) != 1:
        raise DomainError("two_lead_reflection needs a 2-lead vertex and one gap")
    return _reflect(vertex, model, eps)


def path_sum_amplitudes(vertex, model, eps, tol=1e-13, max_terms=2**20):
    """Reflection amplitudes from the truncated multiple-reflection series.

    No matrix is inverted: partial sums ``S_N = sum_{n<N} M^n`` are doubled,
    ``S_2N = S_N + M^N S_N``, until the amplitude increment drops below
    ``tol`` for every energy or ``max_terms`` terms have been summed.

    Returns:
        tuple: ``(r_ee, r_eh, n_terms)``.
    """
    e = np.atleast_1d(np.asarray(eps, dtype=float))
    be, bh = _blocks(vertex)
    d = andreev_matrix(e, model)
    eye = numerics.identity(d.shape[-1])
    m_h = d @ be.R @ d @ bh.R
    m_e = be.R @ d @ bh.R @ d
    src_h = (d @ be.T)[..., None]
    src_e = be.T[:, None]
    powers = {"h": m_h, "e": m_e}
    sums = {key: np.broadcast_to(eye, m_h.shape).copy() for key in powers}

    def amplitudes(s_h, s_e):
        reh = ((s_h @ src_h)[..., 0]) @ bh.T_tilde
        ree = be.r11 + ((d @ bh.R @ d @ (s_e @ src_e))[..., 0]) @ be.T_tilde
        return ree, reh

    ree, reh = amplitudes(sums["h"], sums["e"])
    n = 1
    while n < max_terms:
        for key in sums:
            sums[key] = sums[key] + powers[key] @ sums[key]
            powers[key] = powers[key] @ powers[key]
        n *= 2
        new_ee, new_eh = amplitudes(sums["h"], sums["e"])
        inc = max(np.max(np.abs(new_ee - ree)), np.max(np.abs(new_eh - reh)))
        ree, reh = new_ee, new_eh
        if inc < tol:
            break
    return _scalarize(ree, eps), _scalarize(reh, eps), n


def conductance_kernel(res):
    """BTK-form kernel ``1 + A - B`` (both superconductors grounded)."""
    return 1.0 + res.A - res.B


def normal_kernel(cfg):
    """Conductance of the same geometry with both gaps set to zero."""
    if cfg.mode == QUANTUM:
        return 1.0 - abs(star_vertex(cfg.vertex)[0, 0]) ** 2
    return sum(1.0 - abs(star_vertex(v)[0, 0]) ** 2 for v, _ in cfg.channels())


def classical_kernel(cfg, eps):
    """Sum of the kernels of the two decoupled injector-arm junctions."""
    if cfg.mode != CLASSICAL:
        raise ValueError("classical_kernel needs a classical-mode device")
    return sum(conductance_kernel(_reflect(v, m, eps)) for v, m in cfg.channels())


def btk_reference(eps, delta, Z):
    """Closed-form BTK probabilities for a delta barrier of strength ``Z``.

    Returns:
        tuple: ``(A, B, g)`` with ``g = 1 + A - B``; vectorized over ``eps``.
    """
    if delta < 0 or Z < 0:
        raise DomainError("btk_reference needs delta >= 0 and Z >= 0")
    e = np.abs(np.asarray(eps, dtype=float))
    z2 = Z * Z
    if delta == 0:
        A = np.zeros_like(e)
        B = np.full_like(e, z2 / (1 + z2))
    else:
        inside = e < delta
        A_sub = delta**2 / (e**2 + (delta**2 - e**2) * (1 + 2 * z2) ** 2)
        omega = np.sqrt(np.where(inside, 0.0, e**2 - delta**2))
        e_safe = np.where(e == 0, 1.0, e)
        u2 = 0.5 * (1 + omega / e_safe)
        v2 = 0.5 * (1 - omega / e_safe)
        gamma = u2 + (u2 - v2) * z2
        A_above = u2 * v2 / gamma**2
        B_above = (u2 - v2) ** 2 * z2 * (1 + z2) / gamma**2
        A = np.where(inside, A_sub, A_above)
        B = np.where(inside, 1 - A_sub, B_above)
    if np.ndim(eps) == 0:
        A, B = float(A), float(B)
    return A, B, 1 + A - B


def nudge_gap_edges(eps, gaps, offset=EDGE_NUDGE):
    """Move energies sitting on ``+-gap`` by ``offset`` towards zero bias."""
    e = np.array(eps, dtype=float, copy=True)
    for g in gaps:
        if g <= 0:
            continue
        on_edge = np.abs(np.abs(e) - g) <= 1e-12 * max(1.0, g)
        e[on_edge] = np.sign(e[on_edge]) * (g - offset)
    return e


def _kernel_parts(cfg, eps):
    # (g, A, B) flattened; A, B are channel means in classical mode
    if cfg.mode == QUANTUM:
        res = _reflect(cfg.vertex, cfg.gaps, eps)
        return conductance_kernel(res), res.A, res.B
    parts = [_reflect(v, m, eps) for v, m in cfg.channels()]
    g = sum(conductance_kernel(p) for p in parts)
    return g, 0.5 * (parts[0].A + parts[1].A), 0.5 * (parts[0].B + parts[1].B)


def _kernel_with_retry(cfg, eps):
    eps = np.array(eps, dtype=float, copy=True)
    try:
        return _kernel_parts(cfg, eps)
    except SingularLoopError as exc:
        eps[exc.indices] += SINGULAR_NUDGE
        return _kernel_parts(cfg, eps)


def thermal_window(offsets, temperature):
    """``-df/deps`` of the Fermi function at the given energy offsets."""
    x = offsets / (2.0 * temperature)
    return 1.0 / (4.0 * temperature * np.cosh(x) ** 2)


def _thermal_offsets(temperature):
    n = 201  # step 20T/200 = T/10
    return np.linspace(-10 * temperature, 10 * temperature, n)


def evaluate_kernel(cfg, eps, temperature=None):
    """Kernel, ``A`` and ``B`` at bias energies ``eps`` (thermally smeared if T > 0).

    Gap-edge energies are nudged and singular loops retried once.
    """
    t = cfg.temperature if temperature is None else float(temperature)
    v = np.atleast_1d(np.asarray(eps, dtype=float))
    if t == 0:
        return _kernel_with_retry(cfg, nudge_gap_edges(v, cfg.gaps.gaps))
    offsets = _thermal_offsets(t)
    w = thermal_window(offsets, t)
    norm = np.trapezoid(w, offsets)
    grid = nudge_gap_edges(v[:, None] + offsets[None, :], cfg.gaps.gaps)
    g, A, B = _kernel_with_retry(cfg, grid.ravel())
    out = []
    for q in (g, A, B):
        q = np.asarray(q).reshape(grid.shape)
        out.append(np.trapezoid(q * w, offsets, axis=1) / norm)
    return tuple(out)


def spectrum(cfg, v_grid, temperature=None):
    """Differential conductance over a strictly increasing voltage grid.

    ``normalized`` divides by the kernel of the same device with both gaps
    set to zero. That kernel is energy independent, so thermal smearing
    leaves it unchanged.

    Raises:
        SingularLoopError: if a loop stays singular after one nudge retry.
    """
    v = np.asarray(v_grid, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DomainError("voltage grid must be a non-empty 1-D sequence")
    if v.size > 1 and np.any(np.diff(v) <= 0):
        raise DomainError("voltage grid must be strictly increasing")
    g, A, B = evaluate_kernel(cfg, v, temperature)
    g_n = normal_kernel(cfg)
    return SpectrumResult(
        voltages=v,
        kernel=np.asarray(g, dtype=float),
        g_normal=float(g_n),
        normalized=np.asarray(g, dtype=float) / g_n,
        A=np.asarray(A, dtype=float),
        B=np.asarray(B, dtype=float),
        mode=cfg.mode,
    )
