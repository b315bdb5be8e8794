"""Exit criteria of the build, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary (and directly when run with ``-s``).
"""

import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from forktx.andreev import AndreevModel
from forktx.braess import transmission_classical, transmission_quantum
from forktx.errors import SingularLoopError
from forktx.numerics import unitarity_error
from forktx.transport import (
    DeviceConfig,
    btk_reference,
    conductance_kernel,
    path_sum_amplitudes,
    reflection_amplitudes,
    spectrum,
    two_lead_reflection,
    _reflect,
)
from forktx.validation import draw_convergent, hole_exit_electron_loop
from forktx.vertex import VertexParams, star_vertex

from oracles import path_sum


def report(number, title, ok, detail):
    line = f"[{number:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_braess_probabilities():
    exact = (Fraction(1), Fraction(1), Fraction(1), Fraction(0))
    t0 = time.perf_counter()
    dq = transmission_quantum(VertexParams((1, 1, 1), 0))
    dc = transmission_classical(VertexParams((1, 1, 1), 0))
    elapsed = time.perf_counter() - t0
    ok = (
        transmission_classical(exact) == 1
        and transmission_quantum(exact) == Fraction(8, 9)
        and dc == 1.0
        and abs(dq - 8 / 9) < 1e-14
        and elapsed < 1e-3
    )
    report(1, "Braess D_classical = 1, D_quantum = 8/9", ok, f"D_q={dq!r} D_c={dc!r} t={elapsed * 1e6:.0f}us")


def test_02_vertex_unitarity():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        k = tuple(rng.uniform(0.1, 10, size=3))
        worst = max(worst, unitarity_error(star_vertex(VertexParams(k, rng.uniform(0, 10)))))
    report(2, "vertex unitarity over 1000 draws", worst < 1e-12, f"max error {worst:.2e} (tol 1e-12)")


def test_03_btk_oracle():
    eps = np.linspace(-3, 3, 601)
    worst = 0.0
    for z in (0.0, 0.5, 1.0, 3.0):
        for k in (1.0, 2.5):
            res = two_lead_reflection(VertexParams((k, k), 2 * k * z), AndreevModel((1.0,)), eps)
            worst = max(worst, float(np.max(np.abs(conductance_kernel(res) - btk_reference(eps, 1.0, z)[2]))))
    report(3, "two-lead device equals BTK", worst < 1e-10, f"max |g - g_BTK| {worst:.2e} (tol 1e-10)")


def test_04_classical_point_contact_plateau():
    cfg = DeviceConfig.build(mode="classical")
    v = np.linspace(0, 3, 2001)
    res = spectrum(cfg, v)
    sub = np.max(np.abs(res.normalized[v < 1] - 2))
    far = abs(spectrum(cfg, [-20.0, 20.0]).normalized - 1).max()
    jumps = np.abs(np.diff(np.diff(res.normalized) / np.diff(v)))
    edge = v[np.argmax(jumps) + 1]
    step = v[1] - v[0]
    ok = sub < 1e-10 and far < 0.02 and abs(edge - 1) <= step
    report(4, "classical fork: plateau 2, step at eV = gap", ok, f"plateau dev {sub:.1e}, |G-1| at 20 gap {far:.3f}, step at {edge:.4f}")


def test_05_coherent_fork_plateau_and_peak():
    cfg = DeviceConfig.build()
    v = np.linspace(-3, 3, 601)
    res = spectrum(cfg, v)
    plateau = res.normalized[np.argmin(np.abs(v))]
    peak_at_gap = spectrum(cfg, [1.0]).normalized[0]
    peak = res.normalized.max()
    # oracle: term-by-term path sum (no inversion) against the closed form
    oracle_err = 0.0
    for eps in (0.0, 0.5, 1 - 1e-9):
        ree, reh = path_sum((1, 1, 1), 0, (1, 1), eps, terms=100)
        closed = reflection_amplitudes(cfg, eps)
        oracle_err = max(oracle_err, abs(ree - closed.r_ee), abs(reh - closed.r_eh))
    ree, reh = path_sum((1, 1, 1), 0, (1, 1), 0.0, terms=100)
    oracle_plateau = (1 + abs(reh) ** 2 - abs(ree) ** 2) / (8 / 9)
    ok = (
        abs(plateau - 1.44) < 1e-6
        and abs(peak_at_gap - 2.25) < 1e-6
        and abs(peak - 2.25) < 1e-6
        and abs(oracle_plateau - 1.44) < 1e-6
        and oracle_err < 1e-10
    )
    report(5, "coherent fork: zero-bias 1.44, gap peak 2.25", ok, f"plateau {plateau:.8f}, peak {peak_at_gap:.8f}, path-sum err {oracle_err:.1e}")


def test_06_subgap_conservation():
    rng = np.random.default_rng(6)
    worst, done = 0.0, 0
    while done < 500:
        k2, k3 = rng.uniform(0.1, 10, size=2)
        gaps = rng.uniform(0.1, 3, size=2)
        cfg = DeviceConfig.build(k2, k3, rng.uniform(0, 10), *gaps)
        eps = rng.uniform(-1, 1) * gaps.min()
        try:
            res = reflection_amplitudes(cfg, eps)
        except SingularLoopError:
            continue
        worst = max(worst, abs(res.A + res.B - 1))
        done += 1
    report(6, "sub-gap A + B = 1 over 500 points", worst < 1e-10, f"max |A+B-1| {worst:.2e} (tol 1e-10)")


def test_07_unequal_gap_features():
    v = np.linspace(0, 3, 2001)
    res = spectrum(DeviceConfig.build(delta3=2.0), v)
    jumps = np.abs(np.diff(np.diff(res.normalized) / np.diff(v)))
    top = np.sort(v[np.argsort(jumps)[-2:] + 1])
    step = v[1] - v[0]
    ok = abs(top[0] - 1) <= step and abs(top[1] - 2) <= step
    report(7, "unequal gaps: derivative jumps at both gaps", ok, f"largest jumps at eV = {top[0]:.4f}, {top[1]:.4f} (step {step:.4f})")


def test_08_matched_injector_plateau():
    cfg = DeviceConfig.build(0.5, 0.5, 0.0, 1.0, 2.0)
    v = np.linspace(-1, 1, 401)[1:-1]
    res = spectrum(cfg, v)
    dev = np.abs(res.normalized - 2)
    worst = float(dev.max())
    where = float(v[np.argmax(dev)])
    zero_bias = abs(res.normalized[np.argmin(np.abs(v))] - 2)
    report(
        8, "k1 = 2k2 = 2k3, gaps 1:2: G/G_N = 2 for |eV| < gap2", worst < 1e-8,
        f"max |G/G_N - 2| {worst:.2e} at eV = {where:.3f} (tol 1e-8); at zero bias {zero_bias:.1e}",
    )


def test_09_normal_limit():
    v = np.linspace(-5, 5, 401)
    worst = 0.0
    for mode in ("quantum", "classical"):
        for k2, k3, K in ((1, 1, 0), (0.3, 2.2, 1.4), (5, 0.2, 7)):
            res = spectrum(DeviceConfig.build(k2, k3, K, 0.0, 0.0, mode=mode), v)
            worst = max(worst, float(np.max(np.abs(res.normalized - 1))))
    report(9, "normal-state limit G/G_N = 1", worst < 1e-12, f"max deviation {worst:.2e} (tol 1e-12)")


def test_10_series_and_ordering():
    rng = np.random.default_rng(10)
    draws = draw_convergent(rng, 200, max_radius=0.999)
    series, ordering = 0.0, 0.0
    for vertex, model, eps in draws:
        res = _reflect(vertex, model, eps)
        ree, reh, _ = path_sum_amplitudes(vertex, model, eps)
        series = max(series, abs(res.r_ee - ree), abs(res.r_eh - reh))
        ordering = max(ordering, abs(res.r_eh - hole_exit_electron_loop(vertex, model, eps)))
    ok = series < 1e-10 and ordering < 1e-10
    report(10, "series and ordering equivalence (200 draws)", ok, f"series {series:.1e}, ordering {ordering:.1e} (tol 1e-10)")


def test_11_cli_determinism(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text('{"delta3": 2.0, "K": 0.8, "k2": 0.7}')
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "forktx", "spectrum", "--config", str(cfg), "--out", str(out), "--compare"],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    report(11, "byte-identical spectrum CSV", outs[0] == outs[1], f"{len(outs[0])} bytes")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
