"""``forktx`` command-line front end.

Subcommands::

    forktx spectrum --config run.json [--out g.csv] [--compare] [--gnuplot g.gp]
    forktx braess --k2 0.2:3:15 --k3 0.2:3:15 --K 0:2:3
    forktx validate
    forktx figure 2a [--out-dir figs/]

Exit codes: 0 ok, 1 invalid input or failed validation, 2 solver error,
3 I/O error.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .braess import braess_scan
from .errors import ConfigError, DomainError, SingularLoopError
from .transport import CLASSICAL, MODES, QUANTUM, DeviceConfig, spectrum
from .validation import run_all

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_IO = 3

#: Representative barrier for the tunnelling-like curves.
TUNNEL_K = 3.0

DEFAULTS = {
    "k2": 1.0,
    "k3": 1.0,
    "K": 0.0,
    "delta2": 1.0,
    "delta3": 1.0,
    "mode": QUANTUM,
    "T": 0.0,
    "v_min": -3.0,
    "v_max": 3.0,
    "v_points": 601,
    "format": "csv",
    "compare": False,
    "hard_cutoff": False,
}
_NUMERIC = ("k2", "k3", "K", "delta2", "delta3", "T", "v_min", "v_max")
_FORMATS = ("csv", "tsv")


@dataclass(frozen=True)
class RunConfig:
    device: DeviceConfig
    v_min: float = -3.0
    v_max: float = 3.0
    v_points: int = 601
    fmt: str = "csv"
    compare: bool = False
    out: str = None

    @property
    def temperature(self):
        return self.device.temperature

    def grid(self):
        return np.linspace(self.v_min, self.v_max, self.v_points)


def _check_type(key, value):
    if key in _NUMERIC:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key!r} must be a number, got {value!r}", key)
        if not np.isfinite(value):
            raise ConfigError(f"{key!r} must be finite", key)
    elif key == "v_points":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"'v_points' must be an integer, got {value!r}", key)
    elif key == "mode" and value not in MODES:
        raise ConfigError(f"'mode' must be one of {MODES}, got {value!r}", key)
    elif key == "format" and value not in _FORMATS:
        raise ConfigError(f"'format' must be one of {_FORMATS}, got {value!r}", key)
    elif key in ("compare", "hard_cutoff") and not isinstance(value, bool):
        raise ConfigError(f"{key!r} must be true or false", key)


def config_from_dict(doc):
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in doc.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}", key)
        _check_type(key, value)
    c = {**DEFAULTS, **doc}
    if c["v_points"] < 2:
        raise ConfigError("'v_points' must be at least 2", "v_points")
    if not c["v_min"] < c["v_max"]:
        raise ConfigError("'v_min' must be below 'v_max'", "v_min")
    device = DeviceConfig.build(
        k2=c["k2"], k3=c["k3"], K=c["K"],
        delta2=c["delta2"], delta3=c["delta3"],
        mode=c["mode"], T=c["T"], hard_cutoff=c["hard_cutoff"],
    )
    return RunConfig(device, float(c["v_min"]), float(c["v_max"]), c["v_points"], c["format"], c["compare"])


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Raises:
        ConfigError: malformed JSON, unknown key or wrong value type.
        DomainError: nonpositive wavenumber, negative gap, barrier or temperature.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return config_from_dict(doc)


def fmt_number(x):
    """12 significant digits, always with a decimal point or exponent."""
    s = f"{float(x):.12g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


SPECTRUM_COLUMNS = ("g", "g_over_gN", "A", "B")


def spectrum_table(cfg):
    """Header and rows for the spectrum CSV.

    With ``cfg.compare`` the other coherence mode is appended as a column
    group suffixed ``_classical`` (or ``_quantum``).
    """
    v = cfg.grid()
    runs = [("", cfg.device)]
    if cfg.compare:
        other = CLASSICAL if cfg.device.mode == QUANTUM else QUANTUM
        runs.append((f"_{other}", replace(cfg.device, mode=other)))
    header = ["V_over_Delta"]
    cols = [v]
    for suffix, dev in runs:
        res = spectrum(dev, v)
        header += [c + suffix for c in SPECTRUM_COLUMNS]
        cols += [res.kernel, res.normalized, res.A, res.B]
    rows = [[fmt_number(c[i]) for c in cols] for i in range(v.size)]
    return header, rows


def write_table(header, rows, stream, fmt="csv", trailer=None):
    writer = csv.writer(stream, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if trailer:
        stream.write(trailer + "\n")


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def run_spectrum(cfg, gnuplot=None):
    """Write the spectrum table to ``cfg.out`` (stdout if unset); return an exit code."""
    try:
        header, rows = spectrum_table(cfg)
    except SingularLoopError as exc:
        volts = ", ".join(f"{e:.12g}" for e in np.atleast_1d(exc.energies))
        print(f"forktx: solver error: singular reflection loop at V = {volts}", file=sys.stderr)
        return EXIT_SOLVER
    buf = io.StringIO()
    write_table(header, rows, buf, cfg.fmt)
    try:
        _emit(buf.getvalue(), cfg.out)
        if gnuplot:
            data = cfg.out or "spectrum.csv"
            Path(gnuplot).write_text(gnuplot_script([(data, cfg.compare, "")], cfg.fmt))
    except OSError as exc:
        print(f"forktx: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def parse_range(text, name):
    """``a:b:n`` -> ``(a, b, n)``; a bare number gives a single point."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return (v, v, 1)
        if len(parts) == 3:
            return (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise ConfigError(f"--{name} expects a:b:n or a single number, got {text!r}", name)


def run_braess_scan(k2_range, k3_range, K_range, out=None, weighted=True):
    scan = braess_scan(k2_range, k3_range, K_range, weighted=weighted)
    rows = [
        [fmt_number(p.k2), fmt_number(p.k3), fmt_number(p.K),
         fmt_number(p.D_quantum), fmt_number(p.D_classical), "true" if p.paradox else "false"]
        for p in scan.points
    ]
    buf = io.StringIO()
    write_table(
        ["k2", "k3", "K", "D_quantum", "D_classical", "paradox"], rows, buf,
        trailer=f"# paradox_fraction={fmt_number(scan.paradox_fraction)} points={len(rows)}",
    )
    try:
        _emit(buf.getvalue(), out)
    except OSError as exc:
        print(f"forktx: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run_validate(stream=None, seed=None):
    stream = stream or sys.stdout
    results = run_all() if seed is None else run_all(seed)
    for r in results:
        print(r.line(), file=stream)
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "validation FAILED", file=stream)
    return EXIT_OK if ok else EXIT_INVALID


# Reference spectra presets. The 3a wavenumbers and TUNNEL_K are representative
# choices, not fitted values.
FIGURES = {
    "2a": [
        ("K0", {"compare": True}),
        ("Ktunnel", {"K": TUNNEL_K, "compare": True}),
    ],
    "2b": [
        ("K0", {"delta3": 2.0, "compare": True}),
        ("Ktunnel", {"delta3": 2.0, "K": TUNNEL_K, "compare": True}),
    ],
    "3a": [
        ("k1_1_1", {"delta3": 2.0}),
        ("k1_0.5_1", {"delta3": 2.0, "k2": 0.5}),
        ("k1_1_0.5", {"delta3": 2.0, "k3": 0.5}),
    ],
    "3b": [
        ("k1_eq_2k2_eq_2k3", {"delta3": 2.0, "k2": 0.5, "k3": 0.5}),
        ("k1_eq_3k2_eq_3k3", {"delta3": 2.0, "k2": 1 / 3, "k3": 1 / 3}),
    ],
}


def figure_presets(fig_id):
    if fig_id not in FIGURES:
        raise ConfigError(f"unknown figure {fig_id!r}; choose from {sorted(FIGURES)}", "figure")
    return [(label, {**DEFAULTS, **over}) for label, over in FIGURES[fig_id]]


def gnuplot_script(datasets, fmt="csv"):
    """gnuplot commands plotting ``g_over_gN`` (column 3) for each CSV file.

    ``datasets`` holds ``(path, has_comparison, label)`` triples; comparison
    files also get their second column group (column 7) dashed.
    """
    sep = "\\t" if fmt == "tsv" else ","
    lines = [
        f"set datafile separator '{sep}'",
        "set key autotitle columnhead",
        "set xlabel 'eV / Delta'",
        "set ylabel 'G / G_N'",
        "set grid",
    ]
    curves = []
    for path, compare, label in datasets:
        tag = f" {label}" if label else ""
        curves.append(f"'{path}' using 1:3 with lines lw 2 title 'primary{tag}'")
        if compare:
            curves.append(f"'{path}' using 1:7 with lines dt 2 lw 2 title 'comparison{tag}'")
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def run_figure(fig_id, out_dir=None):
    presets = figure_presets(fig_id)
    if out_dir is None:
        print(json.dumps({label: doc for label, doc in presets}, indent=2, sort_keys=True))
        return EXIT_OK
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        datasets = []
        for label, doc in presets:
            stem = f"fig{fig_id}_{label}"
            (out / f"{stem}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
            cfg = replace(config_from_dict(doc), out=str(out / f"{stem}.csv"))
            code = run_spectrum(cfg)
            if code != EXIT_OK:
                return code
            datasets.append((f"{stem}.csv", doc["compare"], label))
        (out / f"fig{fig_id}.gp").write_text(gnuplot_script(datasets))
    except OSError as exc:
        print(f"forktx: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="forktx", description="Coherent transport through an N-(S,S) Y-junction.")
    p.add_argument("--version", action="version", version=f"forktx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="conductance spectrum from a JSON config")
    sp.add_argument("--config", required=True, help="JSON config file ('-' for stdin)")
    sp.add_argument("--out", help="output table (default: stdout)")
    sp.add_argument("--compare", action="store_true", help="add the other coherence mode as extra columns")
    sp.add_argument("--gnuplot", help="also write a gnuplot script for the table")

    bp = sub.add_parser("braess", help="scan the quantum Braess region")
    bp.add_argument("--k2", default="1", help="k2/k1 range a:b:n")
    bp.add_argument("--k3", default="1", help="k3/k1 range a:b:n")
    bp.add_argument("--K", default="0", help="barrier range a:b:n")
    bp.add_argument("--out", help="output CSV (default: stdout)")
    bp.add_argument("--unweighted", action="store_true", help="sum classical channels without 1/2 weights")

    vp = sub.add_parser("validate", help="run the oracle cross-checks")
    vp.add_argument("--seed", type=int, default=None)

    fp = sub.add_parser("figure", help="preset configs for the reference spectra")
    fp.add_argument("figure", choices=sorted(FIGURES))
    fp.add_argument("--out-dir", help="compute tables and a gnuplot script into this directory")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum":
            try:
                text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
            except OSError as exc:
                print(f"forktx: I/O error: {exc}", file=sys.stderr)
                return EXIT_IO
            cfg = parse_config(text)
            cfg = replace(cfg, out=args.out, compare=cfg.compare or args.compare)
            return run_spectrum(cfg, gnuplot=args.gnuplot)
        if args.command == "braess":
            ranges = [parse_range(getattr(args, n), n) for n in ("k2", "k3", "K")]
            return run_braess_scan(*ranges, out=args.out, weighted=not args.unweighted)
        if args.command == "validate":
            return run_validate(seed=args.seed)
        return run_figure(args.figure, args.out_dir)
    except (ConfigError, DomainError) as exc:
        key = f" [{exc.key}]" if getattr(exc, "key", None) else ""
        print(f"forktx: invalid input{key}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
