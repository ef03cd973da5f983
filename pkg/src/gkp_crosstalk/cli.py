"""Experiment harness: parameter sweeps written as plot-ready CSV/JSON.

Usage::

    gkp-crosstalk etas --q-max 3 --p-max 3
    gkp-crosstalk landscape --out landscape.csv
    gkp-crosstalk tradeoff --sigma-grid 0.2:0.4:0.1 --d-max 8 --out tradeoff.csv
    gkp-crosstalk dv-baseline --eta-grid 0:1:1/198 --out dv.csv
    gkp-crosstalk decode-demo --eta 1/5 --out report.json

Settings come from ``--config FILE`` (JSON, keys as in :class:`ExperimentConfig`)
with command-line flags taking precedence.  Exit codes: 0 success, 2 I/O
failure, 3 invalid or inadmissible parameters, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .channel import CrosstalkParams, build_output_state
from .decoder import decode
from .errors import InvariantViolation
from .modular import enumerate_admissible_etas, eta_for
from .noise import (
    FidelityBoundParams,
    NoiseParams,
    dv_baseline_fidelity,
    f_ideal,
    fidelity_upper_bound,
    mc_fidelity_estimate,
)

EXIT_OK, EXIT_IO, EXIT_PARAMS, EXIT_INTERNAL = 0, 2, 3, 4


def parse_grid(spec) -> tuple[Fraction, ...]:
    """Parse ``"a:b:step"``, ``"x,y,z"``, a single number, or a list of numbers.

    Values are exact fractions, so ``b`` is included whenever ``a + k*step``
    lands on it exactly (``"0:1:1/198"`` has 199 points).
    """
    if isinstance(spec, (list, tuple)):
        values = tuple(Fraction(str(v)) for v in spec)
    elif ":" in str(spec):
        parts = str(spec).split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {spec!r} must look like start:stop:step")
        start, stop, step = (Fraction(s.strip()) for s in parts)
        if step <= 0:
            raise ValueError(f"grid step must be positive, got {step}")
        count = math.floor((stop - start) / step) + 1
        values = tuple(start + k * step for k in range(max(count, 0)))
    else:
        values = tuple(Fraction(s.strip()) for s in str(spec).split(","))
    if not values:
        raise ValueError(f"grid {spec!r} is empty")
    if any(a >= b for a, b in zip(values, values[1:])):
        raise ValueError(f"grid {spec!r} is not strictly increasing")
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    d1: int = 2
    d2: int = 2
    q_max: int = 1
    p_max: int = 1
    d_max: int = 8
    sigma_grid: tuple[Fraction, ...] = field(default_factory=lambda: parse_grid("0.05:0.6:0.01"))
    eta_grid: tuple[Fraction, ...] = field(default_factory=lambda: parse_grid("0.01:0.99:0.005"))
    depol_grid: tuple[Fraction, ...] = field(default_factory=lambda: parse_grid("0,0.05,0.1"))
    eta: Fraction | None = None
    lattice_scale_L: float = 10.0
    sigma_c: float = 0.4
    lognormal_mu: float = math.log(0.2)
    shots: int = 100_000
    seed: int = 42
    workers: int = 1
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        for name in ("d1", "d2", "q_max", "p_max", "d_max", "shots", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if any(s <= 0 for s in self.sigma_grid):
            raise ValueError("sigma grid values must be positive")
        if any(not 0 <= p <= 1 for p in self.depol_grid):
            raise ValueError("depolarizing probabilities must lie in [0, 1]")
        for name in ("lattice_scale_L", "sigma_c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("sigma_grid", "eta_grid", "depol_grid"):
            if key in kwargs:
                kwargs[key] = parse_grid(kwargs[key])
        if kwargs.get("eta") is not None:
            kwargs["eta"] = Fraction(str(kwargs["eta"]))
        return cls(**kwargs)

    def as_json(self) -> dict:
        out = asdict(self)
        for key in ("sigma_grid", "eta_grid", "depol_grid"):
            out[key] = [str(v) for v in out[key]]
        out["eta"] = None if self.eta is None else str(self.eta)
        return out


def _fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    return f"{float(value):.12g}"


def render_table(columns: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        records = [
            {c: (v if isinstance(v, int) else float(v)) for c, v in zip(columns, map(_fmt, row))}
            for row in rows
        ]
        return json.dumps({"columns": columns, "rows": records}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _ordered_map(func, items, workers: int):
    if workers <= 1:
        return list(map(func, items))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def cmd_etas(config: ExperimentConfig) -> str:
    table = enumerate_admissible_etas(config.d1, config.d2, config.q_max, config.p_max)
    rows = [(t.eta.numerator, t.eta.denominator, t.q, t.p, t.n) for t in table]
    return render_table(["eta_num", "eta_den", "q", "p", "n"], rows, config.format)


def landscape_bound(config: ExperimentConfig) -> FidelityBoundParams:
    points = enumerate_admissible_etas(config.d1, config.d2, config.q_max, config.p_max)
    return FidelityBoundParams(config.lattice_scale_L, tuple(points))


def cmd_landscape(config: ExperimentConfig) -> str:
    if any(not 0 < e < 1 for e in config.eta_grid):
        raise ValueError("landscape eta grid must lie strictly inside (0, 1)")
    bound = landscape_bound(config)
    sigmas = [float(s) for s in config.sigma_grid]

    def row_block(eta: Fraction):
        e = float(eta)
        return [
            (e, s, fidelity_upper_bound(e, s, config.d1, config.d2, bound), config.lattice_scale_L)
            for s in sigmas
        ]

    blocks = _ordered_map(row_block, config.eta_grid, config.workers)
    rows = [r for block in blocks for r in block]
    return render_table(["eta", "sigma", "bound", "L"], rows, config.format)


def cmd_tradeoff(config: ExperimentConfig) -> str:
    if config.d_max < 2:
        raise ValueError("tradeoff needs d_max >= 2")
    root = np.random.SeedSequence(config.seed)
    rows = []
    index = 0
    for d in range(2, config.d_max + 1):
        params = CrosstalkParams.from_qp(1, 1, d, d)
        for s in config.sigma_grid:
            sigma = float(s)
            noise = NoiseParams(sigma, config.lognormal_mu, config.sigma_c)
            stream = np.random.SeedSequence(root.entropy, spawn_key=(index,))
            est, err = mc_fidelity_estimate(params, noise, config.shots, stream, config.workers)
            rows.append((d, float(params.eta), params.n, sigma, f_ideal(sigma, d, d), est, err))
            index += 1
    columns = ["d", "eta", "n", "sigma", "f_ideal", "mc_estimate", "mc_stderr"]
    return render_table(columns, rows, config.format)


def cmd_dv_baseline(config: ExperimentConfig) -> str:
    if any(not 0 <= e <= 1 for e in config.eta_grid):
        raise ValueError("dv-baseline eta grid must lie in [0, 1]")
    rows = [
        (float(e), float(p), dv_baseline_fidelity(float(e), float(p)))
        for e in config.eta_grid
        for p in config.depol_grid
    ]
    return render_table(["eta", "depol_p", "fidelity"], rows, config.format)


def decode_demo_report(config: ExperimentConfig) -> dict:
    eta = config.eta if config.eta is not None else eta_for(1, 1, config.d1, config.d2)
    params = CrosstalkParams.from_eta(eta, config.d1, config.d2)
    rng = np.random.default_rng(config.seed)
    trials = []
    for mu1 in range(params.d1):
        for mu2 in range(params.d2):
            out = decode(build_output_state(mu1, mu2, params), params, rng)
            trials.append({
                "mu1_in": mu1, "mu2_in": mu2,
                "x": out.outcome[0], "y": out.outcome[1], "j": out.gauge_j,
                "mu1_out": out.mu1, "mu2_out": out.mu2, "consistent": out.consistent,
            })
            if not out.consistent or (out.mu1, out.mu2) != (mu1, mu2):
                raise InvariantViolation(f"decoder failed to roundtrip ({mu1}, {mu2}): {trials[-1]}")
    keys = ("q", "p", "n", "r1", "r2", "alpha1", "alpha2")
    return {
        "eta": str(params.eta),
        "params": {k: getattr(params, k) for k in keys},
        "trials": trials,
    }


def cmd_decode_demo(config: ExperimentConfig) -> str:
    return json.dumps(decode_demo_report(config), indent=2, sort_keys=True) + "\n"


COMMANDS = {
    "etas": cmd_etas,
    "landscape": cmd_landscape,
    "tradeoff": cmd_tradeoff,
    "dv-baseline": cmd_dv_baseline,
    "decode-demo": cmd_decode_demo,
}

# flag -> (config field, converter)
_FLAGS = {
    "--d1": ("d1", int),
    "--d2": ("d2", int),
    "--q-max": ("q_max", int),
    "--p-max": ("p_max", int),
    "--d-max": ("d_max", int),
    "--sigma-grid": ("sigma_grid", parse_grid),
    "--eta-grid": ("eta_grid", parse_grid),
    "--depol-grid": ("depol_grid", parse_grid),
    "--eta": ("eta", Fraction),
    "--L": ("lattice_scale_L", float),
    "--sigma-c": ("sigma_c", float),
    "--lognormal-mu": ("lognormal_mu", float),
    "--shots": ("shots", int),
    "--seed": ("seed", int),
    "--workers": ("workers", int),
    "--out": ("output_path", str),
    "--format": ("format", str),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    for flag, (dest, _) in _FLAGS.items():
        kw = {"choices": ["csv", "json"]} if flag == "--format" else {}
        common.add_argument(flag, dest=dest, default=None, **kw)
    parser = argparse.ArgumentParser(prog="gkp-crosstalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    config = ExperimentConfig.from_mapping(data)
    overrides = {}
    for dest, convert in _FLAGS.values():
        raw = getattr(args, dest)
        if raw is not None:
            overrides[dest] = convert(raw)
    return replace(config, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    try:
        text = COMMANDS[args.command](config)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    try:
        if config.output_path:
            Path(config.output_path).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
