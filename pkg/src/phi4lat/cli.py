"""Command-line front end: verification, cost tables, sweeps, phases and census tables."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, budget, encoding, lcu, scattering, verify
from .amp_model import build_amp_hamiltonian
from .core import (AmplitudeCutoffs, ConfigError, LatticeParams, OccupationCutoffs, TooManyQubits,
                   build_params)
from .encoding import ConjectureFlagRequired

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_CONFIG, EXIT_SUITE = 0, 2, 3
COMMANDS = ("verify", "cost-table", "cost-sweep", "scatter", "census")
AXES = ("k", "N", "omega", "eps")

# strong coupling lambda = M = 1 on a 10 x 10 lattice
DEFAULT_CONFIG = {
    "lattice": {"m": 1.0, "lam": 1.0, "a": 1.0, "d": 2, "P": 10},
    "cutoffs": {"k": 16, "N": 16},
    "budget": {"epsilon": 0.01, "kappa": 4.0},
    "surface": {},
    "scatter": {"m": 1.0, "lam": 1.0, "k": 4, "volumes": [1, 2]},
    "census": {"power": 2, "n_max": 127},
}


class ConfigParse(ConfigError):
    pass


class SuiteFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    raw: dict
    out: Path
    axis: str = "k"
    values: list = field(default_factory=list)
    algorithms: tuple = budget.ALGORITHMS
    conjecture_iiib: bool = False
    dense_checks: bool = False
    surface_overlay: bool = False
    jobs: int = 1
    inject: tuple = ()
    scatter_input: Path | None = None

    @property
    def params(self) -> LatticeParams:
        return build_params(self.raw["lattice"])

    @property
    def epsilon(self) -> float:
        return float(self.raw["budget"]["epsilon"])

    @property
    def kappa(self) -> float:
        return float(self.raw["budget"].get("kappa", 4.0))


@dataclass
class SweepResult:
    axis: str
    values: list
    total_t: dict
    qubits: dict
    metadata: dict


# ------------------------------------------------------------------ config

def _merge(base: dict, over: dict) -> dict:
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return _merge(DEFAULT_CONFIG, {})
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"{path}: {exc}") from exc
    return _merge(DEFAULT_CONFIG, raw)


def parse_range(text: str, axis: str) -> list:
    """'lo:hi:steps' with optional 'log'/'lin' suffix on steps (default log)."""
    parts = text.split(":")
    if len(parts) == 4:
        parts = [parts[0], parts[1], parts[2] + parts[3]]
    if len(parts) != 3:
        raise ConfigParse(f"bad range {text!r}; expected lo:hi:steps[log|lin]")
    lo, hi, steps = parts
    mode = "log"
    for suffix in ("log", "lin"):
        if steps.endswith(suffix):
            mode, steps = suffix, steps[: -len(suffix)]
    try:
        lo_f, hi_f, n = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise ConfigParse(f"bad range {text!r}") from exc
    if n < 1 or lo_f <= 0 or hi_f < lo_f:
        raise ConfigParse(f"empty or invalid range {text!r}")
    vals = np.geomspace(lo_f, hi_f, n) if mode == "log" else np.linspace(lo_f, hi_f, n)
    if axis == "eps":
        return [float(v) for v in vals]
    out = []
    for v in vals:
        iv = int(round(v))
        if iv not in out:
            out.append(iv)
    return out


def cutoffs_for(alg: str, params: LatticeParams, raw: dict):
    if alg == "occ_trotter":
        return OccupationCutoffs(int(raw["cutoffs"]["N"]), params.Omega)
    return AmplitudeCutoffs(int(raw["cutoffs"]["k"]))


def surface_model(raw: dict) -> budget.SurfaceModel:
    try:
        return budget.SurfaceModel(**raw.get("surface", {}))
    except TypeError as exc:
        raise ConfigParse(f"unknown surface key: {exc}") from exc


def anchors(raw: dict) -> str:
    lat, cut = raw["lattice"], raw["cutoffs"]
    return (f"m={lat['m']};lam={lat['lam']};a={lat['a']};d={lat['d']};P={lat['P']};"
            f"k={cut['k']};N={cut['N']};eps={raw['budget']['epsilon']}")


# ---------------------------------------------------------------- commands

def cost_reports(cfg: RunConfig, raw: dict | None = None) -> list:
    raw = raw or cfg.raw
    params = build_params(raw["lattice"])
    eps = float(raw["budget"]["epsilon"])
    out = []
    for alg in cfg.algorithms:
        rep = budget.total_cost(alg, params, cutoffs_for(alg, params, raw), eps,
                                conjecture=cfg.conjecture_iiib,
                                kappa=float(raw["budget"].get("kappa", 4.0)))
        if cfg.surface_overlay:
            budget.surface_overlay(rep, surface_model(raw))
        out.append(rep)
    return out


DENSE_ALGS = {"I": "I_equal_weight", "IIIa": "IIIa_z_lcu", "IIIb": "IIIb_signature"}


def dense_checks(cfg: RunConfig) -> dict:
    """Block-identity residual for each qubitized algorithm that fits the dense cap."""
    params = build_params(cfg.raw["lattice"])
    cut = AmplitudeCutoffs(int(cfg.raw["cutoffs"]["k"]))
    h = None
    out = {}
    for alg in cfg.algorithms:
        if alg not in DENSE_ALGS:
            continue
        try:
            if h is None:
                h = build_amp_hamiltonian(params, cut)
            be = encoding.build_block_encoding(DENSE_ALGS[alg], params, cut, dense=True,
                                               conjecture=cfg.conjecture_iiib)
            out[alg] = {"residual": encoding.verify_block_identity(be, h)}
        except TooManyQubits as exc:
            out[alg] = {"skipped": str(exc)}
    return out


def cmd_cost_table(cfg: RunConfig) -> int:
    reps = cost_reports(cfg)
    text = budget.table_csv(reps, anchors(cfg.raw))
    if cfg.surface_overlay:
        text = _append_overlay(text, reps)
    _write(cfg.out / "cost_table.csv", text)
    if cfg.dense_checks:
        checks = dense_checks(cfg)
        _write(cfg.out / "dense_checks.json", json.dumps(checks, sort_keys=True, indent=1) + "\n")
        bad = [a for a, c in checks.items() if c.get("residual", 0.0) >= 1e-10]
        if bad:
            print(json.dumps({"dense_check_failed": bad}), file=sys.stderr)
            return EXIT_SUITE
    _write(cfg.out / "cost_table.json",
           json.dumps([json.loads(r.to_json()) for r in reps], sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def _append_overlay(text: str, reps: list) -> str:
    lines = text.rstrip("\n").split("\n")
    lines[0] += ",code_distance,physical_qubits,wallclock_s"
    for i, r in enumerate(reps, start=1):
        o = r.surface_overlay
        lines[i] += f",{o['code_distance']},{o['physical_qubits']},{o['wallclock_s']:.6e}"
    return "\n".join(lines) + "\n"


def _sweep_raw(raw: dict, axis: str, value) -> dict:
    r = _merge(raw, {})
    if axis == "k":
        r["cutoffs"]["k"] = int(value)
    elif axis == "N":
        r["cutoffs"]["N"] = int(value)
    elif axis == "omega":
        d = int(r["lattice"]["d"])
        P = int(round(value ** (1 / d)))
        if P ** d != int(value):
            raise ConfigParse(f"|Omega|={value} is not a perfect power for d={d}")
        r["lattice"]["P"] = P
    elif axis == "eps":
        r["budget"]["epsilon"] = float(value)
    return r


def _sweep_point(args):
    cfg, value = args
    reps = cost_reports(cfg, _sweep_raw(cfg.raw, cfg.axis, value))
    return [(r.algorithm, r.total_t, r.logical_qubits) for r in reps]


def run_sweep(cfg: RunConfig) -> SweepResult:
    tasks = [(cfg, v) for v in cfg.values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    tot = {a: [] for a in cfg.algorithms}
    qub = {a: [] for a in cfg.algorithms}
    for point in rows:
        for alg, t, q in point:
            tot[alg].append(t)
            qub[alg].append(q)
    meta = {"schema_version": budget.SCHEMA_VERSION, "tool_version": __version__,
            "params": cfg.raw, "conjecture_iiib": cfg.conjecture_iiib}
    return SweepResult(cfg.axis, list(cfg.values), tot, qub, meta)


def sweep_csv(res: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", res.axis, "algorithm", "total_t", "logical_qubits", "source"])
    for alg in res.total_t:
        for v, t, q in zip(res.values, res.total_t[alg], res.qubits[alg]):
            w.writerow([budget.SCHEMA_VERSION, v, alg, f"{t:.6e}", q, budget.formula_source(alg)])
    return buf.getvalue()


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def sweep_svg(res: SweepResult, title: str = "") -> str:
    """Self-contained log-y line plot (log-x for multiplicative axes)."""
    W, H, l, r, t, b = 640, 420, 80, 150, 40, 50
    xs = np.array(res.values, dtype=float)
    logx = len(xs) > 1 and xs.min() > 0 and xs.max() / xs.min() > 8
    fx = np.log10 if logx else (lambda v: v)
    allt = [v for vals in res.total_t.values() for v in vals if v > 0]
    ylo, yhi = math.floor(math.log10(min(allt))), math.ceil(math.log10(max(allt)))
    yhi = max(yhi, ylo + 1)
    x0, x1 = float(fx(xs.min())), float(fx(xs.max()))
    x1 = x1 if x1 > x0 else x0 + 1

    def px(v):
        return l + (float(fx(v)) - x0) / (x1 - x0) * (W - l - r)

    def py(v):
        return H - b - (math.log10(v) - ylo) / (yhi - ylo) * (H - t - b)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="13">{title}</text>',
           f'<line x1="{l}" y1="{H - b}" x2="{W - r}" y2="{H - b}" stroke="black"/>',
           f'<line x1="{l}" y1="{t}" x2="{l}" y2="{H - b}" stroke="black"/>']
    step = max(1, (yhi - ylo) // 8)
    for e in range(ylo, yhi + 1, step):
        y = py(10.0 ** e)
        out.append(f'<line x1="{l - 4}" y1="{y:.1f}" x2="{W - r}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{l - 6}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    for v in xs:
        x = px(v)
        lab = f"{v:g}"
        out.append(f'<line x1="{x:.1f}" y1="{H - b}" x2="{x:.1f}" y2="{H - b + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{H - b + 16}" text-anchor="middle">{lab}</text>')
    out.append(f'<text x="{(l + W - r) / 2:.1f}" y="{H - 12}" text-anchor="middle">{res.axis}</text>')
    out.append(f'<text x="16" y="{(t + H - b) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(t + H - b) / 2:.1f})">T gates</text>')
    for i, (alg, vals) in enumerate(res.total_t.items()):
        c = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.1f},{py(v):.1f}" for x, v in zip(xs, vals) if v > 0)
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="2" points="{pts}"/>')
        ly = t + 16 * i + 8
        out.append(f'<line x1="{W - r + 10}" y1="{ly}" x2="{W - r + 30}" y2="{ly}" '
                   f'stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{W - r + 35}" y="{ly + 4}">{alg}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_cost_sweep(cfg: RunConfig) -> int:
    res = run_sweep(cfg)
    _write(cfg.out / f"sweep_{cfg.axis}.csv", sweep_csv(res))
    _write(cfg.out / f"sweep_{cfg.axis}.json", json.dumps(
        {"axis": res.axis, "values": res.values, "total_t": res.total_t,
         "logical_qubits": res.qubits, "metadata": res.metadata}, sort_keys=True, indent=1) + "\n")
    _write(cfg.out / f"sweep_{cfg.axis}.svg", sweep_svg(res, f"T count vs {cfg.axis}"))
    return EXIT_OK


def cmd_scatter(cfg: RunConfig) -> int:
    sc = cfg.raw["scatter"]
    if cfg.scatter_input is not None:
        rows = scattering.read_scatter_rows(cfg.scatter_input.read_text())
        text = scattering.scatter_csv(rows, float(sc["m"]), sc.get("kink_mass"))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "E", "dE", "n", "p", "delta", "ddelta", "m_phys"])
        dE = float(sc.get("dE", 1e-3))
        for P in sc["volumes"]:
            params = LatticeParams(m=float(sc["m"]), lam=float(sc["lam"]), P=int(P))
            for ph in scattering.spectrum_phases(params, AmplitudeCutoffs(int(sc["k"])), dE=dE):
                w.writerow([ph.L, repr(ph.E), dE, ph.n, repr(ph.p), repr(ph.delta),
                            repr(ph.delta_uncertainty), repr(ph.m_phys)])
        text = buf.getvalue()
    _write(cfg.out / "phases.csv", text)
    return EXIT_OK


def cmd_census(cfg: RunConfig) -> int:
    c = cfg.raw["census"]
    power, n_max = int(c["power"]), int(c["n_max"])
    _write(cfg.out / f"census_p{power}_n{n_max}.csv", lcu.census_csv(power, n_max))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = verify.run_all(inject=cfg.inject)
    failures = [r.name for r in results if not r.passed]
    report = {"schema_version": budget.SCHEMA_VERSION, "passed": len(results) - len(failures),
              "failed": failures, "suites": [r.to_dict() for r in results]}
    _write(cfg.out / "verify_report.json", json.dumps(report, sort_keys=True, indent=1,
                                                      default=str) + "\n")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.2f}s)"
              + (f" {r.error}" if r.error else ""))
    print(f"{report['passed']}/{len(results)} suites passed")
    if failures:
        print(json.dumps({"failed": failures}), file=sys.stderr)
        return EXIT_SUITE
    return EXIT_OK


HANDLERS = {"verify": cmd_verify, "cost-table": cmd_cost_table, "cost-sweep": cmd_cost_sweep,
            "scatter": cmd_scatter, "census": cmd_census}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phi4lat", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML parameter file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--algs", default=None, help="comma-separated subset of "
                       + ",".join(budget.ALGORITHMS))
        p.add_argument("--conjecture-iiib", action="store_true",
                       help="allow the conjectured signature-LCU gate count")
        p.add_argument("--dense", action="store_true", help="cost-table: check block identities densely where they fit")
        p.add_argument("--surface", action="store_true", help="add the surface-code overlay")
        p.add_argument("--jobs", type=int, default=1)
        if name == "cost-sweep":
            p.add_argument("--axis", choices=AXES, default="k")
            p.add_argument("--range", dest="range_", default="4:128:6log")
        if name == "scatter":
            p.add_argument("--input", help="CSV with columns L,E,dE")
        if name == "census":
            p.add_argument("--power", type=int)
            p.add_argument("--n-max", type=int)
        if name == "verify":
            p.add_argument("--inject-failure", action="append", default=[],
                           help=argparse.SUPPRESS)
    return ap


def make_config(ns: argparse.Namespace) -> RunConfig:
    raw = load_config(ns.config)
    if ns.command == "census":
        if ns.power is not None:
            raw["census"]["power"] = ns.power
        if ns.n_max is not None:
            raw["census"]["n_max"] = ns.n_max
    if ns.algs:
        algs = tuple(a.strip() for a in ns.algs.split(",") if a.strip())
        unknown = [a for a in algs if a not in budget.ALGORITHMS]
        if unknown or not algs:
            raise ConfigParse(f"unknown algorithms {unknown}")
        if "IIIb" in algs and not ns.conjecture_iiib:
            raise ConjectureFlagRequired("IIIb needs --conjecture-iiib")
    else:
        algs = tuple(a for a in budget.ALGORITHMS if a != "IIIb" or ns.conjecture_iiib)
    cfg = RunConfig(command=ns.command, raw=raw, out=Path(ns.out), algorithms=algs,
                    conjecture_iiib=ns.conjecture_iiib, dense_checks=ns.dense,
                    surface_overlay=ns.surface, jobs=max(1, ns.jobs),
                    inject=tuple(getattr(ns, "inject_failure", ()) or ()))
    if ns.command == "cost-sweep":
        cfg.axis = ns.axis
        cfg.values = parse_range(ns.range_, ns.axis)
    if ns.command == "scatter" and ns.input:
        cfg.scatter_input = Path(ns.input)
    build_params(raw["lattice"])  # validate early
    return cfg


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = make_config(ns)
        return run(cfg)
    except (ConfigError, ConjectureFlagRequired, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
