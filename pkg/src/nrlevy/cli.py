"""Command-line experiment harness.

Reads a sectioned key=value config file (INI style), applies flag overrides,
runs the named experiment, and writes ``report.json`` plus tidy CSV files
under the output directory.  All numeric output carries 17 significant
digits so files round-trip exactly, and reports contain nothing
non-deterministic: rerunning with the same config and seed is byte-identical
for any ``--threads`` value.

Exit codes: 0 when the experiment's verdict passes (or it has no verdict),
2 when a verdict fails, 1 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .errors import ConfigError, NrlevyError
from .levy_model import (
    ZERO_JUMPS,
    FiniteAtomic,
    IsotropicStable,
    LevyTriplet,
    ZeroJumps,
    bg_index,
    is_admissible,
)
from .noise_reinforced import (
    CfQuery,
    NrlpConfig,
    nrlp_marginals,
    nrlp_sample,
    reinforced_cf,
    reinforced_cf_exact,
    truncation_budget,
)
from .errors import UnsupportedFamilyError
from .rng import RngStream
from .spectral import stable_nrlp_marginals
from .step_reinforced import elephant_walk, skeleton_reinforced_walk
from .yule_simon import MemoryParameter, ys_mean, ys_cross_moment, ys_pmf, ys_process_values, ys_sample

EXPERIMENTS = (
    "simulate-ys",
    "simulate-walk",
    "simulate-nrlp",
    "cf-compare",
    "theorem1",
    "supercritical",
    "prop8",
    "moments",
)

_EXPERIMENT_KEYS = {
    "name", "p", "seed", "replicas", "mesh", "grid", "thetas", "theta", "alpha",
    "rho", "n", "ks", "truncation_eps", "tolerance_mult", "threads", "walk",
    "theory", "mc_replicas", "sampler", "final_threshold",
}
_TRIPLET_KEYS = {"dim", "gaussian_factor", "gaussian", "drift", "jumps", "alpha", "scale", "atoms"}
_OUTPUT_KEYS = {"dir"}


def fmt(x: float) -> str:
    """17 significant digits: lossless float64 round-trip."""
    return f"{x:.17g}"


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    p: float | None = None
    replicas: int = 10000
    mesh: tuple[int, ...] = (100, 1000, 10000)
    grid: tuple[float, ...] = (0.5, 1.0)
    thetas: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0)
    theta: float = 1.0
    alpha: float | None = None
    rho: float | None = None
    n: int = 10000
    ks: tuple[int, ...] = (1, 2, 3)
    truncation_eps: float = 1e-4
    tolerance_mult: float = 4.0
    threads: int = 1
    walk: str = "elephant"
    theory: str = "auto"
    mc_replicas: int = 2_000_000
    sampler: str = "auto"
    final_threshold: float = 0.1
    out_dir: Path = Path("out")
    triplet: LevyTriplet | None = None
    triplet_section: dict = field(default_factory=dict)

    def memory(self) -> MemoryParameter:
        if self.p is None:
            raise ConfigError("this experiment requires a memory parameter p")
        return MemoryParameter(self.p)

    def stream(self) -> RngStream:
        return RngStream(self.seed)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(";", ",").split(",") if tok.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def build_triplet(section: dict) -> LevyTriplet:
    """Triplet from a flat key-value config section (see README for the format)."""
    dim = int(section.get("dim", 1))
    gaussian = None
    gauss_key = "gaussian_factor" if "gaussian_factor" in section else "gaussian"
    if gauss_key in section:
        vals = _parse_floats(section[gauss_key])
        if len(vals) not in (1, dim * dim):
            raise ConfigError("gaussian must have 1 or dim*dim entries (row-major)")
        gaussian = (np.eye(dim) * vals[0]) if len(vals) == 1 else np.reshape(vals, (dim, dim))
        if "gaussian_factor" in section and "gaussian" in section:
            raise ConfigError("set gaussian_factor or gaussian, not both")
    drift = None
    if "drift" in section:
        vals = _parse_floats(section["drift"])
        if len(vals) != dim:
            raise ConfigError("drift must have dim entries")
        drift = np.asarray(vals)
    family = section.get("jumps", "none").strip().lower()
    if family == "none":
        jumps = None
    elif family in ("stable", "cauchy"):
        alpha = 1.0 if family == "cauchy" else float(section.get("alpha", 1.5))
        jumps = IsotropicStable(alpha, float(section.get("scale", 1.0)))
    elif family == "atoms":
        if "atoms" not in section:
            raise ConfigError("jumps = atoms requires an atoms entry")
        positions, masses = [], []
        for chunk in section["atoms"].split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            pos_text, mass_text = chunk.rsplit(":", 1)
            positions.append([float(v) for v in pos_text.split(",")])
            masses.append(float(mass_text))
        jumps = FiniteAtomic(np.asarray(positions), np.asarray(masses))
    else:
        raise ConfigError(f"unknown jump family {family!r}")
    return LevyTriplet(dim, gaussian, drift, jumps if jumps is not None else ZERO_JUMPS)


def load_config(path: Path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path} not found")
    sections = {s.lower(): dict(parser.items(s)) for s in parser.sections()}
    unknown_sections = set(sections) - {"experiment", "triplet", "output"}
    if unknown_sections:
        raise ConfigError(f"unknown config sections: {sorted(unknown_sections)}")
    exp = sections.get("experiment", {})
    for bad in set(exp) - _EXPERIMENT_KEYS:
        raise ConfigError(f"unknown key {bad!r} in [experiment]")
    trip = sections.get("triplet", {})
    for bad in set(trip) - _TRIPLET_KEYS:
        raise ConfigError(f"unknown key {bad!r} in [triplet]")
    out = sections.get("output", {})
    for bad in set(out) - _OUTPUT_KEYS:
        raise ConfigError(f"unknown key {bad!r} in [output]")
    if "name" not in exp:
        raise ConfigError("[experiment] must set name")
    name = exp["name"].strip()
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")
    cfg = ExperimentConfig(experiment=name)
    if "p" in exp:
        cfg.p = float(exp["p"])
    if "seed" in exp:
        cfg.seed = int(exp["seed"])
    if "replicas" in exp:
        cfg.replicas = int(exp["replicas"])
    if "mesh" in exp:
        cfg.mesh = _parse_ints(exp["mesh"])
    if "grid" in exp:
        cfg.grid = _parse_floats(exp["grid"])
    if "thetas" in exp:
        cfg.thetas = _parse_floats(exp["thetas"])
    if "theta" in exp:
        cfg.theta = float(exp["theta"])
    if "alpha" in exp:
        cfg.alpha = float(exp["alpha"])
    if "rho" in exp:
        cfg.rho = float(exp["rho"])
    if "n" in exp:
        cfg.n = int(exp["n"])
    if "ks" in exp:
        cfg.ks = _parse_ints(exp["ks"])
    if "truncation_eps" in exp:
        cfg.truncation_eps = float(exp["truncation_eps"])
    if "tolerance_mult" in exp:
        cfg.tolerance_mult = float(exp["tolerance_mult"])
    if "threads" in exp:
        cfg.threads = int(exp["threads"])
    if "walk" in exp:
        cfg.walk = exp["walk"].strip()
    if "theory" in exp:
        cfg.theory = exp["theory"].strip()
    if "mc_replicas" in exp:
        cfg.mc_replicas = int(exp["mc_replicas"])
    if "sampler" in exp:
        cfg.sampler = exp["sampler"].strip()
    if "final_threshold" in exp:
        cfg.final_threshold = float(exp["final_threshold"])
    if "dir" in out:
        cfg.out_dir = Path(out["dir"])
    cfg.triplet_section = trip
    if trip:
        cfg.triplet = build_triplet(trip)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.replicas < 1:
        raise ConfigError("replicas must be positive")
    if cfg.threads < 1:
        raise ConfigError("threads must be positive")
    if cfg.experiment in ("theorem1", "supercritical") and len(cfg.mesh) < 2:
        raise ConfigError("mesh must contain at least two points")
    if cfg.experiment == "supercritical":
        alpha = cfg.alpha if cfg.alpha is not None else 1.5
        p = cfg.memory().p
        if alpha * p <= 1.0:
            raise ConfigError(
                f"supercritical requires alpha * p > 1, got {alpha * p:.4g} "
                "(use theorem1 for admissible parameters)"
            )
    if cfg.experiment in ("theorem1", "simulate-nrlp", "cf-compare"):
        if cfg.triplet is None:
            raise ConfigError(f"{cfg.experiment} requires a [triplet] section")
        mp = cfg.memory()
        if not is_admissible(mp, cfg.triplet):
            raise ConfigError(
                f"inadmissible memory parameter: p * beta = "
                f"{mp.p * bg_index(cfg.triplet):.4g} >= 1 (need p * beta < 1)"
            )


# ---------------------------------------------------------------------------
# Report and CSV emission
# ---------------------------------------------------------------------------


def write_report(report: dict, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def emit_plotdata(report: dict, out_dir: Path) -> Path:
    """Tidy distances CSV: one row per (mesh point, query)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "distances.csv"
    rows = []
    schedule = report.get("schedule", [])
    per_query = report.get("per_query", [])
    stderr = report.get("stderr", [])
    for i, n in enumerate(schedule):
        for qi, dist in enumerate(per_query[i]):
            rows.append([n, qi, float(dist), float(stderr[i])])
    _write_csv(path, ["n", "query", "distance", "stderr"], rows)
    return path


def _report_from_convergence(rep: dg.ConvergenceReport) -> dict:
    return {
        "experiment": rep.experiment,
        "params": rep.params,
        "schedule": list(rep.mesh_schedule),
        "distances": [float(v) for v in rep.distances],
        "stderr": [float(v) for v in rep.stderr],
        "per_query": [[float(v) for v in row] for row in rep.per_query],
        "verdict": {
            "passed": rep.passed,
            "decreasing": rep.decreasing,
            "strictly_decreasing": rep.strictly_decreasing,
            "final_ok": rep.final_ok,
            "threshold": rep.threshold,
            "final_distance": rep.final_distance,
        },
    }


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------


def _run_theorem1(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    rep = dg.theorem1_experiment(
        cfg.triplet,
        cfg.memory(),
        None,
        cfg.mesh,
        cfg.replicas,
        cfg.stream(),
        theory=cfg.theory,
        theory_mc_replicas=cfg.mc_replicas,
        tolerance_mult=cfg.tolerance_mult if cfg.tolerance_mult else 5.0,
        threads=cfg.threads,
    )
    report = _report_from_convergence(rep)
    report["params"]["seed"] = cfg.seed
    emit_plotdata(report, cfg.out_dir)
    return report, rep.passed


def _run_supercritical(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    alpha = cfg.alpha if cfg.alpha is not None else 1.5
    rep = dg.supercritical_experiment(
        alpha,
        cfg.memory(),
        cfg.theta,
        cfg.mesh,
        cfg.replicas,
        cfg.stream(),
        final_threshold=cfg.final_threshold,
        threads=cfg.threads,
    )
    report = _report_from_convergence(rep)
    report["params"]["seed"] = cfg.seed
    emit_plotdata(report, cfg.out_dir)
    return report, rep.passed


def _run_prop8(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    functionals = [dg.PathFunctional.terminal_equals(k) for k in cfg.ks]
    rep = dg.prop8_experiment(
        cfg.memory(), [cfg.n], functionals, cfg.replicas, cfg.stream(),
        mc_replicas=cfg.mc_replicas,
    )
    z = rep.z_scores
    passed = bool(np.all(np.abs(z) < cfg.tolerance_mult))
    report = {
        "experiment": "prop8",
        "params": {"p": cfg.p, "n": cfg.n, "replicas": cfg.replicas, "seed": cfg.seed},
        "schedule": list(rep.n_schedule),
        "functionals": list(rep.functional_names),
        "estimates": [[float(v) for v in row] for row in rep.estimates],
        "stderr": [[float(v) for v in row] for row in rep.stderr],
        "references": [float(v) for v in rep.references],
        "reference_se": [float(v) for v in rep.reference_se],
        "z_scores": [[float(v) for v in row] for row in z],
        "verdict": {"passed": passed, "tolerance_mult": cfg.tolerance_mult},
    }
    rows = []
    for i, n in enumerate(rep.n_schedule):
        for fi, name in enumerate(rep.functional_names):
            rows.append(
                [n, name, float(rep.estimates[i, fi]), float(rep.stderr[i, fi]),
                 float(rep.references[fi]), float(rep.reference_se[fi]), float(z[i, fi])]
            )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(cfg.out_dir / "prop8.csv",
               ["n", "functional", "estimate", "stderr", "reference", "reference_se", "z"],
               rows)
    return report, passed


def _run_simulate_ys(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    rho = cfg.rho if cfg.rho is not None else (cfg.memory().rho if cfg.p else 2.0)
    draws = ys_sample(rho, cfg.stream().generator(0), size=cfg.replicas)
    counts = np.bincount(draws)
    rows = [[int(k), int(c), c / cfg.replicas] for k, c in enumerate(counts) if k >= 1]
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(cfg.out_dir / "histogram.csv", ["k", "count", "freq"], rows)
    kmax = counts.size - 1
    pmf = ys_pmf(np.arange(1, kmax + 1), rho)
    emp = counts[1:] / cfg.replicas
    tv = 0.5 * float(np.abs(emp - pmf).sum()) + 0.5 * float(1.0 - pmf.sum())
    report = {
        "experiment": "simulate-ys",
        "params": {"rho": rho, "replicas": cfg.replicas, "seed": cfg.seed},
        "schedule": [],
        "tv_distance": tv,
        "verdict": None,
    }
    return report, None


def _run_simulate_walk(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    stream = cfg.stream()
    if cfg.walk == "elephant":
        walk = elephant_walk(cfg.n, cfg.memory(), stream.generator(0))
    elif cfg.walk == "skeleton":
        if cfg.triplet is None:
            raise ConfigError("walk = skeleton requires a [triplet] section")
        walk = skeleton_reinforced_walk(cfg.triplet, cfg.n, cfg.memory(), stream.generator(0))
    else:
        raise ConfigError(f"unknown walk kind {cfg.walk!r}")
    sums = walk.partial_sums
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = [[k] + [float(v) for v in np.atleast_1d(sums[k])] for k in range(sums.shape[0])]
    dim = np.atleast_1d(sums[0]).size
    _write_csv(cfg.out_dir / "walk.csv", ["k"] + [f"value{i}" for i in range(dim)], rows)
    counter_rows = []
    for j, events in sorted(walk.record.counters().items()):
        for k in events:
            counter_rows.append([j, int(k)])
    _write_csv(cfg.out_dir / "counters.csv", ["j", "k_event"], counter_rows)
    report = {
        "experiment": "simulate-walk",
        "params": {"p": cfg.p, "n": cfg.n, "walk": cfg.walk, "seed": cfg.seed},
        "schedule": [],
        "terminal": [float(v) for v in np.atleast_1d(sums[-1])],
        "verdict": None,
    }
    return report, None


def _nrlp_config(cfg: ExperimentConfig) -> NrlpConfig:
    grid = np.asarray(cfg.grid, dtype=float)
    return NrlpConfig(cfg.triplet, cfg.memory(), cfg.truncation_eps, grid)


def _choose_sampler(cfg: ExperimentConfig, nc: NrlpConfig) -> str:
    if cfg.sampler != "auto":
        return cfg.sampler
    jm = nc.triplet.jump_measure
    pos = nc.grid[nc.grid > 0]
    if isinstance(jm, IsotropicStable) and nc.triplet.dim == 1 and pos.size <= 2:
        # Mixture sampling is exact and its cost does not grow as the cutoff
        # shrinks; prefer it whenever the series would need many atoms.
        if jm.alpha * math.log(1.0 / nc.truncation_eps) > 4.0:
            return "spectral"
    return "series"


def _sample_marginals(cfg: ExperimentConfig, nc: NrlpConfig, replicas: int) -> tuple[np.ndarray, str]:
    sampler = _choose_sampler(cfg, nc)
    if sampler == "spectral":
        return stable_nrlp_marginals(nc, cfg.stream().substream(7), replicas), sampler
    return nrlp_marginals(nc, cfg.stream().substream(7), replicas), sampler


def _run_simulate_nrlp(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    nc = _nrlp_config(cfg)
    values, sampler = _sample_marginals(cfg, nc, cfg.replicas)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for r in range(values.shape[0]):
        for gi, t in enumerate(nc.grid):
            rows.append([r, float(t)] + [float(v) for v in values[r, gi]])
    dim = values.shape[2]
    _write_csv(cfg.out_dir / "paths.csv",
               ["replica", "time"] + [f"value{i}" for i in range(dim)], rows)
    budget = None
    if not isinstance(nc.triplet.jump_measure, ZeroJumps):
        try:
            budget = float(truncation_budget(nc))
        except NrlevyError:
            budget = None
    report = {
        "experiment": "simulate-nrlp",
        "params": {
            "p": cfg.p, "replicas": cfg.replicas, "truncation_eps": cfg.truncation_eps,
            "sampler": sampler, "seed": cfg.seed,
        },
        "schedule": [],
        "grid": [float(t) for t in nc.grid],
        "truncation_budget": budget,
        "verdict": None,
    }
    return report, None


def _run_cf_compare(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    nc = _nrlp_config(cfg)
    pos_times = nc.grid[nc.grid > 0]
    queries = [
        CfQuery(np.asarray([th]), np.asarray([t])) for t in pos_times for th in cfg.thetas
    ]
    values, sampler = _sample_marginals(cfg, nc, cfg.replicas)
    ecf = dg.empirical_cf(values[:, :, 0] if values.shape[2] == 1 else values, nc.grid, queries)
    theory = np.empty(len(queries), dtype=complex)
    theory_se = np.zeros(len(queries))
    for qi, q in enumerate(queries):
        if cfg.theory in ("auto", "exact"):
            try:
                theory[qi] = reinforced_cf_exact(nc.triplet, nc.p, q)
                continue
            except UnsupportedFamilyError:
                if cfg.theory == "exact":
                    raise
        est = reinforced_cf(nc.triplet, nc.p, q, cfg.mc_replicas,
                            cfg.stream().substream(1000 + qi).generator())
        theory[qi] = est.value
        theory_se[qi] = est.value_se
    dist = np.abs(ecf.estimates - theory)
    threshold = cfg.tolerance_mult / math.sqrt(cfg.replicas)
    passed = bool(dist.max() < threshold)
    rows = []
    for qi, q in enumerate(queries):
        rows.append([
            float(q.thetas[0, 0]), float(q.times[0]),
            float(ecf.estimates[qi].real), float(ecf.estimates[qi].imag),
            float(theory[qi].real), float(theory[qi].imag),
            float(dist[qi]), float(ecf.stderr),
        ])
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(cfg.out_dir / "cfdata.csv",
               ["theta", "t", "ecf_re", "ecf_im", "theory_re", "theory_im",
                "distance", "stderr"], rows)
    records = [
        {
            "theta": float(q.thetas[0, 0]), "t": float(q.times[0]),
            "re": float(ecf.estimates[qi].real), "im": float(ecf.estimates[qi].imag),
            "theory_re": float(theory[qi].real), "theory_im": float(theory[qi].imag),
            "stderr": float(ecf.stderr),
        }
        for qi, q in enumerate(queries)
    ]
    report = {
        "experiment": "cf-compare",
        "params": {
            "p": cfg.p, "replicas": cfg.replicas, "truncation_eps": cfg.truncation_eps,
            "sampler": sampler, "theory": cfg.theory, "seed": cfg.seed,
        },
        "schedule": [],
        "records": records,
        "max_distance": float(dist.max()),
        "verdict": {"passed": passed, "threshold": threshold},
    }
    return report, passed


def _run_moments(cfg: ExperimentConfig) -> tuple[dict, bool | None]:
    rho = cfg.rho if cfg.rho is not None else (cfg.memory().rho if cfg.p else 4.0)
    grid = np.asarray([t for t in cfg.grid if t > 0])
    vals = ys_process_values(rho, grid, cfg.stream().generator(0), cfg.replicas)
    checks = []
    ok = True
    for gi, t in enumerate(grid):
        emp = float(vals[:, gi].mean())
        se = float(vals[:, gi].std(ddof=1) / math.sqrt(cfg.replicas))
        ref = ys_mean(float(t), rho)
        z = (emp - ref) / se
        ok &= abs(z) < cfg.tolerance_mult
        checks.append({"moment": f"mean@{t}", "estimate": emp, "stderr": se,
                       "reference": ref, "z": z})
    if rho > 2 and grid.size >= 2:
        prod = vals[:, 0].astype(float) * vals[:, -1].astype(float)
        emp = float(prod.mean())
        se = float(prod.std(ddof=1) / math.sqrt(cfg.replicas))
        ref = ys_cross_moment(float(grid[0]), float(grid[-1]), rho)
        z = (emp - ref) / se
        ok &= abs(z) < cfg.tolerance_mult
        checks.append({"moment": f"cross@{grid[0]},{grid[-1]}", "estimate": emp,
                       "stderr": se, "reference": ref, "z": z})
    report = {
        "experiment": "moments",
        "params": {"rho": rho, "replicas": cfg.replicas, "seed": cfg.seed},
        "schedule": [],
        "checks": checks,
        "verdict": {"passed": bool(ok), "tolerance_mult": cfg.tolerance_mult},
    }
    return report, bool(ok)


_RUNNERS = {
    "theorem1": _run_theorem1,
    "supercritical": _run_supercritical,
    "prop8": _run_prop8,
    "simulate-ys": _run_simulate_ys,
    "simulate-walk": _run_simulate_walk,
    "simulate-nrlp": _run_simulate_nrlp,
    "cf-compare": _run_cf_compare,
    "moments": _run_moments,
}


def run(config_path: Path, overrides: argparse.Namespace | None = None) -> int:
    """Execute the configured experiment; returns the process exit code."""
    try:
        cfg = load_config(config_path)
        if overrides is not None:
            _apply_overrides(cfg, overrides)
        validate(cfg)
    except (NrlevyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report, passed = _RUNNERS[cfg.experiment](cfg)
    path = write_report(report, cfg.out_dir)
    print(f"wrote {path}")
    if passed is None:
        return 0
    print(f"verdict: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 2


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> None:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replicas is not None:
        cfg.replicas = args.replicas
    if args.out is not None:
        cfg.out_dir = Path(args.out)
    if args.threads is not None:
        cfg.threads = args.threads
    if args.tolerance_mult is not None:
        cfg.tolerance_mult = args.tolerance_mult
    if args.p is not None:
        cfg.p = args.p
    if args.alpha is not None:
        cfg.alpha = args.alpha
    if args.mesh is not None:
        cfg.mesh = _parse_ints(args.mesh)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nrlevy",
        description="Experiment harness for reinforced walks and noise-reinforced Levy processes",
    )
    parser.add_argument("--config", required=True, type=Path, help="experiment config file")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--replicas", type=int, help="replica count override")
    parser.add_argument("--out", type=str, help="output directory override")
    parser.add_argument("--threads", type=int, help="worker threads (never changes results)")
    parser.add_argument("--tolerance-mult", dest="tolerance_mult", type=float,
                        help="verdict tolerance in Monte Carlo standard errors")
    parser.add_argument("--p", type=float, help="memory parameter override")
    parser.add_argument("--alpha", type=float, help="stable index override")
    parser.add_argument("--mesh", type=str, help="comma-separated mesh override")
    args = parser.parse_args(argv)
    return run(args.config, args)


if __name__ == "__main__":
    sys.exit(main())
