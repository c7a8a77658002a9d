"""Command-line harness: simulate, exact-tables, gap, sample-matrix, bench-coulomb."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXACT_KERNEL_MAX_N, ConfigError, ExperimentFile
from .coulomb import CoulombMethod, coulomb_drift_naive, coulomb_drift_treecode
from .dbm import SimulationConfig, run_ensemble
from .equilibrium import cdf, density, edge
from .fredholm import gap_curve
from .orthopoly import compute_recurrence, density_diag, finite_cdf
from .stats import EmpiricalDistribution, empirical_gap, ks_distance
from .unitary import format_matrix, sample_invariant_matrices

log = logging.getLogger("dysonsampler")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


class _Outputs:
    """Collects files and writes them together; removes partial output on failure."""

    def __init__(self, directory: Path):
        self.dir = directory
        self.files: dict[str, str] = {}

    def add(self, name, text):
        self.files[name] = text

    def commit(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            for name, text in self.files.items():
                path = self.dir / name
                path.write_text(text)
                written.append(path)
        except BaseException:
            for path in written:
                path.unlink(missing_ok=True)
            raise
        return written


def time_label(t: float) -> str:
    return format(t, ".10g")


def reference_law(exp: ExperimentFile):
    p = exp.potential()
    if exp.use_finite_reference():
        n = exp.get("n")
        if n > EXACT_KERNEL_MAX_N:
            log.warning("finite-N kernel requested for n=%d > %d; accuracy is not guaranteed",
                        n, EXACT_KERNEL_MAX_N)
        table = compute_recurrence(p, n)
        return "finite", lambda s: finite_cdf(table, s)
    return "limiting", lambda s: cdf(p, s)


def manifest(exp: ExperimentFile, command: str, extra=None) -> str:
    data = {"command": command, "version": __version__, "seed": exp.get("seed"),
            "config": exp.resolved()}
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_simulate(exp: ExperimentFile, threads: int = 1) -> list[Path]:
    cfg = exp.simulation()
    result = run_ensemble(cfg, threads=threads)
    which, F = reference_law(exp)
    out = _Outputs(Path(exp.get("output_dir")))
    ks_rows = []
    for t, pooled in zip(result.times, result.pooled):
        out.add(f"samples_t{time_label(t)}.csv", csv_text(["lambda"], ([v] for v in pooled)))
        ks_rows.append((t, ks_distance(EmpiricalDistribution(pooled), F)))
    out.add("ks.csv", csv_text(["t", "D"], ks_rows))
    out.add("manifest.json", manifest(exp, "simulate", {"reference_law": which}))
    return out.commit()


def cmd_exact_tables(exp: ExperimentFile) -> list[Path]:
    p = exp.potential()
    a = edge(p)
    s = np.linspace(-2.4 * a, 2.4 * a, exp.get("table.points"))
    out = _Outputs(Path(exp.get("output_dir")))
    out.add("limiting.csv", csv_text(["s", "rho", "F_inf"], zip(s, density(p, s), cdf(p, s))))
    n = exp.values.get("n")
    if n is not None and n <= EXACT_KERNEL_MAX_N:
        table = compute_recurrence(p, n)
        out.add("finite.csv", csv_text(["s", "K_over_N", "F_N"],
                                       zip(s, density_diag(table, s) / n, finite_cdf(table, s))))
    out.add("manifest.json", manifest(exp, "exact-tables"))
    return out.commit()


def default_thetas(p, count=50):
    return np.linspace(2 * edge(p) / count, 2 * edge(p), count)


def cmd_gap(exp: ExperimentFile, threads: int = 1) -> list[Path]:
    n = exp.get("n")
    if n > EXACT_KERNEL_MAX_N:
        raise ConfigError(f"gap needs n <= {EXACT_KERNEL_MAX_N} for the exact column")
    p = exp.potential()
    thetas = np.asarray(exp.get("gap.thetas") or default_thetas(p))
    exact = gap_curve(compute_recurrence(p, n), thetas, exp.get("gap.quad_order"))
    cfg = exp.simulation()
    cfg = SimulationConfig(cfg.n, cfg.potential, cfg.scheme, cfg.t_end, cfg.trials, cfg.init,
                           (cfg.t_end,), cfg.master_seed)
    final = run_ensemble(cfg, threads=threads).snapshots[-1]
    emp = [empirical_gap(final, t) for t in thetas]
    out = _Outputs(Path(exp.get("output_dir")))
    out.add("gap.csv", csv_text(["theta", "A", "empirical_gap"], zip(thetas, exact, emp)))
    out.add("manifest.json", manifest(exp, "gap"))
    return out.commit()


def cmd_sample_matrix(exp: ExperimentFile, count: int, threads: int = 1) -> list[Path]:
    cfg = exp.simulation()
    mats = sample_invariant_matrices(cfg, count, threads=threads)
    out = _Outputs(Path(exp.get("output_dir")))
    for i, m in enumerate(mats):
        out.add(f"matrix_{i}.txt", format_matrix(m))
    if count:
        out.add("manifest.json", manifest(exp, "sample-matrix", {"count": count}))
    return out.commit()


def bench_coulomb(sizes, method: str = "both", seed: int = 0, repeats: int = 3,
                  tree: CoulombMethod | None = None):
    """Rows of (N, method, wall_ns, max_rel_err), best of ``repeats`` timings."""
    tree = tree or CoulombMethod.treecode()
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        x = np.sort(rng.uniform(-2.0, 2.0, int(n)))
        ref = coulomb_drift_naive(x)
        scale = np.max(np.abs(ref))
        runs = [("naive", coulomb_drift_naive), ("treecode", lambda v: coulomb_drift_treecode(v, tree))]
        for name, fn in runs:
            if method not in ("both", name):
                continue
            best = None
            for _ in range(repeats):
                t0 = time.perf_counter_ns()
                d = fn(x)
                dt = time.perf_counter_ns() - t0
                best = dt if best is None else min(best, dt)
            rows.append((int(n), name, int(best), float(np.max(np.abs(d - ref)) / scale)))
    return rows


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment file (key = value lines)")
    common.add_argument("--seed", type=int, help="override the master seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    common.add_argument("--output", type=Path, help="override the output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="dysonsampler", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run the ensemble and write samples, KS series, manifest")
    sub.add_parser("exact-tables", parents=[common], help="tabulate limiting and finite-N laws")
    sub.add_parser("gap", parents=[common], help="exact and empirical gap probabilities")
    sm = sub.add_parser("sample-matrix", parents=[common], help="write invariant-ensemble matrices")
    sm.add_argument("--count", type=int, default=1)
    bc = sub.add_parser("bench-coulomb", parents=[common], help="time naive vs treecode Coulomb sums")
    bc.add_argument("--sizes", default="1024,2048,4096,8192,16384")
    bc.add_argument("--method", choices=["naive", "treecode", "both"], default="both")
    bc.add_argument("--repeats", type=int, default=3)
    return ap


def _experiment(args) -> ExperimentFile:
    if args.config is None:
        raise ConfigError(f"{args.command} requires --config")
    exp = ExperimentFile.load(args.config)
    if args.seed is not None:
        exp.values["seed"] = args.seed
    if args.output is not None:
        exp.values["output_dir"] = str(args.output)
    return exp


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        if args.command == "bench-coulomb":
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            text = csv_text(["N", "method", "wall_ns", "max_rel_err"],
                            bench_coulomb(sizes, args.method, args.seed or 0, args.repeats))
            if args.output is None:
                sys.stdout.write(text)
            else:
                out = _Outputs(args.output)
                out.add("bench_coulomb.csv", text)
                out.commit()
            return 0
        exp = _experiment(args)
        if args.command == "simulate":
            written = cmd_simulate(exp, args.threads)
        elif args.command == "exact-tables":
            written = cmd_exact_tables(exp)
        elif args.command == "gap":
            written = cmd_gap(exp, args.threads)
        else:
            written = cmd_sample_matrix(exp, args.count, args.threads)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
