"""Command-line front end: one subcommand per experiment.

Every run resolves its configuration in three layers (built-in profile,
then ``--config`` JSON, then explicit flags, later layers winning),
executes the mapped experiment, and writes one CSV plus one JSON
manifest into the output directory.  Exit codes form a stable contract:

* 0: run completed, all asserted statistical checks passed
* 1: run completed, at least one statistical check failed
* 2: usage error (unknown subcommand or flag, malformed flag value)
* 3: configuration error (unreadable config, invalid values)
* 4: I/O error while writing results

``--seed`` fully determines all randomness; leaving it out selects the
fixed documented default, never the wall clock, so default runs are
reproducible.  ``--quick`` swaps in a pinned small profile that
exercises every code path in seconds.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .chi import (
    estimate_chi_entrywise,
    estimate_chi_spectral,
    estimate_chi_trace_formula,
)
from .experiments import (
    DEFAULT_SEED,
    ExperimentConfig,
    ROLE_GAUSS_LEFT,
    git_blob_id,
    run_concentration_probe,
    run_decoupling_check,
    run_double_sum_sweep,
    run_gaussian_moment_bound,
    run_lemma_comparison,
    run_matrix_coeff_sweep,
    run_theorem_sweep,
    write_csv,
    write_manifest,
)
from .sampling import SeedStream, sample_ginibre

__all__ = ["CliInvocation", "ConfigError", "main", "parse_args", "run"]

THREADS_ENV_VAR = "EXPANDERLAB_THREADS"

EXPERIMENT_SUBCOMMANDS = (
    "sample", "chi", "lemma", "gaussian-bound", "decouple", "theorem",
    "concentration", "matrix-coeff", "double-sum",
)

# Spectral chi estimation densifies an N^2 x N^2 mean; keep it to small N.
_CHI_SPECTRAL_MAX_N = 16


class ConfigError(Exception):
    """Configuration could not be resolved (exit code 3)."""


@dataclass
class CliInvocation:
    """A validated command line: subcommand plus configuration layers."""

    subcommand: str
    config_path: str | None
    overrides: dict = field(default_factory=dict)
    output_dir: str = "results"
    quick: bool = False


# ---------------------------------------------------------------------------
# Built-in profiles.  The quick profiles are pinned so CI covers every
# code path in well under a minute.

_DEFAULTS = {
    "sample": {"N_grid": [8], "master_seed": DEFAULT_SEED},
    "chi": {"N_grid": [4, 8, 16, 32], "trials": 1000, "master_seed": DEFAULT_SEED},
    "lemma": {"N_grid": [8, 16, 32], "n": 3, "p": 2, "q": math.inf,
              "trials": 300, "master_seed": DEFAULT_SEED, "threads": 1},
    "gaussian-bound": {"N_grid": [4, 8], "n": 3, "p": 4, "trials": 1000,
                       "master_seed": DEFAULT_SEED, "threads": 1},
    "decouple": {"N_grid": [4], "n": 2, "p": 2, "q": math.inf, "trials": 1000,
                 "master_seed": DEFAULT_SEED, "threads": 1},
    "theorem": {"N_grid": [16, 32, 64, 128], "n": 4, "q": math.inf,
                "trials": 200, "master_seed": DEFAULT_SEED, "threads": 1},
    "concentration": {"N_grid": [32, 64, 128, 256], "p_grid": [1, 2, 4, 8],
                      "trials": 200, "master_seed": DEFAULT_SEED, "threads": 1},
    "matrix-coeff": {"N_grid": [8, 16], "n": 2, "block_dim": 2, "q": math.inf,
                     "trials": 200, "master_seed": DEFAULT_SEED, "threads": 1},
    "double-sum": {"N_grid": [8, 16], "n": 3, "q": math.inf, "trials": 200,
                   "master_seed": DEFAULT_SEED, "threads": 1},
}

_QUICK = {
    "sample": {},
    "chi": {"N_grid": [4, 8], "trials": 400},
    "lemma": {"N_grid": [8, 16], "n": 2, "p": 1, "trials": 100, "chi_trials": 300},
    "gaussian-bound": {"N_grid": [4, 8], "p": 4, "trials": 300},
    "decouple": {"N_grid": [4], "p": 2, "trials": 250},
    "theorem": {"N_grid": [16, 32], "trials": 100, "chi_trials": 300},
    "concentration": {"N_grid": [32, 64], "p_grid": [1, 2, 4], "trials": 100},
    "matrix-coeff": {"N_grid": [8], "trials": 100, "chi_trials": 300},
    "double-sum": {"N_grid": [8], "n": 2, "trials": 100, "chi_trials": 300},
}


# ---------------------------------------------------------------------------
# Argument parsing


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _parse_q_flag(text):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")


def _add_common(parser, *, n_flag=True, coeffs=True, p_flag=True, q_flag=True,
                trials=True, threads=True, config=True):
    parser.add_argument("--N", type=_int_list, default=None, metavar="N1,N2,...",
                        help="comma-separated dimension grid")
    if n_flag:
        parser.add_argument("--n", type=int, default=None, help="number of terms")
    if coeffs:
        parser.add_argument("--coeffs", type=str, default=None,
                            help="comma-separated scalars, or a JSON file for "
                                 "blocks / double-sum arrays")
    if p_flag:
        parser.add_argument("--p", type=str, default=None,
                            help="moment exponent (comma list for concentration)")
    if q_flag:
        parser.add_argument("--q", type=_parse_q_flag, default=None,
                            help="Schatten index, a number or 'inf'")
    if trials:
        parser.add_argument("--trials", type=int, default=None,
                            help="Monte Carlo trials per grid point")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default {DEFAULT_SEED})")
    if threads:
        parser.add_argument("--threads", type=int, default=None,
                            help=f"worker threads (fallback: ${THREADS_ENV_VAR})")
    parser.add_argument("--out", type=str, default=None, metavar="DIR",
                        help="output directory (default results/)")
    parser.add_argument("--quick", action="store_true",
                        help="pinned small profile for fast runs")
    if config:
        parser.add_argument("--config", type=str, default=None, metavar="FILE",
                            help="JSON config file; explicit flags override it")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="expanderlab",
        description="Monte Carlo experiments on random tensor-sum superoperators.")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sp = subs.add_parser("sample", help="dump one sampled matrix as re,im CSV")
    _add_common(sp, n_flag=False, coeffs=False, p_flag=False, q_flag=False,
                trials=False, threads=False, config=False)

    sp = subs.add_parser("chi", help="estimate the twirling-channel eigenvalue")
    _add_common(sp, n_flag=False, coeffs=False, p_flag=False, q_flag=False,
                threads=False)

    for name, help_text in [
            ("lemma", "unitary vs Gaussian moment comparison"),
            ("gaussian-bound", "even-moment bound for Gaussian tensor sums"),
            ("decouple", "decoupling factor and distributional identity"),
            ("theorem", "operator-norm sweep of the unitary channel"),
            ("matrix-coeff", "norm sweep with matrix coefficients"),
            ("double-sum", "norm sweep for double sums")]:
        sp = subs.add_parser(name, help=help_text)
        _add_common(sp)

    sp = subs.add_parser("concentration", help="moment growth of the Ginibre norm")
    _add_common(sp, n_flag=False, coeffs=False, q_flag=False)

    sp = subs.add_parser("all", help="run every experiment with shared settings")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", type=str, default=None, metavar="DIR")
    sp.add_argument("--quick", action="store_true")
    return parser


def parse_args(argv):
    """Parse ``argv`` into a :class:`CliInvocation` (argparse exits on usage errors)."""
    args = _build_parser().parse_args(argv)
    overrides = {}
    for key in ("N", "n", "coeffs", "p", "q", "trials", "seed", "threads"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return CliInvocation(
        subcommand=args.subcommand,
        config_path=getattr(args, "config", None),
        overrides=overrides,
        output_dir=args.out if args.out is not None else "results",
        quick=bool(args.quick),
    )


# ---------------------------------------------------------------------------
# Configuration resolution


def _load_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def _pair(v):
    return [float(v), 0.0]


def _parse_coeffs_flag(text):
    """A --coeffs value is either a JSON file path or a comma list of scalars.

    A comma list of real numbers is converted to the canonical pair
    form; a JSON file must already use [re, im] pairs at the leaves.
    """
    if os.path.exists(text):
        try:
            with open(text, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read coefficient file {text}: {exc}")
    try:
        return [_pair(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise ConfigError(
            f"--coeffs must be a comma-separated number list or a JSON file, got {text!r}")


def _default_coeffs(sub, n, block_dim=None):
    # All defaults in canonical [re, im] pair form.
    if sub == "double-sum":
        # Rank-one array v v^T with unit vector v: every entry 1/n.
        return [[_pair(1.0 / n)] * n for _ in range(n)]
    if sub == "matrix-coeff":
        k = block_dim or 2
        blocks = []
        for j in range(n):
            block = [[_pair(0.0) for _ in range(k)] for _ in range(k)]
            block[j % k][j % k] = _pair(1.0)
            blocks.append(block)
        return blocks
    # Normalized flat profile, sum of squares 1.
    return [_pair(1.0 / math.sqrt(n))] * n


def _env_threads():
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")


def _resolve(sub, inv):
    """Merge profile, config file, and flags into one plain dict."""
    merged = dict(_DEFAULTS[sub])
    if inv.quick:
        merged.update(_QUICK[sub])
    if inv.config_path is not None:
        file_cfg = _load_config_file(inv.config_path)
        allowed = set(merged) | {"N_grid", "n", "coeffs", "p", "p_grid", "q",
                                 "trials", "master_seed", "threads",
                                 "chi_trials", "sigma_factor", "block_dim"}
        unknown = set(file_cfg) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys for {sub}: {sorted(unknown)}")
        merged.update(file_cfg)

    flags = inv.overrides
    if "N" in flags:
        merged["N_grid"] = list(flags["N"])
    if "n" in flags:
        merged["n"] = flags["n"]
    if "coeffs" in flags:
        merged["coeffs"] = _parse_coeffs_flag(flags["coeffs"])
    if "p" in flags:
        if sub == "concentration":
            try:
                merged["p_grid"] = [float(x) for x in str(flags["p"]).split(",") if x != ""]
            except ValueError:
                raise ConfigError(f"--p for concentration needs a comma number list, "
                                  f"got {flags['p']!r}")
        else:
            try:
                merged["p"] = int(flags["p"])
            except ValueError:
                raise ConfigError(f"--p must be an integer, got {flags['p']!r}")
    if "q" in flags:
        merged["q"] = flags["q"]
    if "trials" in flags:
        merged["trials"] = flags["trials"]
    if "seed" in flags:
        merged["master_seed"] = flags["seed"]
    if "threads" in flags:
        merged["threads"] = flags["threads"]
    else:
        # Validate the variable whenever it is set, even for subcommands
        # that run single-threaded; a malformed value is a config error
        # everywhere, not just where threading applies.
        env = _env_threads()
        if env is not None and "threads" in merged:
            merged["threads"] = env
    return merged


def _experiment_config(sub, merged):
    data = dict(merged)
    data.pop("block_dim", None)
    n = data.get("n", 1)
    if "coeffs" not in data or data["coeffs"] is None:
        data["coeffs"] = _default_coeffs(sub, n, merged.get("block_dim"))
    try:
        return ExperimentConfig.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid configuration for {sub}: {exc}")


# ---------------------------------------------------------------------------
# Per-subcommand runners: each returns (csv_name, header, rows,
# resolved_config_json, failures) with failures a list of messages.


def _flatten_estimate(prefix, est):
    return {f"{prefix}_mean": est.mean, f"{prefix}_stderr": est.stderr}


def _run_sample(merged):
    N = int(merged["N_grid"][0])
    seed = int(merged["master_seed"])
    stream = SeedStream(seed).child(N, 0, 0, ROLE_GAUSS_LEFT)
    y = sample_ginibre(N, stream)
    header = []
    for j in range(N):
        header.extend([f"re_{j}", f"im_{j}"])
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            row.extend([float(y[i, j].real), float(y[i, j].imag)])
        rows.append(row)
    resolved = {"N": N, "master_seed": seed, "ensemble": "ginibre"}
    return "sample.csv", header, rows, resolved, []


def _run_chi(merged):
    grid = [int(N) for N in merged["N_grid"]]
    trials = int(merged["trials"])
    seed = int(merged["master_seed"])
    root = SeedStream(seed)
    header = ["N", "method", "trials", "chi_hat", "stderr"]
    rows = []
    for N in grid:
        stream = root.child(N)
        estimates = [
            estimate_chi_entrywise(N, trials, stream),
            estimate_chi_trace_formula(N, trials, stream),
        ]
        if N <= _CHI_SPECTRAL_MAX_N:
            estimates.append(estimate_chi_spectral(N, trials, stream))
        for est in estimates:
            rows.append([est.N, est.method, est.trials, est.chi_hat, est.stderr])
    resolved = {"N_grid": grid, "trials": trials, "master_seed": seed}
    return "chi.csv", header, rows, resolved, []


def _run_lemma(merged):
    cfg = _experiment_config("lemma", merged)
    records = run_lemma_comparison(cfg)
    header = ["N", "n", "p", "q", "trials", "lhs_mean", "lhs_stderr", "rhs_mean",
              "rhs_stderr", "ratio_root", "ratio_root_stderr", "chi_hat",
              "chi_stderr", "bound", "passed"]
    rows, failures = [], []
    q_text = "inf" if math.isinf(cfg.q) else cfg.q
    for rec in records:
        rows.append([rec["N"], cfg.n, cfg.p, q_text, cfg.trials,
                     rec["lhs"].mean, rec["lhs"].stderr, rec["rhs"].mean,
                     rec["rhs"].stderr, rec["ratio_root"], rec["ratio_root_stderr"],
                     rec["chi_hat"], rec["chi_stderr"], rec["bound"], rec["passed"]])
        if not rec["passed"]:
            failures.append(
                f"lemma: ratio_root {rec['ratio_root']:.4f} exceeded bound "
                f"{rec['bound']:.4f} at N={rec['N']}")
    return "lemma.csv", header, rows, cfg.to_dict(), failures


def _run_gaussian_bound(merged):
    cfg = _experiment_config("gaussian-bound", merged)
    records = run_gaussian_moment_bound(cfg)
    header = ["N", "n", "p", "trials", "lhs_mean", "lhs_stderr", "rhs_mean",
              "rhs_stderr", "single_moment_mean", "single_moment_stderr",
              "margin_sigmas", "closed_form", "closed_form_sigmas", "passed"]
    rows, failures = [], []
    for rec in records:
        rows.append([rec["N"], cfg.n, cfg.p, cfg.trials, rec["lhs"].mean,
                     rec["lhs"].stderr, rec["rhs_mean"], rec["rhs_stderr"],
                     rec["single_moment"].mean, rec["single_moment"].stderr,
                     rec["margin_sigmas"], rec["closed_form"],
                     rec["closed_form_sigmas"], rec["passed"]])
        if not rec["passed"]:
            failures.append(f"gaussian-bound: lhs exceeded rhs at N={rec['N']} "
                            f"(margin {rec['margin_sigmas']:.2f} sigma)")
    return "gaussian_bound.csv", header, rows, cfg.to_dict(), failures


def _run_decouple(merged):
    cfg = _experiment_config("decouple", merged)
    records = run_decoupling_check(cfg)
    header = ["N", "n", "p", "trials", "coupled_mean", "coupled_stderr",
              "decoupled_mean", "decoupled_stderr", "two_p_factor", "two_p_passed",
              "plain_mean", "plain_stderr", "rotated_mean", "rotated_stderr",
              "plain_sq_mean", "plain_sq_stderr", "rotated_sq_mean",
              "rotated_sq_stderr", "moment_match_passed", "shrink_norm_at_trials",
              "shrink_norm_at_4x", "shrink_factor", "passed"]
    rows, failures = [], []
    for rec in records:
        shrink = rec["mean_shrink"]
        rows.append([rec["N"], cfg.n, cfg.p, cfg.trials,
                     rec["coupled"].mean, rec["coupled"].stderr,
                     rec["decoupled"].mean, rec["decoupled"].stderr,
                     rec["two_p_factor"], rec["two_p_passed"],
                     rec["plain"].mean, rec["plain"].stderr,
                     rec["rotated"].mean, rec["rotated"].stderr,
                     rec["plain_sq"].mean, rec["plain_sq"].stderr,
                     rec["rotated_sq"].mean, rec["rotated_sq"].stderr,
                     rec["moment_match_passed"], shrink["norm_at_trials"],
                     shrink["norm_at_4x_trials"], shrink["shrink_factor"],
                     rec["passed"]])
        if not rec["passed"]:
            failures.append(f"decouple: check failed at N={rec['N']}")
    return "decouple.csv", header, rows, cfg.to_dict(), failures


def _sweep_rows(result, cfg, extra_cols=()):
    rows, failures = [], []
    per_seed = np.asarray(result["per_seed_max"])
    seed_mean = float(per_seed.mean())
    seed_peak = float(per_seed.max())
    frac_above = float(np.mean(per_seed > result["bound"]))
    for rec in result["per_N"]:
        row = [rec["N"], cfg.n, cfg.trials, rec["mean_norm"].mean,
               rec["mean_norm"].stderr, rec["mean_norm"].ci95_halfwidth,
               rec["chi_hat"], rec["chi_stderr"], result["C_emp"], rec["bound"],
               rec["tail_fraction"], rec["tail_passed"], rec["passed"],
               seed_mean, seed_peak, frac_above]
        row.extend(extra_cols)
        rows.append(row)
        if not rec["passed"]:
            failures.append(f"norm sweep: bound violated at N={rec['N']}")
    return rows, failures


def _run_theorem(merged):
    cfg = _experiment_config("theorem", merged)
    result = run_theorem_sweep(cfg)
    header = ["N", "n", "trials", "mean_norm", "stderr", "ci95", "chi_hat",
              "chi_stderr", "C_emp", "bound", "tail_fraction", "tail_passed",
              "passed", "per_seed_max_mean", "per_seed_max_peak",
              "frac_seed_max_above_bound"]
    rows, failures = _sweep_rows(result, cfg)
    return "theorem.csv", header, rows, cfg.to_dict(), failures


def _run_matrix_coeff(merged):
    cfg = _experiment_config("matrix-coeff", merged)
    result = run_matrix_coeff_sweep(cfg)
    header = ["N", "n", "trials", "mean_norm", "stderr", "ci95", "chi_hat",
              "chi_stderr", "C_emp", "bound", "tail_fraction", "tail_passed",
              "passed", "per_seed_max_mean", "per_seed_max_peak",
              "frac_seed_max_above_bound", "block_dim", "bound_term"]
    rows, failures = _sweep_rows(result, cfg,
                                 extra_cols=(result["block_dim"], result["bound_term"]))
    return "matrix_coeff.csv", header, rows, cfg.to_dict(), failures


def _run_double_sum(merged):
    cfg = _experiment_config("double-sum", merged)
    records = run_double_sum_sweep(cfg)
    header = ["N", "n", "trials", "unitary_mean", "unitary_stderr",
              "gaussian_mean", "gaussian_stderr", "ratio", "ratio_stderr",
              "chi_hat", "chi_stderr", "bound", "passed"]
    rows, failures = [], []
    for rec in records:
        rows.append([rec["N"], cfg.n, cfg.trials, rec["unitary"].mean,
                     rec["unitary"].stderr, rec["gaussian"].mean,
                     rec["gaussian"].stderr, rec["ratio"], rec["ratio_stderr"],
                     rec["chi_hat"], rec["chi_stderr"], rec["bound"], rec["passed"]])
        if not rec["passed"]:
            failures.append(f"double-sum: ratio above bound at N={rec['N']}")
    return "double_sum.csv", header, rows, cfg.to_dict(), failures


def _run_concentration(merged):
    grid = [int(N) for N in merged["N_grid"]]
    p_grid = [float(p) for p in merged["p_grid"]]
    trials = int(merged["trials"])
    seed = int(merged["master_seed"])
    threads = int(merged.get("threads", 1))
    result = run_concentration_probe(grid, p_grid, trials, SeedStream(seed),
                                     threads=threads)
    eps_by_N = {e["N"]: e for e in result["epsilon"]}
    header = ["N", "p", "trials", "moment_root", "stderr", "eps_hat",
              "eps_stderr", "beta_hat", "center"]
    rows = []
    for rec in result["records"]:
        eps = eps_by_N[rec["N"]]
        rows.append([rec["N"], rec["p"], rec["trials"], rec["moment_root"],
                     rec["stderr"], eps["eps_hat"], eps["stderr"],
                     result["beta_hat"], result["center"]])
    resolved = {"N_grid": grid, "p_grid": p_grid, "trials": trials,
                "master_seed": seed, "threads": threads}
    return "concentration.csv", header, rows, resolved, []


_RUNNERS = {
    "sample": _run_sample,
    "chi": _run_chi,
    "lemma": _run_lemma,
    "gaussian-bound": _run_gaussian_bound,
    "decouple": _run_decouple,
    "theorem": _run_theorem,
    "concentration": _run_concentration,
    "matrix-coeff": _run_matrix_coeff,
    "double-sum": _run_double_sum,
}


def _execute_one(sub, inv):
    """Resolve, run, and write one experiment; returns its failure list."""
    merged = _resolve(sub, inv)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.monotonic()
    csv_name, header, rows, resolved, failures = _RUNNERS[sub](merged)
    duration = time.monotonic() - t0
    csv_path = os.path.join(inv.output_dir, csv_name)
    try:
        data = write_csv(csv_path, header, rows)
        manifest_path = csv_path[:-4] + ".manifest.json"
        write_manifest(manifest_path, sub, resolved,
                       master_seed=resolved.get("master_seed", DEFAULT_SEED),
                       version=__version__, started_at=started,
                       duration_seconds=duration,
                       outputs={csv_name: git_blob_id(data)})
    except OSError as exc:
        raise _IoFailure(f"cannot write results under {inv.output_dir}: {exc}")
    return failures


class _IoFailure(Exception):
    pass


def run(inv):
    """Execute a parsed invocation; returns the process exit code."""
    subs = EXPERIMENT_SUBCOMMANDS if inv.subcommand == "all" else (inv.subcommand,)
    try:
        os.makedirs(inv.output_dir, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {inv.output_dir}: {exc}",
              file=sys.stderr)
        return 4
    all_failures = []
    for sub in subs:
        try:
            all_failures.extend(_execute_one(sub, inv))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        except _IoFailure as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 4
        except ValueError as exc:
            print(f"error: invalid configuration for {sub}: {exc}", file=sys.stderr)
            return 3
    for message in all_failures:
        print(f"check failed: {message}", file=sys.stderr)
    return 1 if all_failures else 0


def main(argv=None):
    """Console entry point."""
    inv = parse_args(sys.argv[1:] if argv is None else argv)
    return run(inv)


if __name__ == "__main__":
    sys.exit(main())
