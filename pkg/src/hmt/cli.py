"""Command-line front end: words, moments, simulate, norm-scan.

Every run is reproducible: all randomness flows from the --seed flag
through documented stream derivation, identical invocations write
byte-identical artifacts, and JSON outputs follow the schema shipped in
hmt/schemas/artifact.schema.json.

Exit codes: 0 success, 2 invalid arguments, 3 capacity/budget exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .ensembles import ENSEMBLES, distribution_from_tag, sample_matrix
from .errors import CapacityError, InvalidArgumentError, NumericError
from .limits import MOMENT_FAMILIES, moment_table
from .rng import TAG_REPLICATE, TAG_VOLUME_MC, mix
from .spectra import empirical_spectrum, histogram, spectral_norm
from .volumes import (
    DEFAULT_DIMENSION_CAP,
    VolumeEstimate,
    build_system,
    volume_exact,
    volume_mc,
)
from .words import enumerate_words, height, is_irreducible, is_noncrossing

DEFAULT_SEED = 314159
DEFAULT_MC_SAMPLES = 100_000
SIMULATE_BUDGET = 1 << 23  # n * replicates cap

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAPACITY = 3
EXIT_NUMERIC = 4


@dataclass
class RunConfig:
    """Parsed flags of one invocation, echoed into every JSON artifact."""

    subcommand: str
    family: str | None = None
    ensemble: str | None = None
    k: int | None = None
    order: int | None = None
    max_order: int | None = None
    n: int | None = None
    ns: tuple[int, ...] | None = None
    replicates: int | None = None
    dist: str | None = None
    mean: float | None = None
    seed: int = DEFAULT_SEED
    method: str | None = None
    samples: int | None = None
    bins: int | None = None
    scale: str | None = None
    threads: int = 1
    output: str | None = None
    output_prefix: str | None = None
    format: str = "csv"

    def public_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmt",
        description=(
            "Limiting spectral moments of random Hankel, Markov and Toeplitz "
            "matrices: word tables, exact/Monte-Carlo moments, ensemble "
            "simulation and spectral-norm scans."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"hmt {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, with_format=True):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="master seed; all randomness derives from it")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (outputs do not depend on this)")
        if with_format:
            p.add_argument("-o", "--output", default=None,
                           help="output path (default: stdout)")
            p.add_argument("--format", choices=("csv", "json"), default="csv",
                           help="artifact format")

    p_words = sub.add_parser(
        "words", help="per-word table: height, predicates, p_T, p_H",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p_words.add_argument("--k", type=int, required=True, help="half-length of the words")
    p_words.add_argument("--method", choices=("auto", "exact", "mc"), default="auto",
                         help="volume method; auto switches to mc above the exact cap")
    p_words.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES,
                         help="Monte Carlo samples per word")
    add_common(p_words)

    p_mom = sub.add_parser(
        "moments", help="limiting moments of one family up to an order",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p_mom.add_argument("--family", choices=MOMENT_FAMILIES, required=True)
    p_mom.add_argument("--max-order", dest="max_order", type=int, default=8,
                       help="largest (even) order to emit")
    p_mom.add_argument("--order", type=int, default=None,
                       help="emit a single order instead of the whole table")
    p_mom.add_argument("--method", choices=("exact", "mc"), default="exact")
    p_mom.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES,
                       help="Monte Carlo samples per word")
    add_common(p_mom)

    p_sim = sub.add_parser(
        "simulate", help="sample an ensemble, emit spectra/histogram/moment artifacts",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p_sim.add_argument("--ensemble", choices=ENSEMBLES, required=True)
    p_sim.add_argument("--n", type=int, required=True, help="matrix size")
    p_sim.add_argument("--replicates", type=int, default=20)
    p_sim.add_argument("--dist", choices=("rademacher", "gaussian", "triangular",
                                          "shifted_gaussian"), default="gaussian")
    p_sim.add_argument("--mean", type=float, default=0.0,
                       help="entry mean (shifted_gaussian only)")
    p_sim.add_argument("--bins", type=int, default=60, help="histogram bins")
    p_sim.add_argument("--scale", choices=("sqrt_n", "n"), default="sqrt_n",
                       help="eigenvalue scaling: 1/sqrt(n) or 1/n")
    p_sim.add_argument("--max-order", dest="max_order", type=int, default=8,
                       help="largest even empirical moment to emit")
    p_sim.add_argument("--output-prefix", dest="output_prefix", required=True,
                       help="artifact path prefix; writes <prefix>_eigenvalues.csv, "
                            "<prefix>_histogram.csv, <prefix>_moments.json")
    add_common(p_sim, with_format=False)

    p_norm = sub.add_parser(
        "norm-scan", help="spectral-norm ratios of Markov matrices over sizes",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p_norm.add_argument("--ns", type=str, default="256,1024,4096",
                        help="comma-separated matrix sizes")
    p_norm.add_argument("--replicates", type=int, default=3)
    p_norm.add_argument("--dist", choices=("rademacher", "gaussian", "triangular",
                                           "shifted_gaussian"), default="gaussian")
    p_norm.add_argument("--mean", type=float, default=0.0,
                        help="entry mean (shifted_gaussian only)")
    add_common(p_norm)
    return parser


def _volume_json(est: VolumeEstimate) -> dict:
    out: dict = {"value": float(est.value), "method": est.method}
    if isinstance(est.value, Fraction):
        out["numerator"] = est.value.numerator
        out["denominator"] = est.value.denominator
    if est.stderr is not None:
        out["stderr"] = est.stderr
    if est.samples is not None:
        out["samples"] = est.samples
    return out


def _volume_csv(est: VolumeEstimate) -> tuple[str, str]:
    if isinstance(est.value, Fraction):
        return str(est.value), ""
    return f"{float(est.value):.17g}", f"{est.stderr:.17g}" if est.stderr is not None else ""


def _write_artifact(config: RunConfig, rows: list[dict], csv_columns: list[str]) -> None:
    if config.format == "json":
        payload = {
            "command": config.subcommand,
            "config": config.public_dict(),
            "results": rows,
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [",".join(csv_columns)]
        for row in rows:
            lines.append(",".join(str(row.get(col, "")) for col in csv_columns))
        text = "\n".join(lines) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_words(config: RunConfig) -> int:
    words = enumerate_words(config.k)
    exact_ok = config.k + 1 <= DEFAULT_DIMENSION_CAP
    method = config.method
    if method == "auto":
        method = "exact" if exact_ok else "mc"
    if method == "exact" and not exact_ok:
        raise CapacityError(
            f"k={config.k} needs exact volumes in dimension {config.k + 1} "
            f"(cap {DEFAULT_DIMENSION_CAP}); use --method mc"
        )
    json_rows = []
    csv_rows = []
    for index, w in enumerate(words):
        volumes = {}
        for kind in ("toeplitz", "hankel"):
            system = build_system(w, kind)
            if method == "exact":
                volumes[kind] = volume_exact(system)
            else:
                volumes[kind] = volume_mc(
                    system, config.samples, mix(TAG_VOLUME_MC, config.seed, config.k, index)
                )
        json_rows.append({
            "word": str(w),
            "height": height(w),
            "irreducible": is_irreducible(w),
            "noncrossing": is_noncrossing(w),
            "p_toeplitz": _volume_json(volumes["toeplitz"]),
            "p_hankel": _volume_json(volumes["hankel"]),
        })
        pt, pt_se = _volume_csv(volumes["toeplitz"])
        ph, ph_se = _volume_csv(volumes["hankel"])
        csv_rows.append({
            "word": str(w),
            "height": height(w),
            "irreducible": is_irreducible(w),
            "noncrossing": is_noncrossing(w),
            "p_toeplitz": pt,
            "p_toeplitz_stderr": pt_se,
            "p_hankel": ph,
            "p_hankel_stderr": ph_se,
        })
    columns = ["word", "height", "irreducible", "noncrossing",
               "p_toeplitz", "p_toeplitz_stderr", "p_hankel", "p_hankel_stderr"]
    _write_artifact(config, json_rows if config.format == "json" else csv_rows, columns)
    return EXIT_OK


def cmd_moments(config: RunConfig) -> int:
    max_order = config.order if config.order is not None else config.max_order
    if max_order % 2 != 0 or max_order < 0:
        raise InvalidArgumentError(f"--order/--max-order must be even and >= 0, got {max_order}")
    table = moment_table(
        config.family,
        max_order,
        method=config.method,
        mc_samples=config.samples or DEFAULT_MC_SAMPLES,
        seed=config.seed,
    )
    orders = (
        [config.order]
        if config.order is not None
        else list(range(0, max_order + 1))
    )
    json_rows = []
    csv_rows = []
    for order in orders:
        if order % 2 == 1:
            row = {"order": order, "value": 0.0, "numerator": 0, "denominator": 1}
            csv_row = {"order": order, "value": "0", "numerator": 0, "denominator": 1,
                       "stderr": ""}
        else:
            value = table.entries[order]
            if isinstance(value, Fraction):
                row = {"order": order, "value": float(value),
                       "numerator": value.numerator, "denominator": value.denominator}
                csv_row = {"order": order, "value": str(value),
                           "numerator": value.numerator, "denominator": value.denominator,
                           "stderr": ""}
            else:
                stderr = table.stderrs.get(order, 0.0)
                row = {"order": order, "value": value, "stderr": stderr}
                csv_row = {"order": order, "value": f"{value:.17g}", "numerator": "",
                           "denominator": "", "stderr": f"{stderr:.17g}"}
        json_rows.append(row)
        csv_rows.append(csv_row)
    columns = ["order", "value", "numerator", "denominator", "stderr"]
    _write_artifact(config, json_rows if config.format == "json" else csv_rows, columns)
    return EXIT_OK


def _replicate_spectra(config: RunConfig, ensemble: str, n: int):
    dist = distribution_from_tag(config.dist, config.mean)

    def one(rep: int):
        sample = sample_matrix(ensemble, n, dist, mix(TAG_REPLICATE, config.seed, rep))
        return empirical_spectrum(sample, scale=config.scale or "sqrt_n")

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(one, range(config.replicates)))
    return [one(rep) for rep in range(config.replicates)]


def cmd_simulate(config: RunConfig) -> int:
    if config.n < 1 or config.replicates < 1:
        raise InvalidArgumentError("--n and --replicates must be positive")
    if config.n * config.replicates > SIMULATE_BUDGET:
        raise CapacityError(
            f"n * replicates = {config.n * config.replicates} exceeds the "
            f"budget {SIMULATE_BUDGET}"
        )
    specs = _replicate_spectra(config, config.ensemble, config.n)
    pooled = np.sort(np.concatenate([s.eigenvalues for s in specs]))

    prefix = config.output_prefix
    with open(f"{prefix}_eigenvalues.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("eigenvalue\n")
        for value in pooled:
            fh.write(f"{value:.17g}\n")

    hist = histogram(pooled, config.bins)
    hist.to_csv(f"{prefix}_histogram.csv")

    rows = []
    for order in range(2, config.max_order + 1, 2):
        per_rep = np.array([float(np.mean(s.eigenvalues**order)) for s in specs])
        mean = float(per_rep.mean())
        stderr = float(per_rep.std(ddof=1) / math.sqrt(len(per_rep))) if len(per_rep) > 1 else 0.0
        rows.append({"order": order, "mean": mean, "stderr": stderr})
    payload = {
        "command": "simulate",
        "config": config.public_dict(),
        "results": rows,
    }
    with open(f"{prefix}_moments.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    sys.stdout.write(
        f"simulate {config.ensemble} n={config.n} replicates={config.replicates} "
        f"scale={config.scale}: wrote {prefix}_eigenvalues.csv, "
        f"{prefix}_histogram.csv, {prefix}_moments.json\n"
    )
    for row in rows:
        sys.stdout.write(
            f"  m_{row['order']} = {row['mean']:.6g} +/- {row['stderr']:.3g}\n"
        )
    return EXIT_OK


def cmd_norm_scan(config: RunConfig) -> int:
    sizes = config.ns
    if not sizes:
        raise InvalidArgumentError("--ns must list at least one size")
    dist = distribution_from_tag(config.dist, config.mean)
    rows = []
    for n in sizes:
        def one(rep: int, n=n):
            sample = sample_matrix("markov", n, dist, mix(TAG_REPLICATE, config.seed, n, rep))
            return spectral_norm(sample.matrix)

        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                norms = np.array(list(pool.map(one, range(config.replicates))))
        else:
            norms = np.array([one(rep) for rep in range(config.replicates)])
        denom = math.sqrt(2 * n * math.log(n)) if n > 1 else 1.0
        r1 = norms / denom
        r2 = norms / n
        count = len(norms)
        se1 = float(r1.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
        se2 = float(r2.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
        rows.append({
            "n": n,
            "ratio_sqrt_2nlogn_mean": float(r1.mean()),
            "ratio_sqrt_2nlogn_stderr": se1,
            "ratio_n_mean": float(r2.mean()),
            "ratio_n_stderr": se2,
            "replicates": count,
        })
    csv_rows = [
        {k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()}
        for row in rows
    ]
    columns = ["n", "ratio_sqrt_2nlogn_mean", "ratio_sqrt_2nlogn_stderr",
               "ratio_n_mean", "ratio_n_stderr", "replicates"]
    _write_artifact(config, rows if config.format == "json" else csv_rows, columns)
    return EXIT_OK


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    data = {k: v for k, v in vars(args).items() if k in fields}
    if "ns" in data and isinstance(data["ns"], str):
        try:
            data["ns"] = tuple(int(part) for part in data["ns"].split(",") if part)
        except ValueError as exc:
            raise InvalidArgumentError(f"bad --ns list: {exc}") from exc
    return RunConfig(**data)


_HANDLERS = {
    "words": cmd_words,
    "moments": cmd_moments,
    "simulate": cmd_simulate,
    "norm-scan": cmd_norm_scan,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return _HANDLERS[args.subcommand](config)
    except InvalidArgumentError as exc:
        print(f"hmt: invalid argument: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CapacityError as exc:
        print(f"hmt: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NumericError as exc:
        print(f"hmt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
