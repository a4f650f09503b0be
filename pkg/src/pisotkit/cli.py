"""Command-line front end for the experiment pipelines.

Every subcommand reads an ExperimentConfig (from ``--config`` and/or
flag overrides), writes one JSON document to stdout, and optionally
drops CSV artifacts into ``--out``.  Exit codes: 0 success, 2 a verdict
or classification came back inconclusive, 3 bad input, 4 precision
budget exhausted.  With ``--no-timestamp`` the JSON output is a pure
function of the resolved config, so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import click

from . import annihilate, density, measures, seqgen
from .algnum import IntPolynomial, classify_pisot, precision_budget
from .errors import Inconclusive, PisotkitError, PrecisionExhausted
from .experiments import (
    INCONCLUSIVE,
    ExperimentConfig,
    build_sequence,
    spectrum_scan,
    verify_main_theorem,
)
from .samples import float_upper
from .theta import Theta

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_PRECISION = 4

SCHEMA_VERSION = 1


def _sanitize(obj):
    """Make a result tree JSON-strict: keys to str, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _emit(command: str, payload: dict, no_timestamp: bool) -> None:
    doc = dict(payload)
    doc["schema_version"] = SCHEMA_VERSION
    doc["command"] = command
    if not no_timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    click.echo(json.dumps(_sanitize(doc), sort_keys=True, indent=2))


def _out_dir(out) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def common_options(fn):
    for opt in reversed(
        [
            click.option(
                "--config",
                "config_path",
                type=click.Path(exists=True, dir_okay=False),
                default=None,
                help="JSON experiment config; flags override its fields.",
            ),
            click.option(
                "--out",
                "out",
                type=click.Path(file_okay=False),
                default=None,
                help="Directory for CSV artifacts.",
            ),
            click.option(
                "--precision-max",
                type=int,
                default=None,
                help="Cap on extra precision bits any escalation may add.",
            ),
            click.option("--seed", type=int, default=None, help="Audit seed override."),
            click.option(
                "--jobs",
                type=int,
                default=1,
                show_default=True,
                help="Concurrent experiments for batch configs.",
            ),
            click.option(
                "--no-timestamp",
                is_flag=True,
                help="Omit the timestamp so outputs are byte-reproducible.",
            ),
        ]
    ):
        fn = opt(fn)
    return fn


def config_overrides(fn):
    for opt in reversed(
        [
            click.option("--polynomial", default=None, help="Integer polynomial text."),
            click.option(
                "--theta",
                "theta_text",
                default=None,
                help='Shift: "1/3", "alg:POLY:lo,hi", or "dec:VALUE:ERR".',
            ),
            click.option("--xi", default=None, help="Scaling xi as an exact rational."),
            click.option("-n", "--n", "n_terms", type=int, default=None, help="Sample count."),
            click.option(
                "--generator",
                "generator_text",
                default=None,
                help="Generator spec as inline JSON.",
            ),
            click.option(
                "--tolerance",
                "tolerance_kv",
                multiple=True,
                help="Override one tolerance, KEY=VALUE (repeatable).",
            ),
        ]
    ):
        fn = opt(fn)
    return fn


def _parse_tolerances(pairs) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise click.UsageError(f"--tolerance needs KEY=VALUE, got {pair!r}")
        out[key.strip()] = json.loads(value)
    return out


def _load_config_dicts(config_path) -> list[dict]:
    if config_path is None:
        return [{}]
    with open(config_path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        if not data:
            raise click.UsageError("batch config file is an empty list")
        return [dict(d) for d in data]
    return [dict(data)]


def _resolve_configs(
    config_path,
    polynomial=None,
    theta_text=None,
    xi=None,
    n_terms=None,
    generator_text=None,
    tolerance_kv=(),
    seed=None,
    allow_batch=False,
) -> list[ExperimentConfig]:
    dicts = _load_config_dicts(config_path)
    if len(dicts) > 1 and not allow_batch:
        raise click.UsageError("batch config lists are only supported by verify-main-theorem")
    tol_overrides = _parse_tolerances(tolerance_kv)
    configs = []
    for data in dicts:
        if polynomial is not None:
            data["polynomial"] = polynomial
        if theta_text is not None:
            data["theta"] = theta_text
        if xi is not None:
            data["xi"] = xi
        if n_terms is not None:
            data["n"] = n_terms
        if generator_text is not None:
            data["generator"] = json.loads(generator_text)
        if tol_overrides:
            data["tolerances"] = {**data.get("tolerances", {}), **tol_overrides}
        if seed is not None:
            data["seed"] = seed
        missing = [key for key in ("polynomial", "theta", "generator", "n") if key not in data]
        if missing:
            raise click.UsageError(
                f"config is missing {', '.join(missing)}; pass --config or the matching flags"
            )
        configs.append(ExperimentConfig.from_dict(data))
    return configs


@click.group()
def cli():
    """Certified experiments on Pisot powers, annihilated sequences, and shifts."""


# -- pisot ------------------------------------------------------------------


@cli.command("pisot")
@click.argument("polynomial", required=False)
@common_options
def cmd_pisot(polynomial, config_path, out, precision_max, seed, jobs, no_timestamp):
    """Certify whether POLYNOMIAL has a Pisot largest real root."""
    if polynomial is None:
        dicts = _load_config_dicts(config_path)
        polynomial = dicts[0].get("polynomial")
        if polynomial is None:
            raise click.UsageError("pass a polynomial argument or --config with one")
    poly = IntPolynomial.parse(polynomial)
    code = EXIT_OK
    with _budget(precision_max):
        try:
            report = classify_pisot(poly)
            result = {
                "polynomial": str(report.polynomial),
                "is_pisot": report.is_pisot,
                "alpha": None if report.alpha is None else float(report.alpha.value),
                "alpha_abs_error": (
                    None if report.alpha is None else float_upper(report.alpha.abs_error)
                ),
                "conjugate_moduli": [float(m.value) for m in report.conjugate_moduli],
                "reason": report.reason,
                "working_precision": report.working_precision,
            }
        except Inconclusive as exc:
            result = {
                "polynomial": str(poly),
                "is_pisot": None,
                "reason": str(exc),
            }
            code = EXIT_INCONCLUSIVE
    _emit("pisot", {"result": result}, no_timestamp)
    return code


class _noop:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


def _budget(precision_max):
    return precision_budget(precision_max) if precision_max is not None else _noop()


# -- gen --------------------------------------------------------------------


@cli.command("gen")
@common_options
@config_overrides
def cmd_gen(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Materialize the configured integer sequence."""
    config = _resolve_configs(config_path, seed=seed, **overrides)[0]
    with _budget(precision_max):
        m = build_sequence(config)
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        m.to_csv(directory / "sequence.csv")
        artifacts["sequence_csv"] = str(directory / "sequence.csv")
    head = [str(t) for t in m.terms[:16]]
    payload = {
        "config": config.to_dict(),
        "result": {
            "start_index": m.start_index,
            "k_end": m.k_end,
            "n": len(m),
            "head": head,
            "max_bit_length": max(t.bit_length() for t in m.terms),
            "strictly_increasing": m.is_strictly_increasing(),
            "generator": m.generator,
        },
        "artifacts": artifacts,
    }
    _emit("gen", payload, no_timestamp)
    return EXIT_OK


# -- annihilate -------------------------------------------------------------


@cli.command("annihilate")
@common_options
@config_overrides
def cmd_annihilate(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Window sums e_k and the matching certified c_k values."""
    config = _resolve_configs(config_path, seed=seed, **overrides)[0]
    with _budget(precision_max):
        p, alpha = config.build_algebra()
        m = build_sequence(config)
        e = annihilate.e_sequence(m, p)
        c = annihilate.c_batch(p, alpha, config.theta, m.start_index, len(e))
    value_set = list(e.value_set)
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        _write_int_csv(directory / "e_values.csv", "e", e.k_start, e.e_terms)
        c.to_csv(directory / "c_values.csv")
        artifacts["e_values_csv"] = str(directory / "e_values.csv")
        artifacts["c_values_csv"] = str(directory / "c_values.csv")
    payload = {
        "config": config.to_dict(),
        "result": {
            "window": str(p),
            "k_start": e.k_start,
            "n_windows": len(e),
            "value_set": value_set[:64],
            "value_set_size": len(value_set),
            "value_set_truncated": len(value_set) > 64,
            "max_abs": e.max_abs,
            "all_zero": e.max_abs == 0,
            "c_head": [float(v) for v in c.floats()[:8]],
            "c_abs_error": float_upper(c.abs_error),
        },
        "artifacts": artifacts,
    }
    _emit("annihilate", payload, no_timestamp)
    return EXIT_OK


def _write_int_csv(path, column, k_start, terms) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", column])
        for k, t in zip(range(k_start, k_start + len(terms)), terms):
            w.writerow([k, t])


# -- eta --------------------------------------------------------------------


@cli.command("eta")
@common_options
@config_overrides
def cmd_eta(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Combined residuals eta_k and their annihilated window sums."""
    config = _resolve_configs(config_path, seed=seed, **overrides)[0]
    with _budget(precision_max):
        p, alpha = config.build_algebra()
        m = build_sequence(config)
        eta = annihilate.eta_sequence(m, alpha, config.theta)
        eta_t = annihilate.tilde_eta(eta, p)
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        eta.to_csv(directory / "eta.csv")
        eta_t.to_csv(directory / "eta_tilde.csv")
        artifacts["eta_csv"] = str(directory / "eta.csv")
        artifacts["eta_tilde_csv"] = str(directory / "eta_tilde.csv")
    payload = {
        "config": config.to_dict(),
        "result": {
            "k_start": eta.k_start,
            "n": len(eta),
            "eta_head": [float(v) for v in eta.floats()[:8]],
            "eta_sup_abs": float(eta.sup_abs.value),
            "eta_abs_error": float_upper(eta.abs_error),
            "eta_tilde_head": [float(v) for v in eta_t.floats()[:8]],
            "eta_tilde_sup_abs": float(eta_t.sup_abs.value),
        },
        "artifacts": artifacts,
    }
    _emit("eta", payload, no_timestamp)
    return EXIT_OK


# -- cycle ------------------------------------------------------------------


@cli.command("cycle")
@common_options
@config_overrides
def cmd_cycle(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Cycle detection on the eta residuals at the configured tolerances."""
    config = _resolve_configs(config_path, seed=seed, **overrides)[0]
    tol = config.resolved_tolerances()
    cycle_tol = tol["cycle_tol"] if config.theta.is_rational else tol["no_cycle_tol"]
    with _budget(precision_max):
        _, alpha = config.build_algebra()
        m = build_sequence(config)
        eta = annihilate.eta_sequence(m, alpha, config.theta)
        report = measures.detect_cycle(
            eta,
            ell_max=int(tol["ell_max"]),
            tol=cycle_tol,
            tail_fraction=tol["tail_fraction"],
        )
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        eta.to_csv(directory / "eta.csv")
        artifacts["eta_csv"] = str(directory / "eta.csv")
    payload = {
        "config": config.to_dict(),
        "result": report.to_dict(),
        "artifacts": artifacts,
    }
    _emit("cycle", payload, no_timestamp)
    return EXIT_OK


# -- density ----------------------------------------------------------------


@cli.command("density")
@common_options
@config_overrides
def cmd_density(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Closed-form limiting density of the c_k values."""
    config = _resolve_configs(config_path, seed=seed, **overrides)[0]
    with _budget(precision_max):
        p, alpha = config.build_algebra()
        pd = density.predicted_density(p, alpha, config.theta)
        cdf = density.predicted_cdf(pd)
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        pd.to_csv(directory / "density.csv")
        artifacts["density_csv"] = str(directory / "density.csv")
    payload = {
        "config": config.to_dict(),
        "result": {
            "pieces": [
                {"lo": lo, "hi": hi, "height": h} for lo, hi, h in pd.pieces_float()
            ],
            "height": float(pd.height.value),
            "slope": float(pd.slope.value),
            "total_mass": float(pd.total_mass.value),
            "total_mass_abs_error": float_upper(pd.total_mass.abs_error),
            "breakpoints": [float(b.value) for b in pd.partition.breakpoints],
            "cdf_knots": list(map(float, cdf.knots)),
            "cdf_values": list(map(float, cdf.values)),
        },
        "artifacts": artifacts,
    }
    _emit("density", payload, no_timestamp)
    return EXIT_OK


# -- verify-main-theorem ----------------------------------------------------


@cli.command("verify-main-theorem")
@common_options
@config_overrides
def cmd_verify(config_path, out, precision_max, seed, jobs, no_timestamp, **overrides):
    """Run the dichotomy pipeline; exit 2 when any verdict is inconclusive."""
    configs = _resolve_configs(config_path, seed=seed, allow_batch=True, **overrides)
    if jobs > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(
                pool.map(lambda cfg: verify_main_theorem(cfg, precision_max), configs)
            )
    else:
        records = [verify_main_theorem(cfg, precision_max) for cfg in configs]
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        _write_verdict_csv(directory / "verdicts.csv", records)
        artifacts["verdicts_csv"] = str(directory / "verdicts.csv")
    if len(records) == 1:
        payload = {"result": records[0].to_dict(), "artifacts": artifacts}
    else:
        payload = {
            "results": [r.to_dict() for r in records],
            "n_configs": len(records),
            "artifacts": artifacts,
        }
    _emit("verify-main-theorem", payload, no_timestamp)
    if any(r.verdict == INCONCLUSIVE for r in records):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _write_verdict_csv(path, records) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["index", "verdict", "theta", "theta_is_rational", "n", "cycle_found",
             "period", "ks", "outside_mass"]
        )
        for i, r in enumerate(records):
            cmp_ = r.density_comparison
            w.writerow(
                [
                    i,
                    r.verdict,
                    r.config.theta.describe(),
                    r.theta_is_rational,
                    r.config.n,
                    r.cycle_report.found,
                    r.cycle_report.period,
                    None if cmp_ is None else repr(cmp_.ks),
                    None if cmp_ is None else repr(cmp_.outside_mass),
                ]
            )


# -- spectrum-scan ----------------------------------------------------------


@cli.command("spectrum-scan")
@common_options
@click.option("--polynomial", default=None, help="Integer polynomial text.")
@click.option("--xi", default=None, help="Scaling xi as an exact rational (default 1).")
@click.option(
    "--theta",
    "theta_texts",
    multiple=True,
    help="Shift to scan (repeatable).",
)
@click.option("-n", "--n", "n_terms", type=int, default=None, help="Sample count per shift.")
@click.option("--k-min", type=int, default=1, show_default=True)
@click.option("--weyl-orders", type=int, default=5, show_default=True)
def cmd_spectrum_scan(
    config_path, out, precision_max, seed, jobs, no_timestamp,
    polynomial, xi, theta_texts, n_terms, k_min, weyl_orders,
):
    """Equidistribution scan of {xi*alpha^k - k*theta} across shifts."""
    base = _load_config_dicts(config_path)[0]
    polynomial = polynomial or base.get("polynomial")
    if polynomial is None:
        raise click.UsageError("pass --polynomial or --config with one")
    if n_terms is None:
        n_terms = base.get("n")
    if n_terms is None:
        raise click.UsageError("pass -n or --config with an n field")
    thetas = [Theta.parse(t) for t in theta_texts]
    if not thetas and "theta" in base:
        raw = base["theta"]
        thetas = [Theta.from_dict(raw) if isinstance(raw, dict) else Theta.parse(str(raw))]
    if not thetas:
        raise click.UsageError("pass at least one --theta")
    if xi is None:
        xi = base.get("xi") or "1"
    with _budget(precision_max):
        table = spectrum_scan(
            polynomial, xi, thetas, int(n_terms), k_min=k_min, weyl_orders=weyl_orders
        )
    warnings = []
    if table["alpha_is_pisot"] is not True:
        warnings.append("alpha is not certified Pisot; scan heuristics assume Pisot decay")
    artifacts = {}
    directory = _out_dir(out)
    if directory is not None:
        _write_scan_csv(directory / "scan.csv", table, weyl_orders)
        artifacts["scan_csv"] = str(directory / "scan.csv")
    payload = {"result": table, "warnings": warnings, "artifacts": artifacts}
    _emit("spectrum-scan", payload, no_timestamp)
    return EXIT_OK


def _write_scan_csv(path, table, weyl_orders) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        weyl_cols = [f"weyl_{h}" for h in range(1, weyl_orders + 1)]
        w.writerow(
            ["theta", "discrepancy", *weyl_cols, "limit_set_count", "discrepancy_window_sums"]
        )
        for row in table["rows"]:
            w.writerow(
                [
                    row["theta"],
                    repr(row["discrepancy"]),
                    *[repr(row["weyl"][str(h)]) for h in range(1, weyl_orders + 1)],
                    row["limit_set_count"],
                    repr(row["discrepancy_window_sums"]),
                ]
            )


# -- entry point ------------------------------------------------------------


def _error_json(exc) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    return json.dumps(doc, sort_keys=True)


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return rv if isinstance(rv, int) else EXIT_OK
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except PrecisionExhausted as exc:
        click.echo(_error_json(exc), err=True)
        return EXIT_PRECISION
    except Inconclusive as exc:
        click.echo(_error_json(exc), err=True)
        return EXIT_INCONCLUSIVE
    except PisotkitError as exc:
        click.echo(_error_json(exc), err=True)
        return EXIT_INPUT
    except (OSError, ValueError, KeyError, TypeError) as exc:
        click.echo(_error_json(exc), err=True)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
