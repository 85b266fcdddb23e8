"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

from . import data_io, dynamics, fitter, report, stats
from .errors import DataError, InsufficientDataError, LaborShareError, NumericError, ValidationError
from .model import InnovationRates, ModelParams

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_US_LABOR = "labor_share_us_fed.csv"
DEFAULT_US_AGE = "median_age_us.csv"
DEFAULT_KLEMS_MANIFEST = "klems_manifest.csv"
DEFAULT_FIG10_MANIFEST = "fig10_manifest.csv"
DEFAULT_COGNITION = "cognition_word_recall.csv"


class UsageError(LaborShareError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bundled(name: str) -> str:
    return str(data_io.data_dir() / name)


def _path(p) -> str:
    return str(Path(p).resolve())


def _fit_config(args) -> fitter.FitConfig:
    return fitter.FitConfig(
        iterations=args.iterations,
        runs=args.runs,
        learning_rate=args.lr,
        seed=args.seed,
        init_low=args.init_low,
        init_high=args.init_high,
    )


def _fit_argv(args) -> list[str]:
    return [
        "--iterations", str(args.iterations), "--runs", str(args.runs),
        "--lr", repr(args.lr), "--seed", str(args.seed),
        "--init-low", repr(args.init_low), "--init-high", repr(args.init_high),
    ]


def _fit_report(data: data_io.CountryDataset, config: fitter.FitConfig, argv: list[str], extra_meta) -> tuple[report.Report, fitter.FitResult]:
    result = fitter.fit(data, config)
    rmse = stats.rmse(data.labor_share, result.fitted_series)
    p = result.averaged_params
    rep = report.Report()
    rep.metadata.update(extra_meta)
    rep.metadata.update(
        country=data.country,
        source=data.source,
        iterations=config.iterations,
        runs=config.runs,
        learning_rate=config.learning_rate,
        seed=config.seed,
        init_interval=(config.init_low, config.init_high),
        projection_margin=config.projection_margin,
        argv=shlex.join(argv),
    )
    rep.results.update(
        n=p.n, r0=p.r0, k=p.k, mu0=p.mu0, rmse=rmse,
        aligned_years=len(data.years),
        first_year=data.years[0], last_year=data.years[-1],
        dropped_labor_years=data.dropped_labor,
        dropped_age_years=data.dropped_age,
        successful_runs=len(result.per_run_params),
    )
    rep.tables["runs"] = report.Table(
        ["run", "n", "r0", "k", "final_mse"],
        [[i, q.n, q.r0, q.k, h[-1]] for i, (q, h) in enumerate(zip(result.per_run_params, result.loss_history))],
    )
    rep.tables["series"] = _series_table(data, result)
    rep.warnings += list(data.labor_share.notes)
    if data.dropped_labor or data.dropped_age:
        rep.warnings.append(
            f"alignment dropped {data.dropped_labor} labor-share and {data.dropped_age} median-age years"
        )
    if result.warnings.get("projections"):
        rep.warnings.append(f"{result.warnings['projections']} parameter projections during fitting")
    for index, msg in result.failed_runs:
        rep.warnings.append(f"run {index} failed: {msg}")
    return rep, result


def _series_table(data, result) -> report.Table:
    return report.Table(
        ["year", "observed", "fitted"],
        [[y, o, f] for y, o, f in zip(data.years, data.labor_share.values, result.fitted_series.values)],
    )


def _emit(rep: report.Report, out: str | None):
    text = rep.render()
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    labor = _path(args.labor or _bundled(DEFAULT_US_LABOR))
    age = _path(args.age or _bundled(DEFAULT_US_AGE))
    try:
        lab = data_io.load_series(labor, "labor_share")
        ag = data_io.load_series(age, "median_age")
        data = data_io.align(lab, ag, country=args.country, source=args.source)
    except DataError as exc:
        raise DataError(f"load stage: {exc}") from exc
    argv = ["fit", "--labor", labor, "--age", age, "--country", args.country, "--source", args.source] + _fit_argv(args)
    try:
        rep, result = _fit_report(data, _fit_config(args), argv, {"command": "fit", "labor": labor, "age": age})
    except NumericError as exc:
        raise type(exc)(f"fit stage: {exc}") from exc
    if args.plot:
        Path(args.plot).write_text(rep.tables["series"].to_csv(), encoding="utf-8")
    _emit(rep, args.report)
    return EXIT_OK


def cmd_batch_fit(args) -> int:
    manifest = _path(args.manifest or _bundled(DEFAULT_KLEMS_MANIFEST))
    try:
        entries = data_io.load_manifest(manifest)
    except DataError as exc:
        raise DataError(f"manifest: {exc}") from exc
    if not entries:
        raise UsageError(f"manifest {manifest} lists no countries")
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    config = _fit_config(args)
    summary = report.Report()
    summary.metadata.update(command="batch-fit", manifest=manifest,
                            argv=shlex.join(["batch-fit", "--manifest", manifest] + _fit_argv(args)))
    rows = []
    worst = EXIT_OK
    for entry in entries:
        try:
            data = data_io.load_country(entry)
            argv = ["fit", "--labor", _path(entry.labor_csv), "--age", _path(entry.age_csv),
                    "--country", entry.country, "--source", entry.source] + _fit_argv(args)
            rep, result = _fit_report(data, config, argv, {"command": "fit", "labor": _path(entry.labor_csv), "age": _path(entry.age_csv)})
        except LaborShareError as exc:
            code = EXIT_DATA if isinstance(exc, DataError) else EXIT_NUMERIC
            worst = max(worst, code)
            rows.append([entry.country, "", "", "", "", f"failed: {exc}"])
            summary.warnings.append(f"{entry.country}: {exc}")
            continue
        p = result.averaged_params
        rows.append([entry.country, p.n, p.r0, p.k, float(rep.results["rmse"]), "ok"])
        if out_dir:
            rep.write(out_dir / f"{_slug(entry.country)}.report.txt")
            (out_dir / f"{_slug(entry.country)}.plot.csv").write_text(rep.tables["series"].to_csv(), encoding="utf-8")
    summary.tables["summary"] = report.Table(["country", "n", "r0", "k", "rmse", "status"], rows)
    summary.results.update(countries=len(entries), failed=sum(1 for r in rows if r[-1] != "ok"))
    if out_dir:
        summary.write(out_dir / "summary.report.txt")
    _emit(summary, args.report)
    return worst


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name).lower()


def _parse_params(text: str) -> ModelParams:
    try:
        n, r0, k, mu0 = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--params expects n,r0,k,mu0; got {text!r}") from None
    return ModelParams(n, r0, k, mu0)


def cmd_simulate(args) -> int:
    if args.params is not None:
        if args.sigma is not None:
            raise UsageError("give --sigma/--delta or --params/--age, not both")
        params = _parse_params(args.params)
        age = data_io.load_series(args.age or _bundled(DEFAULT_US_AGE), "median_age")
        delta_ref = args.delta if args.delta is not None else 0.5
        config = dynamics.SimConfig(args.a0, args.dt, args.horizon, age_path=age, params=params,
                                    delta_ref=delta_ref, n=args.n)
    else:
        if args.sigma is None or args.delta is None:
            raise UsageError("simulate needs --sigma and --delta, or --params")
        config = dynamics.SimConfig(args.a0, args.dt, args.horizon,
                                    rates=InnovationRates(args.sigma, args.delta), n=args.n)
    traj = dynamics.simulate(config)
    text = report.csv_text(["time", "a", "labor_share"],
                           zip(map(float, traj.times), map(float, traj.a_values), map(float, traj.labor_share_values)))
    for w in traj.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write_or_print(text, args.out)
    return EXIT_OK


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cognition_for(country: str, cog: dict[str, data_io.CognitionRecord]):
    if country in cog:
        return cog[country]
    base = country.split("-")[0]
    return cog.get(base)


def fig10_records(entries, cognition, window, mode, exclude):
    """Decline records for every manifest country with cognition data."""
    cog = {c.country: c for c in cognition}
    records, skipped = [], []
    for entry in entries:
        record = _cognition_for(entry.country, cog)
        if record is None:
            skipped.append(entry.country)
            continue
        data = data_io.load_country(entry)
        age = data_io.load_series(entry.age_csv, "median_age")
        records.append(stats.decline_record(data, age, record, window, mode, outlier=entry.country in exclude))
    return records, skipped


def cmd_fig10(args) -> int:
    manifest = _path(args.manifest or _bundled(DEFAULT_FIG10_MANIFEST))
    cognition = _path(args.cognition or _bundled(DEFAULT_COGNITION))
    exclude = [c.strip() for c in args.exclude.split(",") if c.strip()] if args.exclude else []
    window = _parse_window(args.window)
    entries = data_io.load_manifest(manifest)
    if not entries:
        raise UsageError(f"manifest {manifest} lists no countries")
    records, skipped = fig10_records(entries, data_io.load_cognition(cognition), window, args.decline_mode, set(exclude))
    result = stats.fig10_analysis(records, exclude=exclude, reference=args.reference)

    rep = report.Report()
    rep.metadata.update(
        command="fig10", manifest=manifest, cognition=cognition, exclude=",".join(exclude),
        window=window, decline_mode=args.decline_mode, reference=args.reference,
        argv=shlex.join(["fig10", "--manifest", manifest, "--cognition", cognition,
                         "--exclude", ",".join(exclude), "--window", f"{window[0]},{window[1]}",
                         "--decline-mode", args.decline_mode, "--reference", args.reference]),
    )
    rep.results["origin_slope"] = result.slope
    rep.results["origin_slope_without_reference"] = result.slope_without
    rep.results.update({f"r_{k}": v for k, v in result.correlations().items()})
    rep.results["countries_used"] = ",".join(result.used)
    rep.tables["declines"] = report.Table(
        ["country", "labor_share_decline", "aggregate_cognitive_decline_pct", "median_age_increase",
         "cognition_decline_pct", "outlier"],
        [[r.country, r.labor_share_decline_pp, r.cognitive_decline_pct, r.median_age_increase,
          r.cognition_decline_pct, str(r.outlier).lower()] for r in records],
    )
    rep.warnings += [f"{c}: no cognition data, skipped" for c in skipped]
    rep.warnings += [f"{c}: excluded as outlier" for c in result.excluded]
    _emit(rep, args.report)
    return EXIT_OK


def _parse_window(text: str) -> tuple[int, int]:
    try:
        start, end = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--window expects START,END; got {text!r}") from None
    if start >= end:
        raise UsageError(f"--window start must precede end; got {text!r}")
    return start, end


def cmd_synth(args) -> int:
    params = ModelParams(args.n, args.r0, args.k, args.mu0)
    age = data_io.load_series(args.age or _bundled(DEFAULT_US_AGE), "median_age")
    data = data_io.synthesize(params, age, args.noise, args.seed)
    _write_or_print(data_io.format_series(data.labor_share), args.out)
    return EXIT_OK


def cmd_rerun(args) -> int:
    """Re-execute the command recorded in a report and compare outputs."""
    original = Path(args.report_file).read_text(encoding="utf-8")
    meta = report.parse(original).metadata
    if "argv" not in meta:
        raise ValidationError(f"{args.report_file}: no argv in metadata")
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(shlex.split(meta["argv"]))
    if code != EXIT_OK:
        return code
    if buf.getvalue() == original:
        print("reproduced: identical report")
        return EXIT_OK
    print("MISMATCH: re-run differs from the recorded report", file=sys.stderr)
    return EXIT_NUMERIC


def _add_fit_flags(p):
    p.add_argument("--iterations", type=int, default=100, help="epochs per run (default 100)")
    p.add_argument("--runs", type=int, default=20, help="independent runs averaged (default 20)")
    p.add_argument("--lr", type=float, default=0.05, help="learning rate (default 0.05)")
    p.add_argument("--seed", type=int, default=fitter.DEFAULT_SEED, help=f"RNG seed (default {fitter.DEFAULT_SEED})")
    p.add_argument("--init-low", type=float, default=0.0)
    p.add_argument("--init-high", type=float, default=1.0)
    p.add_argument("--report", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="laborshare", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit one labor-share / median-age pair")
    p.add_argument("--labor", help="labor share CSV (default: bundled US series)")
    p.add_argument("--age", help="median age CSV (default: bundled US series)")
    p.add_argument("--country", default="US-Fed")
    p.add_argument("--source", default="fed")
    p.add_argument("--plot", help="write year,observed,fitted CSV here")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("batch-fit", help="fit every country in a manifest")
    p.add_argument("--manifest", help="country,labor_csv,age_csv,source CSV (default: bundled KLEMS)")
    p.add_argument("--out-dir", help="write per-country reports and plot CSVs here")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_batch_fit)

    p = sub.add_parser("simulate", help="integrate da/dt = sigma - a*delta")
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float, help="fixed delta, or reference delta with --params")
    p.add_argument("--params", help="n,r0,k,mu0 for a median-age-driven run")
    p.add_argument("--age", help="median age CSV for --params (default: bundled US series)")
    p.add_argument("--n", type=float, help="long-tail exponent for the labor-share column")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--a0", type=float, default=0.0)
    p.add_argument("--out", help="write the trajectory CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fig10", help="labor-share decline vs aggregate cognitive decline")
    p.add_argument("--manifest", help="default: bundled manifest incl. US-Fed")
    p.add_argument("--cognition", help="default: bundled word-recall scores")
    p.add_argument("--exclude", default="Spain", help="comma-separated countries to omit (default Spain)")
    p.add_argument("--decline-mode", choices=stats.DECLINE_MODES, default="points")
    p.add_argument("--window", default="1970,2012")
    p.add_argument("--reference", default="US-Fed", help="record dropped for the 'without' correlations")
    p.add_argument("--report")
    p.set_defaults(func=cmd_fig10)

    p = sub.add_parser("synth", help="synthetic labor share from known parameters")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--mu0", type=float, required=True)
    p.add_argument("--age", help="median age CSV (default: bundled US series)")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=fitter.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rerun", help="re-execute a report's recorded command and compare")
    p.add_argument("report_file")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientDataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
