"""Command line: fit the participation-rate model, run scenarios to report
files, and serve the HTTP API.

Exit codes: 0 success, 2 for malformed or inconsistent inputs, 1 for
runtime failures (non-convergence, internal errors). Failures print a
structured JSON error object to stderr.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from . import __version__, evacmodel, scenario as scenario_mod
from .errors import (
    DataFormatError,
    DegenerateChoiceSetError,
    DomainError,
    FitConvergenceError,
    MissingSeriesError,
    ReferentialIntegrityError,
    StormfluxError,
    ValidationError,
    error_payload,
)
from .geodata import load_datasets
from .odchoice import load_coefficients

INPUT_ERRORS = (DataFormatError, ValidationError, ReferentialIntegrityError,
                DomainError, MissingSeriesError, DegenerateChoiceSetError)


def _fail(exc: Exception) -> None:
    click.echo(json.dumps(error_payload(exc)), err=True)
    sys.exit(2 if isinstance(exc, INPUT_ERRORS) else 1)


@click.group()
@click.version_option(version=__version__)
def main():
    """Evacuation and importation-risk scenario tooling."""


@main.command()
@click.option("--observations", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Observation CSV (study,rate,zone,category,source_kind).")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Where to write the fitted model JSON.")
@click.option("--tol", default=1e-8, show_default=True,
              help="Gradient max-norm convergence threshold.")
@click.option("--max-iter", default=500, show_default=True)
@click.option("--intended-weight", default=0.5, show_default=True,
              help="Likelihood weight for stated-intent observations.")
def fit(observations, out, tol, max_iter, intended_weight):
    """Fit the weighted Beta participation-rate model."""
    try:
        obs = evacmodel.load_observations(observations,
                                          intended_weight=intended_weight)
        model = evacmodel.fit(obs, tol=tol, max_iter=max_iter)
    except FitConvergenceError as exc:
        click.echo(json.dumps(error_payload(exc)), err=True)
        click.echo(
            f"no convergence after {exc.iterations} iterations; "
            f"gradient norm {exc.gradient_norm:.3e}", err=True)
        sys.exit(1)
    except StormfluxError as exc:
        _fail(exc)
    evacmodel.save_model(model, out)
    meta = model.fit_meta
    click.echo(f"converged: gradient norm {meta['gradient_norm']:.3e} "
               f"after {meta['iterations']} iterations "
               f"({meta['n_observations']} observations)")
    for note in meta.get("warnings", ()):
        click.echo(f"warning: {note}", err=True)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--data", "data_dir", required=True,
              envvar="STORMFLUX_DATA", type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--coeffs", "coeffs_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--format", "fmt", default="both", show_default=True,
              type=click.Choice(["csv", "geojson", "both"]))
@click.option("--replicates", default=None, type=int,
              help="Override the scenario's Monte-Carlo sample count.")
@click.option("--prevalence-window", default=None, type=int,
              help="Override the trailing case window, in days.")
@click.option("--point-rates", is_flag=True, default=False,
              help="Use mean rates with a single replicate (no rate uncertainty).")
@click.option("--kernel", default=None, type=click.Choice(["python", "compiled"]))
def run(scenario_path, data_dir, model_path, coeffs_path, out_dir, fmt,
        replicates, prevalence_window, point_rates, kernel):
    """Run one scenario and write county/district reports."""
    try:
        datasets = load_datasets(data_dir)
        model = evacmodel.load_model(model_path)
        friends, hotel, _ = load_coefficients(coeffs_path)
        scn = scenario_mod.load_scenario(scenario_path)
        if replicates is not None:
            scn = dataclasses.replace(scn, mc_samples=replicates)
        if prevalence_window is not None:
            scn = dataclasses.replace(
                scn, prevalence=dataclasses.replace(
                    scn.prevalence, window_days=prevalence_window))
        result = scenario_mod.run_scenario(scn, datasets, model,
                                           (friends, hotel),
                                           point_rates=point_rates,
                                           kernel=kernel)
    except StormfluxError as exc:
        _fail(exc)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        scenario_mod.result_to_county_csv(result, out / "counties.csv")
        scenario_mod.result_to_district_csv(result, out / "districts.csv")
        written += ["counties.csv", "districts.csv"]
    if fmt in ("geojson", "both"):
        geo = scenario_mod.result_to_geojson(result, datasets)
        (out / "result.geojson").write_text(
            json.dumps(geo, sort_keys=True) + "\n", encoding="utf-8")
        written.append("result.geojson")
    (out / "summary.json").write_text(
        json.dumps(scenario_mod.summary_dict(result), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    written.append("summary.json")

    totals = result.totals
    click.echo(
        f"{result.scenario_name}: evacuees {totals['evacuees'].mid:,.0f} "
        f"[{totals['evacuees'].low:,.0f}, {totals['evacuees'].high:,.0f}], "
        f"exportations {totals['exportations'].mid:,.1f} "
        f"[{totals['exportations'].low:,.1f}, {totals['exportations'].high:,.1f}]"
    )
    for name in written:
        click.echo(f"wrote {out / name}")


@main.command()
@click.option("--data", "data_dir", required=True,
              envvar="STORMFLUX_DATA", type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--coeffs", "coeffs_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_dir", default="store", show_default=True,
              envvar="STORMFLUX_STORE", type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True,
              envvar="STORMFLUX_PORT", type=int)
@click.option("--workers", default=None, type=int,
              help="Scenario job pool size (default: available parallelism).")
@click.option("--ui", "ui_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Also serve a static UI bundle at /.")
def serve(data_dir, model_path, coeffs_path, store_dir, host, port, workers, ui_dir):
    """Serve the /v1 HTTP API."""
    import uvicorn

    from .service import ServiceConfig, create_app

    try:
        app = create_app(ServiceConfig(
            data_dir=data_dir, model_path=model_path, coeffs_path=coeffs_path,
            store_dir=store_dir,
            workers=workers if workers is not None else ServiceConfig.default_workers(),
            ui_dir=ui_dir,
        ))
    except StormfluxError as exc:
        _fail(exc)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
