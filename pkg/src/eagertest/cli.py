"""Command line entry point: ``eagertest analyze`` and ``eagertest agree``."""

from __future__ import annotations

import json
import logging
import sys

import click

from .agreement import BAND_CONVENTION
from .java_model import JavaModelError
from .report import ALL_DETECTORS, DETECTORS, FORMATS, RunConfig, agreement_from_files, emit, run_analysis

EXIT_OK = 0
EXIT_WARNING = 1
EXIT_USAGE = 2


def _split(values: tuple[str, ...]) -> list[str]:
    out: list[str] = []
    for v in values:
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging (repeatable).")
def main(verbose: int) -> None:
    """Find eager tests in JUnit suites."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--tests", "tests", multiple=True, required=True, type=click.Path(exists=True),
              help="Test source root (repeatable).")
@click.option("--src", "src", multiple=True, type=click.Path(exists=True), help="Production source root (repeatable).")
@click.option("--detectors", multiple=True, default=(",".join(ALL_DETECTORS),), show_default=True,
              help=f"Comma-separated subset of: {', '.join(ALL_DETECTORS)}.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), help="Output file (default: stdout).")
@click.option("--inline-depth", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--effect-depth", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--verbose-evidence", is_flag=True, help="Embed the full per-test trace in the report.")
def analyze(tests, src, detectors, fmt, out, inline_depth, effect_depth, verbose_evidence) -> None:
    """Run the selected detectors over a corpus."""
    names = _split(detectors)
    unknown = [d for d in names if d not in DETECTORS]
    if unknown:
        raise click.BadParameter(f"unknown detector(s) {', '.join(unknown)}", param_hint="--detectors")
    config = RunConfig(list(tests), list(src), names, inline_depth, effect_depth, fmt, out, verbose_evidence)
    try:
        report = run_analysis(config)
    except (ValueError, JavaModelError) as exc:
        raise click.UsageError(str(exc)) from exc
    text = emit(report, fmt, out)
    if out is None:
        click.echo(text, nl=False)
    for d in report.diagnostics:
        click.echo(f"warning: {d['file']}: {d['message']}", err=True)
    if not report.rows:
        click.echo("warning: no test cases found", err=True)
        sys.exit(EXIT_WARNING)


@main.command()
@click.option("--verdicts", multiple=True, required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON report written by analyze (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), help="Output file (default: stdout).")
def agree(verdicts, out) -> None:
    """Pairwise Cohen's kappa over saved verdict files."""
    try:
        pairs = agreement_from_files(list(verdicts))
    except (ValueError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read verdicts: {exc}") from exc
    except Exception as exc:  # jsonschema.ValidationError
        raise click.UsageError(f"invalid verdict file: {exc}") from exc
    text = json.dumps({"agreement": [p.to_dict() for p in pairs], "agreement_bands": BAND_CONVENTION},
                      indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    if not pairs:
        click.echo("warning: fewer than two detectors in the verdict files", err=True)
        sys.exit(EXIT_WARNING)


if __name__ == "__main__":
    main()
