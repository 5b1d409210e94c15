"""End-to-end runs: parse, detect, measure agreement, and write reports."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

import jsonschema

from . import __version__
from .agreement import BAND_CONVENTION, AgreementMatrix, PairAgreement, build_matrix
from .flow import DEFAULT_INLINE_DEPTH, analyze_flow
from .heuristic import EAGER, HEURISTIC, NOT_APPLICABLE, NOT_EAGER, Verdict, detect_eager, not_applicable
from .java_model import CodeModel, TestCase, extract_test_cases, parse_sources
from .rules import RuleId, apply_rule
from .stereotypes import DEFAULT_EFFECT_DEPTH, StereotypeAnalyzer

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
FORMATS = ("json", "csv", "markdown")


@dataclass
class DetectorContext:
    model: CodeModel
    analyzer: StereotypeAnalyzer
    inline_depth: int = DEFAULT_INLINE_DEPTH
    verbose: bool = False


Detector = Callable[[TestCase, DetectorContext], Verdict]
DETECTORS: dict[str, Detector] = {}


def register(name: str) -> Callable[[Detector], Detector]:
    def deco(fn: Detector) -> Detector:
        DETECTORS[name] = fn
        return fn
    return deco


@register(HEURISTIC)
def _heuristic(test: TestCase, ctx: DetectorContext) -> Verdict:
    if not test.cut_resolved:
        return not_applicable(test.test_id, HEURISTIC, "unresolved-cut", reason=test.cut_note)
    lt = analyze_flow(test, ctx.model, ctx.inline_depth, ctx.analyzer)
    v = detect_eager(lt)
    if ctx.verbose:
        v.evidence.update(lt.evidence())
    return v


def _rule_detector(rule: RuleId) -> Detector:
    def run(test: TestCase, ctx: DetectorContext) -> Verdict:
        return apply_rule(rule, test, ctx.model, ctx.analyzer)
    return run


for _rule in RuleId:
    register(_rule.value)(_rule_detector(_rule))

ALL_DETECTORS = (HEURISTIC, *(r.value for r in RuleId))


@dataclass
class RunConfig:
    test_roots: Sequence[str]
    production_roots: Sequence[str] = ()
    detectors: Sequence[str] = ALL_DETECTORS
    inline_depth: int = DEFAULT_INLINE_DEPTH
    effect_depth: int = DEFAULT_EFFECT_DEPTH
    output_format: str = "json"
    output_path: Optional[str] = None
    verbose_evidence: bool = False

    def validate(self) -> None:
        if not self.test_roots:
            raise ValueError("at least one test root is required")
        if not self.detectors:
            raise ValueError("at least one detector is required")
        unknown = [d for d in self.detectors if d not in DETECTORS]
        if unknown:
            raise ValueError(f"unknown detector(s): {', '.join(unknown)}; choose from {', '.join(DETECTORS)}")
        if self.inline_depth < 0 or self.effect_depth < 0:
            raise ValueError("depths must be non-negative")
        if self.output_format not in FORMATS:
            raise ValueError(f"unknown format {self.output_format!r}")

    def echo(self) -> dict:
        return {
            "test_roots": list(self.test_roots),
            "production_roots": list(self.production_roots),
            "detectors": list(self.detectors),
            "inline_depth": self.inline_depth,
            "effect_depth": self.effect_depth,
            "format": self.output_format,
            "verbose_evidence": self.verbose_evidence,
        }


@dataclass
class TestRow:
    file: str
    cls: str
    method: str
    verdicts: dict[str, Verdict] = field(default_factory=dict)


@dataclass
class ReportDoc:
    config_echo: dict
    detectors: list[str]
    rows: list[TestRow]
    matrix: Optional[AgreementMatrix]
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def agreement(self) -> list[PairAgreement]:
        return self.matrix.pairs() if self.matrix else []

    def summary(self) -> dict:
        out = {}
        for d in self.detectors:
            results = [r.verdicts[d].result for r in self.rows]
            eager, not_eager, na = (results.count(x) for x in (EAGER, NOT_EAGER, NOT_APPLICABLE))
            applicable = eager + not_eager
            out[d] = {
                "eager": eager,
                "not_eager": not_eager,
                "not_applicable": na,
                "pct_eager": round(100.0 * eager / applicable, 2) if applicable else None,
            }
        return out

    def to_dict(self, verbose: Optional[bool] = None) -> dict:
        verbose = self.config_echo.get("verbose_evidence", False) if verbose is None else verbose
        tests = []
        for r in self.rows:
            verdicts = {}
            for d in self.detectors:
                v = r.verdicts[d]
                entry = {"result": v.result, "flags": sorted(v.flags)}
                if verbose or v.evidence:
                    entry["evidence"] = v.evidence
                verdicts[d] = entry
            tests.append({"id": {"file": r.file, "class": r.cls, "method": r.method}, "verdicts": verdicts})
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "config_echo": self.config_echo,
            "tests": tests,
            "summary": self.summary(),
            "agreement": [p.to_dict() for p in self.agreement],
            "agreement_bands": BAND_CONVENTION,
            "diagnostics": self.diagnostics,
        }


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "config_echo", "tests", "summary", "agreement"],
    "properties": {
        "schema_version": {"type": "string"},
        "config_echo": {"type": "object"},
        "tests": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "verdicts"],
                "properties": {
                    "id": {
                        "type": "object",
                        "required": ["file", "class", "method"],
                        "properties": {k: {"type": "string"} for k in ("file", "class", "method")},
                    },
                    "verdicts": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "required": ["result", "flags"],
                            "properties": {
                                "result": {"enum": [EAGER, NOT_EAGER, NOT_APPLICABLE]},
                                "flags": {"type": "array", "items": {"type": "string"}},
                                "evidence": {"type": "object"},
                            },
                        },
                    },
                },
            },
        },
        "summary": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["eager", "not_eager", "not_applicable", "pct_eager"],
                "properties": {
                    "eager": {"type": "integer", "minimum": 0},
                    "not_eager": {"type": "integer", "minimum": 0},
                    "not_applicable": {"type": "integer", "minimum": 0},
                    "pct_eager": {"type": ["number", "null"]},
                },
            },
        },
        "agreement": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "kappa", "band", "n"],
                "properties": {
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "kappa": {"type": ["number", "null"], "maximum": 1},
                    "band": {"type": "string"},
                    "n": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


def validate_report(data: dict) -> None:
    jsonschema.validate(data, REPORT_SCHEMA)


def _run_detector(name: str, test: TestCase, ctx: DetectorContext) -> Verdict:
    try:
        return DETECTORS[name](test, ctx)
    except Exception as exc:  # one bad test must not sink the corpus
        logger.exception("detector %s failed on %s", name, test.test_id)
        return not_applicable(test.test_id, name, "analysis-error", error=f"{type(exc).__name__}: {exc}")


def agreement_for(detectors: Sequence[str], rows: Sequence[TestRow]) -> Optional[AgreementMatrix]:
    if len(detectors) < 2:
        return None
    return build_matrix({d: [r.verdicts[d].result for r in rows] for d in detectors})


def run_analysis(config: RunConfig) -> ReportDoc:
    config.validate()
    roots = [(p, "test") for p in config.test_roots] + [(p, "production") for p in config.production_roots]
    model = parse_sources(roots)
    ctx = DetectorContext(model, StereotypeAnalyzer(model, config.effect_depth), config.inline_depth,
                          config.verbose_evidence)
    rows = []
    for test in extract_test_cases(model):
        row = TestRow(test.file, test.owning_class, test.method.name)
        for d in config.detectors:
            row.verdicts[d] = _run_detector(d, test, ctx)
        rows.append(row)
    rows.sort(key=lambda r: (r.file, r.cls, r.method))
    diagnostics = [{"file": d.file, "line": d.line, "message": d.message} for d in model.diagnostics]
    return ReportDoc(config.echo(), list(config.detectors), rows, agreement_for(config.detectors, rows), diagnostics)


def render_json(report: ReportDoc) -> str:
    data = report.to_dict()
    validate_report(data)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def render_csv(report: ReportDoc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file", "class", "method", *report.detectors])
    for r in report.rows:
        w.writerow([r.file, r.cls, r.method, *(r.verdicts[d].result for d in report.detectors)])
    return buf.getvalue()


def _fmt_kappa(k: Optional[float]) -> str:
    return "undefined" if k is None else f"{k:.4f}"


def render_markdown(report: ReportDoc) -> str:
    dets = report.detectors
    lines = ["# Eager test report", "", "## Verdicts", ""]
    lines.append("| test | " + " | ".join(dets) + " |")
    lines.append("|---|" + "---|" * len(dets))
    for r in report.rows:
        cells = []
        for d in dets:
            v = r.verdicts[d]
            cells.append(v.result + (f" ({', '.join(sorted(v.flags))})" if v.flags else ""))
        lines.append(f"| {r.cls.rsplit('.', 1)[-1]}.{r.method} | " + " | ".join(cells) + " |")
    lines += ["", "## Summary", "", "| detector | eager | not-eager | not-applicable | % eager |", "|---|---|---|---|---|"]
    for d, s in report.summary().items():
        pct = "n/a" if s["pct_eager"] is None else f"{s['pct_eager']:.2f}"
        lines.append(f"| {d} | {s['eager']} | {s['not_eager']} | {s['not_applicable']} | {pct} |")
    if report.matrix is not None:
        lines += ["", "## Agreement (Cohen's kappa)", "", "| | " + " | ".join(dets) + " |", "|---|" + "---|" * len(dets)]
        for i, a in enumerate(dets):
            row = []
            for j, b in enumerate(dets):
                # upper triangle only; the matrix is symmetric
                p = report.matrix.get(a, b)
                row.append("" if j < i else f"{_fmt_kappa(p.kappa)} ({p.band})")
            lines.append(f"| {a} | " + " | ".join(row) + " |")
        lines += ["", f"Bands: {BAND_CONVENTION}."]
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "markdown": render_markdown}


def emit(report: ReportDoc, fmt: str = "json", path: Optional[str] = None) -> str:
    """Render ``report`` and write it to ``path`` (if given). Returns the text."""
    if fmt not in RENDERERS:
        raise ValueError(f"unknown format {fmt!r}")
    text = RENDERERS[fmt](report)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_verdicts(paths: Sequence[str]) -> tuple[list[str], dict[tuple[str, str, str], dict[str, str]]]:
    """Merge saved JSON reports: detector names and per-test results."""
    detectors: list[str] = []
    table: dict[tuple[str, str, str], dict[str, str]] = {}
    for p in paths:
        data = json.loads(Path(p).read_text(encoding="utf-8"))
        validate_report(data)
        for d in data.get("config_echo", {}).get("detectors", []):
            if d not in detectors:
                detectors.append(d)
        for t in data["tests"]:
            tid = (t["id"]["file"], t["id"]["class"], t["id"]["method"])
            for d, v in t["verdicts"].items():
                if d not in detectors:
                    detectors.append(d)
                table.setdefault(tid, {})[d] = v["result"]
    return detectors, table


def agreement_from_files(paths: Sequence[str]) -> list[PairAgreement]:
    """Kappa over tests present in the saved reports; missing verdicts count as not-applicable."""
    detectors, table = load_verdicts(paths)
    ids = sorted(table)
    series: Mapping[str, list[str]] = {d: [table[i].get(d, NOT_APPLICABLE) for i in ids] for d in detectors}
    if len(detectors) < 2:
        return []
    return build_matrix(series).pairs()
