"""Manifest-driven experiment runs with deterministic CSV/JSON artifacts.

A manifest is flat text, one ``key = value`` per line, ``#`` starts a comment::

    name = scan-1e8
    kind = scan
    X = 1e8
    theta = 0.4
    samples = 1000
    seed = 42
    r = 2,2
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Callable

from . import __version__
from .errors import ManifestError
from .lacunary import LacunaryParams, generate
from .romanoff import (
    RomanoffConvention,
    build_modulus,
    enumerate_representable_odds,
    gap_statistics,
    hunt_large_multiplicity,
    positive_proportion_scan,
)
from .singular import average_over_differences
from .windows import CSV_COLUMNS, ScanConfig, prime_window_deviation, scan

SCHEMA_VERSION = "v1"
REPORT_FILE = "report.json"
TIMING_FILE = "timing.json"


def parse_int(text: str) -> int:
    """Integers written as ``100000000``, ``1e8``, ``2^20`` or ``10**8``."""
    s = str(text).strip().replace("_", "")
    for op in ("^", "**"):
        if op in s:
            base, exp = s.split(op, 1)
            return parse_int(base) ** parse_int(exp)
    try:
        v = Decimal(s)
    except InvalidOperation:
        raise ManifestError(f"not an integer: {text!r}") from None
    if v != v.to_integral_value():
        raise ManifestError(f"not an integer: {text!r}")
    return int(v)


def parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ManifestError(f"not a number: {text!r}") from None


def parse_list(text: str) -> list[str]:
    return [t.strip() for t in str(text).split(",") if t.strip()]


@dataclass
class ExperimentManifest:
    name: str
    kind: str
    params: dict[str, str]
    output: str | None = None
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> "ExperimentManifest":
        params: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":"
            if sep not in line:
                raise ManifestError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (t.strip() for t in line.split(sep, 1))
            if key in params:
                raise ManifestError(f"line {lineno}: duplicate key {key!r}")
            params[key] = value
        if "kind" not in params:
            raise ManifestError("manifest is missing required key 'kind'")
        kind = params.pop("kind")
        name = params.pop("name", kind)
        output = params.pop("output", None)
        return cls(name, kind, params, output, text)

    @classmethod
    def load(cls, path) -> "ExperimentManifest":
        return cls.parse(Path(path).read_text())

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentManifest":
        lines = [f"{k} = {v}" for k, v in mapping.items()]
        return cls.parse("\n".join(lines) + "\n")

    def canonical_text(self) -> str:
        items = {"kind": self.kind, "name": self.name, **self.params}
        return "".join(f"{k} = {items[k]}\n" for k in sorted(items))

    def content_hash(self) -> str:
        """Git blob hash of the canonical manifest text."""
        body = self.canonical_text().encode()
        return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()

    def echo(self) -> dict:
        return {"name": self.name, "kind": self.kind, **self.params}

    def require(self, *keys: str) -> None:
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise ManifestError(f"manifest for kind {self.kind!r} is missing required key(s): {', '.join(missing)}")

    def get_int(self, key: str, default=None) -> int:
        if key not in self.params:
            if default is None:
                self.require(key)
            return default
        return parse_int(self.params[key])

    def get_float(self, key: str) -> float:
        self.require(key)
        return parse_float(self.params[key])


@dataclass
class RunReport:
    manifest: dict
    input_hash: str
    metrics: list[tuple[str, object]]
    artifacts: list[str] = field(default_factory=list)
    duration: float | None = None

    def as_dict(self) -> dict:
        return {
            "schema": f"romlab.report/{SCHEMA_VERSION}",
            "version": __version__,
            "manifest": self.manifest,
            "input_hash": self.input_hash,
            "metrics": [{"metric": k, "value": v} for k, v in self.metrics],
            "artifacts": self.artifacts,
        }

    @classmethod
    def from_dict(cls, data: dict, duration: float | None = None) -> "RunReport":
        metrics = [(m["metric"], m["value"]) for m in data.get("metrics", [])]
        return cls(data["manifest"], data["input_hash"], metrics, data.get("artifacts", []), duration)

    def metric(self, name: str):
        return dict(self.metrics)[name]


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(schema: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: romlab.{schema}/{SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _params(m: ExperimentManifest) -> LacunaryParams:
    m.require("r")
    return LacunaryParams.from_r(parse_list(m.params["r"]), m.params.get("lambda"))


def _convention(m: ExperimentManifest) -> RomanoffConvention:
    return RomanoffConvention(m.get_int("k_min", 1))


def _modulus(m: ExperimentManifest):
    m.require("prime_bound")
    excluded = [parse_int(t) for t in parse_list(m.params.get("excluded", ""))]
    return build_modulus(parse_float(m.params["prime_bound"]), excluded)


# Each runner returns (metrics, {artifact filename: text}).
Runner = Callable[[ExperimentManifest], tuple[list, dict]]


def _run_scan(m):
    m.require("X", "theta", "samples", "seed", "r")
    config = ScanConfig(m.get_int("X"), m.get_float("theta"), m.get_int("samples"), m.get_int("seed"))
    lset = generate(_params(m), config.X)
    res = scan(config, lset)
    recs = res.records
    cs_ok = all(r.R * r.R <= r.S * r.Q and r.S <= r.R <= r.Q for r in recs)
    med_R = res.summary["R/h"]["median"]
    within = sum(1 for r in recs if med_R / 3 <= r.R / r.h <= 3 * med_R) / len(recs)
    metrics = [
        ("h", config.h),
        ("set_size", len(lset)),
        ("R/h mean", res.summary["R/h"]["mean"]),
        ("R/h median", med_R),
        ("Q/h max", res.summary["Q/h"]["max"]),
        ("Q/h median", res.summary["Q/h"]["median"]),
        ("S/h mean", res.summary["S/h"]["mean"]),
        ("R/h within 3x median", within),
        ("cauchy_schwarz_holds", cs_ok),
        ("heuristic R/h", len(lset) / math.log(config.X)),
    ]
    artifacts = {
        "windows.csv": csv_text("scan", CSV_COLUMNS, (r.row() for r in recs)),
        "summary.json": json_text(res.summary),
    }
    return metrics, artifacts


def _run_singular_avg(m):
    m.require("X", "r")
    res = average_over_differences(generate(_params(m), m.get_int("X")))
    metrics = [(k, v) for k, v in res.as_dict().items()]
    return metrics, {"singular_avg.json": json_text(res.as_dict())}


def _run_prime_dev(m):
    m.require("X", "y", "samples", "seed")
    res = prime_window_deviation(m.get_int("X"), m.get_int("y"), m.get_int("samples"), m.get_int("seed"))
    metrics = [(f"delta q{q}", v) for q, v in res.quantiles.items()]
    metrics.append(("exceptional_fraction", res.exceptional_fraction))
    rows = ((i, f"{d:.12g}") for i, d in enumerate(res.deltas))
    return metrics, {
        "prime_dev.json": json_text(res.as_dict()),
        "deltas.csv": csv_text("prime-dev", ("sample", "delta"), rows),
    }


def _run_hunt(m):
    m.require("X", "window", "prime_bound")
    d = _modulus(m)
    res = hunt_large_multiplicity(m.get_int("X"), m.get_int("window"), d, _convention(m))
    out = {"d": d.d, "ratio": d.ratio, **res.as_dict()}
    metrics = [("d", d.d), ("d/phi(d)", d.ratio)] + list(res.as_dict().items())
    return metrics, {"hunt.json": json_text(out)}


def _run_proportion(m):
    m.require("X", "theta", "prime_bound", "threshold", "samples", "seed")
    d = _modulus(m)
    thr = m.params["threshold"]
    thr = "auto" if thr == "auto" else parse_int(thr)
    res = positive_proportion_scan(
        m.get_int("X"), m.get_float("theta"), d, thr, m.get_int("samples"), m.get_int("seed"), _convention(m)
    )
    out = {"d": d.d, **res.as_dict()}
    metrics = [("d", d.d), ("fraction", res.fraction), ("threshold", res.threshold),
               ("mean_multiplicity", res.mean_multiplicity), ("S_d mean", out["S_d"]["mean"])]
    return metrics, {"proportion.json": json_text(out)}


def _run_gaps(m):
    m.require("limit")
    seq = enumerate_representable_odds(m.get_int("limit"), _convention(m))
    gs = gap_statistics(seq)
    metrics = [
        ("representable", len(seq)),
        ("non_representable", int(seq.non_representable.size)),
        ("max_gap", gs.max_gap),
        ("max_gap_at", gs.argmax),
        ("max_normalized_gap", float(gs.normalized.max())),
    ]
    rows = ((i, s, g, f"{v:.12g}") for i, s, g, v in gs.rows(seq))
    polignac = "".join(f"{int(n)}\n" for n in seq.non_representable)
    return metrics, {
        "gaps.csv": csv_text("gaps", ("m", "s_m", "gap", "normalized"), rows),
        "non_representable.txt": f"# schema: romlab.non-representable/{SCHEMA_VERSION}\n" + polignac,
    }


def _run_lacunary_count(m):
    m.require("X", "r")
    params = _params(m)
    rows, ratios = [], []
    for tok in parse_list(m.params["X"]):
        X = parse_int(tok)
        n = len(generate(params, X))
        ratio = n / math.log2(X)
        ratios.append(ratio)
        rows.append((X, n, f"{math.log2(X):.12g}", f"{ratio:.12g}"))
    metrics = [("scales", len(rows)), ("ratio min", min(ratios)), ("ratio max", max(ratios)),
               ("ratio spread", max(ratios) / min(ratios))]
    return metrics, {"lacunary_counts.csv": csv_text("lacunary-count", ("X", "count", "log2X", "ratio"), rows)}


RUNNERS: dict[str, Runner] = {
    "scan": _run_scan,
    "singular-avg": _run_singular_avg,
    "prime-dev": _run_prime_dev,
    "hunt": _run_hunt,
    "proportion": _run_proportion,
    "gaps": _run_gaps,
    "lacunary-count": _run_lacunary_count,
}


def run_experiment(manifest: ExperimentManifest, out_dir=None) -> RunReport:
    """Run one manifest, write its artifacts and ``report.json`` atomically."""
    if manifest.kind not in RUNNERS:
        raise ManifestError(f"unknown experiment kind {manifest.kind!r}; expected one of {', '.join(RUNNERS)}")
    out = Path(out_dir or manifest.output or Path("runs") / manifest.name)
    start = time.perf_counter()
    metrics, artifacts = RUNNERS[manifest.kind](manifest)
    duration = time.perf_counter() - start
    for fname, text in sorted(artifacts.items()):
        atomic_write(out / fname, text)
    report = RunReport(manifest.echo(), manifest.content_hash(), metrics, sorted(artifacts), duration)
    atomic_write(out / REPORT_FILE, json_text(report.as_dict()))
    atomic_write(out / TIMING_FILE, json_text({"duration_s": duration}))
    return report


def load_reports(directory) -> list[RunReport]:
    reports = []
    for path in sorted(Path(directory).rglob(REPORT_FILE)):
        timing = path.with_name(TIMING_FILE)
        duration = json.loads(timing.read_text())["duration_s"] if timing.exists() else None
        reports.append(RunReport.from_dict(json.loads(path.read_text()), duration))
    return reports


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit_summary(reports: list[RunReport]) -> tuple[str, list[dict]]:
    """Aligned text table (one row per report) and its JSON twin."""
    if not reports:
        raise ManifestError("no reports to summarize")
    names: list[str] = []
    for rep in reports:
        for k, _ in rep.metrics:
            if k not in names:
                names.append(k)
    header = ["name", "kind", "input_hash", "duration_s"] + names
    rows = []
    for rep in reports:
        values = dict(rep.metrics)
        rows.append(
            [rep.manifest.get("name", "n/a"), rep.manifest.get("kind", "n/a"), rep.input_hash[:12],
             _fmt(rep.duration)] + [_fmt(values.get(k)) for k in names]
        )
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(line, widths)).rstrip() for line in [header] + rows]
    twin = [{**rep.as_dict(), "duration_s": rep.duration} for rep in reports]
    return "\n".join(lines) + "\n", twin
