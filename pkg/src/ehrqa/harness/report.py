"""Turn a run directory into score, summary, correlation and failure files."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

from ..evaluation import GROUP_KEYS, METRICS, MetricReport, aggregate, correlation_matrix
from ..generation import FAILED, OVERFLOW
from ..store import atomic_write_bytes, canonical_json
from .runner import RunManifest

logger = logging.getLogger(__name__)

# correlations across settings where notes are present
CORRELATION_SCENARIOS = ("include_all", "include_related")
REPORT_FILES = ("scores.jsonl", "summary.csv", "correlations.json", "failures.csv")


def load_units(run_dir):
    units = []
    rec_dir = Path(run_dir) / "records"
    if not rec_dir.is_dir():
        return units
    for path in sorted(rec_dir.glob("*.jsonl")):
        with open(path, encoding="utf-8") as fh:
            units.extend(json.loads(line) for line in fh if line.strip())
    units.sort(key=lambda u: (u["item_id"], u["scenario"], u["strategy"], u["model_id"]))
    return units


def _csv_bytes(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v)


def failure_table(units):
    """Per (model, scenario, strategy): unit counts and failure rate."""
    table = {}
    for u in units:
        key = (u["model_id"], u["scenario"], u["strategy"])
        row = table.setdefault(key, {"units": 0, "failed": 0, "overflow": 0})
        row["units"] += 1
        row["failed"] += u["status"] == FAILED
        row["overflow"] += u["status"] == OVERFLOW
    return [
        (*key, r["units"], r["failed"], r["overflow"], r["failed"] / r["units"])
        for key, r in sorted(table.items())
    ]


def build_reports(units):
    """Return ``{filename: bytes}`` for the given unit records."""
    reports = [MetricReport(**u["metrics"]) for u in units if u.get("metrics")]
    agg = aggregate(reports)
    over_cap = {(u["item_id"], u["scenario"]) for u in units if u.get("over_cap")}

    scores = []
    for r in reports:
        rec = r.to_record()
        if (r.item_id, r.scenario) in over_cap:
            rec["flags"] = sorted(set(rec["flags"]) | {"over_cap"})
        scores.append(canonical_json(rec) + "\n")

    header = list(GROUP_KEYS) + ["n_items"]
    for m in METRICS:
        header += [f"{m}_mean", f"{m}_count", f"{m}_normalized", f"{m}_degenerate"]
    rows = []
    for g in agg.groups:
        row = list(g.key) + [g.n_items]
        for m in METRICS:
            row += [_fmt(g.means[m]), g.counts[m], _fmt(g.normalized[m]), _fmt(g.degenerate[m])]
        rows.append(row)

    non_exclude = [r for r in reports if r.scenario in CORRELATION_SCENARIOS]
    correlations = {
        "overall": correlation_matrix(non_exclude),
        "groups": [{"key": dict(zip(GROUP_KEYS, k)), "matrix": agg.correlations[k]} for k in sorted(agg.correlations)],
    }
    fail_rows = failure_table(units)
    return {
        "scores.jsonl": "".join(scores).encode("utf-8"),
        "summary.csv": _csv_bytes(header, rows),
        "correlations.json": (json.dumps(correlations, indent=2, sort_keys=True) + "\n").encode("utf-8"),
        "failures.csv": _csv_bytes(
            ["model_id", "scenario", "strategy", "units", "failed", "overflow", "failure_rate"],
            [[*r[:6], _fmt(r[6])] for r in fail_rows],
        ),
    }


def report(manifest_or_dir):
    """Write the report files into ``<run_dir>/reports`` and return their paths."""
    if isinstance(manifest_or_dir, RunManifest):
        run_dir = Path(manifest_or_dir.run_dir)
    else:
        run_dir = Path(manifest_or_dir)
    units = load_units(run_dir)
    if not units:
        logger.warning("no records under %s; writing an empty report", run_dir)
    out_dir = run_dir / "reports"
    paths = {}
    for name, body in build_reports(units).items():
        atomic_write_bytes(out_dir / name, body)
        paths[name] = out_dir / name
    return paths
