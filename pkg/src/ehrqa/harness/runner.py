"""Experiment execution over the (item x scenario x strategy x model) grid.

Output layout under ``output_dir/<digest[:16]>/``::

    manifest.json        run metadata and per-item status
    ledger.jsonl         one line per finished item (append-only)
    records/<item>.jsonl one line per grid unit, deterministic content
    reports/             written by :func:`ehrqa.harness.report.report`

Items run concurrently on a thread pool; the units of one item run
sequentially in grid order, so each record file depends only on the
config and the services.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..assembly import RAG_HIERARCHICAL, assemble, render_prompt, template_id
from ..chunking import NoteChunker
from ..corpus import Scenario, Task, build_scenario, load_corpus
from ..errors import EHRQAError
from ..evaluation import MetricReport, judge_scores, meteor, nli_scores, semantic_f1
from ..evaluation.judge import TEMPLATE_ID as JUDGE_TEMPLATE_ID
from ..evaluation.meteor import ALPHA, BETA, GAMMA
from ..generation import FAILED, OK, OVERFLOW, GenerationRecord, generate, prompt_tokens
from ..retrieval import HybridRetriever
from ..store import atomic_write_bytes, canonical_json
from .services import build_services

logger = logging.getLogger(__name__)


def _now():
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def safe_name(item_id):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in item_id)


@dataclass
class RunManifest:
    run_dir: str
    config_digest: str
    config: dict
    template_ids: list
    token_scheme: str
    service_model_ids: dict
    metric_variants: dict
    started_at: str = ""
    finished_at: str | None = None
    items: dict = field(default_factory=dict)

    @property
    def path(self):
        return Path(self.run_dir) / "manifest.json"

    def save(self):
        atomic_write_bytes(self.path, json.dumps(asdict(self), indent=2, sort_keys=True).encode("utf-8"))

    @classmethod
    def load(cls, run_dir):
        with open(Path(run_dir) / "manifest.json", encoding="utf-8") as fh:
            data = json.load(fh)
        data["run_dir"] = str(run_dir)
        return cls(**data)

    @property
    def failed_units(self):
        return sum(v.get("failed", 0) for v in self.items.values())


class Ledger:
    """Append-only per-item completion log; a torn final line is ignored."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def entries(self):
        out = {}
        if not self.path.exists():
            return out
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue
                out[rec["item_id"]] = rec
        return out

    def append(self, entry):
        line = json.dumps(entry, sort_keys=True) + "\n"
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()


class ExperimentRunner:
    def __init__(self, config, services=None, generator_overrides=None, sleep=time.sleep):
        self.config = config
        self.corpus = load_corpus(config.corpus.notes, config.corpus.qa,
                                  min_context_tokens=config.corpus.min_context_tokens,
                                  scheme=config.chunking.token_scheme)
        self.items = {it.item_id: it for it in self.corpus.items}
        self.services = services or build_services(config, self.corpus.items, generator_overrides)
        self.profiles = config.profiles
        self.strategies = config.strategy_objects
        self.scheme = config.chunking.token_scheme
        self.chunker = NoteChunker(config.chunking.chunk_size, self.scheme).fit()
        self.sleep = sleep
        self.digest = config.digest()
        self.run_dir = Path(config.output_dir) / self.digest[:16]
        self.ledger = Ledger(self.run_dir / "ledger.jsonl")

    # -- per-unit pieces -------------------------------------------------

    def _metrics(self, item, rec, base):
        metrics = set(self.config.metrics)
        report = MetricReport(**base)
        if item.task is Task.MULTIPLE_CHOICE:
            if "mc_accuracy" in metrics:
                report.mc_correct = rec.parsed_option == item.correct_option
            if rec.parsed_option is None:
                report.flags.append("mc_unparsed")
            return report
        cand, ref = rec.parsed_answer, item.gold_answer
        if "meteor" in metrics:
            report.meteor = meteor(cand, ref)
        if "semantic_f1" in metrics:
            if not cand.strip():
                report.flags.append("empty_candidate")
            p, r, f = semantic_f1(cand, ref, self.services.semantic_embedder)
            report.semantic_precision, report.semantic_recall, report.semantic_f1 = p, r, f
        if "nli" in metrics:
            e, nc = nli_scores(ref, cand, self.services.nli)
            if e is None:
                report.flags.append("nli_malformed")
            report.nli_entailment, report.nli_non_contradiction = e, nc
        if "judge" in metrics:
            js = judge_scores(item.question, ref, cand, self.services.judge, model_id=self.services.judge_model_id)
            if js.parse_failed:
                report.flags.append("judge_parse_failed")
            report.judge_correctness, report.judge_completeness, report.judge_faithfulness = js[:3]
        return report

    def _overhead(self, item, profile):
        from ..assembly import AssembledContext, Strategy
        from ..corpus.types import ContextBin

        empty = AssembledContext(item.item_id, Strategy("full_context"), (), 0, ContextBin.SHORT)
        return prompt_tokens(render_prompt(empty, item, profile), self.scheme)

    def _unit(self, item, ctx, strategy, ranked, chunk_map, profile, latencies):
        base_rec = {
            "item_id": item.item_id,
            "model_id": profile.model_id,
            "scenario": ctx.scenario.value,
            "strategy": strategy.name,
            "bin": ctx.bin.value,
            "scenario_tokens": ctx.token_count,
            "over_cap": ctx.over_cap,
            "retrieved": ranked.chunk_ids if ranked is not None else None,
        }
        budget = profile.context_window - profile.generation_budget - self._overhead(item, profile)
        context = assemble(ranked, chunk_map, strategy, ctx.notes, item.item_id,
                           max_tokens=max(budget, 0), scheme=self.scheme)
        base_rec["context_tokens"] = context.token_count
        base_rec["dropped_note_ids"] = list(context.dropped_note_ids)
        if context.overflow and strategy.kind != RAG_HIERARCHICAL:
            rec = GenerationRecord(item.item_id, profile.model_id, strategy.name, ctx.scenario.value,
                                   overflow=True, status=OVERFLOW,
                                   error=f"context of {context.token_count} tokens exceeds budget {budget}")
        else:
            bundle = render_prompt(context, item, profile)
            rec = generate(bundle, profile, self.services.generators[profile.model_id],
                           options=[(o.label, o.text) for o in item.options],
                           strategy=strategy.name, scenario=ctx.scenario.value, scheme=self.scheme,
                           sleep=self.sleep)
            rec.overflow = rec.overflow or context.overflow
        latencies[f"{ctx.scenario.value}|{strategy.name}|{profile.model_id}"] = round(rec.latency, 6)
        out = dict(base_rec)
        out["generation"] = rec.to_record(include_latency=False)
        out["status"] = rec.status
        out["metrics"] = None
        if rec.status == OK:
            keys = {k: base_rec[k] for k in ("item_id", "model_id", "scenario", "strategy", "bin")}
            out["metrics"] = self._metrics(item, rec, keys).to_record()
        return out

    def _failed_units(self, item, scenario, strategies, error):
        return [
            {"item_id": item.item_id, "model_id": p.model_id, "scenario": scenario.value, "strategy": s.name,
             "bin": None, "status": FAILED, "error": error, "generation": None, "metrics": None}
            for s in strategies for p in self.profiles
        ]

    def process_item(self, item):
        """Run every grid unit of ``item``; returns ``(units, latencies)``."""
        notes = self.corpus.patient_notes(item.patient_id)
        units, latencies = [], {}
        for scen_name in self.config.scenarios:
            scenario = Scenario(scen_name)
            strategies = [s for s in self.strategies
                          if not (scenario is Scenario.EXCLUDE_ALL and s.is_rag)]
            try:
                ctx = build_scenario(item, notes, scenario, self.scheme)
                chunks = self.chunker.transform(ctx.notes)
                chunk_map = {c.chunk_id: c for c in chunks}
                retriever = None
                if chunks and any(s.is_rag for s in strategies):
                    rc = self.config.retrieval
                    retriever = HybridRetriever(
                        self.services.embedder, self.services.token_embedder, k1=rc.k1, b=rc.b,
                        k_rrf=rc.k_rrf, candidate_multiplier=rc.candidate_multiplier,
                    ).fit(chunks)
                for strategy in strategies:
                    ranked = None
                    if strategy.is_rag:
                        ranked = retriever.rank(item.question, strategy.k) if retriever else None
                    for profile in self.profiles:
                        units.append(self._unit(item, ctx, strategy, ranked, chunk_map, profile, latencies))
            except EHRQAError as exc:
                logger.error("item %s scenario %s failed: %s", item.item_id, scenario.value, exc)
                units = [u for u in units if u["scenario"] != scenario.value]
                units.extend(self._failed_units(item, scenario, strategies, f"{type(exc).__name__}: {exc}"))
        return units, latencies

    def _write_item(self, item, units, latencies):
        path = self.run_dir / "records" / f"{safe_name(item.item_id)}.jsonl"
        for u in units:
            u["config_digest"] = self.digest
        body = "".join(canonical_json(u) + "\n" for u in units)
        atomic_write_bytes(path, body.encode("utf-8"))
        n_failed = sum(u["status"] == FAILED for u in units)
        n_overflow = sum(u["status"] == OVERFLOW for u in units)
        entry = {
            "item_id": item.item_id,
            "status": "done" if n_failed == 0 else "partial",
            "units": len(units),
            "failed": n_failed,
            "overflow": n_overflow,
            "latency": latencies,
            "finished_at": _now(),
        }
        self.ledger.append(entry)
        return entry

    # -- orchestration ---------------------------------------------------

    def manifest(self):
        if (self.run_dir / "manifest.json").exists():
            return RunManifest.load(self.run_dir)
        return RunManifest(
            run_dir=str(self.run_dir),
            config_digest=self.digest,
            config=self.config.model_dump(mode="json"),
            template_ids=sorted({template_id(t) for t in Task} | {JUDGE_TEMPLATE_ID}),
            token_scheme=self.scheme,
            service_model_ids=self.services.model_ids(),
            metric_variants={"meteor": {"matching": "exact", "alpha": ALPHA, "beta": BETA, "gamma": GAMMA},
                             "semantic_f1": {"weighting": "none", "rescaled": False}},
            started_at=_now(),
        )

    def run(self, max_workers=None):
        self.run_dir.mkdir(parents=True, exist_ok=True)
        manifest = self.manifest()
        manifest.finished_at = None
        done = self.ledger.entries()
        manifest.items = {iid: {"status": "pending"} for iid in sorted(self.items)}
        for iid, entry in done.items():
            if iid in manifest.items:
                manifest.items[iid] = {k: entry[k] for k in ("status", "units", "failed", "overflow")}
        manifest.save()
        pending = [self.items[iid] for iid in sorted(self.items) if iid not in done]
        logger.info("run %s: %d items pending, %d already done", self.digest[:16], len(pending), len(done))

        workers = max_workers or self.config.max_workers
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(self.process_item, it): it for it in pending}
            try:
                for fut in as_completed(futures):
                    item = futures[fut]
                    units, latencies = fut.result()
                    entry = self._write_item(item, units, latencies)
                    manifest.items[item.item_id] = {k: entry[k] for k in ("status", "units", "failed", "overflow")}
            except BaseException:
                for f in futures:
                    f.cancel()
                manifest.save()
                raise
        manifest.finished_at = _now()
        manifest.save()
        return manifest


def run_experiment(config, services=None, generator_overrides=None, max_workers=None, sleep=time.sleep):
    """Execute (or resume) the configured grid and return its manifest."""
    return ExperimentRunner(config, services, generator_overrides, sleep=sleep).run(max_workers)
