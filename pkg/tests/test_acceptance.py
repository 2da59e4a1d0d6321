"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed
even without ``-s``.
"""

from __future__ import annotations

import itertools
import random
import time
from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest

from ehrqa.assembly import Strategy, assemble
from ehrqa.chunking import Chunk, chunk_note, count_tokens
from ehrqa.corpus import CONTEXT_CAP, ContextBin, NoteType, Scenario, Task, assign_bin, build_scenario, exceeds_cap
from ehrqa.corpus import generate_fixture, write_corpus
from ehrqa.evaluation import FixedJudgeService, FixedNLIService, judge_scores, mc_accuracy, meteor, nli_scores
from ehrqa.evaluation import semantic_f1
from ehrqa.generation import EchoGoldService, ModelProfile, generate
from ehrqa.assembly import AssembledContext, render_prompt
from ehrqa.harness import PAPER_STRATEGIES, Ledger, parse_config, report, run_experiment
from ehrqa.harness.report import REPORT_FILES
from ehrqa.retrieval import (
    FusionParams,
    OneHotTokenEmbedder,
    RankedList,
    TokenEmbeddingMatrix,
    analyze,
    build_sparse_index,
    fuse_rrf,
    rerank_maxsim,
    score_sparse,
)
from ehrqa.retrieval.services import hashed_index

from . import oracles
from .conftest import T0, make_item, make_note
from .frozen import METEOR_CASES


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPTANCE {'PASS' if ok else 'FAIL'} | {name} | {detail}")
        assert ok, f"{name}: {detail}"

    return emit


VOCAB = [f"t{i}" for i in range(40)] + ["fever", "cough", "k", "4", "08"]


def _chunk(cid, text, t=T0, seq=0, parent=None):
    return Chunk(cid, parent or cid, "P1", seq, t, text, len(text.split()))


def test_bm25_oracle_equivalence(verdict):
    rng = random.Random(20250101)
    start = time.perf_counter()
    worst, mismatched = 0.0, 0
    for _ in range(200):
        n = rng.randint(1, 50)
        docs = {f"c{i:02d}": " ".join(rng.choice(VOCAB) for _ in range(rng.randint(0, 40))) for i in range(n)}
        query = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 8)))
        got = score_sparse(build_sparse_index([_chunk(c, t) for c, t in docs.items()]), query, n)
        want = oracles.bm25(docs, query)
        if set(got.chunk_ids) != set(want) or got.chunk_ids != oracles.order(want)[: len(got)]:
            mismatched += 1
        for cid, s in got:
            worst = max(worst, abs(s - want.get(cid, float("inf"))))
    elapsed = time.perf_counter() - start
    ok = mismatched == 0 and worst <= 1e-9 and elapsed < 10
    verdict("BM25 oracle equivalence", ok, f"200 corpora, max |diff|={worst:.2e}, ranking mismatches={mismatched}, "
                                          f"{elapsed:.2f}s")


def _rl(ids):
    return RankedList("s", tuple((d, float(len(ids) - i)) for i, d in enumerate(ids)))


def test_rrf_exactness(verdict):
    top = fuse_rrf([_rl(["d1", "d2"]), _rl(["d1", "d3"])], FusionParams(k_rrf=60)).scores["d1"]
    ab = fuse_rrf([_rl(["d1", "d2", "d3"]), _rl(["d2", "d3", "d1"])]).chunk_ids
    rng = random.Random(7)
    invariant = True
    for _ in range(100):
        pool = [f"d{i}" for i in range(rng.randint(1, 12))]
        lists = [rng.sample(pool, rng.randint(1, len(pool))) for _ in range(rng.randint(1, 6))]
        ref = fuse_rrf([_rl(x) for x in lists])
        for perm in itertools.islice(itertools.permutations(lists), 24):
            invariant &= fuse_rrf([_rl(x) for x in perm]) == ref
    ok = top == 2 / 61 and ab == ["d2", "d1", "d3"] and invariant
    verdict("RRF exactness", ok, f"score={top!r} (2/61={2 / 61!r}), A/B order={ab}, permutation-invariant={invariant}")


def test_maxsim_oracle_equivalence(verdict):
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(1, 33))
        q = rng.normal(size=(int(rng.integers(1, 9)), dim))
        d = rng.normal(size=(int(rng.integers(1, 65)), dim))
        got = rerank_maxsim(TokenEmbeddingMatrix(q, "m"), [("c", TokenEmbeddingMatrix(d, "m"))], 1).scores["c"]
        worst = max(worst, abs(got - oracles.maxsim(q.tolist(), d.tolist())))
    basis = np.eye(16)
    doc = basis[[0, 3, 5, 7, 9, 11]]
    query = basis[[3, 9, 11, 0, 5]]
    ident = rerank_maxsim(TokenEmbeddingMatrix(query, "m"), [("c", TokenEmbeddingMatrix(doc, "m"))], 1).scores["c"]
    ok = worst <= 1e-9 and ident == float(len(query))
    verdict("MaxSim oracle equivalence", ok, f"200 instances, max |diff|={worst:.2e}, identity score={ident} (|Q|=5)")


def test_temporal_ordering_property(verdict):
    rng = random.Random(3)
    violations = repeats = 0
    for trial in range(1000):
        notes = [make_note(f"n{i}", " ".join("ab" for _ in range(rng.randint(1, 30))),
                           hours=rng.randint(0, 4)) for i in range(rng.randint(1, 8))]
        chunks = {c.chunk_id: c for n in notes for c in chunk_note(n, size=rng.randint(2, 8))}
        ids = list(chunks)
        rng.shuffle(ids)
        ranked = RankedList("x", tuple((cid, float(len(ids) - i)) for i, cid in enumerate(ids)))
        for kind in ("rag_chunks", "rag_hierarchical"):
            ctx = assemble(ranked, chunks, Strategy(kind, rng.randint(1, 15)), notes)
            keys = [s.sort_key for s in ctx.segments]
            violations += keys != sorted(keys)
            if kind == "rag_hierarchical":
                parents = [s.parent_note_id for s in ctx.segments]
                repeats += len(parents) != len(set(parents))
    ok = violations == 0 and repeats == 0
    verdict("Temporal ordering property", ok, f"1000 orders x 2 strategies, order violations={violations}, "
                                             f"repeated parents={repeats}")


def test_chunking_losslessness(verdict):
    rng = random.Random(11)
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 .,;:-()/\n"
    bad_sum = bad_size = bad_text = 0
    for i in range(500):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 6000)))
        chunks = chunk_note(make_note(f"n{i}", text))
        bad_sum += sum(c.token_count for c in chunks) != count_tokens(text)
        bad_size += any(c.token_count != 512 for c in chunks[:-1])
        bad_text += "".join(c.text for c in chunks) != (text if chunks else "")
    ok = bad_sum == bad_size == bad_text == 0
    verdict("Chunking losslessness", ok, f"500 texts, sum mismatches={bad_sum}, short non-final chunks={bad_size}, "
                                        f"text mismatches={bad_text}")


def test_scenario_algebra(verdict):
    rng = random.Random(5)
    types = list(NoteType)
    failures = 0
    for _ in range(200):
        notes = [make_note(f"n{i}", f"w{i}", note_type=rng.choice(types), hours=rng.randint(0, 9))
                 for i in range(rng.randint(0, 15))]
        ids = [n.note_id for n in notes]
        relevant = set(rng.sample(ids, rng.randint(0, len(ids))))
        related = set(rng.sample(types, rng.randint(1, len(types))))
        item = make_item(relevant=relevant, related=[t.value for t in related])
        got = {s: set(build_scenario(item, notes, s).note_ids) for s in Scenario}
        failures += got[Scenario.EXCLUDE_RELEVANT] | relevant != got[Scenario.INCLUDE_ALL]
        failures += not got[Scenario.INCLUDE_RELATED] <= got[Scenario.INCLUDE_ALL]
    expected = {-1: None, 0: "short", 1: "short", 7999: "short", 8000: "medium", 8001: "medium",
                15999: "medium", 16000: "large", 16001: "large", 31999: "large", 32000: "extended",
                32001: "extended", 127999: "extended", 128000: "extended", 128001: "extended"}
    bin_errors = []
    for count, want in expected.items():
        if want is None:
            try:
                assign_bin(count)
                bin_errors.append(count)
            except ValueError:
                pass
        elif assign_bin(count).value != want:
            bin_errors.append(count)
    cap_ok = not exceeds_cap(CONTEXT_CAP - 1) and not exceeds_cap(CONTEXT_CAP) and exceeds_cap(CONTEXT_CAP + 1)
    ok = failures == 0 and not bin_errors and cap_ok
    verdict("Scenario algebra", ok, f"200 corpora, set-law failures={failures}, bin edge errors={bin_errors}, "
                                   f"128K flag edges ok={cap_ok}")


def test_metric_battery_on_echo_stub(verdict):
    notes, items = generate_fixture(n_patients=3, seed=9, max_notes=6)
    echo = EchoGoldService.from_items(items)
    prof = ModelProfile("echo", context_window=128_000)
    embedder = OneHotTokenEmbedder(4096)
    f1s, nlis, judges, mc_records = [], [], [], []
    for it in items:
        ctx = AssembledContext(it.item_id, Strategy("full_context"), (), 0, ContextBin.SHORT)
        rec = generate(render_prompt(ctx, it, prof), prof, echo, options=[(o.label, o.text) for o in it.options])
        assert rec.parsed_answer == it.gold_answer
        if it.task is Task.MULTIPLE_CHOICE:
            mc_records.append(rec)
            continue
        f1s.append(semantic_f1(rec.parsed_answer, it.gold_answer, embedder).f1)
        nlis.append(tuple(nli_scores(it.gold_answer, rec.parsed_answer, FixedNLIService(1, 0, 0))))
        judges.append(tuple(judge_scores(it.question, it.gold_answer, rec.parsed_answer, FixedJudgeService(5, 5, 5)))[:3])
    acc = mc_accuracy(mc_records, items)
    worst_meteor = max(abs(meteor(c, r) - want) for c, r, want in METEOR_CASES)
    ok = (all(f == 1.0 for f in f1s) and all(n == (1.0, 1.0) for n in nlis)
          and all(j == (100.0, 100.0, 100.0) for j in judges) and acc == 1.0 and worst_meteor <= 1e-6)
    verdict("Metric battery on echo stub", ok,
            f"{len(f1s)} text items: semantic_f1=1.0 all={all(f == 1.0 for f in f1s)}, nli=(1,1), judge=(100,100,100); "
            f"mc_accuracy={acc} over {len(mc_records)}; METEOR max |diff| vs reference={worst_meteor:.1e}")


def test_semantic_f1_overlap_equivalence(verdict):
    vocab = [f"w{i}x" for i in range(60)]
    dim = 4096
    assert len({hashed_index(w, dim) for w in vocab}) == len(vocab), "stub vocabulary collides"
    rng = random.Random(17)
    emb = OneHotTokenEmbedder(dim)
    worst = 0.0
    for _ in range(100):
        a = rng.sample(vocab, rng.randint(1, 15))
        b = rng.sample(vocab, rng.randint(1, 15))
        got = semantic_f1(" ".join(a), " ".join(b), emb).f1
        worst = max(worst, abs(got - oracles.set_f1(analyze(" ".join(a)), analyze(" ".join(b)))))
    verdict("Semantic-F1/token-overlap equivalence", worst <= 1e-9, f"100 pairs, max |diff|={worst:.2e}")


class _Interrupted(BaseException):
    pass


class _InterruptAfter:
    def __init__(self, inner, n):
        self.inner, self.left = inner, n

    def complete(self, request):
        self.left -= 1
        if self.left < 0:
            raise _Interrupted()
        return self.inner.complete(request)


def _outputs(run_dir):
    run_dir = Path(run_dir)
    files = sorted(run_dir.glob("records/*.jsonl")) + [run_dir / "reports" / f for f in REPORT_FILES]
    return {str(p.relative_to(run_dir)): p.read_bytes() for p in files}


def test_end_to_end_determinism_and_resume(tmp_path, verdict):
    notes, items = generate_fixture()
    write_corpus(notes, items, tmp_path / "notes.jsonl", tmp_path / "qa.jsonl")

    def raw(sub):
        return {
            "corpus": {"notes": str(tmp_path / "notes.jsonl"), "qa": str(tmp_path / "qa.jsonl")},
            "models": [{"model_id": "stub-instruct", "context_window": 128_000},
                       {"model_id": "stub-reasoning", "family": "reasoning", "context_window": 128_000,
                        "think_token_budget": 8000, "service": {"kind": "echo_gold_thinking"}}],
            "output_dir": str(tmp_path / sub / "runs"),
            "cache_dir": str(tmp_path / sub / "cache"),
        }

    start = time.perf_counter()
    first = run_experiment(parse_config(raw("a")))
    report(first)
    elapsed = time.perf_counter() - start

    second = run_experiment(parse_config(raw("b")))
    report(second)
    identical = _outputs(first.run_dir) == _outputs(second.run_dir)

    cfg = parse_config(raw("c"))
    echo = EchoGoldService.from_items(items)
    try:
        run_experiment(cfg, generator_overrides={"stub-instruct": _InterruptAfter(echo, 200)}, max_workers=1)
        interrupted = False
    except _Interrupted:
        interrupted = True
    run_dir = Path(cfg.output_dir) / cfg.digest()[:16]
    partial = len(Ledger(run_dir / "ledger.jsonl").entries())
    resumed = run_experiment(cfg)
    report(resumed)
    resume_equal = _outputs(resumed.run_dir) == _outputs(first.run_dir)

    ok = (len(items) >= 50 and elapsed < 60 and first.failed_units == 0 and identical
          and interrupted and 0 < partial < len(items) and resume_equal)
    verdict("End-to-end determinism and resumability", ok,
            f"{len(items)} items, clean run {elapsed:.1f}s, failed units={first.failed_units}, "
            f"repeat byte-identical={identical}, resumed after {partial}/{len(items)} items equal={resume_equal}")


def test_configuration_fidelity(verdict):
    cfg = parse_config({"corpus": {"notes": "n", "qa": "q"},
                        "models": [{"model_id": "i", "family": "instruct"}, {"model_id": "r", "family": "reasoning"},
                                   {"model_id": "q", "preset": "qwq-32b"}, {"model_id": "h", "preset": "huatuogpt-o1-7b"}]})
    inst, reas, qwq, hua = cfg.profiles
    strategies = {s.label for s in cfg.strategy_objects}
    checks = {
        "k_rrf=60": cfg.retrieval.k_rrf == 60,
        "candidate_multiplier=2": cfg.retrieval.candidate_multiplier == 2,
        "chunk_size=512": cfg.chunking.chunk_size == 512,
        "temperature instruct=0": inst.temperature == 0,
        "temperature reasoning=1": reas.temperature == 1 and qwq.temperature == 1,
        "think budgets 20k/8k": qwq.think_token_budget == 20_000 and hua.think_token_budget == 8_000,
        "strategy set": strategies == {"FC", "RAG 5", "RAG 10", "RAG 15", "RAG HIR 3", "RAG HIR 5", "RAG HIR 7"}
        and cfg.strategies == PAPER_STRATEGIES,
    }
    failed = [k for k, v in checks.items() if not v]
    verdict("Configuration fidelity", not failed, "all defaults match" if not failed else f"mismatched: {failed}")
