from __future__ import annotations

import json

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ehrqa.assembly import AssembledContext, Strategy, render_prompt
from ehrqa.corpus import ContextBin, Task
from ehrqa.errors import ConfigurationError, RetryableServiceError, ServiceError
from ehrqa.generation import (
    FAILED,
    OK,
    OVERFLOW,
    PRESETS,
    EchoGoldService,
    FixedStringService,
    HttpGenerationService,
    ModelProfile,
    ScriptedService,
    ThinkingWrapper,
    extract_option,
    generate,
    strip_thinking,
)

from .conftest import make_item

OPTS = [("A", "aspirin"), ("B", "heparin"), ("C", "insulin"), ("D", "warfarin"), ("E", "metoprolol")]


def bundle_for(item, profile):
    ctx = AssembledContext(item.item_id, Strategy("full_context"), (), 0, ContextBin.SHORT)
    return render_prompt(ctx, item, profile)


def no_sleep(_):
    pass


@pytest.fixture
def item():
    return make_item(question="Which organism grew in the blood culture?", gold="Staphylococcus aureus")


def test_echo_stub_returns_gold(item):
    prof = ModelProfile("m")
    rec = generate(bundle_for(item, prof), prof, EchoGoldService.from_items([item]))
    assert rec.status == OK and rec.parsed_answer == item.gold_answer and rec.attempts == 1


def test_echo_is_idempotent_modulo_latency(item):
    prof = ModelProfile("m")
    svc = EchoGoldService.from_items([item])
    a = generate(bundle_for(item, prof), prof, svc).to_record(include_latency=False)
    b = generate(bundle_for(item, prof), prof, svc).to_record(include_latency=False)
    assert a == b


def test_two_transient_failures_then_success(item):
    prof = ModelProfile("m", max_attempts=3)
    svc = ScriptedService([RetryableServiceError("503"), RetryableServiceError("timeout"), "ok answer"])
    sleeps = []
    rec = generate(bundle_for(item, prof), prof, svc, sleep=sleeps.append)
    assert rec.status == OK and rec.attempts == 3 and rec.parsed_answer == "ok answer"
    assert sleeps == [1.0, 2.0]  # exponential backoff


def test_exhausted_retries_mark_failed(item):
    prof = ModelProfile("m", max_attempts=3)
    svc = ScriptedService([RetryableServiceError("503")])
    rec = generate(bundle_for(item, prof), prof, svc, sleep=no_sleep)
    assert rec.status == FAILED and rec.attempts == 3 and svc.calls == 3


def test_permanent_error_is_not_retried(item):
    prof = ModelProfile("m", max_attempts=3)
    svc = ScriptedService([ServiceError("400 bad request")])
    rec = generate(bundle_for(item, prof), prof, svc, sleep=no_sleep)
    assert rec.status == FAILED and rec.attempts == 1 and svc.calls == 1


def test_overflow_skips_service(item):
    prof = ModelProfile("m", context_window=100)
    svc = ScriptedService(["never"])
    rec = generate(bundle_for(item, prof), prof, svc)
    assert rec.status == OVERFLOW and rec.overflow and svc.calls == 0


def test_reasoning_output_thinking_stripped(item):
    prof = PRESETS["qwq-32b"]
    rec = generate(bundle_for(item, prof), prof, FixedStringService("<think>hmm, maybe A</think>Answer: B"))
    assert rec.parsed_answer == "Answer: B"
    assert rec.raw_output == "<think>hmm, maybe A</think>Answer: B"


def test_thinking_wrapper_round_trip(item):
    prof = PRESETS["huatuogpt-o1-7b"]
    svc = ThinkingWrapper(EchoGoldService.from_items([item]))
    rec = generate(bundle_for(item, prof), prof, svc)
    assert rec.parsed_answer == item.gold_answer and "<think>" in rec.raw_output


def test_structured_answer_field_extracted(item):
    prof = ModelProfile("m")
    out = "[[ ## answer ## ]]\nStaph aureus.\n\n[[ ## completed ## ]]"
    assert generate(bundle_for(item, prof), prof, FixedStringService(out)).parsed_answer == "Staph aureus."


@pytest.mark.parametrize("raw,expected", [
    ("<think>x</think>y", "y"),
    ("<think>a</think>b<think>c</think>d", "d"),
    ("<think>never closed", ""),
    ("plain", "plain"),
])
def test_strip_thinking(raw, expected):
    assert strip_thinking(raw) == expected


def test_custom_delimiters():
    assert strip_thinking("<r>x</r>ans", ("<r>", "</r>")) == "ans"


@pytest.mark.parametrize("raw,expected", [
    ("The answer is (C).", "C"),
    ("heparin", "B"),
    ("HEPARIN.", "B"),
    ("Both A and B seem plausible", None),
    ("B. heparin", "B"),
    ("D", "D"),
    ("nothing useful", None),
    ("", None),
])
def test_extract_option(raw, expected):
    assert extract_option(raw, OPTS) == expected


@given(st.text(alphabet=st.sampled_from(list("ABCDEFGH ().xyz")), max_size=30))
def test_extract_option_stays_in_option_set(raw):
    opts = OPTS[:3]
    assert extract_option(raw, opts) in {None, "A", "B", "C"}


def test_multiple_choice_generation_parses_option():
    item = make_item(task=Task.MULTIPLE_CHOICE, question="Which anticoagulant was started?",
                     options=OPTS, correct="B", gold="heparin")
    prof = ModelProfile("m")
    rec = generate(bundle_for(item, prof), prof, EchoGoldService.from_items([item]), options=OPTS)
    assert rec.parsed_option == "B"


def test_open_task_never_has_option(item):
    prof = ModelProfile("m")
    rec = generate(bundle_for(item, prof), prof, FixedStringService("B"), options=OPTS)
    assert rec.parsed_option is None


def test_profile_invariants():
    assert ModelProfile("m").temperature == 0
    assert ModelProfile("m", family="reasoning").temperature == 1
    assert ModelProfile("m", temperature=0.3).temperature == 0.3
    with pytest.raises(ConfigurationError):
        ModelProfile("m", think_token_budget=100)
    with pytest.raises(ConfigurationError):
        ModelProfile("m", family="chat")
    assert PRESETS["qwq-32b"].think_token_budget == 20_000
    assert PRESETS["huatuogpt-o1-7b"].think_token_budget == 8_000


def test_http_generation_wire_protocol(item):
    seen = []

    def handler(request):
        assert request.url.path == "/generate"
        seen.append(json.loads(request.content))
        return httpx.Response(200, json={"text": "Staphylococcus aureus", "usage": {"completion_tokens": 3}})

    prof = ModelProfile("served-model")
    svc = HttpGenerationService("http://gen.test", transport=httpx.MockTransport(handler))
    rec = generate(bundle_for(item, prof), prof, svc)
    assert rec.parsed_answer == "Staphylococcus aureus" and rec.usage == {"completion_tokens": 3}
    assert set(seen[0]) == {"model_id", "system_text", "user_text", "temperature", "max_tokens"}
    assert seen[0]["model_id"] == "served-model" and seen[0]["max_tokens"] == 512


def test_http_generation_retries_on_503(item):
    codes = iter([503, 500, 200])

    def handler(request):
        code = next(codes)
        return httpx.Response(code, json={"text": "done"} if code == 200 else {})

    prof = ModelProfile("m", max_attempts=3)
    svc = HttpGenerationService("http://gen.test", transport=httpx.MockTransport(handler))
    rec = generate(bundle_for(item, prof), prof, svc, sleep=no_sleep)
    assert rec.status == OK and rec.attempts == 3


def test_http_generation_malformed_response(item):
    prof = ModelProfile("m")
    svc = HttpGenerationService("http://gen.test", transport=httpx.MockTransport(lambda r: httpx.Response(200, json={})))
    rec = generate(bundle_for(item, prof), prof, svc, sleep=no_sleep)
    assert rec.status == FAILED and rec.attempts == 1
