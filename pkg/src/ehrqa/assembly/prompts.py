"""One-shot, task-specific prompt rendering."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from string import Template

from ..corpus.types import Task, format_timestamp
from ..errors import ConfigurationError

TEMPLATE_VERSION = "v1"
EMPTY_RECORD = "[]"

# one-shot demonstrations; all share the exemplar record
_EXAMPLES = {
    Task.EXTRACTIVE: ("Which allergy is recorded at discharge?", "penicillin", None),
    Task.OPEN_ENDED: (
        "What was the reason for this admission?",
        "The patient was admitted for community acquired pneumonia.",
        None,
    ),
    Task.MULTIPLE_CHOICE: (
        "Which antibiotic was continued after discharge?",
        "B",
        (("A", "ceftriaxone"), ("B", "levofloxacin"), ("C", "vancomycin"), ("D", "amoxicillin"),
         ("E", "doxycycline")),
    ),
}


@dataclass(frozen=True)
class Decoding:
    temperature: float
    max_output_tokens: int
    think_token_budget: int | None = None

    @property
    def max_tokens(self):
        """Total completion budget sent to the service (answer + thinking)."""
        return self.max_output_tokens + (self.think_token_budget or 0)


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    task: Task
    decoding: Decoding
    template_id: str
    item_id: str = ""


@lru_cache(maxsize=None)
def load_template(name):
    return resources.files(__package__).joinpath("templates", name).read_text(encoding="utf-8")


def template_id(task):
    return f"{Task(task).value}.{TEMPLATE_VERSION}"


def render_record(segments):
    """Chronological numbered list of notes; an empty context renders as ``[]``."""
    if not segments:
        return EMPTY_RECORD
    parts = []
    for i, seg in enumerate(segments, start=1):
        header = f"[{i}] {seg.note_type or 'note'} | {format_timestamp(seg.timestamp)}"
        parts.append(f"{header}\n{seg.text.strip()}")
    return "\n\n".join(parts)


def render_options(options):
    return "\n".join(f"{label}. {text}" for label, text in options)


def _options_block(options):
    if not options:
        return ""
    return f"\n[[ ## options ## ]]\n{render_options(options)}\n"


def render_prompt(context, item, model_profile):
    """Render the system and user messages for ``item`` over ``context``."""
    task = Task(item.task)
    options = [(o.label, o.text) for o in item.options]
    if task is Task.MULTIPLE_CHOICE and not options:
        raise ConfigurationError(f"multiple_choice item {item.item_id!r} has no options")
    ex_q, ex_a, ex_opts = _EXAMPLES[task]
    user = Template(load_template(f"user.{TEMPLATE_VERSION}.txt")).substitute(
        example_record=load_template(f"exemplar.{TEMPLATE_VERSION}.txt").strip(),
        example_question=ex_q,
        example_options=_options_block(ex_opts),
        example_answer=ex_a,
        medical_record=render_record(context.segments),
        question=item.question,
        options=_options_block(options if task is Task.MULTIPLE_CHOICE else None),
    )
    system = load_template(f"system_{task.value}.{TEMPLATE_VERSION}.txt")
    return PromptBundle(
        system_text=system,
        user_text=user,
        task=task,
        decoding=Decoding(
            temperature=model_profile.temperature,
            max_output_tokens=model_profile.max_output_tokens,
            think_token_budget=model_profile.think_token_budget,
        ),
        template_id=template_id(task),
        item_id=item.item_id,
    )
