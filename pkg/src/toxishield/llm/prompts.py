"""Prompt construction for the subcategory coach and the rewriter.

The coach prompt always carries five baseline components (role, task,
category list, guidelines, output format); later stages append sections.
Composition is strictly additive on section identifiers:

* stage 1: the five baseline components only (zero-shot),
* stage 2: + operational definitions, few-shot examples, disambiguation,
* stage 3: + subtle-toxicity cues and lexical sentiment markers,
* stage 4: + profanity lexicon, anger-marker list, negative constraints,
  logic rules (the default stage),
* stage 5: + rare-category cues; also swaps in expanded definitions for
  the two rarest categories (section ids unchanged).

Definitions, examples, cues, and rules live in editable data files under
``data/prompts/``; wording changes never require code changes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from enum import IntEnum
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from ..core import CategoryLabel, LabelSet, TextSample, normalize_label
from ..errors import MissingDefinition
from ..filter import Lexicon
from .parsing import render_coach_response, render_reframe_response


class Stage(IntEnum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4
    S5 = 5


DEFAULT_STAGE = Stage.S4

PERSONA = (
    "You are a maintainer of an OSS project with years of experience "
    "reviewing pull requests and moderating contributor discussions."
)

TASK = (
    "Your task is to classify the subcategories of toxicity. Assign one or "
    "more toxicity categories to the input comment and provide a brief "
    "rationale, reasoning step by step."
)

GUIDELINES = (
    'If the comment is not toxic, respond with "Non-Toxic" and a supporting '
    "explanation. Assign between one and three categories; never combine "
    '"Non-Toxic" with any toxic category.'
)

OUTPUT_FORMAT = (
    "Respond in XML format: <response> {response} </response> "
    "<category> {category} </category>. Separate multiple categories with "
    "commas. Now classify the following comment."
)

LEXICAL_MARKERS = (
    "Strong negative sentiment markers that often accompany toxicity: "
    '"garbage", "trash", "useless", "pathetic", "clown", "braindead". '
    "Treat misspelled or slang profanity (e.g. \"feck\", \"sh1t\") as "
    "profanity even though it matches no keyword list."
)

NEGATIVE_CONSTRAINTS = (
    "Do not label firm technical disagreement as toxic when it stays about "
    "the code. Do not label technical jargon or identifier names as "
    "profanity. Do not treat emoji or informal tone alone as toxicity.",
)

COMMENT_OPEN = "<comment>"
COMMENT_CLOSE = "</comment>"


def delimit_comment(body: str) -> str:
    """Wrap untrusted comment text in an unambiguous, escaped delimiter."""
    escaped = body.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return f"{COMMENT_OPEN}\n{escaped}\n{COMMENT_CLOSE}"


@dataclass(frozen=True)
class CoachExample:
    comment: str
    labels: LabelSet
    rationale: str


@dataclass(frozen=True)
class ReframePair:
    comment: str
    detoxified: str
    rationale: str


def _read_data(name: str) -> str:
    return resources.files("toxishield").joinpath(f"data/prompts/{name}").read_text("utf-8")


def load_sections(text: str) -> dict[str, str]:
    """Parse '## Name' sectioned text into a name -> body map."""
    sections: dict[str, str] = {}
    name = None
    body: list[str] = []
    for line in text.splitlines():
        if line.startswith("## "):
            if name is not None:
                sections[name] = "\n".join(body).strip()
            name = line[3:].strip()
            body = []
        elif line.lstrip().startswith("#") and name is None:
            continue
        else:
            body.append(line)
    if name is not None:
        sections[name] = "\n".join(body).strip()
    return sections


def _load_blocks(text: str) -> list[dict[str, str]]:
    """Parse '===' separated key/value blocks."""
    blocks: list[dict[str, str]] = []
    current: dict[str, str] = {}
    current_key = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#") and not current:
            continue
        if stripped.startswith("==="):
            if current:
                blocks.append(current)
            current = {}
            current_key = None
            continue
        if ":" in line and not line.startswith((" ", "\t")):
            key, _, value = line.partition(":")
            current_key = key.strip()
            current[current_key] = value.strip()
        elif current_key is not None and stripped:
            current[current_key] += " " + stripped
    if current:
        blocks.append(current)
    return blocks


def _load_lines(text: str) -> tuple[str, ...]:
    return tuple(
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    )


def load_definitions(path: "Path | None" = None) -> dict[CategoryLabel, str]:
    text = Path(path).read_text("utf-8") if path else _read_data("definitions.txt")
    return {
        normalize_label(name): body for name, body in load_sections(text).items()
    }


def load_coach_examples(path: "Path | None" = None) -> tuple[CoachExample, ...]:
    text = Path(path).read_text("utf-8") if path else _read_data("fewshot_coach.txt")
    examples = []
    for block in _load_blocks(text):
        labels = LabelSet(
            frozenset(normalize_label(t) for t in block["labels"].split(","))
        )
        examples.append(
            CoachExample(
                comment=block["comment"], labels=labels, rationale=block["rationale"]
            )
        )
    return tuple(examples)


def load_reframe_pairs(path: "Path | None" = None) -> tuple[ReframePair, ...]:
    text = Path(path).read_text("utf-8") if path else _read_data("fewshot_reframe.txt")
    return tuple(
        ReframePair(
            comment=block["comment"],
            detoxified=block["detoxified"],
            rationale=block["rationale"],
        )
        for block in _load_blocks(text)
    )


@dataclass(frozen=True)
class PromptConfig:
    """Everything the coach prompt builder needs, keyed by stage."""

    stage: Stage = DEFAULT_STAGE
    persona: str = PERSONA
    task: str = TASK
    guidelines: str = GUIDELINES
    output_format: str = OUTPUT_FORMAT
    definitions: Mapping[CategoryLabel, str] = field(default_factory=dict)
    few_shot: tuple[CoachExample, ...] = ()
    disambiguation: tuple[str, ...] = ()
    subtle_cues: tuple[str, ...] = ()
    lexical_markers: str = LEXICAL_MARKERS
    profanity_terms: tuple[str, ...] = ()
    anger_markers: tuple[str, ...] = ()
    negative_constraints: tuple[str, ...] = NEGATIVE_CONSTRAINTS
    logic_rules: tuple[str, ...] = ()
    rare_expansions: Mapping[CategoryLabel, str] = field(default_factory=dict)

    @classmethod
    def default(cls, stage: Stage = DEFAULT_STAGE, lexicon: "Lexicon | None" = None) -> "PromptConfig":
        """Build a config from the packaged prompt data files."""
        lexicon = lexicon if lexicon is not None else Lexicon.bundled()
        return cls(
            stage=stage,
            definitions=load_definitions(),
            few_shot=load_coach_examples(),
            disambiguation=_load_lines(_read_data("disambiguation.txt")),
            subtle_cues=_load_lines(_read_data("subtle_cues.txt")),
            profanity_terms=tuple(sorted(lexicon.terms)),
            anger_markers=tuple(
                f"{name}: pattern {pattern}" for name, pattern in lexicon.anger_markers
            ),
            logic_rules=_load_lines(_read_data("logic_rules.txt")),
            rare_expansions={
                normalize_label(name): body
                for name, body in load_sections(_read_data("rare_expansions.txt")).items()
            },
        )

    def at_stage(self, stage: Stage) -> "PromptConfig":
        return replace(self, stage=stage)


# Ordered section identifiers present at each stage.
BASELINE_SECTIONS = ("role", "task", "categories", "guidelines", "output_format")
STAGE_SECTIONS: dict[Stage, tuple[str, ...]] = {
    Stage.S1: BASELINE_SECTIONS,
    Stage.S2: BASELINE_SECTIONS + ("definitions", "few_shot", "disambiguation"),
    Stage.S3: BASELINE_SECTIONS
    + ("definitions", "few_shot", "disambiguation", "subtle_cues", "lexical_markers"),
    Stage.S4: BASELINE_SECTIONS
    + (
        "definitions",
        "few_shot",
        "disambiguation",
        "subtle_cues",
        "lexical_markers",
        "profanity_lexicon",
        "anger_list",
        "negative_constraints",
        "logic_rules",
    ),
    Stage.S5: BASELINE_SECTIONS
    + (
        "definitions",
        "few_shot",
        "disambiguation",
        "subtle_cues",
        "lexical_markers",
        "profanity_lexicon",
        "anger_list",
        "negative_constraints",
        "logic_rules",
        "rare_category_cues",
    ),
}


def _category_list() -> str:
    toxic = [c.value for c in CategoryLabel if c.is_toxic]
    return (
        "The toxicity categories are: "
        + ", ".join(toxic)
        + '. A comment that fits none of them is "Non-Toxic".'
    )


def _render_definitions(cfg: PromptConfig) -> str:
    lines = []
    for category in CategoryLabel:
        body = cfg.definitions.get(category)
        if body is None:
            raise MissingDefinition(category.value)
        if cfg.stage >= Stage.S5 and category in cfg.rare_expansions:
            body = cfg.rare_expansions[category]
        lines.append(f"{category.value}: {body}")
    return "Category definitions:\n" + "\n\n".join(lines)


def _render_few_shot(examples: Sequence[CoachExample]) -> str:
    parts = []
    for ex in examples:
        answer = render_coach_response(ex.labels, ex.rationale)
        parts.append(f"Comment: {ex.comment}\nAnswer: {answer}")
    return "Worked examples:\n" + "\n\n".join(parts)


def prompt_sections(cfg: PromptConfig) -> list[tuple[str, str]]:
    """The ordered (section id, text) pairs for the configured stage."""
    wanted = STAGE_SECTIONS[cfg.stage]
    rendered: dict[str, str] = {
        "role": cfg.persona,
        "task": cfg.task,
        "categories": _category_list(),
        "guidelines": "Guidelines: " + cfg.guidelines,
        "output_format": cfg.output_format,
    }
    if "definitions" in wanted:
        rendered["definitions"] = _render_definitions(cfg)
        rendered["few_shot"] = _render_few_shot(cfg.few_shot)
        rendered["disambiguation"] = "Disambiguation notes:\n" + "\n".join(
            f"- {note}" for note in cfg.disambiguation
        )
    if "subtle_cues" in wanted:
        rendered["subtle_cues"] = "Subtle toxicity cues:\n" + "\n".join(
            f"- {cue}" for cue in cfg.subtle_cues
        )
        rendered["lexical_markers"] = cfg.lexical_markers
    if "profanity_lexicon" in wanted:
        rendered["profanity_lexicon"] = (
            "Profanity terms (high-probability toxicity indicators): "
            + ", ".join(cfg.profanity_terms)
        )
        rendered["anger_list"] = (
            "Anger list (signals of heightened emotion): "
            + "; ".join(cfg.anger_markers)
            + ". Shouting in capitals and stacked '!' or '?' marks suggest anger."
        )
        rendered["negative_constraints"] = "Constraints:\n" + "\n".join(
            f"- {c}" for c in cfg.negative_constraints
        )
        rendered["logic_rules"] = "Logic rules:\n" + "\n".join(
            f"- {rule}" for rule in cfg.logic_rules
        )
    if "rare_category_cues" in wanted:
        rendered["rare_category_cues"] = (
            "Pay particular attention to the rare categories Arrogance and "
            "IdentityAttack; their expanded definitions above list granular "
            "cues and extra examples. Prefer recall over precision for them."
        )
    return [(sid, rendered[sid]) for sid in wanted]


def build_coach_prompt(sample: TextSample, cfg: PromptConfig) -> str:
    """Render the full classification prompt for one comment.

    Raises:
        MissingDefinition: a taxonomy member has no definition configured
            (stages 2+ require definitions for every category).
    """
    parts = [text for _, text in prompt_sections(cfg)]
    parts.append(delimit_comment(sample.body))
    return "\n\n".join(parts)


REFRAME_INSTRUCTION = (
    "Rewrite the following code-review comment into a respectful, "
    "professional alternative, strictly adhering to the original technical "
    "intent. Keep every technical detail (identifiers, line numbers, "
    "version numbers) intact."
)

REFRAME_COT = (
    "Proceed in two steps: first analyze which elements of the comment are "
    "toxic and why; then reconstruct the sentence without them, preserving "
    "the technical core."
)

REFRAME_OUTPUT = (
    "Respond in exactly this format: "
    "Detoxified: <rewritten comment>; Rationale: <explanation of changes>"
)


def build_reframe_prompt(
    sample: TextSample,
    few_shot: "Sequence[ReframePair] | None" = None,
) -> str:
    """Render the rewrite prompt: instruction, reasoning steps, examples,
    output schema, then the delimited comment.

    An explicitly empty example list is allowed but warned about; the
    packaged defaults are used when none are given.
    """
    pairs = load_reframe_pairs() if few_shot is None else tuple(few_shot)
    if not pairs:
        warnings.warn(
            "reframe prompt configured with zero few-shot pairs; rewrite "
            "quality degrades without them",
            UserWarning,
            stacklevel=2,
        )
    parts = [REFRAME_INSTRUCTION, REFRAME_COT]
    if pairs:
        rendered = [
            f"Comment: {p.comment}\n{render_reframe_response(p.detoxified, p.rationale)}"
            for p in pairs
        ]
        parts.append("Examples:\n" + "\n\n".join(rendered))
    parts.append(REFRAME_OUTPUT)
    parts.append(delimit_comment(sample.body))
    return "\n\n".join(parts)
