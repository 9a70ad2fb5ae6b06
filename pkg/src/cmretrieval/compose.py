"""Compose motion words and context labels into retrieval annotations.

Two styles: simple "{motion} {context-class}" labels (cartesian product
of deduplicated motions and classes) and full sentences
"{person} is {motion} {relation} {article} {class}" expanded over the
four person synonyms and any configured word synonyms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import EmptyInput
from .types import AnnotationSet, ContextLabel

PERSON_SYNONYMS = ("A person", "Someone", "Somebody", "A pedestrian")

RELATION_PHRASES = {
    "on": "on",
    "behind": "behind",
    "in_front_of": "in front of",
    "next_to": "next to",
}

# Default word-synonym table. Non-canonical: entries chosen for coverage
# of common street classes and the toy motion families; override via the
# synonyms section of the config file.
DEFAULT_WORD_SYNONYMS: Dict[str, Tuple[str, ...]] = {
    "road": ("street",),
    "sidewalk": ("pavement",),
    "crosswalk": ("pedestrian crossing",),
    "driveway": ("drive",),
    "terrain": ("ground",),
    "car": ("vehicle",),
    "bus": ("coach",),
    "truck": ("lorry",),
    "van": ("minivan",),
    "bicycle": ("bike",),
    "motorcycle": ("motorbike",),
    "building": ("structure",),
    "wall": ("barrier",),
    "fence": ("railing",),
    "tree": ("plant",),
    "pole": ("post",),
    "bench": ("seat",),
    "police car": ("patrol car",),
    "fire truck": ("fire engine",),
    "ambulance": ("medic van",),
    "e-scooter": ("scooter",),
    "traffic light": ("stoplight",),
    "stop sign": ("traffic sign",),
    "trash can": ("garbage can",),
    "hydrant": ("fire hydrant",),
    "run": ("jog",),
    "walk": ("stroll",),
    "stand": ("wait",),
    "wave": ("gesture",),
    "sit": ("rest",),
}

DEFAULT_GERUNDS: Dict[str, str] = {
    "walk": "walking",
    "run": "running",
    "stand": "standing",
    "wave": "waving",
    "sit": "sitting",
    "jog": "jogging",
    "stroll": "strolling",
    "wait": "waiting",
    "gesture": "gesturing",
    "rest": "resting",
    "step": "stepping",
    "jump": "jumping",
    "kneel": "kneeling",
    "march": "marching",
    "crouch": "crouching",
}


@dataclass(frozen=True)
class SynonymTable:
    person_synonyms: Tuple[str, ...] = PERSON_SYNONYMS
    word_synonyms: Mapping[str, Tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_WORD_SYNONYMS)
    )
    gerunds: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_GERUNDS))

    def __post_init__(self):
        if len(self.person_synonyms) != 4:
            raise ValueError("exactly four person synonyms are required")
        table = {k: tuple(v) for k, v in self.word_synonyms.items()}
        for word, alts in table.items():
            for alt in alts:
                if alt == word:
                    raise ValueError(f"word {word!r} is its own synonym")
                if alt in table:
                    raise ValueError(
                        f"synonym {alt!r} of {word!r} is itself a table key (cycle)"
                    )
        object.__setattr__(self, "word_synonyms", table)
        object.__setattr__(self, "gerunds", dict(self.gerunds))

    def variants(self, word: str) -> Tuple[str, ...]:
        return (word,) + tuple(self.word_synonyms.get(word, ()))

    def gerund(self, word: str) -> str:
        return self.gerunds.get(word, word)


def _dedup(items: Iterable[str]) -> List[str]:
    return list(dict.fromkeys(items))


def _article(noun: str) -> str:
    return "an" if noun[:1].lower() in "aeiou" else "a"


def compose_simple(
    motions: Sequence[str],
    contexts: Sequence[ContextLabel],
    syn: SynonymTable | None = None,
) -> List[str]:
    """Cartesian "{motion} {class}" labels, motion rank major.

    Duplicate motions and duplicate context classes are removed before
    the product; relation words are omitted. No synonym expansion.
    """
    if not motions or not contexts:
        raise EmptyInput("compose_simple needs at least one motion and one context")
    syn = syn or SynonymTable()
    classes = _dedup(c.class_name for c in contexts)
    return [
        f"{syn.gerund(m)} {cls}" for m in _dedup(motions) for cls in classes
    ]


def compose_sentences(
    motions: Sequence[str],
    contexts: Sequence[ContextLabel],
    syn: SynonymTable | None = None,
) -> List[str]:
    """Full-sentence annotations with person and word synonym expansion.

    Template: "{person} is {motion} {relation} {article} {class}". Every
    motion/context pair is expanded across all four person synonyms, and
    each word-synonym alternative of the motion word or context class
    multiplies the set again (one alternate doubles it).
    """
    if not motions or not contexts:
        raise EmptyInput("compose_sentences needs at least one motion and one context")
    syn = syn or SynonymTable()
    pairs = [
        (m, c)
        for m in _dedup(motions)
        for c in dict.fromkeys(contexts)
    ]
    sentences = []
    for motion, ctx in pairs:
        phrase = RELATION_PHRASES[ctx.relation]
        for m_variant in syn.variants(motion):
            verb = syn.gerund(m_variant)
            for c_variant in syn.variants(ctx.class_name):
                for person in syn.person_synonyms:
                    sentences.append(
                        f"{person} is {verb} {phrase} {_article(c_variant)} {c_variant}"
                    )
    return sentences


def compose_annotation_set(
    motions: Sequence[str],
    contexts: Sequence[ContextLabel],
    syn: SynonymTable | None = None,
) -> AnnotationSet:
    """Assemble a full AnnotationSet; empty contexts yield no strings."""
    syn = syn or SynonymTable()
    motions = _dedup(motions)
    contexts = list(dict.fromkeys(contexts))
    complete = bool(motions) and bool(contexts)
    return AnnotationSet(
        motions=tuple(motions),
        contexts=tuple(contexts),
        simple=tuple(compose_simple(motions, contexts, syn)) if complete else (),
        sentences=tuple(compose_sentences(motions, contexts, syn)) if complete else (),
    )


def annotation_counts(annotation_sets: Iterable[AnnotationSet | None]) -> Dict[str, int]:
    """Per-split totals of motion, context, combination, and sentence
    annotations; labeled-sample count under "samples"."""
    counts = {"samples": 0, "motion": 0, "context": 0, "combination": 0, "sentence": 0}
    for ann in annotation_sets:
        if ann is None:
            continue
        counts["samples"] += 1
        counts["motion"] += len(ann.motions)
        counts["context"] += len(ann.contexts)
        counts["combination"] += len(ann.simple)
        counts["sentence"] += len(ann.sentences)
    return counts
