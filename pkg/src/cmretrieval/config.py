"""Global configuration: one YAML file governs every pipeline stage.

Every key has a default, so an empty or absent file yields a fully
working toy setup. See configs/default.yaml for the documented key list.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import yaml

from .compose import DEFAULT_GERUNDS, DEFAULT_WORD_SYNONYMS, SynonymTable
from .context import DEFAULT_GROUND_VOCABULARY, DEFAULT_PERSON_CLASSES, RegionConfig
from .lowess import LowessConfig
from .motion import DEFAULT_EXCLUDED_WORDS, ValidityConfig

ENV_CONFIG = "CMR_CONFIG"
ENV_PORT = "CMR_PORT"
DEFAULT_PORT = 8080


@dataclass(frozen=True)
class FusionSettings:
    strategy: str = "concat"          # concat | bilinear | attention
    dropout_p: float = 0.5
    attention_heads: int = 4
    projection_hidden: int = 512

    def __post_init__(self):
        if self.strategy not in ("concat", "bilinear", "attention"):
            raise ValueError(f"unknown fusion strategy {self.strategy!r}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")


@dataclass(frozen=True)
class LossSettings:
    kind: str = "cosine"              # cosine | soft_ce | infonce
    tau: float = 0.5

    def __post_init__(self):
        if self.kind not in ("cosine", "soft_ce", "infonce"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class TrainSettings:
    batch_size: int = 6
    lr_start: float = 1e-5
    lr_end: float = 1e-6
    epochs: int = 50
    weight_decay: float = 1e-2
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.lr_end < self.lr_start:
            raise ValueError("lr_end must be below lr_start")


@dataclass(frozen=True)
class EmbedSettings:
    dim: int = 512
    text_buckets: int = 4096
    text_bucket_dim: int = 128
    hidden: int = 256
    video_height: int = 32
    video_width: int = 48
    video_patch: int = 4
    init_seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("embedding dim must be >= 2")
        if self.video_height % self.video_patch or self.video_width % self.video_patch:
            raise ValueError("video dims must be divisible by the patch size")


@dataclass(frozen=True)
class VocabSettings:
    threshold: float = 0.2
    excluded_words: Tuple[str, ...] = tuple(sorted(DEFAULT_EXCLUDED_WORDS))
    prototypes_per_family: int = 16
    seed: int = 7


@dataclass(frozen=True)
class ServiceSettings:
    port: int = DEFAULT_PORT
    max_top_n: int = 1000
    default_top_n: int = 10


@dataclass(frozen=True)
class DataSettings:
    image_width: int = 192
    image_height: int = 160


@dataclass(frozen=True)
class PathSettings:
    workdir: str = "workspace"

    def resolve(self, name: str) -> Path:
        return Path(self.workdir) / name


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    data: DataSettings = field(default_factory=DataSettings)
    validity: ValidityConfig = field(default_factory=ValidityConfig)
    lowess: LowessConfig = field(default_factory=LowessConfig)
    vocab: VocabSettings = field(default_factory=VocabSettings)
    regions: RegionConfig = field(default_factory=RegionConfig)
    ground_vocab: frozenset = DEFAULT_GROUND_VOCABULARY
    person_classes: frozenset = DEFAULT_PERSON_CLASSES
    synonyms: SynonymTable = field(default_factory=SynonymTable)
    fusion: FusionSettings = field(default_factory=FusionSettings)
    loss: LossSettings = field(default_factory=LossSettings)
    train: TrainSettings = field(default_factory=TrainSettings)
    embed: EmbedSettings = field(default_factory=EmbedSettings)
    service: ServiceSettings = field(default_factory=ServiceSettings)
    paths: PathSettings = field(default_factory=PathSettings)


def _section(cls, raw: Optional[dict]):
    return cls(**raw) if raw else cls()


def config_from_dict(raw: dict) -> PipelineConfig:
    syn_raw = raw.get("synonyms") or {}
    synonyms = SynonymTable(
        person_synonyms=tuple(syn_raw.get("person", SynonymTable().person_synonyms)),
        word_synonyms={
            k: tuple(v) for k, v in (syn_raw.get("words") or DEFAULT_WORD_SYNONYMS).items()
        },
        gerunds=dict(syn_raw.get("gerunds") or DEFAULT_GERUNDS),
    )
    vocab_raw = dict(raw.get("motion_vocab") or {})
    if "excluded_words" in vocab_raw:
        vocab_raw["excluded_words"] = tuple(vocab_raw["excluded_words"])
    return PipelineConfig(
        seed=int(raw.get("seed", 0)),
        data=_section(DataSettings, raw.get("data")),
        validity=_section(ValidityConfig, raw.get("validity")),
        lowess=_section(LowessConfig, raw.get("lowess")),
        vocab=_section(VocabSettings, vocab_raw),
        regions=_section(RegionConfig, raw.get("regions")),
        ground_vocab=frozenset(raw.get("ground_vocab") or DEFAULT_GROUND_VOCABULARY),
        person_classes=frozenset(raw.get("person_classes") or DEFAULT_PERSON_CLASSES),
        synonyms=synonyms,
        fusion=_section(FusionSettings, raw.get("fusion")),
        loss=_section(LossSettings, raw.get("loss")),
        train=_section(TrainSettings, raw.get("train")),
        embed=_section(EmbedSettings, raw.get("embed")),
        service=_section(ServiceSettings, raw.get("service")),
        paths=_section(PathSettings, raw.get("paths")),
    )


def load_config(path: Optional[str] = None) -> PipelineConfig:
    """Load the pipeline config from a YAML file.

    Resolution order: explicit path, then the CMR_CONFIG env var, then
    built-in defaults.
    """
    path = path or os.environ.get(ENV_CONFIG)
    if path is None:
        return PipelineConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return config_from_dict(raw)
