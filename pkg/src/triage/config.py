"""Pipeline configuration: one TOML or JSON file, flag overrides, and a stable hash."""

from __future__ import annotations

import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from triage.corpus import DEFAULT_SPAM_THRESHOLD
from triage.errors import ConfigError
from triage.learner import FeatureConfig
from triage.matchfilter import MATCH_MODES
from triage.sentiment import SentimentConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_VAR = "TRIAGE_CONFIG"


@dataclass
class Paths:
    corpus: str | None = None
    manifest: str | None = None
    geometry: str | None = None
    ledger: str | None = None  # defaults to <out>/hashtag_ledger.csv
    training: list[str] = field(default_factory=list)
    sentiment_train: str | None = None
    sentiment_test: str | None = None


@dataclass
class PipelineConfig:
    paths: Paths = field(default_factory=Paths)
    out_dir: str = "triage_out"
    seed: int = 0
    spam_threshold: int = DEFAULT_SPAM_THRESHOLD
    keyword_match: str = "substring"
    split_ratio: float = 0.5
    sample_k: int = 5
    features: FeatureConfig = field(default_factory=FeatureConfig)
    sentiment: SentimentConfig = field(default_factory=SentimentConfig)
    # directory that relative paths are resolved against; not part of the hash
    base_dir: str = "."

    def __post_init__(self) -> None:
        if self.keyword_match not in MATCH_MODES:
            raise ConfigError(f"keyword_match must be one of {MATCH_MODES}, got {self.keyword_match!r}")
        if self.spam_threshold < 1:
            raise ConfigError("spam_threshold must be at least 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError("split_ratio must lie in (0, 1)")

    def resolve(self, p: str | None) -> Path | None:
        if p is None:
            return None
        path = Path(p).expanduser()
        return path if path.is_absolute() else Path(self.base_dir) / path

    @property
    def out(self) -> Path:
        return self.resolve(self.out_dir)

    def path(self, key: str) -> Path | None:
        return self.resolve(getattr(self.paths, key))

    def require(self, key: str) -> Path:
        p = self.path(key)
        if p is None:
            raise ConfigError(f"config is missing paths.{key}")
        if not p.exists():
            raise ConfigError(f"paths.{key} does not exist: {p}")
        return p

    def training_paths(self) -> list[Path]:
        out = [self.resolve(p) for p in self.paths.training]
        if not out:
            raise ConfigError("config is missing paths.training")
        for p in out:
            if not p.exists():
                raise ConfigError(f"training file does not exist: {p}")
        return out

    def ledger_path(self) -> Path:
        return self.path("ledger") or self.out / "hashtag_ledger.csv"

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def hash(self) -> str:
        """sha256 over canonical JSON of everything that can change results (output dir excluded)."""
        d = self.to_dict()
        d.pop("out_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _build(cls, data: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc


def config_from_dict(data: dict, base_dir: str | Path = ".") -> PipelineConfig:
    data = dict(data)
    paths = dict(data.pop("paths", {}) or {})
    if isinstance(paths.get("training"), str):
        paths["training"] = [paths["training"]]
    features = data.pop("features", {}) or {}
    sentiment = data.pop("sentiment", {}) or {}
    cfg = _build(
        PipelineConfig,
        {
            **data,
            "paths": _build(Paths, paths, "[paths]"),
            "features": _build(FeatureConfig, features, "[features]"),
            "sentiment": _build(SentimentConfig, sentiment, "[sentiment]"),
            "base_dir": str(base_dir),
        },
        "config",
    )
    return cfg


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read the config named by ``path``, else by $TRIAGE_CONFIG, else use defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    return config_from_dict(data, base_dir=path.resolve().parent)


def write_config(cfg: PipelineConfig, path: str | Path) -> None:
    """JSON form of ``cfg`` (relative paths stay relative to ``path``'s directory)."""
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
