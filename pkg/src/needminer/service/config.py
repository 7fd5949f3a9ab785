"""Flat key-value service configuration.

Example file::

    store_path = ./store
    registry_path = ./models/registry.json
    source_kind = file_replay
    source_location = ./incoming.jsonl
    keywords = elektroauto, ladesaeule, e-mobility
    poll_interval = 60
    bind = 127.0.0.1:8080
    threshold = 0.5
    sentiment_lexicon = ./lexicons/sentiment.tsv
    name_lexicon = ./lexicons/names.tsv
    lexical_resource = ./lexicons/toy_lexicon.txt

The NEEDMINER_CONFIG environment variable, when set, overrides whatever
config path was passed on the command line.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from .sources import SourceSpec

ENV_VAR = "NEEDMINER_CONFIG"


@dataclass
class ServiceConfig:
    store_path: Path = Path("./store")
    registry_path: Path = Path("./models/registry.json")
    source_kind: str = "file_replay"
    source_location: str = ""
    keywords: tuple[str, ...] = ()
    poll_interval: int = 60
    bind: str = "127.0.0.1:8080"
    threshold: float = 0.5
    sentiment_lexicon: Path | None = None
    name_lexicon: Path | None = None
    lexical_resource: Path | None = None

    def source_spec(self) -> SourceSpec:
        if not self.source_location:
            raise ConfigError("config is missing source_location")
        return SourceSpec(self.source_kind, self.source_location, self.keywords, self.poll_interval)

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.bind.rsplit(":", 1)[1])
        except (IndexError, ValueError):
            raise ConfigError(f"bind address {self.bind!r} must look like host:port") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values: dict[str, str] = {}
        for line_no, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()

        cfg = cls()
        base = path.parent

        def resolve(p: str) -> Path:
            candidate = Path(p)
            return candidate if candidate.is_absolute() else base / candidate

        for key, value in values.items():
            if key == "store_path":
                cfg.store_path = resolve(value)
            elif key == "registry_path":
                cfg.registry_path = resolve(value)
            elif key == "source_kind":
                cfg.source_kind = value
            elif key == "source_location":
                cfg.source_location = (
                    value if value.startswith(("http://", "https://")) else str(resolve(value))
                )
            elif key == "keywords":
                cfg.keywords = tuple(kw.strip() for kw in value.split(",") if kw.strip())
            elif key == "poll_interval":
                cfg.poll_interval = int(value)
            elif key == "bind":
                cfg.bind = value
            elif key == "threshold":
                cfg.threshold = float(value)
            elif key == "sentiment_lexicon":
                cfg.sentiment_lexicon = resolve(value)
            elif key == "name_lexicon":
                cfg.name_lexicon = resolve(value)
            elif key == "lexical_resource":
                cfg.lexical_resource = resolve(value)
            else:
                raise ConfigError(f"{path}: unknown config key {key!r}")
        if not 0 <= cfg.threshold <= 1:
            raise ConfigError("threshold must be within [0, 1]")
        return cfg


def resolve_config_path(cli_path: str | None) -> Path:
    """NEEDMINER_CONFIG wins over the command-line path."""
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    if cli_path:
        return Path(cli_path)
    raise ConfigError(f"no config given: pass --config or set {ENV_VAR}")
