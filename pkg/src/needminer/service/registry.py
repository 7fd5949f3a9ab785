"""Named, versioned model files with an active-version pointer per role.

registry.json lives next to the model files it points at:

    {
      "need": {"active": "v1", "versions": {"v1": "need_v1.json"}},
      "categories": {"active": "v1",
                     "versions": {"v1": {"price": "cat_price_v1.json", ...}}}
    }
"""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import ServiceError
from ..learners import TrainedModel, load_model

ROLE_NEED = "need"
ROLE_CATEGORIES = "categories"


class ModelRegistry:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.root = self.path.parent
        if self.path.exists():
            try:
                self._data = json.loads(self.path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ServiceError(f"corrupt registry file {self.path}: {exc}") from exc
        else:
            self._data = {}

    def _save(self):
        self.root.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self._data, indent=2), encoding="utf-8")

    def _locate(self, model_path: str | Path) -> str:
        """Store paths relative to the registry when possible so the whole
        model directory stays relocatable; absolute otherwise."""
        path = Path(model_path)
        try:
            return str(path.resolve().relative_to(self.root.resolve()))
        except ValueError:
            return str(path.resolve())

    # -- registration ---------------------------------------------------------

    def register_need(self, version: str, model_path: str | Path, activate: bool = True):
        role = self._data.setdefault(ROLE_NEED, {"active": None, "versions": {}})
        role["versions"][version] = self._locate(model_path)
        if activate:
            role["active"] = version
        self._save()

    def register_categories(
        self, version: str, model_paths: dict[str, str | Path], activate: bool = True
    ):
        role = self._data.setdefault(ROLE_CATEGORIES, {"active": None, "versions": {}})
        role["versions"][version] = {
            cat: self._locate(p) for cat, p in model_paths.items()
        }
        if activate:
            role["active"] = version
        self._save()

    def activate(self, role: str, version: str):
        if role not in self._data or version not in self._data[role]["versions"]:
            raise ServiceError(f"cannot activate unknown {role} version {version!r}")
        self._data[role]["active"] = version
        self._save()

    # -- resolution -------------------------------------------------------------

    def active_versions(self) -> dict[str, str | None]:
        return {
            role: self._data.get(role, {}).get("active") for role in (ROLE_NEED, ROLE_CATEGORIES)
        }

    def describe(self) -> dict:
        return json.loads(json.dumps(self._data))

    def has_need_model(self) -> bool:
        return bool(self._data.get(ROLE_NEED, {}).get("active"))

    def load_need(self) -> tuple[str, TrainedModel]:
        role = self._data.get(ROLE_NEED) or {}
        version = role.get("active")
        if not version:
            raise ServiceError("no active need model registered")
        rel = role["versions"].get(version)
        if rel is None:
            raise ServiceError(f"active need version {version!r} has no model file")
        return version, load_model(self.root / rel)

    def load_categories(self) -> tuple[str | None, dict[str, TrainedModel]]:
        role = self._data.get(ROLE_CATEGORIES) or {}
        version = role.get("active")
        if not version:
            return None, {}
        paths = role["versions"].get(version)
        if paths is None:
            raise ServiceError(f"active categories version {version!r} has no model files")
        return version, {cat: load_model(self.root / rel) for cat, rel in paths.items()}
