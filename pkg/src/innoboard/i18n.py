"""Locale catalogs with fallback lookup.

Locale is a per-session rendering concern: catalogs translate region
labels and UI strings, while the replicated document carries only keys and
user text. Lookup never fails; the worst case returns the key itself.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

FALLBACK_LOCALE = "en"


class Catalogs:
    def __init__(self, catalogs: dict[str, dict[str, str]]) -> None:
        self.catalogs = catalogs

    @classmethod
    def load_dir(cls, directory: Path) -> "Catalogs":
        catalogs = {}
        for path in sorted(Path(directory).glob("*.json")):
            catalogs[path.stem] = json.loads(path.read_text(encoding="utf-8"))
        return cls(catalogs)

    @classmethod
    def load_builtin(cls) -> "Catalogs":
        catalogs = {}
        base = resources.files(__package__) / "locales"
        for entry in base.iterdir():
            if entry.name.endswith(".json"):
                catalogs[entry.name[:-5]] = json.loads(
                    entry.read_text(encoding="utf-8")
                )
        return cls(catalogs)

    def locales(self) -> list[str]:
        return sorted(self.catalogs)

    def localize(self, key: str, locale: str) -> str:
        """Exact locale, then its language tag, then en, then the key."""
        for tag in (locale, locale.split("-")[0], FALLBACK_LOCALE):
            value = self.catalogs.get(tag, {}).get(key)
            if value is not None:
                return value
        return key

    def missing_keys(self, locale: str) -> list[str]:
        """Keys the complete catalog has but this locale lacks."""
        reference = self.catalogs.get(FALLBACK_LOCALE, {})
        have = self.catalogs.get(locale, {})
        return sorted(k for k in reference if k not in have)

    def raw(self, locale: str) -> dict[str, str]:
        return dict(self.catalogs.get(locale, {}))

    def merged(self, locale: str) -> dict[str, str]:
        """Catalog with fallbacks already applied, ready for a client."""
        out = dict(self.catalogs.get(FALLBACK_LOCALE, {}))
        out.update(self.catalogs.get(locale.split("-")[0], {}))
        out.update(self.catalogs.get(locale, {}))
        return out


_builtin: Catalogs | None = None


def builtin_catalogs() -> Catalogs:
    global _builtin
    if _builtin is None:
        _builtin = Catalogs.load_builtin()
    return _builtin


def localize(key: str, locale: str) -> str:
    return builtin_catalogs().localize(key, locale)


def missing_keys(locale: str) -> list[str]:
    return builtin_catalogs().missing_keys(locale)
