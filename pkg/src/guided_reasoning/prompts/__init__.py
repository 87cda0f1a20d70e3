"""Versioned plain-text prompt templates.

Templates live as UTF-8 assets next to this module so they stay diffable and
swappable without code changes. Placeholders use `{name}` syntax; literal
braces in a template are doubled. Values are substituted verbatim and never
re-scanned, so claim text containing braces or quotes is safe.
"""

from __future__ import annotations

from importlib import resources


class MissingPlaceholder(KeyError):
    pass


class _Strict(dict):
    def __missing__(self, key):
        raise MissingPlaceholder(key)


def template_text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")


def render(name: str, **values) -> str:
    return template_text(name).format_map(_Strict(values)).strip()


def template_names() -> list[str]:
    return sorted(
        entry.name[:-4]
        for entry in resources.files(__package__).iterdir()
        if entry.name.endswith(".txt")
    )
