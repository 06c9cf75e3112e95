"""Loading of the versioned lexicon data files.

All lexicons use one line-oriented format: ``surface-form<TAB>canonical-label``.
Lines starting with ``#`` and blank lines are ignored.  Surface forms are
matched on lowercased token sequences, longest match first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9'\-]*|[^\sa-z0-9]", re.IGNORECASE)


def tokenize(text: str) -> list[str]:
    """Split text into word and punctuation tokens, preserving case."""
    return TOKEN_RE.findall(text)


def _parse_tsv(text: str) -> dict[tuple[str, ...], str]:
    table: dict[tuple[str, ...], str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        surface, _, label = line.partition("\t")
        if not label:
            raise ValueError(f"malformed lexicon line (missing tab): {raw!r}")
        key = tuple(tok.lower() for tok in tokenize(surface))
        table[key] = label.strip()
    return table


@dataclass
class Lexicon:
    """Token-sequence tables for the four entity kinds plus inline signals."""

    attitudes: dict[tuple[str, ...], str]
    actions: dict[tuple[str, ...], str]
    objects: dict[tuple[str, ...], str]
    conditions: dict[tuple[str, ...], str]
    grant_signals: tuple[str, ...]
    #: first-token index over all tables, longest phrases first
    _index: dict[str, list[tuple[tuple[str, ...], str, str]]] = field(
        default_factory=dict, repr=False
    )

    KINDS = ("condition", "attitude", "action", "object")

    def __post_init__(self) -> None:
        merged: list[tuple[tuple[str, ...], str, str]] = []
        for kind, table in (
            ("condition", self.conditions),
            ("attitude", self.attitudes),
            ("action", self.actions),
            ("object", self.objects),
        ):
            merged.extend((phrase, kind, label) for phrase, label in table.items())
        # longer phrase wins; on equal length the KINDS order above wins
        priority = {kind: i for i, kind in enumerate(self.KINDS)}
        merged.sort(key=lambda item: (-len(item[0]), priority[item[1]]))
        index: dict[str, list[tuple[tuple[str, ...], str, str]]] = {}
        for phrase, kind, label in merged:
            index.setdefault(phrase[0], []).append((phrase, kind, label))
        self._index = index

    def match_at(
        self, tokens: list[str], position: int
    ) -> Optional[tuple[int, str, str]]:
        """Longest lexicon match starting at ``position``.

        Returns (length, kind, label) or None.  ``tokens`` must be lowercased.
        """
        candidates = self._index.get(tokens[position])
        if not candidates:
            return None
        for phrase, kind, label in candidates:
            end = position + len(phrase)
            if end <= len(tokens) and tuple(tokens[position:end]) == phrase:
                return (len(phrase), kind, label)
        return None


def _read_data_text(name: str, override_dir: Optional[Path]) -> str:
    if override_dir is not None:
        candidate = override_dir / name
        if candidate.exists():
            return candidate.read_text(encoding="utf-8")
    return (resources.files("licentia.data") / "lexicon" / name).read_text(
        encoding="utf-8"
    )


def _parse_signals(text: str) -> tuple[str, ...]:
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line.lower())
    return tuple(lines)


def load_lexicon(override_dir: Optional[Path] = None) -> Lexicon:
    """Load the bundled lexicons, optionally shadowed by files in a directory."""
    return Lexicon(
        attitudes=_parse_tsv(_read_data_text("attitudes.tsv", override_dir)),
        actions=_parse_tsv(_read_data_text("actions.tsv", override_dir)),
        objects=_parse_tsv(_read_data_text("objects.tsv", override_dir)),
        conditions=_parse_tsv(_read_data_text("conditions.tsv", override_dir)),
        grant_signals=_parse_signals(
            _read_data_text("grant_signals.txt", override_dir)
        ),
    )


def grant_signal_in(text: str, signals: Iterable[str]) -> bool:
    lowered = " ".join(text.lower().split())
    return any(sig in lowered for sig in signals)
