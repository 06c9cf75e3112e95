"""Core regulation model: attitudes, action categories, and term matrices.

A license is interpreted into a set of regulations.  Each regulation states an
attitude (CAN / CANNOT / MUST) towards one action category applied to one
object qualifier, optionally guarded by a condition.  Grouping regulations by
(action, object) yields a term matrix, the unit that every later stage
(compatibility checking, constraint resolution, recommendation) operates on.

Two orderings over attitudes coexist and must not be conflated:

* restrictiveness: CAN(1) < MUST(2) < CANNOT(3), with an absent group treated
  as CAN.  Used to pick "the most restrictive" attitude and for the numeric
  encoding of a matrix.
* compliance: attitude ``a`` complies with attitude ``b`` when every behavior
  permitted by ``a`` (performing the action, or abstaining) is permitted by
  ``b``.  MUST and CANNOT are mutually exclusive under this relation even
  though they are comparable under restrictiveness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Optional

from .errors import CorpusError

GroupKey = tuple[str, str]  # (action category, object qualifier)

DEFAULT_OBJECT = "work"

# Closed object vocabulary; unknown qualifiers pass through unvalidated.
CANONICAL_OBJECTS = (
    "work",
    "source code",
    "binaries",
    "documentation",
    "trademark",
    "patent",
)


class Attitude(Enum):
    CAN = "CAN"
    CANNOT = "CANNOT"
    MUST = "MUST"

    def __repr__(self) -> str:  # keeps pytest diffs short
        return self.value


_RESTRICTIVENESS = {Attitude.CAN: 1, Attitude.MUST: 2, Attitude.CANNOT: 3}

# Behaviors a licensee may choose under each attitude: do the action / abstain.
_ALLOWED_BEHAVIORS = {
    Attitude.CAN: frozenset({"do", "abstain"}),
    Attitude.MUST: frozenset({"do"}),
    Attitude.CANNOT: frozenset({"abstain"}),
}


def restrictiveness(attitude: Optional[Attitude]) -> int:
    """Rank on the CAN < MUST < CANNOT scale; absent counts as CAN."""
    if attitude is None:
        return _RESTRICTIVENESS[Attitude.CAN]
    return _RESTRICTIVENESS[attitude]


def encoding_value(attitude: Optional[Attitude]) -> int:
    """Vector encoding: absent=0, CAN=1, MUST=2, CANNOT=3."""
    if attitude is None:
        return 0
    return _RESTRICTIVENESS[attitude]


def most_restrictive(attitudes: Iterable[Attitude]) -> Attitude:
    return max(attitudes, key=_RESTRICTIVENESS.__getitem__)


def complies_with(inner: Attitude, outer: Attitude) -> bool:
    """True when every behavior permitted by ``inner`` is permitted by ``outer``.

    This is the compatibility relation: a license edge parent->child is
    conflict-free exactly when ``complies_with(parent_attitude, child_attitude)``.
    """
    return _ALLOWED_BEHAVIORS[inner] <= _ALLOWED_BEHAVIORS[outer]


def _load_action_categories() -> tuple[str, ...]:
    text = (
        resources.files("licentia.data") / "action_categories.txt"
    ).read_text(encoding="utf-8")
    cats = tuple(line.strip() for line in text.splitlines() if line.strip())
    if len(cats) != len(set(cats)):
        raise CorpusError("duplicate entries in action_categories.txt")
    return cats


#: The canonical action categories, in vector-encoding order.
ACTION_CATEGORIES: tuple[str, ...] = _load_action_categories()
_ACTION_INDEX = {name: i for i, name in enumerate(ACTION_CATEGORIES)}


@dataclass(frozen=True)
class Regulation:
    """One normalized license statement."""

    action: str
    object: str
    attitude: Attitude
    condition: Optional[str] = None
    provenance: int = 0  # index of the originating sentence

    def __post_init__(self) -> None:
        if self.action not in _ACTION_INDEX:
            raise ValueError(f"unknown action category: {self.action!r}")

    @property
    def group(self) -> GroupKey:
        return (self.action, self.object)


#: One (attitude, optional condition) entry inside a matrix group.
AttEntry = tuple[Attitude, Optional[str]]


def _entry_sort_key(entry: AttEntry) -> tuple[int, int, str]:
    attitude, condition = entry
    return (_RESTRICTIVENESS[attitude], 0 if condition is None else 1, condition or "")


@dataclass
class TermMatrix:
    """All regulations interpreted from one license, grouped by (action, object)."""

    license_id: str
    groups: dict[GroupKey, frozenset[AttEntry]] = field(default_factory=dict)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def from_regulations(
        cls,
        license_id: str,
        regulations: Iterable[Regulation],
        warnings: Iterable[str] = (),
    ) -> "TermMatrix":
        grouped: dict[GroupKey, set[AttEntry]] = {}
        for reg in regulations:
            grouped.setdefault(reg.group, set()).add((reg.attitude, reg.condition))
        return cls(
            license_id=license_id,
            groups={key: frozenset(entries) for key, entries in grouped.items()},
            warnings=tuple(warnings),
        )

    def effective(self, group: GroupKey, condition_true: bool) -> Optional[Attitude]:
        """Attitude in force for ``group`` in one condition branch.

        In the condition-false branch only unconditional entries apply.  None
        means the group is absent in that branch (defaults to CAN upstream).
        """
        entries = self.groups.get(group, frozenset())
        applicable = [
            att for att, cond in entries if condition_true or cond is None
        ]
        if not applicable:
            return None
        return most_restrictive(applicable)

    def representative(self, group: GroupKey) -> Optional[AttEntry]:
        """The entry that stands for a group when a single attitude is needed.

        Unconditional entries dominate: an unconditional CAN outranks a
        conditional CANNOT, because requirements derived from the group must
        hold in the condition-false world too.  Among equals, most
        restrictive wins.
        """
        entries = self.groups.get(group)
        if not entries:
            return None
        unconditional = [e for e in entries if e[1] is None]
        pool = unconditional or list(entries)
        return max(pool, key=lambda e: (_RESTRICTIVENESS[e[0]], e[1] or ""))

    def encoding(self) -> tuple[int, ...]:
        """23-component attitude vector over the canonical action categories."""
        values = [0] * len(ACTION_CATEGORIES)
        for (action, _obj), entries in self.groups.items():
            att = most_restrictive([a for a, _c in entries])
            idx = _ACTION_INDEX[action]
            values[idx] = max(values[idx], encoding_value(att))
        return tuple(values)

    def sorted_groups(self) -> list[tuple[GroupKey, list[AttEntry]]]:
        return [
            (key, sorted(self.groups[key], key=_entry_sort_key))
            for key in sorted(self.groups)
        ]

    def to_payload(self) -> dict:
        """Corpus serialization: {"Action|object": [{"attitude", "condition"?}]}."""
        payload = {}
        for (action, obj), entries in self.sorted_groups():
            items = []
            for attitude, condition in entries:
                item: dict = {"attitude": attitude.value}
                if condition is not None:
                    item["condition"] = condition
                items.append(item)
            payload[f"{action}|{obj}"] = items
        return payload

    @classmethod
    def from_payload(cls, license_id: str, payload: dict) -> "TermMatrix":
        groups: dict[GroupKey, frozenset[AttEntry]] = {}
        for key, items in payload.items():
            action, _, obj = key.partition("|")
            if action not in _ACTION_INDEX:
                raise CorpusError(
                    f"license {license_id!r}: unknown action category {action!r}"
                )
            if not obj:
                raise CorpusError(f"license {license_id!r}: malformed group key {key!r}")
            entries = set()
            for item in items:
                try:
                    attitude = Attitude(item["attitude"])
                except (KeyError, ValueError):
                    raise CorpusError(
                        f"license {license_id!r}: bad attitude in group {key!r}"
                    ) from None
                entries.add((attitude, item.get("condition")))
            if not entries:
                raise CorpusError(f"license {license_id!r}: empty group {key!r}")
            groups[(action, obj)] = frozenset(entries)
        return cls(license_id=license_id, groups=groups)


def cosine_similarity(u: Iterable[int], v: Iterable[int]) -> float:
    u = list(u)
    v = list(v)
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)
