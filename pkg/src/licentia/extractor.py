"""Rule-based interpretation of license text into a term matrix.

The pipeline mirrors an information-extraction stack: sentence segmentation,
entity extraction (action / object / attitude / condition spans via
longest-match over the bundled lexicons), relation extraction (nearest-
neighbour linking inside clause boundaries), and normalization into
regulations grouped as a :class:`~licentia.model.TermMatrix`.

The extractor is deliberately pluggable: anything implementing
:class:`TermExtractor` (an object with ``interpret(text, license_id)``)
can replace :class:`RuleBasedExtractor`, e.g. a learned sequence-labelling
backend producing the same entity/relation schema.

Linking rules worth knowing when reading the code:

* Attitude scope is positional.  A modal attitude ("may", "must") governs the
  actions after it up to the next attitude or segment boundary; a predicate
  attitude ("are permitted", "is hereby granted") additionally reaches back to
  the subject actions before it when nothing follows it.
* Actions in passive voice ("shall be included") take their objects from the
  coordinated noun group before them; active actions take the nearest object
  group after them.  Verbs that can carry notices (include, retain, give, ...)
  prefer notice-like objects, which also refine the action category
  (include + "copyright notice" -> IncludeCopyright).
* A condition marker opens a clause that runs to the next comma, colon or
  sentence end; the marker links back to the actions it guards, or forward
  when the sentence leads with the condition.  Obligations spelled out inside
  grant conditions ("provided that the above copyright notice ... appear in
  all copies") become unconditional MUST regulations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Protocol, Sequence

from .errors import LicentiaError
from .lexicon import Lexicon, load_lexicon, tokenize
from .model import (
    DEFAULT_OBJECT,
    Attitude,
    Regulation,
    TermMatrix,
)


class AttitudeError(LicentiaError):
    """An attitude phrase could not be classified."""


class EntityKind(Enum):
    ACTION = "action"
    OBJECT = "object"
    ATTITUDE = "attitude"
    CONDITION = "condition"


@dataclass(frozen=True)
class Entity:
    kind: EntityKind
    text: str
    sentence_index: int
    token_span: tuple[int, int]
    label: str = ""
    # noun-form actions ("Redistributions of...") only act as subjects of
    # predicate attitudes; they never pick up a modal that governs another verb
    subject_only: bool = False

    @property
    def start(self) -> int:
        return self.token_span[0]

    @property
    def end(self) -> int:
        return self.token_span[1]


class RelationLabel(Enum):
    ACTION_OBJECT = "action-object"
    ACTION_ATTITUDE = "action-attitude"
    ACTION_CONDITION = "action-condition"
    CONDITION_ACTION = "condition-action"
    OTHER = "other"


@dataclass(frozen=True)
class EntityRelation:
    head: Entity
    tail: Entity
    label: RelationLabel


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[str, ...]

    @property
    def lower(self) -> tuple[str, ...]:
        return tuple(t.lower() for t in self.tokens)


class TermExtractor(Protocol):
    def interpret(self, text: str, license_id: str) -> TermMatrix: ...


# ---------------------------------------------------------------------------
# preprocessing

_COMMENT_PREFIX_RE = re.compile(r"^\s*(#+|//+|/\*+|\*+/?|;;+|--+\s|rem\s)\s?", re.IGNORECASE)
_BULLET_RE = re.compile(r"^\s*(?:[-*+•]|\(?[0-9ivx]{1,3}[.)]|\(?[a-z][.)])\s+")
_SEPARATOR_RE = re.compile(r"^[\s=~_\-#*+|]+$")
_BOX_CHARS_RE = re.compile(r"[=~_|•·]{2,}|[─-╿]+")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+(?=[\"'(]?[A-Z][a-z])")
_WORD_RE = re.compile(r"[A-Za-z]{2,}")

_TERMINALS = (".", "!", "?")
_MIN_HEADING_WORDS = 9  # blocks shorter than this with no terminal are headings


def _normalize_line(line: str) -> str:
    line = line.replace("``", '"').replace("''", '"')
    line = _COMMENT_PREFIX_RE.sub("", line.rstrip())
    if _SEPARATOR_RE.match(line):
        return ""
    line = _BULLET_RE.sub("", line)
    line = _BOX_CHARS_RE.sub(" ", line)
    return line.strip()


_TERMS_START_RE = re.compile(
    r"^\s*TERMS AND CONDITIONS(?: FOR [A-Z,' ]+)?\s*$", re.MULTILINE
)
_TERMS_END_RE = re.compile(r"^\s*END OF TERMS AND CONDITIONS\s*$", re.MULTILINE)


def preprocess(text: str) -> list[Sentence]:
    """Split license text into sentences, stripping markup and headings.

    GNU-style texts are narrowed to the operative block between the
    "TERMS AND CONDITIONS" markers (preamble and the how-to-apply appendix
    carry no regulations).  Blocks separated by blank lines are segmented
    independently; a block with no terminal punctuation and only a few words
    (title lines, copyright headers, separators) is dropped.
    """
    start = _TERMS_START_RE.search(text)
    if start:
        end = _TERMS_END_RE.search(text, start.end())
        text = text[start.end() : end.start() if end else len(text)]
    blocks: list[str] = []
    current: list[str] = []
    for raw_line in text.splitlines():
        line = _normalize_line(raw_line)
        if line:
            current.append(line)
        elif current:
            blocks.append(" ".join(current))
            current = []
    if current:
        blocks.append(" ".join(current))

    sentences: list[Sentence] = []
    for block in blocks:
        has_terminal = any(t in block for t in _TERMINALS)
        if not has_terminal and len(_WORD_RE.findall(block)) < _MIN_HEADING_WORDS:
            continue
        for chunk in _SENTENCE_SPLIT_RE.split(block):
            chunk = chunk.strip()
            if not chunk or not _WORD_RE.search(chunk):
                continue
            tokens = tuple(tokenize(chunk))
            sentences.append(Sentence(index=len(sentences), text=chunk, tokens=tokens))
    return sentences


# ---------------------------------------------------------------------------
# entity extraction

def _scan_entities(
    sentence: Sentence, lexicon: Lexicon
) -> list[tuple[EntityKind, tuple[int, int], str]]:
    lower = list(sentence.lower)
    found: list[tuple[EntityKind, tuple[int, int], str]] = []
    i = 0
    while i < len(lower):
        match = lexicon.match_at(lower, i)
        if match is None:
            i += 1
            continue
        length, kind, label = match
        if label != "IGNORE":
            found.append((EntityKind(kind), (i, i + length), label))
        i += length
    return found


def extract_entities(sentence: Sentence, lexicon: Optional[Lexicon] = None) -> list[Entity]:
    """Longest-match entity spans; spans never overlap by construction."""
    lexicon = lexicon or _default_lexicon()
    lower = sentence.lower
    entities = []
    for kind, span, label in _scan_entities(sentence, lexicon):
        surface = " ".join(sentence.tokens[span[0] : span[1]])
        subject_only = label.startswith("~")
        # noun/verb disambiguation: "a (readable) copy" is an object, not the
        # verb "copy" from a grant list
        if (
            kind is EntityKind.ACTION
            and lower[span[0]] in ("copy", "copies")
            and span[0] > 0
            and lower[span[0] - 1] in _NOUN_MARKERS
        ):
            kind = EntityKind.OBJECT
            label = "work"
            subject_only = False
        entities.append(
            Entity(
                kind=kind,
                text=surface,
                sentence_index=sentence.index,
                token_span=span,
                label=label.lstrip("~"),
                subject_only=subject_only,
            )
        )
    return entities


# ---------------------------------------------------------------------------
# relation extraction

_SEGMENT_BREAKS = {";", ":"}
_EXCEPT_BREAKS = {"except", "excluding", "notwithstanding"}
_CLAUSE_ENDERS = {",", ":", ".", ")"}
# "unless" guards record a relation but no usable condition branch
_NON_BRANCHING_MARKERS: set[str] = set()
# markers whose clause states grant obligations ("provided that the copyright
# notice appear in all copies"); plain "if" clauses are mere hypotheticals
_OBLIGATION_MARKERS = {
    "provided that", "provide that", "providing that", "as long as",
    "so long as", "on condition that", "on the condition that",
}
_BE_FORMS = {"be", "been", "being", "is", "are", "was", "were"}
_PASSIVE_SKIP = {"hereby", "also", "not", "otherwise", "only"}
_NEGATION_TOKENS = {"not", "no", "never", "neither", "nor", "nothing"}
_NEGATION_WINDOW = 12
_COORD_FILLERS = {
    ",", "and", "or", "/", "&", "the", "this", "these", "those", "above",
    "following", "accompanying", "any", "all", "a", "an", "such", "its",
    "their", "other", "appropriate",
}
_PRONOUN_SUBJECTS = {"you", "your"}
_NOUN_MARKERS = {
    "a", "an", "the", "any", "each", "every", "one", "such", "readable",
    "verbatim", "exact", "complete", "single",
}

# verbs that may carry a notice-like object which refines the category;
# NOTICE_FIRST verbs prefer a notice object anywhere in reach ("retain, in the
# Source form ..., all copyright notices"), the others only refine when the
# notice is the nearest object ("give recipients a copy of this License")
_NOTICE_FIRST_VERBS = {
    "include", "includes", "included", "retain", "retains", "retained",
    "keep", "preserve", "reproduce", "reproduces", "reproduced",
    "reproducing", "appear", "appears", "show", "carry", "state",
}
_INCLUDE_CAPABLE = _NOTICE_FIRST_VERBS | {
    "give", "giving", "provide", "providing", "accompany", "publish",
    "distribute", "convey",
}

_CUE_CATEGORY = {
    "copyright-notice": "IncludeCopyright",
    "license": "IncludeLicense",
    "notice": "IncludeNotice",
    "original": "IncludeOriginal",
    "credit": "GiveCredit",
    "install-instructions": "IncludeInstallInstructions",
    "source": "DiscloseSource",
}
_NOTICE_CUES = (
    "copyright-notice", "license", "notice", "original", "credit",
    "install-instructions",
)

_QUALIFIER_BY_LABEL = {
    "work": "work",
    "source": "source code",
    "binaries": "binaries",
    "documentation": "documentation",
    "trademark": "trademark",
    "patent": "patent",
}
# categories whose object is part of the action itself
_FIXED_QUALIFIER = {
    "HoldLiable": "work",
    "IncludeCopyright": "work",
    "IncludeLicense": "work",
    "IncludeNotice": "work",
    "IncludeOriginal": "work",
    "IncludeInstallInstructions": "work",
    "GiveCredit": "work",
    "UseTrademark": "work",
    "UsePatentClaims": "work",
    "StateChanges": "work",
    "PlaceWarranty": "work",
    "ContactAuthor": "work",
    "CompensateForDamages": "work",
    "PayAboveUseThreshold": "work",
    "Rename": "work",
    "Relicense": "work",
    "DiscloseSource": "source code",
}

_EXCEPT_LICENSE_RE = re.compile(
    r"except (?:as |in )?(?:expressly )?(?:provided|permitted|stated|compliance)"
    r"(?: for)?(?: in| under| by| with)? (?:this|the) license",
    re.IGNORECASE,
)
# definition sentences regulate terminology, not the licensee
_DEFINITION_RE = re.compile(
    r"shall mean|shall have the meaning|^for the purposes of this license"
    r"|^\(?\s*(?:it is understood|it may happen|such a contradiction)",
    re.IGNORECASE,
)
# restatements of exclusivity, not regulations of the work
_NOTHING_ELSE_RE = re.compile(
    r"nothing (?:else|in this license|herein) (?:grants|shall)", re.IGNORECASE
)


@dataclass
class _ConditionClause:
    marker: Entity
    content_span: tuple[int, int]  # tokens after the marker


@dataclass
class _Analysis:
    """Link structure of one sentence, shared by relations and regulations."""

    sentence: Sentence
    entities: list[Entity]
    clauses: list[_ConditionClause] = field(default_factory=list)
    attitude_of: dict[Entity, Entity] = field(default_factory=dict)
    objects_of: dict[Entity, list[Entity]] = field(default_factory=dict)
    condition_of: dict[Entity, Entity] = field(default_factory=dict)
    clause_actions: dict[Entity, list[Entity]] = field(default_factory=dict)


def _paren_depths(sentence: Sentence) -> list[int]:
    depths = []
    depth = 0
    for tok in sentence.lower:
        if tok == "(":
            depth += 1
        depths.append(depth)
        if tok == ")" and depth > 0:
            depth -= 1
    return depths


def _relative_spans(sentence: Sentence) -> list[tuple[int, int]]:
    """Relative clauses ("...anyone who distributes...", "...works that you
    convey...") reference acts without regulating them; entities inside take
    no part in attitude linking.  A clause runs to the next comma or break."""
    lower = sentence.lower
    spans = []
    for i, tok in enumerate(lower):
        start = None
        if tok in ("who", "whom"):
            start = i
        elif tok in _PRONOUN_SUBJECTS and i > 0 and lower[i - 1] in ("that", "which"):
            start = i - 1
        if start is None:
            continue
        end = len(lower)
        for j in range(i + 1, len(lower)):
            if lower[j] in (",", ";", ":", ".") :
                end = j
                break
        spans.append((start, end))
    return spans


def _in_spans(spans: Sequence[tuple[int, int]], position: int) -> bool:
    return any(lo <= position < hi for lo, hi in spans)


def _find_clauses(sentence: Sentence, entities: Sequence[Entity]) -> list[_ConditionClause]:
    lower = sentence.lower
    clauses = []
    for ent in entities:
        if ent.kind is not EntityKind.CONDITION:
            continue
        end = len(lower)
        # ";" continues a condition list ("provided that you A; B; and C")
        for j in range(ent.end, len(lower)):
            if lower[j] in _CLAUSE_ENDERS:
                end = j
                break
        clauses.append(_ConditionClause(marker=ent, content_span=(ent.end, end)))
    return clauses


def _clause_at(clauses: Sequence[_ConditionClause], position: int) -> Optional[_ConditionClause]:
    for clause in clauses:
        if clause.marker.start <= position < clause.content_span[1]:
            return clause
    return None


def _segment_bounds(sentence: Sentence, clauses: Sequence[_ConditionClause], position: int) -> tuple[int, int]:
    """Boundaries of the attitude segment containing ``position``.

    Segments break at ";", ":" and exception markers ("except", ...), the
    latter only outside parentheses so that asides like "(except as stated
    in this section)" do not cut a grant in half.
    """
    lower = sentence.lower
    depths = _paren_depths(sentence)

    def is_break(j: int) -> bool:
        if lower[j] in _SEGMENT_BREAKS:
            return True
        return lower[j] in _EXCEPT_BREAKS and depths[j] == 0

    clause = _clause_at(clauses, position)
    if clause is not None:
        return (clause.content_span[0], clause.content_span[1])
    start, end = 0, len(lower)
    for j in range(position - 1, -1, -1):
        if is_break(j):
            start = j + 1
            break
        covering = _clause_at(clauses, j)
        if covering is not None:
            start = covering.content_span[1] + 1
            break
    for j in range(position, len(lower)):
        if is_break(j):
            end = j
            break
        covering = _clause_at(clauses, j)
        if covering is not None:
            end = covering.marker.start
            break
    return (start, end)


def _is_predicate_attitude(entity: Entity) -> bool:
    surface = entity.text.lower()
    return any(
        word in surface
        for word in ("granted", "permitted", "allowed", "prohibited",
                     "forbidden", "authorized", "welcome")
    )


_NEGATIVE_SCOPE_PREFIXES = ("in no event", "under no circumstances", "in no case")


def _negated(analysis: "_Analysis", attitude: Entity) -> bool:
    """Clause negation: a bare negation token shortly before the attitude, or
    a sentence-scope negative ("In no event ... shall X be liable")."""
    sentence, entities = analysis.sentence, analysis.entities
    lower = sentence.lower
    stop = max(0, attitude.start - _NEGATION_WINDOW)
    for prior in entities:
        if prior.end <= attitude.start:
            stop = max(stop, prior.end)
    if any(lower[j] in _NEGATION_TOKENS for j in range(stop, attitude.start)):
        return True
    for prior in entities:
        if (
            prior.kind is EntityKind.ATTITUDE
            and prior.start < attitude.start
            and prior.text.lower().startswith(_NEGATIVE_SCOPE_PREFIXES)
            and not any(
                lower[j] in _SEGMENT_BREAKS
                for j in range(prior.end, attitude.start)
            )
        ):
            return True
    return False


def _link_attitudes(analysis: _Analysis) -> None:
    sentence, entities = analysis.sentence, analysis.entities
    relative = _relative_spans(sentence)
    actions = [
        e
        for e in entities
        if e.kind is EntityKind.ACTION and not _in_spans(relative, e.start)
    ]
    attitudes = [
        e
        for e in entities
        if e.kind is EntityKind.ATTITUDE and not _in_spans(relative, e.start)
    ]
    for group_bounds in {(
        _segment_bounds(sentence, analysis.clauses, e.start)
    ) for e in actions + attitudes}:
        lo, hi = group_bounds
        seg_actions = [a for a in actions if lo <= a.start < hi]
        seg_attitudes = sorted(
            (a for a in attitudes if lo <= a.start < hi), key=lambda e: e.start
        )
        if not seg_attitudes:
            continue
        # forward zones: attitude governs actions up to the next attitude
        for idx, att in enumerate(seg_attitudes):
            zone_end = seg_attitudes[idx + 1].start if idx + 1 < len(seg_attitudes) else hi
            for act in seg_actions:
                if act.subject_only:
                    continue
                if att.end <= act.start < zone_end and act not in analysis.attitude_of:
                    analysis.attitude_of[act] = att
        # predicate attitudes reach back to their subject when nothing follows
        for idx, att in enumerate(seg_attitudes):
            zone_end = seg_attitudes[idx + 1].start if idx + 1 < len(seg_attitudes) else hi
            zone_has_action = any(
                att.end <= a.start < zone_end and not a.subject_only
                for a in seg_actions
            )
            if zone_has_action or not _is_predicate_attitude(att):
                continue
            prev_end = seg_attitudes[idx - 1].end if idx > 0 else lo
            for act in seg_actions:
                if prev_end <= act.start < att.start and act not in analysis.attitude_of:
                    analysis.attitude_of[act] = att


def _is_passive(sentence: Sentence, action: Entity) -> bool:
    lower = sentence.lower
    j = action.start - 1
    skipped = 0
    while j >= 0 and skipped < 3:
        tok = lower[j]
        if tok in _BE_FORMS:
            return True
        if tok in _PASSIVE_SKIP:
            j -= 1
            skipped += 1
            continue
        return False
    return False


def _coordination_group(
    analysis: _Analysis, anchor: Entity, objects: Sequence[Entity], forward: bool
) -> list[Entity]:
    """The anchor object plus coordinated neighbours joined by filler tokens."""
    lower = analysis.sentence.lower
    entity_tokens = set()
    for ent in analysis.entities:
        entity_tokens.update(range(ent.start, ent.end))

    def gap_ok(a: int, b: int) -> bool:
        return all(
            lower[j] in _COORD_FILLERS or j in entity_tokens for j in range(a, b)
        )

    ordered = sorted(objects, key=lambda e: e.start)
    group = [anchor]
    idx = ordered.index(anchor)
    if forward:
        prev = anchor
        for nxt in ordered[idx + 1 :]:
            if gap_ok(prev.end, nxt.start):
                group.append(nxt)
                prev = nxt
            else:
                break
    else:
        prev = anchor
        for nxt in reversed(ordered[:idx]):
            if gap_ok(nxt.end, prev.start):
                group.append(nxt)
                prev = nxt
            else:
                break
    return sorted(group, key=lambda e: e.start)


def _pick_forward_anchor(
    action: Entity, candidates: list[Entity]
) -> Optional[Entity]:
    """Nearest following object; include-capable verbs prefer notice cues."""
    following = [o for o in candidates if o.start >= action.end]
    if not following:
        return None
    if action.label == "Include" or action.text.lower().split()[0] in _NOTICE_FIRST_VERBS:
        cued = [o for o in following if o.label in _NOTICE_CUES]
        if cued:
            return min(cued, key=lambda o: o.start)
    return min(following, key=lambda o: o.start)


def _link_objects(analysis: _Analysis) -> None:
    sentence, entities = analysis.sentence, analysis.entities
    objects = [e for e in entities if e.kind is EntityKind.OBJECT]
    if not objects:
        return
    for action in (e for e in entities if e.kind is EntityKind.ACTION):
        lo, hi = _segment_bounds(sentence, analysis.clauses, action.start)
        in_segment = [o for o in objects if lo <= o.start < hi]
        if not in_segment:
            continue
        preceding = [o for o in in_segment if o.end <= action.start]
        anchor: Optional[Entity] = None
        forward = True
        if _is_passive(sentence, action) and preceding:
            anchor = max(preceding, key=lambda o: o.start)
            forward = False
        else:
            anchor = _pick_forward_anchor(action, in_segment)
            if anchor is None and preceding:
                anchor = max(preceding, key=lambda o: o.start)
                forward = False
        if anchor is None:
            continue
        # intransitive notice verbs ("the notices appear in all copies") take
        # the notice subject, not a trailing artifact noun; the subject must
        # sit directly before the verb
        if (
            forward
            and anchor.label not in _NOTICE_CUES
            and action.text.lower().split()[0] in _INCLUDE_CAPABLE
            and preceding
        ):
            subject = max(preceding, key=lambda o: o.start)
            if subject.label in _NOTICE_CUES and action.start - subject.end <= 3:
                anchor = subject
                forward = False
        analysis.objects_of[action] = _coordination_group(
            analysis, anchor, in_segment, forward
        )


def _link_conditions(analysis: _Analysis) -> None:
    entities = analysis.entities
    outside_actions = [
        e
        for e in entities
        if e.kind is EntityKind.ACTION
        and _clause_at(analysis.clauses, e.start) is None
    ]
    for clause in analysis.clauses:
        marker = clause.marker
        inside = [
            e
            for e in entities
            if e.kind is EntityKind.ACTION
            and clause.content_span[0] <= e.start < clause.content_span[1]
        ]
        analysis.clause_actions[marker] = inside
        guarded = [a for a in outside_actions if a.start < marker.start]
        if not guarded:
            guarded = [a for a in outside_actions if a.start >= clause.content_span[1]]
        for action in guarded:
            analysis.condition_of.setdefault(action, marker)


def _analyze(sentence: Sentence, entities: Sequence[Entity]) -> _Analysis:
    analysis = _Analysis(sentence=sentence, entities=list(entities))
    analysis.clauses = _find_clauses(sentence, entities)
    _link_attitudes(analysis)
    _link_objects(analysis)
    _link_conditions(analysis)
    return analysis


def extract_relations(
    entities: Sequence[Entity],
    sentence: Sentence,
) -> list[EntityRelation]:
    """Relations between the extracted entities of one sentence."""
    analysis = _analyze(sentence, entities)
    relations: list[EntityRelation] = []
    for action, attitude in analysis.attitude_of.items():
        relations.append(EntityRelation(action, attitude, RelationLabel.ACTION_ATTITUDE))
    for action, objs in analysis.objects_of.items():
        for obj in objs:
            relations.append(EntityRelation(action, obj, RelationLabel.ACTION_OBJECT))
    for action, marker in analysis.condition_of.items():
        relations.append(EntityRelation(action, marker, RelationLabel.ACTION_CONDITION))
    for marker, actions in analysis.clause_actions.items():
        for action in actions:
            relations.append(EntityRelation(marker, action, RelationLabel.CONDITION_ACTION))
    relations.sort(key=lambda r: (r.head.start, r.tail.start, r.label.value))
    return relations


# ---------------------------------------------------------------------------
# normalization

def normalize_attitude(
    attitude: Entity | str, negation_context: bool = False
) -> Attitude:
    """Map an attitude phrase to CAN / CANNOT / MUST.

    ``negation_context`` marks clause-level negation ("neither ... may be
    used"), which forces CANNOT.  Unknown phrases raise
    :class:`AttitudeError`; callers drop the regulation and surface a warning.
    """
    surface = attitude.text if isinstance(attitude, Entity) else attitude
    label = attitude.label if isinstance(attitude, Entity) else ""
    if not label:
        key = tuple(t.lower() for t in tokenize(surface))
        table = _default_lexicon().attitudes
        label = table.get(key, "")
        if not label and key and key[:3] == ("provided", "that", "you"):
            label = "MUST"
    if not label:
        raise AttitudeError(f"unknown attitude phrase: {surface!r}")
    if negation_context:
        return Attitude.CANNOT
    return Attitude(label)


def classify_action(
    action: Entity | str,
    object_entity: Optional[Entity | str] = None,
) -> Optional[tuple[str, str]]:
    """Resolve an action span (plus object cue) to (category, qualifier).

    Returns None when the pair cannot be mapped (caller warns and drops) or
    when the object is an ignorable reference (the license document itself).
    """
    if isinstance(action, Entity):
        surface, label = action.text, action.label
    else:
        surface, label = action, ""
    if not label:
        key = tuple(t.lower() for t in tokenize(surface))
        label = _default_lexicon().actions.get(key, "")
        if not label:
            return None

    obj_label = ""
    if isinstance(object_entity, Entity):
        obj_label = object_entity.label
    elif isinstance(object_entity, str) and object_entity:
        key = tuple(t.lower() for t in tokenize(object_entity))
        obj_label = _default_lexicon().objects.get(key, "")
    if obj_label == "IGNORE":
        return None

    first_word = surface.lower().split()[0] if surface else ""
    category = label
    if label == "Include":
        category = _CUE_CATEGORY.get(obj_label, "")
        if not category:
            return None
    elif first_word in _INCLUDE_CAPABLE and obj_label in _CUE_CATEGORY:
        # "retain the copyright notice" / "convey the Corresponding Source"
        category = _CUE_CATEGORY[obj_label]
    elif category == "PrivateUse":
        # "use the trademarks / patent claims of ..." is about the mark,
        # not about using the work
        if obj_label == "trademark":
            category = "UseTrademark"
        elif obj_label == "patent":
            category = "UsePatentClaims"
    if obj_label == "license" and category in (
        "Modify", "PrivateUse", "CommercialUse", "Sublicense",
    ):
        # "do not modify the License" regulates the license text, not the work
        return None
    if category in ("Include", "IGNORE", ""):
        return None

    if category in _FIXED_QUALIFIER:
        return (category, _FIXED_QUALIFIER[category])
    qualifier = _QUALIFIER_BY_LABEL.get(obj_label, DEFAULT_OBJECT)
    if qualifier in ("trademark", "patent"):
        qualifier = DEFAULT_OBJECT
    return (category, qualifier)


_FLIP_ATTITUDE = {Attitude.CANNOT: Attitude.MUST, Attitude.MUST: Attitude.CANNOT}


# ---------------------------------------------------------------------------
# regulation assembly

def _render_tokens(tokens: Sequence[str]) -> str:
    out = " ".join(tokens)
    out = re.sub(r"\s+([,.;:!?])", r"\1", out)
    out = re.sub(r"\(\s+", "(", out)
    out = re.sub(r"\s+\)", ")", out)
    return out.strip(" ,.;:")


def _condition_text(analysis: _Analysis, clause: _ConditionClause) -> str:
    lower = analysis.sentence.lower
    lo, hi = clause.content_span
    tokens = list(lower[lo:hi])
    while tokens and tokens[0] in ("you", "your", "that", "the"):
        tokens.pop(0)
    return _render_tokens(tokens)


def _main_phrase(analysis: _Analysis, marker: Entity) -> Optional[str]:
    guarded = [a for a, m in analysis.condition_of.items() if m is marker]
    if not guarded:
        return None
    action = min(guarded, key=lambda e: e.start)
    parts = [action.text.lower()]
    objs = analysis.objects_of.get(action)
    if objs:
        parts.append(objs[0].text.lower())
    return " ".join(parts)


def _sentence_regulations(
    analysis: _Analysis, warnings: list[str]
) -> list[Regulation]:
    sentence = analysis.sentence
    entities = analysis.entities
    regulations: list[Regulation] = []
    if _DEFINITION_RE.search(sentence.text):
        return regulations
    sentence_neutralized = bool(
        _EXCEPT_LICENSE_RE.search(sentence.text)
        or _NOTHING_ELSE_RE.search(sentence.text)
    )

    linked_labels = set()
    linked_attitude_end = None
    for action, attitude in analysis.attitude_of.items():
        linked_labels.add(normalize_attitude_or_none(attitude, analysis, warnings))
        if linked_attitude_end is None or attitude.end < linked_attitude_end:
            linked_attitude_end = attitude.end
    linked_labels.discard(None)
    dominant = next(iter(linked_labels)) if len(linked_labels) == 1 else None

    relative = _relative_spans(sentence)
    for action in (e for e in entities if e.kind is EntityKind.ACTION):
        clause = _clause_at(analysis.clauses, action.start)
        if clause is not None:
            regulations.extend(
                _clause_regulation(analysis, clause, action, warnings)
            )
            continue
        if _in_spans(relative, action.start):
            continue
        attitude_entity = analysis.attitude_of.get(action)
        if attitude_entity is not None:
            attitude = normalize_attitude_or_none(attitude_entity, analysis, warnings)
            if attitude is None:
                continue
        elif action.subject_only:
            continue
        elif dominant is not None and _may_adopt_dominant(
            analysis, action, linked_attitude_end
        ):
            # segment split a governed list; the action still follows the
            # attitude it should have taken
            attitude = dominant
        else:
            warnings.append(
                f"sentence {sentence.index}: no attitude for action "
                f"{action.text!r}; dropped"
            )
            continue
        if sentence_neutralized and attitude is Attitude.CANNOT:
            continue
        condition = None
        marker = analysis.condition_of.get(action)
        if marker is not None and marker.text.lower() not in _NON_BRANCHING_MARKERS:
            for cl in analysis.clauses:
                if cl.marker is marker:
                    condition = _condition_text(analysis, cl) or None
                    break
        regulations.extend(
            _build_regulations(analysis, action, attitude, condition, warnings)
        )
    regulations.extend(_synthesized_regulations(analysis, warnings))
    return regulations


def _synthesized_regulations(
    analysis: _Analysis, warnings: list[str]
) -> list[Regulation]:
    """Mark-only statements ("does not grant any rights in the trademarks")
    carry no action verb; the object alone determines the category."""
    sentence = analysis.sentence
    linked_objects = {o for objs in analysis.objects_of.values() for o in objs}
    out = []
    for att in (e for e in analysis.entities if e.kind is EntityKind.ATTITUDE):
        if att in analysis.attitude_of.values():
            continue
        lo, hi = _segment_bounds(sentence, analysis.clauses, att.start)
        zone_actions = [
            a
            for a in analysis.entities
            if a.kind is EntityKind.ACTION and lo <= a.start < hi
        ]
        if zone_actions:
            continue
        for obj in analysis.entities:
            if (
                obj.kind is EntityKind.OBJECT
                and obj not in linked_objects
                and att.end <= obj.start < hi
                and obj.label in ("trademark", "patent")
            ):
                attitude = normalize_attitude_or_none(att, analysis, warnings)
                if attitude is None:
                    continue
                category = (
                    "UseTrademark" if obj.label == "trademark" else "UsePatentClaims"
                )
                out.append(
                    Regulation(
                        action=category,
                        object=DEFAULT_OBJECT,
                        attitude=attitude,
                        provenance=sentence.index,
                    )
                )
    return out


def _may_adopt_dominant(
    analysis: _Analysis, action: Entity, linked_attitude_end: Optional[int]
) -> bool:
    """A stranded action adopts the sentence attitude only when a governed
    list was cut by a semicolon; colon lists and exception segments never
    inherit the attitude."""
    if linked_attitude_end is None or action.start < linked_attitude_end:
        return False
    lo, _hi = _segment_bounds(analysis.sentence, analysis.clauses, action.start)
    return lo > 0 and analysis.sentence.lower[lo - 1] == ";"


def normalize_attitude_or_none(
    attitude: Entity, analysis: _Analysis, warnings: list[str]
) -> Optional[Attitude]:
    try:
        return normalize_attitude(attitude, negation_context=_negated(analysis, attitude))
    except AttitudeError as exc:
        warnings.append(str(exc))
        return None


def _build_regulations(
    analysis: _Analysis,
    action: Entity,
    attitude: Attitude,
    condition: Optional[str],
    warnings: list[str],
) -> list[Regulation]:
    objs: list[Optional[Entity]] = list(analysis.objects_of.get(action, [])) or [None]
    out = []
    if action.label == "RemoveAlterNotices":
        # "may not remove or alter the license notices" obliges keeping them
        flipped = _FLIP_ATTITUDE.get(attitude)
        if flipped is None:
            return []
        for obj in objs:
            cue = obj.label if obj is not None else ""
            category = _CUE_CATEGORY.get(cue, "IncludeNotice")
            if category not in _CUE_CATEGORY.values():
                category = "IncludeNotice"
            out.append(
                Regulation(
                    action=category,
                    object=DEFAULT_OBJECT,
                    attitude=flipped,
                    condition=condition,
                    provenance=analysis.sentence.index,
                )
            )
        return out
    for obj in objs:
        resolved = classify_action(action, obj)
        if resolved is None:
            if action.label != "IGNORE" and (obj is None or obj.label != "IGNORE"):
                warnings.append(
                    f"sentence {analysis.sentence.index}: cannot classify "
                    f"action {action.text!r} with object "
                    f"{obj.text if obj else None!r}; dropped"
                )
            continue
        category, qualifier = resolved
        out.append(
            Regulation(
                action=category,
                object=qualifier,
                attitude=attitude,
                condition=condition,
                provenance=analysis.sentence.index,
            )
        )
    return out


def _clause_regulation(
    analysis: _Analysis,
    clause: _ConditionClause,
    action: Entity,
    warnings: list[str],
) -> list[Regulation]:
    """Regulations contributed by an action inside a condition clause.

    An explicit attitude inside the clause yields a regulation conditioned on
    the governing action ("provided that you must disclose ...").  Without
    one, obligations stated as grant conditions become unconditional MUSTs,
    but only when the clause is not a plain second-person action reference
    ("provided that you distribute the software" guards, it does not oblige).
    """
    if action.subject_only:
        return []
    if clause.marker.text.lower() not in _OBLIGATION_MARKERS:
        return []
    attitude_entity = analysis.attitude_of.get(action)
    if attitude_entity is not None:
        attitude = normalize_attitude_or_none(attitude_entity, analysis, warnings)
        if attitude is None:
            return []
        condition = _main_phrase(analysis, clause.marker)
        return _build_regulations(analysis, action, attitude, condition, warnings)

    lower = analysis.sentence.lower
    if any(
        lower[j] in _NEGATION_TOKENS
        for j in range(clause.content_span[0], action.start)
    ):
        # "provided that the restriction does not survive conveying"
        return []
    cue_objs = [
        o
        for o in analysis.objects_of.get(action, [])
        if o.label in _NOTICE_CUES or o.label == "source"
    ]
    if not cue_objs:
        return []
    regs = _build_regulations(analysis, action, Attitude.MUST, None, warnings)
    # grant conditions carry over as obligations on notices / source only
    return [r for r in regs if r.action in _CUE_CATEGORY.values()]


# ---------------------------------------------------------------------------
# public pipeline

class RuleBasedExtractor:
    """Deterministic lexicon/pattern implementation of :class:`TermExtractor`."""

    def __init__(self, lexicon: Optional[Lexicon] = None):
        self.lexicon = lexicon or load_lexicon()

    def preprocess(self, text: str) -> list[Sentence]:
        return preprocess(text)

    def extract_entities(self, sentence: Sentence) -> list[Entity]:
        return extract_entities(sentence, self.lexicon)

    def extract_relations(
        self, entities: Sequence[Entity], sentence: Sentence
    ) -> list[EntityRelation]:
        return extract_relations(entities, sentence)

    def interpret(self, text: str, license_id: str) -> TermMatrix:
        """Full pipeline: text -> sentences -> entities -> regulations -> matrix."""
        warnings: list[str] = []
        regulations: list[Regulation] = []
        for sentence in self.preprocess(text):
            entities = self.extract_entities(sentence)
            if not any(e.kind is EntityKind.ACTION for e in entities):
                continue
            analysis = _analyze(sentence, entities)
            regulations.extend(_sentence_regulations(analysis, warnings))
        return TermMatrix.from_regulations(license_id, regulations, warnings)


_DEFAULT: Optional[RuleBasedExtractor] = None


def _default_lexicon() -> Lexicon:
    return default_extractor().lexicon


def default_extractor() -> RuleBasedExtractor:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = RuleBasedExtractor()
    return _DEFAULT


def interpret(text: str, license_id: str) -> TermMatrix:
    return default_extractor().interpret(text, license_id)
