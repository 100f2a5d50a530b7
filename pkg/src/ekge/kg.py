"""Episodic and semantic knowledge-graph datasets.

Facts are stored as integer arrays. Episodic facts use the column order
``(t, s, p, o)`` and semantic facts ``(s, p, o)``; the per-fact
:class:`Quadruple` / :class:`Triple` records are only materialised on request.
"""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

SLOTS_EPISODIC = {"timestamp": 0, "subject": 1, "predicate": 2, "object": 3}
SLOTS_SEMANTIC = {"subject": 0, "predicate": 1, "object": 2}


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


class Quadruple(NamedTuple):
    t: int
    s: int
    p: int
    o: int
    value: bool = True


class Triple(NamedTuple):
    s: int
    p: int
    o: int
    value: bool = True


def parse_date(label: str):
    """Default timestamp key: ISO-8601 (``YYYY-MM-DD``) or ``MM/DD/YYYY``."""
    label = label.strip()
    try:
        return _dt.date.fromisoformat(label)
    except ValueError:
        pass
    try:
        return _dt.datetime.strptime(label, "%m/%d/%Y").date()
    except ValueError:
        raise DataError(f"unparseable timestamp {label!r}") from None


def parse_int(label: str):
    try:
        return int(label)
    except ValueError:
        raise DataError(f"unparseable timestamp {label!r}") from None


TIMESTAMP_PARSERS: dict[str, Callable[[str], object]] = {
    "date": parse_date,
    "int": parse_int,
}


@dataclass(frozen=True)
class Vocabulary:
    entities: tuple[str, ...] = ()
    predicates: tuple[str, ...] = ()
    timestamps: tuple[str, ...] = ()
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        index = {}
        for cls in ("entities", "predicates", "timestamps"):
            names = getattr(self, cls)
            lookup = {name: i for i, name in enumerate(names)}
            if len(lookup) != len(names):
                raise DataError(f"duplicate names in {cls}")
            index[cls] = lookup
        object.__setattr__(self, "_index", index)

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_predicates(self) -> int:
        return len(self.predicates)

    @property
    def n_timestamps(self) -> int:
        return len(self.timestamps)

    def entity_index(self, name: str) -> int:
        return self._index["entities"][name]

    def predicate_index(self, name: str) -> int:
        return self._index["predicates"][name]

    def timestamp_index(self, name: str) -> int:
        return self._index["timestamps"][name]

    def to_dict(self) -> dict:
        return {
            "entities": list(self.entities),
            "predicates": list(self.predicates),
            "timestamps": list(self.timestamps),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(d["entities"], d["predicates"], d["timestamps"])

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _as_facts(facts, width: int) -> np.ndarray:
    arr = np.asarray(facts, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, width), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != width:
        raise DataError(f"expected an (n, {width}) fact array, got shape {arr.shape}")
    return arr


def _dedupe(facts: np.ndarray, values: np.ndarray):
    """Drop identical duplicates; contradictory duplicates raise."""
    if len(facts) == 0:
        return facts, values
    uniq, first, inverse = np.unique(facts, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    agree = np.ones(len(uniq), dtype=bool)
    ref = values[first]
    np.logical_and.at(agree, inverse, values == ref[inverse])
    if not agree.all():
        bad = uniq[np.flatnonzero(~agree)[0]]
        raise DataError(f"contradictory duplicate fact {tuple(int(x) for x in bad)}")
    order = np.sort(first)
    return facts[order], values[order]


@dataclass(frozen=True, eq=False)
class _FactSet:
    vocab: Vocabulary
    facts: np.ndarray
    values: np.ndarray = None

    WIDTH = 0

    def __post_init__(self):
        facts = _as_facts(self.facts, self.WIDTH).copy()
        values = (np.ones(len(facts), dtype=bool) if self.values is None
                  else np.asarray(self.values, dtype=bool).reshape(-1))
        if len(values) != len(facts):
            raise DataError("facts and values differ in length")
        facts, values = _dedupe(facts, values)
        facts.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "facts", facts)
        object.__setattr__(self, "values", values)
        self._check_bounds()

    def _bounds(self) -> tuple[int, ...]:
        raise NotImplementedError

    def _check_bounds(self):
        if len(self.facts) == 0:
            return
        bounds = np.array(self._bounds())
        if (self.facts < 0).any() or (self.facts >= bounds).any():
            raise DataError("fact index out of vocabulary range")

    def __len__(self) -> int:
        return len(self.facts)

    @property
    def positives(self) -> np.ndarray:
        return self.facts[self.values]

    def subset(self, mask_or_idx):
        return type(self)(self.vocab, self.facts[mask_or_idx], self.values[mask_or_idx])


@dataclass(frozen=True, eq=False)
class EpisodicDataset(_FactSet):
    """Quadruples ``(t, s, p, o)`` over a shared vocabulary."""

    WIDTH = 4

    def _bounds(self):
        v = self.vocab
        return (v.n_timestamps, v.n_entities, v.n_predicates, v.n_entities)

    @property
    def last_timestamp(self) -> int:
        return self.vocab.n_timestamps - 1

    @property
    def quadruples(self) -> list[Quadruple]:
        return [Quadruple(*map(int, f), bool(v)) for f, v in zip(self.facts, self.values)]


@dataclass(frozen=True, eq=False)
class SemanticDataset(_FactSet):
    """Triples ``(s, p, o)`` over a shared vocabulary."""

    WIDTH = 3

    def _bounds(self):
        v = self.vocab
        return (v.n_entities, v.n_predicates, v.n_entities)

    @property
    def triples(self) -> list[Triple]:
        return [Triple(*map(int, f), bool(v)) for f, v in zip(self.facts, self.values)]


# --------------------------------------------------------------------------- io

def _read_rows(path, min_fields: int, max_fields: int):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if not min_fields <= len(fields) <= max_fields:
                raise DataError(f"{path}:{lineno}: expected {min_fields}-{max_fields} "
                                f"tab-separated fields, got {len(fields)}")
            yield lineno, fields


def _parse_value(raw: str, path, lineno) -> bool:
    raw = raw.strip()
    if raw in ("1", "true", "True"):
        return True
    if raw in ("0", "false", "False"):
        return False
    raise DataError(f"{path}:{lineno}: bad value field {raw!r}")


def load_quadruples(path, vocab: Vocabulary | None = None,
                    timestamp_parser: str | Callable = "date") -> EpisodicDataset:
    """Read a quadruple TSV: ``subject predicate object timestamp [0|1]``.

    Without ``vocab`` a vocabulary is built from the file (entities and
    predicates in first-appearance order, timestamps sorted by parsed key).
    With ``vocab`` every name must already be known.
    """
    parser = TIMESTAMP_PARSERS[timestamp_parser] if isinstance(timestamp_parser, str) else timestamp_parser
    rows = []
    for lineno, f in _read_rows(path, 4, 5):
        s, p, o, t = (x.strip() for x in f[:4])
        value = _parse_value(f[4], path, lineno) if len(f) == 5 else True
        rows.append((lineno, s, p, o, t, value))

    if vocab is None:
        ents, preds, stamps = {}, {}, {}
        for lineno, s, p, o, t, _ in rows:
            ents.setdefault(s, None)
            preds.setdefault(p, None)
            ents.setdefault(o, None)
            if t not in stamps:
                try:
                    stamps[t] = parser(t)
                except DataError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
        ordered = sorted(stamps, key=lambda k: stamps[k])
        keys = [stamps[k] for k in ordered]
        if len(set(keys)) != len(keys):
            raise DataError(f"{path}: distinct timestamp labels parse to the same instant")
        vocab = Vocabulary(list(ents), list(preds), ordered)

    facts, values, seen = [], [], {}
    for lineno, s, p, o, t, value in rows:
        try:
            fact = (vocab.timestamp_index(t), vocab.entity_index(s),
                    vocab.predicate_index(p), vocab.entity_index(o))
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: unknown name {exc}") from None
        if fact in seen:
            if seen[fact][0] != value:
                raise DataError(f"{path}:{lineno}: contradicts the fact on line {seen[fact][1]}")
            continue
        seen[fact] = (value, lineno)
        facts.append(fact)
        values.append(value)
    return EpisodicDataset(vocab, np.array(facts, dtype=np.int64).reshape(-1, 4), np.array(values, dtype=bool))


def load_triples(path, vocab: Vocabulary) -> SemanticDataset:
    """Read a triple TSV ``subject predicate object [0|1]`` against ``vocab``."""
    facts, values, seen = [], [], {}
    for lineno, f in _read_rows(path, 3, 4):
        s, p, o = (x.strip() for x in f[:3])
        value = _parse_value(f[3], path, lineno) if len(f) == 4 else True
        try:
            fact = (vocab.entity_index(s), vocab.predicate_index(p), vocab.entity_index(o))
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: unknown name {exc}") from None
        if fact in seen:
            if seen[fact] != value:
                raise DataError(f"{path}:{lineno}: contradictory duplicate triple")
            continue
        seen[fact] = value
        facts.append(fact)
        values.append(value)
    return SemanticDataset(vocab, np.array(facts, dtype=np.int64).reshape(-1, 3), np.array(values, dtype=bool))


def write_quadruples(ds: EpisodicDataset, path, with_values: bool = True) -> None:
    v = ds.vocab
    with open(path, "w", encoding="utf-8") as fh:
        for (t, s, p, o), val in zip(ds.facts, ds.values):
            row = [v.entities[s], v.predicates[p], v.entities[o], v.timestamps[t]]
            if with_values:
                row.append("1" if val else "0")
            fh.write("\t".join(row) + "\n")


def write_triples(ds: SemanticDataset, path, with_values: bool = True) -> None:
    v = ds.vocab
    with open(path, "w", encoding="utf-8") as fh:
        for (s, p, o), val in zip(ds.facts, ds.values):
            row = [v.entities[s], v.predicates[p], v.entities[o]]
            if with_values:
                row.append("1" if val else "0")
            fh.write("\t".join(row) + "\n")


# ---------------------------------------------------------------- filter index

def encode(facts: np.ndarray, vocab: Vocabulary) -> np.ndarray:
    """Injective int64 key per fact (episodic or semantic)."""
    facts = np.asarray(facts, dtype=np.int64)
    ne, np_ = vocab.n_entities, vocab.n_predicates
    if facts.shape[1] == 4:
        t, s, p, o = facts.T
        return ((t * ne + s) * np_ + p) * ne + o
    s, p, o = facts.T
    return (s * np_ + p) * ne + o


class FilterIndex:
    """Known-true facts, indexed by every partial key with one slot blanked."""

    def __init__(self, vocab: Vocabulary, facts: np.ndarray):
        facts = np.asarray(facts, dtype=np.int64)
        self.width = facts.shape[-1] if facts.ndim == 2 else 4
        facts = np.unique(_as_facts(facts, self.width), axis=0)
        self.vocab = vocab
        self.facts = facts
        self.keys = np.sort(encode(facts, vocab)) if len(facts) else np.zeros(0, dtype=np.int64)
        self._completions: list[dict] = []
        for col in range(self.width):
            table = defaultdict(list)
            rest = [c for c in range(self.width) if c != col]
            for row in facts.tolist():
                table[tuple(row[c] for c in rest)].append(row[col])
            self._completions.append({k: np.array(sorted(v), dtype=np.int64) for k, v in table.items()})

    @classmethod
    def from_datasets(cls, *datasets) -> "FilterIndex":
        vocab = datasets[0].vocab
        facts = np.concatenate([d.positives for d in datasets], axis=0)
        return cls(vocab, facts)

    @property
    def slots(self) -> dict[str, int]:
        return SLOTS_EPISODIC if self.width == 4 else SLOTS_SEMANTIC

    def completions(self, fact: Sequence[int], slot: str | int) -> np.ndarray:
        """Indices that make ``fact`` known-true when substituted at ``slot``."""
        col = self.slots[slot] if isinstance(slot, str) else slot
        key = tuple(int(fact[c]) for c in range(self.width) if c != col)
        return self._completions[col].get(key, np.zeros(0, dtype=np.int64))

    def contains(self, facts: np.ndarray) -> np.ndarray:
        facts = np.atleast_2d(np.asarray(facts, dtype=np.int64))
        if len(self.keys) == 0:
            return np.zeros(len(facts), dtype=bool)
        keys = encode(facts, self.vocab)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        return self.keys[pos] == keys

    def __len__(self) -> int:
        return len(self.facts)


# ------------------------------------------------------------- splitting / sampling

def occurrence_counts(ds: EpisodicDataset) -> np.ndarray:
    """Subject+object occurrence count per entity over positive facts."""
    pos = ds.positives
    n = ds.vocab.n_entities
    return np.bincount(pos[:, 1], minlength=n) + np.bincount(pos[:, 3], minlength=n)


def split_dataset(ds: EpisodicDataset, fractions=(0.8, 0.1, 0.1), seed: int = 0,
                  min_occurrences: int = 0):
    """Seeded uniform split of the positive facts into train/valid/test.

    ``min_occurrences`` first drops facts whose subject or object occurs fewer
    than that many times.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) <= 0 or abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"split fractions must be three positive reals summing to 1, got {fractions}")
    pos = ds.positives
    if min_occurrences > 0:
        counts = occurrence_counts(ds)
        keep = (counts[pos[:, 1]] >= min_occurrences) & (counts[pos[:, 3]] >= min_occurrences)
        pos = pos[keep]
    n = len(pos)
    n_train = int(round(fractions[0] * n))
    n_valid = int(round(fractions[1] * n))
    n_test = n - n_train - n_valid
    if min(n_train, n_valid, n_test) <= 0:
        raise DataError(f"split of {n} facts by {fractions} leaves a partition empty")
    perm = np.random.default_rng(seed).permutation(n)
    parts = np.split(pos[perm], [n_train, n_train + n_valid])
    return tuple(EpisodicDataset(ds.vocab, part) for part in parts)


def _domain_size(vocab: Vocabulary, width: int, col: int) -> int:
    if width == 4:
        return (vocab.n_timestamps, vocab.n_entities, vocab.n_predicates, vocab.n_entities)[col]
    return (vocab.n_entities, vocab.n_predicates, vocab.n_entities)[col]


def corrupt(facts: np.ndarray, col: int, vocab: Vocabulary, known: FilterIndex,
            rng: np.random.Generator, max_retries: int = 16, return_mask: bool = False):
    """One negative per row of ``facts`` by replacing column ``col``.

    Replacements are uniform over values that differ from the original and do
    not give a known-true fact (rejection sampling; rows still colliding after
    ``max_retries`` rounds are resolved by enumerating their candidates).

    A row whose every alternative is known-true raises DataError, unless
    ``return_mask`` is set: then ``(negatives, ok)`` is returned and such rows
    are flagged False in ``ok`` (their entry in ``negatives`` is meaningless).
    """
    facts = np.asarray(facts, dtype=np.int64)
    n_dom = _domain_size(vocab, facts.shape[1], col)
    if n_dom < 2:
        raise DataError(f"slot domain of column {col} has fewer than two members")
    out = facts.copy()
    ok = np.ones(len(facts), dtype=bool)
    todo = np.arange(len(facts))
    for _ in range(max_retries):
        if len(todo) == 0:
            break
        # uniform over the n_dom - 1 values different from the original
        draw = rng.integers(0, n_dom - 1, size=len(todo))
        orig = facts[todo, col]
        out[todo, col] = draw + (draw >= orig)
        todo = todo[known.contains(out[todo])]
    for i in todo:
        taken = set(known.completions(facts[i], col).tolist())
        taken.add(int(facts[i, col]))
        cands = [c for c in range(n_dom) if c not in taken]
        if not cands:
            if not return_mask:
                raise DataError(f"slot domain exhausted for fact {tuple(int(x) for x in facts[i])}")
            ok[i] = False
            continue
        out[i, col] = cands[rng.integers(len(cands))]
    return (out, ok) if return_mask else out


def sample_negatives(q, vocab: Vocabulary, slots: Iterable[str], k: int, filter: FilterIndex,
                     rng: np.random.Generator):
    """``k`` negatives per requested slot for a single fact."""
    if k < 1:
        raise ValueError("k must be >= 1")
    fact = np.asarray(tuple(q)[: filter.width], dtype=np.int64)
    slot_cols = SLOTS_EPISODIC if len(fact) == 4 else SLOTS_SEMANTIC
    make = Quadruple if len(fact) == 4 else Triple
    out = []
    for slot in slots:
        neg = corrupt(np.repeat(fact[None], k, axis=0), slot_cols[slot], vocab, filter, rng)
        out.extend(make(*map(int, row), False) for row in neg)
    return out


# ------------------------------------------------------------------ derivations

@dataclass(frozen=True)
class EventSpan:
    s: int
    p: int
    o: int
    t_start: int
    t_end: int | None  # None: open, persists through the last timestamp

    @property
    def is_open(self) -> bool:
        return self.t_end is None

    def last(self, last_timestamp: int) -> int:
        return last_timestamp if self.t_end is None else self.t_end


def spans_from_quadruples(ds: EpisodicDataset) -> list[EventSpan]:
    last = ds.last_timestamp
    by_triple = defaultdict(list)
    for t, s, p, o in ds.positives.tolist():
        by_triple[(s, p, o)].append(t)
    spans = []
    for (s, p, o), times in sorted(by_triple.items()):
        times.sort()
        start = prev = times[0]
        for t in times[1:] + [None]:
            if t is not None and t == prev + 1:
                prev = t
                continue
            spans.append(EventSpan(s, p, o, start, None if prev == last else prev))
            if t is not None:
                start = prev = t
    return spans


def expand_spans(spans: Iterable[EventSpan], vocab: Vocabulary) -> EpisodicDataset:
    last = vocab.n_timestamps - 1
    rows = [(t, sp.s, sp.p, sp.o) for sp in spans for t in range(sp.t_start, sp.last(last) + 1)]
    return EpisodicDataset(vocab, np.array(rows, dtype=np.int64).reshape(-1, 4))


def derive_semantic(ds: EpisodicDataset) -> SemanticDataset:
    """Current facts: open spans are true, triples with only closed spans false."""
    open_, closed = set(), set()
    for sp in spans_from_quadruples(ds):
        (open_ if sp.is_open else closed).add((sp.s, sp.p, sp.o))
    closed -= open_
    pos = sorted(open_)
    neg = sorted(closed)
    facts = np.array(pos + neg, dtype=np.int64).reshape(-1, 3)
    values = np.array([True] * len(pos) + [False] * len(neg), dtype=bool)
    return SemanticDataset(ds.vocab, facts, values)


def build_start_end(ds: EpisodicDataset) -> tuple[EpisodicDataset, EpisodicDataset]:
    spans = spans_from_quadruples(ds)
    start = [(sp.t_start, sp.s, sp.p, sp.o) for sp in spans]
    end = [(sp.t_end, sp.s, sp.p, sp.o) for sp in spans if not sp.is_open]
    return (EpisodicDataset(ds.vocab, np.array(start, dtype=np.int64).reshape(-1, 4)),
            EpisodicDataset(ds.vocab, np.array(end, dtype=np.int64).reshape(-1, 4)))


def filter_rare(ds: EpisodicDataset, max_occurrences: float = 3, include_starts: bool = False
                ) -> EpisodicDataset:
    """Keep triples that are true at fewer than ``max_occurrences`` timestamps.

    With ``include_starts`` the start quadruple of every event span is kept too.
    """
    if max_occurrences < 1:
        raise ValueError("max_occurrences must be >= 1")
    pos = ds.positives
    counts = Counter(map(tuple, pos[:, 1:].tolist()))
    keep = np.array([counts[tuple(r)] < max_occurrences for r in pos[:, 1:].tolist()], dtype=bool)
    if include_starts and len(pos):
        starts = build_start_end(ds)[0]
        keep |= FilterIndex(ds.vocab, starts.facts).contains(pos)
    return EpisodicDataset(ds.vocab, pos[keep])


# -------------------------------------------------------------------- synthetic

@dataclass(frozen=True)
class SynthSpec:
    n_entities: int
    n_predicates: int
    n_timestamps: int
    n_spans: int
    min_length: int = 1
    max_length: int = 3
    open_fraction: float = 0.5
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        return cls(**d)


def synth_spans(spec: SynthSpec) -> tuple[Vocabulary, list[EventSpan]]:
    """Random non-touching event spans; see :func:`synth_generate`."""
    for name in ("n_entities", "n_predicates", "n_timestamps", "n_spans", "min_length"):
        if getattr(spec, name) < 1:
            raise DataError(f"{name} must be >= 1")
    if spec.max_length < spec.min_length or spec.min_length > spec.n_timestamps:
        raise DataError("infeasible span length range")
    capacity = spec.n_entities ** 2 * spec.n_predicates * spec.n_timestamps
    if spec.n_spans > capacity:
        raise DataError(f"n_spans={spec.n_spans} exceeds (s,p,o,t_start) capacity {capacity}")
    need_closed = spec.n_spans >= 2
    if need_closed and spec.n_timestamps < spec.min_length + 1:
        raise DataError("closed spans need n_timestamps > min_length")

    rng = np.random.default_rng(spec.seed)
    last = spec.n_timestamps - 1
    occupied = defaultdict(set)  # (s,p,o) -> timestamps covered or adjacent
    spans = []
    attempts = 0
    while len(spans) < spec.n_spans:
        attempts += 1
        if attempts > 200 * spec.n_spans + 1000:
            raise DataError("could not place the requested number of spans")
        i = len(spans)
        if i == 0:
            is_open = True
        elif i == 1 and need_closed:
            is_open = False
        else:
            is_open = bool(rng.random() < spec.open_fraction)
        length = int(rng.integers(spec.min_length, min(spec.max_length, spec.n_timestamps) + 1))
        s, o = (int(x) for x in rng.integers(0, spec.n_entities, size=2))
        p = int(rng.integers(0, spec.n_predicates))
        if is_open:
            start = last - length + 1
        else:
            length = min(length, last)  # a closed span must end before the last timestamp
            if length < 1:
                continue
            start = int(rng.integers(0, last - length + 1))
        end = start + length - 1
        cover = set(range(start - 1, end + 2))
        if cover & occupied[(s, p, o)]:
            continue
        occupied[(s, p, o)] |= set(range(start, end + 1))
        spans.append(EventSpan(s, p, o, start, None if is_open else end))

    base = _dt.date(2014, 1, 1)
    vocab = Vocabulary(
        [f"e{i}" for i in range(spec.n_entities)],
        [f"p{i}" for i in range(spec.n_predicates)],
        [(base + _dt.timedelta(days=i)).isoformat() for i in range(spec.n_timestamps)],
    )
    spans.sort(key=lambda sp: (sp.s, sp.p, sp.o, sp.t_start))
    return vocab, spans


def synth_generate(spec: SynthSpec) -> EpisodicDataset:
    """Deterministic synthetic episodic dataset expanded from random spans.

    When ``n_spans >= 2`` at least one span is open and one closed.
    """
    vocab, spans = synth_spans(spec)
    return expand_spans(spans, vocab)
