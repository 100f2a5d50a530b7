"""Filtered / raw ranking, MRR and Hits@k, and precision-recall metrics."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .kg import SLOTS_EPISODIC, SLOTS_SEMANTIC, FilterIndex, Quadruple, Triple, Vocabulary
from . import models

HITS_AT = (1, 3, 10)


@dataclass
class Metrics:
    slot: str
    mode: str
    mrr: float
    hits: dict[int, float]
    n: int
    ranks: np.ndarray = field(default=None, repr=False, compare=False)

    @classmethod
    def from_ranks(cls, ranks, slot: str, mode: str) -> "Metrics":
        ranks = np.asarray(ranks, dtype=np.int64)
        if len(ranks) == 0:
            return cls(slot, mode, float("nan"), {k: float("nan") for k in HITS_AT}, 0, ranks)
        return cls(slot, mode, float(np.mean(1.0 / ranks)),
                   {k: float(np.mean(ranks <= k)) for k in HITS_AT}, len(ranks), ranks)

    def to_dict(self) -> dict:
        return {"slot": self.slot, "mode": self.mode, "n": self.n, "mrr": self.mrr,
                "hits": {str(k): v for k, v in self.hits.items()}}


def score_fn(model) -> Callable[[np.ndarray], np.ndarray]:
    """Batch scoring callable for a ModelParams, a projected scorer or a function."""
    if isinstance(model, models.ModelParams):
        return lambda facts: models.scores(model, facts)
    if hasattr(model, "scores"):
        return model.scores
    return model


def _slot_col(width: int, slot: str) -> int:
    return (SLOTS_EPISODIC if width == 4 else SLOTS_SEMANTIC)[slot]


def domain_size(vocab: Vocabulary, width: int, col: int) -> int:
    if width == 4:
        return (vocab.n_timestamps, vocab.n_entities, vocab.n_predicates, vocab.n_entities)[col]
    return (vocab.n_entities, vocab.n_predicates, vocab.n_entities)[col]


def candidate_scores(fn, facts: np.ndarray, col: int, n_cands: int) -> np.ndarray:
    """Scores of every completion of ``col`` for each fact, shape (n, n_cands)."""
    rep = np.repeat(facts, n_cands, axis=0)
    rep[:, col] = np.tile(np.arange(n_cands), len(facts))
    return fn(rep).reshape(len(facts), n_cands)


def ranks_from_scores(cand: np.ndarray, true_idx: np.ndarray, excluded: np.ndarray | None = None
                      ) -> np.ndarray:
    """1-based ranks with the mid-rank tie rule.

    rank = 1 + #(competitor > true) + ceil(#(competitor == true) / 2), where
    competitors are all candidates except the true one and any ``excluded``.
    """
    rows = np.arange(len(cand))
    true = cand[rows, true_idx][:, None]
    valid = np.ones_like(cand, dtype=bool) if excluded is None else ~excluded
    valid[rows, true_idx] = False
    greater = ((cand > true) & valid).sum(axis=1)
    equal = ((cand == true) & valid).sum(axis=1)
    return 1 + greater + (equal + 1) // 2


def _filter_mask(facts: np.ndarray, col: int, n_cands: int, filt: FilterIndex) -> np.ndarray:
    mask = np.zeros((len(facts), n_cands), dtype=bool)
    for i, fact in enumerate(facts):
        mask[i, filt.completions(fact, col)] = True
    return mask


def rank_facts(model, facts, slot: str, vocab: Vocabulary, filt: FilterIndex | None = None,
               mode: str = "filtered", chunk: int = 256, threads: int = 1) -> np.ndarray:
    """Rank of the true completion at ``slot`` for each fact."""
    if mode not in ("filtered", "raw"):
        raise ValueError(f"mode must be 'filtered' or 'raw', not {mode!r}")
    if mode == "filtered" and filt is None:
        raise ValueError("filtered ranking needs a FilterIndex")
    facts = np.atleast_2d(np.asarray(facts, dtype=np.int64))
    if len(facts) == 0:
        return np.zeros(0, dtype=np.int64)
    fn = score_fn(model)
    col = _slot_col(facts.shape[1], slot)
    n_cands = domain_size(vocab, facts.shape[1], col)
    step = max(1, chunk)

    def work(start):
        part = facts[start:start + step]
        cand = candidate_scores(fn, part, col, n_cands)
        excluded = _filter_mask(part, col, n_cands, filt) if mode == "filtered" else None
        return ranks_from_scores(cand, part[:, col], excluded)

    starts = range(0, len(facts), step)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts)


def rank_slot(model, fact, slot: str, vocab: Vocabulary, filt: FilterIndex | None = None,
              mode: str = "filtered") -> int:
    """Rank of one known-true fact; Quadruple/Triple value fields are ignored."""
    if isinstance(fact, (Quadruple, Triple)):
        fact = fact[:-1]
    return int(rank_facts(model, np.asarray(fact, dtype=np.int64)[None], slot, vocab, filt, mode)[0])


def evaluate(model, facts, slots: Iterable[str], vocab: Vocabulary, filt: FilterIndex | None = None,
             mode: str = "filtered", threads: int = 1) -> dict[str, Metrics]:
    """Metrics per slot. ``"entity"`` pools subject- and object-corruption ranks."""
    facts = np.asarray(getattr(facts, "positives", facts), dtype=np.int64)
    out = {}
    cache = {}

    def ranks(slot):
        if slot not in cache:
            cache[slot] = rank_facts(model, facts, slot, vocab, filt, mode, threads=threads)
        return cache[slot]

    for slot in slots:
        r = np.concatenate([ranks("subject"), ranks("object")]) if slot == "entity" else ranks(slot)
        out[slot] = Metrics.from_ranks(r, slot, mode)
    return out


def mean_mrr(metrics: dict[str, Metrics]) -> float:
    return float(np.mean([m.mrr for m in metrics.values()]))


# ------------------------------------------------------------- precision/recall

def _check_binary(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=bool).reshape(-1)
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    if labels.all() or not labels.any():
        raise ValueError("need at least one positive and one negative label")
    return scores, labels


def pr_curve(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(precision, recall, threshold) at each distinct score, descending.

    Tied scores form a single step.
    """
    scores, labels = _check_binary(scores, labels)
    order = np.argsort(-scores, kind="stable")
    s, y = scores[order], labels[order]
    tp = np.cumsum(y)
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tp = tp[last_of_group]
    n_pred = np.flatnonzero(last_of_group) + 1
    return tp / n_pred, tp / labels.sum(), s[last_of_group]


def auprc(scores, labels) -> float:
    """Step-interpolated area: sum of recall increments times precision at the step's end."""
    precision, recall, _ = pr_curve(scores, labels)
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def recall_at(scores, labels, threshold: float = 0.5) -> float:
    """Fraction of positives scored strictly above ``threshold``."""
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=bool).reshape(-1)
    if not labels.any():
        raise ValueError("no positive labels")
    return float(np.mean(scores[labels] > threshold))


def hits_curve(ranks, ks=None) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.asarray(ranks)
    ks = np.arange(1, max(10, int(ranks.max(initial=1))) + 1) if ks is None else np.asarray(ks)
    return ks, np.array([np.mean(ranks <= k) for k in ks])


def format_table(rows: dict[str, dict[str, Metrics]], slots: list[str], title: str = "") -> str:
    """Aligned text table: one row per model, MRR and Hits@1/3/10 (percent) per slot."""
    head1 = f"{'Method':<14}"
    head2 = f"{'':<14}"
    for slot in slots:
        head1 += f" | {slot.capitalize():^29}"
        head2 += f" | {'MRR':>6} {'@1':>6} {'@3':>6} {'@10':>7}"
    lines = [title] if title else []
    lines += [head1, head2, "-" * len(head2)]
    for name, by_slot in rows.items():
        line = f"{name:<14}"
        for slot in slots:
            m = by_slot[slot]
            line += (f" | {m.mrr:6.3f} {100 * m.hits[1]:6.2f} {100 * m.hits[3]:6.2f}"
                     f" {100 * m.hits[10]:7.2f}")
        lines.append(line)
    return "\n".join(lines)


def metrics_json(by_slot: dict[str, Metrics], **extra) -> dict:
    return {"schema_version": 1, **extra,
            "slots": {slot: m.to_dict() for slot, m in by_slot.items()}}
