"""Episodic-to-semantic projection by marginalising the time representation.

For the models whose logit is linear in the time representation,
``theta(t, s, p, o) = time_rep(t) . ftilde(s, p, o)``, summing over all
timestamps commutes with scoring. ``Start`` sums the start-time
representations; ``StartEnd`` additionally subtracts the summed end-time
representations so that terminated events drop out of the current facts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evaluation, models
from .kg import FilterIndex, SemanticDataset
from .models import ModelParams

MODES = ("start", "start-end")


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectedScorer:
    """Scores triples as ``marginal . ftilde(s, p, o)``; raw logits, no sigmoid."""

    params: ModelParams
    marginal: np.ndarray
    mode: str

    @property
    def kind(self) -> str:
        return self.params.kind

    def scores(self, triples) -> np.ndarray:
        triples = np.atleast_2d(np.asarray(triples, dtype=np.int64))
        if triples.shape[1] != 3:
            raise ProjectionError("projected scorers take (s, p, o) triples")
        f = models.ftilde(self.params, triples[:, 0], triples[:, 1], triples[:, 2])
        return f @ self.marginal


def _summed_time(params: ModelParams) -> np.ndarray:
    n_t = params.tables[params.time_names[0]].shape[0]
    return models.time_rep(params, np.arange(n_t)).sum(axis=0)


def marginalize(params: ModelParams, mode: str = "start-end") -> ProjectedScorer:
    mode = mode.lower().replace("_", "-")
    if mode == "startend":
        mode = "start-end"
    if mode not in MODES:
        raise ProjectionError(f"unknown projection mode {mode!r}")
    if not params.episodic or params.kind not in models.PROJECTABLE_KINDS:
        raise ProjectionError(f"{params.name} is not linear in one time representation; "
                              "it cannot be marginalised")
    start = params.with_time("start")
    marginal = _summed_time(start)
    if mode == "start-end":
        if not params.has_end_time:
            raise ProjectionError("start-end projection needs end-time tables")
        marginal = marginal - _summed_time(params.with_time("end"))
    marginal.setflags(write=False)
    return ProjectedScorer(start, marginal, mode)


def project_score(scorer: ProjectedScorer, triple) -> float:
    return float(scorer.scores(np.asarray(tuple(triple)[:3], dtype=np.int64)[None])[0])


def evaluate_projection(scorer, genuine: SemanticDataset, false_set: SemanticDataset,
                        threshold: float = 0.5) -> dict:
    """Object-slot Hits@10 on each set plus AUPRC / recall on the pooled labels.

    Each set is ranked with a filter built from its own triples. Any object
    with a ``.scores(triples)`` method (a ProjectedScorer or a semantic model)
    can be evaluated.
    """
    if len(genuine) == 0 or len(false_set) == 0:
        raise ProjectionError("genuine and false semantic sets must be non-empty")
    vocab = genuine.vocab
    out = {}
    for name, ds in (("genuine", genuine), ("false", false_set)):
        facts = ds.facts
        filt = FilterIndex(vocab, facts)
        for mode in ("filtered", "raw"):
            ranks = evaluation.rank_facts(scorer, facts, "object", vocab, filt, mode)
            out[f"hits10_{name}_{mode}"] = float(np.mean(ranks <= 10))
    fn = evaluation.score_fn(scorer)
    pooled = np.concatenate([genuine.facts, false_set.facts])
    labels = np.r_[np.ones(len(genuine), bool), np.zeros(len(false_set), bool)]
    theta = fn(pooled)
    out["auprc"] = evaluation.auprc(theta, labels)
    out["recall"] = evaluation.recall_at(theta, labels, threshold)
    return out


def semantic_scorer(params: ModelParams):
    """Wrap a trained semantic model so it can be evaluated like a projection."""
    if params.episodic:
        raise ProjectionError("expected a semantic model")
    return evaluation.score_fn(params)
