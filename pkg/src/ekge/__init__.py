"""Episodic and semantic knowledge-graph embeddings.

Submodules: ``kg`` (datasets, splits, negatives, derived tensors), ``models``
(scoring and gradients), ``training`` (losses, Adam, loops), ``evaluation``
(ranking and precision-recall metrics), ``projection`` (episodic-to-semantic
marginalisation), ``checkpoint`` and ``cli``.
"""
from .kg import (DataError, EpisodicDataset, EventSpan, FilterIndex, Quadruple, SemanticDataset,
                 SynthSpec, Triple, Vocabulary, load_quadruples, load_triples)
from .models import ModelError, ModelParams, Rank, init, param_count, parse_model, score, scores
from .training import TrainConfig, TrainingDiverged, TrainReport, train, train_projection
from .evaluation import Metrics, auprc, evaluate, rank_slot, recall_at
from .projection import ProjectedScorer, ProjectionError, marginalize, project_score

__version__ = "0.1.0"

__all__ = [
    "DataError", "EpisodicDataset", "EventSpan", "FilterIndex", "Quadruple", "SemanticDataset",
    "SynthSpec", "Triple", "Vocabulary", "load_quadruples", "load_triples",
    "ModelError", "ModelParams", "Rank", "init", "param_count", "parse_model", "score", "scores",
    "TrainConfig", "TrainingDiverged", "TrainReport", "train", "train_projection",
    "Metrics", "auprc", "evaluate", "rank_slot", "recall_at",
    "ProjectedScorer", "ProjectionError", "marginalize", "project_score",
]
