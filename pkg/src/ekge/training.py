"""Losses, lazy sparse Adam, and the training loops.

Training minimises either the regularised logistic loss over positives and
sampled negatives, or the pairwise margin loss between each positive and its
own negatives. Early stopping monitors the filtered validation MRR.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import evaluation, models
from .kg import SLOTS_EPISODIC, SLOTS_SEMANTIC, EpisodicDataset, FilterIndex, corrupt
from .models import ModelParams, Rank, SparseRows

log = logging.getLogger(__name__)


class TrainingDiverged(FloatingPointError):
    pass


@dataclass
class TrainConfig:
    model: str = "cont"
    rank: int = 8
    rank_t: int | None = None
    loss: str = "logistic"
    margin: float = 1.0
    l2: float = 0.0
    lr: float = 1e-3
    batch_size: int = 512
    max_epochs: int = 500
    eval_every: int = 50
    patience: int = 2
    neg_slots: tuple[str, ...] = ("subject", "object")
    neg_per_slot: int = 1
    margin_sigmoid: bool = True
    monitor_slots: tuple[str, ...] = ("entity",)
    seed: int = 0

    def __post_init__(self):
        self.neg_slots = tuple(self.neg_slots)
        self.monitor_slots = tuple(self.monitor_slots)
        if self.loss not in ("logistic", "margin"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.margin < 0 or self.l2 < 0 or self.lr <= 0:
            raise ValueError("need margin >= 0, l2 >= 0, lr > 0")
        if self.batch_size < 1 or self.max_epochs < 0 or self.eval_every < 1 or self.neg_per_slot < 1:
            raise ValueError("batch_size, eval_every, neg_per_slot must be >= 1 and max_epochs >= 0")

    @property
    def ranks(self) -> Rank:
        return Rank(self.rank, self.rank_t)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["neg_slots"] = list(self.neg_slots)
        d["monitor_slots"] = list(self.monitor_slots)
        return d


def load_config(path) -> dict:
    """Read a JSON object, or ``key = value`` lines with JSON-literal values."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return json.loads(text)
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, raw = (x.strip() for x in line.split("=", 1))
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw.strip("'\"")
    return out


# ------------------------------------------------------------------------ losses

def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def logistic_loss(scores, labels, params: ModelParams | None = None, l2: float = 0.0) -> float:
    """``sum log(1 + exp(-y theta)) + l2 * ||P||^2`` with labels in {-1, +1}."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in shape")
    if not np.all(np.abs(labels) == 1):
        raise ValueError("labels must be -1 or +1")
    value = float(np.sum(np.logaddexp(0.0, -labels * scores)))
    if l2 and params is not None:
        value += l2 * params.sq_norm()
    return value


def logistic_dscores(scores, labels) -> np.ndarray:
    """d loss / d theta for the data term: ``-y * sigmoid(-y theta)``."""
    return -labels * _sigmoid(-labels * scores)


def margin_loss(pos, neg, margin: float, apply_sigmoid: bool = True) -> float:
    """``sum_i sum_j max(0, margin + f(theta_j) - f(theta_i))`` over all pos x neg pairs."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    f = _sigmoid if apply_sigmoid else np.asarray
    fp = f(np.asarray(pos, dtype=np.float64)).reshape(-1, 1)
    fn = f(np.asarray(neg, dtype=np.float64)).reshape(1, -1)
    return float(np.maximum(0.0, margin + fn - fp).sum())


def grouped_margin(pos: np.ndarray, neg: np.ndarray, margin: float, apply_sigmoid: bool,
                   mask: np.ndarray | None = None):
    """Margin loss of each positive against its own row of negatives.

    ``pos`` is (B,), ``neg`` is (B, K); ``mask`` (B, K) drops pairs.
    Returns (loss, dpos, dneg).
    """
    if apply_sigmoid:
        fp, fn = _sigmoid(pos), _sigmoid(neg)
        dfp, dfn = fp * (1 - fp), fn * (1 - fn)
    else:
        fp, fn = pos, neg
        dfp, dfn = np.ones_like(pos), np.ones_like(neg)
    hinge = margin + fn - fp[:, None]
    active = hinge > 0
    if mask is not None:
        active &= mask
    loss = float(np.where(active, hinge, 0.0).sum())
    dneg = active * dfn
    dpos = -active.sum(axis=1) * dfp
    return loss, dpos, dneg


# -------------------------------------------------------------------------- adam

@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: ModelParams, **hyper) -> "AdamState":
        return cls({k: np.zeros_like(a) for k, a in params.tables.items()},
                   {k: np.zeros_like(a) for k, a in params.tables.items()}, **hyper)


def aggregate_rows(g: SparseRows) -> SparseRows:
    uniq, inv = np.unique(g.idx, return_inverse=True)
    agg = np.zeros((len(uniq),) + g.values.shape[1:])
    np.add.at(agg, inv.reshape(-1), g.values)
    return SparseRows(uniq, agg)


def adam_step(state: AdamState, params: ModelParams, grads: dict, lr: float,
              trainable=None) -> None:
    """One in-place Adam update.

    Row tables update lazily: only rows present in the gradient advance their
    moments. Bias correction uses the global step count.
    """
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.step
    bc2 = 1.0 - b2 ** state.step
    for name, g in grads.items():
        if trainable is not None and name not in trainable:
            continue
        p, m, v = params.tables[name], state.m[name], state.v[name]
        if isinstance(g, SparseRows):
            g = aggregate_rows(g)
            rows = g.idx
            if p[rows].shape != g.values.shape:
                raise ValueError(f"gradient shape mismatch for {name}")
            m[rows] = b1 * m[rows] + (1 - b1) * g.values
            v[rows] = b2 * v[rows] + (1 - b2) * g.values ** 2
            p[rows] -= lr * (m[rows] / bc1) / (np.sqrt(v[rows] / bc2) + state.eps)
        else:
            if g.shape != p.shape:
                raise ValueError(f"gradient shape mismatch for {name}")
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def add_l2(params: ModelParams, grads: dict, l2: float, trainable=None) -> tuple[dict, float]:
    """Add ``2 l2 P`` for every touched row and every dense table.

    Returns the augmented gradients and the penalty value over those entries.
    """
    out, penalty = {}, 0.0
    for name, g in grads.items():
        if trainable is not None and name not in trainable:
            out[name] = g
            continue
        p = params.tables[name]
        if isinstance(g, SparseRows):
            rows = np.unique(g.idx)
            out[name] = SparseRows(np.concatenate([g.idx, rows]),
                                   np.concatenate([g.values, 2 * l2 * p[rows]]))
            penalty += l2 * float(np.sum(p[rows] ** 2))
        else:
            out[name] = g + 2 * l2 * p
            penalty += l2 * float(np.sum(p ** 2))
    return out, penalty


# ------------------------------------------------------------------------ report

@dataclass
class TrainReport:
    history: list[tuple[int, float, float]] = field(default_factory=list)
    stop_epoch: int = 0
    best_epoch: int = 0
    best_mrr: float = float("nan")
    epoch_seconds: list[float] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "loss", "valid_mrr"])
            for epoch, loss, mrr in self.history:
                w.writerow([epoch, repr(float(loss)), repr(float(mrr))])

    def to_dict(self) -> dict:
        return {"history": [list(h) for h in self.history], "stop_epoch": self.stop_epoch,
                "best_epoch": self.best_epoch, "best_mrr": self.best_mrr}


# ------------------------------------------------------------------------- train

def _slot_cols(width: int, slots) -> list[int]:
    table = SLOTS_EPISODIC if width == 4 else SLOTS_SEMANTIC
    return [table[s] for s in slots]


def batch_step(params: ModelParams, pos: np.ndarray, config: TrainConfig, known: FilterIndex,
               rng: np.random.Generator, state: AdamState, trainable=None) -> float:
    """Negatives, loss, gradient and Adam update for one batch; returns the batch loss."""
    vocab = known.vocab
    drawn = [corrupt(pos, col, vocab, known, rng, return_mask=True)
             for col in _slot_cols(pos.shape[1], config.neg_slots)
             for _ in range(config.neg_per_slot)]
    neg = np.stack([d[0] for d in drawn], axis=1)  # (B, K, width)
    ok = np.stack([d[1] for d in drawn], axis=1)   # negatives that exist
    B, K = neg.shape[:2]
    facts = np.concatenate([pos, neg.reshape(B * K, -1)])
    theta = models.scores(params, facts)
    tp, tn = theta[:B], theta[B:].reshape(B, K)
    if config.loss == "logistic":
        labels = np.r_[np.ones(B), -np.ones(B * K)]
        weight = np.r_[np.ones(B), ok.reshape(-1)]
        loss = float(np.sum(weight * np.logaddexp(0.0, -labels * theta)))
        up = weight * logistic_dscores(theta, labels)
    else:
        loss, dpos, dneg = grouped_margin(tp, tn, config.margin, config.margin_sigmoid, ok)
        up = np.r_[dpos, dneg.reshape(-1)]
    if not math.isfinite(loss):
        raise TrainingDiverged(f"non-finite batch loss ({loss}) for {params.name}")
    grads = models.gradients(params, facts, up)
    if config.l2:
        grads, penalty = add_l2(params, grads, config.l2, trainable)
        loss += penalty
    adam_step(state, params, grads, config.lr, trainable)
    return loss


def train(kind: str, episodic: bool, train_ds, valid_ds, config: TrainConfig, *,
          params: ModelParams | None = None, trainable=None, filter_index: FilterIndex | None = None,
          monitor_slots=None, threads: int = 1) -> tuple[ModelParams, TrainReport]:
    """Train a model; returns the best (by validation filtered MRR) parameters and a report.

    ``trainable`` restricts updates to the named tables (others stay frozen);
    ``threads`` parallelises the validation ranking only.
    """
    if valid_ds is None:
        valid_ds = train_ds
    vocab = train_ds.vocab
    if valid_ds.vocab.sha256() != vocab.sha256():
        raise ValueError("training and validation data use different vocabularies")
    if params is None:
        params = models.init(kind, episodic, vocab, config.ranks, seed=config.seed)
    if isinstance(train_ds, EpisodicDataset) != params.episodic:
        raise ValueError(f"{params.name} cannot be trained on this dataset type")
    rng = np.random.default_rng(config.seed)
    positives = train_ds.positives
    known = FilterIndex(vocab, positives)
    filt = filter_index or FilterIndex.from_datasets(train_ds, valid_ds)
    slots = tuple(monitor_slots or config.monitor_slots)
    if not params.episodic:
        slots = tuple(s for s in slots if s != "timestamp") or ("entity",)
    valid_facts = valid_ds.positives
    state = AdamState.zeros_like(params)
    report = TrainReport()
    best = params.copy()
    stale = 0
    trainable = set(trainable) if trainable is not None else None

    for epoch in range(1, config.max_epochs + 1):
        tic = time.perf_counter()
        perm = rng.permutation(len(positives))
        epoch_loss = 0.0
        for start in range(0, len(perm), config.batch_size):
            batch = positives[perm[start:start + config.batch_size]]
            epoch_loss += batch_step(params, batch, config, known, rng, state, trainable)
        report.epoch_seconds.append(time.perf_counter() - tic)
        report.stop_epoch = epoch
        if epoch % config.eval_every == 0 or epoch == config.max_epochs:
            mrr = evaluation.mean_mrr(evaluation.evaluate(params, valid_facts, slots, vocab, filt,
                                                         threads=threads))
            report.history.append((epoch, epoch_loss, mrr))
            log.info("%s epoch %d loss %.4f valid mrr %.4f", params.name, epoch, epoch_loss, mrr)
            if not (mrr <= report.best_mrr):  # first evaluation or improvement
                report.best_mrr, report.best_epoch = mrr, epoch
                best = params.copy()
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    break
    return best, report


def train_projection(kind: str, start_ds: EpisodicDataset, end_ds: EpisodicDataset,
                     config: TrainConfig, end_config: TrainConfig | None = None,
                     monitor_slots=("entity",), threads: int = 1
                     ) -> tuple[ModelParams, TrainReport, TrainReport]:
    """Two-stage training on start-time then end-time tensors.

    Stage 1 fits every parameter on ``start_ds``. Stage 2 freezes entity,
    predicate and core parameters and fits only the end-time tables on
    ``end_ds``. Both stages monitor their own training data.
    """
    if kind not in models.PROJECTABLE_KINDS:
        raise models.ModelError(f"{kind} cannot be written as time_rep . ftilde; no projection")
    if start_ds.vocab.sha256() != end_ds.vocab.sha256():
        raise ValueError("start and end tensors use different vocabularies")
    end_config = end_config or config
    full = models.init(kind, True, start_ds.vocab, config.ranks, seed=config.seed, end_time=True)
    start_view = full.with_time("start")
    best1, rep1 = train(kind, True, start_ds, start_ds, config, params=start_view,
                        monitor_slots=monitor_slots, threads=threads)
    for name, arr in best1.tables.items():
        full.tables[name][...] = arr
    rep2 = TrainReport()
    if len(end_ds.positives):
        end_view = full.with_time("end")
        best2, rep2 = train(kind, True, end_ds, end_ds, end_config, params=end_view,
                            trainable=full.time_names, monitor_slots=monitor_slots, threads=threads)
        for name in full.time_names:
            full.tables[name + "_end"][...] = best2.tables[name]
    return full, rep1, rep2
