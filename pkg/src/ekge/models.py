"""Semantic and episodic scoring models with closed-form gradients.

Every model maps a fact to a real logit ``theta``; ``sigmoid(theta)`` is the
fact probability. Parameters live in named float64 tables. Tables whose first
axis is indexed by an entity, predicate or timestamp ("row tables") receive
sparse gradients; everything else (cores, DistMult weights) is dense.

All episodic models except Tree are linear in the time representation,
``theta = time_rep(t) . ftilde(s, p, o)``, which is what makes the
time-marginalised projection possible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .kg import Quadruple, Triple, Vocabulary

EPISODIC_KINDS = ("distmult", "hole", "complex", "tucker", "tree", "cont")
SEMANTIC_KINDS = ("distmult", "hole", "complex", "tucker", "rescal")
PROJECTABLE_KINDS = ("distmult", "hole", "complex", "tucker", "cont")
TIED_RANK_KINDS = ("distmult", "hole", "complex")


class ModelError(ValueError):
    pass


def parse_model(name: str) -> tuple[str, bool]:
    """``"distmult-epi"`` -> ``("distmult", True)``. Tree/ConT default episodic, RESCAL semantic."""
    name = name.lower().strip()
    if "-" in name:
        kind, tag = name.rsplit("-", 1)
        if tag not in ("epi", "sem"):
            raise ModelError(f"unknown model tag {tag!r} (use -epi or -sem)")
        episodic = tag == "epi"
    else:
        kind = name
        if kind in ("tree", "cont"):
            episodic = True
        elif kind == "rescal":
            episodic = False
        else:
            raise ModelError(f"model {name!r} needs an -epi or -sem suffix")
    check_kind(kind, episodic)
    return kind, episodic


def model_name(kind: str, episodic: bool) -> str:
    return f"{kind}-{'epi' if episodic else 'sem'}"


def check_kind(kind: str, episodic: bool) -> None:
    allowed = EPISODIC_KINDS if episodic else SEMANTIC_KINDS
    if kind not in allowed:
        raise ModelError(f"{kind!r} has no {'episodic' if episodic else 'semantic'} variant")


@dataclass(frozen=True)
class Rank:
    entity: int
    time: int | None = None

    def __post_init__(self):
        if self.time is None:
            object.__setattr__(self, "time", self.entity)
        if self.entity < 1 or self.time < 1:
            raise ModelError("ranks must be >= 1")


class TableSpec(NamedTuple):
    name: str
    shape: tuple[int, ...]
    role: str | None  # "entity", "predicate", "time" or None for dense tables
    fan_in: int
    fan_out: int


class SparseRows(NamedTuple):
    """Per-fact gradient rows for a row table (indices may repeat)."""

    idx: np.ndarray
    values: np.ndarray


def _time_names(kind: str) -> tuple[str, ...]:
    return {"complex": ("T_re", "T_im"), "cont": ("G",)}.get(kind, ("T",))


def table_specs(kind: str, episodic: bool, n_e: int, n_p: int, n_t: int, rank: Rank,
                end_time: bool = False) -> list[TableSpec]:
    """Tables allocated for a model.

    Xavier fans: row-table vectors use (dim, 1); per-item matrices and cores
    use (product of leading dims, trailing dim).
    """
    check_kind(kind, episodic)
    r, rt = rank.entity, rank.time
    if kind in TIED_RANK_KINDS and r != rt:
        raise ModelError(f"{kind} requires equal entity and time ranks")
    vec = lambda name, rows, role, dim=r: TableSpec(name, (rows, dim), role, dim, 1)  # noqa: E731
    specs: list[TableSpec] = []
    if kind == "complex":
        specs += [vec("E_re", n_e, "entity"), vec("E_im", n_e, "entity"),
                  vec("P_re", n_p, "predicate"), vec("P_im", n_p, "predicate")]
        if episodic:
            specs += [vec("T_re", n_t, "time"), vec("T_im", n_t, "time")]
    elif kind in ("distmult", "hole"):
        specs += [vec("E", n_e, "entity"), vec("P", n_p, "predicate")]
        if episodic:
            specs.append(vec("T", n_t, "time"))
        if kind == "distmult":
            specs.append(TableSpec("lam", (r,), None, r, 1))
    elif kind == "tucker":
        specs += [vec("E", n_e, "entity"), vec("P", n_p, "predicate")]
        if episodic:
            specs += [vec("T", n_t, "time", rt), TableSpec("core", (rt, r, r, r), None, rt * r * r, r)]
        else:
            specs.append(TableSpec("core", (r, r, r), None, r * r, r))
    elif kind == "rescal":
        specs += [vec("E", n_e, "entity"), TableSpec("P", (n_p, r, r), "predicate", r, r)]
    elif kind == "tree":
        specs += [vec("E", n_e, "entity"), TableSpec("P", (n_p, r, r), "predicate", r, r),
                  vec("T", n_t, "time", rt),
                  TableSpec("G1", (rt, r, r), None, rt * r, r),
                  TableSpec("G2", (r, r, rt), None, r * r, rt)]
    elif kind == "cont":
        specs += [vec("E", n_e, "entity"), vec("P", n_p, "predicate"),
                  TableSpec("G", (n_t, r, r, r), "time", r * r, r)]
    if end_time:
        if not episodic or kind not in PROJECTABLE_KINDS:
            raise ModelError(f"{model_name(kind, episodic)} cannot carry end-time tables")
        by_name = {s.name: s for s in specs}
        specs += [by_name[n]._replace(name=n + "_end") for n in _time_names(kind)]
    return specs


def param_count(kind: str, episodic: bool, n_e: int, n_p: int, n_t: int, rank: Rank) -> int:
    """Number of parameters by closed-form formula.

    Episodic HolE counts its time embeddings, ``(N_e + N_p + N_t) * r``.
    """
    check_kind(kind, episodic)
    r, rt = rank.entity, rank.time
    if episodic:
        return {
            "distmult": (n_e + n_p + n_t + 1) * r,
            "hole": (n_e + n_p + n_t) * r,
            "complex": 2 * (n_e + n_p + n_t) * r,
            "tree": n_e * r + n_p * r * r + (n_t + 2 * r * r) * rt,
            "cont": (n_e + n_p) * r + n_t * r ** 3,
            "tucker": (n_e + n_p) * r + (n_t + r ** 3) * rt,
        }[kind]
    return {
        "distmult": (n_e + n_p + 1) * r,
        "hole": (n_e + n_p) * r,
        "complex": 2 * (n_e + n_p) * r,
        "tucker": (n_e + n_p) * r + r ** 3,
        "rescal": n_e * r + n_p * r * r,
    }[kind]


@dataclass
class ModelParams:
    kind: str
    episodic: bool
    rank: Rank
    tables: dict[str, np.ndarray]
    roles: dict[str, str | None]
    vocab_sha256: str = ""

    @property
    def name(self) -> str:
        return model_name(self.kind, self.episodic)

    @property
    def time_names(self) -> tuple[str, ...]:
        return _time_names(self.kind) if self.episodic else ()

    @property
    def has_end_time(self) -> bool:
        return all(n + "_end" in self.tables for n in self.time_names) and bool(self.time_names)

    def n_params(self) -> int:
        return int(sum(a.size for a in self.tables.values()))

    def copy(self) -> "ModelParams":
        return ModelParams(self.kind, self.episodic, self.rank,
                           {k: v.copy() for k, v in self.tables.items()}, dict(self.roles),
                           self.vocab_sha256)

    def with_time(self, which: str) -> "ModelParams":
        """View whose time tables are the start (default) or end tables.

        The view shares arrays with ``self``; in-place updates propagate.
        """
        if which == "start":
            names = {n: n for n in self.tables if not n.endswith("_end")}
        elif which == "end":
            if not self.has_end_time:
                raise ModelError("model has no end-time tables")
            names = {n: n for n in self.tables if not n.endswith("_end")}
            names.update({n: n + "_end" for n in self.time_names})
        else:
            raise ValueError(which)
        return ModelParams(self.kind, self.episodic, self.rank,
                           {k: self.tables[v] for k, v in names.items()},
                           {k: self.roles[v] for k, v in names.items()}, self.vocab_sha256)

    def sq_norm(self) -> float:
        return float(sum(np.vdot(a, a) for a in self.tables.values()))


def xavier_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init(kind: str, episodic: bool, vocab: Vocabulary, rank: Rank, seed: int = 0,
         end_time: bool = False) -> ModelParams:
    """Xavier-uniform initialisation, deterministic per seed."""
    rng = np.random.default_rng(seed)
    specs = table_specs(kind, episodic, vocab.n_entities, vocab.n_predicates, vocab.n_timestamps,
                        rank, end_time=end_time)
    tables, roles = {}, {}
    for spec in specs:
        b = xavier_bound(spec.fan_in, spec.fan_out)
        tables[spec.name] = rng.uniform(-b, b, size=spec.shape)
        roles[spec.name] = spec.role
    return ModelParams(kind, episodic, rank, tables, roles, vocab.sha256())


# ------------------------------------------------------------ circular algebra

def _direct_index(d: int) -> np.ndarray:
    return (np.arange(d)[:, None] + np.arange(d)[None, :]) % d


def circular_correlation(a, b, method: str = "fft") -> np.ndarray:
    """``[a * b]_k = sum_i a_i b_{(k+i) mod d}`` over the last axis."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    d = a.shape[-1]
    if method == "direct":
        return np.einsum("...i,...ki->...k", a, b[..., _direct_index(d)])
    return np.fft.irfft(np.conj(np.fft.rfft(a)) * np.fft.rfft(b), n=d)


def circular_convolution(a, b) -> np.ndarray:
    """``[a (*) b]_k = sum_i a_i b_{(k-i) mod d}`` over the last axis."""
    d = np.shape(a)[-1]
    return np.fft.irfft(np.fft.rfft(a) * np.fft.rfft(b), n=d)


# --------------------------------------------------------------------- scoring

def _cols(facts: np.ndarray, episodic: bool):
    if episodic:
        return facts[:, 0], facts[:, 1], facts[:, 2], facts[:, 3]
    return None, facts[:, 0], facts[:, 1], facts[:, 2]


def _check_facts(params: ModelParams, facts) -> np.ndarray:
    facts = np.asarray(facts, dtype=np.int64)
    if facts.ndim == 1:
        facts = facts[None]
    want = 4 if params.episodic else 3
    if facts.shape[1] != want:
        raise ModelError(f"{params.name} scores {'quadruples' if want == 4 else 'triples'}, "
                         f"got facts of width {facts.shape[1]}")
    return facts


def _complex_prod(params, s, p, o):
    tb = params.tables
    es = tb["E_re"][s] + 1j * tb["E_im"][s]
    ep = tb["P_re"][p] + 1j * tb["P_im"][p]
    eo = tb["E_re"][o] + 1j * tb["E_im"][o]
    return es, ep, eo


def time_rep(params: ModelParams, t) -> np.ndarray:
    """Time representation entering ``theta = time_rep . ftilde`` (batch, D)."""
    tb = params.tables
    t = np.asarray(t)
    if params.kind == "complex":
        return np.concatenate([tb["T_re"][t], tb["T_im"][t]], axis=-1)
    if params.kind == "cont":
        return tb["G"][t].reshape(len(t), -1)
    if params.kind in ("distmult", "hole", "tucker"):
        return tb["T"][t]
    raise ModelError(f"{params.kind} is not linear in a single time representation")


def ftilde(params: ModelParams, s, p, o) -> np.ndarray:
    """The (s, p, o) factor the time representation is dotted with (batch, D)."""
    tb = params.tables
    kind = params.kind
    if kind == "distmult":
        return tb["lam"] * tb["E"][s] * tb["P"][p] * tb["E"][o]
    if kind == "hole":
        return circular_correlation(tb["P"][p], circular_correlation(tb["E"][s], tb["E"][o]))
    if kind == "complex":
        es, ep, eo = _complex_prod(params, s, p, o)
        z = es * ep * np.conj(eo)
        return np.concatenate([z.real, -z.imag], axis=-1)
    if kind == "tucker":
        return np.einsum("ijkl,bj,bk,bl->bi", tb["core"], tb["E"][s], tb["P"][p], tb["E"][o],
                         optimize=True)
    if kind == "cont":
        es, ep, eo = tb["E"][s], tb["P"][p], tb["E"][o]
        return (es[:, :, None, None] * ep[:, None, :, None] * eo[:, None, None, :]).reshape(len(es), -1)
    raise ModelError(f"{kind} has no ftilde factorisation")


def _tree_parts(params, t, s, o):
    tb = params.tables
    at, es, eo = tb["T"][t], tb["E"][s], tb["E"][o]
    left = np.einsum("bi,bj,ijk->bk", at, es, tb["G1"], optimize=True)
    right = np.einsum("kmn,bm,bn->bk", tb["G2"], eo, at, optimize=True)
    return at, es, eo, left, right


def scores(params: ModelParams, facts) -> np.ndarray:
    """Logits for a batch of facts, shape (n,)."""
    facts = _check_facts(params, facts)
    t, s, p, o = _cols(facts, params.episodic)
    tb = params.tables
    kind = params.kind
    if params.episodic:
        if kind == "tree":
            _, _, _, left, right = _tree_parts(params, t, s, o)
            return np.einsum("bk,bkl,bl->b", left, tb["P"][p], right)
        return np.einsum("bd,bd->b", time_rep(params, t), ftilde(params, s, p, o))
    if kind == "distmult":
        return ftilde(params, s, p, o).sum(axis=1)
    if kind == "complex":
        es, ep, eo = _complex_prod(params, s, p, o)
        return (es * ep * np.conj(eo)).real.sum(axis=1)
    if kind == "hole":
        return np.einsum("bd,bd->b", tb["P"][p], circular_correlation(tb["E"][s], tb["E"][o]))
    if kind == "tucker":
        return np.einsum("ijk,bi,bj,bk->b", tb["core"], tb["E"][s], tb["P"][p], tb["E"][o],
                         optimize=True)
    if kind == "rescal":
        return np.einsum("bi,bij,bj->b", tb["E"][s], tb["P"][p], tb["E"][o])
    raise ModelError(kind)


def _fact_array(params: ModelParams, fact) -> np.ndarray:
    want = 4 if params.episodic else 3
    if isinstance(fact, Quadruple) or isinstance(fact, Triple):
        if isinstance(fact, Quadruple) != params.episodic:
            raise ModelError(f"{params.name} cannot score a {type(fact).__name__}")
        fact = fact[:want]
    fact = np.asarray(fact, dtype=np.int64).reshape(-1)
    if len(fact) != want:
        raise ModelError(f"{params.name} expects a {'quadruple' if want == 4 else 'triple'}")
    return fact[None]


def score(params: ModelParams, fact) -> float:
    """Logit of a single fact (Quadruple, Triple or bare index tuple)."""
    return float(scores(params, _fact_array(params, fact))[0])


# -------------------------------------------------------------------- gradients

def _rows(idx_list, val_list) -> SparseRows:
    return SparseRows(np.concatenate(idx_list), np.concatenate(val_list, axis=0))


def _ftilde_backward(params: ModelParams, s, p, o, g: np.ndarray) -> dict:
    """Gradients of ``sum_b g_b . ftilde_b`` wrt the (s, p, o) parameters."""
    tb = params.tables
    kind = params.kind
    if kind == "distmult":
        lam, es, ep, eo = tb["lam"], tb["E"][s], tb["P"][p], tb["E"][o]
        return {
            "lam": np.einsum("bd,bd,bd,bd->d", g, es, ep, eo),
            "E": _rows([s, o], [g * lam * ep * eo, g * lam * es * ep]),
            "P": SparseRows(p, g * lam * es * eo),
        }
    if kind == "hole":
        es, ep, eo = tb["E"][s], tb["P"][p], tb["E"][o]
        c = circular_correlation(es, eo)
        g_c = circular_convolution(g, ep)
        return {
            "P": SparseRows(p, circular_correlation(g, c)),
            "E": _rows([s, o], [circular_correlation(g_c, eo), circular_convolution(g_c, es)]),
        }
    if kind == "complex":
        r = g.shape[1] // 2
        w = g[:, :r] + 1j * g[:, r:]
        es, ep, eo = _complex_prod(params, s, p, o)
        cs = w * ep * np.conj(eo)
        cp = w * es * np.conj(eo)
        do = w * es * ep
        return {
            "E_re": _rows([s, o], [cs.real, do.real]),
            "E_im": _rows([s, o], [-cs.imag, do.imag]),
            "P_re": SparseRows(p, cp.real),
            "P_im": SparseRows(p, -cp.imag),
        }
    if kind == "tucker":
        G, es, ep, eo = tb["core"], tb["E"][s], tb["P"][p], tb["E"][o]
        return {
            "core": np.einsum("bi,bj,bk,bl->ijkl", g, es, ep, eo, optimize=True),
            "E": _rows([s, o], [np.einsum("ijkl,bi,bk,bl->bj", G, g, ep, eo, optimize=True),
                                np.einsum("ijkl,bi,bj,bk->bl", G, g, es, ep, optimize=True)]),
            "P": SparseRows(p, np.einsum("ijkl,bi,bj,bl->bk", G, g, es, eo, optimize=True)),
        }
    if kind == "cont":
        r = params.rank.entity
        g3 = g.reshape(len(g), r, r, r)
        es, ep, eo = tb["E"][s], tb["P"][p], tb["E"][o]
        return {
            "E": _rows([s, o], [np.einsum("bijk,bj,bk->bi", g3, ep, eo),
                                np.einsum("bijk,bi,bj->bk", g3, es, ep)]),
            "P": SparseRows(p, np.einsum("bijk,bi,bk->bj", g3, es, eo)),
        }
    raise ModelError(kind)


def ftilde_vjp(params: ModelParams, s, p, o, g) -> dict:
    """Public vector-Jacobian product of :func:`ftilde`."""
    return _ftilde_backward(params, np.asarray(s), np.asarray(p), np.asarray(o), np.asarray(g, dtype=np.float64))


def _time_backward(params: ModelParams, t, f: np.ndarray, up: np.ndarray) -> dict:
    g = up[:, None] * f
    if params.kind == "complex":
        r = f.shape[1] // 2
        return {"T_re": SparseRows(t, g[:, :r]), "T_im": SparseRows(t, g[:, r:])}
    if params.kind == "cont":
        r = params.rank.entity
        return {"G": SparseRows(t, g.reshape(len(t), r, r, r))}
    return {"T": SparseRows(t, g)}


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        if k in out:
            u = out[k]
            if isinstance(u, SparseRows):
                out[k] = _rows([u.idx, v.idx], [u.values, v.values])
            else:
                out[k] = u + v
        else:
            out[k] = v
    return out


def gradients(params: ModelParams, facts, upstream) -> dict:
    """d(sum_b upstream_b * theta_b)/dparams for a batch of facts.

    Row tables come back as :class:`SparseRows` (one row per occurrence, not
    yet aggregated); dense tables as arrays.
    """
    facts = _check_facts(params, facts)
    up = np.broadcast_to(np.asarray(upstream, dtype=np.float64), (len(facts),))
    t, s, p, o = _cols(facts, params.episodic)
    tb = params.tables
    kind = params.kind
    if params.episodic and kind == "tree":
        at, es, eo, left, right = _tree_parts(params, t, s, o)
        Pp = tb["P"][p]
        dleft = up[:, None] * np.einsum("bkl,bl->bk", Pp, right)
        dright = up[:, None] * np.einsum("bkl,bk->bl", Pp, left)
        G1, G2 = tb["G1"], tb["G2"]
        dt = (np.einsum("bk,bj,ijk->bi", dleft, es, G1, optimize=True)
              + np.einsum("bk,kmn,bm->bn", dright, G2, eo, optimize=True))
        return {
            "P": SparseRows(p, up[:, None, None] * left[:, :, None] * right[:, None, :]),
            "T": SparseRows(t, dt),
            "E": _rows([s, o], [np.einsum("bk,bi,ijk->bj", dleft, at, G1, optimize=True),
                                np.einsum("bk,kmn,bn->bm", dright, G2, at, optimize=True)]),
            "G1": np.einsum("bi,bj,bk->ijk", at, es, dleft, optimize=True),
            "G2": np.einsum("bk,bm,bn->kmn", dright, eo, at, optimize=True),
        }
    if params.episodic:
        u = time_rep(params, t)
        f = ftilde(params, s, p, o)
        return _merge(_time_backward(params, t, f, up), _ftilde_backward(params, s, p, o, up[:, None] * u))
    if kind in ("distmult", "complex"):
        r = params.rank.entity
        width = 2 * r if kind == "complex" else r
        u = np.zeros((len(facts), width))
        u[:, :r] = 1.0
        return _ftilde_backward(params, s, p, o, up[:, None] * u)
    if kind == "hole":
        es, ep, eo = tb["E"][s], tb["P"][p], tb["E"][o]
        g_c = up[:, None] * ep
        return {
            "P": SparseRows(p, up[:, None] * circular_correlation(es, eo)),
            "E": _rows([s, o], [circular_correlation(g_c, eo), circular_convolution(g_c, es)]),
        }
    if kind == "tucker":
        G, es, ep, eo = tb["core"], tb["E"][s], tb["P"][p], tb["E"][o]
        u = up[:, None]
        return {
            "core": np.einsum("b,bi,bj,bk->ijk", up, es, ep, eo, optimize=True),
            "E": _rows([s, o], [u * np.einsum("ijk,bj,bk->bi", G, ep, eo, optimize=True),
                                u * np.einsum("ijk,bi,bj->bk", G, es, ep, optimize=True)]),
            "P": SparseRows(p, u * np.einsum("ijk,bi,bk->bj", G, es, eo, optimize=True)),
        }
    if kind == "rescal":
        es, Pp, eo = tb["E"][s], tb["P"][p], tb["E"][o]
        u = up[:, None]
        return {
            "P": SparseRows(p, up[:, None, None] * es[:, :, None] * eo[:, None, :]),
            "E": _rows([s, o], [u * np.einsum("bij,bj->bi", Pp, eo),
                                u * np.einsum("bij,bi->bj", Pp, es)]),
        }
    raise ModelError(kind)


def gradient(params: ModelParams, fact, upstream: float = 1.0) -> dict:
    """Gradient of ``upstream * theta`` for one fact."""
    return gradients(params, _fact_array(params, fact), upstream)


def densify(params: ModelParams, grads: dict) -> dict[str, np.ndarray]:
    """Aggregate a gradient dict into full-size dense arrays."""
    out = {}
    for name, arr in params.tables.items():
        g = grads.get(name)
        dense = np.zeros_like(arr)
        if isinstance(g, SparseRows):
            np.add.at(dense, g.idx, g.values)
        elif g is not None:
            dense += g
        out[name] = dense
    return out
