"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL/SKIP line in ``conftest.ACCEPTANCE`` (printed in
the terminal summary) before asserting, so a failing criterion still shows its
measured numbers.
"""
import json
import os
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE, ALL_VARIANTS, random_facts, random_params, small_vocab
from ekge import cli, evaluation, kg, models, projection, training
from ekge.models import Rank


def record(key, ok, detail):
    ok = bool(ok)
    ACCEPTANCE[key] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


# ------------------------------------------------------------------ 1


def rel_error(analytic, numeric):
    a = np.concatenate([v.ravel() for v in analytic.values()])
    n = np.concatenate([v.ravel() for v in numeric.values()])
    return np.linalg.norm(a - n) / max(np.linalg.norm(a), np.linalg.norm(n), 1e-12)


def test_1_gradients_match_finite_differences():
    t0 = time.perf_counter()
    worst = {}
    vocab = small_vocab(4, 2, 3)
    for kind, episodic in ALL_VARIANTS:
        errs = []
        for i in range(50):
            p = random_params(kind, episodic, vocab, rank=4, seed=i, scale=0.7)
            fact = random_facts(vocab, 1, episodic, seed=1000 + i)[0]
            analytic = models.densify(p, models.gradient(p, fact))
            numeric = oracles.fd_gradient(models.score, p, fact, h=1e-5)
            errs.append(rel_error({k: analytic[k] for k in numeric}, numeric))
        worst[models.model_name(kind, episodic)] = max(errs)
    elapsed = time.perf_counter() - t0
    top = max(worst.values())
    ok = top < 1e-4 and elapsed < 60
    record("1 gradient correctness", ok, f"11 variants x 50 instances, worst relative error {top:.2e}, "
                                         f"{elapsed:.1f} s")
    assert ok, worst


# ------------------------------------------------------------------ 2


def test_2_scores_match_loop_nest():
    worst = 0.0
    vocab = small_vocab(5, 3, 4)
    for kind, episodic in ALL_VARIANTS:
        for i in range(100):
            p = random_params(kind, episodic, vocab, rank=3, seed=i,
                              rank_t=None if kind in models.TIED_RANK_KINDS else 2)
            fact = random_facts(vocab, 1, episodic, seed=5000 + i)[0]
            want = oracles.score(p, fact)
            worst = max(worst, abs(models.score(p, fact) - want) / max(1.0, abs(want)))
    ok = worst < 1e-10
    record("2 scoring oracle", ok, f"11 variants x 100 instances, worst deviation {worst:.1e}")
    assert ok


# ------------------------------------------------------------------ 3


def test_3_circular_correlation():
    rng = np.random.default_rng(3)
    worst = 0.0
    delta_ok = True
    for d in range(2, 65):
        a, b = rng.normal(size=d), rng.normal(size=d)
        fft = models.circular_correlation(a, b, "fft")
        direct = models.circular_correlation(a, b, "direct")
        worst = max(worst, np.max(np.abs(fft - direct)))
        delta = np.zeros(d)
        delta[0] = 1.0
        delta_ok &= bool(np.array_equal(models.circular_correlation(delta, b, "direct"), b))
    hand = models.circular_correlation(np.array([1.0, 2.0]), np.array([3.0, 4.0]), "direct").tolist()
    ok = worst < 1e-10 and delta_ok and hand == [11.0, 10.0]
    record("3 circular correlation", ok, f"d=2..64 max |fft-direct| {worst:.1e}, delta identity {delta_ok}, "
                                         f"(1,2)*(3,4)={hand}")
    assert ok


# ------------------------------------------------------------------ 4


def hole_complex_pair(d, episodic, seed):
    """Random HolE params and the ComplEx params holding their conjugate DFTs."""
    vocab = small_vocab(4, 2, 3)
    hole = random_params("hole", episodic, vocab, rank=d, seed=seed)
    cx = models.init("complex", episodic, vocab, Rank(d))
    for src, dst in [("E", "E"), ("P", "P")] + ([("T", "T")] if episodic else []):
        spec = np.conj(np.fft.fft(hole.tables[src], axis=1))
        cx.tables[dst + "_re"][...] = spec.real
        cx.tables[dst + "_im"][...] = spec.imag
    return hole, cx, vocab


def test_4_model_containment():
    # Tucker with a diagonal core is DistMult with lambda on the diagonal.
    vocab = small_vocab(6, 3, 5)
    dm = random_params("distmult", True, vocab, rank=4, seed=1)
    tk = models.init("tucker", True, vocab, Rank(4))
    for name in ("E", "P", "T"):
        tk.tables[name][...] = dm.tables[name]
    tk.tables["core"][...] = 0.0
    for i in range(4):
        tk.tables["core"][i, i, i, i] = dm.tables["lam"][i]
    facts = random_facts(vocab, 100, True, seed=2)
    tucker_dev = np.max(np.abs(models.scores(tk, facts) - models.scores(dm, facts)))

    # Brute-force the HolE/ComplEx constant on small dimensions, then predict d=16.
    found = {}
    for d in (2, 3, 4):
        ratios = []
        for episodic in (False, True):
            hole, cx, v = hole_complex_pair(d, episodic, seed=d)
            f = random_facts(v, 50, episodic, seed=d + 10)
            ratios.extend(models.scores(hole, f) / models.scores(cx, f))
        ratios = np.array(ratios)
        assert np.ptp(ratios) < 1e-10 * np.max(np.abs(ratios)), "ratio is not constant"
        found[d] = float(ratios.mean())
    ds = np.array(list(found))
    slope, icpt = np.polyfit(np.log(ds), np.log(list(found.values())), 1)
    c16 = float(np.exp(icpt) * 16.0 ** slope)
    dev16 = 0.0
    for episodic in (False, True):
        hole, cx, v = hole_complex_pair(16, episodic, seed=16)
        f = random_facts(v, 100, episodic, seed=26)
        h, c = models.scores(hole, f), models.scores(cx, f)
        dev16 = max(dev16, np.max(np.abs(h - c16 * c)) / np.max(np.abs(h)))
    ok = tucker_dev < 1e-12 and dev16 < 1e-10
    record("4 model containment", ok,
           f"Tucker/DistMult max dev {tucker_dev:.1e}; c(2,3,4)="
           f"{', '.join(f'{c:.6f}' for c in found.values())} -> fit c(d)={np.exp(icpt):.4f}*d^{slope:.4f}, "
           f"c(16)={c16:.6f}, relative dev at d=16 {dev16:.1e}")
    assert ok


# ------------------------------------------------------------------ 5


def test_5_parameter_accounting():
    mismatches = []
    for dims in [(7, 3, 5), (258, 20, 72)]:
        vocab = small_vocab(*dims)
        for kind, episodic in ALL_VARIANTS:
            ranks = [Rank(4)] if kind in models.TIED_RANK_KINDS or not episodic else [Rank(4), Rank(3, 5)]
            for rank in ranks:
                p = models.init(kind, episodic, vocab, rank)
                if p.n_params() != models.param_count(kind, episodic, *dims, rank):
                    mismatches.append((kind, episodic, dims, rank))
    icews = models.param_count("distmult", True, 258, 20, 72, Rank(40))

    # closed forms per model; episodic HolE includes its N_t * r time embeddings
    def table(kind, episodic, ne, npr, nt, r, rt):
        if episodic:
            return {"distmult": (ne + npr + nt + 1) * r, "hole": (ne + npr + nt) * r,
                    "complex": 2 * (ne + npr + nt) * r, "tree": ne * r + npr * r * r + (nt + 2 * r * r) * rt,
                    "cont": (ne + npr) * r + nt * r ** 3, "tucker": (ne + npr) * r + (nt + r ** 3) * rt}[kind]
        return {"distmult": (ne + npr + 1) * r, "hole": (ne + npr) * r, "complex": 2 * (ne + npr) * r,
                "tucker": (ne + npr) * r + r ** 3, "rescal": ne * r + npr * r * r}[kind]

    formula_bad = []
    for kind, episodic in ALL_VARIANTS:
        for r, rt in [(40, 40), (5, 3)]:
            if (kind in models.TIED_RANK_KINDS or not episodic) and r != rt:
                continue
            if models.param_count(kind, episodic, 258, 20, 72, Rank(r, rt)) != table(kind, episodic, 258, 20,
                                                                                      72, r, rt):
                formula_bad.append(models.model_name(kind, episodic))
    ok = not mismatches and not formula_bad and icews == 14040
    record("5 parameter accounting", ok, f"allocation mismatches {len(mismatches)}, formula mismatches "
                                         f"{formula_bad}, episodic DistMult (258,20,72) r=40 -> {icews}")
    assert ok


# ------------------------------------------------------------------ 6


def test_6_ranks_match_enumeration():
    vocab = small_vocab(6, 2, 4)
    facts = np.unique(random_facts(vocab, 60, True, seed=6), axis=0)
    rng = np.random.default_rng(6)
    facts = facts[rng.permutation(len(facts))]
    test = facts[:12]
    filt = kg.FilterIndex(vocab, facts)
    known = set(map(tuple, facts.tolist()))
    sizes = (4, 6, 2, 6)
    checked, bad = 0, []
    for kind in models.EPISODIC_KINDS:
        p = random_params(kind, True, vocab, rank=3, seed=7)
        for slot, col in kg.SLOTS_EPISODIC.items():
            for mode in ("filtered", "raw"):
                got = evaluation.rank_facts(p, test, slot, vocab, filt, mode).tolist()
                want = [oracles.rank_by_enumeration(lambda f: models.score(p, f), f, col, sizes[col], known,
                                                    mode == "filtered") for f in test]
                checked += len(test)
                if got != want:
                    bad.append((kind, slot, mode))
    ok = not bad
    record("6 ranking oracle", ok, f"{checked} (model, slot, mode, fact) ranks checked, mismatches {bad}")
    assert ok


# ------------------------------------------------------------------ 7

MEMO_SPEC = kg.SynthSpec(n_entities=40, n_predicates=4, n_timestamps=12, n_spans=300, min_length=1,
                         max_length=2, open_fraction=0.0, seed=3)


def memorisation_dataset():
    return kg.filter_rare(kg.synth_generate(MEMO_SPEC), 3)


def test_7_memorisation():
    t0 = time.perf_counter()
    ds = memorisation_dataset()
    v = ds.vocab
    spo_counts = np.unique(ds.facts[:, 1:], axis=0, return_counts=True)[1]
    assert len(ds) <= 500 and spo_counts.max() < 3
    filt = kg.FilterIndex.from_datasets(ds)
    budget = models.param_count("cont", True, v.n_entities, v.n_predicates, v.n_timestamps, Rank(8))
    results = {}
    for kind in ("cont", "distmult", "hole", "complex"):
        per_rank = models.param_count(kind, True, v.n_entities, v.n_predicates, v.n_timestamps, Rank(1))
        rank = 8 if kind == "cont" else budget // per_rank
        cfg = training.TrainConfig(model=kind, rank=rank, lr=0.003, batch_size=64,
                                   neg_slots=("subject", "object", "timestamp"), max_epochs=500, eval_every=50,
                                   patience=100, monitor_slots=("entity", "timestamp"), seed=0)
        params, _ = training.train(kind, True, ds, ds, cfg)
        m = evaluation.evaluate(params, ds, ["entity", "timestamp"], v, filt)
        results[kind] = (rank, params.n_params(), m["timestamp"].mrr, m["entity"].mrr)
    elapsed = time.perf_counter() - t0
    cont = results["cont"]
    reaches = cont[2] >= 0.95 and cont[3] >= 0.95
    beats = all(cont[2] > r[2] and cont[3] > r[3] for k, r in results.items() if k != "cont")
    ok = reaches and beats and elapsed < 300
    table = "; ".join(f"{k} r={r} n={n} ts={ts:.3f} ent={en:.3f}" for k, (r, n, ts, en) in results.items())
    record("7 memorisation", ok, f"{len(ds)} quadruples; {table}; ConT >= 0.95: {reaches}, "
                                 f"ConT strictly best: {beats}; {elapsed:.0f} s")
    assert ok


# ------------------------------------------------------------------ 8

PROJ_SPEC = kg.SynthSpec(n_entities=50, n_predicates=3, n_timestamps=12, n_spans=120, min_length=1,
                         max_length=4, open_fraction=0.5, seed=1)


def test_8_projection():
    t0 = time.perf_counter()
    ds = kg.synth_generate(PROJ_SPEC)
    start, end = kg.build_start_end(ds)
    sem = kg.derive_semantic(ds)
    genuine, false_set = sem.subset(sem.values), sem.subset(~sem.values)
    n_closed, n_open = len(end), len(start) - len(end)
    assert n_closed >= 30 and n_open >= 30
    cfg = training.TrainConfig(model="cont", rank=8, loss="margin", margin=1.0, margin_sigmoid=False, lr=0.01,
                               batch_size=64, max_epochs=200, eval_every=50, patience=100,
                               neg_slots=("subject", "object"), seed=0)
    full, _, _ = training.train_projection("cont", start, end, cfg)

    triples = np.unique(np.r_[genuine.facts, false_set.facts], axis=0)
    per_t = lambda p: np.array([[models.score(p, (t, *f)) for t in range(ds.vocab.n_timestamps)]  # noqa: E731
                                for f in triples.tolist()]).sum(axis=1)
    s_sc, se_sc = projection.marginalize(full, "start"), projection.marginalize(full, "start-end")
    want_s = per_t(full.with_time("start"))
    want_se = want_s - per_t(full.with_time("end"))
    identity = max(np.max(np.abs(s_sc.scores(triples) - want_s)) / max(1.0, np.max(np.abs(want_s))),
                   np.max(np.abs(se_sc.scores(triples) - want_se)) / max(1.0, np.max(np.abs(want_se))))

    rs = projection.evaluate_projection(s_sc, genuine, false_set)
    rse = projection.evaluate_projection(se_sc, genuine, false_set)
    gain = rse["auprc"] - rs["auprc"]
    elapsed = time.perf_counter() - t0
    ok = identity < 1e-10 and gain >= 0.1 and \
        rse["hits10_genuine_filtered"] > rse["hits10_false_filtered"] and elapsed < 600
    record("8 projection", ok,
           f"{n_closed} closed / {n_open} open spans; identity dev {identity:.1e}; AUPRC start "
           f"{rs['auprc']:.3f} -> start-end {rse['auprc']:.3f} (gain {gain:+.3f}); start-end filtered @10 "
           f"genuine {rse['hits10_genuine_filtered']:.3f} vs false {rse['hits10_false_filtered']:.3f}; "
           f"{elapsed:.0f} s")
    assert ok


# ------------------------------------------------------------------ 9

ICEWS_ENV = "EKGE_ICEWS_PATH"


@pytest.mark.slow
def test_9_full_icews_reproduction(tmp_path):
    path = os.environ.get(ICEWS_ENV)
    if not path:
        ACCEPTANCE["9 ICEWS reproduction"] = (None, f"optional long run; set {ICEWS_ENV} to a quadruple TSV")
        pytest.skip(f"{ICEWS_ENV} not set")
    rank = int(os.environ.get("EKGE_ICEWS_RANK", "40"))
    assert cli.main(["prepare", path, "--out", str(tmp_path / "data"), "--seed", "0"]) == 0
    assert cli.main(["train", "--data", str(tmp_path / "data"), "--out", str(tmp_path / "run"), "--model", "cont",
                     "--rank", str(rank), "--max-epochs", "100", "--eval-every", "5", "--patience", "2",
                     "--seed", "0"]) == 0
    assert cli.main(["eval", "--checkpoint", str(tmp_path / "run" / "model.ckpt"), "--data",
                     str(tmp_path / "data"), "--out", str(tmp_path / "eval"), "--mode", "filtered"]) == 0
    mrr = json.loads((tmp_path / "eval" / "metrics.json").read_text())["results"]["filtered"]["entity"]["mrr"]
    ok = abs(mrr - 0.264) <= 0.05
    record("9 ICEWS reproduction", ok, f"ConT rank {rank} entity filtered MRR {mrr:.3f} (target 0.264 +- 0.05)")
    assert ok


# ------------------------------------------------------------------ 10


def test_10_pipeline_is_deterministic(tmp_path):
    src = tmp_path / "q.tsv"
    assert cli.main(["synth", "--entities", "30", "--predicates", "3", "--timestamps", "8", "--spans", "80",
                     "--seed", "4", "--out", str(src)]) == 0
    blobs = []
    for run in ("a", "b"):
        d = tmp_path / run
        assert cli.main(["prepare", str(src), "--out", str(d / "data"), "--seed", "11"]) == 0
        assert cli.main(["train", "--data", str(d / "data"), "--out", str(d / "run"), "--model", "hole-epi",
                         "--rank", "6", "--max-epochs", "6", "--eval-every", "2", "--seed", "11"]) == 0
        assert cli.main(["eval", "--checkpoint", str(d / "run" / "model.ckpt"), "--data", str(d / "data"),
                         "--out", str(d / "eval")]) == 0
        blobs.append((d / "eval" / "metrics.json").read_bytes())
    ok = blobs[0] == blobs[1]
    record("10 determinism", ok, f"two prepare->train->eval runs, metrics.json {len(blobs[0])} bytes, "
                                 f"bitwise identical: {ok}")
    assert ok
