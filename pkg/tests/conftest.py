import numpy as np
import pytest

from ekge import kg, models

ALL_VARIANTS = [(k, True) for k in models.EPISODIC_KINDS] + [(k, False) for k in models.SEMANTIC_KINDS]
VARIANT_IDS = [models.model_name(k, e) for k, e in ALL_VARIANTS]

ACCEPTANCE = {}


def small_vocab(n_e=6, n_p=2, n_t=4):
    return kg.Vocabulary([f"e{i}" for i in range(n_e)], [f"p{i}" for i in range(n_p)],
                         [f"2020-01-{i + 1:02d}" for i in range(n_t)])


def random_facts(vocab, n, episodic=True, seed=0):
    rng = np.random.default_rng(seed)
    cols = [rng.integers(0, vocab.n_entities, n), rng.integers(0, vocab.n_predicates, n),
            rng.integers(0, vocab.n_entities, n)]
    if episodic:
        cols.insert(0, rng.integers(0, vocab.n_timestamps, n))
    return np.stack(cols, axis=1).astype(np.int64)


def random_params(kind, episodic, vocab, rank=4, seed=0, rank_t=None, end_time=False, scale=1.0):
    """Xavier tables, then rescaled so scores are O(1) and well away from zero."""
    p = models.init(kind, episodic, vocab, models.Rank(rank, rank_t), seed=seed, end_time=end_time)
    rng = np.random.default_rng(seed + 1000)
    for name, arr in p.tables.items():
        arr[...] = scale * rng.normal(size=arr.shape)
    return p


@pytest.fixture
def vocab():
    return small_vocab()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok is True else 'FAIL' if ok is False else 'SKIP'}  "
                                    f"criterion {key}: {detail}")
