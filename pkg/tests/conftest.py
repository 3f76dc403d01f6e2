import itertools
import math

import numpy as np
import pytest

from acotagger.corpus import Corpus, Sentence
from acotagger.model import HmmModel, random_model
from acotagger.trellis import edge_distance

TAGS = ("N", "V", "ADJ", "ADV", "DELM")
WORDS = ("امروز", "هوا", "برفی", "است", ".")

# Emission table: rows are tags, columns follow WORDS.
EMISSION = {
    "N": (0.1, 1.0, 0.2, 0.0, 0.0),
    "V": (0.0, 0.0, 0.0, 1.0, 0.0),
    "ADJ": (0.0, 0.0, 0.8, 0.0, 0.0),
    "ADV": (0.9, 0.0, 0.0, 0.0, 0.0),
    "DELM": (0.0, 0.0, 0.0, 0.0, 1.0),
}
# Transition table: row = previous tag, column = next tag, both in TAGS order.
TRANSITION = (
    (0.6, 0.05, 0.2, 0.05, 0.2),
    (0.7, 0.1, 0.2, 0.0, 0.0),
    (0.5, 0.0, 0.1, 0.15, 0.25),
    (0.35, 0.05, 0.3, 0.1, 0.2),
    (0.2, 0.7, 0.05, 0.05, 0.0),
)
PI = (0.6, 0.01, 0.04, 0.3, 0.05)


def make_worked_model():
    return HmmModel(
        tagset=TAGS,
        pi={t: p for t, p in zip(TAGS, PI) if p},
        transition={(a, b): TRANSITION[i][j] for i, a in enumerate(TAGS) for j, b in enumerate(TAGS) if TRANSITION[i][j]},
        emission={(w, t): EMISSION[t][k] for t in TAGS for k, w in enumerate(WORDS) if EMISSION[t][k]},
        vocabulary=frozenset(WORDS),
    )


@pytest.fixture
def worked_model():
    return make_worked_model()


@pytest.fixture
def worked_sentence():
    return list(WORDS)


def brute_force(model, surfaces, objective):
    """Pure-Python exhaustive search, independent of the library's oracle and decoders.

    Returns every optimal sequence (as a set) and the optimal score. Scores
    are exact products / sums computed straight from the probability dicts.
    """
    best, best_seqs = None, set()
    for seq in itertools.product(model.tagset, repeat=len(surfaces)):
        if objective == "max_probability":
            p = model.pi.get(seq[0], 0.0) * _emit(model, surfaces[0], seq[0])
            for k in range(1, len(seq)):
                p *= model.transition.get((seq[k - 1], seq[k]), 0.0) * _emit(model, surfaces[k], seq[k])
            s = p
            improves = best is None or s > best
        else:
            s = edge_distance(_emit(model, surfaces[0], seq[0]), model.pi.get(seq[0], 0.0))
            for k in range(1, len(seq)):
                s += edge_distance(_emit(model, surfaces[k], seq[k]), model.transition.get((seq[k - 1], seq[k]), 0.0))
            improves = best is None or s < best
        if improves:
            best, best_seqs = s, {seq}
        elif s == best:
            best_seqs.add(seq)
    return best_seqs, best


def _emit(model, w, t):
    if w in model.vocabulary:
        return model.emission.get((w, t), 0.0)
    return 1.0 / len(model.tagset)


def random_instance(rng, max_tags=4, max_len=6, max_vocab=20):
    """Random all-positive model plus a sentence over its vocabulary."""
    b = int(rng.integers(2, max_tags + 1))
    v = int(rng.integers(3, max_vocab + 1))
    n = int(rng.integers(1, max_len + 1))
    model = random_model(b, v, seed=int(rng.integers(2**32)), emission_concentration=1.0, transition_concentration=1.0)
    words = [f"w{k}" for k in rng.integers(0, v, n)]
    return model, words


def sparse_random_model(rng, b, v):
    """Random model with some exact zeros and some quantised (tie-prone) rows."""
    def row(width):
        counts = rng.integers(0, 4, width).astype(float)
        if counts.sum() == 0:
            counts[rng.integers(width)] = 1.0
        return counts / counts.sum()

    tags = tuple(f"T{i}" for i in range(b))
    words = [f"w{i}" for i in range(v)]
    pi = row(b)
    trans = np.array([row(b) for _ in range(b)])
    emit = np.array([row(v) for _ in range(b)])
    return HmmModel(
        tagset=tags,
        pi={t: pi[i] for i, t in enumerate(tags) if pi[i]},
        transition={(a, c): trans[i, j] for i, a in enumerate(tags) for j, c in enumerate(tags) if trans[i, j]},
        emission={(w, t): emit[j, i] for j, t in enumerate(tags) for i, w in enumerate(words) if emit[j, i]},
        vocabulary=frozenset(words),
    )


def corpus_of(*sentences):
    return Corpus.from_sentences([Sentence.from_pairs(s) for s in sentences])


def isinf(x):
    return math.isinf(x) and x > 0


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
