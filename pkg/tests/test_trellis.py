import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acotagger.errors import DomainError
from acotagger.trellis import build_trellis, edge_distance, edge_distances, path_cost

from .conftest import WORDS, isinf


@pytest.mark.parametrize(
    "emission,transition,expected",
    [(0.1, 0.6, 1.667), (0.9, 0.3, 1.057), (1.0, 0.6, 1.0), (0.5, 1.0, 1.0)],
)
def test_worked_distances(emission, transition, expected):
    assert edge_distance(emission, transition) == pytest.approx(expected, abs=1e-3)


def test_zero_probability_is_infinite():
    assert isinf(edge_distance(0.0, 0.4))
    assert isinf(edge_distance(0.4, 0.0))


def test_log_base_is_ten():
    # natural log would give 0.1 ** ln(0.6) = 3.24, base 2 gives 2.09
    assert 0.1 ** math.log(0.6) == pytest.approx(3.24, abs=0.01)
    assert edge_distance(0.1, 0.6) == pytest.approx(1 / 0.6, rel=1e-12)


@pytest.mark.parametrize("bad", [(-0.1, 0.5), (0.5, 1.1), (1.5, 0.5)])
def test_domain(bad):
    with pytest.raises(DomainError):
        edge_distance(*bad)


probs = st.floats(1e-9, 1.0)


@settings(max_examples=200, deadline=None)
@given(probs, probs)
def test_distance_at_least_one(e, t):
    d = edge_distance(e, t)
    assert d >= 1.0
    if e == 1.0 or t == 1.0:
        assert d == 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 0.999), st.floats(1e-6, 0.999), st.floats(1e-6, 0.999))
def test_monotone(t, e1, e2):
    lo, hi = sorted((e1, e2))
    if hi - lo < 1e-6:
        return
    assert edge_distance(hi, t) < edge_distance(lo, t)
    assert edge_distance(t, hi) < edge_distance(t, lo)


def test_vector_form_matches_scalar():
    grid = np.linspace(0.0, 1.0, 11)
    e, t = np.meshgrid(grid, grid)
    vec = edge_distances(e, t)
    for x, y, d in zip(e.ravel(), t.ravel(), vec.ravel()):
        assert d == pytest.approx(edge_distance(x, y), rel=1e-14) or (math.isinf(d) and isinf(edge_distance(x, y)))


def test_worked_initial_edges(worked_model, worked_sentence):
    tr = build_trellis(worked_model, worked_sentence)
    d = tr.initial_edges
    assert d[0] == pytest.approx(1.667, abs=1e-3)
    assert d[3] == pytest.approx(1.057, abs=1e-3)
    assert all(math.isinf(d[k]) for k in (1, 2, 4))


def test_worked_edges_from_noun(worked_model, worked_sentence):
    tr = build_trellis(worked_model, worked_sentence)
    row = tr.edges[0, 0]
    assert row[0] == pytest.approx(1.0, abs=1e-3)
    assert all(math.isinf(row[k]) for k in range(1, 5))


def test_shape_and_heuristics(worked_model, worked_sentence):
    tr = build_trellis(worked_model, worked_sentence)
    assert tr.n == 5 and tr.width == 5
    assert tr.edges.shape == (4, 5, 5)
    for d, eta in ((tr.initial_edges, tr.initial_heuristics), (tr.edges, tr.edge_heuristics)):
        finite = np.isfinite(d)
        assert np.all(eta[~finite] == 0.0)
        assert np.allclose(eta[finite] * d[finite], 1.0, rtol=0, atol=1e-15)


def test_one_token(worked_model):
    tr = build_trellis(worked_model, ["هوا"])
    assert tr.edges.shape == (0, 5, 5)
    assert tr.initial_edges[0] == 1.0


def test_empty_sentence(worked_model):
    with pytest.raises(DomainError):
        build_trellis(worked_model, [])


def test_path_cost_prefix(worked_model):
    tr = build_trellis(worked_model, WORDS[:2])
    # 0.9 ** log10(0.3) + 1.0 ** log10(0.35) = 1.0566... + 1
    assert path_cost(tr, ["ADV", "N"]) == pytest.approx(2.057, abs=1e-3)


def test_path_cost_natural_tagging_is_infinite(worked_model, worked_sentence):
    tr = build_trellis(worked_model, worked_sentence)
    assert isinf(path_cost(tr, ["ADV", "N", "ADJ", "V", "DELM"]))


def test_path_cost_accepts_indices(worked_model, worked_sentence):
    tr = build_trellis(worked_model, WORDS[:2])
    assert path_cost(tr, [3, 0]) == path_cost(tr, ["ADV", "N"])


def test_path_cost_length_mismatch(worked_model, worked_sentence):
    tr = build_trellis(worked_model, worked_sentence)
    with pytest.raises(DomainError):
        path_cost(tr, ["N"])


def test_dump_format(worked_model):
    tr = build_trellis(worked_model, WORDS[:2])
    lines = tr.dump().splitlines()
    assert len(lines) == 5 + 25
    assert lines[0] == "0\tØ\tN\t1.66666666667"
    assert lines[1] == "0\tØ\tV\tinf"
    assert lines[5] == "1\tN\tN\t1"
