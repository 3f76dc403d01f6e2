import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acotagger.corpus import (
    Corpus,
    Sentence,
    SplitSpec,
    Token,
    generate_synthetic,
    read_corpus,
    split_corpus,
    write_corpus,
)
from acotagger.errors import CorpusFormatError, EmptyCorpusError, GenerationError, SplitError
from acotagger.model import HmmModel

from .conftest import corpus_of


def test_reads_one_block():
    corpus = read_corpus("امروز\tADV\nهوا\tN\n\n".encode())
    assert len(corpus) == 1
    assert corpus.sentences[0].surfaces == ["امروز", "هوا"]
    assert corpus.tagset == ("ADV", "N")


def test_reads_binary_stream():
    corpus = read_corpus(io.BytesIO(b"a\tX\n"))
    assert corpus.sentences[0].tags == ["X"]


def test_missing_tab_names_line_1():
    with pytest.raises(CorpusFormatError, match="line 1") as exc:
        read_corpus(b"word\n")
    assert exc.value.line == 1


def test_too_many_fields():
    with pytest.raises(CorpusFormatError, match="line 3"):
        read_corpus(b"a\tX\nb\tY\nc\tZ\textra\n")


def test_empty_file():
    with pytest.raises(EmptyCorpusError):
        read_corpus(b"")
    with pytest.raises(EmptyCorpusError):
        read_corpus(b"\n\n")


def test_invalid_utf8():
    with pytest.raises(CorpusFormatError):
        read_corpus(b"\xff\tX\n")


def test_block_counting():
    data = b"a\tX\n\nb\tX\nc\tY\n\nd\tX\ne\tY\nf\tZ\n"
    corpus = read_corpus(data)
    assert [len(s) for s in corpus.sentences] == [1, 2, 3]
    assert corpus.token_count == 6


def test_tagset_first_appearance_is_stable():
    data = b"a\tZ\nb\tA\n\nc\tM\nd\tA\n"
    assert read_corpus(data).tagset == ("Z", "A", "M")
    assert read_corpus(data).tagset == read_corpus(data).tagset


def test_comment_lines_are_skipped():
    corpus = read_corpus(b"# infeasible\na\tX\n\n#\tPUNC\n")
    assert [s.surfaces for s in corpus.sentences] == [["a"], ["#"]]


def test_writer_emits_single_trailing_lf():
    corpus = corpus_of([("a", "X"), ("b", "Y")], [("c", "X")])
    assert write_corpus(corpus) == b"a\tX\nb\tY\n\nc\tX\n"


def test_token_rejects_tabs():
    with pytest.raises(ValueError):
        Token("a\tb", "X")
    with pytest.raises(ValueError):
        Sentence(())


surface = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), min_size=1, max_size=6).filter(
    lambda s: not s.startswith("#") and s.strip() == s and s
)
tag = st.sampled_from(["N", "V", "ADJ", "PUNC", "Ø"])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.tuples(surface, tag), min_size=1, max_size=5), min_size=1, max_size=6))
def test_round_trip(blocks):
    text = "\n".join("".join(f"{w}\t{t}\n" for w, t in block) for block in blocks).encode()
    assert write_corpus(read_corpus(text)) == text


def test_round_trip_ignores_trailing_whitespace():
    text = b"a\tX\n\nb\tY\n\n\n"
    assert write_corpus(read_corpus(text)) == text.rstrip() + b"\n"


def _corpus(n):
    return corpus_of(*[[(f"w{i}", "X")] for i in range(n)])


@pytest.mark.parametrize("n,train,test", [(10, 8, 2), (5, 4, 1), (2, 1, 1)])
def test_split_sizes(n, train, test):
    a, b = split_corpus(_corpus(n), SplitSpec(0.8, seed=3))
    assert (len(a), len(b)) == (train, test)


def test_split_is_deterministic():
    corpus = _corpus(50)
    a1, b1 = split_corpus(corpus, SplitSpec(0.8, seed=11))
    a2, b2 = split_corpus(corpus, SplitSpec(0.8, seed=11))
    assert write_corpus(a1) == write_corpus(a2)
    assert write_corpus(b1) == write_corpus(b2)


def test_split_seed_changes_order():
    corpus = _corpus(50)
    a1, _ = split_corpus(corpus, SplitSpec(0.8, seed=1))
    a2, _ = split_corpus(corpus, SplitSpec(0.8, seed=2))
    assert write_corpus(a1) != write_corpus(a2)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 60), st.floats(0.05, 0.95), st.integers(0, 2**64 - 1))
def test_split_partitions(n, fraction, seed):
    corpus = _corpus(n)
    train, test = split_corpus(corpus, SplitSpec(fraction, seed))
    ids = [id(s) for s in train.sentences] + [id(s) for s in test.sentences]
    assert sorted(ids) == sorted(id(s) for s in corpus.sentences)
    assert len(set(ids)) == n
    assert train.tagset == test.tagset == corpus.tagset


def test_split_needs_two_sentences():
    with pytest.raises(SplitError):
        split_corpus(_corpus(1), SplitSpec())


def test_split_spec_range():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            SplitSpec(bad)


def _single_tag_model():
    return HmmModel(("T",), {"T": 1.0}, {("T", "T"): 1.0}, {("a", "T"): 1.0}, frozenset({"a"}))


def test_synthetic_degenerate():
    corpus = generate_synthetic(_single_tag_model(), 2, 1, seed=5)
    assert write_corpus(corpus) == b"a\tT\n\na\tT\n"


def test_synthetic_deterministic():
    from acotagger.model import random_model

    m = random_model(3, 10, seed=4)
    assert write_corpus(generate_synthetic(m, 30, 8, 9)) == write_corpus(generate_synthetic(m, 30, 8, 9))
    assert write_corpus(generate_synthetic(m, 30, 8, 9)) != write_corpus(generate_synthetic(m, 30, 8, 10))


def test_synthetic_lengths_within_bounds():
    from acotagger.model import random_model

    corpus = generate_synthetic(random_model(3, 10, seed=4), 300, 7, 1)
    lengths = Counter(len(s) for s in corpus.sentences)
    assert set(lengths) == set(range(1, 8))


def test_synthetic_matches_stationary_distribution():
    # Chain A<->B<->C with rows (.6 .4 0), (.2 .6 .2), (0 .4 .6).
    # Solving pi = pi T by hand: .4 pA = .2 pB and .4 pC = .2 pB, so
    # pB = 2 pA = 2 pC and the stationary distribution is (1/4, 1/2, 1/4).
    # Starting in it makes every position's marginal equal to it.
    stationary = {"A": 0.25, "B": 0.5, "C": 0.25}
    rows = {"A": (0.6, 0.4, 0.0), "B": (0.2, 0.6, 0.2), "C": (0.0, 0.4, 0.6)}
    tags = ("A", "B", "C")
    model = HmmModel(
        tagset=tags,
        pi=stationary,
        transition={(a, b): p for a in tags for b, p in zip(tags, rows[a]) if p},
        emission={(f"{t.lower()}{k}", t): 0.5 for t in tags for k in range(2)},
        vocabulary=frozenset(f"{t.lower()}{k}" for t in tags for k in range(2)),
    )
    corpus = generate_synthetic(model, 1000, 10, seed=2024)
    counts = Counter(t for s in corpus.sentences for t in s.tags)
    total = sum(counts.values())
    for t in tags:
        assert abs(counts[t] / total - stationary[t]) < 0.05


def test_synthetic_rejects_mute_reachable_tag():
    model = HmmModel(("A", "B"), {"A": 1.0}, {("A", "B"): 1.0, ("B", "A"): 1.0}, {("x", "A"): 1.0}, frozenset({"x"}))
    with pytest.raises(GenerationError, match="'B'"):
        generate_synthetic(model, 5, 3, seed=0)


def test_synthetic_ignores_unreachable_mute_tag():
    model = HmmModel(("A", "B"), {"A": 1.0}, {("A", "A"): 1.0}, {("x", "A"): 1.0}, frozenset({"x"}))
    corpus = generate_synthetic(model, 5, 3, seed=0)
    assert all(t == "A" for s in corpus.sentences for t in s.tags)


def test_corpus_rejects_unknown_tag():
    with pytest.raises(ValueError):
        Corpus((Sentence.from_pairs([("a", "X")]),), ("Y",))
