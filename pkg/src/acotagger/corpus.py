"""Tagged corpus reading, writing, splitting and synthetic generation.

File format: UTF-8, one ``surface<TAB>tag`` line per token, sentences
separated by a single empty line, exactly one trailing LF after the last
sentence.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, BinaryIO, Iterable, Sequence

import numpy as np

from .errors import CorpusFormatError, EmptyCorpusError, GenerationError, SplitError

if TYPE_CHECKING:
    from .model import HmmModel


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str | None = None

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch in self.surface for ch in "\t\n\r"):
            raise ValueError(f"token surface contains tab or newline: {self.surface!r}")


@dataclass(frozen=True, eq=False)
class Sentence:
    """Ordered tokens. Equality is by identity so splits can be checked as partitions."""

    tokens: tuple[Token, ...]

    def __post_init__(self):
        if len(self.tokens) < 1:
            raise ValueError("sentence must contain at least one token")

    def __len__(self):
        return len(self.tokens)

    @property
    def surfaces(self) -> list[str]:
        return [tok.surface for tok in self.tokens]

    @property
    def tags(self) -> list[str | None]:
        return [tok.tag for tok in self.tokens]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str | None]]) -> "Sentence":
        return cls(tuple(Token(s, t) for s, t in pairs))

    @classmethod
    def from_surfaces(cls, surfaces: Iterable[str]) -> "Sentence":
        return cls(tuple(Token(s) for s in surfaces))


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    tagset: tuple[str, ...] = field(default=())

    def __post_init__(self):
        known = set(self.tagset)
        for sent in self.sentences:
            for tok in sent.tokens:
                if tok.tag is not None and tok.tag not in known:
                    raise ValueError(f"tag {tok.tag!r} not in corpus tagset")

    def __len__(self):
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sentence]) -> "Corpus":
        """Build a corpus whose tagset is the first-appearance order of its tags."""
        return cls(tuple(sentences), _collect_tagset(sentences))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _collect_tagset(sentences: Iterable[Sentence]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for sent in sentences:
        for tok in sent.tokens:
            if tok.tag is not None and tok.tag not in seen:
                seen[tok.tag] = None
    return tuple(seen)


def _as_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc


def read_corpus(source: BinaryIO | bytes | str) -> Corpus:
    """Parse a tagged corpus.

    ``source`` may be a binary stream, raw bytes, or already-decoded text.
    Runs of several blank lines are treated as one separator. A line that
    starts with ``#`` and has no TAB is a comment (the tagger marks
    infeasible sentences this way).
    """
    text = _as_text(source)
    sentences: list[Sentence] = []
    block: list[Token] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if line == "":
            if block:
                sentences.append(Sentence(tuple(block)))
                block = []
            continue
        if line.startswith("#") and "\t" not in line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            what = "missing TAB separator" if len(fields) == 1 else f"expected 2 fields, found {len(fields)}"
            raise CorpusFormatError(what, line=lineno)
        surface, tag = fields
        if not surface or not tag:
            raise CorpusFormatError("empty surface or tag", line=lineno)
        block.append(Token(surface, tag))
    if block:
        sentences.append(Sentence(tuple(block)))
    if not sentences:
        raise EmptyCorpusError("corpus contains no sentences")
    return Corpus.from_sentences(sentences)


def read_corpus_file(path: str | os.PathLike) -> Corpus:
    with open(path, "rb") as fh:
        return read_corpus(fh)


def read_raw(source) -> list[Sentence]:
    """Untagged input: one sentence per line, whitespace-separated tokens."""
    text = _as_text(source)
    return [Sentence.from_surfaces(line.split()) for line in text.splitlines() if line.strip()]


def format_sentence(surfaces: Sequence[str], tags: Sequence[str]) -> str:
    return "".join(f"{s}\t{t}\n" for s, t in zip(surfaces, tags))


def write_corpus(corpus: Corpus, sink: BinaryIO | None = None) -> bytes:
    """Serialize ``corpus``; write to ``sink`` if given and return the bytes."""
    blocks = []
    for sent in corpus.sentences:
        if any(tok.tag is None for tok in sent.tokens):
            raise ValueError("cannot write untagged tokens in corpus format")
        blocks.append(format_sentence(sent.surfaces, sent.tags))
    data = "\n".join(blocks).encode("utf-8")
    if sink is not None:
        sink.write(data)
    return data


def write_corpus_file(corpus: Corpus, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        write_corpus(corpus, fh)


def train_size(n: int, fraction: float) -> int:
    # round first so 0.7 * 10 does not become ceil(7.000000000000001) = 8
    size = math.ceil(round(fraction * n, 9))
    return min(max(size, 1), n - 1)


def split_corpus(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Seeded shuffle, then the first ``ceil(fraction * n)`` sentences train.

    Both halves keep the parent tagset. The train size is clamped to
    ``[1, n - 1]`` so neither half is ever empty.
    """
    n = len(corpus.sentences)
    if n < 2:
        raise SplitError(f"need at least 2 sentences to split, got {n}")
    order = np.random.default_rng(spec.seed).permutation(n)
    k = train_size(n, spec.train_fraction)
    train = tuple(corpus.sentences[i] for i in order[:k])
    test = tuple(corpus.sentences[i] for i in order[k:])
    return Corpus(train, corpus.tagset), Corpus(test, corpus.tagset)


def _reachable_tags(pi: np.ndarray, trans: np.ndarray) -> np.ndarray:
    reach = pi > 0
    frontier = reach.copy()
    while frontier.any():
        nxt = (trans[frontier] > 0).any(axis=0) & ~reach
        reach |= nxt
        frontier = nxt
    return reach


def generate_synthetic(model: "HmmModel", sentence_count: int, max_length: int, seed: int) -> Corpus:
    """Sample a tagged corpus from ``model``.

    Sentence lengths are uniform on ``[1, max_length]``; tags follow the
    initial and transition distributions, surfaces the emission row of
    each tag. Output is a pure function of the arguments.
    """
    if sentence_count < 1:
        raise GenerationError("sentence_count must be positive")
    if max_length < 1:
        raise GenerationError("max_length must be positive")
    tags = model.tagset
    pi = model.pi_vector
    trans = model.transition_matrix
    surfaces, emit = model.emission_columns()

    reach = _reachable_tags(pi, trans)
    emit_mass = emit.sum(axis=0)
    for j, tag in enumerate(tags):
        if reach[j] and emit_mass[j] <= 0:
            raise GenerationError(f"tag {tag!r} is reachable but emits no surface")

    pi_cdf = np.cumsum(pi)
    trans_cdf = np.cumsum(trans, axis=1)
    emit_cdf = np.cumsum(emit, axis=0)

    def draw(cdf: np.ndarray, u: float) -> int:
        # scale by the row total so unnormalised rows still sample correctly
        idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
        return min(idx, len(cdf) - 1)

    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(sentence_count):
        length = int(rng.integers(1, max_length + 1))
        u = rng.random(2 * length)
        tag_idx = draw(pi_cdf, u[0])
        pairs = []
        for pos in range(length):
            if pos > 0:
                row = trans_cdf[tag_idx]
                if row[-1] <= 0:
                    raise GenerationError(f"tag {tags[tag_idx]!r} has no outgoing transitions")
                tag_idx = draw(row, u[2 * pos])
            word_idx = draw(emit_cdf[:, tag_idx], u[2 * pos + 1])
            pairs.append((surfaces[word_idx], tags[tag_idx]))
        sentences.append(Sentence.from_pairs(pairs))
    return Corpus(tuple(sentences), tuple(tags))


def strip_tags(corpus: Corpus) -> list[Sentence]:
    return [Sentence.from_surfaces(s.surfaces) for s in corpus.sentences]

