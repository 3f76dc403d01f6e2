"""HMM probability tables: maximum-likelihood training, lookup, and the text model format."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import BinaryIO

import numpy as np

from .corpus import Corpus
from .errors import ModelFormatError, ModelLookupError, TrainingError

MAGIC = "ACO-TAGGER-MODEL"
VERSION = "v1"
SECTIONS = ("#TAGS", "#PI", "#TRANSITION", "#EMISSION")
# Optional trailing section with per-tag training counts, needed by spread:k.
COUNTS_SECTION = "#COUNTS"
ROW_TOL = 1e-9


@dataclass(frozen=True)
class OovMode:
    """Emission policy for surfaces outside the training vocabulary.

    ``uniform`` gives every tag ``1 / |tagset|``. ``spread:k`` gives tag t the
    add-k mass ``k / (count(t) + k * |vocabulary|)``.
    """

    kind: str = "uniform"
    k: float | None = None

    def __post_init__(self):
        if self.kind == "uniform":
            if self.k is not None:
                raise ValueError("uniform OOV mode takes no parameter")
        elif self.kind == "spread":
            if self.k is None or not self.k > 0:
                raise ValueError("spread OOV mode needs k > 0")
        else:
            raise ValueError(f"unknown OOV mode {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "OovMode":
        text = text.strip()
        if text == "uniform":
            return cls()
        if text.startswith("spread:"):
            try:
                k = float(text[len("spread:"):])
            except ValueError:
                raise ValueError(f"bad spread parameter in {text!r}") from None
            return cls("spread", k)
        raise ValueError(f"unknown OOV mode {text!r} (expected 'uniform' or 'spread:<k>')")

    def __str__(self):
        return "uniform" if self.kind == "uniform" else f"spread:{_fmt(self.k)}"


UNIFORM = OovMode()


@dataclass(frozen=True)
class HmmModel:
    tagset: tuple[str, ...]
    pi: dict[str, float]
    transition: dict[tuple[str, str], float]
    emission: dict[tuple[str, str], float]
    vocabulary: frozenset[str]
    tag_counts: dict[str, int] | None = None
    oov: OovMode = field(default=UNIFORM)

    @cached_property
    def tag_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tagset)}

    @cached_property
    def pi_vector(self) -> np.ndarray:
        return np.array([self.pi.get(t, 0.0) for t in self.tagset], dtype=np.float64)

    @cached_property
    def transition_matrix(self) -> np.ndarray:
        idx = self.tag_index
        mat = np.zeros((len(self.tagset), len(self.tagset)))
        for (a, b), p in self.transition.items():
            mat[idx[a], idx[b]] = p
        return mat

    @cached_property
    def _emission_rows(self) -> dict[str, np.ndarray]:
        idx = self.tag_index
        rows: dict[str, np.ndarray] = {w: np.zeros(len(self.tagset)) for w in sorted(self.vocabulary)}
        for (w, t), p in self.emission.items():
            rows[w][idx[t]] = p
        return rows

    def emission_columns(self) -> tuple[list[str], np.ndarray]:
        """Vocabulary (sorted) and the matching |V| x |tagset| emission matrix."""
        rows = self._emission_rows
        words = list(rows)
        if not words:
            return words, np.zeros((0, len(self.tagset)))
        return words, np.vstack([rows[w] for w in words])

    def oov_vector(self, oov: OovMode | None = None) -> np.ndarray:
        oov = oov or self.oov
        n = len(self.tagset)
        if oov.kind == "uniform":
            return np.full(n, 1.0 / n)
        counts = self.tag_counts or {}
        v = len(self.vocabulary)
        return np.array([oov.k / (counts.get(t, 0) + oov.k * v) for t in self.tagset])

    def emission_vector(self, surface: str, oov: OovMode | None = None) -> np.ndarray:
        """Emission probability of ``surface`` under every tag, OOV policy applied."""
        row = self._emission_rows.get(surface)
        if row is None:
            return self.oov_vector(oov)
        return row

    def emission_matrix(self, surfaces, oov: OovMode | None = None) -> np.ndarray:
        oov_row = None
        out = np.empty((len(surfaces), len(self.tagset)))
        rows = self._emission_rows
        for i, w in enumerate(surfaces):
            row = rows.get(w)
            if row is None:
                if oov_row is None:
                    oov_row = self.oov_vector(oov)
                row = oov_row
            out[i] = row
        return out


def emission_lookup(model: HmmModel, surface: str, tag: str, oov: OovMode | None = None) -> float:
    if tag not in model.tag_index:
        raise ModelLookupError(f"unknown tag {tag!r}")
    if surface in model.vocabulary:
        return model.emission.get((surface, tag), 0.0)
    return float(model.oov_vector(oov)[model.tag_index[tag]])


def train(corpus: Corpus, oov: OovMode = UNIFORM) -> HmmModel:
    """Maximum-likelihood HMM estimates from a tagged corpus.

    Tags that never occur in ``corpus`` (possible when a split half keeps the
    parent tagset) get empty emission and transition rows.
    """
    if not corpus.sentences:
        raise TrainingError("cannot train on an empty corpus")
    first = Counter()
    tag_count = Counter()
    nonfinal = Counter()
    bigram = Counter()
    pair = Counter()
    for sent in corpus.sentences:
        tags = sent.tags
        if any(t is None for t in tags):
            raise TrainingError("training corpus contains untagged tokens")
        first[tags[0]] += 1
        for w, t in zip(sent.surfaces, tags):
            tag_count[t] += 1
            pair[w, t] += 1
        for a, b in zip(tags, tags[1:]):
            nonfinal[a] += 1
            bigram[a, b] += 1

    n_sent = len(corpus.sentences)
    tagset = tuple(corpus.tagset) or tuple(tag_count)
    return HmmModel(
        tagset=tagset,
        pi={t: first[t] / n_sent for t in tagset if first[t]},
        transition={(a, b): c / nonfinal[a] for (a, b), c in bigram.items()},
        emission={(w, t): c / tag_count[t] for (w, t), c in pair.items()},
        vocabulary=frozenset(w for w, _ in pair),
        tag_counts={t: tag_count[t] for t in tagset},
        oov=oov,
    )


def random_model(
    n_tags: int,
    vocab_size: int,
    seed: int,
    emission_concentration: float = 0.1,
    transition_concentration: float = 0.5,
) -> HmmModel:
    """Sample a model with strictly positive Dirichlet rows.

    Tags are named ``T0..`` and surfaces ``w0..``. Small emission
    concentration makes each word favour a few tags, as real lexicons do.
    """
    if n_tags < 1 or vocab_size < 1:
        raise ValueError("n_tags and vocab_size must be positive")
    rng = np.random.default_rng(seed)

    def rows(count, width, conc):
        x = rng.dirichlet(np.full(width, conc), size=count)
        x = np.maximum(x, 1e-12)
        return x / x.sum(axis=1, keepdims=True)

    tags = tuple(f"T{i}" for i in range(n_tags))
    words = [f"w{i}" for i in range(vocab_size)]
    pi = rows(1, n_tags, transition_concentration)[0]
    trans = rows(n_tags, n_tags, transition_concentration)
    emit = rows(n_tags, vocab_size, emission_concentration)
    return HmmModel(
        tagset=tags,
        pi={t: float(pi[i]) for i, t in enumerate(tags)},
        transition={(a, b): float(trans[i, j]) for i, a in enumerate(tags) for j, b in enumerate(tags)},
        emission={(w, t): float(emit[j, i]) for j, t in enumerate(tags) for i, w in enumerate(words)},
        vocabulary=frozenset(words),
    )


def validate(model: HmmModel, strict_rows: bool = True) -> None:
    """Raise :class:`ModelFormatError` if any stochasticity invariant fails.

    Empty rows (tags never seen non-final, or never seen at all) are exempt
    from normalisation. ``strict_rows=False`` keeps only the range checks.
    """
    known = model.tag_index
    for section, table in (("#PI", model.pi), ("#TRANSITION", model.transition), ("#EMISSION", model.emission)):
        for key, p in table.items():
            if not 0.0 <= p <= 1.0:
                raise ModelFormatError(f"probability {p!r} for {key!r} outside [0, 1]", section=section)
            tags = (key,) if section == "#PI" else ((key[0], key[1]) if section == "#TRANSITION" else (key[1],))
            for t in tags:
                if t not in known:
                    raise ModelFormatError(f"unknown tag {t!r}", section=section)
    if not strict_rows:
        return
    total = sum(model.pi.values())
    if abs(total - 1.0) > ROW_TOL:
        raise ModelFormatError(f"initial probabilities sum to {total!r}", section="#PI")
    for name, mat in (("#TRANSITION", model.transition_matrix), ("#EMISSION", model.emission_columns()[1].T)):
        sums = mat.sum(axis=1)
        for tag, s in zip(model.tagset, sums):
            if s != 0.0 and abs(s - 1.0) > ROW_TOL:
                raise ModelFormatError(f"row for tag {tag!r} sums to {s!r}", section=name)


def _fmt(p: float) -> str:
    return format(p, ".12g")


def write_model(model: HmmModel, sink: BinaryIO | None = None) -> bytes:
    idx = model.tag_index
    for t in model.tagset:
        if not t or any(c.isspace() for c in t):
            raise ModelFormatError(f"tag {t!r} cannot be written (empty or contains whitespace)")
    lines = [f"{MAGIC} {VERSION} oov={model.oov}", "#TAGS", " ".join(model.tagset), "#PI"]
    lines += [f"{t}\t{_fmt(model.pi[t])}" for t in model.tagset if model.pi.get(t, 0.0) > 0]
    lines.append("#TRANSITION")
    for (a, b), p in sorted(model.transition.items(), key=lambda kv: (idx[kv[0][0]], idx[kv[0][1]])):
        if p > 0:
            lines.append(f"{a}\t{b}\t{_fmt(p)}")
    lines.append("#EMISSION")
    for (w, t), p in sorted(model.emission.items(), key=lambda kv: (kv[0][0], idx[kv[0][1]])):
        if p > 0:
            lines.append(f"{w}\t{t}\t{_fmt(p)}")
    if model.tag_counts is not None:
        lines.append(COUNTS_SECTION)
        lines += [f"{t}\t{model.tag_counts.get(t, 0)}" for t in model.tagset]
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if sink is not None:
        sink.write(data)
    return data


def write_model_file(model: HmmModel, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        write_model(model, fh)


def _prob(text: str, section: str, lineno: int) -> float:
    try:
        p = float(text)
    except ValueError:
        raise ModelFormatError(f"not a number: {text!r}", section=section, line=lineno) from None
    if not 0.0 <= p <= 1.0:
        raise ModelFormatError(f"probability {text} out of range [0, 1]", section=section, line=lineno)
    return p


def read_model(source, strict_rows: bool = True) -> HmmModel:
    """Parse the text model format.

    ``strict_rows=False`` skips row-normalisation checks; needed for
    hand-written tables whose rows do not sum to one.
    """
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        data = source.encode("utf-8")
    else:
        data = source.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise ModelFormatError("model file is not valid UTF-8") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("empty model file", line=1)

    header = lines[0].split(" ")
    if len(header) != 3 or header[0] != MAGIC or not header[2].startswith("oov="):
        raise ModelFormatError(f"bad header {lines[0]!r}", section="header", line=1)
    if header[1] != VERSION:
        raise ModelFormatError(f"unsupported version {header[1]!r}, expected {VERSION}", section="header", line=1)
    try:
        oov = OovMode.parse(header[2][len("oov="):])
    except ValueError as exc:
        raise ModelFormatError(str(exc), section="header", line=1) from None

    bodies: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("#"):
            if line not in SECTIONS and line != COUNTS_SECTION:
                raise ModelFormatError(f"unknown section {line!r}", section=line, line=lineno)
            if line in bodies:
                raise ModelFormatError("duplicate section", section=line, line=lineno)
            current = line
            bodies[current] = []
        elif current is None:
            raise ModelFormatError("content before first section", line=lineno)
        else:
            bodies[current].append((lineno, line))
    for name in SECTIONS:
        if name not in bodies:
            raise ModelFormatError(f"missing section {name}", section=name)

    tag_lines = bodies["#TAGS"]
    if len(tag_lines) != 1 or not tag_lines[0][1].strip():
        raise ModelFormatError("expected exactly one line of tags", section="#TAGS")
    tagset = tuple(tag_lines[0][1].split(" "))
    if len(set(tagset)) != len(tagset) or "" in tagset:
        raise ModelFormatError("duplicate or empty tag", section="#TAGS", line=tag_lines[0][0])
    known = set(tagset)

    def fields(section, width):
        for lineno, line in bodies[section]:
            parts = line.split("\t")
            if len(parts) != width:
                raise ModelFormatError(f"expected {width} TAB-separated fields", section=section, line=lineno)
            for t in parts[width - 2:width - 1] if section == "#EMISSION" else parts[:width - 1]:
                if t not in known:
                    raise ModelFormatError(f"unknown tag {t!r}", section=section, line=lineno)
            yield lineno, parts

    def store(table, key, value, section, lineno):
        if key in table:
            raise ModelFormatError(f"duplicate entry {key!r}", section=section, line=lineno)
        if value > 0:
            table[key] = value

    pi: dict[str, float] = {}
    for lineno, (t, p) in fields("#PI", 2):
        store(pi, t, _prob(p, "#PI", lineno), "#PI", lineno)
    trans: dict[tuple[str, str], float] = {}
    for lineno, (a, b, p) in fields("#TRANSITION", 3):
        store(trans, (a, b), _prob(p, "#TRANSITION", lineno), "#TRANSITION", lineno)
    emit: dict[tuple[str, str], float] = {}
    vocab = set()
    for lineno, (w, t, p) in fields("#EMISSION", 3):
        if not w:
            raise ModelFormatError("empty surface", section="#EMISSION", line=lineno)
        store(emit, (w, t), _prob(p, "#EMISSION", lineno), "#EMISSION", lineno)
        vocab.add(w)

    counts = None
    if COUNTS_SECTION in bodies:
        counts = {}
        for lineno, (t, c) in fields(COUNTS_SECTION, 2):
            try:
                counts[t] = int(c)
            except ValueError:
                raise ModelFormatError(f"bad count {c!r}", section=COUNTS_SECTION, line=lineno) from None

    model = HmmModel(tagset, pi, trans, emit, frozenset(vocab), counts, oov)
    validate(model, strict_rows=strict_rows)
    return model


def read_model_file(path: str | os.PathLike, strict_rows: bool = True) -> HmmModel:
    with open(path, "rb") as fh:
        return read_model(fh, strict_rows=strict_rows)


def models_close(a: HmmModel, b: HmmModel, tol: float = 1e-12) -> bool:
    """Field-by-field equality with probabilities compared to ``tol``."""
    if a.tagset != b.tagset or a.vocabulary != b.vocabulary or a.oov != b.oov or a.tag_counts != b.tag_counts:
        return False
    for x, y in ((a.pi, b.pi), (a.transition, b.transition), (a.emission, b.emission)):
        if x.keys() != y.keys():
            return False
        if any(abs(x[k] - y[k]) > tol for k in x):
            return False
    return True
