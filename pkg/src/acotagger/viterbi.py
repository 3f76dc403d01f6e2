"""Viterbi baseline and the exhaustive-enumeration oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .aco import greedy_path
from .corpus import Sentence
from .errors import OracleCapacityError
from .model import HmmModel, OovMode
from .trellis import build_trellis

ORACLE_LIMIT = 10**7
_CHUNK = 1 << 18


@dataclass(frozen=True)
class ViterbiResult:
    tags: tuple[str, ...]
    log_score: float
    feasible: bool


def _log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def _log_tables(model: HmmModel, surfaces: Sequence[str], oov: OovMode | None):
    emission = model.emission_matrix(surfaces, oov)
    return _log(model.pi_vector), _log(model.transition_matrix), _log(emission), emission


def viterbi_decode(model: HmmModel, sentence: Sentence | Sequence[str], oov: OovMode | None = None) -> ViterbiResult:
    """Most probable tag sequence, computed with log probabilities.

    Ties go to the lowest tag index, both at the last token and at every
    backpointer. A sentence with probability zero under every tagging gets
    the per-word most likely tag instead, with ``feasible=False``.
    """
    surfaces = sentence.surfaces if isinstance(sentence, Sentence) else list(sentence)
    log_pi, log_trans, log_emit, emission = _log_tables(model, surfaces, oov)
    tags, score = kernels.viterbi(log_pi, log_trans, log_emit)
    score = float(score)
    if not math.isfinite(score):
        tags = np.argmax(emission, axis=1)
    return ViterbiResult(tuple(model.tagset[k] for k in tags), score, math.isfinite(score))


def _sequences(b: int, n: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop`` of all tag sequences in lexicographic order."""
    flat = np.arange(start, stop, dtype=np.int64)
    return np.stack(np.unravel_index(flat, (b,) * n), axis=1)


def enumerate_oracle(
    model: HmmModel,
    sentence: Sentence | Sequence[str],
    objective: str = "max_probability",
    oov: OovMode | None = None,
    limit: int = ORACLE_LIMIT,
    stats: dict | None = None,
) -> tuple[tuple[str, ...], float]:
    """Score every tag sequence and return the optimum.

    ``max_probability`` returns the log probability and resolves ties the way
    :func:`viterbi_decode` does (smallest sequence read right to left).
    ``min_distance`` returns the summed trellis distance and resolves ties
    to the lexicographically smallest sequence. Scores are accumulated in
    the same order as the decoders so floating-point ties agree. If
    ``stats`` is given, ``stats["inspected"]`` receives the number of
    sequences scored.
    """
    surfaces = sentence.surfaces if isinstance(sentence, Sentence) else list(sentence)
    b, n = len(model.tagset), len(surfaces)
    total = b**n
    if total > limit:
        raise OracleCapacityError(f"{b}^{n} = {total} sequences exceeds the oracle limit of {limit}")

    if objective == "max_probability":
        log_pi, log_trans, log_emit, emission = _log_tables(model, surfaces, oov)

        def score(seq):
            s = log_pi[seq[:, 0]] + log_emit[0, seq[:, 0]]
            for t in range(1, n):
                s = s + log_trans[seq[:, t - 1], seq[:, t]]
                s = s + log_emit[t, seq[:, t]]
            return s

        better = np.greater
    elif objective == "min_distance":
        trellis = build_trellis(model, surfaces, oov)

        def score(seq):
            s = trellis.initial_edges[seq[:, 0]]
            for t in range(1, n):
                s = s + trellis.edges[t - 1, seq[:, t - 1], seq[:, t]]
            return s

        better = np.less
    else:
        raise ValueError(f"unknown objective {objective!r}")

    best_seq, best_score = None, None
    inspected = 0
    for start in range(0, total, _CHUNK):
        seq = _sequences(b, n, start, min(start + _CHUNK, total))
        s = score(seq)
        inspected += len(s)
        top = s.max() if objective == "max_probability" else s.min()
        cand = seq[s == top]
        if objective == "max_probability":
            pick = cand[np.lexsort(cand.T)[0]]
        else:
            pick = cand[0]
        if best_score is None or better(top, best_score) or (
            top == best_score and _tie_wins(pick, best_seq, objective)
        ):
            best_seq, best_score = pick, top

    if stats is not None:
        stats["inspected"] = inspected
    best_score = float(best_score)
    if not math.isfinite(best_score):
        if objective == "max_probability":
            best_seq = np.argmax(emission, axis=1)
        else:
            best_seq = greedy_path(trellis)
    return tuple(model.tagset[k] for k in best_seq), best_score


def _tie_wins(new: np.ndarray, old: np.ndarray, objective: str) -> bool:
    if objective == "max_probability":
        return tuple(new[::-1]) < tuple(old[::-1])
    return tuple(new) < tuple(old)
