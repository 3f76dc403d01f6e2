"""Layered tag graph for one sentence, with edge distances and heuristics.

The distance of an edge entering tag j of token t from tag i of token t-1 is
``emission(word_t, j) ** log10(transition(i, j))``; edges out of the virtual
start node use the initial probability of j in place of the transition.
Either probability being zero makes the edge impassable (``math.inf``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Sentence
from .errors import DomainError
from .model import HmmModel, OovMode

INF = math.inf
START = "Ø"


def edge_distance(emission_p: float, transition_p: float) -> float:
    if not (0.0 <= emission_p <= 1.0 and 0.0 <= transition_p <= 1.0):
        raise DomainError(f"probabilities must lie in [0, 1], got emission={emission_p!r}, transition={transition_p!r}")
    if emission_p == 0.0 or transition_p == 0.0:
        return INF
    return emission_p ** math.log10(transition_p)


def edge_distances(emission: np.ndarray, transition: np.ndarray) -> np.ndarray:
    """Broadcasting form of :func:`edge_distance` (no domain checks)."""
    emission, transition = np.broadcast_arrays(np.asarray(emission, float), np.asarray(transition, float))
    out = np.full(emission.shape, INF)
    ok = (emission > 0.0) & (transition > 0.0)
    out[ok] = np.power(emission[ok], np.log10(transition[ok]))
    return out


def heuristics(distances: np.ndarray) -> np.ndarray:
    """1/D, with exactly 0 on impassable edges."""
    with np.errstate(divide="ignore"):
        return 1.0 / distances


@dataclass(frozen=True, eq=False)
class Trellis:
    tagset: tuple[str, ...]
    surfaces: tuple[str, ...]
    initial_edges: np.ndarray  # (B,)
    edges: np.ndarray  # (n-1, B, B)
    initial_heuristics: np.ndarray
    edge_heuristics: np.ndarray

    @property
    def n(self) -> int:
        return len(self.surfaces)

    @property
    def width(self) -> int:
        return len(self.tagset)

    def tag_indices(self, tags: Sequence[str | int]) -> np.ndarray:
        index = {t: i for i, t in enumerate(self.tagset)}
        out = []
        for t in tags:
            if isinstance(t, (int, np.integer)):
                if not 0 <= t < self.width:
                    raise DomainError(f"tag index {t} out of range")
                out.append(int(t))
            elif t in index:
                out.append(index[t])
            else:
                raise DomainError(f"unknown tag {t!r}")
        return np.asarray(out, dtype=np.int64)

    def dump(self) -> str:
        """Debug listing: ``t<TAB>from_tag<TAB>to_tag<TAB>D`` per edge, ``inf`` for impassable."""
        lines = []
        for j, tag in enumerate(self.tagset):
            lines.append(f"0\t{START}\t{tag}\t{_fmt_d(self.initial_edges[j])}")
        for t in range(1, self.n):
            for i, a in enumerate(self.tagset):
                for j, b in enumerate(self.tagset):
                    lines.append(f"{t}\t{a}\t{b}\t{_fmt_d(self.edges[t - 1, i, j])}")
        return "\n".join(lines) + "\n"


def _fmt_d(d: float) -> str:
    return "inf" if math.isinf(d) else format(d, ".12g")


def from_probabilities(tagset, surfaces, pi: np.ndarray, transition: np.ndarray, emission: np.ndarray) -> Trellis:
    """Trellis from dense arrays: ``pi`` (B,), ``transition`` (B, B), ``emission`` (n, B)."""
    emission = np.asarray(emission, dtype=np.float64)
    initial = edge_distances(emission[0], pi)
    if len(surfaces) > 1:
        edges = edge_distances(emission[1:, None, :], transition[None, :, :])
    else:
        edges = np.zeros((0, len(tagset), len(tagset)))
    return Trellis(
        tagset=tuple(tagset),
        surfaces=tuple(surfaces),
        initial_edges=initial,
        edges=edges,
        initial_heuristics=heuristics(initial),
        edge_heuristics=heuristics(edges),
    )


def build_trellis(model: HmmModel, sentence: Sentence | Sequence[str], oov: OovMode | None = None) -> Trellis:
    surfaces = sentence.surfaces if isinstance(sentence, Sentence) else list(sentence)
    if not surfaces:
        raise DomainError("cannot build a trellis for an empty sentence")
    emission = model.emission_matrix(surfaces, oov)
    return from_probabilities(model.tagset, surfaces, model.pi_vector, model.transition_matrix, emission)


def path_cost(trellis: Trellis, tags: Sequence[str | int]) -> float:
    """Sum of edge distances along ``tags``, left to right; infinite if any edge is."""
    if len(tags) != trellis.n:
        raise DomainError(f"path has {len(tags)} tags but sentence has {trellis.n} tokens")
    idx = trellis.tag_indices(tags)
    cost = float(trellis.initial_edges[idx[0]])
    for t in range(1, trellis.n):
        cost = cost + float(trellis.edges[t - 1, idx[t - 1], idx[t]])
    return cost
