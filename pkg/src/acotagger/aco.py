"""Ant colony decoder over a sentence trellis.

Each generation sends M ants from the start node to the last segment. An
ant at node i picks the next node d with probability proportional to
``c[i, d] ** alpha * eta[i, d] ** beta`` (``c`` pheromone, ``eta = 1 / D``).
After every ant of a generation has finished, all pheromone evaporates by
``(1 - rho)`` and each ant with a finite tour length L deposits
``quantity / L`` on every edge it used. The shortest tour seen over all
generations is the answer.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DomainError
from .trellis import Trellis, path_cost

CONFIG_KEYS = ("generations", "ants", "alpha", "beta", "rho", "quantity", "seed")


@dataclass(frozen=True)
class DecoderConfig:
    generations: int = 3
    ants: int = 20
    alpha: float = 0.9
    beta: float = 0.9
    rho: float = 0.95
    quantity: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if int(self.generations) != self.generations or self.generations < 1:
            raise ValueError(f"generations must be a positive integer, got {self.generations!r}")
        if int(self.ants) != self.ants or self.ants < 1:
            raise ValueError(f"ants must be a positive integer, got {self.ants!r}")
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a finite nonnegative number, got {self.alpha!r}")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a finite nonnegative number, got {self.beta!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not (self.quantity > 0 and math.isfinite(self.quantity)):
            raise ValueError(f"quantity must be positive, got {self.quantity!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str, **overrides) -> "DecoderConfig":
        """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ValueError(f"config line {lineno}: expected key=value")
            if key not in CONFIG_KEYS:
                raise ValueError(f"config line {lineno}: unknown key {key!r}, expected one of {', '.join(CONFIG_KEYS)}")
            conv = int if types[key] == "int" else float
            try:
                values[key] = conv(value.strip())
            except ValueError:
                raise ValueError(f"config line {lineno}: bad value for {key}: {value.strip()!r}") from None
        values.update(overrides)
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | os.PathLike, **overrides) -> "DecoderConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), **overrides)


@dataclass
class PheromoneTable:
    initial: np.ndarray
    edges: np.ndarray

    @classmethod
    def zeros(cls, trellis: Trellis) -> "PheromoneTable":
        return cls(np.zeros(trellis.width), np.zeros(trellis.edges.shape))

    def copy(self) -> "PheromoneTable":
        return PheromoneTable(self.initial.copy(), self.edges.copy())


@dataclass(frozen=True)
class DecodeResult:
    tags: tuple[str, ...]
    cost: float
    feasible: bool
    generations_run: int
    best_generation: int
    history: tuple[float, ...] = field(default=(), compare=False)


def select_next(pheromones: Sequence[float], heuristics: Sequence[float], alpha: float, beta: float, random_draw: float) -> int:
    """Roulette choice of one candidate edge.

    Falls back to ``eta ** beta`` weights while every pheromone weight is
    zero, and to a uniform pick when every candidate is impassable.
    """
    c = np.asarray(pheromones, dtype=np.float64)
    eta = np.asarray(heuristics, dtype=np.float64)
    if c.ndim != 1 or c.shape != eta.shape or c.size == 0:
        raise DomainError("candidate lists must be non-empty and of equal length")
    if (c < 0).any() or (eta < 0).any():
        raise DomainError("pheromone and heuristic values must be nonnegative")
    if not 0.0 <= random_draw < 1.0:
        raise DomainError(f"random draw must lie in [0, 1), got {random_draw!r}")
    # the numpy kernel works on (M, B) batches and returns one pick per row
    return int(np.ravel(kernels.select(c, eta, float(alpha), float(beta), float(random_draw)))[0])


def selection_probabilities(pheromones, heuristics, alpha, beta) -> np.ndarray:
    """Closed-form distribution that :func:`select_next` samples from."""
    c = np.asarray(pheromones, dtype=np.float64)
    eta = np.asarray(heuristics, dtype=np.float64)
    w = c**alpha * eta**beta
    if not w.sum() > 0:
        w = eta**beta
    if not w.sum() > 0:
        w = np.ones_like(eta)
    return w / w.sum()


def generation_draws(seed: int, stream: int, generation: int, ants: int, n: int) -> np.ndarray:
    """Uniform draws for one generation; row a belongs to ant a.

    Keyed by (seed, stream, generation), so the result does not depend on
    the order in which ants or sentences are processed.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, generation))
    return np.random.Generator(np.random.PCG64(ss)).random((ants, n))


def _draw_block(config: DecoderConfig, stream: int, n: int) -> np.ndarray:
    return np.stack([generation_draws(config.seed, stream, g, config.ants, n) for g in range(config.generations)])


def run_ant(trellis: Trellis, pheromones: PheromoneTable, config: DecoderConfig, rng) -> tuple[tuple[str, ...], float]:
    """Walk one ant through ``trellis``.

    ``rng`` is a numpy Generator or a sequence of n uniform draws.
    """
    if isinstance(rng, np.random.Generator):
        draws = rng.random(trellis.n)
    else:
        draws = np.asarray(rng, dtype=np.float64)
        if draws.shape != (trellis.n,):
            raise DomainError(f"need {trellis.n} draws, got shape {draws.shape}")
    tags, costs = kernels.walk(
        pheromones.initial, pheromones.edges,
        trellis.initial_heuristics, trellis.edge_heuristics,
        trellis.initial_edges, trellis.edges,
        draws[None, :], float(config.alpha), float(config.beta),
    )
    return tuple(trellis.tagset[k] for k in tags[0]), float(costs[0])


def update_pheromones(
    pheromones: PheromoneTable,
    ant_results: Sequence[tuple[Sequence[str | int], float]],
    rho: float,
    quantity: float,
    trellis: Trellis | None = None,
) -> PheromoneTable:
    """Evaporate every edge, then add ``quantity / L`` along each finite tour.

    Tags may be given as indices, or as names when ``trellis`` is supplied.
    Returns a new table; the input is left untouched.
    """
    out = pheromones.copy()
    n = out.edges.shape[0] + 1
    if ant_results:
        rows = []
        for tags, _ in ant_results:
            if trellis is not None:
                rows.append(trellis.tag_indices(tags))
            else:
                rows.append(np.asarray(tags, dtype=np.int64))
        tags = np.vstack(rows)
        if tags.shape[1] != n:
            raise DomainError(f"tours must have {n} tags")
        costs = np.array([float(cost) for _, cost in ant_results])
    else:
        tags = np.zeros((0, n), dtype=np.int64)
        costs = np.zeros(0)
    kernels.deposit(out.initial, out.edges, tags, costs, float(rho), float(quantity))
    return out


def greedy_path(trellis: Trellis) -> np.ndarray:
    """Per segment, the node with the cheapest incoming edge (lowest index on ties)."""
    first = np.argmin(trellis.initial_edges)
    rest = np.argmin(trellis.edges.min(axis=1), axis=1) if trellis.n > 1 else np.zeros(0, dtype=np.int64)
    return np.concatenate([[first], rest]).astype(np.int64)


def aco_decode(trellis: Trellis, config: DecoderConfig = DecoderConfig(), stream: int = 0) -> DecodeResult:
    """Decode one sentence. ``stream`` separates random streams across sentences.

    If no ant completes a finite tour, the :func:`greedy_path` is returned
    and ``best_generation`` is 0.
    """
    if trellis.n < 1:
        raise DomainError("empty trellis")
    draws = _draw_block(config, stream, trellis.n)
    best, cost, best_gen, history = kernels.aco(
        trellis.initial_edges, trellis.edges,
        trellis.initial_heuristics, trellis.edge_heuristics,
        draws, float(config.alpha), float(config.beta), float(config.rho), float(config.quantity),
    )
    if best_gen == 0:
        best = greedy_path(trellis)
        cost = path_cost(trellis, best)
    cost = float(cost)
    return DecodeResult(
        tags=tuple(trellis.tagset[k] for k in best),
        cost=cost,
        feasible=math.isfinite(cost),
        generations_run=config.generations,
        best_generation=int(best_gen),
        history=tuple(float(h) for h in history),
    )


def decode_determinism_harness(trellis: Trellis, config: DecoderConfig, stream: int = 0) -> bool:
    first = aco_decode(trellis, config, stream)
    second = aco_decode(trellis, config, stream)
    return first == second and first.history == second.history
