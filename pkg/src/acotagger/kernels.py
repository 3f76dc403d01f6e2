"""Inner loops of the ant walk, pheromone update and Viterbi recursion.

Every kernel has two implementations with identical arithmetic order: a
scalar-loop version compiled by numba (``*_nb``) and a version vectorised
over ants or tags in plain numpy (``*_np``). The module-level names without
suffix point at whichever backend :mod:`acotagger._accel` selected.

Array layout for an n-token sentence over B tags:

- ``init_*``  shape (B,), edges from the virtual start node into segment 0
- ``edge_*``  shape (n-1, B, B), ``edge[t-1, i, j]`` joins tag i of token t-1
  to tag j of token t
- ``draws``   shape (M, n), one uniform number in [0, 1) per ant and step
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# --------------------------------------------------------------------------
# numba backend


@njit
def select_nb(c, eta, alpha, beta, draw):
    b = c.shape[0]
    weights = np.empty(b)
    total = 0.0
    for k in range(b):
        weights[k] = c[k] ** alpha * eta[k] ** beta
        total += weights[k]
        weights[k] = total
    if not total > 0.0:
        total = 0.0
        for k in range(b):
            weights[k] = eta[k] ** beta
            total += weights[k]
            weights[k] = total
    if not total > 0.0:
        k = int(draw * b)
        return k if k < b else b - 1
    threshold = draw * total
    for k in range(b):
        if weights[k] > threshold:
            return k
    # draw * total rounded up to total; take the last candidate with mass
    for k in range(b - 1, -1, -1):
        if k == 0 or weights[k] > weights[k - 1]:
            return k
    return b - 1


@njit
def walk_nb(init_c, edge_c, init_eta, edge_eta, init_d, edge_d, draws, alpha, beta):
    m, n = draws.shape
    tags = np.empty((m, n), dtype=np.int64)
    costs = np.empty(m)
    for a in range(m):
        cur = select_nb(init_c, init_eta, alpha, beta, draws[a, 0])
        tags[a, 0] = cur
        cost = init_d[cur]
        for t in range(1, n):
            nxt = select_nb(edge_c[t - 1, cur], edge_eta[t - 1, cur], alpha, beta, draws[a, t])
            cost = cost + edge_d[t - 1, cur, nxt]
            tags[a, t] = nxt
            cur = nxt
        costs[a] = cost
    return tags, costs


@njit
def deposit_nb(init_c, edge_c, tags, costs, rho, quantity):
    keep = 1.0 - rho
    for k in range(init_c.shape[0]):
        init_c[k] = keep * init_c[k]
    s, b1, b2 = edge_c.shape
    for t in range(s):
        for i in range(b1):
            for j in range(b2):
                edge_c[t, i, j] = keep * edge_c[t, i, j]
    m, n = tags.shape
    for a in range(m):
        if not np.isfinite(costs[a]):
            continue
        delta = quantity / costs[a]
        init_c[tags[a, 0]] += delta
        for t in range(1, n):
            edge_c[t - 1, tags[a, t - 1], tags[a, t]] += delta


@njit
def _lex_less(x, y):
    for k in range(x.shape[0]):
        if x[k] != y[k]:
            return x[k] < y[k]
    return False


@njit
def aco_nb(init_d, edge_d, init_eta, edge_eta, draws, alpha, beta, rho, quantity):
    """Full decode loop. ``draws`` has shape (N, M, n).

    Returns ``(best_tags, best_cost, best_generation, history)`` where
    ``best_generation`` is 1-based (0 when no finite tour was found) and
    ``history[g]`` is the global best cost after generation g.
    """
    gens, m, n = draws.shape
    b = init_d.shape[0]
    init_c = np.zeros(b)
    edge_c = np.zeros(edge_d.shape)
    best_tags = np.zeros(n, dtype=np.int64)
    best_cost = np.inf
    best_gen = 0
    history = np.empty(gens)
    for g in range(gens):
        tags, costs = walk_nb(init_c, edge_c, init_eta, edge_eta, init_d, edge_d, draws[g], alpha, beta)
        gbest = -1
        for a in range(m):
            if not np.isfinite(costs[a]):
                continue
            if gbest < 0 or costs[a] < costs[gbest] or (costs[a] == costs[gbest] and _lex_less(tags[a], tags[gbest])):
                gbest = a
        if gbest >= 0 and costs[gbest] < best_cost:
            best_cost = costs[gbest]
            best_tags[:] = tags[gbest]
            best_gen = g + 1
        history[g] = best_cost
        deposit_nb(init_c, edge_c, tags, costs, rho, quantity)
    return best_tags, best_cost, best_gen, history


@njit
def viterbi_nb(log_pi, log_trans, log_emit):
    n, b = log_emit.shape
    back = np.zeros((n, b), dtype=np.int64)
    delta = np.empty(b)
    for j in range(b):
        delta[j] = log_pi[j] + log_emit[0, j]
    new = np.empty(b)
    for t in range(1, n):
        for j in range(b):
            best_i = 0
            best = delta[0] + log_trans[0, j]
            for i in range(1, b):
                v = delta[i] + log_trans[i, j]
                if v > best:
                    best = v
                    best_i = i
            back[t, j] = best_i
            new[j] = best + log_emit[t, j]
        delta[:] = new
    last = 0
    for j in range(1, b):
        if delta[j] > delta[last]:
            last = j
    tags = np.empty(n, dtype=np.int64)
    tags[n - 1] = last
    for t in range(n - 1, 0, -1):
        tags[t - 1] = back[t, tags[t]]
    return tags, delta[last]


# --------------------------------------------------------------------------
# numpy backend


def select_np(c, eta, alpha, beta, draw):
    """Row-wise roulette over candidate matrices ``c``/``eta`` of shape (M, B)."""
    c = np.atleast_2d(c)
    eta = np.atleast_2d(eta)
    draw = np.atleast_1d(np.asarray(draw, dtype=np.float64))
    m, b = c.shape
    cum = np.cumsum(c**alpha * eta**beta, axis=1)
    cold = ~(cum[:, -1] > 0.0)
    if cold.any():
        cum[cold] = np.cumsum(eta[cold] ** beta, axis=1)
    total = cum[:, -1]
    above = cum > (draw * total)[:, None]
    picks = np.argmax(above, axis=1)
    missed = ~above.any(axis=1)
    if missed.any():
        steps = np.diff(cum[missed], axis=1, prepend=0.0) > 0.0
        picks[missed] = b - 1 - np.argmax(steps[:, ::-1], axis=1)
    dead = ~(total > 0.0)
    if dead.any():
        picks[dead] = np.minimum((draw[dead] * b).astype(np.int64), b - 1)
    return picks


def walk_np(init_c, edge_c, init_eta, edge_eta, init_d, edge_d, draws, alpha, beta):
    m, n = draws.shape
    b = init_c.shape[0]
    tags = np.empty((m, n), dtype=np.int64)
    cur = select_np(np.broadcast_to(init_c, (m, b)), np.broadcast_to(init_eta, (m, b)), alpha, beta, draws[:, 0])
    tags[:, 0] = cur
    costs = init_d[cur]
    for t in range(1, n):
        nxt = select_np(edge_c[t - 1, cur], edge_eta[t - 1, cur], alpha, beta, draws[:, t])
        costs = costs + edge_d[t - 1, cur, nxt]
        tags[:, t] = nxt
        cur = nxt
    return tags, costs


def deposit_np(init_c, edge_c, tags, costs, rho, quantity):
    keep = 1.0 - rho
    init_c *= keep
    edge_c *= keep
    ok = np.isfinite(costs)
    if not ok.any():
        return
    tags = tags[ok]
    delta = quantity / costs[ok]
    m, n = tags.shape
    # np.add.at applies repeated indices in order, matching the scalar loop
    np.add.at(init_c, tags[:, 0], delta)
    if n > 1:
        steps = np.broadcast_to(np.arange(n - 1), (m, n - 1))
        np.add.at(
            edge_c,
            (steps.ravel(), tags[:, :-1].ravel(), tags[:, 1:].ravel()),
            np.repeat(delta, n - 1),
        )


def aco_np(init_d, edge_d, init_eta, edge_eta, draws, alpha, beta, rho, quantity):
    gens, m, n = draws.shape
    init_c = np.zeros(init_d.shape[0])
    edge_c = np.zeros(edge_d.shape)
    best_tags = np.zeros(n, dtype=np.int64)
    best_cost = np.inf
    best_gen = 0
    history = np.empty(gens)
    for g in range(gens):
        tags, costs = walk_np(init_c, edge_c, init_eta, edge_eta, init_d, edge_d, draws[g], alpha, beta)
        finite = np.flatnonzero(np.isfinite(costs))
        if finite.size:
            low = costs[finite].min()
            tied = finite[costs[finite] == low]
            # lexsort keys run last-to-first, so reverse the columns
            gbest = tied[np.lexsort(tags[tied].T[::-1])[0]]
            if low < best_cost:
                best_cost = low
                best_tags[:] = tags[gbest]
                best_gen = g + 1
        history[g] = best_cost
        deposit_np(init_c, edge_c, tags, costs, rho, quantity)
    return best_tags, best_cost, best_gen, history


def viterbi_np(log_pi, log_trans, log_emit):
    n, b = log_emit.shape
    back = np.zeros((n, b), dtype=np.int64)
    delta = log_pi + log_emit[0]
    for t in range(1, n):
        cand = delta[:, None] + log_trans
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(b)] + log_emit[t]
    tags = np.empty(n, dtype=np.int64)
    tags[n - 1] = np.argmax(delta)
    for t in range(n - 1, 0, -1):
        tags[t - 1] = back[t, tags[t]]
    return tags, delta[tags[n - 1]]


if USE_NUMBA:
    select, walk, deposit, aco, viterbi = select_nb, walk_nb, deposit_nb, aco_nb, viterbi_nb
else:
    select, walk, deposit, aco, viterbi = select_np, walk_np, deposit_np, aco_np, viterbi_np
