"""Time the numba kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--tags 32] [--length 20] [--sentences 200]

Both backends are called directly (kernels.*_nb and kernels.*_np), so the
ACOTAGGER_DISABLE_NUMBA flag does not matter here. Results of the two
backends are checked for equality before timing.
"""

import argparse
import time

import numpy as np

from acotagger import _accel, kernels
from acotagger.aco import DecoderConfig, _draw_block
from acotagger.model import random_model
from acotagger.trellis import build_trellis
from acotagger.viterbi import _log_tables


def best_of(fn, args_list, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        for args in args_list:
            fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tags", type=int, default=32)
    parser.add_argument("--vocab", type=int, default=500)
    parser.add_argument("--length", type=int, default=20)
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not _accel.HAVE_NUMBA:
        parser.exit(1, "numba is not installed; nothing to compare\n")

    model = random_model(args.tags, args.vocab, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    cfg = DecoderConfig()
    aco_args, vit_args = [], []
    for i in range(args.sentences):
        words = [f"w{k}" for k in rng.integers(0, args.vocab, args.length)]
        tr = build_trellis(model, words)
        aco_args.append((tr.initial_edges, tr.edges, tr.initial_heuristics, tr.edge_heuristics,
                         _draw_block(cfg, i, tr.n), cfg.alpha, cfg.beta, cfg.rho, cfg.quantity))
        vit_args.append(_log_tables(model, words, None)[:3])

    # warm-up compiles, and a parity check on the first few sentences
    for a in aco_args[:5]:
        x, y = kernels.aco_nb(*a), kernels.aco_np(*a)
        assert np.array_equal(x[0], y[0]) and x[1] == y[1], "aco backends disagree"
    for a in vit_args[:5]:
        assert np.array_equal(kernels.viterbi_nb(*a)[0], kernels.viterbi_np(*a)[0]), "viterbi backends disagree"

    print(f"{args.sentences} sentences x {args.length} tokens, {args.tags} tags, "
          f"ACO generations={cfg.generations} ants={cfg.ants}")
    print(f"{'kernel':<10}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'numba sent/s':>15}")
    for name, nb, np_, cases in (
        ("aco", kernels.aco_nb, kernels.aco_np, aco_args),
        ("viterbi", kernels.viterbi_nb, kernels.viterbi_np, vit_args),
    ):
        t_nb = best_of(nb, cases, args.repeat)
        t_np = best_of(np_, cases, args.repeat)
        print(f"{name:<10}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{len(cases) / t_nb:>15.0f}")


if __name__ == "__main__":
    main()
