"""Command-line front end: ``acotagger {train,tag,eval,compare,synth}``.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import io
import sys
from contextlib import redirect_stderr, redirect_stdout

from . import __version__
from .aco import CONFIG_KEYS, DecoderConfig
from .corpus import (
    Corpus,
    format_sentence,
    generate_synthetic,
    read_corpus,
    read_corpus_file,
    read_raw,
    write_corpus_file,
)
from .errors import AcoTaggerError
from .evaluation import (
    check_tags,
    compare,
    decode_sentences,
    default_threads,
    evaluate,
    format_report,
)
from .model import OovMode, random_model, read_model_file, train, validate, write_model_file
from .trellis import build_trellis

DEFAULTS = DecoderConfig()


class UsageError(Exception):
    """Bad flags or invalid input: exit status 2."""


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _nonneg(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _unit(text):
    value = _nonneg(text)
    if value > 1:
        raise argparse.ArgumentTypeError(f"rho must lie in [0, 1], got {text}")
    return value


def _positive(text):
    value = _nonneg(text)
    if value == 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _oov(text):
    try:
        return OovMode.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_decoder_flags(p):
    g = p.add_argument_group("ACO parameters")
    g.add_argument("--generations", type=_positive_int, help=f"number of ant generations (default: {DEFAULTS.generations})")
    g.add_argument("--ants", type=_positive_int, help=f"ants per generation (default: {DEFAULTS.ants})")
    g.add_argument("--alpha", type=_nonneg, help=f"pheromone exponent (default: {DEFAULTS.alpha})")
    g.add_argument("--beta", type=_nonneg, help=f"heuristic exponent (default: {DEFAULTS.beta})")
    g.add_argument("--rho", type=_unit, help=f"evaporation rate in [0, 1] (default: {DEFAULTS.rho})")
    g.add_argument("--quantity", type=_positive, help=f"pheromone quantity deposited per tour (default: {DEFAULTS.quantity:g})")
    g.add_argument("--seed", type=_seed, help=f"master random seed (default: {DEFAULTS.seed})")
    g.add_argument("--config", metavar="PATH", help="key=value file with any of: " + ", ".join(CONFIG_KEYS) + "; flags override it")
    p.add_argument("--threads", type=_positive_int, default=None, help="sentences decoded in parallel (default: number of CPUs)")
    p.add_argument("--oov", type=_oov, default=None, help="unknown-word emission: uniform or spread:<k> (default: the model's own mode)")


def _add_model_flags(p, required=True):
    p.add_argument("--model", required=required, metavar="PATH", help="model file written by 'train'")
    p.add_argument("--no-strict-rows", action="store_true", help="accept models whose probability rows do not sum to 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acotagger", description="Ant colony optimization POS tagger with a Viterbi baseline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{train,tag,eval,compare,synth}")

    p = sub.add_parser("train", help="estimate an HMM from a tagged corpus")
    p.add_argument("--corpus", required=True, metavar="PATH", help="tagged corpus (surface<TAB>tag lines)")
    p.add_argument("--out", required=True, metavar="PATH", help="model file to write")
    p.add_argument("--oov", type=_oov, default=OovMode(), help="unknown-word policy stored in the model (default: uniform)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag sentences with the ACO or Viterbi decoder")
    _add_model_flags(p)
    p.add_argument("--in", dest="input", required=True, metavar="PATH", help="tagged corpus (tags ignored) or raw text, one sentence per line")
    p.add_argument("--format", choices=("auto", "corpus", "raw"), default="auto", help="input format (default: auto)")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--decoder", choices=("aco", "viterbi"), default="aco", help="decoder (default: aco)")
    p.add_argument("--dump-trellis", action="store_true", help="write every edge distance to stderr as t<TAB>from<TAB>to<TAB>D")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="score one decoder against a gold corpus")
    _add_model_flags(p)
    p.add_argument("--test", required=True, metavar="PATH", help="gold tagged corpus")
    p.add_argument("--decoder", choices=("aco", "viterbi"), default="aco", help="decoder (default: aco)")
    p.add_argument("--report", metavar="PATH", help="write the text table and metric<TAB>value lines here")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="score ACO and Viterbi side by side")
    _add_model_flags(p)
    p.add_argument("--test", required=True, metavar="PATH", help="gold tagged corpus")
    p.add_argument("--report", metavar="PATH", help="write the text table, per-sentence rows and metric<TAB>value lines here")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="sample a synthetic tagged corpus")
    _add_model_flags(p, required=False)
    p.add_argument("--random", nargs="+", metavar="KEY=VALUE", help="sample a random model instead: tags=T vocab=V")
    p.add_argument("--sentences", type=_positive_int, required=True, help="number of sentences")
    p.add_argument("--max-len", type=_positive_int, default=20, help="maximum sentence length (default: 20)")
    p.add_argument("--seed", type=_seed, default=0, help="random seed (default: 0)")
    p.add_argument("--out", required=True, metavar="PATH", help="corpus file to write")
    p.add_argument("--model-out", metavar="PATH", help="where --random writes its model (default: <out>.model)")
    p.add_argument("--emission-concentration", type=_positive, default=0.1, help="Dirichlet concentration of random emission rows (default: 0.1)")
    p.add_argument("--transition-concentration", type=_positive, default=0.5, help="Dirichlet concentration of random pi/transition rows (default: 0.5)")
    p.set_defaults(func=cmd_synth)
    return parser


# --------------------------------------------------------------------------
# helpers


def _open_in(path, mode="rb"):
    try:
        return open(path, mode)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc.strerror}") from None


def _load_model(args):
    _open_in(args.model).close()
    return read_model_file(args.model, strict_rows=not args.no_strict_rows)


def _load_corpus(path) -> Corpus:
    _open_in(path).close()
    return read_corpus_file(path)


def _decoder_config(args) -> DecoderConfig:
    overrides = {k: getattr(args, k) for k in CONFIG_KEYS if getattr(args, k, None) is not None}
    try:
        if args.config:
            _open_in(args.config).close()
            return DecoderConfig.from_file(args.config, **overrides)
        return DecoderConfig(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _threads(args) -> int:
    return args.threads or default_threads()


def _write_text(path, text: str, stdout):
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_train(args, stdout, stderr) -> int:
    corpus = _load_corpus(args.corpus)
    model = train(corpus, oov=args.oov)
    validate(model)
    write_model_file(model, args.out)
    stderr.write(f"trained on {len(corpus)} sentences, {corpus.token_count} tokens, {len(model.tagset)} tags\n")
    return 0


def _read_input(path, fmt):
    with _open_in(path) as fh:
        data = fh.read()
    if fmt == "auto":
        text = data.decode("utf-8", errors="replace")
        fmt = "corpus" if any("\t" in line for line in text.splitlines() if not line.startswith("#")) else "raw"
    if fmt == "corpus":
        return list(read_corpus(data).sentences)
    return read_raw(data)


def cmd_tag(args, stdout, stderr) -> int:
    model = _load_model(args)
    config = _decoder_config(args)
    oov = args.oov or model.oov
    sentences = _read_input(args.input, args.format)
    if args.dump_trellis:
        for i, sent in enumerate(sentences):
            stderr.write(f"# sentence {i}\n")
            stderr.write(build_trellis(model, sent, oov).dump())
    decoded = decode_sentences(model, sentences, args.decoder, config, oov, _threads(args))
    blocks = []
    for sent, d in zip(sentences, decoded):
        head = "# infeasible\n" if not d.feasible else ""
        blocks.append(head + format_sentence(sent.surfaces, d.tags))
    _write_text(args.out, "\n".join(blocks), stdout)
    return 0


def cmd_eval(args, stdout, stderr) -> int:
    model = _load_model(args)
    config = _decoder_config(args)
    gold = _load_corpus(args.test)
    check_tags(gold, model)
    report, _ = evaluate(gold, model, args.decoder, config, args.oov or model.oov, _threads(args))
    if args.report:
        _write_text(args.report, format_report({args.decoder: report}), stdout)
    stdout.write(f"{args.decoder}={report.token_accuracy:.6f}\n")
    return 0


def cmd_compare(args, stdout, stderr) -> int:
    model = _load_model(args)
    config = _decoder_config(args)
    gold = _load_corpus(args.test)
    check_tags(gold, model)
    aco_report, vit_report, rows = compare(gold, model, config, args.oov or model.oov, _threads(args))
    if args.report:
        _write_text(args.report, format_report({"aco": aco_report, "viterbi": vit_report}, rows), stdout)
    stdout.write(f"aco={aco_report.token_accuracy:.6f} viterbi={vit_report.token_accuracy:.6f}\n")
    return 0


def _parse_random(items):
    spec = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or key not in ("tags", "vocab"):
            raise UsageError(f"--random expects tags=T vocab=V, got {item!r}")
        try:
            spec[key] = int(value)
        except ValueError:
            raise UsageError(f"--random {key} must be an integer, got {value!r}") from None
        if spec[key] < 1:
            raise UsageError(f"--random {key} must be positive")
    missing = {"tags", "vocab"} - spec.keys()
    if missing:
        raise UsageError(f"--random is missing {', '.join(sorted(missing))}")
    return spec


def cmd_synth(args, stdout, stderr) -> int:
    if (args.model is None) == (args.random is None):
        raise UsageError("synth needs exactly one of --model or --random")
    if args.random is not None:
        spec = _parse_random(args.random)
        model = random_model(
            spec["tags"], spec["vocab"], seed=args.seed,
            emission_concentration=args.emission_concentration,
            transition_concentration=args.transition_concentration,
        )
        validate(model)
        write_model_file(model, args.model_out or f"{args.out}.model")
    else:
        model = _load_model(args)
    corpus = generate_synthetic(model, args.sentences, args.max_len, args.seed)
    write_corpus_file(corpus, args.out)
    return 0


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout, stderr)
    except (UsageError, AcoTaggerError, ValueError) as exc:
        stderr.write(f"acotagger {args.command}: error: {exc}\n")
        return 2
    except OSError as exc:
        stderr.write(f"acotagger {args.command}: error: {exc}\n")
        return 1


def run(argv) -> tuple[int, str, str]:
    """Invoke :func:`main` in-process and capture its output (used by tests)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
