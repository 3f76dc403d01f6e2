"""Token accuracy, length buckets, confusion counts and the ACO/Viterbi comparison.

Accuracy is pooled over tokens, not averaged over sentences. Punctuation
counts like any other token.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .aco import DecoderConfig, aco_decode
from .corpus import Corpus, Sentence
from .errors import EvaluationError
from .model import HmmModel, OovMode
from .trellis import build_trellis
from .viterbi import viterbi_decode

BUCKETS = (("1-10", 1, 10), ("11-20", 11, 20), ("21-40", 21, 40), ("41+", 41, None))


def bucket_of(length: int) -> str:
    for label, lo, hi in BUCKETS:
        if length >= lo and (hi is None or length <= hi):
            return label
    raise ValueError(f"invalid sentence length {length}")


@dataclass(frozen=True)
class EvalReport:
    token_accuracy: float
    tokens_total: int
    tokens_correct: int
    length_buckets: dict[str, tuple[int, int, float]]
    infeasible_sentences: int = 0
    per_tag_confusion: dict[tuple[str, str], int] = field(default_factory=dict)

    def to_lines(self, prefix: str = "") -> list[str]:
        """``metric<TAB>value`` lines; :func:`parse_metrics` reads them back."""
        p = prefix
        out = [
            f"{p}token_accuracy\t{self.token_accuracy!r}",
            f"{p}tokens_total\t{self.tokens_total}",
            f"{p}tokens_correct\t{self.tokens_correct}",
            f"{p}infeasible_sentences\t{self.infeasible_sentences}",
        ]
        for label, _, _ in BUCKETS:
            if label in self.length_buckets:
                total, correct, acc = self.length_buckets[label]
                out += [
                    f"{p}bucket:{label}:tokens_total\t{total}",
                    f"{p}bucket:{label}:tokens_correct\t{correct}",
                    f"{p}bucket:{label}:accuracy\t{acc!r}",
                ]
        for (g, q), count in sorted(self.per_tag_confusion.items()):
            out.append(f"{p}confusion:{g}:{q}\t{count}")
        return out

    @classmethod
    def from_metrics(cls, metrics: dict[str, str], prefix: str = "") -> "EvalReport":
        def get(name):
            try:
                return metrics[prefix + name]
            except KeyError:
                raise EvaluationError(f"report is missing metric {prefix + name!r}") from None

        buckets = {}
        for label, _, _ in BUCKETS:
            key = f"bucket:{label}:tokens_total"
            if prefix + key in metrics:
                buckets[label] = (
                    int(get(key)),
                    int(get(f"bucket:{label}:tokens_correct")),
                    float(get(f"bucket:{label}:accuracy")),
                )
        confusion = {}
        head = prefix + "confusion:"
        for key, value in metrics.items():
            if key.startswith(head):
                g, _, q = key[len(head):].partition(":")
                confusion[g, q] = int(value)
        return cls(
            token_accuracy=float(get("token_accuracy")),
            tokens_total=int(get("tokens_total")),
            tokens_correct=int(get("tokens_correct")),
            length_buckets=buckets,
            infeasible_sentences=int(get("infeasible_sentences")),
            per_tag_confusion=confusion,
        )


def score(gold: Corpus, predicted: Sequence[Sequence[str]], infeasible: int = 0) -> EvalReport:
    if len(predicted) != len(gold.sentences):
        raise EvaluationError(
            f"sentence {min(len(predicted), len(gold.sentences))}: "
            f"got {len(predicted)} predictions for {len(gold.sentences)} gold sentences"
        )
    if not gold.sentences:
        raise EvaluationError("gold corpus is empty")
    total = correct = 0
    per_bucket: dict[str, list[int]] = {}
    confusion: Counter = Counter()
    for i, (sent, pred) in enumerate(zip(gold.sentences, predicted)):
        if len(pred) != len(sent):
            raise EvaluationError(f"sentence {i}: {len(pred)} predicted tags for {len(sent)} tokens")
        hits = 0
        for g, q in zip(sent.tags, pred):
            confusion[g, q] += 1
            hits += g == q
        slot = per_bucket.setdefault(bucket_of(len(sent)), [0, 0])
        slot[0] += len(sent)
        slot[1] += hits
        total += len(sent)
        correct += hits
    buckets = {label: (t, c, c / t) for label, (t, c) in per_bucket.items()}
    return EvalReport(correct / total, total, correct, buckets, infeasible, dict(confusion))


@dataclass(frozen=True)
class Decoded:
    tags: tuple[str, ...]
    feasible: bool
    cost: float


def default_threads() -> int:
    return os.cpu_count() or 1


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def decode_sentences(
    model: HmmModel,
    sentences: Sequence[Sentence],
    decoder: str,
    config: DecoderConfig = DecoderConfig(),
    oov: OovMode | None = None,
    threads: int = 1,
) -> list[Decoded]:
    """Decode in input order. Sentence i uses random stream i, so ``threads`` cannot change results."""
    if decoder == "aco":
        def run(item):
            i, sent = item
            r = aco_decode(build_trellis(model, sent, oov), config, stream=i)
            return Decoded(r.tags, r.feasible, r.cost)
    elif decoder == "viterbi":
        def run(item):
            _, sent = item
            r = viterbi_decode(model, sent, oov)
            return Decoded(r.tags, r.feasible, r.log_score)
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    return _map(run, list(enumerate(sentences)), threads)


def check_tags(gold: Corpus, model: HmmModel) -> None:
    known = set(model.tagset)
    for i, sent in enumerate(gold.sentences):
        for tag in sent.tags:
            if tag not in known:
                raise EvaluationError(f"sentence {i}: tag {tag!r} is not in the model tagset")


def evaluate(gold: Corpus, model: HmmModel, decoder: str, config=DecoderConfig(), oov=None, threads=1):
    if not gold.sentences:
        raise EvaluationError("test set is empty")
    check_tags(gold, model)
    out = decode_sentences(model, gold.sentences, decoder, config, oov, threads)
    return score(gold, [d.tags for d in out], sum(not d.feasible for d in out)), out


@dataclass(frozen=True)
class SentenceRow:
    index: int
    length: int
    aco_cost: float
    aco_correct: int
    viterbi_correct: int


def compare(
    gold: Corpus,
    model: HmmModel,
    config: DecoderConfig = DecoderConfig(),
    oov: OovMode | None = None,
    threads: int = 1,
) -> tuple[EvalReport, EvalReport, list[SentenceRow]]:
    """Decode ``gold`` with both decoders on the same model and score each."""
    aco_report, aco_out = evaluate(gold, model, "aco", config, oov, threads)
    vit_report, vit_out = evaluate(gold, model, "viterbi", config, oov, threads)
    rows = []
    for i, (sent, a, v) in enumerate(zip(gold.sentences, aco_out, vit_out)):
        rows.append(SentenceRow(
            i, len(sent), a.cost,
            sum(g == q for g, q in zip(sent.tags, a.tags)),
            sum(g == q for g, q in zip(sent.tags, v.tags)),
        ))
    return aco_report, vit_report, rows


def majority_baseline(train: Corpus, test_sentences: Iterable[Sentence]) -> list[tuple[str, ...]]:
    """Most frequent training tag per word; unseen words get the overall most frequent tag."""
    by_word: dict[str, Counter] = {}
    overall: Counter = Counter()
    for sent in train.sentences:
        for w, t in zip(sent.surfaces, sent.tags):
            by_word.setdefault(w, Counter())[t] += 1
            overall[t] += 1
    rank = {t: i for i, t in enumerate(train.tagset)}

    def top(counter):
        # ties go to the earlier tag in the tagset
        return min(counter, key=lambda t: (-counter[t], rank.get(t, len(rank))))

    fallback = top(overall)
    best = {w: top(c) for w, c in by_word.items()}
    return [tuple(best.get(w, fallback) for w in sent.surfaces) for sent in test_sentences]


# --------------------------------------------------------------------------
# report files


def _fmt_acc(x: float) -> str:
    return f"{x:.6f}" if math.isfinite(x) else "nan"


def render_table(reports: dict[str, EvalReport]) -> list[str]:
    names = list(reports)
    lines = ["accuracy is pooled per token over all test sentences", ""]
    lines.append("metric".ljust(22) + "".join(n.rjust(18) for n in names))
    lines.append("token_accuracy".ljust(22) + "".join(_fmt_acc(reports[n].token_accuracy).rjust(18) for n in names))
    lines.append("tokens_correct".ljust(22) + "".join(str(reports[n].tokens_correct).rjust(18) for n in names))
    lines.append("tokens_total".ljust(22) + "".join(str(reports[n].tokens_total).rjust(18) for n in names))
    lines.append("infeasible_sentences".ljust(22) + "".join(str(reports[n].infeasible_sentences).rjust(18) for n in names))
    for label, _, _ in BUCKETS:
        cells = []
        for n in names:
            b = reports[n].length_buckets.get(label)
            cells.append(("-" if b is None else f"{_fmt_acc(b[2])} ({b[0]})").rjust(18))
        lines.append(f"len {label}".ljust(22) + "".join(cells))
    return lines


def render_sentence_rows(rows: Sequence[SentenceRow]) -> list[str]:
    out = ["index\tlength\taco_cost\taco_correct\tviterbi_correct"]
    for r in rows:
        cost = "inf" if math.isinf(r.aco_cost) else repr(r.aco_cost)
        out.append(f"{r.index}\t{r.length}\t{cost}\t{r.aco_correct}\t{r.viterbi_correct}")
    return out


def format_report(reports: dict[str, EvalReport], rows: Sequence[SentenceRow] | None = None) -> str:
    """Human table (``#``-prefixed) followed by machine-readable ``metric<TAB>value`` lines."""
    text = ["# " + line if line else "#" for line in render_table(reports)]
    if rows is not None:
        text.append("#")
        text += ["# " + line for line in render_sentence_rows(rows)]
    text.append("")
    for name, report in reports.items():
        text += report.to_lines(prefix=f"{name}.")
    return "\n".join(text) + "\n"


def parse_metrics(text: str) -> dict[str, str]:
    metrics = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("\t")
        if not sep or "\t" in value:
            raise EvaluationError(f"report line {lineno}: expected metric<TAB>value")
        metrics[key] = value
    return metrics


def parse_report(text: str) -> dict[str, EvalReport]:
    metrics = parse_metrics(text)
    names = sorted({k.split(".", 1)[0] for k in metrics if "." in k})
    return {n: EvalReport.from_metrics(metrics, prefix=f"{n}.") for n in names}
