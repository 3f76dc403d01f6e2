"""Ant colony optimization part-of-speech tagger over an HMM trellis, with a Viterbi baseline."""

__version__ = "0.1.0"

from ._accel import backend
from .aco import DecodeResult, DecoderConfig, PheromoneTable, aco_decode, run_ant, select_next, update_pheromones
from .corpus import Corpus, Sentence, SplitSpec, Token, generate_synthetic, read_corpus, split_corpus, write_corpus
from .evaluation import EvalReport, compare, score
from .model import HmmModel, OovMode, emission_lookup, read_model, train, write_model
from .trellis import Trellis, build_trellis, edge_distance, path_cost
from .viterbi import ViterbiResult, enumerate_oracle, viterbi_decode

__all__ = [
    "Corpus", "DecodeResult", "DecoderConfig", "EvalReport", "HmmModel", "OovMode", "PheromoneTable",
    "Sentence", "SplitSpec", "Token", "Trellis", "ViterbiResult", "aco_decode", "backend", "build_trellis",
    "compare", "edge_distance", "emission_lookup", "enumerate_oracle", "generate_synthetic", "path_cost",
    "read_corpus", "read_model", "run_ant", "score", "select_next", "split_corpus", "train",
    "update_pheromones", "viterbi_decode", "write_corpus", "write_model",
]
