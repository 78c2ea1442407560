#!/usr/bin/env python3
"""Throughput comparison: compiled WordPiece kernel vs pure-Python twin.

Builds a synthetic vocabulary and comment corpus, then times full
``tokenize`` calls (normalize, pre-split, greedy WordPiece, pad to 128)
through both implementations.

Run: python benchmarks/bench_tokenizer.py [--texts N] [--repeats R]
"""
from __future__ import annotations

import argparse
import random
import statistics
import time

from toxishield.tokenizer import HAVE_COMPILED_KERNEL, Vocab, tokenize

WORD_STEMS = [
    "please", "fix", "loop", "bound", "review", "build", "test", "merge",
    "branch", "commit", "rebase", "deploy", "config", "parser", "token",
    "thread", "socket", "buffer", "cache", "index", "query", "schema",
]
SUFFIX_PIECES = ["##ing", "##ed", "##er", "##s", "##able", "##ment", "##ly"]


def build_vocab() -> Vocab:
    tokens = list(WORD_STEMS) + SUFFIX_PIECES
    tokens += [f"##{c}" for c in "abcdefghijklmnopqrstuvwxyz"]
    tokens += list("abcdefghijklmnopqrstuvwxyz")
    tokens += [".", ",", "!", "?", "(", ")", ":", ";"]
    return Vocab.from_tokens(tokens)


def build_corpus(n_texts: int, seed: int = 7) -> list[str]:
    rng = random.Random(seed)
    corpus = []
    for _ in range(n_texts):
        words = []
        for _ in range(rng.randint(8, 60)):
            stem = rng.choice(WORD_STEMS)
            if rng.random() < 0.4:
                stem += rng.choice(SUFFIX_PIECES)[2:]
            if rng.random() < 0.1:
                stem += rng.choice("!?.,")
            words.append(stem)
        corpus.append(" ".join(words))
    return corpus


def time_impl(corpus: list[str], vocab: Vocab, force_python: bool, repeats: int) -> list[float]:
    runs = []
    for _ in range(repeats):
        start = time.perf_counter()
        for text in corpus:
            tokenize(text, vocab, 128, force_python=force_python)
        runs.append(time.perf_counter() - start)
    return runs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--texts", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    vocab = build_vocab()
    corpus = build_corpus(args.texts)

    print(f"corpus: {args.texts} texts, vocab: {len(vocab)} tokens, "
          f"repeats: {args.repeats}")
    if not HAVE_COMPILED_KERNEL:
        print("compiled kernel: NOT AVAILABLE in this build "
              "(pure-Python timings only)")

    results = {}
    for label, force_python in (("pure-python", True), ("compiled", False)):
        if force_python is False and not HAVE_COMPILED_KERNEL:
            continue
        runs = time_impl(corpus, vocab, force_python, args.repeats)
        best = min(runs)
        results[label] = best
        throughput = args.texts / best
        print(f"{label:12s} best {best * 1e3:8.1f} ms  "
              f"median {statistics.median(runs) * 1e3:8.1f} ms  "
              f"{throughput:10.0f} texts/s  "
              f"{best / args.texts * 1e6:6.1f} us/text")

    if len(results) == 2:
        speedup = results["pure-python"] / results["compiled"]
        print(f"speedup: {speedup:.2f}x (compiled over pure-python)")

    # sanity: both paths must produce identical output
    if HAVE_COMPILED_KERNEL:
        for text in corpus[:200]:
            a = tokenize(text, vocab, 128)
            b = tokenize(text, vocab, 128, force_python=True)
            assert a == b, "implementations disagree"
        print("equivalence check: compiled and pure outputs identical on 200 texts")


if __name__ == "__main__":
    main()
