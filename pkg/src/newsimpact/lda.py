"""Latent Dirichlet allocation over headline tokens via collapsed Gibbs sampling."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from newsimpact.corpus import Headline
from newsimpact.errors import EmptyResultError, InputError
from newsimpact.text import default_stopwords, tokenize

DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
DEFAULT_MIN_COUNT = 2


@dataclass
class Vocab:
    token_to_id: dict[str, int]
    id_to_token: list[str]
    doc_freq: list[int]  # number of documents containing each token

    def __len__(self) -> int:
        return len(self.id_to_token)


@dataclass
class LdaModel:
    n_topics: int
    alpha: float
    beta: float
    phi: np.ndarray  # (K, V) topic-word distributions
    theta: np.ndarray  # (D, K) doc-topic distributions
    seed: int
    n_iterations: int


def build_vocab(
    headlines: list[Headline],
    min_count: int = DEFAULT_MIN_COUNT,
    stopwords=None,
) -> tuple[Vocab, list[list[str]]]:
    """Tokenize headlines and build a filtered, alphabetically-ordered vocabulary.

    Documents that lose all their tokens are kept as empty lists so that
    document indices stay aligned with the input.
    """
    if not headlines:
        raise InputError("empty headline corpus")
    if min_count < 1:
        raise InputError(f"min_count must be >= 1, got {min_count}")
    if stopwords is None:
        stopwords = default_stopwords()
    raw_docs = [[t for t in tokenize(h.title) if t not in stopwords] for h in headlines]
    counts = Counter(t for doc in raw_docs for t in doc)
    kept = sorted(t for t, c in counts.items() if c >= min_count)
    if not kept:
        raise EmptyResultError(
            f"vocabulary is empty after filtering (min_count={min_count}, "
            f"{len(stopwords)} stopwords)"
        )
    token_to_id = {t: i for i, t in enumerate(kept)}
    docs = [[t for t in doc if t in token_to_id] for doc in raw_docs]
    doc_freq = [0] * len(kept)
    for doc in docs:
        for t in set(doc):
            doc_freq[token_to_id[t]] += 1
    return Vocab(token_to_id, kept, doc_freq), docs


class GibbsSampler:
    """Collapsed Gibbs state: topic assignments and the three count tables.

    Exposed separately from lda_fit so callers can step sweep-by-sweep and
    inspect the counts (the test suite checks count conservation).
    """

    def __init__(self, docs: list[list[str]], vocab: Vocab, n_topics: int,
                 alpha: float, beta: float, seed: int):
        if n_topics < 1:
            raise InputError(f"number of topics must be >= 1, got {n_topics}")
        if alpha <= 0 or beta <= 0:
            raise InputError(f"alpha and beta must be positive, got {alpha}, {beta}")
        self.docs = [np.array([vocab.token_to_id[t] for t in doc], dtype=np.int64)
                     for doc in docs]
        if not any(len(d) for d in self.docs):
            raise InputError("all documents are empty")
        self.n_topics = n_topics
        self.n_vocab = len(vocab)
        self.alpha = alpha
        self.beta = beta
        self.rng = np.random.default_rng(seed)
        d, k, v = len(self.docs), n_topics, self.n_vocab
        self.doc_topic = np.zeros((d, k), dtype=np.int64)
        self.topic_word = np.zeros((k, v), dtype=np.int64)
        self.topic_total = np.zeros(k, dtype=np.int64)
        self.assignments = []
        for di, doc in enumerate(self.docs):
            z = self.rng.integers(k, size=len(doc))
            self.assignments.append(z)
            for w, t in zip(doc, z):
                self.doc_topic[di, t] += 1
                self.topic_word[t, w] += 1
                self.topic_total[t] += 1

    def sweep(self) -> None:
        """One full pass resampling every token's topic."""
        vbeta = self.n_vocab * self.beta
        for di, doc in enumerate(self.docs):
            z = self.assignments[di]
            for pos in range(len(doc)):
                w, old = doc[pos], z[pos]
                self.doc_topic[di, old] -= 1
                self.topic_word[old, w] -= 1
                self.topic_total[old] -= 1
                weights = (
                    (self.doc_topic[di] + self.alpha)
                    * (self.topic_word[:, w] + self.beta)
                    / (self.topic_total + vbeta)
                )
                cum = np.cumsum(weights)
                new = int(np.searchsorted(cum, self.rng.random() * cum[-1], side="right"))
                new = min(new, self.n_topics - 1)
                z[pos] = new
                self.doc_topic[di, new] += 1
                self.topic_word[new, w] += 1
                self.topic_total[new] += 1

    def distributions(self) -> tuple[np.ndarray, np.ndarray]:
        """Smoothed phi (K x V) and theta (D x K) read off the counts."""
        phi = self.topic_word + self.beta
        phi = phi / phi.sum(axis=1, keepdims=True)
        theta = self.doc_topic + self.alpha
        theta = theta / theta.sum(axis=1, keepdims=True)
        return phi, theta


def lda_fit(
    docs: list[list[str]],
    vocab: Vocab,
    n_topics: int,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 42,
) -> LdaModel:
    """Run collapsed Gibbs for a fixed number of sweeps and read off phi/theta."""
    if iterations < 1:
        raise InputError(f"iterations must be >= 1, got {iterations}")
    sampler = GibbsSampler(docs, vocab, n_topics, alpha, beta, seed)
    for _ in range(iterations):
        sampler.sweep()
    phi, theta = sampler.distributions()
    return LdaModel(n_topics, alpha, beta, phi, theta, seed, iterations)


def top_keywords(model: LdaModel, vocab: Vocab, top_k: int = 10) -> list[list[str]]:
    """Per-topic tokens by descending phi, ties broken lexicographically."""
    v = len(vocab)
    if top_k > v:
        raise InputError(f"top_k={top_k} exceeds vocabulary size {v}")
    out = []
    for k in range(model.n_topics):
        order = sorted(range(v), key=lambda w: (-model.phi[k, w], vocab.id_to_token[w]))
        out.append([vocab.id_to_token[w] for w in order[:top_k]])
    return out


def write_keywords_csv(model: LdaModel, vocab: Vocab, top_k: int, path: str | Path) -> None:
    """Export topic,rank,token,probability rows."""
    keywords = top_keywords(model, vocab, top_k)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["topic", "rank", "token", "probability"])
        for k, tokens in enumerate(keywords):
            for rank, token in enumerate(tokens, start=1):
                prob = model.phi[k, vocab.token_to_id[token]]
                writer.writerow([k, rank, token, f"{prob:.6f}"])
