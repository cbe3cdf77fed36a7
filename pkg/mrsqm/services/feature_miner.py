"""
Discriminative subword selection over symbolic sequences.

A feature is a contiguous substring of a single symbolic word. Its observed
frequency in class k is the number of class-k sequences containing it
(document frequency), which is anti-monotone under extension: a subword is
never more frequent than its prefix. The Chi2 bound of a trie node therefore
bounds the score of every descendant and lets the miner prune whole subtrees.
"""
import heapq
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from mrsqm.core.config import settings
from mrsqm.core.errors import ArgumentError
from mrsqm.core.rng import RandomState, as_generator
from mrsqm.models.enums import SelectionStrategy
from mrsqm.schemas.mining import ClassCounts, FeatureSet, MiningStats
from mrsqm.schemas.symbolic import SymbolicSequence

logger = logging.getLogger(__name__)

CountsLike = Union[ClassCounts, Sequence[int], np.ndarray]


# ---------- CHI2 ----------

def _chi2_rows(observed: np.ndarray, class_sizes: np.ndarray) -> np.ndarray:
    """Chi2 of each row of observed (m, C) with expected T * N_k / N."""
    total = observed.sum(axis=1, keepdims=True)
    expected = total * class_sizes / class_sizes.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (observed - expected) ** 2 / expected
    scores = terms.sum(axis=1)
    scores[total[:, 0] == 0] = 0.0
    return scores


def _as_arrays(counts: CountsLike, class_sizes: Optional[Sequence[int]]) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(counts, ClassCounts):
        observed, sizes = counts.per_class, counts.class_sizes
    else:
        if class_sizes is None:
            raise ArgumentError("class_sizes are required with raw counts")
        observed, sizes = counts, class_sizes
    observed = np.asarray(observed, dtype=np.float64)
    sizes = np.asarray(sizes, dtype=np.float64)
    if observed.shape != sizes.shape or observed.ndim != 1:
        raise ArgumentError("Observed counts and class sizes must be vectors of equal length")
    if np.any(sizes <= 0):
        raise ArgumentError(f"Class sizes must be positive, got {sizes.tolist()}")
    if np.any(observed < 0) or np.any(observed > sizes):
        raise ArgumentError(
            f"Observed counts {observed.tolist()} must lie within 0..class sizes {sizes.tolist()}"
        )
    return observed, sizes


def chi2_score(counts: CountsLike, class_sizes: Optional[Sequence[int]] = None) -> float:
    """
    Chi-square statistic of a subword's per-class document frequencies.

    With T = sum(O) and E_k = T * N_k / N, returns sum((O_k - E_k)^2 / E_k),
    or 0 when the subword occurs nowhere.
    """
    observed, sizes = _as_arrays(counts, class_sizes)
    return float(_chi2_rows(observed[None, :], sizes)[0])


def _bound_rows(observed: np.ndarray, class_sizes: np.ndarray) -> np.ndarray:
    C = class_sizes.size
    # row (i, k) keeps only O_ik
    single = (observed[:, :, None] * np.eye(C)[None, :, :]).reshape(-1, C)
    return _chi2_rows(single, class_sizes).reshape(-1, C).max(axis=1)


def chi2_bound(counts: CountsLike, class_sizes: Optional[Sequence[int]] = None) -> float:
    """
    Upper bound of chi2_score over every counts' <= counts componentwise.

    max_k chi2 of the vector keeping O_k and zeroing every other class.
    """
    observed, sizes = _as_arrays(counts, class_sizes)
    return float(_bound_rows(observed[None, :], sizes)[0])


# ---------- CORPUS ----------

def _encode_labels(labels: Sequence, n_sequences: int) -> Tuple[np.ndarray, np.ndarray]:
    if len(labels) != n_sequences:
        raise ArgumentError(f"{len(labels)} labels for {n_sequences} sequences")
    _, codes = np.unique(np.asarray(labels), return_inverse=True)
    codes = codes.reshape(-1)
    return codes, np.bincount(codes)


def _require_classes(class_sizes: np.ndarray) -> None:
    if class_sizes.size < 2:
        raise ArgumentError("Supervised selection needs at least 2 classes")


def document_presence(sequences: Sequence[SymbolicSequence], subwords: Sequence[str]) -> np.ndarray:
    """(N, m) boolean matrix: subword j occurs inside some word of sequence i."""
    presence = np.zeros((len(sequences), len(subwords)), dtype=bool)
    for i, sequence in enumerate(sequences):
        text = sequence.text
        presence[i] = [subword in text for subword in subwords]
    return presence


def class_counts(
    sequences: Sequence[SymbolicSequence], labels: Sequence, subwords: Sequence[str]
) -> List[ClassCounts]:
    """Per-class document frequency of each subword."""
    codes, sizes = _encode_labels(labels, len(sequences))
    observed = _observed_matrix(document_presence(sequences, subwords), codes, sizes.size)
    return [
        ClassCounts(per_class=row.tolist(), class_sizes=sizes.tolist()) for row in observed
    ]


def _observed_matrix(presence: np.ndarray, codes: np.ndarray, n_classes: int) -> np.ndarray:
    observed = np.zeros((presence.shape[1], n_classes), dtype=np.int64)
    for c in range(n_classes):
        observed[:, c] = presence[codes == c].sum(axis=0)
    return observed


def count_subwords(sequences: Sequence[SymbolicSequence], labels: Sequence) -> Dict[str, ClassCounts]:
    """Exhaustive document-frequency table of every contiguous subword."""
    codes, sizes = _encode_labels(labels, len(sequences))
    observed: Dict[str, np.ndarray] = {}
    for code, sequence in zip(codes, sequences):
        seen = {
            word[start:end]
            for word in sequence.words
            for start in range(len(word))
            for end in range(start + 1, len(word) + 1)
        }
        for subword in seen:
            observed.setdefault(subword, np.zeros(sizes.size, dtype=np.int64))[code] += 1
    return {
        subword: ClassCounts(per_class=row.tolist(), class_sizes=sizes.tolist())
        for subword, row in observed.items()
    }


# ---------- TRIE ----------

@dataclass
class TrieNode:
    """
    One subword of the trie with its inverted index.

    Location i is (sequence_ids[i], word_ids[i], end_positions[i]): the
    subword ends at end_positions[i] inside word word_ids[i].
    """
    subword: str
    sequence_ids: np.ndarray
    word_ids: np.ndarray
    end_positions: np.ndarray
    per_class: np.ndarray

    @property
    def locations(self) -> List[Tuple[int, int, int]]:
        return list(zip(self.sequence_ids.tolist(), self.word_ids.tolist(), self.end_positions.tolist()))

    @property
    def support(self) -> int:
        return int(self.per_class.sum())


class SubsequenceMiner:
    """
    Branch-and-bound search for the top-k Chi2 subwords of one representation.

    The trie is expanded depth-first with an explicit stack. A node is admitted
    when its score reaches the current threshold (the k-th best score held so
    far, 0 until k features are held) and its subtree is pruned when its Chi2
    bound falls below the threshold.
    """

    def __init__(self, sequences: Sequence[SymbolicSequence], labels: Sequence):
        self.codes, self.class_sizes = _encode_labels(labels, len(sequences))
        _require_classes(self.class_sizes)
        self.n_classes = self.class_sizes.size
        self._sizes = self.class_sizes.astype(np.float64)

        words = [word for sequence in sequences for word in sequence.words]
        self.word_seq = np.repeat(
            np.arange(len(sequences)), [len(sequence.words) for sequence in sequences]
        )
        self.word_len = np.array([len(word) for word in words], dtype=np.int64)
        width = int(self.word_len.max()) if words else 0
        self.chars = np.zeros((len(words), max(width, 1)), dtype=np.uint8)
        for i, word in enumerate(words):
            self.chars[i, :len(word)] = np.frombuffer(word.encode("ascii"), dtype=np.uint8)
        self.stats = MiningStats()

    def _children(self, prefix: str, word_ids: np.ndarray, positions: np.ndarray) -> List[TrieNode]:
        """Group candidate next locations by their symbol, in lexicographic order."""
        if word_ids.size == 0:
            return []
        symbols = self.chars[word_ids, positions]
        order = np.argsort(symbols, kind="stable")
        symbols, word_ids, positions = symbols[order], word_ids[order], positions[order]
        values, starts = np.unique(symbols, return_index=True)
        bounds = np.append(starts, symbols.size)

        children = []
        for i, value in enumerate(values):
            wid = word_ids[bounds[i]:bounds[i + 1]]
            seq = self.word_seq[wid]
            per_class = np.bincount(self.codes[np.unique(seq)], minlength=self.n_classes)
            children.append(
                TrieNode(
                    subword=prefix + chr(value),
                    sequence_ids=seq,
                    word_ids=wid,
                    end_positions=positions[bounds[i]:bounds[i + 1]],
                    per_class=per_class,
                )
            )
        return children

    def root_children(self) -> List[TrieNode]:
        word_ids = np.repeat(np.arange(self.word_len.size), self.word_len)
        positions = np.concatenate([np.arange(n) for n in self.word_len]) if word_ids.size else word_ids
        return self._children("", word_ids, positions)

    def expand(self, node: TrieNode) -> List[TrieNode]:
        nxt = node.end_positions + 1
        mask = nxt < self.word_len[node.word_ids]
        return self._children(node.subword, node.word_ids[mask], nxt[mask])

    def score(self, node: TrieNode) -> float:
        return float(_chi2_rows(node.per_class[None, :].astype(np.float64), self._sizes)[0])

    def bound(self, node: TrieNode) -> float:
        return float(_bound_rows(node.per_class[None, :].astype(np.float64), self._sizes)[0])

    def iter_trie(self) -> Iterator[Tuple[Optional[TrieNode], TrieNode]]:
        """Every (parent, node) pair of the fully expanded trie; parent is None at depth 1."""
        stack = [(None, child) for child in reversed(self.root_children())]
        while stack:
            parent, node = stack.pop()
            yield parent, node
            stack.extend((node, child) for child in reversed(self.expand(node)))

    def mine(self, budget: int, min_support: int = 1, prune: bool = True) -> FeatureSet:
        """
        Select the top-budget subwords by Chi2 score.

        Args:
            budget: Number of features to select
            min_support: Nodes occurring in fewer sequences are never admitted
            prune: Disable to expand the whole trie (same result, more nodes)

        Returns:
            FeatureSet ordered by descending score, ties shorter-first then
            lexicographic
        """
        if budget < 1:
            raise ArgumentError(f"Budget must be >= 1, got {budget}")
        stats = MiningStats()
        threshold = 0.0
        top: List[float] = []  # min-heap of the best `budget` scores
        held: List[Tuple[float, str, np.ndarray]] = []

        stack = list(reversed(self.root_children()))
        while stack:
            node = stack.pop()
            stats.visited += 1
            support = node.support
            score = self.score(node)

            if support >= min_support and score >= threshold:
                held.append((score, node.subword, node.per_class))
                stats.admitted += 1
                if len(top) < budget:
                    heapq.heappush(top, score)
                else:
                    heapq.heappushpop(top, score)
                if len(top) == budget:
                    threshold = top[0]
                if len(held) > 4 * budget:
                    held = [h for h in held if h[0] >= threshold]

            if support < min_support or (prune and self.bound(node) < threshold):
                stats.pruned += 1
                continue
            stats.expanded += 1
            stack.extend(reversed(self.expand(node)))

        held = sorted(
            (h for h in held if h[0] >= threshold),
            key=lambda h: (-h[0], len(h[1]), h[1]),
        )[:budget]
        stats.threshold = threshold
        self.stats = stats
        logger.debug(
            f"Mined {len(held)} subwords: visited={stats.visited} expanded={stats.expanded} "
            f"pruned={stats.pruned} threshold={threshold:.4f}"
        )
        return FeatureSet(
            subwords=[h[1] for h in held],
            strategy=SelectionStrategy.S,
            scores=[h[0] for h in held],
        )


# ---------- STRATEGIES ----------

def select_supervised(
    sequences: Sequence[SymbolicSequence],
    labels: Sequence,
    budget: int,
    min_support: int = 1,
    prune: bool = True,
) -> FeatureSet:
    """Optimal top-budget Chi2 subwords (strategy S)."""
    return SubsequenceMiner(sequences, labels).mine(budget, min_support=min_support, prune=prune)


def select_random(
    sequences: Sequence[SymbolicSequence],
    budget: int,
    max_subword_len: Optional[int] = None,
    rng: RandomState = None,
    attempt_factor: int = settings.RANDOM_ATTEMPT_FACTOR,
) -> FeatureSet:
    """
    Sample distinct subwords uniformly by (sequence, word, start, length).

    Stops at budget distinct subwords or after attempt_factor * budget draws,
    whichever comes first, so small vocabularies may yield fewer features.
    """
    if budget < 1:
        raise ArgumentError(f"Budget must be >= 1, got {budget}")
    sequences = [sequence for sequence in sequences if sequence.words]
    if not sequences:
        raise ArgumentError("Random selection needs at least one non-empty sequence")
    rng = as_generator(rng)

    n_words = np.array([len(sequence.words) for sequence in sequences])
    found: Dict[str, None] = {}
    attempts, cap = 0, attempt_factor * budget
    while len(found) < budget and attempts < cap:
        batch = min(cap - attempts, max(budget - len(found), 64))
        seq_idx = rng.integers(0, len(sequences), size=batch)
        word_draw = rng.random(batch)
        start_draw = rng.random(batch)
        length_draw = rng.random(batch)
        for i in range(batch):
            attempts += 1
            words = sequences[seq_idx[i]].words
            word = words[int(word_draw[i] * n_words[seq_idx[i]])]
            start = int(start_draw[i] * len(word))
            longest = len(word) - start
            if max_subword_len is not None:
                longest = min(longest, max_subword_len)
            length = 1 + int(length_draw[i] * longest)
            found.setdefault(word[start:start + length])
            if len(found) >= budget:
                break

    if len(found) < budget:
        logger.debug(f"Random sampler found {len(found)} of {budget} subwords in {attempts} draws")
    return FeatureSet(subwords=list(found), strategy=SelectionStrategy.R)


def select_rs(
    sequences: Sequence[SymbolicSequence],
    labels: Sequence,
    budget: int,
    rng: RandomState = None,
    pool_multiplier: int = settings.POOL_MULTIPLIER,
    max_subword_len: Optional[int] = None,
    attempt_factor: int = settings.RANDOM_ATTEMPT_FACTOR,
) -> FeatureSet:
    """Random candidate pool filtered to the best budget by Chi2 (strategy RS)."""
    codes, sizes = _encode_labels(labels, len(sequences))
    _require_classes(sizes)
    pool = select_random(
        sequences, budget * pool_multiplier, max_subword_len=max_subword_len,
        rng=rng, attempt_factor=attempt_factor,
    ).subwords
    observed = _observed_matrix(document_presence(sequences, pool), codes, sizes.size)
    scores = _chi2_rows(observed.astype(np.float64), sizes.astype(np.float64))
    ranked = sorted(range(len(pool)), key=lambda j: (-scores[j], pool[j]))[:budget]
    return FeatureSet(
        subwords=[pool[j] for j in ranked],
        strategy=SelectionStrategy.RS,
        scores=[float(scores[j]) for j in ranked],
    )


def select_sr(
    sequences: Sequence[SymbolicSequence],
    labels: Sequence,
    budget: int,
    rng: RandomState = None,
    pool_multiplier: int = settings.POOL_MULTIPLIER,
    min_support: int = 1,
) -> FeatureSet:
    """Top Chi2 pool thinned by uniform sampling without replacement (strategy SR)."""
    supervised = select_supervised(sequences, labels, budget * pool_multiplier, min_support=min_support)
    if len(supervised) <= budget:
        keep = list(range(len(supervised)))
    else:
        keep = sorted(as_generator(rng).choice(len(supervised), size=budget, replace=False).tolist())
    return FeatureSet(
        subwords=[supervised.subwords[i] for i in keep],
        strategy=SelectionStrategy.SR,
        scores=[supervised.scores[i] for i in keep],
    )


def select(
    strategy: Union[SelectionStrategy, str],
    sequences: Sequence[SymbolicSequence],
    labels: Sequence,
    budget: int,
    rng: RandomState = None,
    pool_multiplier: int = settings.POOL_MULTIPLIER,
    min_support: int = 1,
    max_subword_len: Optional[int] = None,
) -> FeatureSet:
    """Dispatch to one of the four selection strategies."""
    strategy = SelectionStrategy(strategy)
    if strategy == SelectionStrategy.R:
        return select_random(sequences, budget, max_subword_len=max_subword_len, rng=rng)
    if strategy == SelectionStrategy.S:
        return select_supervised(sequences, labels, budget, min_support=min_support)
    if strategy == SelectionStrategy.RS:
        return select_rs(
            sequences, labels, budget, rng=rng, pool_multiplier=pool_multiplier,
            max_subword_len=max_subword_len,
        )
    return select_sr(
        sequences, labels, budget, rng=rng, pool_multiplier=pool_multiplier,
        min_support=min_support,
    )


def format_diagnostics(
    reports: Sequence[Tuple[int, FeatureSet, Sequence[ClassCounts]]], class_names: Sequence[str]
) -> str:
    """Tab-separated dump: representation, subword, per-class counts, score."""
    lines = ["\t".join(["representation", "subword", *class_names, "score"])]
    for rep_index, features, counts in reports:
        for subword, count in zip(features.subwords, counts):
            if len(count.per_class) != len(class_names):
                raise ArgumentError(
                    f"{len(count.per_class)} class counts for {len(class_names)} class names"
                )
            score = chi2_score(count)
            per_class = [str(o) for o in count.per_class]
            lines.append("\t".join([str(rep_index), subword, *per_class, f"{score:.6f}"]))
    return "\n".join(lines) + "\n"
