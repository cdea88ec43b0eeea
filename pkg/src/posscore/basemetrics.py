"""Reference-based baseline metrics: sentence BLEU-1..4, METEOR, Embedding
Average, plus ingestion of precomputed external score files.

BLEU uses an epsilon floor (1e-9) on zero precision counts instead of a
smoothing schedule, so short responses never hard-zero. METEOR follows the
alpha=0.9, beta=3, gamma=0.5 parameterization with a three-stage matcher
(exact, Porter stem, optional synonym lexicon) and an exact minimum-chunk
alignment for normal sentence lengths.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .core import Token
from .embed import EmbeddingTable, average_embedding, cosine
from .stem import porter_stem

BLEU_EPSILON = 1e-9

METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5

# Exact alignment search limits; longer inputs fall back to a heuristic.
_ALIGN_MAX_LEN = 48
_ALIGN_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class MetricScore:
    """A metric value plus optional component breakdown."""

    metric_id: str
    value: float
    details: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"{self.metric_id}: non-finite score {self.value!r}")


def _ngram_counts(norms: Sequence[str], k: int) -> Counter:
    return Counter(tuple(norms[i : i + k]) for i in range(len(norms) - k + 1))


def bleu_n(
    reference: Sequence[Token], candidate: Sequence[Token], n: int
) -> MetricScore:
    """Sentence-level BLEU-n: clipped k-gram precisions for k=1..n under
    uniform weights, times the brevity penalty. Empty candidate scores 0.
    """
    if n not in (1, 2, 3, 4):
        raise ValueError(f"BLEU order must be in 1..4, got {n}")
    metric_id = f"bleu{n}"
    ref = [t.norm for t in reference]
    cand = [t.norm for t in candidate]
    if not cand:
        return MetricScore(metric_id, 0.0, {"bp": 0.0, "cand_len": 0.0, "ref_len": float(len(ref))})
    details: dict[str, float] = {
        "ref_len": float(len(ref)),
        "cand_len": float(len(cand)),
    }
    log_sum = 0.0
    for k in range(1, n + 1):
        cand_counts = _ngram_counts(cand, k)
        ref_counts = _ngram_counts(ref, k)
        total = max(len(cand) - k + 1, 0)
        clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        if total > 0:
            p_k = max(float(clipped), BLEU_EPSILON) / total
        else:
            p_k = BLEU_EPSILON
        details[f"p{k}"] = p_k
        log_sum += math.log(p_k) / n
    bp = min(1.0, math.exp(1.0 - len(ref) / len(cand)))
    details["bp"] = bp
    return MetricScore(metric_id, bp * math.exp(log_sum), details)


class SynonymLexicon:
    """Symmetric word-relatedness set loaded from ``lemma<TAB>synonym`` lines."""

    def __init__(self, pairs: Sequence[tuple[str, str]] = ()) -> None:
        self._pairs: frozenset[tuple[str, str]] = frozenset(
            (a.casefold(), b.casefold()) for a, b in pairs
        )

    def __len__(self) -> int:
        return len(self._pairs)

    def related(self, a: str, b: str) -> bool:
        return (a, b) in self._pairs or (b, a) in self._pairs

    @classmethod
    def load(cls, path: str | Path) -> "SynonymLexicon":
        pairs: list[tuple[str, str]] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2 or not fields[0] or not fields[1]:
                    raise ValueError(
                        f"{path}: line {lineno}: expected 'lemma<TAB>synonym'"
                    )
                pairs.append((fields[0], fields[1]))
        return cls(pairs)


def _match_edges(
    cand: Sequence[str], ref: Sequence[str], synonyms: SynonymLexicon | None
) -> list[list[int]]:
    """adj[i] = reference positions j that candidate position i may align to."""
    ref_stems = [porter_stem(w) for w in ref]
    cand_stems = [porter_stem(w) for w in cand]
    adj: list[list[int]] = []
    for i, cw in enumerate(cand):
        row = [
            j
            for j, rw in enumerate(ref)
            if cw == rw
            or cand_stems[i] == ref_stems[j]
            or (synonyms is not None and synonyms.related(cw, rw))
        ]
        adj.append(row)
    return adj


def _max_matching(adj: list[list[int]], n_ref: int) -> list[int]:
    """Kuhn's augmenting-path maximum bipartite matching.

    Returns match_of_ref (length n_ref, -1 = free). Deterministic.
    """
    match_of_ref = [-1] * n_ref

    def try_augment(i: int, visited: list[bool]) -> bool:
        for j in adj[i]:
            if not visited[j]:
                visited[j] = True
                if match_of_ref[j] == -1 or try_augment(match_of_ref[j], visited):
                    match_of_ref[j] = i
                    return True
        return False

    for i in range(len(adj)):
        try_augment(i, [False] * n_ref)
    return match_of_ref

def _count_chunks(pairs: list[tuple[int, int]]) -> int:
    """Chunks of an alignment given (cand_pos, ref_pos) pairs in cand order."""
    chunks = 0
    prev: tuple[int, int] | None = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def _min_chunk_alignment(
    adj: list[list[int]], n_ref: int
) -> tuple[int, int, bool]:
    """(matches, chunks, exact) for a maximum-cardinality, fewest-chunk alignment.

    Branch-and-bound over candidate positions in order; the cardinality is
    pinned to the true maximum first, then chunks are minimized. Exceeding
    the node budget degrades to the best alignment found so far (or, failing
    that, the chunk count of a plain maximum matching).
    """
    n_cand = len(adj)
    match_of_ref = _max_matching(adj, n_ref)
    target = sum(1 for i in match_of_ref if i != -1)
    if target == 0:
        return 0, 0, True

    # suffix_cap[i] = how many candidates at position >= i have any edge;
    # optimistic bound on matches still obtainable from position i onward.
    suffix_cap = [0] * (n_cand + 1)
    for i in range(n_cand - 1, -1, -1):
        suffix_cap[i] = suffix_cap[i + 1] + (1 if adj[i] else 0)

    best_chunks = target + 1
    used = [False] * n_ref
    nodes = 0
    exhausted = False

    def dfs(i: int, matched: int, chunks: int, prev_i: int, prev_j: int) -> None:
        nonlocal best_chunks, nodes, exhausted
        if exhausted or chunks >= best_chunks:
            return
        nodes += 1
        if nodes > _ALIGN_NODE_BUDGET:
            exhausted = True
            return
        if matched == target:
            best_chunks = chunks
            return
        if i == n_cand or matched + suffix_cap[i] < target:
            return
        # continuation first: keeping the current run open is the cheapest move
        ordered = adj[i]
        cont = prev_j + 1 if prev_i == i - 1 else -1
        if cont >= 0 and cont in ordered:
            ordered = [cont] + [j for j in ordered if j != cont]
        for j in ordered:
            if not used[j]:
                used[j] = True
                extra = 0 if (prev_i == i - 1 and prev_j == j - 1) else 1
                dfs(i + 1, matched + 1, chunks + extra, i, j)
                used[j] = False
        dfs(i + 1, matched, chunks, prev_i, prev_j)

    budget_ok = n_cand <= _ALIGN_MAX_LEN and n_ref <= _ALIGN_MAX_LEN
    if budget_ok:
        dfs(0, 0, 0, -2, -2)
    if not budget_ok or (exhausted and best_chunks > target):
        # fall back to the chunk count of the plain maximum matching
        pairs = sorted((i, j) for j, i in enumerate(match_of_ref) if i != -1)
        return target, _count_chunks(pairs), False
    return target, best_chunks, not exhausted


def meteor(
    reference: Sequence[Token],
    candidate: Sequence[Token],
    synonyms: SynonymLexicon | None = None,
) -> MetricScore:
    """METEOR with exact/stem/synonym matching stages.

    Alignment maximizes match count, then minimizes chunk count; the final
    score depends on the alignment only through (matches, chunks).
    """
    ref = [t.norm for t in reference]
    cand = [t.norm for t in candidate]
    if not ref or not cand:
        return MetricScore("meteor", 0.0, {"matches": 0.0, "chunks": 0.0})
    adj = _match_edges(cand, ref, synonyms)
    matches, chunks, exact = _min_chunk_alignment(adj, len(ref))
    if matches == 0:
        return MetricScore("meteor", 0.0, {"matches": 0.0, "chunks": 0.0})
    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = (precision * recall) / (
        METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall
    )
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    details = {
        "matches": float(matches),
        "chunks": float(chunks),
        "precision": precision,
        "recall": recall,
        "f_mean": f_mean,
        "penalty": penalty,
        "exact_alignment": 1.0 if exact else 0.0,
    }
    return MetricScore("meteor", f_mean * (1.0 - penalty), details)


def embedding_average(
    reference: Sequence[Token], candidate: Sequence[Token], table: EmbeddingTable
) -> MetricScore:
    """Cosine between the average embeddings of the two token sequences."""
    u = average_embedding(reference, table)
    v = average_embedding(candidate, table)
    value = cosine(u, v)
    return MetricScore(
        "ea",
        value,
        {"ref_support": float(u.support), "cand_support": float(v.support)},
    )


@dataclass(frozen=True)
class ExternalScoreFile:
    """Precomputed per-candidate scores keyed by (set id, slot)."""

    rows: Mapping[tuple[str, str], float]

    def pair(self, set_id: str) -> tuple[float, float]:
        """Scores for both slots of one set; raises KeyError naming the gap."""
        try:
            return self.rows[(set_id, "a")], self.rows[(set_id, "b")]
        except KeyError:
            missing = [s for s in ("a", "b") if (set_id, s) not in self.rows]
            raise KeyError(
                f"external scores missing slot(s) {','.join(missing)} for set {set_id!r}"
            ) from None


def load_external_scores(path: str | Path) -> ExternalScoreFile:
    """Parse a ``set_id,slot,score`` CSV; duplicates and bad slots are errors."""
    rows: dict[tuple[str, str], float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["set_id", "slot", "score"]:
            raise ValueError(f"{path}: expected header 'set_id,slot,score', got {header}")
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: row {rownum}: expected 3 fields, got {len(row)}")
            set_id, slot, raw = row
            if slot not in ("a", "b"):
                raise ValueError(f"{path}: row {rownum}: slot must be 'a' or 'b', got {slot!r}")
            try:
                score = float(raw)
            except ValueError:
                raise ValueError(f"{path}: row {rownum}: non-numeric score {raw!r}") from None
            if not math.isfinite(score):
                raise ValueError(f"{path}: row {rownum}: non-finite score {raw!r}")
            key = (set_id, slot)
            if key in rows:
                raise ValueError(f"{path}: row {rownum}: duplicate entry for {key}")
            rows[key] = score
    return ExternalScoreFile(rows=rows)
