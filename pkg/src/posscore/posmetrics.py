"""POS-aware response metrics: PWE, PTLC, and POSSCORE.

All three start from the same partition of a tagged response into POS words
(tokens whose tag is in the chosen TagSet) and the remainder. PWE scores
the POS words with a base metric; PTLC additionally scores the POS tag
sequence; POSSCORE combines average-embedding cosines of both partitions
under an exponential length-ratio weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .basemetrics import MetricScore, SynonymLexicon, bleu_n, embedding_average, meteor
from .core import PosTag, TaggedSentence, TagSet, Token, partition
from .embed import EmbeddingTable, average_embedding, cosine

#: Base metrics usable inside PWE and PTLC.
BASE_METRIC_IDS = ("bleu1", "bleu2", "bleu3", "bleu4", "meteor", "ea")

_HARD_BASES = frozenset({"bleu1", "bleu2", "bleu3", "bleu4"})
_SOFT_BASES = frozenset({"meteor", "ea"})


@dataclass(frozen=True)
class PosSplit:
    """One response partitioned into POS words and the rest."""

    pos_words: tuple[Token, ...]
    pos_tags: tuple[PosTag, ...]
    non_pos_words: tuple[Token, ...]
    total_len: int
    pos_fraction: float


def pos_split(
    sentence: TaggedSentence, tags: TagSet, count_punct: bool = True
) -> PosSplit:
    """Partition a tagged response and compute its POS-word fraction.

    The fraction denominator is the full token count; with count_punct off,
    PUNCT-tagged tokens are excluded from it.
    """
    pos_words, pos_tags, non_pos_words = partition(sentence, tags)
    if count_punct:
        total = len(sentence)
    else:
        total = sum(1 for _, tag in sentence if tag is not PosTag.PUNCT)
    fraction = len(pos_words) / total if total > 0 else 0.0
    return PosSplit(
        pos_words=tuple(pos_words),
        pos_tags=tuple(pos_tags),
        non_pos_words=tuple(non_pos_words),
        total_len=total,
        pos_fraction=fraction,
    )


@dataclass(frozen=True)
class PosWeight:
    """The exponential POS-fraction weight w."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= math.e:
            raise ValueError(f"weight {self.value!r} outside [0, e]")


def pos_weight(n_ref: float, n_cand: float) -> PosWeight:
    """w = exp(1 - n_ref/n_cand), with continuous-limit conventions at zero.

    n_cand = 0 with n_ref > 0 gives 0; both zero gives the neutral 1;
    n_ref = 0 with n_cand > 0 gives e. The open range (0, e) holds whenever
    both fractions are strictly positive.
    """
    for name, value in (("n_ref", n_ref), ("n_cand", n_cand)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    if n_cand == 0.0:
        return PosWeight(0.0 if n_ref > 0.0 else 1.0)
    if n_ref == 0.0:
        return PosWeight(math.e)
    return PosWeight(math.exp(1.0 - n_ref / n_cand))


def _tag_tokens(tags: tuple[PosTag, ...]) -> list[Token]:
    return [Token(t.value) for t in tags]


def _base_score(
    base: str,
    reference: list[Token],
    candidate: list[Token],
    table: EmbeddingTable | None,
    synonyms: SynonymLexicon | None,
) -> MetricScore:
    if base in _HARD_BASES:
        return bleu_n(reference, candidate, int(base[-1]))
    if base == "meteor":
        return meteor(reference, candidate, synonyms)
    if base == "ea":
        if table is None:
            raise ValueError("base metric 'ea' requires an embedding table")
        return embedding_average(reference, candidate, table)
    raise ValueError(f"unknown base metric {base!r}; expected one of {BASE_METRIC_IDS}")


def pwe(
    reference: TaggedSentence,
    candidate: TaggedSentence,
    tags: TagSet,
    base: str,
    table: EmbeddingTable | None = None,
    synonyms: SynonymLexicon | None = None,
) -> MetricScore:
    """POS Word Extraction: run the base metric on the POS words alone."""
    ref_split = pos_split(reference, tags)
    cand_split = pos_split(candidate, tags)
    inner = _base_score(
        base, list(ref_split.pos_words), list(cand_split.pos_words), table, synonyms
    )
    return MetricScore(f"pwe:{base}:{tags.name}", inner.value, inner.details)


def ptlc(
    reference: TaggedSentence,
    candidate: TaggedSentence,
    tags: TagSet,
    base: str,
    table: EmbeddingTable | None = None,
    synonyms: SynonymLexicon | None = None,
) -> MetricScore:
    """POS Tag Linear Combination.

    With an n-gram base the POS words and the tag symbols are concatenated
    into one sequence per side and scored once (hard variant). With meteor
    or ea, the base score on the POS words and a BLEU-1 score on the tag
    sequences are added, unweighted (soft variant).
    """
    ref_split = pos_split(reference, tags)
    cand_split = pos_split(candidate, tags)
    metric_id = f"ptlc:{base}:{tags.name}"
    if base in _HARD_BASES:
        ref_seq = list(ref_split.pos_words) + _tag_tokens(ref_split.pos_tags)
        cand_seq = list(cand_split.pos_words) + _tag_tokens(cand_split.pos_tags)
        inner = bleu_n(ref_seq, cand_seq, int(base[-1]))
        return MetricScore(metric_id, inner.value, inner.details)
    if base in _SOFT_BASES:
        text = _base_score(
            base, list(ref_split.pos_words), list(cand_split.pos_words), table, synonyms
        )
        tag_score = bleu_n(
            _tag_tokens(ref_split.pos_tags), _tag_tokens(cand_split.pos_tags), 1
        )
        return MetricScore(
            metric_id,
            text.value + tag_score.value,
            {"text_score": text.value, "tag_score": tag_score.value},
        )
    raise ValueError(f"unknown base metric {base!r}; expected one of {BASE_METRIC_IDS}")


def posscore(
    reference: TaggedSentence,
    candidate: TaggedSentence,
    tags: TagSet,
    table: EmbeddingTable,
    count_punct: bool = True,
) -> MetricScore:
    """w * S(pos words) + S(non-POS words), with S the average-embedding cosine.

    w depends only on the two POS-word fractions; the degenerate zero-fraction
    conventions are flagged in the details map.
    """
    ref_split = pos_split(reference, tags, count_punct)
    cand_split = pos_split(candidate, tags, count_punct)
    weight = pos_weight(ref_split.pos_fraction, cand_split.pos_fraction)
    s_pos = cosine(
        average_embedding(ref_split.pos_words, table),
        average_embedding(cand_split.pos_words, table),
    )
    s_non_pos = cosine(
        average_embedding(ref_split.non_pos_words, table),
        average_embedding(cand_split.non_pos_words, table),
    )
    degenerate = ref_split.pos_fraction == 0.0 or cand_split.pos_fraction == 0.0
    value = weight.value * s_pos + s_non_pos
    return MetricScore(
        "posscore",
        value,
        {
            "w": weight.value,
            "s_pos": s_pos,
            "s_non_pos": s_non_pos,
            "n_ref": ref_split.pos_fraction,
            "n_cand": cand_split.pos_fraction,
            "degenerate_weight": 1.0 if degenerate else 0.0,
        },
    )
