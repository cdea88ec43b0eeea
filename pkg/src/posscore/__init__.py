"""POS-aware evaluation metrics for conversational search responses.

The library scores a candidate response against a reference using the POS
partition of each response (POSSCORE, PWE, PTLC), ships the classic
baselines (BLEU-1..4, METEOR, Embedding Average), and provides a
meta-evaluation harness that measures each metric's agreement with human
preferences.
"""

from .basemetrics import (
    ExternalScoreFile,
    MetricScore,
    SynonymLexicon,
    bleu_n,
    embedding_average,
    load_external_scores,
    meteor,
)
from .core import (
    ADOPTED_TAGS,
    CANONICAL_TAG_SETS,
    DEFAULT_TAG_SET,
    FULL_TAG_SET,
    EvaluationSet,
    PosTag,
    TaggedSentence,
    TagSet,
    Token,
    detokenize,
    partition,
    tokenize,
)
from .embed import EmbeddingTable, SentenceVector, average_embedding, cosine, load_vec
from .ingest import (
    AnnotatedResponse,
    ForumAnswer,
    build_forum_sets,
    build_usr_sets,
    load_forum_json,
    load_jsonl,
    load_usr_json,
    reservoir_sample,
    vote_gt_curve,
    write_jsonl,
)
from .metaeval import (
    AgreementVector,
    PowerResult,
    duplicate_bad,
    kendall_tau,
    paired_ttest,
    pos_distribution,
    predictive_power,
)
from .posmetrics import PosSplit, PosWeight, pos_split, pos_weight, posscore, ptlc, pwe
from .postag import (
    TaggerModel,
    load_model,
    load_tagged,
    remap_aux_to_verb,
    save_model,
    tag,
    train,
    write_tagged,
)

__version__ = "0.1.0"

__all__ = [
    "ADOPTED_TAGS",
    "AgreementVector",
    "AnnotatedResponse",
    "CANONICAL_TAG_SETS",
    "DEFAULT_TAG_SET",
    "EmbeddingTable",
    "EvaluationSet",
    "ExternalScoreFile",
    "FULL_TAG_SET",
    "ForumAnswer",
    "MetricScore",
    "PosSplit",
    "PosTag",
    "PosWeight",
    "PowerResult",
    "SentenceVector",
    "SynonymLexicon",
    "TaggedSentence",
    "TaggerModel",
    "TagSet",
    "Token",
    "average_embedding",
    "bleu_n",
    "build_forum_sets",
    "build_usr_sets",
    "cosine",
    "detokenize",
    "duplicate_bad",
    "embedding_average",
    "kendall_tau",
    "load_external_scores",
    "load_forum_json",
    "load_jsonl",
    "load_model",
    "load_tagged",
    "load_usr_json",
    "load_vec",
    "meteor",
    "paired_ttest",
    "partition",
    "pos_distribution",
    "pos_split",
    "pos_weight",
    "posscore",
    "predictive_power",
    "ptlc",
    "pwe",
    "remap_aux_to_verb",
    "reservoir_sample",
    "save_model",
    "tag",
    "tokenize",
    "train",
    "vote_gt_curve",
    "write_jsonl",
    "write_tagged",
]
