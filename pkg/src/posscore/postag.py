"""POS tag sources: pre-tagged file ingestion and a small trainable
averaged-perceptron tagger.

Pre-tagged data is the reference path; the perceptron exists so the toolkit
works without external NLP dependencies. Training is greedy left-to-right
with averaged weights and is deterministic under a fixed shuffle seed.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import PosTag, TaggedSentence, Token

_TAG_ORDER = {tag: i for i, tag in enumerate(PosTag)}

_PRIOR_MIN_COUNT = 5

_BOS = "<s>"
_EOS = "</s>"

MODEL_MAGIC = "posscore-tagger-v1"


def _features(
    norms: Sequence[str], surfaces: Sequence[str], i: int, prev_tag: str
) -> list[str]:
    norm = norms[i]
    prev_norm = norms[i - 1] if i > 0 else _BOS
    next_norm = norms[i + 1] if i + 1 < len(norms) else _EOS
    feats = [
        f"w={norm}",
        f"p3={norm[:3]}",
        f"s3={norm[-3:]}",
        f"t-1={prev_tag}",
        f"w-1={prev_norm}",
        f"w+1={next_norm}",
    ]
    if norm.isdigit():
        feats.append("digit")
    if surfaces[i].istitle():
        feats.append("title")
    return feats


@dataclass(frozen=True)
class TaggerModel:
    """Averaged-perceptron weights plus a prior for unambiguous vocabulary."""

    feature_weights: Mapping[str, Mapping[PosTag, float]]
    tag_prior: Mapping[str, PosTag]
    iterations_trained: int

    def predict(self, feats: Sequence[str]) -> PosTag:
        scores: defaultdict[PosTag, float] = defaultdict(float)
        for f in feats:
            for t, w in self.feature_weights.get(f, {}).items():
                scores[t] += w
        # ties broken by the fixed tag-alphabet order
        return max(PosTag, key=lambda t: (scores.get(t, 0.0), -_TAG_ORDER[t]))


def tag(model: TaggerModel, tokens: Sequence[Token]) -> TaggedSentence:
    """Tag a token sequence; prior-listed tokens bypass the perceptron."""
    norms = [t.norm for t in tokens]
    surfaces = [t.surface for t in tokens]
    prev_tag = _BOS
    out = []
    for i, token in enumerate(tokens):
        prior = model.tag_prior.get(norms[i])
        if prior is not None:
            chosen = prior
        else:
            chosen = model.predict(_features(norms, surfaces, i, prev_tag))
        out.append((token, chosen))
        prev_tag = chosen.value
    return TaggedSentence(tuple(out))


class _AveragedWeights:
    """Perceptron weights with the lazy-averaging bookkeeping."""

    def __init__(self) -> None:
        self.weights: defaultdict[str, dict[PosTag, float]] = defaultdict(dict)
        self._totals: defaultdict[tuple[str, PosTag], float] = defaultdict(float)
        self._stamps: defaultdict[tuple[str, PosTag], int] = defaultdict(int)
        self.instances = 0

    def score(self, feats: Sequence[str]) -> PosTag:
        scores: defaultdict[PosTag, float] = defaultdict(float)
        for f in feats:
            for t, w in self.weights[f].items():
                scores[t] += w
        return max(PosTag, key=lambda t: (scores.get(t, 0.0), -_TAG_ORDER[t]))

    def update(self, truth: PosTag, guess: PosTag, feats: Sequence[str]) -> None:
        self.instances += 1
        if truth == guess:
            return
        for f in feats:
            self._bump(f, truth, +1.0)
            self._bump(f, guess, -1.0)

    def _bump(self, f: str, t: PosTag, delta: float) -> None:
        key = (f, t)
        w = self.weights[f].get(t, 0.0)
        self._totals[key] += (self.instances - self._stamps[key]) * w
        self._stamps[key] = self.instances
        self.weights[f][t] = w + delta

    def averaged(self) -> dict[str, dict[PosTag, float]]:
        out: dict[str, dict[PosTag, float]] = {}
        for f, tags in self.weights.items():
            row = {}
            for t, w in tags.items():
                key = (f, t)
                total = self._totals[key] + (self.instances - self._stamps[key]) * w
                avg = total / self.instances if self.instances else 0.0
                if avg != 0.0:
                    row[t] = avg
            if row:
                out[f] = row
        return out


def _build_prior(corpus: Sequence[TaggedSentence]) -> dict[str, PosTag]:
    counts: defaultdict[str, Counter] = defaultdict(Counter)
    for sent in corpus:
        for token, t in sent:
            counts[token.norm][t] += 1
    prior = {}
    for norm, tags in counts.items():
        if len(tags) == 1:
            only_tag, n = next(iter(tags.items()))
            if n >= _PRIOR_MIN_COUNT:
                prior[norm] = only_tag
    return prior


def train(
    corpus: Sequence[TaggedSentence], epochs: int, seed: int = 1
) -> TaggerModel:
    """Train the averaged perceptron; deterministic for a fixed seed."""
    if not corpus:
        raise ValueError("empty training corpus")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    prior = _build_prior(corpus)
    weights = _AveragedWeights()
    rng = random.Random(seed)
    order = list(range(len(corpus)))
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            sent = corpus[idx]
            norms = [tok.norm for tok, _ in sent]
            surfaces = [tok.surface for tok, _ in sent]
            prev_tag = _BOS
            for i, (token, truth) in enumerate(sent):
                fixed = prior.get(token.norm)
                if fixed is not None:
                    prev_tag = fixed.value
                    continue
                feats = _features(norms, surfaces, i, prev_tag)
                guess = weights.score(feats)
                weights.update(truth, guess, feats)
                prev_tag = guess.value
    return TaggerModel(
        feature_weights=weights.averaged(),
        tag_prior=prior,
        iterations_trained=epochs,
    )


def save_model(model: TaggerModel, path: str | Path) -> None:
    """Serialize a model as a versioned flat text file (canonically sorted)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{MODEL_MAGIC}\t{model.iterations_trained}\n")
        for norm in sorted(model.tag_prior):
            fh.write(f"P\t{norm}\t{model.tag_prior[norm].value}\n")
        for feature in sorted(model.feature_weights):
            row = model.feature_weights[feature]
            for t in sorted(row, key=lambda t: t.value):
                fh.write(f"W\t{feature}\t{t.value}\t{row[t]!r}\n")


def load_model(path: str | Path) -> TaggerModel:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) != 2 or header[0] != MODEL_MAGIC:
            raise ValueError(f"{path}: not a {MODEL_MAGIC} model file")
        try:
            iterations = int(header[1])
        except ValueError:
            raise ValueError(f"{path}: bad iteration count {header[1]!r}") from None
        prior: dict[str, PosTag] = {}
        weights: dict[str, dict[PosTag, float]] = {}
        for lineno, line in enumerate(fh, start=2):
            fields = line.rstrip("\n").split("\t")
            kind = fields[0] if fields else ""
            if kind == "P" and len(fields) == 3:
                prior[fields[1]] = PosTag.parse(fields[2])
            elif kind == "W" and len(fields) == 4:
                weights.setdefault(fields[1], {})[PosTag.parse(fields[2])] = float(
                    fields[3]
                )
            else:
                raise ValueError(f"{path}: line {lineno}: malformed model row")
    return TaggerModel(
        feature_weights=weights, tag_prior=prior, iterations_trained=iterations
    )


def load_tagged(path: str | Path) -> list[TaggedSentence]:
    """Parse tab-separated (index, surface, tag) rows; blank lines split
    sentences; unknown tag strings fall back to X.
    """
    path = Path(path)
    sentences: list[TaggedSentence] = []
    current: list[tuple[Token, PosTag]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(TaggedSentence(tuple(current)))
                    current = []
                continue
            fields = line.split("\t")
            if len(fields) != 3 or not fields[1]:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'index<TAB>surface<TAB>tag'"
                )
            try:
                int(fields[0])
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-integer token index {fields[0]!r}"
                ) from None
            try:
                tag_value = PosTag.parse(fields[2])
            except ValueError:
                tag_value = PosTag.X
            current.append((Token(fields[1]), tag_value))
    if current:
        sentences.append(TaggedSentence(tuple(current)))
    return sentences


def write_tagged(sentences: Iterable[TaggedSentence], path: str | Path) -> None:
    """Inverse of load_tagged: 1-based index, surface, tag; blank-line breaks."""
    with open(path, "w", encoding="utf-8") as fh:
        first = True
        for sent in sentences:
            if not first:
                fh.write("\n")
            first = False
            for i, (token, t) in enumerate(sent, start=1):
                fh.write(f"{i}\t{token.surface}\t{t.value}\n")


def remap_aux_to_verb(sentence: TaggedSentence) -> TaggedSentence:
    """Collapse AUX into VERB; some tagging conventions label auxiliaries
    as plain verbs and the metrics follow that usage by default.
    """
    return TaggedSentence(
        tuple(
            (tok, PosTag.VERB if t is PosTag.AUX else t) for tok, t in sentence
        )
    )
