"""Lexical resources backing the coordination features.

All three resources are plain UTF-8 text files supplied at runtime:

* sentiment: two word lists (one word per line, ``#`` comments allowed)
* lemmas: TSV of ``form<TAB>pos_class<TAB>lemma``
* embeddings: ``word v1 v2 ... vd`` lines, optional ``count dim`` header

Loaded resources are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np


class ResourceError(ValueError):
    pass


def _iter_resource_lines(path):
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield number, line


@dataclass(frozen=True)
class SentimentLexicon:
    positive: FrozenSet[str]
    negative: FrozenSet[str]

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            sample = ", ".join(sorted(overlap)[:5])
            raise ResourceError(
                f"{len(overlap)} words in both sentiment lists (e.g. {sample})"
            )

    @classmethod
    def empty(cls) -> "SentimentLexicon":
        return cls(frozenset(), frozenset())

    @classmethod
    def load(cls, positive_path, negative_path) -> "SentimentLexicon":
        positive = frozenset(
            line.lower() for _, line in _iter_resource_lines(positive_path)
        )
        negative = frozenset(
            line.lower() for _, line in _iter_resource_lines(negative_path)
        )
        return cls(positive, negative)


# Coarse word classes used to key the lemma lexicon, derived from the first
# character of the treebank POS tag (PTB-style J/R for adjectives/adverbs,
# UD-style A mapped to adjective).
_POS_CLASS = {"N": "noun", "V": "verb", "J": "adj", "A": "adj", "R": "adv"}


def pos_class(pos_tag: str) -> str:
    if not pos_tag:
        return "other"
    return _POS_CLASS.get(pos_tag[0].upper(), "other")


class LemmaLexicon:
    """(lowercased form, pos class) -> lemma, with identity fallback."""

    def __init__(self, entries: Optional[Dict[Tuple[str, str], str]] = None):
        self._entries = dict(entries or {})

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        """(form, pos class, lemma) triples in deterministic order."""
        return sorted(
            (form, cls_name, lemma)
            for (form, cls_name), lemma in self._entries.items()
        )

    def lemma_of(self, form: str, pos_tag: str) -> str:
        key = (form.lower(), pos_class(pos_tag))
        hit = self._entries.get(key)
        return hit if hit is not None else form.lower()

    @classmethod
    def empty(cls) -> "LemmaLexicon":
        return cls()

    @classmethod
    def load(cls, path) -> "LemmaLexicon":
        entries: Dict[Tuple[str, str], str] = {}
        for number, line in _iter_resource_lines(path):
            parts = line.split("\t")
            if len(parts) != 3:
                raise ResourceError(
                    f"{path}, line {number}: expected 3 tab-separated fields"
                )
            form, cls_name, lemma = parts
            key = (form.lower(), cls_name)
            entries.setdefault(key, lemma)  # first entry wins
        return cls(entries)


class EmbeddingTable:
    """Word -> dense vector lookup with optional lowercase fallback."""

    def __init__(self, vectors: Dict[str, np.ndarray], dim: int,
                 lowercase_fallback: bool = True):
        self.dim = dim
        self.lowercase_fallback = lowercase_fallback
        self._vectors = vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def words(self):
        return self._vectors.keys()

    def lookup(self, word: str) -> Optional[np.ndarray]:
        vec = self._vectors.get(word)
        if vec is None and self.lowercase_fallback:
            vec = self._vectors.get(word.lower())
        return vec

    @classmethod
    def load(cls, path, lowercase_fallback: bool = True) -> "EmbeddingTable":
        vectors: Dict[str, np.ndarray] = {}
        dim = None
        with open(path, "r", encoding="utf-8") as handle:
            for number, raw in enumerate(handle, start=1):
                line = raw.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                parts = line.split(" ")
                if number == 1 and len(parts) == 2:
                    try:
                        int(parts[0]), int(parts[1])
                        continue  # "count dim" header
                    except ValueError:
                        pass
                word, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                    if dim == 0:
                        raise ResourceError(f"{path}, line {number}: no vector values")
                elif len(values) != dim:
                    raise ResourceError(
                        f"{path}, line {number}: expected {dim} values, "
                        f"got {len(values)}"
                    )
                try:
                    vec = np.array([float(v) for v in values], dtype=np.float64)
                except ValueError:
                    raise ResourceError(
                        f"{path}, line {number}: non-numeric vector value"
                    ) from None
                vectors.setdefault(word, vec)  # first entry wins
        if dim is None:
            raise ResourceError(f"{path}: no vectors found")
        return cls(vectors, dim, lowercase_fallback)


@dataclass(frozen=True)
class FeatureResources:
    """Bundle of the resources consulted during feature extraction."""

    lemmas: LemmaLexicon = field(default_factory=LemmaLexicon.empty)
    sentiment: SentimentLexicon = field(default_factory=SentimentLexicon.empty)
    embeddings: Optional[EmbeddingTable] = None

    @classmethod
    def empty(cls) -> "FeatureResources":
        return cls()
