"""CoNLL treebank reading, writing and tree validation.

Supports the tabular CoNLL-X and CoNLL-U formats.  Sentences are validated
on read: gold heads must form a single tree hanging off the artificial
root node 0, with exactly one token attached to the root.  Non-tree input
is rejected rather than repaired, because silently repaired trees corrupt
any evaluation run on them.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

ROOT_ID = 0
ROOT_FORM = "*root*"
ROOT_POS = "*root*"

MISSING = "_"


class ConllError(ValueError):
    """Base class for treebank input problems."""


class ConllParseError(ConllError):
    """A line could not be parsed (wrong column count, bad integer, ...)."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class TreeStructureError(ConllError):
    """Heads of a sentence do not form a single tree rooted at node 0."""

    def __init__(self, message: str, sentence_index: int):
        super().__init__(f"sentence {sentence_index}: {message}")
        self.sentence_index = sentence_index


@dataclass(frozen=True)
class Token:
    """One word of a sentence with gold and (optional) predicted annotation.

    ``id`` is the 1-based position, ``gold_head`` the 0-based head id where
    0 denotes the artificial root.
    """

    id: int
    form: str
    pos: str
    gold_head: int
    gold_label: str
    lemma: Optional[str] = None
    pred_head: Optional[int] = None
    pred_label: Optional[str] = None

    def with_prediction(self, head: int, label: str) -> "Token":
        return replace(self, pred_head=head, pred_label=label)


@dataclass(frozen=True)
class Sentence:
    """An ordered token sequence; the root node 0 is implicit."""

    tokens: Tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def token(self, token_id: int) -> Token:
        """Return the token with the given 1-based id."""
        return self.tokens[token_id - 1]

    def form_of(self, node_id: int) -> str:
        return ROOT_FORM if node_id == ROOT_ID else self.token(node_id).form

    def pos_of(self, node_id: int) -> str:
        return ROOT_POS if node_id == ROOT_ID else self.token(node_id).pos

    def gold_children(self) -> dict:
        """Map each node id (including 0) to the ids of its gold dependents."""
        children: dict = {ROOT_ID: []}
        for tok in self.tokens:
            children.setdefault(tok.id, [])
            children.setdefault(tok.gold_head, []).append(tok.id)
        return children

    def with_predictions(self, heads: Sequence[int], labels: Sequence[str]) -> "Sentence":
        if len(heads) != len(self.tokens) or len(labels) != len(self.tokens):
            raise ValueError("prediction length does not match sentence length")
        return Sentence(
            tuple(
                tok.with_prediction(h, l)
                for tok, h, l in zip(self.tokens, heads, labels)
            )
        )


@dataclass(frozen=True)
class LabelInventory:
    """The ordered set of relation labels a parser can produce."""

    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels in inventory")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def conj_index(self) -> Optional[int]:
        try:
            return self.labels.index("conj")
        except ValueError:
            return None

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sentence]) -> "LabelInventory":
        seen = {tok.gold_label for sent in sentences for tok in sent}
        return cls(tuple(sorted(seen)))


def validate_tree(sentence: Sentence, sentence_index: int = 0) -> None:
    """Raise TreeStructureError unless gold heads form a single rooted tree."""
    n = len(sentence)
    root_children = 0
    for tok in sentence.tokens:
        if tok.gold_head == tok.id:
            raise TreeStructureError(f"token {tok.id} is its own head", sentence_index)
        if not 0 <= tok.gold_head <= n:
            raise TreeStructureError(
                f"token {tok.id} has head {tok.gold_head} outside 0..{n}",
                sentence_index,
            )
        if tok.gold_head == ROOT_ID:
            root_children += 1
    if n and root_children == 0:
        raise TreeStructureError("no token attached to the root", sentence_index)
    if root_children > 1:
        raise TreeStructureError(
            f"{root_children} tokens attached to the root", sentence_index
        )
    # Cycle check: every node must reach the root.
    heads = {tok.id: tok.gold_head for tok in sentence.tokens}
    for tok in sentence.tokens:
        seen = set()
        node = tok.id
        while node != ROOT_ID:
            if node in seen:
                raise TreeStructureError(
                    f"cycle through token {node}", sentence_index
                )
            seen.add(node)
            node = heads[node]


def is_projective(sentence: Sentence) -> bool:
    """True iff no token between a head and its dependent escapes their span."""
    heads = {tok.id: tok.gold_head for tok in sentence.tokens}
    for tok in sentence.tokens:
        lo, hi = sorted((tok.gold_head, tok.id))
        for inner in range(lo + 1, hi):
            if not lo <= heads[inner] <= hi:
                return False
    return True


_CONLLX_MIN_COLUMNS = 8
_CONLLU_COLUMNS = 10


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, os.PathLike):
        with open(source, "rb") as handle:
            data = handle.read()
    elif isinstance(source, (str, bytes)) and not any(
        mark in (source.encode() if isinstance(source, str) else source)
        for mark in (b"\n", b"\t")
    ):
        # no newline or tab: this is a filename, not CoNLL data
        with open(source, "rb") as handle:
            data = handle.read()
    elif isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        data = source.encode("utf-8")
    elif hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    else:
        raise TypeError(f"cannot read CoNLL data from {type(source)!r}")
    text = data.decode("utf-8")
    return iter(text.split("\n"))


def _parse_token_line(parts: List[str], fmt: str, line_number: int) -> Optional[Token]:
    if fmt == "conllu":
        if len(parts) != _CONLLU_COLUMNS:
            raise ConllParseError(
                f"expected {_CONLLU_COLUMNS} columns, got {len(parts)}", line_number
            )
        if "-" in parts[0] or "." in parts[0]:
            return None  # multiword ranges and empty nodes carry no tree arcs
    else:
        if not _CONLLX_MIN_COLUMNS <= len(parts) <= 10:
            raise ConllParseError(
                f"expected {_CONLLX_MIN_COLUMNS}-10 columns, got {len(parts)}",
                line_number,
            )
    try:
        token_id = int(parts[0])
    except ValueError:
        raise ConllParseError(f"bad token id {parts[0]!r}", line_number) from None
    form = parts[1]
    if not form:
        raise ConllParseError("empty FORM column", line_number)
    lemma = None if parts[2] == MISSING else parts[2]
    coarse, fine = parts[3], parts[4]
    pos = fine if fine != MISSING else coarse
    try:
        head = int(parts[6])
    except ValueError:
        raise ConllParseError(f"bad head {parts[6]!r}", line_number) from None
    label = parts[7]
    return Token(id=token_id, form=form, pos=pos, gold_head=head,
                 gold_label=label, lemma=lemma)


def read_conll(source, fmt: str = "conllx", require_tree: bool = True) -> List[Sentence]:
    """Parse CoNLL-X or CoNLL-U data from a path, bytes, string or stream.

    Comment lines and, in conllu mode, multiword-range / empty-node lines
    are skipped.  With ``require_tree`` every sentence is validated as a
    single rooted tree (predicted parses being evaluated may disable it).
    """
    if fmt not in ("conllx", "conllu"):
        raise ValueError(f"unknown format {fmt!r}")
    sentences: List[Sentence] = []
    tokens: List[Token] = []

    def finish():
        if not tokens:
            return
        index = len(sentences)
        for position, tok in enumerate(tokens, start=1):
            if tok.id != position:
                raise TreeStructureError(
                    f"token ids not consecutive at {tok.id}", index
                )
        sent = Sentence(tuple(tokens))
        for tok in tokens:
            if tok.gold_head > len(sent):
                raise TreeStructureError(
                    f"token {tok.id} has head {tok.gold_head} beyond sentence "
                    f"length {len(sent)}",
                    index,
                )
        if require_tree:
            validate_tree(sent, index)
        sentences.append(sent)
        tokens.clear()

    for line_number, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            finish()
            continue
        if line.startswith("#"):
            continue
        tok = _parse_token_line(line.split("\t"), fmt, line_number)
        if tok is not None:
            tokens.append(tok)
    finish()
    return sentences


def write_conll(sentences: Sequence[Sentence], fmt: str = "conllx",
                use_predicted: bool = False) -> bytes:
    """Serialize sentences back to tabular CoNLL, LF line endings, UTF-8.

    With ``use_predicted`` the predicted head/label pair is written to the
    HEAD/DEPREL columns; every token must then carry a prediction.
    """
    if fmt not in ("conllx", "conllu"):
        raise ValueError(f"unknown format {fmt!r}")
    out = io.StringIO()
    for index, sent in enumerate(sentences):
        for tok in sent:
            if use_predicted:
                if tok.pred_head is None or tok.pred_label is None:
                    raise ValueError(
                        f"sentence {index}, token {tok.id} ({tok.form!r}) "
                        "has no prediction"
                    )
                head, label = tok.pred_head, tok.pred_label
            else:
                head, label = tok.gold_head, tok.gold_label
            lemma = tok.lemma if tok.lemma is not None else MISSING
            # The POS tag goes to both the coarse and fine columns, so a
            # round-trip through either format reads back the same tag.
            cols = [str(tok.id), tok.form, lemma, tok.pos, tok.pos,
                    MISSING, str(head), label, MISSING, MISSING]
            out.write("\t".join(cols))
            out.write("\n")
        out.write("\n")
    return out.getvalue().encode("utf-8")


def write_conll_file(path, sentences: Sequence[Sentence], fmt: str = "conllx",
                     use_predicted: bool = False) -> None:
    with open(path, "wb") as handle:
        handle.write(write_conll(sentences, fmt=fmt, use_predicted=use_predicted))
