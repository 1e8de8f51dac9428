"""The trainable parser model.

Holds every parameter tensor in one flat name -> array dict: embedding
tables, the stacked BiLSTM, the transition-scoring MLP and the auxiliary
coordination MLP.  Token vectors are the concatenated forward/backward
LSTM states over [trainable word embedding ; pretrained embedding ;
POS embedding] inputs, with the artificial root encoded as an extra
leading position.

Models serialize to a small versioned binary container; loading restores
every parameter bit-exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels, network
from .resources import EmbeddingTable
from .transitions import ParseConfiguration, TransitionCodec
from .treebank import LabelInventory, Sentence

MODEL_MAGIC = b"CJPMODEL"
MODEL_VERSION = 1


class ModelIOError(ValueError):
    pass


@dataclass
class Hyperparams:
    word_dim: int = 100
    pos_dim: int = 25
    pretrained_dim: int = 0  # set when an embedding table is attached
    lstm_layers: int = 2
    lstm_dim: int = 125
    mlp_dim: int = 100
    conj_mlp_dim: int = 100
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    word_dropout_alpha: float = 0.25
    margin: float = 1.0
    batch_size: int = 1
    use_conj_features: bool = True
    single_root: bool = True
    tune_pretrained: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Hyperparams":
        return cls(**data)


class Vocabulary:
    """Form and POS inventories with reserved unknown/root entries."""

    UNK = 0
    ROOT = 1

    def __init__(self, forms: Sequence[str], pos_tags: Sequence[str],
                 counts: Dict[str, int]):
        self.forms = list(forms)
        self.pos_tags = list(pos_tags)
        self.counts = dict(counts)
        self._form_index = {f: i for i, f in enumerate(self.forms)}
        self._pos_index = {p: i for i, p in enumerate(self.pos_tags)}

    @classmethod
    def from_corpus(cls, sentences: Sequence[Sentence]) -> "Vocabulary":
        counts: Dict[str, int] = {}
        pos_seen = set()
        for sent in sentences:
            for tok in sent:
                counts[tok.form] = counts.get(tok.form, 0) + 1
                pos_seen.add(tok.pos)
        forms = ["<unk>", "<root>"] + sorted(counts)
        pos_tags = ["<unk>", "<root>"] + sorted(pos_seen)
        return cls(forms, pos_tags, counts)

    def word_id(self, form: str) -> int:
        return self._form_index.get(form, self.UNK)

    def pos_id(self, tag: str) -> int:
        return self._pos_index.get(tag, self.UNK)

    def count(self, form: str) -> int:
        return self.counts.get(form, 0)

    @property
    def n_forms(self) -> int:
        return len(self.forms)

    @property
    def n_pos(self) -> int:
        return len(self.pos_tags)


@dataclass
class EncodedSentence:
    """BiLSTM context vectors, one row per node (row 0 = root)."""

    vectors: np.ndarray
    word_ids: np.ndarray
    pos_ids: np.ndarray
    pre_ids: Optional[np.ndarray]
    inputs: np.ndarray
    lstm_caches: list

    def vector_of(self, node_id: int) -> np.ndarray:
        return self.vectors[node_id]


class Model:
    """All trainable state plus the label inventory and vocabulary."""

    def __init__(self, hp: Hyperparams, vocab: Vocabulary, labels: LabelInventory,
                 params: Dict[str, np.ndarray], trainable: List[str],
                 pretrained_words: Optional[List[str]] = None):
        self.hp = hp
        self.vocab = vocab
        self.labels = labels
        self.codec = TransitionCodec(labels.labels)
        self.params = params
        self.trainable = trainable
        self.pretrained_words = pretrained_words
        self._pre_index = (
            {w: i + 2 for i, w in enumerate(pretrained_words)}
            if pretrained_words is not None
            else None
        )
        self.kernel = kernels

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def build(cls, hp: Hyperparams, vocab: Vocabulary, labels: LabelInventory,
              pretrained: Optional[EmbeddingTable] = None,
              seed: int = 0) -> "Model":
        rng = np.random.default_rng(seed)
        params: Dict[str, np.ndarray] = {}
        trainable: List[str] = []

        def add(name, array, train=True):
            params[name] = np.ascontiguousarray(array, dtype=np.float64)
            if train:
                trainable.append(name)

        add("word_emb", rng.uniform(-0.1, 0.1, size=(vocab.n_forms, hp.word_dim)))
        add("pos_emb", rng.uniform(-0.1, 0.1, size=(vocab.n_pos, hp.pos_dim)))

        pretrained_words = None
        if pretrained is not None:
            pretrained_words = sorted(pretrained.words())
            hp.pretrained_dim = pretrained.dim
            matrix = np.zeros((len(pretrained_words) + 2, pretrained.dim))
            for row, word in enumerate(pretrained_words, start=2):
                matrix[row] = pretrained.lookup(word)
            add("pre_emb", matrix, train=hp.tune_pretrained)
        else:
            hp.pretrained_dim = 0

        input_dim = hp.word_dim + hp.pretrained_dim + hp.pos_dim
        for layer in range(hp.lstm_layers):
            d_in = input_dim if layer == 0 else 2 * hp.lstm_dim
            for direction in ("fwd", "bwd"):
                prefix = f"lstm.{layer}.{direction}"
                add(f"{prefix}.w_x", network.glorot(rng, 4 * hp.lstm_dim, d_in))
                add(f"{prefix}.w_h", network.glorot(rng, 4 * hp.lstm_dim, hp.lstm_dim))
                add(f"{prefix}.b", np.zeros(4 * hp.lstm_dim))

        add("pad_vec", np.zeros(2 * hp.lstm_dim))

        feature_dim = cls.feature_dim(hp)
        n_transitions = 2 * len(labels) + 1
        add("mlp.w1", network.glorot(rng, hp.mlp_dim, feature_dim))
        add("mlp.b1", np.zeros(hp.mlp_dim))
        add("mlp.w2", network.glorot(rng, n_transitions, hp.mlp_dim))
        add("mlp.b2", np.zeros(n_transitions))

        from .conj_features import FEATURE_SIZE

        add("conj.w1", network.glorot(rng, hp.conj_mlp_dim, feature_dim + FEATURE_SIZE))
        add("conj.b1", np.zeros(hp.conj_mlp_dim))
        add("conj.w2", network.glorot(rng, 1, hp.conj_mlp_dim)[0])
        add("conj.b2", np.zeros(1))

        return cls(hp, vocab, labels, params, trainable, pretrained_words)

    @staticmethod
    def feature_dim(hp: Hyperparams) -> int:
        # Context vectors of the top three stack items and the buffer front.
        return 4 * 2 * hp.lstm_dim

    @property
    def n_transitions(self) -> int:
        return self.codec.size

    # ------------------------------------------------------------------
    # lookups and encoding

    def word_ids_of(self, sentence: Sentence) -> np.ndarray:
        ids = [Vocabulary.ROOT] + [self.vocab.word_id(t.form) for t in sentence]
        return np.array(ids, dtype=np.int64)

    def pos_ids_of(self, sentence: Sentence) -> np.ndarray:
        ids = [Vocabulary.ROOT] + [self.vocab.pos_id(t.pos) for t in sentence]
        return np.array(ids, dtype=np.int64)

    def pretrained_ids_of(self, sentence: Sentence) -> Optional[np.ndarray]:
        if self._pre_index is None:
            return None
        ids = [1]  # root row
        for tok in sentence:
            row = self._pre_index.get(tok.form)
            if row is None:
                row = self._pre_index.get(tok.form.lower(), 0)
            ids.append(row)
        return np.array(ids, dtype=np.int64)

    def encode(self, sentence: Sentence,
               word_ids: Optional[np.ndarray] = None) -> EncodedSentence:
        """Context vectors for root + every token; deterministic.

        ``word_ids`` overrides the plain vocabulary lookup so training can
        apply word dropout without touching the sentence itself.
        """
        if word_ids is None:
            word_ids = self.word_ids_of(sentence)
        pos_ids = self.pos_ids_of(sentence)
        pre_ids = self.pretrained_ids_of(sentence)
        parts = [self.params["word_emb"][word_ids]]
        if pre_ids is not None:
            parts.append(self.params["pre_emb"][pre_ids])
        parts.append(self.params["pos_emb"][pos_ids])
        inputs = np.ascontiguousarray(np.concatenate(parts, axis=1))
        vectors, caches = network.bilstm_forward(
            inputs, self.params, self.hp.lstm_layers, kernel=self.kernel
        )
        return EncodedSentence(vectors, word_ids, pos_ids, pre_ids, inputs, caches)

    # ------------------------------------------------------------------
    # configuration features and scoring

    def feature_slots(self, config: ParseConfiguration) -> List[int]:
        """Node ids feeding the feature vector; -1 marks the padding slot."""
        stack, buffer = config.stack, config.buffer
        return [
            stack[-1] if len(stack) >= 1 else -1,
            stack[-2] if len(stack) >= 2 else -1,
            stack[-3] if len(stack) >= 3 else -1,
            buffer[0] if buffer else -1,
        ]

    def config_feature_vector(self, config: ParseConfiguration,
                              encoded: EncodedSentence
                              ) -> Tuple[np.ndarray, List[int]]:
        slots = self.feature_slots(config)
        pad = self.params["pad_vec"]
        pieces = [
            encoded.vectors[slot] if slot >= 0 else pad
            for slot in slots
        ]
        return np.concatenate(pieces), slots

    def transition_scores(self, features: np.ndarray
                          ) -> Tuple[np.ndarray, np.ndarray]:
        """Base scores for every transition; also returns the MLP hidden."""
        expected = self.feature_dim(self.hp)
        if features.shape[0] != expected:
            raise ValueError(
                f"feature vector has length {features.shape[0]}, expected {expected}"
            )
        return network.mlp_forward(
            features, self.params["mlp.w1"], self.params["mlp.b1"],
            self.params["mlp.w2"], self.params["mlp.b2"],
        )

    def conj_score(self, features: np.ndarray, conj_inputs: np.ndarray
                   ) -> Tuple[float, np.ndarray, np.ndarray]:
        """Auxiliary coordination score; returns (score, hidden, joint input)."""
        joint = np.concatenate([features, conj_inputs])
        hidden = np.tanh(self.params["conj.w1"] @ joint + self.params["conj.b1"])
        score = float(self.params["conj.w2"] @ hidden + self.params["conj.b2"][0])
        return score, hidden, joint

    # ------------------------------------------------------------------
    # persistence

    def save(self, sink) -> None:
        """Write the model to a path or binary file object."""
        if hasattr(sink, "write"):
            self._write(sink)
        else:
            with open(sink, "wb") as handle:
                self._write(handle)

    def _write(self, handle) -> None:
        order = sorted(self.params)
        meta = {
            "hyperparams": self.hp.to_dict(),
            "labels": list(self.labels.labels),
            "vocab": {
                "forms": self.vocab.forms,
                "pos_tags": self.vocab.pos_tags,
                "counts": self.vocab.counts,
            },
            "pretrained_words": self.pretrained_words,
            "trainable": self.trainable,
            "arrays": [
                {
                    "name": name,
                    "dtype": str(self.params[name].dtype),
                    "shape": list(self.params[name].shape),
                }
                for name in order
            ],
        }
        meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
        handle.write(MODEL_MAGIC)
        handle.write(struct.pack("<I", MODEL_VERSION))
        handle.write(struct.pack("<Q", len(meta_bytes)))
        handle.write(meta_bytes)
        for name in order:
            handle.write(np.ascontiguousarray(self.params[name]).tobytes())

    @classmethod
    def load(cls, source) -> "Model":
        """Read a model from a path or binary file object."""
        if hasattr(source, "read"):
            data = source.read()
        else:
            with open(source, "rb") as handle:
                data = handle.read()
        if len(data) < len(MODEL_MAGIC) + 12 or not data.startswith(MODEL_MAGIC):
            raise ModelIOError("not a parser model file (bad magic bytes)")
        offset = len(MODEL_MAGIC)
        (version,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if version != MODEL_VERSION:
            raise ModelIOError(f"unsupported model version {version}")
        (meta_len,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        if offset + meta_len > len(data):
            raise ModelIOError("truncated model file (metadata)")
        try:
            meta = json.loads(data[offset:offset + meta_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelIOError(f"corrupt model metadata: {exc}") from None
        offset += meta_len
        params: Dict[str, np.ndarray] = {}
        for spec in meta["arrays"]:
            dtype = np.dtype(spec["dtype"])
            shape = tuple(spec["shape"])
            n_bytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64))
            if offset + n_bytes > len(data):
                raise ModelIOError(f"truncated model file (array {spec['name']})")
            flat = np.frombuffer(data, dtype=dtype, count=n_bytes // dtype.itemsize,
                                 offset=offset)
            params[spec["name"]] = flat.reshape(shape).copy()
            offset += n_bytes
        if offset != len(data):
            raise ModelIOError("trailing bytes after model payload")
        for name, array in params.items():
            if not np.all(np.isfinite(array)):
                raise ModelIOError(f"non-finite values in parameter {name}")
        hp = Hyperparams.from_dict(meta["hyperparams"])
        vocab = Vocabulary(
            meta["vocab"]["forms"], meta["vocab"]["pos_tags"], meta["vocab"]["counts"]
        )
        labels = LabelInventory(tuple(meta["labels"]))
        return cls(hp, vocab, labels, params, list(meta["trainable"]),
                   meta["pretrained_words"])

    # ------------------------------------------------------------------

    def zero_grads(self) -> Dict[str, np.ndarray]:
        return {k: np.zeros_like(self.params[k]) for k in self.trainable}

    def copy_params(self) -> Dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def set_params(self, params: Dict[str, np.ndarray]) -> None:
        for k, v in params.items():
            self.params[k] = v.copy()
