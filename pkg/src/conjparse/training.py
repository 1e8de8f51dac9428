"""Joint margin training of the parser and the coordination scorer.

Training follows the static-oracle transition sequence of each projective
sentence.  At every configuration the hinge loss
``max(0, margin - score(gold) + max over legal non-gold scores)`` is
applied to the augmented scores, so gradients reach the coordination MLP
whenever the "conj" right transition is the gold or the violating one.
All gradients are analytic; ``gradient_check`` compares them against
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import network
from .model import Model, Vocabulary
from .parser import greedy_parse, score_config
from .resources import FeatureResources
from .transitions import apply, initial_config, is_terminal, legal_mask, static_oracle
from .treebank import Sentence, is_projective


class NonProjectiveError(ValueError):
    pass


OraclePath = List[Tuple]


def oracle_path(sentence: Sentence, model: Model) -> OraclePath:
    """(configuration, gold transition index) pairs along the gold derivation."""
    if not is_projective(sentence):
        raise NonProjectiveError("cannot derive an oracle path for a "
                                 "non-projective sentence")
    path = []
    config = initial_config(sentence)
    while not is_terminal(config):
        transition = static_oracle(config, sentence)
        path.append((config, model.codec.encode(transition)))
        config = apply(config, transition)
    return path


def dropped_word_ids(sentence: Sentence, model: Model,
                     rng: np.random.Generator) -> np.ndarray:
    """Word ids with infrequent words stochastically replaced by the unknown id."""
    ids = model.word_ids_of(sentence).copy()
    alpha = model.hp.word_dropout_alpha
    if alpha <= 0.0:
        return ids
    for position, tok in enumerate(sentence, start=1):
        count = model.vocab.count(tok.form)
        if rng.random() < alpha / (alpha + count):
            ids[position] = Vocabulary.UNK
    return ids


def sentence_loss(model: Model, sentence: Sentence, resources: FeatureResources,
                  grads: Optional[Dict[str, np.ndarray]] = None,
                  word_ids: Optional[np.ndarray] = None,
                  path: Optional[OraclePath] = None) -> float:
    """Total hinge loss along the oracle path; accumulates into ``grads``."""
    if path is None:
        path = oracle_path(sentence, model)
    encoded = model.encode(sentence, word_ids=word_ids)
    want_grads = grads is not None
    d_vectors = np.zeros_like(encoded.vectors) if want_grads else None
    loss = 0.0
    for config, gold_index in path:
        scores, cache = score_config(
            model, config, encoded, sentence, resources, want_cache=want_grads
        )
        mask = legal_mask(config, model.codec)
        mask[gold_index] = False
        if not mask.any():
            continue  # gold is the only legal transition
        competitors = np.where(mask, scores, -np.inf)
        violator = int(np.argmax(competitors))
        step_loss = model.hp.margin - scores[gold_index] + scores[violator]
        if step_loss <= 0.0:
            continue
        loss += step_loss
        if not want_grads:
            continue
        d_scores = np.zeros(model.n_transitions)
        d_scores[gold_index] -= 1.0
        d_scores[violator] += 1.0
        d_features, d_w1, d_b1, d_w2, d_b2 = network.mlp_backward(
            d_scores, cache.features, cache.mlp_hidden,
            model.params["mlp.w1"], model.params["mlp.w2"],
        )
        grads["mlp.w1"] += d_w1
        grads["mlp.b1"] += d_b1
        grads["mlp.w2"] += d_w2
        grads["mlp.b2"] += d_b2
        if cache.conj_index is not None:
            conj_coeff = d_scores[cache.conj_index]
            if conj_coeff != 0.0:
                d_hidden = conj_coeff * model.params["conj.w2"]
                d_pre = d_hidden * (1.0 - cache.conj_hidden * cache.conj_hidden)
                grads["conj.w2"] += conj_coeff * cache.conj_hidden
                grads["conj.b2"][0] += conj_coeff
                grads["conj.w1"] += np.outer(d_pre, cache.conj_joint)
                grads["conj.b1"] += d_pre
                d_joint = model.params["conj.w1"].T @ d_pre
                d_features += d_joint[: d_features.shape[0]]
        width = encoded.vectors.shape[1]
        for slot_number, node in enumerate(cache.slots):
            segment = d_features[slot_number * width:(slot_number + 1) * width]
            if node >= 0:
                d_vectors[node] += segment
            else:
                grads["pad_vec"] += segment
    if want_grads and loss > 0.0:
        d_inputs = network.bilstm_backward(
            d_vectors, encoded.lstm_caches, model.params, grads,
            model.hp.lstm_layers, kernel=model.kernel,
        )
        word_dim = model.hp.word_dim
        pre_dim = model.hp.pretrained_dim
        np.add.at(grads["word_emb"], encoded.word_ids, d_inputs[:, :word_dim])
        if pre_dim and "pre_emb" in grads:
            np.add.at(grads["pre_emb"], encoded.pre_ids,
                      d_inputs[:, word_dim:word_dim + pre_dim])
        np.add.at(grads["pos_emb"], encoded.pos_ids,
                  d_inputs[:, word_dim + pre_dim:])
    return loss


def batch_loss(model: Model, batch: Sequence[Sentence],
               resources: FeatureResources,
               grads: Optional[Dict[str, np.ndarray]] = None,
               word_ids: Optional[Sequence[np.ndarray]] = None,
               paths: Optional[Sequence[OraclePath]] = None) -> float:
    total = 0.0
    for index, sentence in enumerate(batch):
        total += sentence_loss(
            model, sentence, resources,
            grads=grads,
            word_ids=None if word_ids is None else word_ids[index],
            path=None if paths is None else paths[index],
        )
    return total


def train_step(batch: Sequence[Sentence], model: Model,
               resources: FeatureResources, optimizer: network.Adam,
               rng: Optional[np.random.Generator] = None,
               paths: Optional[Sequence[OraclePath]] = None) -> float:
    """One optimizer update on a batch; returns the pre-update loss."""
    for sentence in batch:
        if not is_projective(sentence):
            raise NonProjectiveError(
                "train_step received a non-projective sentence; filter first"
            )
    ids = None
    if rng is not None and model.hp.word_dropout_alpha > 0.0:
        ids = [dropped_word_ids(s, model, rng) for s in batch]
    grads = model.zero_grads()
    loss = batch_loss(model, batch, resources, grads=grads,
                      word_ids=ids, paths=paths)
    optimizer.step(grads)
    return loss


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    dev_uas: Optional[float] = None
    dev_las: Optional[float] = None


@dataclass
class TrainResult:
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    best_las: Optional[float] = None


def train_model(model: Model, train_sentences: Sequence[Sentence],
                resources: FeatureResources, epochs: int, seed: int,
                dev_sentences: Optional[Sequence[Sentence]] = None,
                shuffle: bool = True, log=None) -> TrainResult:
    """Train in place for up to ``epochs``; keep the best dev-LAS parameters.

    All training sentences must be projective (the CLI filters and counts
    the skipped ones).  Identical seed, data and configuration reproduce
    the exact same parameters.
    """
    from .evaluation import attachment_scores

    for sentence in train_sentences:
        if not is_projective(sentence):
            raise NonProjectiveError("non-projective sentence in training data")
    rng = np.random.default_rng(seed)
    optimizer = network.Adam(
        model.params, model.trainable,
        learning_rate=model.hp.learning_rate, beta1=model.hp.beta1,
        beta2=model.hp.beta2, eps=model.hp.adam_eps,
    )
    paths = [oracle_path(s, model) for s in train_sentences]
    result = TrainResult()
    best_params = None
    batch_size = max(1, model.hp.batch_size)
    for epoch in range(1, epochs + 1):
        order = list(range(len(train_sentences)))
        if shuffle:
            order = list(rng.permutation(len(train_sentences)))
        epoch_loss = 0.0
        for start in range(0, len(order), batch_size):
            chunk = order[start:start + batch_size]
            batch = [train_sentences[i] for i in chunk]
            epoch_loss += train_step(
                batch, model, resources, optimizer, rng=rng,
                paths=[paths[i] for i in chunk],
            )
        record = EpochRecord(epoch=epoch, loss=epoch_loss)
        if dev_sentences is not None:
            parsed = [greedy_parse(s, model, resources) for s in dev_sentences]
            record.dev_uas, record.dev_las = attachment_scores(
                list(dev_sentences), parsed
            )
            if result.best_las is None or record.dev_las > result.best_las:
                result.best_las = record.dev_las
                result.best_epoch = epoch
                best_params = model.copy_params()
        result.history.append(record)
        if log is not None:
            log(_format_epoch(record))
    if best_params is not None:
        model.set_params(best_params)
    return result


def _format_epoch(record: EpochRecord) -> str:
    line = f"epoch {record.epoch}: loss={record.loss:.4f}"
    if record.dev_uas is not None:
        line += f" dev_uas={record.dev_uas:.2f} dev_las={record.dev_las:.2f}"
    return line


def hinge_kink_margin(model: Model, sentences: Sequence[Sentence],
                      resources: FeatureResources,
                      paths: Optional[Sequence[OraclePath]] = None) -> float:
    """Distance of the current loss to its nearest non-differentiability.

    The hinge loss is piecewise linear: it bends where a step loss crosses
    zero and where the violating argmax switches transitions.  Central
    finite differences are only trustworthy when this margin is well above
    the probe step, so gradient-check fixtures should verify it.
    """
    if paths is None:
        paths = [oracle_path(s, model) for s in sentences]
    margin = np.inf
    for sentence, path in zip(sentences, paths):
        encoded = model.encode(sentence)
        for config, gold_index in path:
            scores, _ = score_config(model, config, encoded, sentence, resources)
            mask = legal_mask(config, model.codec)
            mask[gold_index] = False
            if not mask.any():
                continue
            competitors = np.where(mask, scores, -np.inf)
            violator = int(np.argmax(competitors))
            step_loss = model.hp.margin - scores[gold_index] + scores[violator]
            margin = min(margin, abs(step_loss))
            competitors[violator] = -np.inf
            rest = competitors[np.isfinite(competitors)]
            if rest.size:
                margin = min(margin, float(scores[violator] - rest.max()))
    return float(margin)


def jitter_params(model: Model, seed: int, scale: float = 0.35) -> None:
    """Move all trainable parameters to a generic random point.

    Freshly initialized models keep every transition score within a hair
    of every other (biases start at zero), which parks the hinge loss on
    top of its kinks; gradient checking needs a point in general position.
    """
    rng = np.random.default_rng(seed)
    for key in model.trainable:
        model.params[key] += rng.normal(scale=scale, size=model.params[key].shape)


@dataclass
class GradCheckEntry:
    key: str
    max_rel_error: float
    checked: int


@dataclass
class GradCheckReport:
    entries: List[GradCheckEntry]
    step: float
    tolerance: float
    kink_margin: float = float("inf")

    @property
    def max_rel_error(self) -> float:
        return max((e.max_rel_error for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def gradient_check(model: Model, sentences: Sequence[Sentence],
                   resources: FeatureResources, step: float = 1e-4,
                   tolerance: float = 1e-4,
                   keys: Optional[Sequence[str]] = None,
                   corrupt_key: Optional[str] = None) -> GradCheckReport:
    """Compare analytic gradients with central finite differences.

    ``corrupt_key`` deliberately offsets one analytic gradient so negative
    tests can confirm the check actually detects a broken gradient.
    """
    paths = [oracle_path(s, model) for s in sentences]
    grads = model.zero_grads()
    batch_loss(model, sentences, resources, grads=grads, paths=paths)
    if corrupt_key is not None:
        grads[corrupt_key] = grads[corrupt_key] + 0.5

    def loss_at_point() -> float:
        return batch_loss(model, sentences, resources, paths=paths)

    entries = []
    for key in keys if keys is not None else model.trainable:
        param = model.params[key]
        worst = 0.0
        checked = 0
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + step
            loss_plus = loss_at_point()
            param[index] = original - step
            loss_minus = loss_at_point()
            param[index] = original
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            analytic = grads[key][index]
            scale = max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, abs(analytic - numeric) / scale)
            checked += 1
        entries.append(GradCheckEntry(key=key, max_rel_error=worst, checked=checked))
    margin = hinge_kink_margin(model, sentences, resources, paths=paths)
    return GradCheckReport(entries=entries, step=step, tolerance=tolerance,
                           kink_margin=margin)
