"""Greedy decoding with coordination-augmented transition scores.

At every configuration the base MLP scores all 2*|labels|+1 transitions;
when a right arc is possible, the auxiliary coordination MLP scores the
(second stack item, stack top) word pair and its output is added to the
score of the right transition that would create a "conj" arc.  The
highest-scoring legal transition is applied; ties break toward the lowest
transition index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .conj_features import extract_forms
from .model import EncodedSentence, Model
from .resources import FeatureResources
from .transitions import (
    ParseConfiguration,
    apply,
    arcs_to_tree,
    initial_config,
    is_terminal,
    legal_mask,
)
from .treebank import Sentence


class DecodeError(RuntimeError):
    pass


@dataclass
class StepCache:
    """Forward state of one configuration's scoring, kept for backprop."""

    features: np.ndarray
    slots: List[int]
    mlp_hidden: np.ndarray
    conj_hidden: Optional[np.ndarray]
    conj_joint: Optional[np.ndarray]
    conj_index: Optional[int]


def conj_candidate(config: ParseConfiguration) -> Optional[Tuple[int, int]]:
    """(head, modifier) pair a right transition would connect, if any."""
    if len(config.stack) < 2:
        return None
    return config.stack[-2], config.stack[-1]


def score_config(model: Model, config: ParseConfiguration,
                 encoded: EncodedSentence, sentence: Sentence,
                 resources: FeatureResources, want_cache: bool = False
                 ) -> Tuple[np.ndarray, Optional[StepCache]]:
    """Augmented transition scores for one configuration."""
    features, slots = model.config_feature_vector(config, encoded)
    scores, mlp_hidden = model.transition_scores(features)
    conj_hidden = conj_joint = None
    right_conj = model.codec.right_index("conj")
    pair = conj_candidate(config)
    if model.hp.use_conj_features and right_conj is not None and pair is not None:
        head_id, modifier_id = pair
        feature_vec = extract_forms(
            sentence.form_of(head_id), sentence.pos_of(head_id),
            sentence.form_of(modifier_id), sentence.pos_of(modifier_id),
            resources,
        )
        conj_score, conj_hidden, conj_joint = model.conj_score(
            features, feature_vec.to_inputs()
        )
        scores[right_conj] += conj_score
    if not want_cache:
        return scores, None
    cache = StepCache(
        features=features,
        slots=slots,
        mlp_hidden=mlp_hidden,
        conj_hidden=conj_hidden,
        conj_joint=conj_joint,
        conj_index=right_conj if conj_hidden is not None else None,
    )
    return scores, cache


def augmented_scores(model: Model, config: ParseConfiguration,
                     encoded: EncodedSentence, sentence: Sentence,
                     resources: FeatureResources) -> np.ndarray:
    scores, _ = score_config(model, config, encoded, sentence, resources)
    return scores


def greedy_parse(sentence: Sentence, model: Model, resources: FeatureResources,
                 single_root: Optional[bool] = None) -> Sentence:
    """Parse one sentence; returns a copy carrying predicted heads/labels."""
    if single_root is None:
        single_root = model.hp.single_root
    encoded = model.encode(sentence)
    config = initial_config(sentence)
    for _ in range(2 * len(sentence)):
        scores, _ = score_config(model, config, encoded, sentence, resources)
        mask = legal_mask(config, model.codec, single_root=single_root)
        if not mask.any():
            raise DecodeError(f"no legal transition at {config.summary()}")
        masked = np.where(mask, scores, -np.inf)
        index = int(np.argmax(masked))
        config = apply(config, model.codec.decode(index))
    if not is_terminal(config):
        raise DecodeError(f"decoder finished in non-terminal state {config.summary()}")
    heads, labels = arcs_to_tree(config.arcs, len(sentence))
    return sentence.with_predictions(heads, labels)


def parse_corpus(sentences, model: Model, resources: FeatureResources,
                 single_root: Optional[bool] = None) -> List[Sentence]:
    return [greedy_parse(s, model, resources, single_root) for s in sentences]
