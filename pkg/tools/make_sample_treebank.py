"""Generate the bundled sample treebank and embedding file.

Writes data/sample_treebank.conllx (projective sentences from a handful of
templates plus three hand-written non-projective ones), a 23-sentence
fixture for the reader tests, and a small pretrained-embedding text file
covering the generator vocabulary.  Deterministic: fixed seed, sorted
iteration, fixed float formatting.
"""

from __future__ import annotations

import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from conjparse.treebank import (  # noqa: E402
    Sentence,
    Token,
    is_projective,
    validate_tree,
    write_conll,
)

DETS = ["the", "a", "some", "this"]
ADJS = ["quick", "slow", "big", "small", "strong", "weak", "three-month", "six-month"]
NOUNS = [
    "men", "women", "shares", "bonds", "president", "officer", "chairman",
    "executive", "income", "earnings", "keyboards", "screens", "securities",
    "markets", "tables", "chairs", "winners", "losers", "station", "nation",
    "dog", "cat", "house", "report", "story",
]
NAMES = ["Poland", "Hungary", "France", "Spain", "Corp.", "Inc.", "Madrid", "Austin"]
VERBS = ["sees", "buys", "sells", "says", "handles", "reports", "finds", "likes"]
VERBS_PAST = ["saw", "bought", "sold", "said", "handled", "reported", "found", "liked"]
ADVS = ["up", "down", "quickly", "slowly"]
PREPS = ["in", "on", "for", "at", "from"]
CCS = ["and", "or", "but"]

CONJ_NOUN_PAIRS = [
    ("men", "women"), ("shares", "bonds"), ("president", "officer"),
    ("chairman", "executive"), ("income", "earnings"), ("keyboards", "screens"),
    ("winners", "losers"), ("tables", "chairs"),
]
CONJ_NAME_PAIRS = [
    ("Poland", "Hungary"), ("France", "Spain"), ("Corp.", "Inc."),
    ("Madrid", "Austin"),
]


def build(rows):
    """rows: (form, pos, head, label) with 1-based integer heads."""
    tokens = [
        Token(id=i, form=form, pos=pos, gold_head=head, gold_label=label)
        for i, (form, pos, head, label) in enumerate(rows, start=1)
    ]
    sent = Sentence(tuple(tokens))
    validate_tree(sent)
    return sent


def build_projective(rows):
    sent = build(rows)
    assert is_projective(sent), rows
    return sent


def choice(rng, pool):
    return pool[rng.integers(len(pool))]


def t_transitive(rng):
    """[det] [adj] subj verb [det] obj ."""
    rows = []
    subj_mods = []
    if rng.random() < 0.7:
        subj_mods.append((choice(rng, DETS), "DT", "det"))
    if rng.random() < 0.4:
        subj_mods.append((choice(rng, ADJS), "JJ", "amod"))
    subj_pos = len(subj_mods) + 1
    verb_pos = subj_pos + 1
    obj_det = rng.random() < 0.6
    obj_pos = verb_pos + (2 if obj_det else 1)
    for form, pos, label in subj_mods:
        rows.append((form, pos, subj_pos, label))
    rows.append((choice(rng, NOUNS), "NN", verb_pos, "nsubj"))
    rows.append((choice(rng, VERBS), "VBZ", 0, "root"))
    if obj_det:
        rows.append((choice(rng, DETS), "DT", obj_pos, "det"))
    rows.append((choice(rng, NOUNS), "NN", verb_pos, "dobj"))
    rows.append((".", ".", verb_pos, "punct"))
    return build_projective(rows)


def t_subject_conj(rng):
    """name1 cc name2 verb obj .  --  conj between the coordinated subjects."""
    a, b = choice(rng, CONJ_NAME_PAIRS)
    rows = [
        (a, "NNP", 4, "nsubj"),
        (choice(rng, CCS), "CC", 1, "cc"),
        (b, "NNP", 1, "conj"),
        (choice(rng, VERBS_PAST), "VBD", 0, "root"),
        (choice(rng, NOUNS), "NN", 4, "dobj"),
        (".", ".", 4, "punct"),
    ]
    return build_projective(rows)


def t_object_conj(rng):
    """subj verb obj1 cc obj2 ."""
    a, b = choice(rng, CONJ_NOUN_PAIRS)
    rows = [
        (choice(rng, NOUNS), "NN", 2, "nsubj"),
        (choice(rng, VERBS), "VBZ", 0, "root"),
        (a, "NNS", 2, "dobj"),
        (choice(rng, CCS), "CC", 3, "cc"),
        (b, "NNS", 3, "conj"),
        (".", ".", 2, "punct"),
    ]
    return build_projective(rows)


def t_pp(rng):
    """subj verb obj prep pobj ."""
    rows = [
        (choice(rng, NOUNS), "NN", 2, "nsubj"),
        (choice(rng, VERBS), "VBZ", 0, "root"),
        (choice(rng, NOUNS), "NN", 2, "dobj"),
        (choice(rng, PREPS), "IN", 2, "prep"),
        (choice(rng, NOUNS), "NN", 4, "pobj"),
        (".", ".", 2, "punct"),
    ]
    return build_projective(rows)


def t_verb_conj(rng):
    """subj v1 obj1 cc v2 obj2 .  --  coordinated verbs."""
    v1 = choice(rng, VERBS)
    v2 = choice(rng, [v for v in VERBS if v != v1])
    rows = [
        (choice(rng, NOUNS), "NN", 2, "nsubj"),
        (v1, "VBZ", 0, "root"),
        (choice(rng, NOUNS), "NN", 2, "dobj"),
        (choice(rng, CCS), "CC", 2, "cc"),
        (v2, "VBZ", 2, "conj"),
        (choice(rng, NOUNS), "NN", 5, "dobj"),
        (".", ".", 2, "punct"),
    ]
    return build_projective(rows)


def t_adv_conj(rng):
    """subj verb adv1 cc adv2 .  --  'went up and down'."""
    pair = ("up", "down") if rng.random() < 0.5 else ("quickly", "slowly")
    rows = [
        (choice(rng, NOUNS), "NNS", 2, "nsubj"),
        (choice(rng, VERBS_PAST), "VBD", 0, "root"),
        (pair[0], "RB", 2, "advmod"),
        (choice(rng, CCS), "CC", 3, "cc"),
        (pair[1], "RB", 3, "conj"),
        (".", ".", 2, "punct"),
    ]
    return build_projective(rows)


def t_amod_conj(rng):
    """det adj1 cc adj2 noun verb .  --  coordinated prenominal adjectives."""
    a = choice(rng, ADJS)
    b = choice(rng, [x for x in ADJS if x != a])
    rows = [
        (choice(rng, DETS), "DT", 5, "det"),
        (a, "JJ", 5, "amod"),
        (choice(rng, CCS), "CC", 2, "cc"),
        (b, "JJ", 2, "conj"),
        (choice(rng, NOUNS), "NNS", 6, "nsubj"),
        (choice(rng, VERBS_PAST), "VBD", 0, "root"),
        (".", ".", 6, "punct"),
    ]
    return build_projective(rows)


NON_PROJECTIVE_ROWS = [
    # Crossing arc pairs such as (3,1) x (4,2), hand-checked.
    [("hearings", "NNS", 3, "dep"), ("scheduled", "VBN", 4, "dep"),
     ("are", "VBP", 0, "root"), ("today", "NN", 3, "dep")],
    [("a", "DT", 4, "det"), ("review", "NN", 5, "nsubj"),
     ("tomorrow", "NN", 2, "dep"), ("formal", "JJ", 2, "amod"),
     ("begins", "VBZ", 0, "root")],
    [("nobody", "NN", 2, "nsubj"), ("moved", "VBD", 0, "root"),
     ("quickly", "RB", 5, "advmod"), ("which", "WDT", 2, "dep"),
     ("mattered", "VBD", 4, "rcmod")],
]


def non_projective_sentences():
    sentences = []
    for rows in NON_PROJECTIVE_ROWS:
        sent = build(rows)
        assert not is_projective(sent), rows
        sentences.append(sent)
    return sentences


TEMPLATES = [t_transitive, t_subject_conj, t_object_conj, t_pp, t_verb_conj,
             t_adv_conj, t_amod_conj]


def generate(count, seed):
    rng = np.random.default_rng(seed)
    return [TEMPLATES[i % len(TEMPLATES)](rng) for i in range(count)]


def write_embeddings(path, dim=16, seed=99):
    vocab = sorted(
        set(DETS + ADJS + NOUNS + NAMES + VERBS + VERBS_PAST + ADVS + PREPS + CCS)
    )
    rng = np.random.default_rng(seed)
    lines = [f"{len(vocab)} {dim}"]
    for word in vocab:
        values = rng.normal(scale=0.5, size=dim)
        lines.append(word + " " + " ".join(f"{v:.6f}" for v in values))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    sentences = generate(227, seed=20240817) + non_projective_sentences()
    (data / "sample_treebank.conllx").write_bytes(write_conll(sentences))
    print(f"sample_treebank.conllx: {len(sentences)} sentences "
          f"({sum(not is_projective(s) for s in sentences)} non-projective)")

    fixture = generate(23, seed=4242)
    tests_data = ROOT / "tests" / "data"
    tests_data.mkdir(parents=True, exist_ok=True)
    (tests_data / "sample23.conllx").write_bytes(write_conll(fixture))
    print(f"sample23.conllx: {len(fixture)} sentences")

    write_embeddings(data / "embeddings_sample.txt")
    print("embeddings_sample.txt written")


if __name__ == "__main__":
    main()
