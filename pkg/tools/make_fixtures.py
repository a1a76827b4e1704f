"""Regenerate the committed test fixtures under tests/data/.

The corpus below is hand-annotated: 20 short sentences with full dependency
parses chosen to exercise every extraction rule (active/passive voice, both
auxiliary POS taggings, dative/attr/oprd objects, partitive quantifier and
number heads, conjoined and relative-clause predicates, objectless verbs).

Mention features are synthetic but deterministic: each semantic group gets a
random unit direction in 16 dimensions, mentions jitter around it, and masked
word lists are sampled from a per-group lexicon so lists agree strongly within
a group and barely across groups. Reruns are byte-identical.

Usage: python3 tools/make_fixtures.py
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from evtypes import formats
from evtypes.extraction import ParsedSentence, Token

FIXTURE_SEED = 20260816
D_EMB = 16
L = 10
DATA_DIR = Path(__file__).resolve().parents[1] / "tests" / "data"

# sentence_id -> list of (text, lemma, pos, dep_label, head)
CORPUS = {
    "S1": [
        ("Police", "police", "NOUN", "nsubj", 1),
        ("detained", "detain", "VERB", "ROOT", None),
        ("hundreds", "hundred", "NOUN", "dobj", 1),
        ("of", "of", "ADP", "prep", 2),
        ("people", "people", "NOUN", "pobj", 3),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S2": [
        ("Officers", "officer", "NOUN", "nsubj", 1),
        ("arrested", "arrest", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 3),
        ("suspects", "suspect", "NOUN", "dobj", 1),
        ("near", "near", "ADP", "prep", 1),
        ("the", "the", "DET", "det", 6),
        ("border", "border", "NOUN", "pobj", 4),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S3": [
        ("The", "the", "DET", "det", 1),
        ("treaty", "treaty", "NOUN", "nsubj", 2),
        ("arrested", "arrest", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 4),
        ("spread", "spread", "NOUN", "dobj", 2),
        ("of", "of", "ADP", "prep", 4),
        ("the", "the", "DET", "det", 7),
        ("virus", "virus", "NOUN", "pobj", 5),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S4": [
        ("The", "the", "DET", "det", 1),
        ("government", "government", "NOUN", "nsubj", 2),
        ("stopped", "stop", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 4),
        ("violence", "violence", "NOUN", "dobj", 2),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S5": [
        ("Soldiers", "soldier", "NOUN", "nsubj", 1),
        ("stopped", "stop", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 3),
        ("convoy", "convoy", "NOUN", "dobj", 1),
        ("at", "at", "ADP", "prep", 1),
        ("the", "the", "DET", "det", 6),
        ("checkpoint", "checkpoint", "NOUN", "pobj", 4),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S6": [
        ("In", "in", "ADP", "prep", 6),
        ("New", "new", "PROPN", "compound", 2),
        ("York", "york", "PROPN", "pobj", 0),
        (",", ",", "PUNCT", "punct", 6),
        ("protesters", "protester", "NOUN", "nsubjpass", 6),
        ("were", "be", "VERB", "auxpass", 6),
        ("arrested", "arrest", "VERB", "ROOT", None),
        ("after", "after", "ADP", "prep", 6),
        ("the", "the", "DET", "det", 9),
        ("rally", "rally", "NOUN", "pobj", 7),
        (".", ".", "PUNCT", "punct", 6),
    ],
    "S7": [
        ("He", "he", "PRON", "nsubjpass", 2),
        ("was", "be", "AUX", "auxpass", 2),
        ("arrested", "arrest", "VERB", "ROOT", None),
        ("yesterday", "yesterday", "NOUN", "npadvmod", 2),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S8": [
        ("No", "no", "DET", "det", 1),
        ("violence", "violence", "NOUN", "ROOT", None),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S9": [
        ("The", "the", "DET", "det", 1),
        ("children", "child", "NOUN", "nsubj", 2),
        ("slept", "sleep", "VERB", "ROOT", None),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S10": [
        ("The", "the", "DET", "det", 1),
        ("agency", "agency", "NOUN", "nsubj", 2),
        ("sent", "send", "VERB", "ROOT", None),
        ("doctors", "doctor", "NOUN", "dative", 2),
        ("supplies", "supply", "NOUN", "dobj", 2),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S11": [
        ("The", "the", "DET", "det", 1),
        ("outbreak", "outbreak", "NOUN", "nsubj", 2),
        ("became", "become", "VERB", "ROOT", None),
        ("a", "a", "DET", "det", 4),
        ("crisis", "crisis", "NOUN", "attr", 2),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S12": [
        ("The", "the", "DET", "det", 1),
        ("court", "court", "NOUN", "nsubj", 2),
        ("considered", "consider", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 4),
        ("ruling", "ruling", "NOUN", "dobj", 2),
        ("final", "final", "ADJ", "oprd", 2),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S13": [
        ("Rebels", "rebel", "NOUN", "nsubj", 1),
        ("seized", "seize", "VERB", "ROOT", None),
        ("the", "the", "DET", "det", 3),
        ("town", "town", "NOUN", "dobj", 1),
        ("and", "and", "CCONJ", "cc", 1),
        ("burned", "burn", "VERB", "conj", 1),
        ("dozens", "dozen", "NOUN", "dobj", 5),
        ("of", "of", "ADP", "prep", 6),
        ("houses", "house", "NOUN", "pobj", 7),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S14": [
        ("The", "the", "DET", "det", 1),
        ("vaccine", "vaccine", "NOUN", "nsubjpass", 3),
        ("was", "be", "AUX", "auxpass", 3),
        ("approved", "approve", "VERB", "ROOT", None),
        ("by", "by", "ADP", "agent", 3),
        ("regulators", "regulator", "NOUN", "pobj", 4),
        (".", ".", "PUNCT", "punct", 3),
    ],
    "S15": [
        ("There", "there", "PRON", "expl", 1),
        ("remained", "remain", "VERB", "ROOT", None),
        ("several", "several", "ADJ", "amod", 3),
        ("problems", "problem", "NOUN", "attr", 1),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S16": [
        ("Hundreds", "hundred", "NOUN", "nsubjpass", 4),
        ("of", "of", "ADP", "prep", 0),
        ("migrants", "migrant", "NOUN", "pobj", 1),
        ("were", "be", "AUX", "auxpass", 4),
        ("detained", "detain", "VERB", "ROOT", None),
        ("at", "at", "ADP", "prep", 4),
        ("the", "the", "DET", "det", 7),
        ("border", "border", "NOUN", "pobj", 5),
        (".", ".", "PUNCT", "punct", 4),
    ],
    "S17": [
        ("The", "the", "DET", "det", 1),
        ("court", "court", "NOUN", "nsubj", 2),
        ("fined", "fine", "VERB", "ROOT", None),
        ("50", "50", "NUM", "dobj", 2),
        ("of", "of", "ADP", "prep", 3),
        ("the", "the", "DET", "det", 6),
        ("organizers", "organizer", "NOUN", "pobj", 4),
        (".", ".", "PUNCT", "punct", 2),
    ],
    "S18": [
        ("Families", "family", "NOUN", "nsubj", 1),
        ("had", "have", "VERB", "ROOT", None),
        ("to", "to", "PART", "aux", 3),
        ("flee", "flee", "VERB", "xcomp", 1),
        ("the", "the", "DET", "det", 5),
        ("city", "city", "NOUN", "dobj", 3),
        (".", ".", "PUNCT", "punct", 1),
    ],
    "S19": [
        ("The", "the", "DET", "det", 1),
        ("clinic", "clinic", "NOUN", "nsubj", 7),
        ("that", "that", "PRON", "nsubjpass", 4),
        ("was", "be", "AUX", "auxpass", 4),
        ("built", "build", "VERB", "relcl", 1),
        ("last", "last", "ADJ", "amod", 6),
        ("year", "year", "NOUN", "npadvmod", 4),
        ("treated", "treat", "VERB", "ROOT", None),
        ("patients", "patient", "NOUN", "dobj", 7),
        (".", ".", "PUNCT", "punct", 7),
    ],
    "S20": [
        ("Police", "police", "NOUN", "nsubj", 1),
        ("detained", "detain", "VERB", "ROOT", None),
        ("hundreds", "hundred", "NOUN", "dobj", 1),
        ("of", "of", "ADP", "prep", 2),
        ("people", "people", "NOUN", "pobj", 3),
        ("again", "again", "ADV", "advmod", 1),
        (".", ".", "PUNCT", "punct", 1),
    ],
}

BACKGROUND = {
    "n_bs": 1000,
    "bsf": {
        # generic words, frequent in the background
        "be": 990, "that": 980, "he": 950, "have": 950, "become": 900,
        "build": 800, "say": 700, "final": 600, "problem": 500,
        # predicates
        "remain": 300, "send": 200, "consider": 150, "stop": 120, "treat": 80,
        "approve": 60, "burn": 40, "fine": 30, "flee": 12, "seize": 8,
        "arrest": 5, "detain": 4,
        # heads
        "people": 400, "city": 250, "house": 200, "town": 150, "supply": 110,
        "doctor": 100, "patient": 90, "spread": 90, "violence": 70,
        "crisis": 60, "ruling": 35, "suspect": 25, "organizer": 20,
        "migrant": 18, "vaccine": 15, "protester": 10, "convoy": 6,
    },
}

SENSE_DICTIONARY = {
    "arrest": [
        {
            "sense_id": "arrest_1",
            "definition": "take a person into custody",
            "examples": [
                {"text": "Police arrested the thief .", "target_index": 1},
                {"text": "They arrested him at dawn .", "target_index": 1},
            ],
        },
        {
            "sense_id": "arrest_2",
            "definition": "bring a process to a halt",
            "examples": [
                {"text": "The drug arrested the disease .", "target_index": 2},
                {"text": "The measure arrested inflation quickly .", "target_index": 2},
            ],
        },
    ],
    "stop": [
        {
            "sense_id": "stop_1",
            "definition": "cause to halt",
            "examples": [
                {"text": "Guards stopped the truck .", "target_index": 1},
                {"text": "They stopped the fight early .", "target_index": 1},
            ],
        }
    ],
    "detain": [
        {
            "sense_id": "detain_1",
            "definition": "hold a person in official custody",
            "examples": [
                {"text": "Police detained the suspect .", "target_index": 1},
                {"text": "Guards detained two men briefly .", "target_index": 1},
            ],
        }
    ],
}

# semantic grouping of mentions: one direction + one lexicon per group
LEXICONS = {
    "custody": ["police", "arrest", "jail", "charge", "detain", "officer",
                "custody", "court", "crime", "suspect", "law", "prison"],
    "halt": ["stop", "halt", "slow", "prevent", "curb", "end",
             "block", "contain", "limit", "pause", "cease", "freeze"],
    "transfer": ["send", "give", "deliver", "bring", "provide", "supply",
                 "ship", "offer", "carry", "hand", "mail", "forward"],
    "change": ["become", "turn", "grow", "remain", "stay", "prove",
               "seem", "appear", "emerge", "develop", "evolve", "get"],
    "judge": ["consider", "judge", "deem", "declare", "rule", "find",
              "hold", "view", "regard", "call", "label", "treat"],
    "force": ["seize", "take", "capture", "burn", "destroy", "raid",
              "storm", "occupy", "loot", "attack", "overrun", "sack"],
    "sanction": ["approve", "fine", "authorize", "license", "endorse", "clear",
                 "permit", "certify", "penalize", "sanction", "ratify", "back"],
    "move": ["flee", "leave", "escape", "abandon", "evacuate", "exit",
             "quit", "desert", "run", "depart", "bolt", "withdraw"],
    "build": ["build", "construct", "erect", "open", "found", "establish",
              "renovate", "expand", "restore", "rebuild", "design", "plan"],
    "care": ["treat", "help", "cure", "heal", "nurse", "serve",
             "examine", "admit", "assist", "support", "tend", "aid"],
    "person": ["people", "man", "woman", "child", "crowd", "protester",
               "worker", "resident", "citizen", "student", "member", "driver"],
    "thing": ["fire", "building", "road", "water", "city", "area",
              "plan", "report", "system", "problem", "effort", "program"],
}

# (sentence_id, token_index, term, kind, group) for every corpus mention
MENTIONS = [
    ("S1", 1, "detain", "predicate", "custody"),
    ("S1", 4, "people", "object_head", "person"),
    ("S2", 1, "arrest", "predicate", "custody"),
    ("S2", 3, "suspect", "object_head", "person"),
    ("S3", 2, "arrest", "predicate", "halt"),
    ("S3", 4, "spread", "object_head", "thing"),
    ("S4", 2, "stop", "predicate", "halt"),
    ("S4", 4, "violence", "object_head", "thing"),
    ("S5", 1, "stop", "predicate", "halt"),
    ("S5", 3, "convoy", "object_head", "thing"),
    ("S6", 6, "arrest", "predicate", "custody"),
    ("S6", 4, "protester", "object_head", "person"),
    ("S7", 2, "arrest", "predicate", "custody"),
    ("S7", 0, "he", "object_head", "person"),
    ("S10", 2, "send", "predicate", "transfer"),
    ("S10", 3, "doctor", "object_head", "person"),
    ("S10", 4, "supply", "object_head", "thing"),
    ("S11", 2, "become", "predicate", "change"),
    ("S11", 4, "crisis", "object_head", "thing"),
    ("S12", 2, "consider", "predicate", "judge"),
    ("S12", 4, "ruling", "object_head", "thing"),
    ("S12", 5, "final", "object_head", "thing"),
    ("S13", 1, "seize", "predicate", "force"),
    ("S13", 3, "town", "object_head", "thing"),
    ("S13", 5, "burn", "predicate", "force"),
    ("S13", 8, "house", "object_head", "thing"),
    ("S14", 3, "approve", "predicate", "sanction"),
    ("S14", 1, "vaccine", "object_head", "thing"),
    ("S15", 1, "remain", "predicate", "change"),
    ("S15", 3, "problem", "object_head", "thing"),
    ("S16", 4, "detain", "predicate", "custody"),
    ("S16", 2, "migrant", "object_head", "person"),
    ("S17", 2, "fine", "predicate", "sanction"),
    ("S17", 6, "organizer", "object_head", "person"),
    ("S18", 3, "flee", "predicate", "move"),
    ("S18", 5, "city", "object_head", "thing"),
    ("S19", 4, "build", "predicate", "build"),
    ("S19", 2, "that", "object_head", "person"),
    ("S19", 7, "treat", "predicate", "care"),
    ("S19", 8, "patient", "object_head", "person"),
    ("S20", 1, "detain", "predicate", "custody"),
    ("S20", 4, "people", "object_head", "person"),
]

# sense examples take the group of the sense they illustrate
SENSE_EXAMPLE_GROUPS = {
    "arrest_1": "custody",
    "arrest_2": "halt",
    "stop_1": "halt",
    "detain_1": "custody",
}


def _rng(*parts) -> np.random.Generator:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return np.random.default_rng(
        np.random.SeedSequence([FIXTURE_SEED, int.from_bytes(digest[:8], "big")])
    )


def group_direction(group: str) -> np.ndarray:
    v = _rng("direction", group).standard_normal(D_EMB)
    return v / np.linalg.norm(v)


def mention_embedding(mention_id: str, group: str) -> np.ndarray:
    v = group_direction(group) + 0.12 * _rng("jitter", mention_id).standard_normal(D_EMB)
    return v / np.linalg.norm(v)


def mention_mwp(mention_id: str, group: str) -> list[str]:
    lexicon = LEXICONS[group]
    picks = _rng("mwp", mention_id).choice(len(lexicon), size=L, replace=False)
    return [lexicon[i] for i in sorted(picks)]


def build_sentences():
    sentences = []
    for sid, rows in CORPUS.items():
        tokens = tuple(
            Token(index=i, text=t, lemma=lem, pos=pos, dep_label=dep, head=head)
            for i, (t, lem, pos, dep, head) in enumerate(rows)
        )
        text = " ".join(t for t, _, _, _, _ in rows)
        sentences.append(ParsedSentence(sentence_id=sid, tokens=tokens, text=text))
    return sentences


def build_mention_features():
    from evtypes.senses import MentionFeature, example_mention_id

    features = []
    for sid, tok, term, kind, group in MENTIONS:
        mention_id = f"{sid}:t{tok}"
        features.append(
            MentionFeature(
                mention_id=mention_id,
                term=term,
                kind=kind,
                embedding=mention_embedding(mention_id, group),
                mwp=tuple(mention_mwp(mention_id, group)),
                sentence_id=sid,
                token_index=tok,
            )
        )
    for lemma, senses in SENSE_DICTIONARY.items():
        for sense in senses:
            group = SENSE_EXAMPLE_GROUPS[sense["sense_id"]]
            for k, example in enumerate(sense["examples"]):
                mention_id = example_mention_id(sense["sense_id"], k)
                features.append(
                    MentionFeature(
                        mention_id=mention_id,
                        term=lemma,
                        kind="sense_example",
                        embedding=mention_embedding(mention_id, group),
                        mwp=tuple(mention_mwp(mention_id, group)),
                        sentence_id=mention_id,
                        token_index=example["target_index"],
                    )
                )
    return features


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    meta = {"config_hash": "fixture", "seed": FIXTURE_SEED}

    formats.write_parses(DATA_DIR / "parses.jsonl", build_sentences(), meta)

    with open(DATA_DIR / "background.tsv", "w", encoding="utf-8") as fh:
        fh.write(f"N_BS={BACKGROUND['n_bs']}\n")
        for word in sorted(BACKGROUND["bsf"]):
            fh.write(f"{word}\t{BACKGROUND['bsf'][word]}\n")

    (DATA_DIR / "senses.json").write_text(
        json.dumps(SENSE_DICTIONARY, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    formats.write_mention_features(
        DATA_DIR / "mention_features.jsonl",
        build_mention_features(),
        {**meta, "d_emb": D_EMB, "l": L},
    )
    print(f"wrote fixtures to {DATA_DIR}")


if __name__ == "__main__":
    main()
