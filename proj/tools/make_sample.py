#!/usr/bin/env python3
# Copyright 2026 The QUDeval Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the sample release in data/sample/release.

The articles are original text. Questions come from per-system templates and
labels from a seeded generator, so the sample exercises every code path
(triple annotation, skip propagation, ill-formed edges, duplicates,
similarity judgments) without standing in for real data.

Run `qudeval ingest --release data/sample/release --out data/sample/corpus`
afterwards to refresh the canonical corpus.
"""

import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data/sample/release"

ARTICLES = {
    "harbor": ("train-held-out", [
        "The city council voted on Tuesday to rebuild the old harbor wall.",
        "The wall was damaged by a winter storm two years ago.",
        "Engineers estimate the repairs will cost about 40 million dollars.",
        "Most of the money will come from a state infrastructure fund.",
        "Fishing crews have complained that the broken wall leaves their boats exposed.",
        "Several boats sank during a gale last March.",
        "Construction is expected to begin in the spring.",
        "The mayor said the project would also create about 200 jobs.",
        "Critics argue that the council ignored cheaper designs.",
    ]),
    "orchard": ("train-held-out", [
        "Apple growers in the valley are bracing for a smaller harvest this year.",
        "A late frost in April killed many of the blossoms.",
        "Farmers say yields could fall by a third.",
        "Prices at local markets have already started to climb.",
        "Some orchards are hiring fewer seasonal workers as a result.",
        "The regional farm bureau has asked for emergency aid.",
        "Officials said a decision on the request will come next month.",
        "Growers hope that warmer weather will help the surviving fruit ripen.",
    ]),
    "library": ("test", [
        "The public library will extend its opening hours starting next week.",
        "Branches will now stay open until nine in the evening.",
        "The change follows a survey in which residents asked for later hours.",
        "Library staff said students were the most frequent late visitors.",
        "The extra hours will be paid for by a private donation.",
        "The donor, a retired teacher, asked to remain anonymous.",
        "The library also plans to add a homework help desk.",
        "Volunteers from the local college will run the desk.",
        "The board will review the program after one year.",
    ]),
    "rail": ("test", [
        "A new commuter rail line opened on Monday after years of delays.",
        "The line connects the northern suburbs with the downtown station.",
        "Trains will run every fifteen minutes during rush hour.",
        "Officials expect about 30,000 riders a day within the first year.",
        "The project ran more than a year behind schedule.",
        "Problems with signal equipment caused most of the delays.",
        "Ticket prices will match those of the existing bus network.",
        "Some residents near the tracks have complained about noise.",
        "The transit agency said it would build sound barriers this summer.",
        "A second line to the airport is still in the planning stage.",
    ]),
    "museum": ("test", [
        "The science museum unveiled a restored dinosaur skeleton on Saturday.",
        "The skeleton had been stored in pieces for more than fifty years.",
        "Volunteers spent three years cleaning and assembling the bones.",
        "Researchers believe the animal lived about 70 million years ago.",
        "The museum expects the exhibit to double weekend attendance.",
        "Admission will be free for children under twelve during the first month.",
        "The restoration was funded by a grant from a national foundation.",
        "Scientists plan to publish a study on the specimen next year.",
    ]),
}

SYSTEMS = ["ko", "chatgpt", "alpaca", "gpt4", "dcqa"]

STOP = {"the", "a", "an", "of", "to", "in", "on", "and", "that", "will", "was", "is",
        "for", "by", "with", "about", "have", "has", "its", "their", "this", "at",
        "after", "during", "from", "be", "as", "it", "next", "more", "than", "would",
        "said", "also", "some", "most", "many", "could", "been", "had", "now"}


def content(sentence):
    words = [w.strip(".,").lower() for w in sentence.split()]
    return [w for w in words if w and w not in STOP and not w[0].isdigit()]


def question(system, sentences, anchor, answer, rng):
    a = content(sentences[anchor - 1])
    t = content(sentences[answer - 1])
    topic = " ".join(a[:2]) if a else "this"
    detail = " ".join(t[:2]) if t else "it"
    if system == "ko":
        return rng.choice([f"What happened with the {topic}?", f"Why is the {topic} important?"])
    if system == "chatgpt":
        return f"How does the {topic} relate to {detail}?"
    if system == "alpaca":
        # Alpaca repeats itself a lot.
        return rng.choice(["What is the reason for this?", f"What is the {topic}?"])
    if system == "gpt4":
        return f"What is the expected effect of the {topic}?"
    return f"What else is known about the {topic}?"


LABELS = {
    "comp": ["direct", "unfocused", "not_answered"],
    "givn": ["no_new", "answer_leak", "hallucination"],
    "relv": ["fully", "partially", "not_grounded"],
}

# Label weights per system (best, middle, worst).
WEIGHTS = {
    "ko": {"lang": 0.92, "comp": [5, 1, 4], "givn": [7, 1, 1], "relv": [7, 2, 1]},
    "chatgpt": {"lang": 0.96, "comp": [8, 1, 1], "givn": [6, 3, 1], "relv": [6, 3, 1]},
    "alpaca": {"lang": 0.94, "comp": [4, 2, 4], "givn": [6, 3, 1], "relv": [5, 2, 3]},
    "gpt4": {"lang": 1.0, "comp": [9, 1, 1], "givn": [6, 3, 1], "relv": [5, 4, 1]},
    "dcqa": {"lang": 0.98, "comp": [7, 2, 1], "givn": [8, 1, 1], "relv": [8, 2, 1]},
}


def draw_labels(system, rng, base=None):
    w = WEIGHTS[system]
    if base is not None and rng.random() < 0.7:
        return dict(base)
    if rng.random() > w["lang"]:
        return {"lang": "no", "comp": "skipped", "givn": "skipped", "relv": "skipped"}
    out = {"lang": "yes"}
    for c, names in LABELS.items():
        out[c] = rng.choices(names, weights=w[c])[0]
    return out


def main():
    rng = random.Random(2024)
    OUT.mkdir(parents=True, exist_ok=True)
    articles = [{"article_id": aid, "split": split, "sentences": s}
                for aid, (split, s) in ARTICLES.items()]
    (OUT / "articles.json").write_text(json.dumps(articles, indent=1) + "\n", encoding="utf-8")

    quds, similarity = [], []
    triple = {"harbor", "library"}
    for aid, (_, sentences) in ARTICLES.items():
        answers = list(range(2, min(len(sentences), 8) + 1))
        references = {}
        for system in reversed(SYSTEMS):  # human questions first
            for answer in answers:
                anchor = rng.randint(1, answer - 1)
                if system in ("chatgpt", "alpaca") and answer == 5 and aid == "rail":
                    anchor = answer  # the anchor step picked the answer itself
                qid = f"{aid}-{system}-{answer}"
                text = question(system, sentences, anchor, answer, rng)
                record = {"question_id": qid, "article_id": aid, "system": system,
                          "question": text, "anchor_id": anchor, "answer_id": answer}
                annotators = ["a1", "a2", "a3"] if aid in triple else ["a1"]
                base = None
                for ann in annotators:
                    labels = draw_labels(system, rng, base)
                    base = base or labels
                    if anchor >= answer:
                        labels = {k: "skipped" for k in labels}
                    quds.append(dict(record, annotator=ann, **labels))
                if system == "dcqa":
                    references[answer] = text
                elif answer in references:
                    for ann in ("s1", "s2"):
                        similarity.append({"question_id": qid,
                                           "reference_question": references[answer],
                                           "annotator": ann,
                                           "score": rng.choice([1, 2, 2, 3, 3, 4, 5])})
    with (OUT / "quds.jsonl").open("w", encoding="utf-8") as f:
        for r in quds:
            f.write(json.dumps(r) + "\n")
    with (OUT / "similarity.jsonl").open("w", encoding="utf-8") as f:
        for r in similarity:
            f.write(json.dumps(r) + "\n")
    print(f"{len(articles)} articles, {len(quds)} label records, {len(similarity)} judgments")


if __name__ == "__main__":
    main()
