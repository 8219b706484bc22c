#!/usr/bin/env python3
# Copyright 2026 The PromptForge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the end-to-end fixture backend and its expected ranking scores.

A toy masked LM stands in for the real model. Fill-mask proposals are the
same word lists for every sentence (scores jitter per sentence), so the
paraphrase set does not depend on which sentences get sampled. The logit
gap between the two mapping words is quality(prompt) * polarity(sentence)
+ bias(prompt), where polarity sums hand-set word weights.

expected_scores.json is computed here by brute force, independently of the
C++ code: probe search, perturbations and the zero-one checks are
re-implemented from their definitions.

Usage: make_fixture.py OUTDIR
"""

import hashlib
import json
import sys
from pathlib import Path

POS, NEG = "great", "terrible"

SYNONYMS = {
    POS: ["outstanding", "bully", "corking", "cracking", "dandy", "groovy", "keen"],
    NEG: ["awful", "dire", "direful", "dread", "dreaded", "dreadful", "fearful"],
}

# Word polarity as the toy model "knows" it. Obscure synonyms are weak.
POLARITY = {
    "great": 1.0, "outstanding": 0.9, "bully": 0.1, "corking": 0.2, "cracking": 0.3,
    "dandy": 0.5, "groovy": 0.6, "keen": 0.4,
    "terrible": -1.0, "awful": -0.9, "dire": -0.6, "direful": -0.1, "dread": -0.2,
    "dreaded": -0.4, "dreadful": -0.8, "fearful": -0.5,
    "good": 0.6, "fun": 0.5, "lovely": 0.7, "charming": 0.6, "solid": 0.3,
    "bad": -0.6, "boring": -0.5, "dull": -0.4, "slow": -0.3, "cold": -0.3, "broken": -0.7,
}

DATASET = [
    ("the pasta was great", 1),
    ("battery life is great and the screen is lovely", 1),
    ("the plot was terrible", 0),
    ("service was terrible and slow", 0),
    ("a great cast wasted on a boring script", 0),
    ("the soundtrack is great but the pacing is slow", 1),
    ("terrible acting , but a fun ride", 1),
    ("the food was awful", 0),
    ("an outstanding debut", 1),
    ("charming and good", 1),
    ("dull , cold and broken", 0),
    ("the room was dreadful", 0),
    ("a solid , lovely film", 1),
    ("the ending was great", 1),
    ("the sequel is terrible", 0),
    ("bad jokes and boring songs", 0),
    ("fun for the whole family", 1),
    ("a great performance in a dull movie", 0),
    ("the camera is terrible in low light", 0),
    ("good value and great support", 1),
    ("nothing works , terrible", 0),
    ("it was great fun", 1),
    ("slow but charming", 1),
    ("the service was dire", 0),
]

BASE_WORDS = ["the", "sentence", "was", "[MASK]"]

# Fill-mask proposals per replaceable word: (token, base score, tag).
PROPOSALS = {
    1: [("sentence", 0.40, "NN"), ("statement", 0.20, "NN"), ("review", 0.15, "NN"),
        ("movie", 0.10, "NN"), ("said", 0.05, "VBD"), ("##s", 0.03, "NN"), ("was", 0.02, "VBD")],
    2: [("was", 0.50, "VBD"), ("seemed", 0.20, "VBD"), ("felt", 0.10, "VBD"),
        ("is", 0.08, "VBZ"), ("sounds", 0.05, "VBZ"), ("the", 0.02, "DT")],
}

QUALITY = {"sentence|was": 1.0, "statement|was": 0.8, "review|was": 1.2, "movie|was": -0.5,
           "sentence|seemed": 0.6, "sentence|felt": 0.3}
LAYOUT_QUALITY = {"after": 1.0, "before": 0.7, "because": 0.9, "so": 0.5}
BIAS = {"after": 0.05, "before": -0.15, "because": 0.25, "so": -0.3}


def layout_render(layout, sentence, prompt):
    if layout == "after":
        return f"{sentence} . {prompt} ."
    if layout == "before":
        return f"{prompt} . {sentence} ."
    if layout == "because":
        return f"{prompt} because {sentence} ."
    return f"{sentence} so {prompt} ."


def jitter(*parts):
    h = hashlib.sha256("|".join(parts).encode()).digest()
    return (h[0] / 255.0 - 0.5) * 0.02


def word_like(tok):
    return bool(tok) and not tok.startswith("##") and all(c.isalnum() or c in "'-" for c in tok) and any(
        c.isalpha() for c in tok)


def paraphrase_words():
    """Each surviving single swap of the base prompt, as (noun, verb)."""
    out = [("sentence", "was")]
    for pos, props in PROPOSALS.items():
        tag = next(t for w, _, t in props if w == BASE_WORDS[pos])
        for w, _, t in props:
            if w == BASE_WORDS[pos] or not word_like(w) or t != tag:
                continue
            out.append((w, "was") if pos == 1 else ("sentence", w))
    return out


def prompts():
    for noun, verb in paraphrase_words():
        for layout in ("after", "before", "because", "so"):
            yield noun, verb, layout


def polarity(sentence):
    return sum(POLARITY.get(w, 0.0) for w in sentence.split())


def gap(noun, verb, layout, sentence):
    q = QUALITY[f"{noun}|{verb}"] * LAYOUT_QUALITY[layout]
    return round(q * polarity(sentence) + BIAS[layout], 6)


def probes(sentences):
    """(index, word position, found word, source mapping word)."""
    out = []
    for word, other in ((POS, NEG), (NEG, POS)):
        found = []
        for i, s in enumerate(sentences):
            toks = s.split()
            if other in toks:
                continue
            if word in toks:
                found.append((i, toks.index(word), word, word))
        if not found:
            syn = SYNONYMS[word][:6]
            for i, s in enumerate(sentences):
                toks = s.split()
                if other in toks or word in toks:
                    continue
                for j, t in enumerate(toks):
                    if t in syn:
                        found.append((i, j, t, word))
                        break
        out.extend(found[:100])
    return out


def perturbations(found, source):
    other = NEG if source == POS else POS
    same = [w for w in SYNONYMS[source][:7] if w != found][:6]
    return [(w, False) for w in same] + [(other, True)] + [(w, True) for w in SYNONYMS[other][:5]]


def replace_at(sentence, idx, word):
    toks = sentence.split()
    toks[idx] = word
    return " ".join(toks)


def main():
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    sentences = [s for s, _ in DATASET]

    fill = {}
    for s in sentences:
        for pos, props in PROPOSALS.items():
            words = list(BASE_WORDS)
            words[pos] = "[MASK]"
            words[3] = POS
            ctx = f"{s} . {' '.join(words)} ."
            fill[ctx] = [[w, round(sc + jitter(s, w), 6), t] for w, sc, t in props]

    texts = set(sentences)
    for i, idx, found, source in probes(sentences):
        for w, _ in perturbations(found, source):
            texts.add(replace_at(sentences[i], idx, w))

    logits = {}
    expected = {}
    cases = probes(sentences)
    for noun, verb, layout in prompts():
        words = f"the {noun} {verb} [MASK]"
        for t in sorted(texts):
            logits[layout_render(layout, t, words)] = {POS: gap(noun, verb, layout, t), NEG: 0.0}
        score = 0
        for i, idx, found, source in cases:
            l1 = gap(noun, verb, layout, sentences[i]) >= 0
            for w, flip in perturbations(found, source):
                l = gap(noun, verb, layout, replace_at(sentences[i], idx, w)) >= 0
                score += (l != l1) if flip else (l == l1)
        expected[layout_render(layout, "<sentence>", words)] = score

    max_score = sum(len(perturbations(f, s)) for _, _, f, s in cases)
    (out / "fixture.json").write_text(
        json.dumps({"info": {"mask_marker": "[MASK]", "cased": False, "model_name": "toy-mlm"},
                    "fill_mask": fill, "mask_logits": logits}, sort_keys=True, indent=0) + "\n")
    (out / "dataset.tsv").write_text("".join(f"{s}\t{l}\n" for s, l in DATASET))
    (out / "lexicon.json").write_text(json.dumps({"version": 1, "entries": SYNONYMS}, indent=1) + "\n")
    (out / "expected_scores.json").write_text(
        json.dumps({"probe_count": len(cases), "max_score": max_score, "scores": expected},
                   indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
