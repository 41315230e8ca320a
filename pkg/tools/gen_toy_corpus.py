#!/usr/bin/env python3
"""Regenerate the bundled toy corpus (papers, labels, manifest).

The corpus is twelve small NLP papers, 2012-2018. P01..P11 carry review
labels and form the background; P12 is the held-out review target. Its
content is arranged so every downstream behavior has something to chew
on: concepts that merge by containment, a generic mention clustered with
an informative one, high-TF-IDF elements with matched-but-uncited
background papers, and elements that appear nowhere in the background.

Usage: python3 tools/gen_toy_corpus.py [OUTPUT_DIR]
(default output: src/reviewgen/data/toy relative to the repo root)
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

# surface concept -> entity type
CONCEPTS = {
    "machine translation": "task",
    "neural machine translation": "task",
    "named entity recognition": "task",
    "sentiment analysis": "task",
    "question answering": "task",
    "text summarization": "task",
    "syntactic parsing": "task",
    "neural network": "method",
    "recurrent neural network": "method",
    "convolutional neural network": "method",
    "conditional random field": "method",
    "attention mechanism": "method",
    "transformer encoder": "method",
    "beam search": "method",
    "graph encoder": "method",
    "long short-term memory": "method",
    "dual decoder fusion": "method",
    "BLEU score": "evaluation_metric",
    "F1 score": "evaluation_metric",
    "ROUGE score": "evaluation_metric",
    "accuracy": "evaluation_metric",
    "WMT corpus": "material",
    "Penn Treebank": "material",
    "movie review corpus": "material",
    "trivia question corpus": "material",
    "word embeddings": "other_scientific_term",
    "dropout": "other_scientific_term",
    "cross-lingual pivot loss": "other_scientific_term",
    "this model": "generic",
    "this method": "generic",
}


@dataclass
class Ent:
    """One entity mention inside a sentence spec."""

    concept: str
    surface: str | None = None
    cluster: str | None = None  # cluster with another concept's mentions

    @property
    def words(self) -> list[str]:
        return (self.surface or self.concept).split()

    @property
    def group(self) -> str:
        return self.cluster or self.concept


class PaperBuilder:
    def __init__(
        self,
        paper_id: str,
        title: str,
        year: int,
        venue: str,
        citations: list[str],
    ):
        self.paper_id = paper_id
        self.title = title
        self.year = year
        self.venue = venue
        self.citations = citations
        self.sections: dict[str, list[list[str]]] = {}
        self.mentions: list[dict] = []
        self.groups: dict[str, list[int]] = {}
        self.relations: list[dict] = []

    def sent(self, section: str, *parts: str | Ent) -> list[int]:
        """Add one sentence; returns the ids of the mentions it contains."""
        sentences = self.sections.setdefault(section, [])
        sentence_index = len(sentences)
        tokens: list[str] = []
        ids: list[int] = []
        for part in parts:
            if isinstance(part, Ent):
                start = len(tokens)
                tokens.extend(part.words)
                mention_id = len(self.mentions)
                self.mentions.append(
                    {
                        "id": mention_id,
                        "section": section,
                        "sentence": sentence_index,
                        "span": [start, start + len(part.words)],
                        "type": CONCEPTS[part.concept],
                    }
                )
                self.groups.setdefault(part.group, []).append(mention_id)
                ids.append(mention_id)
            else:
                tokens.extend(part.split())
        sentences.append(tokens)
        return ids

    def rel(self, head: int, tail: int, rtype: str) -> None:
        m = self.mentions[head]
        self.relations.append(
            {
                "head_id": head,
                "tail_id": tail,
                "type": rtype,
                "section": m["section"],
                "sentence": m["sentence"],
            }
        )

    def document(self) -> dict:
        clusters = sorted(
            (ids for ids in self.groups.values() if len(ids) >= 2),
            key=lambda ids: ids[0],
        )
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "year": self.year,
            "venue": self.venue,
            "citations": self.citations,
            "sections": self.sections,
            "mentions": self.mentions,
            "clusters": clusters,
            "relations": self.relations,
        }


def build_papers() -> list[PaperBuilder]:
    papers = []

    b = PaperBuilder(
        "P01", "Beam Search Strategies for Statistical Translation",
        2012, "ACL", ["X90", "X91"],
    )
    mt, bs = b.sent(
        "abstract",
        "We study", Ent("machine translation"),
        "and show that careful", Ent("beam search"), "improves output quality .",
    )
    bleu, mt2 = b.sent(
        "abstract",
        "Our systems gain one", Ent("BLEU score"), "point on the standard",
        Ent("machine translation"), "benchmarks .",
    )
    (wmt,) = b.sent(
        "abstract",
        "All experiments run on the public", Ent("WMT corpus"), ".",
    )
    b.rel(bs, mt, "used_for")
    b.rel(bleu, mt2, "evaluate_for")
    (mt3,) = b.sent(
        "conclusion",
        "Search quality matters for", Ent("machine translation"),
        "more than model size .",
    )
    b.sent("body", "Details of the search grid follow .")
    papers.append(b)

    b = PaperBuilder(
        "P02", "Sequence Labeling for Entity Mentions",
        2013, "EMNLP", ["X90"],
    )
    ner, crf = b.sent(
        "abstract",
        "We address", Ent("named entity recognition"), "with a",
        Ent("conditional random field"), "over word features .",
    )
    f1, ner2 = b.sent(
        "abstract",
        "The tagger reaches a strong", Ent("F1 score"), "for",
        Ent("named entity recognition"), "on news text .",
    )
    b.rel(crf, ner, "used_for")
    b.rel(f1, ner2, "evaluate_for")
    (crf2,) = b.sent(
        "conclusion",
        "A plain", Ent("conditional random field"),
        "remains a strong baseline .",
    )
    b.sent("body", "Feature templates are listed below .")
    papers.append(b)

    b = PaperBuilder(
        "P03", "Structured Prediction for Constituent Trees",
        2013, "NAACL", ["X91"],
    )
    par, crf = b.sent(
        "abstract",
        "We revisit", Ent("syntactic parsing"), "with a",
        Ent("conditional random field"), "over spans .",
    )
    (ptb,) = b.sent(
        "abstract",
        "Experiments use the", Ent("Penn Treebank"), "as training data .",
    )
    b.rel(crf, par, "used_for")
    (par2,) = b.sent(
        "conclusion",
        "Span features carry most of the signal for", Ent("syntactic parsing"), ".",
    )
    papers.append(b)

    b = PaperBuilder(
        "P04", "Convolutional Features for Opinion Mining",
        2014, "ACL", ["X92"],
    )
    sa, cnn = b.sent(
        "abstract",
        "We tackle", Ent("sentiment analysis"), "with a",
        Ent("convolutional neural network"), "over word windows .",
    )
    acc, sa2, _ = b.sent(
        "abstract",
        "The model improves", Ent("accuracy"), "for",
        Ent("sentiment analysis"), "on the", Ent("movie review corpus"), ".",
    )
    b.rel(cnn, sa, "used_for")
    b.rel(acc, sa2, "evaluate_for")
    (cnn2,) = b.sent(
        "conclusion",
        "A small", Ent("convolutional neural network"),
        "already captures local sentiment cues .",
    )
    papers.append(b)

    b = PaperBuilder(
        "P05", "Attentive Recurrent Models for Translation",
        2014, "EMNLP", ["P01", "X92"],
    )
    rnn, mt = b.sent(
        "abstract",
        "We train a", Ent("recurrent neural network"), "for",
        Ent("machine translation"), "with soft alignment .",
    )
    att, mt2 = b.sent(
        "abstract",
        "An", Ent("attention mechanism"), "lets", Ent("machine translation"),
        "models focus on relevant source words .",
    )
    bleu, wmt = b.sent(
        "abstract",
        "We report", Ent("BLEU score"), "gains on the", Ent("WMT corpus"), ".",
    )
    b.rel(rnn, mt, "used_for")
    b.rel(att, mt2, "used_for")
    b.rel(bleu, mt2, "evaluate_for")
    att2, mt3 = b.sent(
        "conclusion",
        "The", Ent("attention mechanism"), "is the main driver of quality in",
        Ent("machine translation"), ".",
    )
    b.sent("body", "Training ran for five days on eight GPUs .")
    papers.append(b)

    b = PaperBuilder(
        "P06", "Memory Networks for Factoid Questions",
        2015, "NeurIPS", ["X93"],
    )
    qa, lstm = b.sent(
        "abstract",
        "We approach", Ent("question answering"), "with a",
        Ent("long short-term memory"), "reader .",
    )
    (tqc,) = b.sent(
        "abstract",
        "Evaluation uses a new", Ent("trivia question corpus"),
        "of one hundred thousand pairs .",
    )
    b.rel(lstm, qa, "used_for")
    (qa2,) = b.sent(
        "conclusion",
        "Gated readers are effective for", Ent("question answering"), ".",
    )
    papers.append(b)

    b = PaperBuilder(
        "P07", "Abstractive Compression with Recurrent Decoders",
        2015, "ICML", ["P05"],
    )
    ts, rnn = b.sent(
        "abstract",
        "We generate summaries for", Ent("text summarization"), "with a",
        Ent("recurrent neural network"), "decoder .",
    )
    rouge, ts2 = b.sent(
        "abstract",
        "The", Ent("ROUGE score"), "of", Ent("text summarization"),
        "output improves over extractive baselines .",
    )
    b.rel(rnn, ts, "used_for")
    b.rel(rouge, ts2, "evaluate_for")
    papers.append(b)

    b = PaperBuilder(
        "P08", "Self-Attentive Encoders for Translation",
        2016, "ACL", ["P05", "P01"],
    )
    nmt, att = b.sent(
        "abstract",
        Ent("neural machine translation", surface="Neural machine translation"),
        "improves when the", Ent("attention mechanism"),
        "replaces recurrence entirely .",
    )
    te, nmt2 = b.sent(
        "abstract",
        "Our", Ent("transformer encoder"), "speeds up",
        Ent("neural machine translation"), "training by a factor of four .",
    )
    bleu, nmt3 = b.sent(
        "abstract",
        "The", Ent("BLEU score"), "of", Ent("neural machine translation"),
        "systems rises by two points .",
    )
    b.rel(att, nmt, "used_for")
    b.rel(te, nmt2, "used_for")
    b.rel(bleu, nmt3, "evaluate_for")
    att2, mt = b.sent(
        "conclusion",
        "A pure", Ent("attention mechanism"), "suffices for",
        Ent("machine translation"), ".",
    )
    papers.append(b)

    b = PaperBuilder(
        "P09", "Character-Aware Taggers for Entity Mentions",
        2016, "EMNLP", ["P02"],
    )
    ner, lstm = b.sent(
        "abstract",
        "We improve", Ent("named entity recognition"), "with a",
        Ent("long short-term memory"), "tagger .",
    )
    we, lstm2 = b.sent(
        "abstract",
        "Pretrained", Ent("word embeddings"), "feed the",
        Ent("long short-term memory"), "at every step .",
    )
    f1, ner2 = b.sent(
        "abstract",
        "The", Ent("F1 score"), "for", Ent("named entity recognition"),
        "improves on four languages .",
    )
    b.rel(lstm, ner, "used_for")
    b.rel(we, lstm2, "feature_of")
    b.rel(f1, ner2, "evaluate_for")
    papers.append(b)

    b = PaperBuilder(
        "P10", "Graph Readers for Open-Domain Questions",
        2017, "ACL", ["P06"],
    )
    qa, ge = b.sent(
        "abstract",
        "We cast", Ent("question answering"), "as inference over a",
        Ent("graph encoder"), "of linked passages .",
    )
    acc, qa2 = b.sent(
        "abstract",
        Ent("accuracy", surface="Accuracy"), "on open-domain",
        Ent("question answering"), "improves by five points .",
    )
    b.rel(ge, qa, "used_for")
    b.rel(acc, qa2, "evaluate_for")
    (ge2,) = b.sent(
        "conclusion",
        "Passage graphs give the", Ent("graph encoder"),
        "a global view of the evidence .",
    )
    papers.append(b)

    b = PaperBuilder(
        "P11", "Regularized Classifiers for Opinion Polarity",
        2017, "EMNLP", ["P04"],
    )
    sa, nn = b.sent(
        "abstract",
        "We revisit", Ent("sentiment analysis"), "with a plain",
        Ent("neural network"), "and strong regularization .",
    )
    do, nn2 = b.sent(
        "abstract",
        "Heavy", Ent("dropout"), "makes the", Ent("neural network"),
        "robust to small training sets .",
    )
    acc, sa2 = b.sent(
        "abstract",
        "The", Ent("accuracy"), "of", Ent("sentiment analysis"),
        "matches far larger models .",
    )
    b.rel(nn, sa, "used_for")
    b.rel(do, nn2, "feature_of")
    b.rel(acc, sa2, "evaluate_for")
    papers.append(b)

    # P12: the held-out review target.
    b = PaperBuilder(
        "P12", "Dual Decoder Fusion for Low-Resource Translation",
        2018, "ACL", ["P05", "P02", "X99"],
    )
    nmt, ddf = b.sent(
        "abstract",
        Ent("neural machine translation", surface="Neural machine translation"),
        "struggles with low-resource pairs , so we propose",
        Ent("dual decoder fusion"), "to share signal across directions .",
    )
    tm, te = b.sent(
        "abstract",
        Ent("this model", cluster="dual decoder fusion"),
        "outperforms a strong", Ent("transformer encoder"), "baseline .",
    )
    att, nmt2 = b.sent(
        "abstract",
        "A shared", Ent("attention mechanism"), "aligns both decoders , and the",
        Ent("neural machine translation", surface="machine translation"),
        "quality improves in both directions .",
    )
    att2, clpl = b.sent(
        "abstract",
        "The", Ent("attention mechanism"), "is trained jointly with a",
        Ent("cross-lingual pivot loss"), "on unpaired text .",
    )
    bleu, wmt = b.sent(
        "abstract",
        "We report consistent", Ent("BLEU score"), "gains on the",
        Ent("WMT corpus"), "in four language pairs .",
    )
    b.rel(ddf, nmt, "used_for")
    b.rel(ddf, te, "compare")
    b.rel(att, nmt2, "used_for")
    b.rel(bleu, nmt, "evaluate_for")
    clpl2, ddf2 = b.sent(
        "conclusion",
        "The", Ent("cross-lingual pivot loss"), "is what makes",
        Ent("dual decoder fusion"), "work with little parallel data .",
    )
    att3, nmt3 = b.sent(
        "conclusion",
        "A single shared", Ent("attention mechanism"),
        "is enough for bidirectional",
        Ent("neural machine translation"), ".",
    )
    b.rel(clpl2, ddf2, "used_for")
    crf, ner = b.sent(
        "related_work",
        "Earlier sequence models used a", Ent("conditional random field"),
        "for tasks such as", Ent("named entity recognition"), ".",
    )
    (rnn,) = b.sent(
        "related_work",
        "Later systems switched to", Ent("recurrent neural network"),
        "encoders with soft alignment .",
    )
    b.rel(crf, ner, "used_for")
    b.sent("body", "Full hyperparameters are given in the appendix .")
    papers.append(b)

    return papers


LABELS = [
    {
        "paper_id": "P01",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 4, "novelty": 2,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 3, "overall_recommendation": 3,
            },
            {
                "appropriateness": 5, "clarity": 3, "novelty": 2,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 2, "overall_recommendation": 3,
            },
        ],
    },
    {
        "paper_id": "P02",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 4, "novelty": 3,
                "soundness": 4, "meaningful_comparison": 4,
                "potential_impact": 3, "overall_recommendation": 4,
            },
            {
                "appropriateness": 4, "clarity": 5, "novelty": 2,
                "soundness": 5, "meaningful_comparison": 4,
                "potential_impact": 3, "overall_recommendation": 4,
            },
        ],
    },
    {
        "paper_id": "P03",
        "reviews": [
            {
                "appropriateness": 3, "clarity": 3, "novelty": 2,
                "soundness": 3, "meaningful_comparison": 2,
                "potential_impact": 2, "overall_recommendation": 2,
            },
            {
                "appropriateness": 4, "clarity": 2, "novelty": 2,
                "soundness": 3, "meaningful_comparison": 3,
                "potential_impact": 2, "overall_recommendation": 3,
            },
            {
                "appropriateness": 3, "clarity": 3, "novelty": 1,
                "soundness": 4, "meaningful_comparison": 2,
                "potential_impact": 2, "overall_recommendation": 2,
            },
        ],
    },
    {
        "paper_id": "P04",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 4, "novelty": 3,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 4, "overall_recommendation": 4,
            },
            {
                "appropriateness": 5, "clarity": 4, "novelty": 3,
                "soundness": 3, "meaningful_comparison": 3,
                "potential_impact": 4, "overall_recommendation": 4,
            },
        ],
    },
    {
        "paper_id": "P05",
        "reviews": [
            {
                "appropriateness": 5, "clarity": 4, "novelty": 5,
                "soundness": 4, "meaningful_comparison": 4,
                "potential_impact": 5, "overall_recommendation": 5,
            },
            {
                "appropriateness": 5, "clarity": 5, "novelty": 4,
                "soundness": 5, "meaningful_comparison": 4,
                "potential_impact": 5, "overall_recommendation": 5,
            },
        ],
    },
    {
        "paper_id": "P06",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 3, "novelty": 4,
                "soundness": 3, "meaningful_comparison": 3,
                "potential_impact": 4, "overall_recommendation": 4,
            },
            {
                "appropriateness": 3, "clarity": 3, "novelty": 3,
                "soundness": 3, "meaningful_comparison": 2,
                "potential_impact": 3, "overall_recommendation": 3,
            },
        ],
    },
    {
        "paper_id": "P07",
        "reviews": [
            {
                "appropriateness": 3, "clarity": 4, "novelty": 3,
                "soundness": 3, "meaningful_comparison": 3,
                "potential_impact": 3, "overall_recommendation": 3,
            },
            {
                "appropriateness": 4, "clarity": 4, "novelty": 3,
                "soundness": 2, "meaningful_comparison": 3,
                "potential_impact": 3, "overall_recommendation": 3,
            },
        ],
    },
    {
        "paper_id": "P08",
        "reviews": [
            {
                "appropriateness": 5, "clarity": 5, "novelty": 5,
                "soundness": 4, "meaningful_comparison": 5,
                "potential_impact": 5, "overall_recommendation": 5,
            },
            {
                "appropriateness": 5, "clarity": 4, "novelty": 4,
                "soundness": 5, "meaningful_comparison": 4,
                "potential_impact": 5, "overall_recommendation": 5,
            },
        ],
    },
    {
        "paper_id": "P09",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 4, "novelty": 3,
                "soundness": 4, "meaningful_comparison": 4,
                "potential_impact": 3, "overall_recommendation": 4,
            },
            {
                "appropriateness": 4, "clarity": 3, "novelty": 3,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 3, "overall_recommendation": 3,
            },
        ],
    },
    {
        "paper_id": "P10",
        "reviews": [
            {
                "appropriateness": 4, "clarity": 4, "novelty": 4,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 4, "overall_recommendation": 4,
            },
            {
                "appropriateness": 5, "clarity": 4, "novelty": 4,
                "soundness": 3, "meaningful_comparison": 3,
                "potential_impact": 4, "overall_recommendation": 4,
            },
        ],
    },
    {
        "paper_id": "P11",
        "reviews": [
            {
                "appropriateness": 3, "clarity": 4, "novelty": 2,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 2, "overall_recommendation": 3,
            },
            {
                "appropriateness": 4, "clarity": 4, "novelty": 2,
                "soundness": 4, "meaningful_comparison": 3,
                "potential_impact": 3, "overall_recommendation": 3,
            },
        ],
    },
]


def main() -> int:
    default_out = Path(__file__).resolve().parent.parent / "src/reviewgen/data/toy"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else default_out
    papers_dir = out / "papers"
    papers_dir.mkdir(parents=True, exist_ok=True)

    manifest = {}
    for builder in build_papers():
        doc = builder.document()
        text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        (papers_dir / f"{builder.paper_id}.json").write_text(text, encoding="utf-8")
        manifest[builder.paper_id] = {
            "year": builder.year,
            "mentions": len(builder.mentions),
            "relations": len(builder.relations),
            "clusters": len(doc["clusters"]),
        }

    (out / "labels.json").write_text(
        json.dumps(LABELS, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(manifest)} papers, labels, and manifest to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
