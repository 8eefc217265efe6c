#!/usr/bin/env python3
"""Regenerates the bundled sample data under data/.

  sample_corpus.jsonl       200 pages: hand-written pages for the worked
                            examples plus generated filler pages
  sample_questions.jsonl    question pool for the sample corpus
  synthetic_sessions.jsonl  analysis fixture: 25 paths x 4 queries
  synthetic_questions.jsonl questions for the analysis fixture

Output is deterministic (fixed seed).
"""
import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"

HAND_PAGES = [
    {
        "page_id": "Millennium_73",
        "title": "Millennium '73",
        "paragraphs": [
            "Millennium '73 was a festival held at the Houston Astrodome in November 1973.",
            "It featured Prem Rawat, then known as Guru Maharaj Ji, a 15-year-old guru and the leader "
            "of a fast-growing new religious movement.",
            "Organizers predicted that the Astrodome would levitate during the event.",
        ],
        "links": [["Prem Rawat", "Prem_Rawat"], ["Astrodome", "Astrodome"]],
    },
    {
        "page_id": "Prem_Rawat",
        "title": "Prem Rawat",
        "paragraphs": [
            "Prem Pal Singh Rawat is the youngest son of Hans Ram Singh Rawat, an Indian guru.",
            "He became a spiritual teacher at the age of eight and later moved to the United States.",
        ],
        "links": [["Millennium '73", "Millennium_73"], ["India", "India"]],
    },
    {
        "page_id": "India",
        "title": "India",
        "paragraphs": [
            "India is a country in South Asia and the most populous democracy in the world.",
            "New Delhi is the capital of India.",
        ],
        "links": [],
    },
    {
        "page_id": "Astrodome",
        "title": "Astrodome",
        "paragraphs": ["The Astrodome is a domed stadium in Houston, Texas, opened in 1965."],
        "links": [["Houston", "Houston"]],
    },
    {
        "page_id": "Serbia",
        "title": "Serbia",
        "paragraphs": [
            "Serbia is a landlocked country in the central Balkans.",
            "In 1804 the renegade Janissaries known as the dahije massacred the Serbian elite, "
            "the knez, which started the First Serbian Uprising.",
        ],
        "links": [["Dahije", "Dahije"]],
    },
    {
        "page_id": "Dahije",
        "title": "Dahije",
        "paragraphs": [
            "The Dahije were renegade Janissary officers who seized power in the Sanjak of Smederevo "
            "in Serbia in 1801.",
        ],
        "links": [["Serbia", "Serbia"]],
    },
    {
        "page_id": "Knez",
        "title": "Knez",
        "paragraphs": [
            "Knez is a Slavic title for a local chieftain; the Russian form is knyaz.",
            "A knyaz ruled a principality in medieval Eastern Europe.",
        ],
        "links": [["Knyaz", "Knyaz"]],
    },
    {
        "page_id": "Knyaz",
        "title": "Knyaz",
        "paragraphs": ["Knyaz is a historical Slavic title usually translated as prince or duke."],
        "links": [],
    },
    {
        "page_id": "Germanium",
        "title": "Germanium",
        "paragraphs": [
            "Germanium is a chemical element that was discovered in 1886 by Clemens Winkler.",
            "Germanium dioxide is used in glass with a high index of refraction and in infrared optics.",
        ],
        "links": [["Clemens Winkler", "Clemens_Winkler"]],
    },
    {
        "page_id": "Copper",
        "title": "Copper",
        "paragraphs": [
            "Copper is a chemical element with symbol Cu.",
            "Bisoxazoline complexes of copper catalyze enantioselective Diels-Alder reactions, "
            "as developed by Evans and coworkers.",
        ],
        "links": [],
    },
    {
        "page_id": "Pentagon_Papers",
        "title": "Pentagon Papers",
        "paragraphs": [
            "The Pentagon Papers were a classified history of United States involvement in Vietnam.",
            "The Supreme Court held that the heavy presumption against prior restraint was not overcome.",
        ],
        "links": [],
    },
    {
        "page_id": "Frank_Capra",
        "title": "Frank Capra",
        "paragraphs": [
            "Frank Capra was an American film director known for It's a Wonderful Life.",
            "His film A Hole in the Head introduced the song High Hopes, and State of the Union follows "
            "the presidential campaign of Grant Matthews.",
        ],
        "links": [],
    },
    {
        "page_id": "Getulio_Vargas",
        "title": "Getúlio Vargas",
        "paragraphs": [
            "Getúlio Vargas lost the presidential election in 1930 and later that year seized power "
            "at the head of an army-backed coup in Brazil.",
        ],
        "links": [["Brazil", "Brazil"]],
    },
]

SYLLABLES = ["ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pa", "qu", "da", "fe", "go", "hi", "ju"]
FILLER = ["the", "of", "and", "in", "a", "is", "was", "to", "by", "for", "with", "from", "its", "on"]


def make_vocabulary(rng, n):
    vocab = set()
    while len(vocab) < n:
        vocab.add("".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4))))
    return sorted(vocab)


def zipf_word(rng, vocab):
    # Rank r drawn with probability proportional to 1 / (r + 1).
    weights = [1.0 / (r + 1) for r in range(len(vocab))]
    return rng.choices(vocab, weights=weights, k=1)[0]


def sentence(rng, vocab, n_words):
    words = []
    for _ in range(n_words):
        words.append(rng.choice(FILLER) if rng.random() < 0.3 else zipf_word(rng, vocab))
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def generated_pages(rng, count):
    vocab = make_vocabulary(rng, 600)
    pages = []
    for i in range(count):
        title_word = vocab[(i * 7) % len(vocab)]
        page_id = f"Gen_{i:03d}"
        paras = []
        for _ in range(rng.randint(1, 4)):
            paras.append(" ".join(sentence(rng, vocab, rng.randint(6, 18)) for _ in range(rng.randint(1, 3))))
        links = [[f"see {j}", f"Gen_{j:03d}"] for j in rng.sample(range(count), 2)]
        if i % 50 == 0:
            links.append(["missing", "No_Such_Page"])
        pages.append({"page_id": page_id, "title": title_word.capitalize(), "paragraphs": paras, "links": links})
    return pages


QUESTIONS = [
    {
        "question_id": "qb_millennium",
        "source": "qb",
        "clues": [
            "A 15-year-old religious leader originally from this country spoke at a highly anticipated event "
            "at which it was predicted that the Astrodome would levitate; that event was Millennium '73.",
            "This country's capital is New Delhi.",
        ],
        "answer": "India",
        "aliases": ["Republic of India"],
    },
    {
        "question_id": "qb_serbia",
        "source": "qb",
        "clues": [
            "This modern-day country was once ruled by renegade Janissaries known as dahije, who massacred "
            "this country's elite, known as knez, in 1804.",
            "Its First Uprising was led by Karadjordje.",
            "Its capital is Belgrade.",
        ],
        "answer": "Serbia",
        "aliases": [],
    },
    {
        "question_id": "qb_capra",
        "source": "qb",
        "clues": [
            "One of this director's films introduced the cheery song High Hopes, while another describes the "
            "presidential campaign of Grant Matthews.",
            "He directed It Happened One Night.",
            "He directed It's a Wonderful Life.",
            "He was born in Sicily.",
            "Name this director.",
        ],
        "answer": "Frank Capra",
        "aliases": ["Capra"],
    },
    {
        "question_id": "hp_vargas",
        "source": "hotpot",
        "clues": [
            "He lost the presidential election in 1930, which was not good enough for him as later that year "
            "he seized power at the head of an army-backed coup.",
        ],
        "answer": "Getúlio Vargas",
        "aliases": ["Vargas"],
    },
    {
        "question_id": "qb_germanium",
        "source": "qb",
        "clues": [
            "Discovered in 1886 by Clemens Winkler, this element is used in glass in infrared optical devices.",
            "Its dioxide is used to produce glass with a high index of refraction.",
        ],
        "answer": "Germanium",
        "aliases": [],
    },
]


def synthetic_sessions():
    """25 paths x 4 queries with token lengths 1, 2, 3, 4.

    Known statistics: mean query length 2.5, population std sqrt(1.25),
    87 of 100 queries sparse, every query contains a question word.
    """
    words = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"]
    questions, paths = [], []
    query_no = 0
    for p in range(25):
        qid = f"syn_{p:02d}"
        text = " ".join(words) + f" item {p}"
        source = "qb" if p % 5 else "hotpot"
        questions.append({"question_id": qid, "source": source, "clues": [text], "answer": f"answer {p}",
                          "aliases": []})
        queries = []
        for length in (1, 2, 3, 4):
            queries.append({"text": " ".join(words[(p + i) % len(words)] for i in range(length)),
                            "engine": "sparse" if query_no < 87 else "dense",
                            "origin": "typed", "t_ms": 1000 * (length + 1)})
            query_no += 1
        paths.append({"v": 1, "question_id": qid, "question_text": text, "queries": queries,
                      "evidence_sets": [[] for _ in queries], "answer": f"answer {p}" if p % 2 else "wrong",
                      "correct": bool(p % 2)})
    return questions, paths


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    rng = random.Random(20201)
    DATA.mkdir(exist_ok=True)
    pages = HAND_PAGES + generated_pages(rng, 200 - len(HAND_PAGES))
    write_jsonl(DATA / "sample_corpus.jsonl", pages)
    write_jsonl(DATA / "sample_questions.jsonl", QUESTIONS)
    questions, paths = synthetic_sessions()
    write_jsonl(DATA / "synthetic_questions.jsonl", questions)
    write_jsonl(DATA / "synthetic_sessions.jsonl", paths)


if __name__ == "__main__":
    main()
