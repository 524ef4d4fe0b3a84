#!/usr/bin/env python3
"""Writes data/synthetic_corpus.jsonl: 20 users, 200 sentences, 40 of which
contain a risk-lexicon phrase. High-level users carry 4 such sentences each,
moderate users 2, low users none. Output is fully determined by the seed."""

import json
import random
import sys
from pathlib import Path

RISK = [
    "Some nights I just want to die.",
    "I attempted suicide last spring and nobody knew.",
    "I keep thinking about suicide when I am alone.",
    "Part of me wanted to die when she left.",
    "I don't want to live like this anymore.",
    "I have been thinking of suicide every single day.",
    "I want to end my life before the holidays.",
    "I looked up how to hang myself again.",
    "Sometimes I think I should kill myself.",
    "My suicide plan is written in a notebook.",
    "I considered suicide twice this year.",
    "The suicidal thoughts never really stop.",
    "I wrote down the means of suicide I could reach.",
    "I am considering suicide more seriously now.",
    "This pain is killing me slowly.",
    "I almost committed suicide in college.",
    "Every morning I wake up with thoughts of suicide.",
    "I have tried to shoot myself once before.",
    "My last suicide attempt put me in the hospital.",
    "I searched for ways of dying that would not hurt.",
    "Honestly I still want to die most days.",
    "I tried to commit suicide when I was sixteen.",
    "I keep picturing myself hanging in the garage.",
    "After the funeral I wanted to die too.",
    "I would rather end my life than go back there.",
    "The voices tell me to kill myself.",
    "I have been hanging myself in my dreams.",
    "I thought of suicide during the whole exam.",
    "I just want someone to kill me.",
    "I am thinking about suicide again tonight.",
    "Two suicide attempts and I am still here.",
    "I was attempting suicide when my brother found me.",
    "I really don't want to live through another winter.",
    "He said I should plan suicide carefully and I almost did.",
    "The suicide thoughts come back every night.",
    "I killed myself in every story I wrote last year.",
    "Sometimes I think about shooting myself.",
    "I want to die and nobody would notice.",
    "Counting pills is how I think about suicide now.",
    "I have thought about how I want to end my life.",
]

NEUTRAL_SUBJECTS = ["I", "My sister", "My roommate", "We", "My dad", "Our team", "My friend", "The neighbor"]
NEUTRAL_ACTIONS = [
    "cooked pasta for dinner",
    "watched a documentary about whales",
    "went for a long walk in the park",
    "fixed the leaking kitchen sink",
    "started a new diet",
    "painted the fence blue",
    "played chess for an hour",
    "read a book about old trains",
    "cleaned the garage",
    "planted tomatoes in the garden",
    "bought new running shoes",
    "called the bank about a card",
    "finished the history homework",
    "listened to an old album",
    "took the dog to the vet",
    "baked bread from scratch",
    "missed the morning bus",
    "drove to the coast",
    "felt sad and alone",
    "argued about money",
]
NEUTRAL_TIMES = ["today", "yesterday", "this weekend", "last night", "on Monday", "after work", "this morning", "again"]


def main(out_path: Path, seed: int) -> None:
    rng = random.Random(seed)
    combos = [(s, a, t) for s in NEUTRAL_SUBJECTS for a in NEUTRAL_ACTIONS for t in NEUTRAL_TIMES]
    rng.shuffle(combos)
    neutral = [f"{s} {a} {t}." for s, a, t in combos[:160]]

    levels = ["high"] * 7 + ["moderate"] * 6 + ["low"] * 7
    risk_per_level = {"high": 4, "moderate": 2, "low": 0}
    risk = list(RISK)
    rng.shuffle(risk)

    lines = []
    post_no = 0
    for u, level in enumerate(levels, start=1):
        k = risk_per_level[level]
        sentences = [risk.pop() for _ in range(k)] + [neutral.pop() for _ in range(10 - k)]
        rng.shuffle(sentences)
        i = 0
        while i < len(sentences):
            size = min(rng.randint(2, 4), len(sentences) - i)
            post_no += 1
            lines.append(
                {
                    "user_id": f"u{u:02d}",
                    "post_id": f"p{post_no:03d}",
                    "text": " ".join(sentences[i : i + size]),
                    "timestamp": f"2023-01-{1 + post_no // 24:02d}T{post_no % 24:02d}:00:00Z",
                    "expert_level": level,
                }
            )
            i += size
    assert not risk and len(neutral) == 0
    with out_path.open("w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps(line, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "synthetic_corpus.jsonl"
    main(out, seed=7)
