#!/usr/bin/env python3
"""Reference BLEU values for the golden fixtures.

Tokenization is reimplemented here with a regex; scoring is delegated to
nltk's sentence_bleu when available, with a from-scratch fallback. The
printed values are frozen into tests/fixtures/bleu_golden.json.
"""
import json
import math
import re
import sys
from collections import Counter

TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*|[0-9]+(?:\.[0-9]+)?|\S")


def tokenize(s):
    return TOKEN.findall(s)


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu_fallback(cand, refs, max_n=4):
    c = len(cand)
    r = min((abs(len(x) - c), len(x)) for x in refs)[1]
    if c == 0:
        return 1.0 if r == 0 else 0.0
    logs = []
    for n in range(1, max_n + 1):
        cc = ngrams(cand, n)
        total = sum(cc.values())
        if total == 0:
            continue
        best = Counter()
        for ref in refs:
            for g, k in ngrams(ref, n).items():
                best[g] = max(best[g], k)
        m = sum(min(k, best[g]) for g, k in cc.items())
        if m == 0:
            if n == 1:
                return 0.0
            logs.append(math.log(1.0 / (total + 1)))
        else:
            logs.append(math.log(m / total))
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.exp(sum(logs) / len(logs))


CASES = [
    ("golden_partial", "Shape(AB)\nCollinear(ABC)", ["Shape(AB)\nCollinear(ABD)"]),
    ("identity", "Equal(LengthOfLine(AB),10)", ["Equal(LengthOfLine(AB),10)"]),
    ("two_refs", "Shape(AB,CD)\nShape(BC)",
     ["Shape(AB,BC)\nShape(DA)", "Shape(AB)\nShape(CD)"]),
    ("brevity", "Shape(AB)", ["Shape(AB)\nShape(BC)\nShape(CD)"]),
]


def main():
    out = {}
    for name, pred, refs in CASES:
        cand = tokenize(pred)
        rts = [tokenize(r) for r in refs]
        mine = bleu_fallback(cand, rts)
        entry = {"pred": pred, "refs": refs, "bleu": mine}
        try:
            from nltk.translate.bleu_score import sentence_bleu
            # Every case has candidate n-gram matches at all four orders, so
            # unsmoothed nltk must agree with the fallback.
            ref_val = sentence_bleu(rts, cand)
            if abs(ref_val - mine) > 1e-12:
                print(f"{name}: nltk {ref_val!r} != fallback {mine!r}", file=sys.stderr)
                return 1
            entry["bleu"] = ref_val
        except ImportError:
            pass
        out[name] = entry
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
