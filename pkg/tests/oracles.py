"""Independent brute-force oracles for the evaluation metrics.

These deliberately share no code with emoexplain.metrics: n-grams are
enumerated with plain dicts and loops so the two implementations can only
agree by computing the same quantity.
"""

from __future__ import annotations

import math


def ngram_list(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def count_into(table, grams):
    for gram in grams:
        table[gram] = table.get(gram, 0) + 1
    return table


def bleu_oracle(pairs, n):
    hyp_total_len = 0
    ref_total_len = 0
    matched = [0] * n
    possible = [0] * n
    for ref, hyp, _ in pairs:
        hyp_total_len += len(hyp)
        ref_total_len += len(ref)
        for order in range(1, n + 1):
            hyp_counts = count_into({}, ngram_list(hyp, order))
            ref_counts = count_into({}, ngram_list(ref, order))
            for gram, count in hyp_counts.items():
                matched[order - 1] += min(count, ref_counts.get(gram, 0))
                possible[order - 1] += count

    if hyp_total_len == 0:
        return 0.0
    log_sum = 0.0
    for order in range(n):
        if possible[order] == 0:
            continue
        if matched[order] == 0:
            return 0.0
        log_sum += math.log(matched[order] / possible[order]) / n
    if hyp_total_len > ref_total_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_total_len / hyp_total_len)
    return 100.0 * bp * math.exp(log_sum)


def rouge_oracle(pairs, n):
    precisions = []
    recalls = []
    f1s = []
    for ref, hyp, _ in pairs:
        hyp_counts = count_into({}, ngram_list(hyp, n))
        ref_counts = count_into({}, ngram_list(ref, n))
        overlap = sum(min(c, ref_counts.get(g, 0)) for g, c in hyp_counts.items())
        hyp_n = len(hyp) - n + 1 if len(hyp) >= n else 0
        ref_n = len(ref) - n + 1 if len(ref) >= n else 0
        p = overlap / hyp_n if hyp_n > 0 else 0.0
        r = overlap / ref_n if ref_n > 0 else 0.0
        f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
        precisions.append(p)
        recalls.append(r)
        f1s.append(f)
    k = len(pairs)
    return (100 * sum(precisions) / k, 100 * sum(recalls) / k, 100 * sum(f1s) / k)


def usr_oracle(hyps):
    seen = []
    for hyp in hyps:
        sentence = " ".join(hyp)
        if sentence not in seen:
            seen.append(sentence)
    return len(seen) / len(hyps)


def fmr_oracle(pairs):
    hits = 0
    for _, hyp, features in pairs:
        if any(feature in hyp for feature in features):
            hits += 1
    return hits / len(pairs)


def fcr_oracle(pairs):
    all_features = set()
    for _, _, features in pairs:
        all_features.update(features)
    mentioned = set()
    for feature in all_features:
        for _, hyp, _ in pairs:
            if feature in hyp:
                mentioned.add(feature)
                break
    return len(mentioned) / len(all_features)


def div_oracle(sets):
    total = 0
    pairs = 0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            total += len(set(sets[i]) & set(sets[j]))
            pairs += 1
    return total / pairs


def feature_sets_oracle(pairs):
    universe = set()
    for _, _, features in pairs:
        universe.update(features)
    return [set(f for f in universe if f in hyp) for _, hyp, _ in pairs]
