"""Greedy explanation generation from trained parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .corpus import BOS, EOS, PAD, EncodedExample, Vocabulary, tokenize
from .lexicon import Lexicon, category_index
from .model import (
    ModelConfig,
    ModelParams,
    decode,
    emotion_input_matrix,
    encode_context,
    encode_emotion_from_matrix,
    fuse,
)


@dataclass(frozen=True)
class GenerationQuery:
    user: str
    item: str
    features: tuple[str, ...]
    emotion: str
    max_tokens: int = 20

    def __post_init__(self):
        if not self.features:
            raise ValueError("a generation query needs at least one feature")


@dataclass(frozen=True)
class GeneratedText:
    tokens: tuple[str, ...] | None
    error: str | None = None


def generate(
    params: ModelParams, config: ModelConfig, vocab: Vocabulary, lex: Lexicon,
    query: GenerationQuery,
) -> list[str]:
    """Argmax decoding from the [user, item, features, tag, <bos>] prefix.

    Stops at <eos>, ``max_tokens`` words, or the model's length budget.  <pad>
    and <bos> are excluded from the argmax, and ties resolve to the lowest
    token id, so the output is a pure function of (params, query).
    """
    if query.user not in vocab.user_to_id:
        raise ValueError(f"unknown user {query.user!r}")
    if query.item not in vocab.item_to_id:
        raise ValueError(f"unknown item {query.item!r}")
    tag_index = category_index(query.emotion)

    feature_ids = [vocab.token_id(tok) for feat in query.features for tok in tokenize(feat)]
    prefix = [
        vocab.user_to_id[query.user],
        vocab.item_to_id[query.item],
        *feature_ids,
        vocab.emotion_token_id(query.emotion),
    ]
    prefix_len = len(prefix)
    if prefix_len + 2 > config.max_len:
        raise ValueError(f"prefix of {prefix_len} leaves no generation room within max_len {config.max_len}")

    generated: list[int] = []
    with nm.no_grad():
        while len(generated) < query.max_tokens and prefix_len + 1 + len(generated) < config.max_len:
            ids = prefix + [BOS] + generated
            ids.extend([PAD] * (config.max_len - len(ids)))
            example = EncodedExample(
                context_ids=tuple(ids),
                emotion_target=tag_index,
                prefix_len=prefix_len,
                text_len=len(generated),
            )
            vnrc = emotion_input_matrix(example, vocab, lex, config.mask_emotion_tag)
            hidden_emo = encode_emotion_from_matrix(vnrc, params, config)
            hidden_context = encode_context(example, params, config)
            final = decode(fuse(hidden_emo, hidden_context, config.intensity), params, config)
            last = prefix_len + len(generated)
            logits = nm.slice_rows(final, last, last + 1).data @ params.token_embedding.data.T
            scores = logits[0].copy()
            scores[PAD] = -np.inf
            scores[BOS] = -np.inf
            next_id = int(np.argmax(scores))
            if next_id == EOS:
                break
            generated.append(next_id)
    return [vocab.id_to_token[i] for i in generated]


def batch_generate(
    params: ModelParams, config: ModelConfig, vocab: Vocabulary, lex: Lexicon,
    queries: list[GenerationQuery],
) -> list[GeneratedText]:
    """Elementwise ``generate``; per-query failures are collected, not raised."""
    results = []
    for query in queries:
        try:
            results.append(GeneratedText(tokens=tuple(generate(params, config, vocab, lex, query))))
        except ValueError as err:
            results.append(GeneratedText(tokens=None, error=str(err)))
    return results
