"""Two-encoder, two-head transformer for emotion-aware explanation generation.

One encoder reads per-position emotion intensity vectors mapped through a
small MLP; the other reads token/user/item embeddings.  Their states are fused
as ``intensity * emotion + context``, decoded by a causal transformer, and
projected by an emotion-classification head and a language-modeling head that
is weight-tied to the token embedding table.  All attention (both encoders and
the decoder) is causal so the next-token factorization stays valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .corpus import UNK, EncodedExample, Vocabulary
from .lexicon import Lexicon, NEUTRAL_VECTOR, word_emotion
from .numerics import Parameter, Tensor

EMOTION_MLP_HIDDEN = 64
N_EMOTIONS = 6
N_SPECIAL = 10


@dataclass(frozen=True)
class ModelConfig:
    n_tokens: int
    n_users: int
    n_items: int
    max_len: int = 32
    embed_dim: int = 512
    ffn_dim: int = 2048
    encoder_layers: int = 2
    decoder_layers: int = 2
    attention_heads: int = 2
    intensity: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    # Hides the emotion tag from both encoders (context sees <unk>, emotion
    # sees neutral) so the classification head cannot just copy its input.
    # Experiment knob, off by default.
    mask_emotion_tag: bool = False

    def __post_init__(self):
        if self.embed_dim % self.attention_heads:
            raise ValueError(f"embed_dim {self.embed_dim} not divisible by {self.attention_heads} heads")
        if self.intensity < 0 or self.c1 < 0 or self.c2 < 0:
            raise ValueError("intensity, c1 and c2 must be non-negative")


def config_for_vocab(vocab: Vocabulary, **overrides) -> ModelConfig:
    return ModelConfig(
        n_tokens=vocab.n_tokens,
        n_users=len(vocab.id_to_user),
        n_items=len(vocab.id_to_item),
        **overrides,
    )


@dataclass
class LayerParams:
    # Q/K/V projections carry no bias: a key bias cancels inside the row
    # softmax, leaving a parameter with an exactly-zero gradient that finite
    # differences can only see as noise.
    wq: Parameter
    wk: Parameter
    wv: Parameter
    wo: Parameter
    bo: Parameter
    ln1_gamma: Parameter
    ln1_beta: Parameter
    ffn_w1: Parameter
    ffn_b1: Parameter
    ffn_w2: Parameter
    ffn_b2: Parameter
    ln2_gamma: Parameter
    ln2_beta: Parameter

    def all(self) -> list[Parameter]:
        return [
            self.wq, self.wk, self.wv, self.wo, self.bo,
            self.ln1_gamma, self.ln1_beta,
            self.ffn_w1, self.ffn_b1, self.ffn_w2, self.ffn_b2,
            self.ln2_gamma, self.ln2_beta,
        ]


def _glorot(rng, fan_in, fan_out, name):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Parameter(rng.uniform(-limit, limit, size=(fan_in, fan_out)), name)


def _zeros(shape, name):
    return Parameter(np.zeros(shape), name)


def _layer(rng, prefix: str, d: int, ffn: int) -> LayerParams:
    return LayerParams(
        wq=_glorot(rng, d, d, f"{prefix}.attn.wq"),
        wk=_glorot(rng, d, d, f"{prefix}.attn.wk"),
        wv=_glorot(rng, d, d, f"{prefix}.attn.wv"),
        wo=_glorot(rng, d, d, f"{prefix}.attn.wo"),
        bo=_zeros(d, f"{prefix}.attn.bo"),
        ln1_gamma=Parameter(np.ones(d), f"{prefix}.ln1.gamma"),
        ln1_beta=_zeros(d, f"{prefix}.ln1.beta"),
        ffn_w1=_glorot(rng, d, ffn, f"{prefix}.ffn.w1"),
        ffn_b1=_zeros(ffn, f"{prefix}.ffn.b1"),
        ffn_w2=_glorot(rng, ffn, d, f"{prefix}.ffn.w2"),
        ffn_b2=_zeros(d, f"{prefix}.ffn.b2"),
        ln2_gamma=Parameter(np.ones(d), f"{prefix}.ln2.gamma"),
        ln2_beta=_zeros(d, f"{prefix}.ln2.beta"),
    )


class ModelParams:
    """All learned weights. ``token_embedding`` doubles as the LM output matrix."""

    def __init__(self, config: ModelConfig, seed: int):
        d = config.embed_dim
        rng = np.random.default_rng(seed)
        self.token_embedding = Parameter(
            rng.uniform(-0.1, 0.1, size=(config.n_tokens, d)), "token_embedding")
        self.user_embedding = Parameter(
            rng.uniform(-0.1, 0.1, size=(config.n_users, d)), "user_embedding")
        self.item_embedding = Parameter(
            rng.uniform(-0.1, 0.1, size=(config.n_items, d)), "item_embedding")
        self.positional = Parameter(
            rng.uniform(-0.1, 0.1, size=(config.max_len, d)), "positional")
        self.emo_w1 = _glorot(rng, N_EMOTIONS, EMOTION_MLP_HIDDEN, "emotion_mlp.w1")
        self.emo_b1 = _zeros(EMOTION_MLP_HIDDEN, "emotion_mlp.b1")
        self.emo_w2 = _glorot(rng, EMOTION_MLP_HIDDEN, d, "emotion_mlp.w2")
        self.emo_b2 = _zeros(d, "emotion_mlp.b2")
        self.emotion_encoder = [
            _layer(rng, f"emotion_encoder.{i}", d, config.ffn_dim) for i in range(config.encoder_layers)]
        self.context_encoder = [
            _layer(rng, f"context_encoder.{i}", d, config.ffn_dim) for i in range(config.encoder_layers)]
        self.decoder = [
            _layer(rng, f"decoder.{i}", d, config.ffn_dim) for i in range(config.decoder_layers)]
        self.emotion_head_weight = _glorot(rng, d, N_EMOTIONS, "emotion_head")

    def all(self) -> list[Parameter]:
        out = [
            self.token_embedding, self.user_embedding, self.item_embedding, self.positional,
            self.emo_w1, self.emo_b1, self.emo_w2, self.emo_b2,
        ]
        for block in (self.emotion_encoder, self.context_encoder, self.decoder):
            for layer in block:
                out.extend(layer.all())
        out.append(self.emotion_head_weight)
        return out

    def snapshot(self) -> list[np.ndarray]:
        return [p.data.copy() for p in self.all()]

    def restore(self, arrays: list[np.ndarray]) -> None:
        for p, arr in zip(self.all(), arrays, strict=True):
            p.data[...] = arr

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for p in self.all():
            if p.name not in state:
                raise ValueError(f"checkpoint is missing parameter {p.name!r}")
            if state[p.name].shape != p.data.shape:
                raise ValueError(
                    f"checkpoint shape {state[p.name].shape} for {p.name!r} does not match {p.data.shape}")
            p.data[...] = state[p.name]


@dataclass
class ForwardState:
    """Final-layer states and head logits for one example."""

    hidden_emo: Tensor
    hidden_context: Tensor
    hidden_merge: Tensor
    decoded: Tensor
    lm_logits: Tensor
    emotion_logits: Tensor


def _encoder_stack(x: Tensor, layers: list[LayerParams], n_heads: int) -> Tensor:
    for lp in layers:
        q = nm.matmul(x, lp.wq)
        k = nm.matmul(x, lp.wk)
        v = nm.matmul(x, lp.wv)
        att = nm.attention(q, k, v, n_heads)
        att = nm.add(nm.matmul(att, lp.wo), lp.bo)
        x = nm.layer_norm(nm.add(x, att), lp.ln1_gamma, lp.ln1_beta)
        h = nm.relu(nm.add(nm.matmul(x, lp.ffn_w1), lp.ffn_b1))
        h = nm.add(nm.matmul(h, lp.ffn_w2), lp.ffn_b2)
        x = nm.layer_norm(nm.add(x, h), lp.ln2_gamma, lp.ln2_beta)
    return x


def emotion_embed(params: ModelParams, intensities: Tensor) -> Tensor:
    """The emotion MLP g: rows of 6 intensities to rows of embed_dim."""
    if intensities.data.ndim == 1:
        intensities = Tensor(intensities.data.reshape(1, -1))
    h = nm.relu(nm.add(nm.matmul(intensities, params.emo_w1), params.emo_b1))
    return nm.add(nm.matmul(h, params.emo_w2), params.emo_b2)


def emotion_input_matrix(
    example: EncodedExample, vocab: Vocabulary, lex: Lexicon, mask_emotion_tag: bool = False
) -> np.ndarray:
    """Per-position 6-vector inputs for the emotion encoder.

    User, item and special-token positions are neutral; the tag position is the
    one-hot of the target category (neutral when masked); word positions carry
    their lexicon vector, so <unk> falls back to neutral.
    """
    rows = [NEUTRAL_VECTOR, NEUTRAL_VECTOR]
    for pos, token_id in enumerate(example.context_ids[2:], start=2):
        if pos == example.tag_position:
            if mask_emotion_tag:
                rows.append(NEUTRAL_VECTOR)
            else:
                one_hot = [0.0] * N_EMOTIONS
                one_hot[example.emotion_target] = 1.0
                rows.append(tuple(one_hot))
        elif token_id < N_SPECIAL:
            rows.append(NEUTRAL_VECTOR)
        else:
            rows.append(word_emotion(lex, vocab.id_to_token[token_id]))
    return np.array(rows, dtype=np.float64)


def encode_emotion(
    example: EncodedExample, params: ModelParams, config: ModelConfig,
    vocab: Vocabulary, lex: Lexicon,
) -> Tensor:
    vnrc = emotion_input_matrix(example, vocab, lex, config.mask_emotion_tag)
    return encode_emotion_from_matrix(vnrc, params, config)


def encode_emotion_from_matrix(vnrc: np.ndarray, params: ModelParams, config: ModelConfig) -> Tensor:
    if vnrc.shape != (config.max_len, N_EMOTIONS):
        raise ValueError(f"emotion input shape {vnrc.shape}, expected ({config.max_len}, {N_EMOTIONS})")
    x = nm.add(emotion_embed(params, Tensor(vnrc)), params.positional)
    return _encoder_stack(x, params.emotion_encoder, config.attention_heads)


def encode_context(example: EncodedExample, params: ModelParams, config: ModelConfig) -> Tensor:
    ids = list(example.context_ids)
    if len(ids) != config.max_len:
        raise ValueError(f"context length {len(ids)} does not match max_len {config.max_len}")
    if config.mask_emotion_tag:
        ids[example.tag_position] = UNK
    user_vec = nm.embedding(params.user_embedding, [ids[0]])
    item_vec = nm.embedding(params.item_embedding, [ids[1]])
    token_vecs = nm.embedding(params.token_embedding, ids[2:])
    x = nm.add(nm.concat([user_vec, item_vec, token_vecs], axis=0), params.positional)
    return _encoder_stack(x, params.context_encoder, config.attention_heads)


def fuse(hidden_emo: Tensor, hidden_context: Tensor, intensity: float) -> Tensor:
    if hidden_emo.data.shape != hidden_context.data.shape:
        raise ValueError(f"fuse shape mismatch: {hidden_emo.data.shape} vs {hidden_context.data.shape}")
    return nm.add(nm.scalar_mul(hidden_emo, intensity), hidden_context)


def decode(hidden_merge: Tensor, params: ModelParams, config: ModelConfig) -> Tensor:
    return _encoder_stack(hidden_merge, params.decoder, config.attention_heads)


def emotion_head(final_states: Tensor, example: EncodedExample, params: ModelParams):
    """(logits over the six categories, cross-entropy against the record tag)."""
    row = nm.slice_rows(final_states, example.tag_position, example.tag_position + 1)
    logits = nm.matmul(row, params.emotion_head_weight)
    loss = nm.cross_entropy(logits, [example.emotion_target])
    return logits, loss


def lm_head(final_states: Tensor, example: EncodedExample, params: ModelParams):
    """(next-token logits over supervised positions, mean cross-entropy).

    Supervision runs from the <bos> position through the last explanation
    token, i.e. targets e_1 .. e_E and then <eos>; pad positions never count.
    """
    states = nm.slice_rows(final_states, example.bos_position, example.eos_position)
    logits = nm.matmul(states, params.token_embedding, transpose_b=True)
    targets = list(example.context_ids[example.bos_position + 1: example.eos_position + 1])
    loss = nm.cross_entropy(logits, targets)
    return logits, loss


def forward(
    example: EncodedExample, params: ModelParams, config: ModelConfig, vnrc: np.ndarray
) -> ForwardState:
    hidden_emo = encode_emotion_from_matrix(vnrc, params, config)
    hidden_context = encode_context(example, params, config)
    hidden_merge = fuse(hidden_emo, hidden_context, config.intensity)
    decoded = decode(hidden_merge, params, config)
    lm_logits = nm.matmul(decoded, params.token_embedding, transpose_b=True)
    emo_row = nm.slice_rows(decoded, example.tag_position, example.tag_position + 1)
    emotion_logits = nm.matmul(emo_row, params.emotion_head_weight)
    return ForwardState(
        hidden_emo=hidden_emo,
        hidden_context=hidden_context,
        hidden_merge=hidden_merge,
        decoded=decoded,
        lm_logits=lm_logits,
        emotion_logits=emotion_logits,
    )


def total_loss(
    example: EncodedExample, params: ModelParams, config: ModelConfig, vnrc: np.ndarray
):
    """(c1 * L_lm + c2 * L_emo, L_lm, L_emo) for one example."""
    hidden_emo = encode_emotion_from_matrix(vnrc, params, config)
    hidden_context = encode_context(example, params, config)
    decoded = decode(fuse(hidden_emo, hidden_context, config.intensity), params, config)
    _, lm_loss = lm_head(decoded, example, params)
    _, emo_loss = emotion_head(decoded, example, params)
    combined = nm.add(nm.scalar_mul(lm_loss, config.c1), nm.scalar_mul(emo_loss, config.c2))
    return combined, lm_loss, emo_loss
