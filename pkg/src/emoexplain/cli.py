"""Command-line front end: prepare, train, generate, evaluate, audit, ablate, gradcheck.

Every command resolves its configuration as profile defaults < config file <
command-line flags, writes the resolved key=value config next to its outputs,
and is reproducible from that file alone.  Exit codes: 0 success, 2 usage or
invalid input, 3 numeric failure, 4 threshold failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import numerics as nm
from .corpus import (
    DatasetSplit,
    Record,
    Vocabulary,
    assign_emotion_tags,
    build_vocabulary,
    encode_example,
    load_records,
    save_records,
    split_dataset,
    tokenize,
)
from .fixtures import fixture_lexicon
from .generator import GenerationQuery, batch_generate
from .lexicon import CATEGORIES, Lexicon, load_lexicon
from .metrics import (
    EvaluationPair,
    audit_table,
    audit_to_dict,
    build_report,
    debiasing_score,
    emotion_audit,
    report_table,
    report_to_dict,
    verify_reference_debiasing,
)
from .model import ModelConfig, ModelParams, config_for_vocab, emotion_input_matrix, total_loss
from .trainer import TrainConfig, ablation_grid, train

PROFILES = {
    "desk": {"embed_dim": 64, "ffn_dim": 128, "batch_size": 16},
    "paper": {"embed_dim": 512, "ffn_dim": 2048, "batch_size": 128},
}

BASE_DEFAULTS = {
    "profile": "desk",
    "seed": 0,
    "max_len": 32,
    "encoder_layers": 2,
    "decoder_layers": 2,
    "attention_heads": 2,
    "intensity": 1.0,
    "c1": 1.0,
    "c2": 1.0,
    "mask_emotion_tag": False,
    "learning_rate": 1.0,
    "clip": 1.0,
    "max_epochs": 50,
    "patience": 5,
    "max_tokens": 20,
    "vocab_cap": 20000,
    "splits": 1,
    "grad_samples": 200,
}

KEY_TYPES = {
    "records": str, "lexicon": str, "data": str, "out": str, "checkpoint": str,
    "generated": str, "baseline": str, "profile": str, "emotion": str,
    "seed": int, "max_len": int, "embed_dim": int, "ffn_dim": int,
    "encoder_layers": int, "decoder_layers": int, "attention_heads": int,
    "batch_size": int, "max_epochs": int, "patience": int, "max_tokens": int,
    "vocab_cap": int, "splits": int, "grad_samples": int,
    "intensity": float, "c1": float, "c2": float, "learning_rate": float, "clip": float,
    "mask_emotion_tag": bool,
}


def _parse_value(key: str, text: str):
    kind = KEY_TYPES[key]
    if kind is bool:
        lowered = text.strip().lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ValueError(f"config key {key!r}: cannot parse boolean from {text!r}")
    return kind(text)


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}: line {lineno}: expected key=value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in KEY_TYPES:
                raise ValueError(f"{path}: line {lineno}: unknown config key {key!r}")
            out[key] = _parse_value(key, value.strip())
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    flags = {
        key: value
        for key, value in vars(args).items()
        if key in KEY_TYPES and value is not None
    }
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}
    profile = flags.get("profile") or file_values.get("profile") or BASE_DEFAULTS["profile"]
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}")
    resolved = dict(BASE_DEFAULTS)
    resolved.update(PROFILES[profile])
    resolved.update(file_values)
    resolved.update(flags)
    resolved["profile"] = profile
    return resolved


def write_resolved_config(out_dir: Path, resolved: dict) -> None:
    lines = [f"{key}={resolved[key]}" for key in sorted(resolved) if resolved[key] is not None]
    (out_dir / "config.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


@contextmanager
def output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / ".lock"
    try:
        handle = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ValueError(f"output directory {out_dir} is locked by another run (stale? remove {lock})") from None
    os.close(handle)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if not resolved.get(k)]
    if missing:
        raise ValueError(f"missing required option(s): {', '.join('--' + k for k in missing)}")


# ---------------------------------------------------------------------------
# Shared loading helpers
# ---------------------------------------------------------------------------

def _load_split_dir(data_dir: Path, seed: int) -> DatasetSplit:
    parts = []
    for name in ("train", "valid", "test"):
        path = data_dir / f"{name}.jsonl"
        if not path.exists():
            raise ValueError(f"{data_dir} does not look like a prepared data directory (missing {path.name})")
        parts.append(tuple(load_records(path)))
    return DatasetSplit(train=parts[0], valid=parts[1], test=parts[2], seed=seed)


def _load_vocab(path: Path) -> Vocabulary:
    obj = json.loads(path.read_text(encoding="utf-8"))
    return Vocabulary(
        id_to_token=tuple(obj["tokens"]),
        id_to_user=tuple(obj["users"]),
        id_to_item=tuple(obj["items"]),
    )


def _save_vocab(path: Path, vocab: Vocabulary) -> None:
    _write_json(path, {
        "tokens": list(vocab.id_to_token),
        "users": list(vocab.id_to_user),
        "items": list(vocab.id_to_item),
    })


def _model_config(resolved: dict, vocab: Vocabulary) -> ModelConfig:
    return config_for_vocab(
        vocab,
        max_len=resolved["max_len"],
        embed_dim=resolved["embed_dim"],
        ffn_dim=resolved["ffn_dim"],
        encoder_layers=resolved["encoder_layers"],
        decoder_layers=resolved["decoder_layers"],
        attention_heads=resolved["attention_heads"],
        intensity=resolved["intensity"],
        c1=resolved["c1"],
        c2=resolved["c2"],
        mask_emotion_tag=resolved["mask_emotion_tag"],
    )


def _train_config(resolved: dict, seed: int) -> TrainConfig:
    return TrainConfig(
        batch_size=resolved["batch_size"],
        learning_rate=resolved["learning_rate"],
        clip=resolved["clip"],
        max_epochs=resolved["max_epochs"],
        patience=resolved["patience"],
        seed=seed,
        c1=resolved["c1"],
        c2=resolved["c2"],
        intensity=resolved["intensity"],
    )


def _load_generated(path: Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as err:
                raise ValueError(f"{path}: line {lineno}: invalid JSON ({err.msg})") from None
    if not rows:
        raise ValueError(f"{path}: no generated explanations found")
    return rows


def _paired(generated: list[dict], references: list[Record], source: str) -> list[EvaluationPair]:
    if len(generated) != len(references):
        raise ValueError(
            f"{source}: {len(generated)} generated explanations vs {len(references)} test records")
    pairs = []
    for row, rec in zip(generated, references):
        if row.get("user") != rec.user or row.get("item") != rec.item:
            raise ValueError(
                f"{source}: generated row for ({row.get('user')}, {row.get('item')}) "
                f"does not align with test record ({rec.user}, {rec.item})")
        pairs.append(EvaluationPair.from_texts(rec.explanation, row.get("explanation", ""), rec.features))
    return pairs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_prepare(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "records", "lexicon", "out")
    out_dir = Path(resolved["out"])
    records = load_records(resolved["records"])
    lex = load_lexicon(resolved["lexicon"])
    tagged = assign_emotion_tags(records, lex)
    split = split_dataset(tagged, resolved["seed"])
    vocab = build_vocabulary(list(split.train), resolved["vocab_cap"])

    users = {r.user for r in tagged}
    items = {r.item for r in tagged}
    features = {f for r in tagged for f in r.features}
    words = [len(tokenize(r.explanation)) for r in tagged]
    stats = {
        "users": len(users),
        "items": len(items),
        "features": len(features),
        "records": len(tagged),
        "words_per_explanation": sum(words) / len(words),
    }

    with output_lock(out_dir):
        save_records(out_dir / "train.jsonl", list(split.train))
        save_records(out_dir / "valid.jsonl", list(split.valid))
        save_records(out_dir / "test.jsonl", list(split.test))
        _save_vocab(out_dir / "vocab.json", vocab)
        _write_json(out_dir / "stats.json", stats)
        write_resolved_config(out_dir, resolved)

    print(f"#users {stats['users']}")
    print(f"#items {stats['items']}")
    print(f"#features {stats['features']}")
    print(f"#records {stats['records']}")
    print(f"words/explanation {stats['words_per_explanation']:.2f}")
    return 0


def _train_once(resolved: dict, split: DatasetSplit, lex: Lexicon, vocab: Vocabulary,
                seed: int, out_dir: Path) -> float:
    model_config = _model_config(resolved, vocab)
    train_config = _train_config(resolved, seed)
    params, history = train(model_config, train_config, split, lex, vocab)
    nm.save_checkpoint(out_dir / "model.emot", params.all())
    _save_vocab(out_dir / "vocab.json", vocab)
    _write_json(out_dir / "history.json", history.to_dict())
    best = history.epochs[history.best_epoch]
    print(f"{out_dir}: best epoch {history.best_epoch} valid L_total {best.valid_total:.4f}")
    return best.valid_total


def cmd_train(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "data", "lexicon", "out")
    data_dir = Path(resolved["data"])
    out_dir = Path(resolved["out"])
    lex = load_lexicon(resolved["lexicon"])
    base_split = _load_split_dir(data_dir, resolved["seed"])
    n_repeats = resolved["splits"]

    with output_lock(out_dir):
        write_resolved_config(out_dir, resolved)
        if n_repeats <= 1:
            vocab = _load_vocab(data_dir / "vocab.json")
            _train_once(resolved, base_split, lex, vocab, resolved["seed"], out_dir)
        else:
            pool = list(base_split.records)
            finals = []
            for r in range(n_repeats):
                seed_r = resolved["seed"] + r
                split_r = split_dataset(pool, seed_r)
                vocab_r = build_vocabulary(list(split_r.train), resolved["vocab_cap"])
                run_dir = out_dir / f"run{r}"
                run_dir.mkdir(parents=True, exist_ok=True)
                finals.append(_train_once(resolved, split_r, lex, vocab_r, seed_r, run_dir))
            _write_json(out_dir / "summary.json", {
                "runs": finals,
                "mean_valid_total": float(np.mean(finals)),
                "std_valid_total": float(np.std(finals)),
            })
    return 0


def _config_near_checkpoint(checkpoint: Path) -> dict:
    config_path = checkpoint.parent / "config.txt"
    if not config_path.exists():
        raise ValueError(f"cannot find {config_path} next to the checkpoint")
    return _read_config_file(str(config_path))


def cmd_generate(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "checkpoint", "data", "lexicon", "out")
    checkpoint = Path(resolved["checkpoint"])
    data_dir = Path(resolved["data"])
    out_dir = Path(resolved["out"])
    lex = load_lexicon(resolved["lexicon"])

    stored = _config_near_checkpoint(checkpoint)
    for key in ("max_len", "embed_dim", "ffn_dim", "encoder_layers", "decoder_layers",
                "attention_heads", "intensity", "c1", "c2", "mask_emotion_tag"):
        if key in stored and getattr(args, key, None) is None:
            resolved[key] = stored[key]

    vocab_path = checkpoint.parent / "vocab.json"
    if not vocab_path.exists():
        vocab_path = data_dir / "vocab.json"
    vocab = _load_vocab(vocab_path)
    config = _model_config(resolved, vocab)
    params = ModelParams(config, seed=0)
    params.load_state(nm.load_checkpoint(checkpoint))

    split = _load_split_dir(data_dir, resolved["seed"])
    tagged = assign_emotion_tags(list(split.test), lex)
    queries = [
        GenerationQuery(
            user=rec.user, item=rec.item, features=rec.features,
            emotion=resolved.get("emotion") or rec.emotion,
            max_tokens=resolved["max_tokens"],
        )
        for rec in tagged
    ]
    results = batch_generate(params, config, vocab, lex, queries)

    with output_lock(out_dir):
        write_resolved_config(out_dir, resolved)
        with open(out_dir / "generated.jsonl", "w", encoding="utf-8") as fh:
            for query, result in zip(queries, results):
                row = {"user": query.user, "item": query.item, "requested_emotion": query.emotion}
                if result.tokens is None:
                    row["explanation"] = ""
                    row["error"] = result.error
                else:
                    row["explanation"] = " ".join(result.tokens)
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    failures = sum(1 for r in results if r.tokens is None)
    print(f"generated {len(results)} explanations ({failures} failed) -> {out_dir / 'generated.jsonl'}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "generated", "data", "out")
    data_dir = Path(resolved["data"])
    out_dir = Path(resolved["out"])
    generated = _load_generated(Path(resolved["generated"]))
    split = _load_split_dir(data_dir, resolved["seed"])
    pairs = _paired(generated, list(split.test), resolved["generated"])
    lex = load_lexicon(resolved["lexicon"]) if resolved.get("lexicon") else None
    report = build_report(pairs, lex)

    with output_lock(out_dir):
        write_resolved_config(out_dir, resolved)
        _write_json(out_dir / "report.json", report_to_dict(report))
        table = report_table([("generated", report)])
        (out_dir / "report.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "generated", "data", "lexicon", "out")
    data_dir = Path(resolved["data"])
    out_dir = Path(resolved["out"])
    lex = load_lexicon(resolved["lexicon"])
    split = _load_split_dir(data_dir, resolved["seed"])
    generated = _load_generated(Path(resolved["generated"]))
    if len(generated) != len(split.test):
        raise ValueError(
            f"{resolved['generated']}: {len(generated)} generated explanations "
            f"vs {len(split.test)} test records")

    gt_texts = [rec.explanation for rec in split.test]
    gen_texts = [row.get("explanation", "") for row in generated]
    audit = emotion_audit(gt_texts, gen_texts, lex)
    payload = {"audit": audit_to_dict(audit)}

    debias_column = None
    if resolved.get("baseline"):
        baseline = _load_generated(Path(resolved["baseline"]))
        if len(baseline) != len(split.test):
            raise ValueError(
                f"{resolved['baseline']}: {len(baseline)} baseline explanations "
                f"vs {len(split.test)} test records")
        base_audit = emotion_audit(gt_texts, [row.get("explanation", "") for row in baseline], lex)
        debias_column = {}
        for k, name in enumerate(CATEGORIES):
            gt_pct = 100.0 * audit.gt_distribution[k]
            if gt_pct <= 0:
                debias_column[name] = None
            else:
                debias_column[name] = debiasing_score(
                    gt_pct, 100.0 * base_audit.gen_distribution[k], 100.0 * audit.gen_distribution[k])
        payload["baseline_audit"] = audit_to_dict(base_audit)
        payload["debiasing"] = debias_column

    if getattr(args, "reference_check", False):
        rows, warnings = verify_reference_debiasing()
        payload["reference_check"] = rows
        payload["reference_warnings"] = warnings
        for warning in warnings:
            print(f"warning: {warning}", file=sys.stderr)

    table = audit_table(audit, debias_column)
    with output_lock(out_dir):
        write_resolved_config(out_dir, resolved)
        _write_json(out_dir / "audit.json", payload)
        (out_dir / "audit.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    _require(resolved, "data", "lexicon", "out")
    data_dir = Path(resolved["data"])
    out_dir = Path(resolved["out"])
    lex = load_lexicon(resolved["lexicon"])
    split = _load_split_dir(data_dir, resolved["seed"])
    vocab = _load_vocab(data_dir / "vocab.json")
    rows = ablation_grid(
        _model_config(resolved, vocab),
        _train_config(resolved, resolved["seed"]),
        split, lex, vocab, max_tokens=resolved["max_tokens"],
    )

    lines = ["loss_setting      intensity  " + "  ".join(f"{c:>7}" for c in (
        "FMR", "FCR", "DIV", "USR", "BLEU-1", "BLEU-4",
        "R1-P", "R1-R", "R1-F", "R2-P", "R2-R", "R2-F"))]
    for row in rows:
        values = [row["fmr"], row["fcr"], row["div"], row["usr"], row["bleu1"], row["bleu4"],
                  row["rouge1_p"], row["rouge1_r"], row["rouge1_f"],
                  row["rouge2_p"], row["rouge2_r"], row["rouge2_f"]]
        lines.append(
            f"{row['loss_setting']:<16}  {row['intensity']:>9.1f}  "
            + "  ".join(f"{v:7.2f}" for v in values))
    table = "\n".join(lines) + "\n"

    with output_lock(out_dir):
        write_resolved_config(out_dir, resolved)
        _write_json(out_dir / "ablation.json", {"cells": rows})
        (out_dir / "ablation.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


GRADCHECK_WORDS = ("bar", "lobby", "nice", "pool", "quiet", "room", "spa", "view", "walk", "warm")


def cmd_gradcheck(args: argparse.Namespace) -> int:
    resolved = resolve_config(args)
    vocab = Vocabulary(
        id_to_token=tuple(["<bos>", "<eos>", "<pad>", "<unk>",
                           "<happy>", "<angry>", "<surprise>", "<sad>", "<fear>", "<neutral>"])
        + GRADCHECK_WORDS,
        id_to_user=("u000", "u001"),
        id_to_item=("i000", "i001"),
    )
    config = ModelConfig(
        n_tokens=vocab.n_tokens,
        n_users=2,
        n_items=2,
        max_len=args.max_len if args.max_len is not None else 8,
        embed_dim=args.embed_dim if args.embed_dim is not None else 8,
        ffn_dim=args.ffn_dim if args.ffn_dim is not None else 16,
        attention_heads=resolved["attention_heads"],
        intensity=resolved["intensity"],
        c1=resolved["c1"],
        c2=resolved["c2"],
    )
    lex = fixture_lexicon()
    record = Record(user="u000", item="i001", features=("lobby",),
                    explanation="nice warm bar", emotion="happy")
    example = encode_example(record, vocab, config.max_len)
    vnrc = emotion_input_matrix(example, vocab, lex)
    params = ModelParams(config, resolved["seed"])

    error = nm.grad_check(
        lambda: total_loss(example, params, config, vnrc)[0],
        params.all(),
        n_samples=resolved["grad_samples"],
        seed=resolved["seed"],
    )
    print(f"gradcheck: max relative error {error:.3e} over >= {resolved['grad_samples']} coordinates")
    if resolved.get("out"):
        out_dir = Path(resolved["out"])
        with output_lock(out_dir):
            write_resolved_config(out_dir, resolved)
            _write_json(out_dir / "gradcheck.json", {
                "max_relative_error": error, "threshold": 1e-3, "passed": error < 1e-3})
    if error >= 1e-3:
        print("gradcheck: FAIL (threshold 1e-3)", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--profile", choices=sorted(PROFILES), help="configuration profile")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--intensity", type=float)
    sub.add_argument("--c1", type=float)
    sub.add_argument("--c2", type=float)
    sub.add_argument("--records", help="JSON-lines record file")
    sub.add_argument("--lexicon", help="tab-separated lexicon file")
    sub.add_argument("--splits", type=int, help="number of repeated random splits")
    sub.add_argument("--max-len", dest="max_len", type=int)
    sub.add_argument("--embed-dim", dest="embed_dim", type=int)
    sub.add_argument("--ffn-dim", dest="ffn_dim", type=int)
    sub.add_argument("--attention-heads", dest="attention_heads", type=int)
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--learning-rate", dest="learning_rate", type=float)
    sub.add_argument("--clip", type=float)
    sub.add_argument("--max-epochs", dest="max_epochs", type=int)
    sub.add_argument("--patience", type=int)
    sub.add_argument("--max-tokens", dest="max_tokens", type=int)
    sub.add_argument("--vocab-cap", dest="vocab_cap", type=int)
    sub.add_argument("--mask-emotion-tag", dest="mask_emotion_tag", action="store_const", const=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emoexplain",
        description="Emotion-aware explanation generation for recommender systems.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    prepare = subs.add_parser("prepare", help="split, tag and encode a record corpus")
    prepare.set_defaults(func=cmd_prepare)

    train_cmd = subs.add_parser("train", help="train on a prepared data directory")
    train_cmd.add_argument("--data", help="directory produced by prepare")
    train_cmd.set_defaults(func=cmd_train)

    generate = subs.add_parser("generate", help="greedy-generate explanations for the test split")
    generate.add_argument("--data", help="directory produced by prepare")
    generate.add_argument("--checkpoint", help="trained checkpoint (model.emot)")
    generate.add_argument("--emotion", choices=CATEGORIES, help="override the requested emotion tag")
    generate.set_defaults(func=cmd_generate)

    evaluate = subs.add_parser("evaluate", help="score generated explanations against the test split")
    evaluate.add_argument("--data", help="directory produced by prepare")
    evaluate.add_argument("--generated", help="generated.jsonl to score")
    evaluate.set_defaults(func=cmd_evaluate)

    audit = subs.add_parser("audit", help="compare emotion distributions of generated vs ground truth")
    audit.add_argument("--data", help="directory produced by prepare")
    audit.add_argument("--generated", help="generated.jsonl to audit")
    audit.add_argument("--baseline", help="baseline generated.jsonl for the debiasing column")
    audit.add_argument("--reference-check", action="store_true",
                       help="recompute the published reference debiasing tables and report mismatches")
    audit.set_defaults(func=cmd_audit)

    ablate = subs.add_parser("ablate", help="run the 3x3 loss-setting x intensity ablation grid")
    ablate.add_argument("--data", help="directory produced by prepare")
    ablate.set_defaults(func=cmd_ablate)

    gradcheck = subs.add_parser("gradcheck", help="finite-difference check of the full loss gradient")
    gradcheck.add_argument("--grad-samples", dest="grad_samples", type=int)
    gradcheck.set_defaults(func=cmd_gradcheck)

    for sub in (prepare, train_cmd, generate, evaluate, audit, ablate, gradcheck):
        _add_common(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FloatingPointError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
