"""Command-line interface.

Subcommands: stats, train, normalize, evaluate, curve, tageval. A flat
key=value config file can pre-set any long option; explicit flags win.
Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from histnorm import __version__
from histnorm.baseline import BaselineNormalizer, Lexicon, build_lexicon
from histnorm.corpus import compute_stats, load_dataset, stats_json
from histnorm.downstream import TagMap, compare_systems, load_tagged_corpus
from histnorm.evaluation import (
    DEFAULT_CURVE_SIZES,
    IdentityNormalizer,
    evaluate,
    format_report_table,
    learning_curve,
    make_hybrid,
    report_json_line,
    write_curve_csv,
    write_reports_jsonl,
)
from histnorm.models import ModelConfig, ModelNormalizer, load_model, save_model, train


class UsageError(Exception):
    """Bad flag combinations or config values; maps to exit code 2."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Archived alongside outputs so every run is reproducible."""

    command: str
    train: str | None = None
    test: str | None = None
    model: str | None = None
    lexicon: str | None = None
    kind: str | None = None
    hybrid: bool = False
    lowercase: bool = False
    seed: int = 0
    epochs: int = 50
    emb_dim: int = 100
    enc_dim: int = 100
    dec_dim: int = 200
    out: str | None = None
    jobs: int = 1
    extras: dict = dataclasses.field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, **extras) -> "RunConfig":
        fields = {f.name for f in dataclasses.fields(cls)} - {"command", "extras"}
        known = {name: getattr(args, name) for name in fields if hasattr(args, name)}
        return cls(command=args.command, extras=extras, **known)

    def archive(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "config.json", "w", encoding="utf-8") as f:
            json.dump(dataclasses.asdict(self), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="histnorm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"histnorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, model_flags=False, jobs=False):
        p.add_argument("--config", help="flat key=value config file; explicit flags win")
        p.add_argument("--lowercase", action="store_true", help="case-fold all tokens on load")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output directory (run config is archived there)")
        if model_flags:
            p.add_argument("--epochs", type=int, default=50)
            p.add_argument("--emb-dim", type=int, default=100)
            p.add_argument("--enc-dim", type=int, default=100)
            p.add_argument("--dec-dim", type=int, default=200)
        if jobs:
            p.add_argument("--jobs", type=int, default=1, help="worker cap; 1 = fully reproducible outputs")

    p = sub.add_parser("stats", help="dataset statistics as one JSON object per dataset")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--dev")
    p.add_argument("--name", help="dataset name for the JSON output")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train a normalizer; writes model/lexicon plus training log")
    p.add_argument("--train", required=True)
    p.add_argument("--kind", choices=("baseline", "soft", "hard"), required=True)
    common(p, model_flags=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("normalize", help="normalize tokens, one per line")
    p.add_argument("--kind", choices=("baseline", "soft", "hard"))
    p.add_argument("--model", help="model file from `histnorm train`")
    p.add_argument("--lexicon", help="lexicon TSV from `histnorm train --kind baseline`")
    p.add_argument("--train", help="dataset to build the lexicon from (alternative to --lexicon)")
    p.add_argument("--hybrid", action="store_true", help="seen tokens -> baseline, unseen -> model")
    p.add_argument("--input", help="token file (default: stdin)")
    p.add_argument("--output", help="output file (default: stdout)")
    common(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("evaluate", help="seen/unseen accuracy report for one system")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--kind", choices=("baseline", "soft", "hard"), default="baseline")
    p.add_argument("--model", help="model file (required for soft/hard)")
    p.add_argument("--hybrid", action="store_true")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("curve", help="learning curve over training-size prefixes")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--kinds", default="baseline,soft,hard", help="comma list of systems")
    p.add_argument("--sizes", help="comma list of training sizes (default: 1k,2k,5k,10k,20k,50k,full)")
    p.add_argument("--hybrid", action="store_true", help="also evaluate hybrid systems")
    p.add_argument("--csv", help="write a plot-friendly CSV here")
    common(p, model_flags=True, jobs=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("tageval", help="downstream tagging accuracy across normalizers")
    p.add_argument("--corpus", required=True, help="tagged corpus file")
    p.add_argument("--tagger", required=True, help="tagger command (token per line in, token<TAB>tag out)")
    p.add_argument("--tagmap", required=True, help="tagger_tag<TAB>gold_tag TSV")
    p.add_argument("--train", help="dataset for the baseline lexicon")
    p.add_argument("--model", help="model file to include as a system")
    p.add_argument("--hybrid", action="store_true", help="also include baseline+model hybrid")
    common(p, jobs=True)
    p.set_defaults(func=cmd_tageval)

    return parser


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from e
    return values


_CONFIG_TYPES = {
    "seed": int,
    "epochs": int,
    "jobs": int,
    "emb_dim": int,
    "enc_dim": int,
    "dec_dim": int,
    "lowercase": None,  # boolean
    "hybrid": None,
}


def _coerce(key: str, value: str):
    kind = _CONFIG_TYPES.get(key, str)
    if kind is None:
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config key {key}: expected a boolean, got {value!r}")
    try:
        return kind(value)
    except ValueError as e:
        raise UsageError(f"config key {key}: {e}") from e


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    values = _read_config_file(args.config)
    for key, raw in values.items():
        if not hasattr(args, key):
            raise UsageError(f"config key {key!r} is not a {args.command!r} option")
        flag = "--" + key.replace("_", "-")
        given = any(tok == flag or tok.startswith(flag + "=") for tok in argv)
        if not given:
            setattr(args, key, _coerce(key, raw))


def _model_config(args, kind: str) -> ModelConfig:
    return ModelConfig(
        kind=kind,
        emb_dim=args.emb_dim,
        enc_dim=args.enc_dim,
        dec_dim=args.dec_dim,
        epochs=args.epochs,
        seed=args.seed,
    )


def _out_dir(args) -> Path | None:
    return Path(args.out) if args.out else None


def cmd_stats(args) -> int:
    train_ds = load_dataset(args.train, lowercase=args.lowercase, split="train")
    name = args.name or Path(args.train).stem
    for split, path in (("dev", args.dev), ("test", args.test)):
        if path is None:
            continue
        eval_ds = load_dataset(path, lowercase=args.lowercase, split=split)
        stats = compute_stats(train_ds, eval_ds)
        print(stats_json(stats, name=f"{name}/{split}", eval_tokens=len(eval_ds)))
    return 0


def cmd_train(args) -> int:
    if not args.out:
        raise UsageError("train requires --out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_ds = load_dataset(args.train, lowercase=args.lowercase, split="train")
    RunConfig.from_args(args).archive(out)
    if args.kind == "baseline":
        lex = build_lexicon(train_ds)
        lex.dump(out / "lexicon.tsv")
        print(f"built lexicon with {len(lex)} historical forms -> {out / 'lexicon.tsv'}")
        return 0
    config = _model_config(args, args.kind)
    with open(out / "train_log.jsonl", "w", encoding="utf-8") as log_file:
        def on_epoch(epoch: int, loss: float) -> None:
            log_file.write(json.dumps({"epoch": epoch, "loss": loss}) + "\n")
            log_file.flush()

        model, _ = train(config, train_ds, on_epoch=on_epoch)
    save_model(model, out / "model.htn")
    print(f"trained {args.kind} model on {len(train_ds)} pairs -> {out / 'model.htn'}")
    return 0


def _lexicon_from_args(args) -> Lexicon | None:
    if getattr(args, "lexicon", None):
        return Lexicon.load(args.lexicon)
    if getattr(args, "train", None):
        return build_lexicon(load_dataset(args.train, lowercase=args.lowercase, split="train"))
    return None


def _build_system(args):
    lex = _lexicon_from_args(args)
    model = load_model(args.model) if getattr(args, "model", None) else None
    if args.hybrid:
        if model is None or lex is None:
            raise UsageError("--hybrid needs --model plus --lexicon or --train")
        return make_hybrid(BaselineNormalizer(lex), ModelNormalizer(model)), lex
    kind = args.kind or (model.kind if model is not None else None)
    if kind == "baseline" or (kind is None and lex is not None and model is None):
        if lex is None:
            raise UsageError("baseline needs --lexicon or --train")
        return BaselineNormalizer(lex), lex
    if model is None:
        raise UsageError("soft/hard need --model (train one with `histnorm train`)")
    if args.kind and model.kind != args.kind:
        raise UsageError(f"--kind {args.kind} does not match model file kind {model.kind!r}")
    return ModelNormalizer(model), lex


def cmd_normalize(args) -> int:
    system, _ = _build_system(args)
    stream_in = open(args.input, encoding="utf-8") if args.input else sys.stdin
    stream_out = open(args.output, "w", encoding="utf-8", newline="\n") if args.output else sys.stdout
    try:
        for line in stream_in:
            token = line.rstrip("\n")
            stream_out.write(system.normalize(token) + "\n")
    finally:
        if args.input:
            stream_in.close()
        if args.output:
            stream_out.close()
    return 0


def cmd_evaluate(args) -> int:
    test_ds = load_dataset(args.test, lowercase=args.lowercase, split="test")
    system, lex = _build_system(args)
    if lex is None:
        raise UsageError("evaluate needs --train for the seen/unseen split")
    train_size = None
    if args.train:
        train_size = len(load_dataset(args.train, lowercase=args.lowercase, split="train"))
    report = evaluate(system, test_ds, lex, train_size=train_size)
    print(format_report_table([report]))
    out = _out_dir(args)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        RunConfig.from_args(args).archive(out)
        with open(out / "reports.jsonl", "w", encoding="utf-8") as f:
            write_reports_jsonl([report], f)
    return 0


def _parse_sizes(raw: str | None, n_train: int) -> list[int]:
    if raw:
        try:
            sizes = sorted({int(s) for s in raw.split(",") if s.strip()})
        except ValueError as e:
            raise UsageError(f"--sizes: {e}") from e
        if not sizes:
            raise UsageError("--sizes: empty")
        return sizes
    sizes = [s for s in DEFAULT_CURVE_SIZES if s < n_train]
    sizes.append(n_train)
    return sizes


def cmd_curve(args) -> int:
    train_ds = load_dataset(args.train, lowercase=args.lowercase, split="train")
    test_ds = load_dataset(args.test, lowercase=args.lowercase, split="test")
    systems = [k.strip() for k in args.kinds.split(",") if k.strip()]
    sizes = _parse_sizes(args.sizes, len(train_ds))
    needs_model = any(k in ("soft", "hard") for k in systems)
    config = _model_config(args, "soft") if needs_model else None
    points = learning_curve(
        train_ds,
        test_ds,
        sizes,
        systems=systems,
        model_config=config,
        include_hybrid=args.hybrid,
        seed=args.seed,
        jobs=args.jobs,
    )
    for pt in points:
        for report in pt.reports:
            print(report_json_line(report))
    out = _out_dir(args)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        RunConfig.from_args(args, sizes=sizes, kinds=systems).archive(out)
        with open(out / "curve.jsonl", "w", encoding="utf-8") as f:
            for pt in points:
                write_reports_jsonl(pt.reports, f)
        with open(out / "curve.csv", "w", encoding="utf-8", newline="") as f:
            write_curve_csv(points, f)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            write_curve_csv(points, f)
    return 0


def cmd_tageval(args) -> int:
    docs = load_tagged_corpus(args.corpus, lowercase=args.lowercase)
    tagmap = TagMap.load(args.tagmap)
    systems = [IdentityNormalizer()]
    lex = None
    if args.train:
        lex = build_lexicon(load_dataset(args.train, lowercase=args.lowercase, split="train"))
        systems.append(BaselineNormalizer(lex))
    model = load_model(args.model) if args.model else None
    if model is not None:
        systems.append(ModelNormalizer(model))
    if args.hybrid:
        if model is None or lex is None:
            raise UsageError("--hybrid needs --model and --train")
        systems.append(make_hybrid(BaselineNormalizer(lex), ModelNormalizer(model)))
    result = compare_systems(docs, systems, args.tagger, tagmap, jobs=args.jobs)
    for line in result.json_lines():
        print(line)
    print(json.dumps({"summary": result.summary_dict()}, ensure_ascii=False))
    out = _out_dir(args)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        RunConfig.from_args(args, corpus=args.corpus, tagger=args.tagger, tagmap=args.tagmap).archive(out)
        with open(out / "results.jsonl", "w", encoding="utf-8") as f:
            f.write("\n".join(result.json_lines()) + "\n")
        with open(out / "summary.json", "w", encoding="utf-8") as f:
            json.dump(result.summary_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, list(argv))
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
