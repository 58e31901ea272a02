"""Command-line interface: train, generate, lint, inspect-model.

Resource files are resolved in order: explicit flag, config file entry
(`key = value` lines), then the directory named by SONNETEER_DATA using
the conventional names cmudict.txt, vectors.txt, tag_lexicon.txt,
pos_rules.txt, and bundles/*.model. In text mode stdout carries only the
poem; every diagnostic goes to stderr.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import secrets
import sys

from .corpus import DEFAULT_ABBREVIATIONS, build_bundle
from .embeddings import load_vector_file
from .errors import SonneteerError
from .forms import FORMS, validate_scheme
from .grammar import load_rules_file, load_tag_lexicon_file
from .langmodel import NGramModel
from .lint import has_errors, lint_text
from .phonodict import Relaxations, load_cmu_dict
from .poemgen import GenerationConfig, Resources, default_data_path, generate

ENV_DATA_DIR = "SONNETEER_DATA"


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise SonneteerError(f"{path}:{line_no}: expected key = value")
            values[key.strip()] = value.strip()
    return values


def _resolve(flag_value, file_values: dict, key: str, env_name: str | None = None):
    if flag_value is not None:
        return flag_value
    if key in file_values:
        return file_values[key]
    data_dir = os.environ.get(ENV_DATA_DIR)
    if env_name and data_dir:
        candidate = os.path.join(data_dir, env_name)
        if os.path.exists(candidate):
            return candidate
    return None


def _resolve_bundles(flag_value, file_values: dict) -> tuple[str, ...]:
    raw = flag_value if flag_value is not None else file_values.get("bundles")
    if raw:
        return tuple(p for chunk in raw.split(",") if (p := chunk.strip()))
    data_dir = os.environ.get(ENV_DATA_DIR)
    if data_dir:
        found = sorted(glob.glob(os.path.join(data_dir, "bundles", "*.model")))
        if found:
            return tuple(found)
    return ()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sonneteer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train an author model bundle")
    p_train.add_argument("--corpus", required=True)
    p_train.add_argument("--mode", choices=("verse", "prose"), default="verse")
    p_train.add_argument("--author", required=True)
    p_train.add_argument("--order", type=int, default=3)
    p_train.add_argument("--discount", type=float, default=0.75)
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--dict", dest="dict_path")
    p_train.add_argument("--embeddings")
    p_train.add_argument("--min-vocab", type=int, default=500)
    p_train.add_argument("--abbrev", help="file with one abbreviation per line")
    p_train.add_argument("--config")

    # Option defaults stay None here so a config-file entry can fill them;
    # an explicit flag always wins.
    p_gen = sub.add_parser("generate", help="generate a poem from a prompt")
    p_gen.add_argument("--prompt", required=True)
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("--form", choices=sorted(FORMS))
    p_gen.add_argument("--author", help="author name or 'random'")
    p_gen.add_argument("--beam-width", type=int)
    p_gen.add_argument("--top-k", type=int)
    p_gen.add_argument("--temperature", type=float)
    p_gen.add_argument("--comma-range", help="LO:HI commas per sonnet, scaled to form")
    p_gen.add_argument("--output", choices=("text", "full"), default="text")
    p_gen.add_argument("--jobs", type=int)
    p_gen.add_argument("--dict", dest="dict_path")
    p_gen.add_argument("--embeddings")
    p_gen.add_argument("--tag-lexicon")
    p_gen.add_argument("--pos-rules")
    p_gen.add_argument("--bundles", help="comma-separated bundle paths")
    p_gen.add_argument("--min-vocab", type=int)
    p_gen.add_argument("--no-monosyllable-flex", action="store_true")
    p_gen.add_argument("--no-final-promotion", action="store_true")
    p_gen.add_argument("--proportional-sampling", action="store_true")
    p_gen.add_argument("--forbid-matching-onsets", action="store_true")
    p_gen.add_argument("--config")

    p_lint = sub.add_parser("lint", help="verify meter, rhyme, and tag rules")
    p_lint.add_argument("--input", required=True)
    p_lint.add_argument("--scheme", required=True, help="sonnet|short|custom:LETTERS")
    p_lint.add_argument("--dict", dest="dict_path")
    p_lint.add_argument("--tag-lexicon")
    p_lint.add_argument("--pos-rules")
    p_lint.add_argument("--no-pos", action="store_true", help="skip tag-rule checks")
    p_lint.add_argument("--strict", action="store_true", help="disable relaxations")
    p_lint.add_argument("--config")

    p_inspect = sub.add_parser("inspect-model", help="summarize a model bundle")
    p_inspect.add_argument("--model", required=True)
    p_inspect.add_argument("--top", type=int, default=10)

    return parser


def _cmd_train(args, file_values) -> int:
    dict_path = _resolve(args.dict_path, file_values, "dict", "cmudict.txt")
    emb_path = _resolve(args.embeddings, file_values, "embeddings", "vectors.txt")
    if not dict_path or not emb_path:
        print("train: --dict and --embeddings are required", file=sys.stderr)
        return 2
    abbreviations = DEFAULT_ABBREVIATIONS
    if args.abbrev:
        with open(args.abbrev, encoding="utf-8") as fh:
            abbreviations = frozenset(
                w.strip().lower() for w in fh if w.strip() and not w.startswith("#")
            )
    with open(args.corpus, encoding="utf-8") as fh:
        text = fh.read()
    bundle = build_bundle(
        args.author,
        text,
        load_cmu_dict(dict_path),
        load_vector_file(emb_path),
        order=args.order,
        discount=args.discount,
        mode=args.mode,
        min_vocab=args.min_vocab,
        abbreviations=abbreviations,
    )
    bundle.model.save_file(args.out)
    print(
        f"trained {args.author!r}: order {args.order}, discount {args.discount}, "
        f"{len(bundle.model.words)} model words, "
        f"{len(bundle.generation_vocab)} generation words -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_generate(args, file_values) -> int:
    def opt(flag_value, key, default, cast):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return cast(file_values[key])
        return default

    seed = opt(args.seed, "seed", None, int)
    if seed is None:
        seed = secrets.randbelow(2**32)
    print(f"seed = {seed} (pass --seed {seed} to reproduce)", file=sys.stderr)
    raw_range = opt(args.comma_range, "comma-range", "4:8", str)
    try:
        low_s, _, high_s = raw_range.partition(":")
        comma_range = (int(low_s), int(high_s or low_s))
    except ValueError:
        print(f"bad comma range {raw_range!r}; want LO:HI", file=sys.stderr)
        return 2
    config = GenerationConfig(
        prompt=args.prompt,
        seed=seed,
        form=opt(args.form, "form", "sonnet", str),
        author=opt(args.author, "author", "random", str),
        beam_width=opt(args.beam_width, "beam-width", 20, int),
        top_k=opt(args.top_k, "top-k", 10, int),
        rhyme_temperature=opt(args.temperature, "temperature", 0.1, float),
        comma_range=comma_range,
        relaxations=Relaxations(
            monosyllable_flexible=not args.no_monosyllable_flex,
            final_promotion=not args.no_final_promotion,
        ),
        sample_proportional=args.proportional_sampling,
        forbid_matching_onsets=args.forbid_matching_onsets,
        jobs=opt(args.jobs, "jobs", 1, int),
        min_vocab=opt(args.min_vocab, "min-vocab", 500, int),
        dict_path=_resolve(args.dict_path, file_values, "dict", "cmudict.txt"),
        embeddings_path=_resolve(
            args.embeddings, file_values, "embeddings", "vectors.txt"
        ),
        tag_lexicon_path=_resolve(
            args.tag_lexicon, file_values, "tag-lexicon", "tag_lexicon.txt"
        ),
        pos_rules_path=_resolve(args.pos_rules, file_values, "pos-rules", "pos_rules.txt"),
        bundle_paths=_resolve_bundles(args.bundles, file_values),
    )
    poem = generate(config)
    if args.output == "full":
        print(json.dumps(poem.metadata(), indent=2))
    else:
        print(poem.text())
    return 0


def _cmd_lint(args, file_values) -> int:
    scheme_arg = args.scheme
    if scheme_arg in FORMS:
        scheme = FORMS[scheme_arg].scheme
    elif scheme_arg.startswith("custom:"):
        scheme = scheme_arg.split(":", 1)[1]
    else:
        print(f"unknown scheme {scheme_arg!r}", file=sys.stderr)
        return 2
    try:
        validate_scheme(scheme)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    dict_path = _resolve(args.dict_path, file_values, "dict", "cmudict.txt")
    if not dict_path:
        print("lint: --dict is required", file=sys.stderr)
        return 2
    dictionary = load_cmu_dict(dict_path)
    lexicon = rules = None
    if not args.no_pos:
        lexicon = load_tag_lexicon_file(
            _resolve(args.tag_lexicon, file_values, "tag-lexicon", "tag_lexicon.txt")
            or default_data_path("tag_lexicon.txt")
        )
        rules = load_rules_file(
            _resolve(args.pos_rules, file_values, "pos-rules", "pos_rules.txt")
            or default_data_path("pos_rules.txt")
        )
    relaxations = (
        Relaxations(monosyllable_flexible=False, final_promotion=False)
        if args.strict
        else Relaxations()
    )
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    try:
        findings = lint_text(text, scheme, dictionary, lexicon, rules, relaxations)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    for finding in findings:
        print(finding)
    return 1 if has_errors(findings) else 0


def _cmd_inspect(args) -> int:
    model = NGramModel.load_file(args.model)
    print(f"order: {model.order}")
    print(f"discount: {model.discount}")
    print(f"direction: {model.direction}")
    if model.author:
        print(f"author: {model.author}")
    print(f"vocabulary: {len(model.words)} tokens")
    print(f"top {args.top} n-grams (reversed stream):")
    for gram, count in model.top_ngrams(args.top):
        print(f"  {count:6d}  {' '.join(gram)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    file_values = {}
    config_path = getattr(args, "config", None)
    try:
        if config_path:
            file_values = _read_config_file(config_path)
        if args.command == "train":
            return _cmd_train(args, file_values)
        if args.command == "generate":
            return _cmd_generate(args, file_values)
        if args.command == "lint":
            return _cmd_lint(args, file_values)
        return _cmd_inspect(args)
    except FileNotFoundError as exc:
        print(f"cannot open {exc.filename}", file=sys.stderr)
        return 2
    except SonneteerError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
