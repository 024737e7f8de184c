"""Command-line front end.

    lexitree validate    FILE [--rules RULES]
    lexitree effective   FILE [--rules RULES] [--path A.B.C]
    lexitree traversals  FILE [--rules RULES] [--full | --partial]
    lexitree expand      FILE
    lexitree materialize FILE [--rules RULES]
    lexitree table       FILE --cols F1,F2,... [--format tsv|html] [--rules RULES]

Exit codes: 0 success, 1 semantic violation or bad argument, 2 input parse
failure. stdout carries only payload; diagnostics go to stderr. Paths are
dotted 0-based child indices; the empty string is the root. The rules file
defaults to the shipped one; LEXITREE_RULES overrides it and --rules
overrides both.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import rules as rules_mod
from .model import (
    EffectiveFeatureSet,
    FeatureClassRegistry,
    LexitreeError,
    Node,
    NodePath,
    OverwriteConflict,
    PathOutOfRange,
    UnexpandedAlternatives,
    check_consistency,
    effective_set,
    enumerate_traversals,
    format_value,
    partial_traversals,
)
from .transform import TableSpec, expand_alternatives, extract_table, materialize_inheritance, render_table
from .xmlio import DEFAULT_PROFILE, ParseError, SerializeError, parse_entry, serialize_entry

OK = 0
SEMANTIC = 1
PARSE_FAILURE = 2


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # bad arguments are exit 1, not argparse's 2
        raise _UsageError(message)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="lexitree", description="Inspect and transform dictionary entry trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, with_rules: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="entry document (XML)")
        if with_rules:
            p.add_argument("--rules", help="feature class rules file")
        return p

    command("validate", "check node constraints and dependency rules")
    p = command("effective", "print the feature set holding at a node")
    p.add_argument("--path", default="", help="dotted 0-based child indices; empty for the root")
    p = command("traversals", "list traversals with their effective sets")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--full", action="store_true", help="root-to-leaf paths (default)")
    which.add_argument("--partial", action="store_true", help="one path per node")
    command("expand", "rewrite alternatives as explicit siblings", with_rules=False)
    command("materialize", "spell out inherited features at every node")
    p = command("table", "extract one row per full traversal")
    p.add_argument("--cols", required=True, help="comma-separated feature names")
    p.add_argument("--format", default="tsv", choices=("tsv", "html"))
    return parser


def parse_path(text: str) -> NodePath:
    if not text:
        return ()
    try:
        indices = tuple(int(part, 10) for part in text.split("."))
    except ValueError:
        raise ValueError(f"bad path {text!r}: expected dotted indices like 0.1.2") from None
    if any(i < 0 for i in indices):
        raise ValueError(f"bad path {text!r}: indices must be non-negative")
    return indices


def format_path(path: NodePath) -> str:
    return ".".join(str(i) for i in path)


def _load_registry(rules_arg: str | None) -> FeatureClassRegistry:
    if rules_arg:
        return rules_mod.load_rules(rules_arg)
    env = os.environ.get("LEXITREE_RULES")
    if env:
        return rules_mod.load_rules(env)
    return rules_mod.default_registry()


class _InputError(Exception):
    pass


def _read_tree(path: str) -> Node:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise _InputError(str(exc)) from exc
    tree, diagnostics = parse_entry(data, DEFAULT_PROFILE)
    for diagnostic in diagnostics:
        print(f"{path}: {diagnostic.describe()}", file=sys.stderr)
    return tree


def _print_effective(eff: EffectiveFeatureSet) -> None:
    for prop in eff.entries:
        print(f"{str(prop.feature)} : {format_value(prop.value)}")


def _cmd_validate(args) -> int:
    registry = _load_registry(args.rules)
    tree = _read_tree(args.file)
    violations = check_consistency(tree, registry)
    if not violations:
        print("OK")
        return OK
    for violation in violations:
        print(violation.describe(), file=sys.stderr)
    return SEMANTIC


def _cmd_effective(args) -> int:
    registry = _load_registry(args.rules)
    tree = _read_tree(args.file)
    _print_effective(effective_set(tree, parse_path(args.path), registry))
    return OK


def _cmd_traversals(args) -> int:
    registry = _load_registry(args.rules)
    tree = _read_tree(args.file)
    paths = partial_traversals(tree) if args.partial else enumerate_traversals(tree)
    first = True
    for path in paths:
        if not first:
            print()
        first = False
        print(format_path(path))
        _print_effective(effective_set(tree, path, registry))
    return OK


def _cmd_expand(args) -> int:
    tree = _read_tree(args.file)
    sys.stdout.buffer.write(serialize_entry(expand_alternatives(tree)))
    return OK


def _cmd_materialize(args) -> int:
    registry = _load_registry(args.rules)
    tree = _read_tree(args.file)
    materialized = materialize_inheritance(expand_alternatives(tree), registry)
    sys.stdout.buffer.write(serialize_entry(materialized))
    return OK


def _cmd_table(args) -> int:
    registry = _load_registry(args.rules)
    columns = [c.strip() for c in args.cols.split(",") if c.strip()]
    if not columns:
        raise _UsageError("--cols must name at least one feature")
    spec = TableSpec(columns, format=args.format)
    tree = _read_tree(args.file)
    rows = extract_table(tree, spec, registry)
    sys.stdout.write(render_table(spec, rows))
    return OK


_COMMANDS = {
    "validate": _cmd_validate,
    "effective": _cmd_effective,
    "traversals": _cmd_traversals,
    "expand": _cmd_expand,
    "materialize": _cmd_materialize,
    "table": _cmd_table,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"lexitree: {exc}", file=sys.stderr)
        return SEMANTIC
    try:
        return _COMMANDS[args.command](args)
    except (_InputError, ParseError) as exc:
        print(f"lexitree: {exc}", file=sys.stderr)
        return PARSE_FAILURE
    except UnexpandedAlternatives as exc:
        print(f"lexitree: {exc} (run: lexitree expand)", file=sys.stderr)
        return SEMANTIC
    except (PathOutOfRange, OverwriteConflict, SerializeError, rules_mod.RulesError) as exc:
        print(f"lexitree: {exc}", file=sys.stderr)
        return SEMANTIC
    except (_UsageError, ValueError) as exc:
        print(f"lexitree: {exc}", file=sys.stderr)
        return SEMANTIC


if __name__ == "__main__":
    raise SystemExit(main())
