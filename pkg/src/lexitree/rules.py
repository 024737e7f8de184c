"""Plain-text rules files describing a feature class registry.

Grammar, one directive per line:

    class <feature> <cum|over|loc>
    dep <dependent> <governor> <required-value>

Blank lines and lines starting with `#` are ignored. A `dep` governor must
have been declared `over` on an earlier line; the required value is the rest
of the line, so it may contain spaces.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import DependencyRule, FeatureClass, FeatureClassRegistry, LexitreeError

_CLASS_WORDS = {
    "cum": FeatureClass.CUMULATIVE,
    "over": FeatureClass.OVERWRITING,
    "loc": FeatureClass.LOCAL,
}


class RulesError(LexitreeError):
    def __init__(self, source: str, line_number: int, message: str):
        self.source = source
        self.line_number = line_number
        super().__init__(f"{source}:{line_number}: {message}")


def parse_rules(text: str, source: str = "<rules>") -> FeatureClassRegistry:
    classes: dict[str, FeatureClass] = {}
    rules: list[DependencyRule] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        directive = fields[0]
        if directive == "class":
            if len(fields) != 3:
                raise RulesError(source, number, "expected: class <feature> <cum|over|loc>")
            _, feature, word = fields
            if word not in _CLASS_WORDS:
                raise RulesError(source, number, f"unknown class {word!r} (use cum, over, or loc)")
            if feature in classes:
                raise RulesError(source, number, f"feature {feature!r} already classified")
            classes[feature] = _CLASS_WORDS[word]
        elif directive == "dep":
            parts = line.split(None, 3)
            if len(parts) != 4:
                raise RulesError(source, number, "expected: dep <dependent> <governor> <value>")
            _, dependent, governor, value = parts
            if classes.get(governor) is not FeatureClass.OVERWRITING:
                raise RulesError(
                    source, number, f"governor {governor!r} must be declared 'over' earlier in the file"
                )
            rules.append(DependencyRule(dependent, governor, value))
        else:
            raise RulesError(source, number, f"unknown directive {directive!r}")
    try:
        return FeatureClassRegistry(classes, rules)
    except ValueError as exc:
        raise RulesError(source, 0, str(exc)) from exc


def load_rules(path: str | Path) -> FeatureClassRegistry:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), source=str(path))


def default_rules_text() -> str:
    return resources.files("lexitree").joinpath("default.rules").read_text(encoding="utf-8")


def default_registry() -> FeatureClassRegistry:
    """The shipped classifications: orth/etym/pos/gen/pron overwrite, def/domain/time
    accumulate, ex/xr/brack stay local, and gen is licensed only under pos=noun."""
    return parse_rules(default_rules_text(), source="<default>")
