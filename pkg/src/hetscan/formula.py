"""Multilevel-model formula strings: emission and parsing.

Grammar (single spaces around operators):

    formula  := response " ~ " fixed (" + " random)*
    fixed    := name (" + " name)*
    random   := "(" (fixed | "1") " | " name ")"

Every predictor appears as a population-level slope; every grouping gets a
random term, carrying its selected predictors or "1" when none survive the
threshold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class ParsedFormula:
    response: str
    fixed: tuple[str, ...]
    random: tuple[tuple[tuple[str, ...], str], ...]


def build_formula(
    response_name: str,
    predictor_names,
    grouping_names,
    selected_per_grouping,
) -> str:
    """Assemble the formula string from names and per-grouping index lists.

    Selected predictors are emitted in dataset order within each random
    term; groupings keep dataset order.
    """
    predictor_names = list(predictor_names)
    grouping_names = list(grouping_names)
    parts = [f"{response_name} ~ " + " + ".join(predictor_names)]
    for k, gname in enumerate(grouping_names):
        idx = sorted(selected_per_grouping[k])
        inner = " + ".join(predictor_names[d] for d in idx) if idx else "1"
        parts.append(f"({inner} | {gname})")
    return " + ".join(parts)


_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"


def parse_formula(text: str) -> ParsedFormula:
    """Parse a formula produced by :func:`build_formula` back into parts."""
    m = re.fullmatch(rf"\s*({_NAME})\s*~\s*(.*?)\s*", text)
    if not m:
        raise ValueError(f"cannot parse formula {text!r}")
    response, rhs = m.group(1), m.group(2)

    fixed: list[str] = []
    random: list[tuple[tuple[str, ...], str]] = []
    for term in _split_terms(rhs):
        rm = re.fullmatch(rf"\(\s*(.*?)\s*\|\s*({_NAME})\s*\)", term)
        if rm:
            inner, gname = rm.group(1), rm.group(2)
            if inner == "1":
                members: tuple[str, ...] = ()
            else:
                members = tuple(p.strip() for p in inner.split("+"))
                if not all(re.fullmatch(_NAME, p) for p in members):
                    raise ValueError(f"bad random term {term!r}")
            random.append((members, gname))
        elif re.fullmatch(_NAME, term):
            fixed.append(term)
        else:
            raise ValueError(f"bad term {term!r}")
    if not fixed:
        raise ValueError("formula has no population-level predictors")
    return ParsedFormula(response=response, fixed=tuple(fixed), random=tuple(random))


def _split_terms(rhs: str) -> list[str]:
    """Split on top-level '+' only; '+' inside parentheses stays put."""
    terms = []
    depth = 0
    current = []
    for ch in rhs:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if ch == "+" and depth == 0:
            terms.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ValueError("unbalanced parentheses")
    terms.append("".join(current).strip())
    if any(not t for t in terms):
        raise ValueError("empty term")
    return terms
