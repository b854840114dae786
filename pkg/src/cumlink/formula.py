"""A small model-formula language: `resp ~ 1 + term + ... + (1|group)`.

The leading `1` is required even though the intercept is absorbed into
the thresholds; the notation is kept because that is how the models are
written down in practice.  At most one random-intercept term is allowed
and it must come last.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


class FormulaError(ValueError):
    """Parse failure; position is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"column {position}: {message}")
        self.position = position


@dataclass(frozen=True)
class FormulaSpec:
    response: str
    location: tuple[str, ...]
    group: str | None = None

    def text(self) -> str:
        parts = [self.response, "~", "1"]
        for term in self.location:
            parts += ["+", term]
        if self.group is not None:
            parts += ["+", f"(1 | {self.group})"]
        return " ".join(parts)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def take(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str, what: str) -> None:
        self.skip_ws()
        if not self.take(literal):
            raise FormulaError(f"expected {what}", self.pos)

    def ident(self, what: str) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if m is None:
            raise FormulaError(f"expected {what}", self.pos)
        self.pos = m.end()
        return m.group(0)


def parse_formula(text: str) -> FormulaSpec:
    """Parse `resp ~ 1 (+ ident)* (+ (1|ident))?`.

    Raises:
        FormulaError: with the character position of the problem.
    """
    s = _Scanner(text)
    response = s.ident("a response name")
    s.expect("~", "'~' after the response")
    s.expect("1", "the literal intercept '1' after '~'")
    location: list[str] = []
    group: str | None = None
    while not s.at_end():
        s.expect("+", "'+' between terms")
        s.skip_ws()
        term_pos = s.pos
        if s.take("("):
            if group is not None:
                raise FormulaError("only one random term is allowed", term_pos)
            s.expect("1", "'1' inside the random term")
            s.expect("|", "'|' in the random term")
            group = s.ident("a grouping name")
            s.expect(")", "')' closing the random term")
        else:
            if group is not None:
                raise FormulaError(
                    "the random term must come last", term_pos
                )
            name = s.ident("a term name")
            if name == response:
                raise FormulaError(
                    f"response {response!r} reused as a predictor", term_pos
                )
            if name in location:
                raise FormulaError(f"duplicate term {name!r}", term_pos)
            location.append(name)
    if group == response:
        raise FormulaError(
            f"response {response!r} reused as the grouping term", len(text)
        )
    return FormulaSpec(response, tuple(location), group)
