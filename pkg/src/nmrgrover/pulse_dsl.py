"""Parser, serializer, and canonical library for the pulse-sequence notation.

Surface grammar: whitespace-separated tokens, ``#`` starts a line comment.

    90y  90-x  12.5y        hard pulse: angle in degrees, then phase axis
    [1/(4J)]  [1/(2d)]      delay as a fraction of 1/J or 1/delta (d = delta)
    [12.5ms]  [0.05s]       literal delay
    zz(90)  zo(-45)         equal / opposite z rotation by the given angle
    crush                   gradient pulse (coherence-order filter)
    acquire                 start acquisition; only valid as the last token

Parsing is a single pass over the token stream; every diagnostic carries
the 1-based token index.  `serialize` emits a canonical single-space text
whose re-parse is structurally identical to the input sequence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .spin_model import (
    Acquire,
    Crush,
    Delay,
    FractionOfDelta,
    FractionOfJ,
    GroverFunction,
    HardPulse,
    LiteralDuration,
    PulseElement,
    PulseSequence,
    SpinSystem,
    ZRotation,
    resolve_duration,
)

__all__ = [
    "ParseError",
    "SequenceLibraryEntry",
    "LIBRARY_NAMES",
    "parse",
    "serialize",
    "serialize_element",
    "library",
    "library_entry",
    "duration_of",
]

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?"
_HARD_RE = re.compile(rf"^({_NUM})(-?)([xy])$")
_FRACTION_RE = re.compile(r"^\[([0-9]+)/\(([0-9]+)([Jd])\)\]$")
_LITERAL_RE = re.compile(rf"^\[({_NUM})(ms|s)\]$")
_ZROT_RE = re.compile(rf"^z([zo])\(([+-]?{_NUM})\)$")


class ParseError(ValueError):
    """Parse failure with a 1-based token position."""

    def __init__(self, token_index: int, message: str, token: Optional[str] = None):
        self.token_index = token_index
        self.token = token
        detail = f"token {token_index}: {message}"
        if token is not None:
            detail += f" (got {token!r})"
        super().__init__(detail)


def _parse_token(index: int, token: str) -> PulseElement:
    if token == "crush":
        return Crush()
    if token == "acquire":
        return Acquire()
    m = _HARD_RE.match(token)
    if m:
        angle, sign, axis = m.groups()
        try:
            return HardPulse(float(angle), sign + axis)
        except ValueError as exc:
            raise ParseError(index, str(exc), token) from exc
    m = _FRACTION_RE.match(token)
    if m:
        num, den, symbol = m.groups()
        try:
            frac = FractionOfJ(int(num), int(den)) if symbol == "J" else FractionOfDelta(int(num), int(den))
        except ValueError as exc:
            raise ParseError(index, str(exc), token) from exc
        return Delay(frac)
    m = _LITERAL_RE.match(token)
    if m:
        value, unit = m.groups()
        seconds = float(value) * (1e-3 if unit == "ms" else 1.0)
        try:
            return Delay(LiteralDuration(seconds))
        except ValueError as exc:
            raise ParseError(index, str(exc), token) from exc
    m = _ZROT_RE.match(token)
    if m:
        kind, angle = m.groups()
        pattern = "equal" if kind == "z" else "opposite"
        try:
            return ZRotation(float(angle), pattern)
        except ValueError as exc:
            raise ParseError(index, str(exc), token) from exc
    if token.startswith("["):
        raise ParseError(index, "malformed delay: expected [N/(MJ)], [N/(Md)], [Xms] or [Xs]", token)
    if token[:1].isdigit() or token[:1] == ".":
        raise ParseError(index, "unknown phase: expected one of x, -x, y, -y after the angle", token)
    raise ParseError(index, "unknown token", token)


def parse(text: str) -> PulseSequence:
    """Parse sequence text into a `PulseSequence`.

    Raises:
        ParseError: unknown token, malformed fraction, invalid angle, or a
            non-final acquire, always with the 1-based token position.
    """
    tokens: list[tuple[int, str]] = []
    pos = 0
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for tok in line.split():
            pos += 1
            tokens.append((pos, tok))
    elements: list[PulseElement] = []
    acquire_at: Optional[int] = None
    for index, tok in tokens:
        if acquire_at is not None:
            raise ParseError(acquire_at, "acquire must be the final element of a sequence")
        el = _parse_token(index, tok)
        if isinstance(el, Acquire):
            acquire_at = index
        elements.append(el)
    return PulseSequence(tuple(elements))


def _format_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def serialize_element(el: PulseElement) -> str:
    """Canonical token for a single pulse element."""
    if isinstance(el, HardPulse):
        return f"{_format_number(el.angle_deg)}{el.phase}"
    if isinstance(el, Delay):
        d = el.duration
        if isinstance(d, FractionOfJ):
            return f"[{d.numerator}/({d.denominator}J)]"
        if isinstance(d, FractionOfDelta):
            return f"[{d.numerator}/({d.denominator}d)]"
        return f"[{_format_number(d.seconds)}s]"
    if isinstance(el, ZRotation):
        kind = "zz" if el.pattern == "equal" else "zo"
        return f"{kind}({_format_number(el.angle_deg)})"
    if isinstance(el, Crush):
        return "crush"
    if isinstance(el, Acquire):
        return "acquire"
    raise TypeError(f"not a pulse element: {el!r}")


def serialize(seq: PulseSequence) -> str:
    """Canonical single-space-separated text; `parse(serialize(s)) == s`."""
    return " ".join(serialize_element(el) for el in seq)


# ---------------------------------------------------------------------------
# canonical sequence library
# ---------------------------------------------------------------------------

_NAMED_TEXT = {
    "P_prep": "[1/(4d)] 90y [1/(4J)] 180x [1/(4J)] 180y [1/(2d)] 90x",
    "P_00": "[1/(4J)] 90-x 90y 90-x [1/(4J)] 180x",
    "P_01": "[1/(4J)] 180x [1/(4J)] [1/(2d)] 180x",
    "P_10": "[1/(2d)] [1/(4J)] 180x [1/(4J)] 180x",
    "P_11": "[1/(4J)] 180x [1/(4J)] 90-x 90y 90-x",
}

LIBRARY_NAMES = ("P_prep", "P_00", "P_01", "P_10", "P_11", "grover", "reference")


@dataclass(frozen=True)
class SequenceLibraryEntry:
    name: str
    sequence: PulseSequence


def library(name: str, f: Optional[GroverFunction] = None) -> PulseSequence:
    """Return a canonical named sequence.

    The z rotations written as bare 1/delta delays stay Delay elements, so
    the executor realizes them through Zeeman evolution; the equal z
    rotations inside P_00 and P_11 appear as their composite hard-pulse
    triplets.  ``grover`` requires the oracle label `f`:

        P_prep crush 90-y P_f 90y P_00 90-y crush 90y acquire

    and ``reference`` is  P_prep crush 90y acquire.
    """
    if name in _NAMED_TEXT:
        if f is not None:
            raise ValueError(f"sequence {name!r} does not take an oracle label")
        return parse(_NAMED_TEXT[name])
    if name == "grover":
        if f is None:
            raise ValueError("the grover sequence requires an oracle (GroverFunction)")
        p_f = _NAMED_TEXT[f"P_{f.satisfying_input}"]
        text = " ".join([
            _NAMED_TEXT["P_prep"], "crush", "90-y", p_f, "90y",
            _NAMED_TEXT["P_00"], "90-y", "crush", "90y", "acquire",
        ])
        return parse(text)
    if name == "reference":
        if f is not None:
            raise ValueError("the reference sequence does not take an oracle label")
        return parse(_NAMED_TEXT["P_prep"] + " crush 90y acquire")
    raise ValueError(f"unknown sequence name {name!r}; expected one of {LIBRARY_NAMES}")


def library_entry(name: str, f: Optional[GroverFunction] = None) -> SequenceLibraryEntry:
    return SequenceLibraryEntry(name, library(name, f))


def duration_of(seq: PulseSequence, sys: SpinSystem) -> float:
    """Total wall-clock duration: delays resolved, pulses count as zero."""
    return sum(
        resolve_duration(el.duration, sys) for el in seq if isinstance(el, Delay)
    )
