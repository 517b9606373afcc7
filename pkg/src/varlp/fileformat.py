"""Line-oriented text formats for exponent sequences and finite sequences.

Exponent file::

    # comments start with '#'
    kind: exponent
    prefix: 1, 2, inf
    tail: affinelog 1 2        # constant V | affinelog A B | power A G | infinite
    declared_inf: 1
    declared_sup: inf          # optional

Sequence file: one real number per line, index implicit.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .exponents import INF, AffineLog, Constant, ExponentSequence, Infinite, Power

KINDS = ("exponent", "exponent_sequence")
FIELDS = ("kind", "prefix", "tail", "declared_inf", "declared_sup")
TAILS = {"constant": 1, "affinelog": 2, "power": 2, "infinite": 0}


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _number(tok: str, where: str) -> float:
    t = tok.strip().lower()
    if t in ("inf", "infinity", "+inf", "oo"):
        return INF
    try:
        v = float(t)
    except ValueError:
        raise ParseError(f"{where}: not a number: {tok!r}") from None
    if math.isnan(v):
        raise ParseError(f"{where}: NaN is not allowed")
    return v


def _tail(text: str, where: str):
    parts = text.split()
    if not parts:
        raise ParseError(f"{where}: empty tail")
    name = parts[0].lower()
    if name not in TAILS:
        raise ParseError(f"{where}: unknown tail family {parts[0]!r}")
    args = [_number(t, where) for t in parts[1:]]
    if len(args) != TAILS[name]:
        raise ParseError(f"{where}: {name} takes {TAILS[name]} argument(s)")
    if name == "constant":
        return Constant(args[0])
    if name == "affinelog":
        return AffineLog(*args)
    if name == "power":
        return Power(*args)
    return Infinite()


def parse_exponent_text(text: str, source: str = "<text>") -> ExponentSequence:
    fields: dict[str, str] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"{source}:{no}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        key = key.lower()
        if key not in FIELDS:
            raise ParseError(f"{source}:{no}: unknown field {key!r}")
        if key in fields:
            raise ParseError(f"{source}:{no}: duplicate field {key!r}")
        fields[key] = value
    if fields.get("kind", "exponent").lower() not in KINDS:
        raise ParseError(f"{source}: kind must be 'exponent'")
    for need in ("tail", "declared_inf"):
        if need not in fields:
            raise ParseError(f"{source}: missing field {need!r}")
    prefix = ()
    if fields.get("prefix"):
        prefix = tuple(_number(t, source) for t in fields["prefix"].split(","))
    tail = _tail(fields["tail"], source)
    lo = _number(fields["declared_inf"], source)
    hi = _number(fields["declared_sup"], source) if "declared_sup" in fields else INF
    return ExponentSequence(prefix, tail, declared_inf=lo, declared_sup=hi)


def read_exponent_file(path) -> ExponentSequence:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_exponent_text(text, str(path))


def format_exponent(p: ExponentSequence) -> str:
    """Inverse of parse_exponent_text."""
    def num(v):
        return "inf" if math.isinf(v) else repr(float(v))

    k = p.tail
    if isinstance(k, Constant):
        tail = f"constant {num(k.value_)}"
    elif isinstance(k, AffineLog):
        tail = f"affinelog {num(k.a)} {num(k.b)}"
    elif isinstance(k, Power):
        tail = f"power {num(k.a)} {num(k.gamma)}"
    else:
        tail = "infinite"
    lines = ["kind: exponent"]
    if p.prefix:
        lines.append("prefix: " + ", ".join(num(v) for v in p.prefix))
    lines += [f"tail: {tail}", f"declared_inf: {num(p.declared_inf)}",
              f"declared_sup: {num(p.declared_sup)}"]
    return "\n".join(lines) + "\n"


def read_sequence_file(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    vals = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if line:
            v = _number(line, f"{path}:{no}")
            if math.isinf(v):
                raise ParseError(f"{path}:{no}: sequence entries must be finite")
            vals.append(v)
    return np.array(vals, dtype=float)


def write_sequence_file(path, a) -> None:
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in np.asarray(a).ravel()))
