"""Cycle-notation parsing, group files and machine-readable report records.

Points are 1-based in every external format and 0-based internally.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .perm import Permutation, PermutationError, format_cycles

SCHEMA_VERSION = 1

_CYCLE = re.compile(r"\(([^()]*)\)")
_SEP = re.compile(r"[,\s]+")


class ParseError(ValueError):
    pass


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse disjoint cycles over 1-based points, e.g. ``"(1,2,3)(4,5)"``."""
    if degree <= 0:
        raise ParseError("degree must be positive")
    stripped = _CYCLE.sub("", text)
    if stripped.strip():
        raise ParseError(f"malformed cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        body = body.strip()
        if not body:
            continue
        try:
            pts = [int(tok) for tok in _SEP.split(body) if tok]
        except ValueError:
            raise ParseError(f"non-integer point in {text!r}") from None
        for x in pts:
            if not 1 <= x <= degree:
                raise ParseError(f"point {x} out of range 1..{degree}")
        cycles.append([x - 1 for x in pts])
    if not text.strip():
        raise ParseError("empty generator")
    try:
        return Permutation.from_cycles(cycles, degree)
    except PermutationError as exc:
        raise ParseError(str(exc)) from None


def parse_images(text: str, degree: int) -> Permutation:
    """Parse a 1-based image array ``[2,3,1]``."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ParseError(f"malformed image array: {text!r}")
    try:
        imgs = [int(tok) - 1 for tok in _SEP.split(body[1:-1].strip()) if tok]
    except ValueError:
        raise ParseError(f"non-integer image in {text!r}") from None
    if len(imgs) != degree:
        raise ParseError(f"image array of length {len(imgs)} for degree {degree}")
    try:
        return Permutation(imgs)
    except PermutationError as exc:
        raise ParseError(str(exc)) from None


def parse_generator(text: str, degree: int) -> Permutation:
    return parse_images(text, degree) if text.lstrip().startswith("[") else parse_cycles(text, degree)


def print_cycles(g: Sequence[int]) -> str:
    return format_cycles(g, base=1)


@dataclass
class GroupFile:
    name: str
    degree: int
    generators: list[Permutation]
    order: int | None = None
    source: str = ""

    def handle(self):
        from .group import group_from_generators

        G = group_from_generators(self.degree, self.generators)
        if self.order is not None and G.order() != self.order:
            raise ParseError(f"{self.name}: generated order {G.order()} but the file declares {self.order}")
        return G


def parse_group_text(text: str, name: str = "G") -> GroupFile:
    """Group file: ``degree N``, then one generator per line, optional
    ``order M`` and ``name X`` lines; ``#`` starts a comment."""
    degree = None
    order = None
    raw_gens: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        key = head.lower()
        if key == "degree":
            try:
                degree = int(rest)
            except ValueError:
                raise ParseError(f"line {lineno}: bad degree {rest!r}") from None
        elif key == "order":
            try:
                order = int(rest)
            except ValueError:
                raise ParseError(f"line {lineno}: bad order {rest!r}") from None
        elif key == "name":
            name = rest.strip() or name
        elif line[0] in "([":
            raw_gens.append((lineno, line))
        else:
            raise ParseError(f"line {lineno}: unrecognised line {line!r}")
    if degree is None:
        raise ParseError("missing 'degree N' line")
    gens = []
    for lineno, g in raw_gens:
        try:
            gens.append(parse_generator(g, degree))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return GroupFile(name, degree, gens, order)


def read_group_file(path: str | Path) -> GroupFile:
    path = Path(path)
    gf = parse_group_text(path.read_text(), name=path.stem)
    gf.source = str(path)
    return gf


def format_group_file(gf: GroupFile) -> str:
    lines = [f"name {gf.name}", f"degree {gf.degree}"]
    if gf.order is not None:
        lines.append(f"order {gf.order}")
    lines.extend(print_cycles(g) for g in gf.generators)
    return "\n".join(lines) + "\n"


def load_group(spec: str):
    """``catalog:NAME`` or a path to a group file; returns (GroupHandle, name)."""
    if spec.startswith("catalog:"):
        from .catalog import load_catalog

        name = spec.split(":", 1)[1]
        return load_catalog(name), name
    gf = read_group_file(spec)
    return gf.handle(), gf.name


# -- report records ----------------------------------------------------------


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def input_digest(G, p: int, mode: str) -> str:
    return _digest({"degree": G.degree, "generators": [list(g) for g in G.generators], "prime": p, "mode": mode})


@dataclass
class ReportRecord:
    report: dict
    caps: dict
    input_digest: str
    tool_version: str
    schema_version: int = SCHEMA_VERSION
    report_digest: str = field(default="")

    def __post_init__(self):
        if not self.report_digest:
            self.report_digest = self.compute_digest()

    def compute_digest(self) -> str:
        body = {k: v for k, v in self.report.items() if k != "timing_ms"}
        return _digest({"report": body, "caps": self.caps, "input": self.input_digest, "schema": self.schema_version})

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
            "caps": dict(self.caps),
            "report": dict(self.report),
            "report_digest": self.report_digest,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRecord":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ParseError(f"unsupported schema version {d.get('schema_version')!r}")
        rec = cls(
            report=dict(d["report"]),
            caps=dict(d["caps"]),
            input_digest=d["input_digest"],
            tool_version=d["tool_version"],
            schema_version=d["schema_version"],
            report_digest=d["report_digest"],
        )
        if rec.report_digest != rec.compute_digest():
            raise ParseError("report digest mismatch")
        return rec

    @classmethod
    def from_json(cls, text: str) -> "ReportRecord":
        return cls.from_dict(json.loads(text))


def generators_as_text(gens: Iterable[Sequence[int]]) -> list[str]:
    return [print_cycles(g) for g in gens]
