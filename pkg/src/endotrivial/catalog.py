"""Bundled groups with standard permutation generators.

Every entry carries its expected order, checked each time it is loaded.
Names are case-insensitive.  Besides the fixed entries, ``C<n>`` is the
cyclic group of order n and ``C<p>:C<q>`` (q dividing p-1) the
nonabelian group of order pq.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable

from .fileio import ParseError, parse_cycles, parse_group_text
from .group import GroupHandle, group_from_generators
from .perm import Permutation
from .subgroups import is_prime


class UnknownGroup(KeyError):
    pass


@dataclass(frozen=True)
class Entry:
    name: str
    degree: int
    order: int
    generators: tuple[str, ...] = ()
    description: str = ""
    datafile: str | None = None


def _cyc(n: int, start: int = 1) -> str:
    return "(" + ",".join(str(i) for i in range(start, start + n)) + ")"


_M11 = ("(1,2,3,4,5,6,7,8,9,10,11)", "(3,7,11,8)(4,10,5,6)")

ENTRIES = {
    e.name.upper(): e
    for e in [
        Entry("S3", 3, 6, ("(1,2,3)", "(1,2)"), "symmetric group of degree 3"),
        Entry("S4", 4, 24, ("(1,2,3,4)", "(1,2)"), "symmetric group of degree 4"),
        Entry("A4", 4, 12, ("(1,2,3)", "(2,3,4)"), "alternating group of degree 4"),
        Entry("A5", 5, 60, ("(1,2,3,4,5)", "(1,2,3)"), "alternating group of degree 5"),
        Entry("D8", 4, 8, ("(1,2,3,4)", "(1,3)"), "dihedral group of order 8"),
        Entry("Q8", 8, 8, ("(1,6,2,3)(4,7,8,5)", "(1,5,2,7)(3,4,6,8)"), "quaternion group, on the nonzero vectors of F_3^2"),
        Entry("SD16", 8, 16, ("(1,2,3,4,5,6,7,8)", "(2,4)(3,7)(6,8)"), "semidihedral group: r^8 = s^2 = 1, r^s = r^3"),
        Entry("SL23", 8, 24, ("(3,4,5)(6,8,7)", "(1,6,2,3)(4,7,8,5)"), "SL(2,3) on the nonzero vectors of F_3^2"),
        Entry(
            "GL23", 8, 48, ("(3,4,5)(6,8,7)", "(1,6,2,3)(4,7,8,5)", "(3,6)(4,7)(5,8)"), "GL(2,3) on the nonzero vectors of F_3^2"
        ),
        Entry("PSL27", 7, 168, ("(1,2,3,4,5,6,7)", "(3,5)(6,7)"), "PSL(2,7) = GL(3,2) on the points of the Fano plane"),
        Entry("3:8", 11, 24, ("(1,2,3)", "(1,2)(4,5,6,7,8,9,10,11)"), "C3 : C8 with the generator of C8 inverting C3"),
        Entry(
            "5x2S4",
            13,
            240,
            ("(3,4,5)(6,8,7)", "(1,6,2,3)(4,7,8,5)", "(3,6)(4,7)(5,8)", "(9,10,11,12,13)"),
            "C5 x GL(2,3), GL(2,3) being a double cover of S4",
        ),
        Entry("M11", 11, 7920, _M11, "Mathieu group M11"),
        Entry("M12", 12, 95040, _M11 + ("(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)",), "Mathieu group M12"),
        Entry(
            "M22",
            22,
            443520,
            (
                "(1,2,3,4,5,6,7,8,9,10,11)(12,13,14,15,16,17,18,19,20,21,22)",
                "(1,4,5,9,3)(2,8,10,7,6)(12,15,16,20,14)(13,19,21,18,17)",
                "(1,21)(2,10,8,6)(3,13,4,17)(5,19,9,18)(11,22)(12,14,16,20)",
            ),
            "Mathieu group M22",
        ),
        Entry(
            "M23",
            23,
            10200960,
            (_cyc(23), "(3,17,10,7,9)(4,13,14,19,5)(8,18,11,12,23)(15,20,22,21,16)"),
            "Mathieu group M23",
        ),
        Entry("J2", 100, 604800, (), "Hall-Janko group J2 on 100 points", "j2.txt"),
    ]
}

ALIASES = {
    "SL(2,3)": "SL23",
    "PSL(2,7)": "PSL27",
    "L27": "PSL27",
    "L2(7)": "PSL27",
    "GL(2,3)": "GL23",
    "SYM3": "S3",
    "SYM4": "S4",
    "ALT4": "A4",
    "ALT5": "A5",
    "5X2.S4": "5x2S4".upper(),
    "3X8": "3:8",
}

_CN = re.compile(r"^C(\d+)$")
_CPQ = re.compile(r"^C(\d+):C(\d+)$")


def _cyclic(n: int) -> GroupHandle:
    if n < 1:
        raise UnknownGroup(f"C{n}")
    if n == 1:
        return GroupHandle(1, ())
    return group_from_generators(n, [Permutation([(i + 1) % n for i in range(n)])])


def metacyclic(p: int, q: int) -> GroupHandle:
    """C_p : C_q on p points: x -> x+1 and x -> a x with a of order q mod p."""
    if not is_prime(p) or q < 2 or (p - 1) % q:
        raise UnknownGroup(f"C{p}:C{q} needs p prime and q dividing p-1")
    a = next(a for a in range(2, p) if pow(a, q, p) == 1 and all(pow(a, d, p) != 1 for d in range(1, q)))
    x = Permutation([(i + 1) % p for i in range(p)])
    y = Permutation([(a * i) % p for i in range(p)])
    return group_from_generators(p, [x, y])


def canonical_name(name: str) -> str:
    key = name.strip().upper()
    return ALIASES.get(key, key)


@lru_cache(maxsize=None)
def _load(key: str) -> GroupHandle:
    m = _CN.match(key)
    if m:
        return _cyclic(int(m.group(1)))
    m = _CPQ.match(key)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        G = metacyclic(p, q)
        if G.order() != p * q:
            raise ParseError(f"catalog entry C{p}:C{q} has order {G.order()}")
        return G
    entry = ENTRIES.get(key)
    if entry is None:
        raise UnknownGroup(key)
    if entry.datafile:
        text = resources.files("endotrivial").joinpath("data", entry.datafile).read_text()
        gens = parse_group_text(text).generators
    else:
        gens = [parse_cycles(g, entry.degree) for g in entry.generators]
    G = group_from_generators(entry.degree, gens)
    if G.order() != entry.order:
        raise ParseError(f"catalog entry {entry.name}: order {G.order()}, expected {entry.order}")
    return G


def load_catalog(name: str) -> GroupHandle:
    return _load(canonical_name(name))


def catalog_names() -> list[str]:
    return [e.name for e in ENTRIES.values()]


def expected_order(name: str) -> int | None:
    key = canonical_name(name)
    if key in ENTRIES:
        return ENTRIES[key].order
    m = _CN.match(key)
    if m:
        return int(m.group(1))
    m = _CPQ.match(key)
    if m:
        return int(m.group(1)) * int(m.group(2))
    return None


# the C_p : C_q constructions used by the cyclic-Sylow checks
METACYCLIC = ["C3:C2", "C5:C2", "C5:C4", "C7:C3", "C7:C2", "C11:C5", "C13:C3"]


@dataclass(frozen=True)
class TableRow:
    name: str
    prime: int
    tag: str
    t_group: tuple[int, ...]
    quotient: str  # N/K as printed in the table
    extended: bool = False
    derived: bool = False  # not a table row; value from an independent oracle


TABLE1 = {
    (r.name, r.prime): r
    for r in [
        TableRow("M11", 2, "SN", (), "1"),
        TableRow("M11", 3, "TI", (2, 2), "SD16"),
        TableRow("M12", 3, "KCIRC", (), "1"),
        TableRow("M22", 3, "R2", (2, 2), "Q8"),
        TableRow("J2", 5, "R2", (2,), "2"),
        TableRow("M23", 3, "R2", (2,), "2", extended=True),
        TableRow("J2", 3, "NNC", (2,), "2", extended=True),
        # further p = 2 entries of the same table, within desk scale
        TableRow("M12", 2, "SN", (), "1"),
        TableRow("M22", 2, "SN", (), "1"),
        TableRow("M23", 2, "SN", (), "1", extended=True),
        TableRow("J2", 2, "KCIRC", (), "1", extended=True),
        TableRow("A5", 2, "TI", (3,), "3", derived=True),
    ]
}


def table_row(name: str, prime: int) -> TableRow | None:
    return TABLE1.get((canonical_name(name), prime))


def all_catalog_groups(max_order: int | None = None) -> list[tuple[str, GroupHandle]]:
    names = catalog_names() + METACYCLIC + ["C1", "C2", "C4", "C6", "C9", "C12"]
    out = []
    for n in names:
        order = expected_order(n)
        if max_order is not None and order is not None and order > max_order:
            continue
        out.append((n, load_catalog(n)))
    return out
