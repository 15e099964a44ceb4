"""Trivial-source endotrivial groups T(G,S) of finite permutation groups.

T(G,S) is computed as the abelianization of N_G(S)/K_G, where K_G is the
subgroup of the Sylow normalizer reached by chains through p-local
subgroups.  The pipeline runs on plain permutation generators.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .catalog import load_catalog
from .fileio import GroupFile, ParseError, ReportRecord, load_group, parse_cycles
from .group import GroupHandle, PermGroup, group_from_generators
from .kernels import BACKEND
from .kgroup import KReport, chain_closure_k, k_circle, resolve_k, t_group_report
from .perm import Permutation
from .structure import AbelianInvariants, abelian_invariants, abelianization
from .subgroups import normalizer, o_p_prime_residual, sylow
from .weakhom import (
    AlperinChain,
    WeakCharacter,
    alperin_decompose,
    is_weak_homomorphism,
    restriction_roundtrip_check,
    weak_extension,
)

__all__ = [
    "__version__",
    "BACKEND",
    "Caps",
    "DEFAULT_CAPS",
    "CapExceeded",
    "Permutation",
    "GroupHandle",
    "PermGroup",
    "group_from_generators",
    "sylow",
    "normalizer",
    "o_p_prime_residual",
    "AbelianInvariants",
    "abelianization",
    "abelian_invariants",
    "k_circle",
    "chain_closure_k",
    "resolve_k",
    "t_group_report",
    "KReport",
    "WeakCharacter",
    "AlperinChain",
    "is_weak_homomorphism",
    "alperin_decompose",
    "weak_extension",
    "restriction_roundtrip_check",
    "GroupFile",
    "ReportRecord",
    "ParseError",
    "parse_cycles",
    "load_group",
    "load_catalog",
]
