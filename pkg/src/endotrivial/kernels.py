"""Hot loops, compiled when the extension is available.

``BACKEND`` is ``"cython"`` when the compiled module imported, else
``"numpy"``.  Setting ``ENDOTRIVIAL_PURE_PYTHON=1`` forces the fallback.
Both backends return identical results; the tests run both.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .caps import CapExceeded
from .group import GroupHandle

log = logging.getLogger(__name__)

_compiled = None
if os.environ.get("ENDOTRIVIAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        log.debug("compiled kernels unavailable, using numpy fallback")
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


@dataclass
class RankTables:
    """Array form of a stabilizer chain, enough to rank elements from base images.

    Ranks follow :meth:`GroupHandle.rank`: the first level is the most
    significant digit and ``g = u_{k-1} ... u_0``.
    """

    base: np.ndarray  # (k,) base points
    pos: np.ndarray  # (k, n) orbit position of a point, -1 outside the orbit
    u: np.ndarray  # (k, m, n) transversal elements by orbit position
    uinv: np.ndarray  # (k, m, n) their inverses
    sizes: np.ndarray  # (k,) orbit lengths
    order: int
    degree: int

    @classmethod
    def from_group(cls, G: GroupHandle) -> "RankTables":
        levels = G._levels
        k, n = len(levels), G.degree
        m = max((len(lv[1]) for lv in levels), default=1)
        base = np.array([lv[0] for lv in levels], dtype=np.int32)
        pos = np.full((max(k, 1), n), -1, dtype=np.int32)
        u = np.tile(np.arange(n, dtype=np.int32), (max(k, 1), m, 1))
        uinv = u.copy()
        sizes = np.ones(max(k, 1), dtype=np.int64)
        for i, (_, orbit, _, trans, tinv) in enumerate(levels):
            sizes[i] = len(orbit)
            for j, pt in enumerate(orbit):
                pos[i, pt] = j
                u[i, j] = trans[pt]
                uinv[i, j] = tinv[pt]
        if k == 0:
            base = np.zeros(0, dtype=np.int32)
            pos, u, uinv, sizes = pos[:0], u[:0], uinv[:0], sizes[:0]
        return cls(base, pos, np.ascontiguousarray(u), np.ascontiguousarray(uinv), sizes, G.order(), n)

    def rank_images(self, imgs: np.ndarray) -> np.ndarray:
        """Ranks of elements given their base images, shape (count, k)."""
        return _kernels_py.rank_from_images(self, imgs)

    def base_images(self, ranks: np.ndarray) -> np.ndarray:
        return _kernels_py.images_from_rank(self, ranks)


def chain_bfs(
    tables: RankTables,
    move_offsets: np.ndarray,
    move_index: np.ndarray,
    xperm: np.ndarray,
    xconj: np.ndarray,
    in_n: np.ndarray,
    starts: np.ndarray,
    cap: int,
    backend: str | None = None,
    restart: bool = True,
) -> tuple[np.ndarray, int]:
    """Closure of the chain states ``(t, w)``.

    From state ``(t, w)`` every move ``x`` listed for ``t`` leads to
    ``(xconj[x, t], w * xperm[x])``.  Returns a 0/1 array over the ranks of
    G marking the reachable ``w`` that lie in ``in_n``, and the number of
    states visited.  With ``restart`` each newly accepted ``w`` also seeds
    ``(t, w)`` for every start ``t``, so chains concatenate and the accepted
    set is the subgroup they generate; without it the accepted set is the
    bare set of chain products.  Raises :class:`CapExceeded` past ``cap``.
    """
    impl = _pick(backend)
    args = (
        np.ascontiguousarray(tables.base, dtype=np.int32),
        np.ascontiguousarray(tables.pos, dtype=np.int32),
        np.ascontiguousarray(tables.u, dtype=np.int32),
        np.ascontiguousarray(tables.uinv, dtype=np.int32),
        np.ascontiguousarray(tables.sizes, dtype=np.int64),
        int(tables.order),
        np.ascontiguousarray(move_offsets, dtype=np.int64),
        np.ascontiguousarray(move_index, dtype=np.int32),
        np.ascontiguousarray(xperm, dtype=np.int32),
        np.ascontiguousarray(xconj, dtype=np.int32),
        np.ascontiguousarray(in_n, dtype=np.uint8),
        np.ascontiguousarray(starts, dtype=np.int32),
        int(cap),
    )
    accepted, states = impl.chain_bfs(*args, restart=bool(restart))
    if states < 0:
        raise CapExceeded("bfs_states", cap)
    return np.asarray(accepted, dtype=np.uint8), int(states)


def pair_check(
    tables: RankTables,
    elems: np.ndarray,
    masks: np.ndarray,
    ident_word: int,
    ident_bit: int,
    values: np.ndarray,
    modulus: int,
    backend: str | None = None,
) -> tuple[int, int, int]:
    """Scan all pairs ``(x, y)`` of G for the multiplicativity axiom.

    ``elems[r]`` is the element of rank ``r``; ``masks[r]`` is a bitset over
    the elements of S marking ``S ∩ S^g``.  A pair is constrained when the
    masks of ``y`` and ``xy`` share a non-identity bit; then
    ``values[x] + values[y] == values[xy]`` must hold modulo ``modulus``.
    Returns ``(x, y, constrained_count)`` with ``x = y = -1`` when no pair
    fails; otherwise the lexicographically first failing pair.
    """
    impl = _pick(backend)
    x, y, count = impl.pair_check(
        np.ascontiguousarray(tables.base, dtype=np.int32),
        np.ascontiguousarray(tables.pos, dtype=np.int32),
        np.ascontiguousarray(tables.uinv, dtype=np.int32),
        np.ascontiguousarray(tables.sizes, dtype=np.int64),
        np.ascontiguousarray(elems, dtype=np.int32),
        np.ascontiguousarray(masks, dtype=np.uint64),
        int(ident_word),
        int(ident_bit),
        np.ascontiguousarray(values, dtype=np.int64),
        int(modulus),
    )
    return int(x), int(y), int(count)


def _pick(backend: str | None):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend in ("numpy", "python"):
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def available_backends() -> list[str]:
    return (["cython"] if _compiled is not None else []) + ["numpy"]
