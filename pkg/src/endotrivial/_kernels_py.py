"""numpy versions of the compiled kernels (same signatures as ``_kernels``)."""

from __future__ import annotations

import numpy as np


def _rank(pos, uinv, sizes, imgs: np.ndarray) -> np.ndarray:
    imgs = np.array(imgs, dtype=np.int64, copy=True)
    k = imgs.shape[1]
    r = np.zeros(imgs.shape[0], dtype=np.int64)
    for i in range(k):
        d = pos[i][imgs[:, i]].astype(np.int64)
        r = r * int(sizes[i]) + d
        if i + 1 < k:
            imgs[:, i + 1 :] = uinv[i][d[:, None], imgs[:, i + 1 :]]
    return r


def _images(base, u, sizes, ranks: np.ndarray) -> np.ndarray:
    ranks = np.array(ranks, dtype=np.int64, copy=True)
    k = len(base)
    digits = np.empty((k, len(ranks)), dtype=np.int64)
    for i in range(k - 1, -1, -1):
        digits[i] = ranks % int(sizes[i])
        ranks //= int(sizes[i])
    imgs = np.empty((len(digits[0]) if k else len(ranks), k), dtype=np.int64)
    for j in range(k):
        p = np.full(imgs.shape[0], base[j], dtype=np.int64)
        for i in range(k - 1, -1, -1):
            p = u[i][digits[i], p]
        imgs[:, j] = p
    return imgs


def rank_from_images(tables, imgs):
    return _rank(tables.pos, tables.uinv, tables.sizes, np.asarray(imgs).reshape(-1, len(tables.base)))


def images_from_rank(tables, ranks):
    return _images(tables.base, tables.u, tables.sizes, np.asarray(ranks))


def chain_bfs(base, pos, u, uinv, sizes, order, move_offsets, move_index, xperm, xconj, in_n, starts, cap, restart=False):
    n_moves, n_s = xconj.shape[0], len(move_offsets) - 1
    allow = np.zeros((n_moves, n_s), dtype=bool)
    for t in range(len(move_offsets) - 1):
        allow[move_index[move_offsets[t] : move_offsets[t + 1]], t] = True
    visited = np.zeros(n_s * order, dtype=bool)
    accepted = np.zeros(order, dtype=np.uint8)
    accepted[0] = 1
    T = np.unique(np.asarray(starts, dtype=np.int64))
    R = np.zeros(len(T), dtype=np.int64)
    visited[T * order] = True
    count = len(T)
    if count > cap:
        return accepted, -1
    while len(T):
        imgs = _images(base, u, sizes, R)
        found = []
        for x in range(n_moves):
            sel = allow[x][T]
            if not sel.any():
                continue
            nt = xconj[x][T[sel]].astype(np.int64)
            nr = _rank(pos, uinv, sizes, xperm[x][imgs[sel]])
            found.append(nt * order + nr)
        if not found:
            break
        ids = np.unique(np.concatenate(found))
        ids = ids[~visited[ids]]
        visited[ids] = True
        count += len(ids)
        if count > cap:
            return accepted, -1
        T, R = ids // order, ids % order
        hit = np.unique(R[in_n[R] != 0])
        fresh = hit[accepted[hit] == 0]
        accepted[fresh] = 1
        if restart and len(fresh):
            # a fresh witness may start a new chain at each new element of N
            extra = (np.asarray(starts, dtype=np.int64)[:, None] * order + fresh[None, :]).ravel()
            extra = np.unique(extra[~visited[extra]])
            visited[extra] = True
            count += len(extra)
            if count > cap:
                return accepted, -1
            ids = np.concatenate([ids, extra])
            T, R = ids // order, ids % order
    return accepted, count


def pair_check(base, pos, uinv, sizes, elems, masks, ident_word, ident_bit, values, modulus):
    order = len(elems)
    xb = elems[:, base]
    clear = np.full(masks.shape[1], np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
    clear[ident_word] ^= np.uint64(1) << np.uint64(ident_bit)
    count = 0
    for x in range(order):
        imgs = elems[:, xb[x]]
        xy = _rank(pos, uinv, sizes, imgs)
        shared = (masks & masks[xy]) & clear
        con = shared.any(axis=1)
        bad = con & ((values[x] + values - values[xy]) % modulus != 0)
        if bad.any():
            y = int(np.argmax(bad))
            return x, y, count + int(con[: y + 1].sum())
        count += int(con.sum())
    return -1, -1, count
