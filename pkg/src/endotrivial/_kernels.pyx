# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled chain-closure BFS and weak-homomorphism pair scan.

Elements of G are handled by rank (see kernels.RankTables); a product is
ranked from its base images only, which costs k^2 table lookups for a base
of length k.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc, realloc

cnp.import_array()


cdef inline int64_t _rank(int64_t* imgs, int k, int n, int m,
                          const int32_t* pos, const int32_t* uinv,
                          const int64_t* sizes) noexcept nogil:
    # imgs is clobbered
    cdef int64_t r = 0
    cdef int i, j
    cdef int64_t d
    cdef const int32_t* row
    for i in range(k):
        d = pos[i * n + imgs[i]]
        r = r * sizes[i] + d
        row = uinv + (i * m + d) * n
        for j in range(i + 1, k):
            imgs[j] = row[imgs[j]]
    return r


cdef inline void _images(int64_t r, int64_t* out, int64_t* digits, int k, int n, int m,
                         const int32_t* base, const int32_t* u,
                         const int64_t* sizes) noexcept nogil:
    cdef int i, j
    cdef int64_t p
    for i in range(k - 1, -1, -1):
        digits[i] = r % sizes[i]
        r = r // sizes[i]
    for j in range(k):
        p = base[j]
        for i in range(k - 1, -1, -1):
            p = u[(i * m + digits[i]) * n + p]
        out[j] = p


def chain_bfs(const int32_t[::1] base, const int32_t[:, ::1] pos,
              const int32_t[:, :, ::1] u, const int32_t[:, :, ::1] uinv,
              const int64_t[::1] sizes, int64_t order,
              const int64_t[::1] move_offsets, const int32_t[::1] move_index,
              const int32_t[:, ::1] xperm, const int32_t[:, ::1] xconj,
              const uint8_t[::1] in_n, const int32_t[::1] starts, int64_t cap,
              bint restart=False):
    cdef int k = base.shape[0]
    cdef int n = pos.shape[1] if k else 1
    cdef int m = u.shape[1] if k else 1
    cdef Py_ssize_t n_starts = starts.shape[0], si
    cdef int64_t n_s = move_offsets.shape[0] - 1
    cdef int64_t total = n_s * order
    cdef Py_ssize_t nwords = (total + 63) // 64
    accepted_arr = np.zeros(order, dtype=np.uint8)
    cdef uint8_t[::1] accepted = accepted_arr
    cdef uint64_t* visited = <uint64_t*> malloc(nwords * sizeof(uint64_t))
    cdef int64_t cap_stack = 1024
    cdef int64_t* stack = <int64_t*> malloc(cap_stack * sizeof(int64_t))
    cdef int64_t* imgs = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    cdef int64_t* nimgs = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    cdef int64_t* digits = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    if visited == NULL or stack == NULL or imgs == NULL or nimgs == NULL or digits == NULL:
        free(visited); free(stack); free(imgs); free(nimgs); free(digits)
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(nwords):
        visited[i] = 0
    cdef int64_t top = 0, count = 0, sid, t, r, t2, r2, sid2, a
    cdef int32_t x
    cdef int j
    cdef const int32_t* pos_p = &pos[0, 0] if k else NULL
    cdef const int32_t* u_p = &u[0, 0, 0] if k else NULL
    cdef const int32_t* uinv_p = &uinv[0, 0, 0] if k else NULL
    cdef const int32_t* base_p = &base[0] if k else NULL
    cdef const int64_t* sizes_p = &sizes[0] if k else NULL
    cdef int64_t* grown
    cdef bint overflow = False
    accepted[0] = 1
    for i in range(starts.shape[0]):
        sid = <int64_t> starts[i] * order
        if not (visited[sid >> 6] >> (sid & 63)) & 1:
            visited[sid >> 6] |= (<uint64_t> 1) << (sid & 63)
            count += 1
            if top == cap_stack:
                cap_stack *= 2
                grown = <int64_t*> realloc(stack, cap_stack * sizeof(int64_t))
                if grown == NULL:
                    free(visited); free(stack); free(imgs); free(nimgs); free(digits)
                    raise MemoryError()
                stack = grown
            stack[top] = sid
            top += 1
    with nogil:
        while top > 0 and not overflow:
            top -= 1
            sid = stack[top]
            t = sid // order
            r = sid - t * order
            _images(r, imgs, digits, k, n, m, base_p, u_p, sizes_p)
            for a in range(move_offsets[t], move_offsets[t + 1]):
                x = move_index[a]
                for j in range(k):
                    nimgs[j] = xperm[x, imgs[j]]
                r2 = _rank(nimgs, k, n, m, pos_p, uinv_p, sizes_p)
                t2 = xconj[x, t]
                sid2 = t2 * order + r2
                if (visited[sid2 >> 6] >> (sid2 & 63)) & 1:
                    continue
                visited[sid2 >> 6] |= (<uint64_t> 1) << (sid2 & 63)
                count += 1
                if count > cap:
                    overflow = True
                    break
                if top + n_starts + 1 >= cap_stack:
                    cap_stack = 2 * cap_stack + n_starts
                    grown = <int64_t*> realloc(stack, cap_stack * sizeof(int64_t))
                    if grown == NULL:
                        overflow = True
                        count = -2
                        break
                    stack = grown
                stack[top] = sid2
                top += 1
                if in_n[r2] and not accepted[r2]:
                    accepted[r2] = 1
                    if restart:
                        # a fresh witness may start a new chain at r2
                        for si in range(n_starts):
                            sid = <int64_t> starts[si] * order + r2
                            if (visited[sid >> 6] >> (sid & 63)) & 1:
                                continue
                            visited[sid >> 6] |= (<uint64_t> 1) << (sid & 63)
                            count += 1
                            stack[top] = sid
                            top += 1
                        if count > cap:
                            overflow = True
                            break
    free(visited); free(stack); free(imgs); free(nimgs); free(digits)
    if count == -2:
        raise MemoryError()
    if overflow:
        return accepted_arr, -1
    return accepted_arr, count


def pair_check(const int32_t[::1] base, const int32_t[:, ::1] pos,
               const int32_t[:, :, ::1] uinv, const int64_t[::1] sizes,
               const int32_t[:, ::1] elems, const uint64_t[:, ::1] masks,
               int ident_word, int ident_bit, const int64_t[::1] values, int64_t modulus):
    cdef int k = base.shape[0]
    cdef int n = elems.shape[1]
    cdef int m = uinv.shape[1] if k else 1
    cdef int64_t order = elems.shape[0]
    cdef int words = masks.shape[1]
    cdef int64_t* imgs = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    cdef int64_t* xb = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    if imgs == NULL or xb == NULL:
        free(imgs); free(xb)
        raise MemoryError()
    cdef const int32_t* pos_p = &pos[0, 0] if k else NULL
    cdef const int32_t* uinv_p = &uinv[0, 0, 0] if k else NULL
    cdef const int64_t* sizes_p = &sizes[0] if k else NULL
    cdef uint64_t idclear = ~((<uint64_t> 1) << ident_bit)
    cdef int64_t x, y, xy, count = 0, diff
    cdef int64_t bad_x = -1, bad_y = -1
    cdef int j, w
    cdef uint64_t s
    cdef bint shared
    with nogil:
        for x in range(order):
            for j in range(k):
                xb[j] = elems[x, base[j]]
            for y in range(order):
                for j in range(k):
                    imgs[j] = elems[y, xb[j]]
                xy = _rank(imgs, k, n, m, pos_p, uinv_p, sizes_p)
                shared = False
                for w in range(words):
                    s = masks[y, w] & masks[xy, w]
                    if w == ident_word:
                        s = s & idclear
                    if s:
                        shared = True
                        break
                if not shared:
                    continue
                count += 1
                diff = (values[x] + values[y] - values[xy]) % modulus
                if diff != 0:
                    bad_x = x
                    bad_y = y
                    break
            if bad_x >= 0:
                break
    free(imgs); free(xb)
    return bad_x, bad_y, count
