# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Same contracts as :mod:`eqfree._pykernels`.  The census uses 64-bit
counters and raises OverflowError when a count would not fit, letting the
dispatcher fall back to the arbitrary-precision Python path.
"""

from libc.stdlib cimport calloc, free

BACKEND = "c"

cdef long long LLONG_MAX = 0x7FFFFFFFFFFFFFFF


cdef inline long long checked_add(long long a, long long b) except? -1:
    if a > LLONG_MAX - b:
        raise OverflowError("census count exceeds 64 bits")
    return a + b


cdef inline long long checked_mul(long long a, long long b) except? -1:
    if a != 0 and b > LLONG_MAX // a:
        raise OverflowError("census count exceeds 64 bits")
    return a * b


def census_dp(int nt_count, int start, int eps_start, topo, nonunit, unit,
              int max_body_nts, int max_len):
    """64-bit variant of the census dynamic program (bodies with at most
    two nonterminals; the dispatcher routes wider bodies to Python)."""
    if max_body_nts > 2:
        raise ValueError("compiled census supports at most 2 nonterminals per body")

    cdef int n_topo = len(topo)
    cdef int i, j, n, l, t, a, b, rest, s, cols
    cdef long long total, term

    # CSR layout for the per-nonterminal production lists.
    cdef int total_nonunit = 0, total_unit = 0
    for n in range(nt_count):
        total_nonunit += len(nonunit[n])
        total_unit += len(unit[n])

    cdef int *topo_arr = <int *> calloc(n_topo if n_topo else 1, sizeof(int))
    cdef int *nu_start = <int *> calloc(nt_count + 1, sizeof(int))
    cdef int *nu_t = <int *> calloc(total_nonunit if total_nonunit else 1, sizeof(int))
    cdef int *nu_a = <int *> calloc(total_nonunit if total_nonunit else 1, sizeof(int))
    cdef int *nu_b = <int *> calloc(total_nonunit if total_nonunit else 1, sizeof(int))
    cdef int *u_start = <int *> calloc(nt_count + 1, sizeof(int))
    cdef int *u_tgt = <int *> calloc(total_unit if total_unit else 1, sizeof(int))
    cdef long long *counts = <long long *> calloc(
        (<size_t> nt_count) * (max_len + 1), sizeof(long long))
    if (topo_arr is NULL or nu_start is NULL or nu_t is NULL or nu_a is NULL
            or nu_b is NULL or u_start is NULL or u_tgt is NULL or counts is NULL):
        raise MemoryError()

    try:
        for i in range(n_topo):
            topo_arr[i] = topo[i]
        i = 0
        j = 0
        for n in range(nt_count):
            nu_start[n] = i
            for entry in nonunit[n]:
                nu_t[i] = entry[0]
                nts = entry[1]
                if len(nts) == 0:
                    nu_a[i] = -1
                    nu_b[i] = -1
                elif len(nts) == 1:
                    nu_a[i] = nts[0]
                    nu_b[i] = -1
                else:
                    nu_a[i] = nts[0]
                    nu_b[i] = nts[1]
                i += 1
            u_start[n] = j
            for tgt in unit[n]:
                u_tgt[j] = tgt
                j += 1
        nu_start[nt_count] = i
        u_start[nt_count] = j

        cols = max_len + 1
        for l in range(1, max_len + 1):
            for i in range(n_topo):
                n = topo_arr[i]
                total = 0
                for j in range(nu_start[n], nu_start[n + 1]):
                    t = nu_t[j]
                    rest = l - t
                    a = nu_a[j]
                    b = nu_b[j]
                    if a < 0:
                        if rest == 0:
                            total = checked_add(total, 1)
                    elif b < 0:
                        if rest >= 1:
                            total = checked_add(total, counts[a * cols + rest])
                    else:
                        for s in range(1, rest):
                            term = checked_mul(counts[a * cols + s],
                                               counts[b * cols + rest - s])
                            total = checked_add(total, term)
                for j in range(u_start[n], u_start[n + 1]):
                    total = checked_add(total, counts[u_tgt[j] * cols + l])
                counts[n * cols + l] = total

        out = [0] * (max_len + 1)
        out[0] = eps_start
        for l in range(1, max_len + 1):
            out[l] = counts[start * cols + l]
        return out
    finally:
        free(topo_arr)
        free(nu_start)
        free(nu_t)
        free(nu_a)
        free(nu_b)
        free(u_start)
        free(u_tgt)
        free(counts)


def scan_censuses(images, int m, int max_len, int var):
    """Depth-first sweep over every word up to ``max_len`` over the 2m
    signed source letters, counting kernel words per length: among all
    words, among reduced words, and cyclically reduced per count of the
    marked generator."""
    cdef int n_letters = 2 * m
    cdef int img_max = 0
    cdef int i, k

    all_counts = [0] * (max_len + 1)
    red_counts = [0] * (max_len + 1)
    cyc = [[0] * (max_len + 1) for _ in range(max_len + 1)]
    all_counts[0] = 1
    red_counts[0] = 1
    cyc[0][0] = 1
    if max_len == 0 or m == 0:
        return all_counts, red_counts, cyc

    expanded = []
    for i in range(1, m + 1):
        expanded.append(tuple(images[i - 1]))
        expanded.append(tuple(-c for c in reversed(images[i - 1])))
    for w in expanded:
        if len(w) > img_max:
            img_max = len(w)

    cdef int *letters = <int *> calloc(n_letters, sizeof(int))
    cdef int *img_flat = <int *> calloc(
        n_letters * img_max if img_max else 1, sizeof(int))
    cdef int *img_len = <int *> calloc(n_letters, sizeof(int))
    cdef int *res = <int *> calloc(max_len * img_max + 2, sizeof(int))
    cdef int *undo_flat = <int *> calloc(
        (<size_t> max_len) * (img_max if img_max else 1) + 1, sizeof(int))
    cdef int *undo_len = <int *> calloc(max_len, sizeof(int))
    cdef int *word = <int *> calloc(max_len, sizeof(int))
    cdef int *reduced = <int *> calloc(max_len + 1, sizeof(int))
    cdef int *xcnt = <int *> calloc(max_len + 1, sizeof(int))
    cdef int *next_choice = <int *> calloc(max_len, sizeof(int))
    cdef long long *c_all = <long long *> calloc(max_len + 1, sizeof(long long))
    cdef long long *c_red = <long long *> calloc(max_len + 1, sizeof(long long))
    cdef long long *c_cyc = <long long *> calloc(
        (<size_t> (max_len + 1)) * (max_len + 1), sizeof(long long))
    if (letters is NULL or img_flat is NULL or img_len is NULL or res is NULL
            or undo_flat is NULL or undo_len is NULL or word is NULL
            or reduced is NULL or xcnt is NULL or next_choice is NULL
            or c_all is NULL or c_red is NULL or c_cyc is NULL):
        raise MemoryError()

    cdef int d, li, c, t, rlen, l, red_here, ops, cols
    try:
        for i in range(m):
            letters[2 * i] = i + 1
            letters[2 * i + 1] = -(i + 1)
        for i in range(n_letters):
            w = expanded[i]
            img_len[i] = len(w)
            for k in range(len(w)):
                img_flat[i * img_max + k] = w[k]

        cols = max_len + 1
        reduced[0] = 1
        xcnt[0] = 0
        rlen = 0
        d = 0
        next_choice[0] = 0
        while True:
            if next_choice[d] == n_letters:
                if d == 0:
                    break
                d -= 1
                ops = undo_len[d]
                for k in range(ops - 1, -1, -1):
                    t = undo_flat[d * img_max + k]
                    if t == 0:
                        rlen -= 1
                    else:
                        res[rlen] = t
                        rlen += 1
                undo_len[d] = 0
                continue
            li = next_choice[d]
            next_choice[d] += 1
            c = letters[li]
            ops = 0
            for k in range(img_len[li]):
                t = img_flat[li * img_max + k]
                if rlen > 0 and res[rlen - 1] == -t:
                    rlen -= 1
                    undo_flat[d * img_max + ops] = res[rlen]
                else:
                    res[rlen] = t
                    rlen += 1
                    undo_flat[d * img_max + ops] = 0
                ops += 1
            undo_len[d] = ops
            word[d] = c
            l = d + 1
            if reduced[d] == 1 and (d == 0 or word[d - 1] != -c):
                red_here = 1
            else:
                red_here = 0
            reduced[l] = red_here
            if c == var or c == -var:
                xcnt[l] = xcnt[d] + 1
            else:
                xcnt[l] = xcnt[d]
            if rlen == 0:
                c_all[l] += 1
                if red_here == 1:
                    c_red[l] += 1
                    if word[0] != -c:
                        c_cyc[l * cols + xcnt[l]] += 1
            if l < max_len:
                d += 1
                next_choice[d] = 0
            else:
                ops = undo_len[d]
                for k in range(ops - 1, -1, -1):
                    t = undo_flat[d * img_max + k]
                    if t == 0:
                        rlen -= 1
                    else:
                        res[rlen] = t
                        rlen += 1
                undo_len[d] = 0

        for l in range(max_len + 1):
            if c_all[l]:
                all_counts[l] = c_all[l]
            if c_red[l]:
                red_counts[l] = c_red[l]
        for l in range(max_len + 1):
            row = cyc[l]
            for k in range(max_len + 1):
                if c_cyc[l * cols + k]:
                    row[k] = c_cyc[l * cols + k]
        return all_counts, red_counts, cyc
    finally:
        free(letters)
        free(img_flat)
        free(img_len)
        free(res)
        free(undo_flat)
        free(undo_len)
        free(word)
        free(reduced)
        free(xcnt)
        free(next_choice)
        free(c_all)
        free(c_red)
        free(c_cyc)
