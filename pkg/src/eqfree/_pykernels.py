"""Pure-Python implementations of the hot kernels.

Selected by :mod:`eqfree.kernels` when the compiled extension is not
available.  Semantics are identical to :mod:`eqfree._ckernels`; the
equivalence is asserted by the test suite and timed by
``benchmarks/bench_kernels.py``.  Counts here are arbitrary-precision.
"""

from __future__ import annotations

BACKEND = "python"


def census_dp(nt_count, start, eps_start, topo, nonunit, unit, max_body_nts, max_len):
    """Per-length derivation counts of the start symbol, lengths
    0..max_len, from the preprocessed epsilon-free unit-acyclic program.

    ``nonunit[n]`` holds (terminal_count, nt_ids) bodies; ``unit[n]``
    holds unit targets, acyclic, resolved within a length in ``topo``
    order.  Every referenced nonterminal derives only words of length
    >= 1, so the recurrence is well-founded on the length.
    """
    counts = [[0] * (max_len + 1) for _ in range(nt_count)]
    for l in range(1, max_len + 1):
        for n in topo:
            total = 0
            for t, nts in nonunit[n]:
                rest = l - t
                k = len(nts)
                if k == 0:
                    if rest == 0:
                        total += 1
                elif k == 1:
                    if rest >= 1:
                        total += counts[nts[0]][rest]
                elif k == 2:
                    ca = counts[nts[0]]
                    cb = counts[nts[1]]
                    total += sum(
                        ca[j] * cb[rest - j] for j in range(1, rest)
                    )
                else:
                    total += _ways(counts, nts, 0, rest)
            for a in unit[n]:
                total += counts[a][l]
            counts[n][l] = total
    out = [0] * (max_len + 1)
    out[0] = eps_start
    for l in range(1, max_len + 1):
        out[l] = counts[start][l]
    return out


def _ways(counts, nts, pos, rest):
    k = len(nts) - pos
    if rest < k:
        return 0
    if k == 1:
        return counts[nts[pos]][rest]
    total = 0
    for j in range(1, rest - k + 2):
        c = counts[nts[pos]][j]
        if c:
            total += c * _ways(counts, nts, pos + 1, rest - j)
    return total


def scan_censuses(images, m, max_len, var):
    """Exhaustive censuses of the kernel language of the letter map
    ``images`` (one reduced word per positive source letter).

    Walks every word over the 2m source letters up to ``max_len`` in
    depth-first length-lexicographic order, keeping the freely reduced
    image incrementally with an undo log.  Returns three tables indexed
    by length: kernel words among all words, among reduced words, and a
    matrix ``cyc[l][d]`` of cyclically reduced kernel words with exactly
    ``d`` occurrences of the ``var``-th source generator.
    """
    letters = []
    img = []
    for i in range(1, m + 1):
        letters.append(i)
        img.append(tuple(images[i - 1]))
        letters.append(-i)
        img.append(tuple(-c for c in reversed(images[i - 1])))
    n_letters = 2 * m

    all_counts = [0] * (max_len + 1)
    red_counts = [0] * (max_len + 1)
    cyc = [[0] * (max_len + 1) for _ in range(max_len + 1)]
    all_counts[0] = 1
    red_counts[0] = 1
    cyc[0][0] = 1
    if max_len == 0 or m == 0:
        return all_counts, red_counts, cyc

    res: list[int] = []
    undo: list[list[int]] = [[] for _ in range(max_len)]
    word = [0] * max_len
    reduced = [True] * (max_len + 1)
    xcnt = [0] * (max_len + 1)
    next_choice = [0] * max_len

    d = 0
    while True:
        if next_choice[d] == n_letters:
            if d == 0:
                break
            d -= 1
            ops = undo[d]
            for op in reversed(ops):
                if op == 0:
                    res.pop()
                else:
                    res.append(op)
            ops.clear()
            continue
        li = next_choice[d]
        next_choice[d] += 1
        c = letters[li]
        ops = undo[d]
        for t in img[li]:
            if res and res[-1] == -t:
                ops.append(res.pop())
            else:
                res.append(t)
                ops.append(0)
        word[d] = c
        l = d + 1
        red_here = reduced[d] and (d == 0 or word[d - 1] != -c)
        reduced[l] = red_here
        xcnt[l] = xcnt[d] + (1 if abs(c) == var else 0)
        if not res:
            all_counts[l] += 1
            if red_here:
                red_counts[l] += 1
                if word[0] != -c:
                    cyc[l][xcnt[l]] += 1
        if l < max_len:
            d += 1
            next_choice[d] = 0
        else:
            for op in reversed(ops):
                if op == 0:
                    res.pop()
                else:
                    res.append(op)
            ops.clear()
    return all_counts, red_counts, cyc
