"""Induced-sorting (SA-IS) suffix array construction and Kasai LCP.

The heavy loops are numba kernels; the single recursion on the reduced LMS
string happens in Python.  ``sa_is`` takes an int64 array with values in
``[0, upper]`` and returns the suffix array of the string (no sentinel is
needed; the end of the string sorts below every symbol).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _classify(s, upper):
    n = s.size
    ls = np.zeros(n, dtype=np.bool_)
    for i in range(n - 2, -1, -1):
        if s[i] == s[i + 1]:
            ls[i] = ls[i + 1]
        else:
            ls[i] = s[i] < s[i + 1]
    sum_l = np.zeros(upper + 2, dtype=np.int64)
    sum_s = np.zeros(upper + 2, dtype=np.int64)
    for i in range(n):
        if not ls[i]:
            sum_s[s[i]] += 1
        else:
            sum_l[s[i] + 1] += 1
    for i in range(upper + 1):
        sum_s[i] += sum_l[i]
        if i < upper:
            sum_l[i + 1] += sum_s[i]
    return ls, sum_l, sum_s


@njit(cache=True)
def _induce(s, ls, sum_l, sum_s, lms, upper, sa):
    n = s.size
    sa[:] = -1
    buf = sum_s.copy()
    for d in lms:
        if d == n:
            continue
        sa[buf[s[d]]] = d
        buf[s[d]] += 1
    buf = sum_l.copy()
    sa[buf[s[n - 1]]] = n - 1
    buf[s[n - 1]] += 1
    for i in range(n):
        v = sa[i]
        if v >= 1 and not ls[v - 1]:
            sa[buf[s[v - 1]]] = v - 1
            buf[s[v - 1]] += 1
    buf = sum_l.copy()
    for i in range(n - 1, -1, -1):
        v = sa[i]
        if v >= 1 and ls[v - 1]:
            buf[s[v - 1] + 1] -= 1
            sa[buf[s[v - 1] + 1]] = v - 1


@njit(cache=True)
def _reduce(s, upper):
    """First induction pass; returns the reduced string of LMS names."""
    n = s.size
    ls, sum_l, sum_s = _classify(s, upper)
    lms_map = np.full(n + 1, -1, dtype=np.int64)
    m = 0
    for i in range(1, n):
        if not ls[i - 1] and ls[i]:
            lms_map[i] = m
            m += 1
    lms = np.empty(m, dtype=np.int64)
    j = 0
    for i in range(1, n):
        if not ls[i - 1] and ls[i]:
            lms[j] = i
            j += 1
    sa = np.empty(n, dtype=np.int64)
    _induce(s, ls, sum_l, sum_s, lms, upper, sa)

    rec_s = np.zeros(m, dtype=np.int64)
    rec_upper = 0
    if m > 0:
        sorted_lms = np.empty(m, dtype=np.int64)
        j = 0
        for v in sa:
            if lms_map[v] != -1:
                sorted_lms[j] = v
                j += 1
        rec_s[lms_map[sorted_lms[0]]] = 0
        for i in range(1, m):
            left = sorted_lms[i - 1]
            right = sorted_lms[i]
            end_l = lms[lms_map[left] + 1] if lms_map[left] + 1 < m else n
            end_r = lms[lms_map[right] + 1] if lms_map[right] + 1 < m else n
            same = True
            if end_l - left != end_r - right:
                same = False
            else:
                while left < end_l:
                    if s[left] != s[right]:
                        break
                    left += 1
                    right += 1
                if left == n or s[left] != s[right]:
                    same = False
            if not same:
                rec_upper += 1
            rec_s[lms_map[sorted_lms[i]]] = rec_upper
    return ls, sum_l, sum_s, lms, rec_s, rec_upper, sa


@njit(cache=True)
def _expand(s, ls, sum_l, sum_s, lms, rec_sa, upper):
    m = lms.size
    sorted_lms = np.empty(m, dtype=np.int64)
    for i in range(m):
        sorted_lms[i] = lms[rec_sa[i]]
    sa = np.empty(s.size, dtype=np.int64)
    _induce(s, ls, sum_l, sum_s, sorted_lms, upper, sa)
    return sa


def _sa_small(s):
    n = len(s)
    seq = s.tolist()
    return np.array(sorted(range(n), key=lambda i: seq[i:]), dtype=np.int64)


def sa_is(s: np.ndarray, upper: int) -> np.ndarray:
    s = np.ascontiguousarray(s, dtype=np.int64)
    n = s.size
    if n < 8:
        return _sa_small(s)
    ls, sum_l, sum_s, lms, rec_s, rec_upper, sa = _reduce(s, upper)
    if lms.size == 0:
        return sa
    rec_sa = sa_is(rec_s, rec_upper)
    return _expand(s, ls, sum_l, sum_s, lms, rec_sa, upper)


@njit(cache=True)
def kasai_lcp(s, sa):
    """lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i]; lcp[0] = 0."""
    n = s.size
    rank = np.empty(n, dtype=np.int64)
    for i in range(n):
        rank[sa[i]] = i
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sa[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return lcp
