# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`shiftspec._pykernels`."""

from libc.stdlib cimport malloc, free


def first_tracer(int n_positions, int n_symbols, positions, values):
    cdef Py_ssize_t k, n_cons = len(positions)
    cdef long long code = 0, total = 1
    cdef int i, ok
    cdef int *digits
    cdef int *pos
    cdef int *val
    for i in range(n_positions):
        total *= n_symbols
    digits = <int *> malloc(max(n_positions, 1) * sizeof(int))
    pos = <int *> malloc(max(n_cons, 1) * sizeof(int))
    val = <int *> malloc(max(n_cons, 1) * sizeof(int))
    try:
        for i in range(n_positions):
            digits[i] = 0
        for k in range(n_cons):
            pos[k] = positions[k]
            val[k] = values[k]
        while code < total:
            ok = 1
            for k in range(n_cons):
                if digits[pos[k]] != val[k]:
                    ok = 0
                    break
            if ok:
                return code
            code += 1
            # odometer step, last position least significant
            i = n_positions - 1
            while i >= 0:
                digits[i] += 1
                if digits[i] < n_symbols:
                    break
                digits[i] = 0
                i -= 1
        return -1
    finally:
        free(digits)
        free(pos)
        free(val)


def functional_graph(images):
    cdef Py_ssize_t n = len(images)
    cdef Py_ssize_t start, x, j, plen, full, cstart, nxt, lab
    cdef long *img = <long *> malloc(max(n, 1) * sizeof(long))
    cdef long *tail = <long *> malloc(max(n, 1) * sizeof(long))
    cdef long *period = <long *> malloc(max(n, 1) * sizeof(long))
    cdef long *label = <long *> malloc(max(n, 1) * sizeof(long))
    cdef long *onpath = <long *> malloc(max(n, 1) * sizeof(long))
    cdef long *path = <long *> malloc(max(n, 1) * sizeof(long))
    try:
        for x in range(n):
            img[x] = images[x]
            tail[x] = -1
            period[x] = 0
            label[x] = -1
            onpath[x] = -1
        for start in range(n):
            if tail[start] >= 0:
                continue
            plen = 0
            x = start
            while tail[x] < 0 and onpath[x] < 0:
                onpath[x] = plen
                path[plen] = x
                plen += 1
                x = img[x]
            full = plen
            if tail[x] < 0:
                cstart = onpath[x]
                lab = path[cstart]
                for j in range(cstart, plen):
                    if path[j] < lab:
                        lab = path[j]
                for j in range(cstart, plen):
                    tail[path[j]] = 0
                    period[path[j]] = plen - cstart
                    label[path[j]] = lab
                plen = cstart
            j = plen - 1
            while j >= 0:
                nxt = img[path[j]]
                tail[path[j]] = tail[nxt] + 1
                period[path[j]] = period[nxt]
                label[path[j]] = label[nxt]
                j -= 1
            for j in range(full):
                onpath[path[j]] = -1
        return ([tail[x] for x in range(n)],
                [period[x] for x in range(n)],
                [label[x] for x in range(n)])
    finally:
        free(img)
        free(tail)
        free(period)
        free(label)
        free(onpath)
        free(path)


def refine_residue(values, long long modulus):
    cdef Py_ssize_t n = len(values), i
    cdef long long need, r, v
    cdef long long *vals
    cdef long long *counts
    if n == 0:
        raise ValueError("cannot refine an empty sequence")
    vals = <long long *> malloc(n * sizeof(long long))
    counts = <long long *> malloc(modulus * sizeof(long long))
    try:
        for i in range(n):
            vals[i] = values[i]
        for r in range(modulus):
            counts[r] = 0
        for i in range(n):
            counts[vals[i] % modulus] += 1
        need = (n + modulus - 1) // modulus
        for i in range(n):
            r = vals[i] % modulus
            if counts[r] >= need:
                return r, [vals[j] for j in range(n) if vals[j] % modulus == r]
        raise AssertionError("pigeonhole violated")
    finally:
        free(vals)
        free(counts)
