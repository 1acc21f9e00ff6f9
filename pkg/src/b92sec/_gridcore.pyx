# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernel for the contraction-search oracle.

Scans X = R(u) diag(s1, s2) R(v) over a regular four-dimensional grid and
reports the best feasible |Tr[A X]| plus seed cells for local refinement.
Must stay in lockstep with ``_gridref.scan`` (the pure-numpy fallback);
the test suite asserts parity between the two backends.
"""

from libc.math cimport INFINITY, M_PI, cos, fabs, sin

import numpy as np

DEF MAXK = 64


cdef void _insert(double value, double u, double v,
                  double* keys, double* us, double* vs, int k) nogil:
    cdef int i, j
    if value >= keys[k - 1]:
        return
    i = k - 1
    while i > 0 and keys[i - 1] > value:
        i -= 1
    j = k - 1
    while j > i:
        keys[j] = keys[j - 1]
        us[j] = us[j - 1]
        vs[j] = vs[j - 1]
        j -= 1
    keys[i] = value
    us[i] = u
    vs[i] = v


def scan(double a11, double a12, double a22,
         double b11, double b12, double b22,
         double lo, double hi, int resolution, int topk):
    """Same contract as ``_gridref.scan``; see there for the documentation."""
    cdef int res = resolution
    if res < 2:
        raise ValueError(f"resolution must be at least 2: {res}")
    cdef int k = topk
    if k < 1:
        k = 1
    if k > MAXK:
        k = MAXK

    cdef double du = 2.0 * M_PI / res
    cdef double dv = M_PI / res
    cdef double ds1 = 1.0 / (res - 1)
    cdef double ds2 = 2.0 / (res - 1)

    cdef double okeys[MAXK]
    cdef double ous[MAXK]
    cdef double ovs[MAXK]
    cdef double gkeys[MAXK]
    cdef double gus[MAXK]
    cdef double gvs[MAXK]
    cdef int i
    for i in range(MAXK):
        okeys[i] = INFINITY
        ous[i] = 0.0
        ovs[i] = 0.0
        gkeys[i] = INFINITY
        gus[i] = 0.0
        gvs[i] = 0.0

    cdef double best = INFINITY
    cdef int iu, iv, i1, i2
    cdef double u, v, cu, su, cv, sv
    cdef double ta1, ta2, ua1, ua2, tb1, tb2, ub1, ub2
    cdef double a1, a2, b1, b2
    cdef double s1, s2, qa1, qb1, qa, qb, gp
    cdef double local, lgap

    with nogil:
        for iu in range(res):
            u = iu * du
            cu = cos(u)
            su = sin(u)
            ta1 = a11 * cu + a12 * su
            ta2 = a12 * cu + a22 * su
            ua1 = -a11 * su + a12 * cu
            ua2 = -a12 * su + a22 * cu
            tb1 = b11 * cu + b12 * su
            tb2 = b12 * cu + b22 * su
            ub1 = -b11 * su + b12 * cu
            ub2 = -b12 * su + b22 * cu
            for iv in range(res):
                v = iv * dv
                cv = cos(v)
                sv = sin(v)
                a1 = ta1 * cv - ta2 * sv
                a2 = ua1 * sv + ua2 * cv
                b1 = tb1 * cv - tb2 * sv
                b2 = ub1 * sv + ub2 * cv
                local = INFINITY
                lgap = INFINITY
                for i1 in range(res):
                    s1 = i1 * ds1
                    qa1 = s1 * a1
                    qb1 = s1 * b1
                    for i2 in range(res):
                        s2 = -1.0 + i2 * ds2
                        qb = qb1 + s2 * b2
                        if lo <= qb <= hi:
                            qa = fabs(qa1 + s2 * a2)
                            if qa < local:
                                local = qa
                        else:
                            gp = lo - qb if qb < lo else qb - hi
                            if gp < lgap:
                                lgap = gp
                if local < best:
                    best = local
                _insert(local, u, v, okeys, ous, ovs, k)
                _insert(lgap, u, v, gkeys, gus, gvs, k)

    seeds = np.empty((k, 3))
    gap_seeds = np.empty((k, 3))
    for i in range(k):
        seeds[i, 0] = okeys[i]
        seeds[i, 1] = ous[i]
        seeds[i, 2] = ovs[i]
        gap_seeds[i, 0] = gkeys[i]
        gap_seeds[i, 1] = gus[i]
        gap_seeds[i, 2] = gvs[i]
    return best, seeds, gap_seeds
