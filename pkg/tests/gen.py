"""Seeded random instances shared by the test modules."""

import random
from fractions import Fraction

from deform_kernel.artin import tensor, truncated_poly
from deform_kernel.deligne import gauge_act, lift_order_by_order
from deform_kernel.dgla import cocone, hom_complex
from deform_kernel.exactlin import GradedComplex, RatMatrix, cohomology, kernel_basis


def small(rng, lo=-2, hi=2):
    return Fraction(rng.randint(lo, hi))


def rand_vec(rng, n, lo=-2, hi=2):
    return tuple(small(rng, lo, hi) for _ in range(n))


def rand_matrix(rng, r, c):
    return RatMatrix([[small(rng) for _ in range(c)] for _ in range(r)], c)


def random_E(rng, max_terms=3, max_total=4) -> GradedComplex:
    """A random complex in degrees ``<= 0`` with at most ``max_terms`` terms and total dimension ``<= max_total``."""
    k = rng.randint(1, max_terms)
    while True:
        dims = [rng.randint(1, 2) for _ in range(k)]
        if sum(dims) <= max_total:
            break
    degs = list(range(-(k - 1), 1))
    dmap = dict(zip(degs, dims))
    ds = {}
    prev = None
    for n in degs[:-1]:
        src, tgt = dmap[n], dmap[n + 1]
        if prev is None:
            m = rand_matrix(rng, tgt, src)
        else:
            # rows of d_n must kill the image of d_{n-1}
            ker = kernel_basis(prev.T)
            rows = []
            for _ in range(tgt):
                v = [Fraction(0)] * src
                for b in ker:
                    c = small(rng)
                    v = [x + c * y for x, y in zip(v, b)]
                rows.append(v)
            m = RatMatrix(rows, src)
        ds[n] = m
        prev = m
    return GradedComplex(dmap, ds)


def random_resolution(rng, **kw) -> GradedComplex:
    """A random complex that is exact in negative degrees."""
    while True:
        E = random_E(rng, **kw)
        H = cohomology(E)
        if all(H.dim(n) == 0 for n in E.degrees if n < 0):
            return E


def random_cocone(rng, resolution=False, **kw):
    E = random_resolution(rng, **kw) if resolution else random_E(rng, **kw)
    s = rand_vec(rng, E.dim(0))
    return cocone(hom_complex(E), s)


def random_mc(rng, T):
    """A Maurer-Cartan element: lift of a random 1-cocycle, moved by a random gauge."""
    L = T.base
    H = cohomology(L.complex())
    x = T.zero(1)
    Z = kernel_basis(L.complex().diff(1)) if L.dim(1) else []
    if Z:
        x1 = [Fraction(0)] * L.dim(1)
        for z in Z:
            c = small(rng, -1, 1)
            x1 = [a + c * b for a, b in zip(x1, z)]
        reps = lift_order_by_order(T, T.pure(1, x1, 0), H)
        if reps and reps[-1].lifted:
            x = reps[-1].x
        elif not reps:
            x = T.pure(1, x1, 0)
    g = rand_vec(rng, T.dim(0), -1, 1)
    return gauge_act(T, g, x)


def random_instance(rng, n=4, resolution=False, **kw):
    """``(T, x)`` with ``T = cocone (x) m`` over ``K[t]/(t^n)`` and ``x`` Maurer-Cartan."""
    C = random_cocone(rng, resolution, **kw)
    T = tensor(C, truncated_poly(n))
    return T, random_mc(rng, T)


def rng_for(seed):
    return random.Random(seed)
