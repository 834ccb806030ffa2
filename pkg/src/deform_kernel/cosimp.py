"""Semicosimplicial DG-Lie algebras, Cech levels, totalization and descent data."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .artin import ArtinLocalAlgebra, bch, tensor
from .deligne import gauge_act, mc_residual, morphism_equal
from .dgla import DGLieAlgebra, DGLieMap
from .exactlin import (
    DoubleComplex,
    GradedComplex,
    RatMatrix,
    Vector,
    block_matrix,
    image_basis,
    is_zero,
    kernel_basis,
    total_complex,
    vscale,
    vsub,
    zero_vec,
)


class ProductDGLA(DGLieAlgebra):
    """Finite direct product; coordinates are concatenated factor by factor."""

    def __init__(self, factors: Sequence[DGLieAlgebra], labels: Sequence | None = None):
        self.factors = list(factors)
        self.labels = list(labels) if labels is not None else list(range(len(self.factors)))
        degs = set()
        for F in self.factors:
            degs |= set(F.degrees)
        super().__init__({p: sum(F.dim(p) for F in self.factors) for p in degs})
        self.has_bracket = all(F.has_bracket for F in self.factors)

    def offset(self, k: int, p: int) -> int:
        return sum(F.dim(p) for F in self.factors[:k])

    def part(self, k: int, p: int, v: Sequence) -> Vector:
        o = self.offset(k, p)
        return tuple(v[o:o + self.factors[k].dim(p)])

    def join(self, p: int, parts: Sequence) -> Vector:
        out = ()
        for F, x in zip(self.factors, parts):
            out += tuple(x) if F.dim(p) else ()
        return out

    def _d(self, p, v):
        return self.join(p + 1, [F.d(p, self.part(k, p, v)) for k, F in enumerate(self.factors)])

    def _bracket(self, p, u, q, w):
        return self.join(p + q, [F.bracket(p, self.part(k, p, u), q, self.part(k, q, w))
                                 for k, F in enumerate(self.factors)])


class SemicosimplicialDGLA:
    """Levels ``L_0, L_1, ...`` with faces ``faces[(n, i)] : L_{n-1} -> L_n``, ``0 <= i <= n``."""

    def __init__(self, levels: Sequence[DGLieAlgebra], faces: dict):
        self.levels = list(levels)
        self.faces = dict(faces)
        for n in range(1, len(self.levels)):
            for i in range(n + 1):
                if (n, i) not in self.faces:
                    raise ValueError(f"missing face delta_{i} into level {n}")

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def face_matrix(self, n: int, i: int, p: int) -> RatMatrix:
        src, tgt = self.levels[n - 1], self.levels[n]
        m = self.faces[(n, i)].matrices.get(p)
        return m if m is not None else RatMatrix.zeros(tgt.dim(p), src.dim(p))

    def apply_face(self, n: int, i: int, p: int, v: Sequence) -> Vector:
        return self.face_matrix(n, i, p).apply(v)

    def horizontal(self, n: int, p: int) -> RatMatrix:
        """``delta = sum_{i=0}^{n} (-1)^i delta_i : L_{n-1}^p -> L_n^p``."""
        out = RatMatrix.zeros(self.levels[n].dim(p), self.levels[n - 1].dim(p))
        for i in range(n + 1):
            m = self.face_matrix(n, i, p)
            out = out + (m if i % 2 == 0 else -m)
        return out

    def identity_violations(self) -> list[str]:
        """``delta_l delta_k = delta_{k+1} delta_l`` for ``l <= k`` on all stored levels."""
        bad = []
        for n in range(2, len(self.levels)):
            degs = set(self.levels[n - 2].degrees)
            for k in range(n):
                for l in range(k + 1):
                    for p in degs:
                        lhs = self.face_matrix(n, l, p) @ self.face_matrix(n - 1, k, p)
                        rhs = self.face_matrix(n, k + 1, p) @ self.face_matrix(n - 1, l, p)
                        if lhs != rhs:
                            bad.append(f"level {n}: d{l} d{k} != d{k + 1} d{l} in degree {p}")
        return bad

    def morphism_violations(self) -> list[str]:
        bad = []
        for (n, i), f in sorted(self.faces.items()):
            for msg in f.violations():
                bad.append(f"face d{i} into level {n}: {msg}")
        return bad

    def horizontal_square_violations(self) -> list[str]:
        bad = []
        for n in range(1, len(self.levels) - 1):
            for p in self.levels[n - 1].degrees:
                if not (self.horizontal(n + 1, p) @ self.horizontal(n, p)).is_zero():
                    bad.append(f"delta o delta != 0 from level {n - 1} in degree {p}")
        return bad


def constant_scdgla(L: DGLieAlgebra, levels: int) -> SemicosimplicialDGLA:
    """All levels equal to ``L`` with identity faces."""
    ident = {p: RatMatrix.identity(L.dim(p)) for p in L.degrees}
    faces = {(n, i): DGLieMap(L, L, ident) for n in range(1, levels) for i in range(n + 1)}
    return SemicosimplicialDGLA([L] * levels, faces)


def build_cech_scdgla(n_charts: int, sections: Callable, restrict: Callable, levels: int = 3,
                      check: bool = True) -> SemicosimplicialDGLA:
    """Cech semicosimplicial algebra of a sheaf of DG-Lie algebras on a finite cover.

    ``sections(tuple)`` gives the algebra on the intersection ``U_tuple`` (zero
    algebra if empty) and ``restrict(src, dst)`` the per-degree matrices of the
    restriction for ``src`` a sub-tuple of ``dst``.  Level ``n`` is the product
    over increasing ``(n+1)``-tuples.
    """
    tuples = [list(combinations(range(n_charts), n + 1)) for n in range(levels)]
    algs = {}
    for tl in tuples:
        for t in tl:
            algs[t] = sections(t)
    if check:
        for tl in tuples[2:3] if len(tuples) > 2 else []:
            for t in tl:
                for a in range(len(t)):
                    mid = t[:a] + t[a + 1:]
                    for b in range(len(mid)):
                        low = mid[:b] + mid[b + 1:]
                        for p in algs[low].degrees:
                            r1 = restrict(mid, t).get(p)
                            r2 = restrict(low, mid).get(p)
                            r3 = restrict(low, t).get(p)
                            if None in (r1, r2, r3):
                                continue
                            if r1 @ r2 != r3:
                                raise ValueError(f"restrictions {low}->{mid}->{t} disagree with {low}->{t} in degree {p}")
    lv = [ProductDGLA([algs[t] for t in tl], tl) for tl in tuples]
    faces = {}
    for n in range(1, levels):
        src, tgt = lv[n - 1], lv[n]
        src_pos = {t: k for k, t in enumerate(tuples[n - 1])}
        for i in range(n + 1):
            mats = {}
            for p in src.degrees:
                if tgt.dim(p) == 0:
                    continue
                blocks = {}
                for r, t in enumerate(tuples[n]):
                    s = t[:i] + t[i + 1:]
                    if algs[t].dim(p) and algs[s].dim(p):
                        m = restrict(s, t).get(p)
                        if m is not None:
                            blocks[(r, src_pos[s])] = m
                mats[p] = block_matrix(blocks, [algs[t].dim(p) for t in tuples[n]],
                                       [algs[s].dim(p) for s in tuples[n - 1]])
            faces[(n, i)] = DGLieMap(src, tgt, mats)
    S = SemicosimplicialDGLA(lv, faces)
    if check:
        bad = S.identity_violations()
        if bad:
            raise ValueError("cosimplicial identities fail: " + "; ".join(bad[:3]))
    return S


def total_cochain(S: SemicosimplicialDGLA) -> tuple[GradedComplex, dict]:
    """``Tot^Pi C(L)``: columns are the levels, horizontal map the alternating face sum."""
    dims, h, v = {}, {}, {}
    for n, L in enumerate(S.levels):
        C = L.complex()
        for p in L.degrees:
            dims[(n, p)] = L.dim(p)
            if L.dim(p + 1):
                v[(n, p)] = C.diff(p)
            if n + 1 < len(S.levels) and S.levels[n + 1].dim(p):
                h[(n, p)] = S.horizontal(n + 1, p)
    return total_complex(DoubleComplex(dims, h, v))


# -- descent groupoid --------------------------------------------------------------------


class DescentLevels:
    """``L_0, L_1, L_2`` tensored with ``m_A`` and the induced faces."""

    def __init__(self, S: SemicosimplicialDGLA, A: ArtinLocalAlgebra):
        if len(S.levels) < 3:
            raise ValueError("descent needs levels 0..2")
        self.S, self.A = S, A
        self.T = [tensor(L, A) for L in S.levels[:3]]

    def face(self, n: int, i: int, p: int, v: Sequence) -> Vector:
        src, tgt = self.T[n - 1], self.T[n]
        comps = {j: self.S.apply_face(n, i, p, x) for j, x in src.components(p, v).items()}
        return tgt.from_components(p, comps)


@dataclass
class DescentVerdict:
    ok: bool
    mc: bool
    gauge: bool
    cocycle: bool
    nu: Vector | None = None


def descent_check(D: DescentLevels, l: Sequence, m: Sequence) -> DescentVerdict:
    """``l`` is MC in ``L_0``, ``e^m * d0 l = d1 l`` and ``d2 m o d0 m = d1 m`` from ``d0 d0 l``."""
    T0, T1, T2 = D.T
    mc = is_zero(mc_residual(T0, l))
    gauge = gauge_act(T1, m, D.face(1, 0, 1, l)) == D.face(1, 1, 1, l)
    cocycle, nu = False, None
    if mc and gauge:
        base = D.face(2, 0, 1, D.face(1, 0, 1, l))
        comp = bch(T2, D.face(2, 2, 0, m), D.face(2, 0, 0, m))
        other = D.face(2, 1, 0, m)
        try:
            r = morphism_equal(T2, comp, other, base)
            cocycle, nu = r["equal"], r["nu"]
        except ValueError:
            cocycle = False
    return DescentVerdict(mc and gauge and cocycle, mc, gauge, cocycle, nu)


def descent_morphism_check(D: DescentLevels, a: Sequence, obj: tuple, obj2: tuple) -> dict:
    """``a : l -> l'`` with ``d1 a o m = m' o d0 a`` as morphisms out of ``d0 l``."""
    T0, T1, _ = D.T
    (l, m), (l2, m2) = obj, obj2
    if gauge_act(T0, a, l) != tuple(l2):
        return {"ok": False, "reason": "e^a * l != l'"}
    base = D.face(1, 0, 1, l)
    lhs = bch(T1, D.face(1, 1, 0, a), m)
    rhs = bch(T1, m2, D.face(1, 0, 0, a))
    try:
        r = morphism_equal(T1, lhs, rhs, base)
    except ValueError:
        return {"ok": False, "reason": "composites have different targets"}
    return {"ok": r["equal"], "nu": r["nu"]}


def first_order_descent(S: SemicosimplicialDGLA) -> dict:
    """Descent classes over ``K[e]`` as a quotient vector space.

    Objects ``(l, m)`` admit ``nu`` with ``dl = 0``, ``d0 l - d1 l - dm = 0`` and
    ``d0 m - d1 m + d2 m = d nu``; morphisms shift by ``(-da, d1 a - d0 a - d mu)``.
    """
    L0, L1, L2 = S.levels[:3]
    n_l, n_m, n_nu = L0.dim(1), L1.dim(0), L2.dim(-1)
    C0, C1, C2 = L0.complex(), L1.complex(), L2.complex()
    f = lambda n, i, p: S.face_matrix(n, i, p)
    rows = [L0.dim(2), L1.dim(1), L2.dim(0)]
    cols = [n_l, n_m, n_nu]
    blocks = {}
    if rows[0] and n_l:
        blocks[(0, 0)] = C0.diff(1)
    if rows[1]:
        if n_l:
            blocks[(1, 0)] = f(1, 0, 1) - f(1, 1, 1)
        if n_m:
            blocks[(1, 1)] = -C1.diff(0)
    if rows[2]:
        if n_m:
            blocks[(2, 1)] = f(2, 0, 0) - f(2, 1, 0) + f(2, 2, 0)
        if n_nu:
            blocks[(2, 2)] = -C2.diff(-1)
    M = block_matrix(blocks, rows, cols)
    sols = kernel_basis(M) if M.ncols else []
    objs = [s[:n_l + n_m] for s in sols]
    obj_span = image_basis(RatMatrix.from_columns(objs, n_l + n_m)) if objs else []
    eq = []
    for e in L0.basis(0):
        da = C0.apply(0, e)
        mm = vsub(S.apply_face(1, 1, 0, e), S.apply_face(1, 0, 0, e)) if n_m else ()
        eq.append(vscale(-1, da) + mm)
    for e in L1.basis(-1):
        eq.append(zero_vec(n_l) + vscale(-1, C1.apply(-1, e)))
    eq = [v for v in eq if not is_zero(v)]
    eq_span = image_basis(RatMatrix.from_columns(eq, n_l + n_m)) if eq else []
    count = len(obj_span) - len(eq_span)
    reps = []
    span = list(eq_span)
    r = len(span)
    for v in obj_span:
        trial = RatMatrix.from_columns(span + [v], n_l + n_m)
        if trial.rank() > r:
            span.append(v)
            reps.append((v[:n_l], v[n_l:]))
            r += 1
    return {"count": count, "objects_dim": len(obj_span), "equivalences_dim": len(eq_span), "representatives": reps}
