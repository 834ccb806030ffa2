"""Differential graded Lie algebras over the rationals.

Three concrete presentations share one interface (``dims``, ``d``, ``bracket``):

* :class:`StructureConstantDGLA` -- explicit sparse structure constants;
* :class:`HomComplexDGLA` -- ``Hom^*(E, E)`` of a finite complex, with the
  graded commutator bracket and ``d f = D f - (-1)^|f| f D``;
* :class:`CoconeDGLA` -- ``M = L (+) E[-1]`` for a DG-Lie algebra ``L`` acting
  on ``E`` and a degree-0 cycle ``s``.

Elements are coefficient tuples in a fixed per-degree basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .exactlin import (
    ComplexError,
    GradedComplex,
    RatMatrix,
    Vector,
    frac,
    is_zero,
    solve,
    unit_vec,
    vadd,
    vec,
    vscale,
    vsub,
    zero_vec,
)


def sign(n: int) -> int:
    return -1 if n % 2 else 1


class DGLieAlgebra:
    """Common interface.  Subclasses implement ``_d`` and ``_bracket``."""

    has_bracket = True

    def __init__(self, dims: dict, names: dict | None = None):
        self.dims = {int(k): int(v) for k, v in dims.items() if int(v) > 0}
        self.names = names or {}

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def zero(self, p: int) -> Vector:
        return zero_vec(self.dim(p))

    def basis(self, p: int) -> list[Vector]:
        n = self.dim(p)
        return [unit_vec(n, i) for i in range(n)]

    def label(self, p: int, i: int) -> str:
        names = self.names.get(p)
        return names[i] if names and i < len(names) else f"e{p}_{i}"

    def d(self, p: int, v: Sequence) -> Vector:
        if self.dim(p) == 0 or self.dim(p + 1) == 0:
            return self.zero(p + 1)
        return self._d(p, v)

    def bracket(self, p: int, u: Sequence, q: int, w: Sequence) -> Vector:
        if self.dim(p) == 0 or self.dim(q) == 0 or self.dim(p + q) == 0:
            return self.zero(p + q)
        if is_zero(u) or is_zero(w):
            return self.zero(p + q)
        return self._bracket(p, u, q, w)

    def _d(self, p, v):
        raise NotImplementedError

    def _bracket(self, p, u, q, w):
        raise NotImplementedError

    def differential_matrix(self, p: int) -> RatMatrix:
        cols = [self.d(p, e) for e in self.basis(p)]
        return RatMatrix.from_columns(cols, self.dim(p + 1)) if cols else RatMatrix.zeros(self.dim(p + 1), 0)

    def complex(self) -> GradedComplex:
        ds = {p: self.differential_matrix(p) for p in self.degrees if self.dim(p + 1)}
        return GradedComplex(dict(self.dims), ds)


class StructureConstantDGLA(DGLieAlgebra):
    """DG-Lie algebra given by a complex and sparse structure constants.

    ``constants[(p, i, q, j)]`` is the coordinate vector of ``[e^p_i, e^q_j]``.
    A ``bracket=None`` algebra is linear only: its bracket is unavailable, which
    is enough wherever all brackets are killed by the coefficient ring.
    """

    def __init__(self, complex_: GradedComplex, constants: dict | None = None, names=None,
                 anchor: dict | None = None, tangent: "DGLieAlgebra | None" = None):
        super().__init__(complex_.dims, names)
        self._complex = complex_
        self.has_bracket = constants is not None
        self.constants = {}
        for key, v in (constants or {}).items():
            p, i, q, j = key
            v = vec(v)
            if len(v) != self.dim(p + q):
                raise ValueError(f"bracket value {key} has length {len(v)}, expected {self.dim(p + q)}")
            if not is_zero(v):
                self.constants[(p, i, q, j)] = v
        self._by_degree: dict = {}
        for (p, i, q, j), v in self.constants.items():
            self._by_degree.setdefault((p, q), []).append((i, j, v))
        self.anchor = anchor
        self.tangent = tangent

    def complex(self) -> GradedComplex:
        return self._complex

    def _d(self, p, v):
        return self._complex.apply(p, v)

    def _bracket(self, p, u, q, w):
        if not self.has_bracket:
            raise NotImplementedError("this algebra carries no bracket")
        out = [Fraction(0)] * self.dim(p + q)
        for i, j, c in self._by_degree.get((p, q), ()):
            a = u[i] * w[j]
            if a:
                for k, x in enumerate(c):
                    if x:
                        out[k] += a * x
        return tuple(out)


def abelian(complex_: GradedComplex) -> StructureConstantDGLA:
    return StructureConstantDGLA(complex_, {})


def sl2(e_f_value=None) -> StructureConstantDGLA:
    """sl_2 in degree 0 with basis (h, e, f) and zero differential.

    ``e_f_value`` overrides the coordinates of ``[e, f]`` (default ``h``).
    """
    ef = vec(e_f_value) if e_f_value is not None else vec([1, 0, 0])
    consts = {
        (0, 0, 0, 1): vec([0, 2, 0]),
        (0, 0, 0, 2): vec([0, 0, -2]),
        (0, 1, 0, 2): ef,
    }
    return from_constants(GradedComplex({0: 3}), consts, names={0: ["h", "e", "f"]})


def from_constants(complex_: GradedComplex, consts: dict, names=None) -> StructureConstantDGLA:
    """Build from one-sided constants, completing partners by graded antisymmetry."""
    full = dict(consts)
    for (p, i, q, j), v in consts.items():
        if (q, j, p, i) not in consts:
            full[(q, j, p, i)] = vscale(-sign(p * q), v)
    return StructureConstantDGLA(complex_, full, names=names)


# -- JSON structure-constant format --------------------------------------------------


def _rat_str(x: Fraction) -> str:
    x = frac(x)
    return f"{x.numerator}/{x.denominator}"


def to_json(L: DGLieAlgebra) -> dict:
    degs = L.degrees
    lo, hi = (degs[0], degs[-1]) if degs else (0, 0)
    d = {}
    for p in degs:
        m = L.differential_matrix(p)
        if not m.is_zero():
            d[str(p)] = [[_rat_str(x) for x in r] for r in m.rows]
    br = []
    for p in degs:
        for q in degs:
            if L.dim(p + q) == 0:
                continue
            for i, ei in enumerate(L.basis(p)):
                for j, ej in enumerate(L.basis(q)):
                    v = L.bracket(p, ei, q, ej)
                    if not is_zero(v):
                        br.append([p, i, q, j, [_rat_str(x) for x in v]])
    return {"degrees": [lo, hi], "dims": [L.dim(p) for p in range(lo, hi + 1)], "d": d, "bracket": br}


def from_json(data: dict) -> StructureConstantDGLA:
    lo, hi = data["degrees"]
    dims = {lo + k: int(n) for k, n in enumerate(data["dims"])}
    if len(data["dims"]) != hi - lo + 1:
        raise ValueError("dims length does not match degree range")
    ds = {int(p): RatMatrix([[frac(x) for x in r] for r in rows], dims.get(int(p), 0))
          for p, rows in data.get("d", {}).items()}
    consts = {(p, i, q, j): vec(v) for p, i, q, j, v in data.get("bracket", [])}
    names = {int(k): v for k, v in data.get("names", {}).items()}
    return from_constants(GradedComplex(dims, ds), consts, names=names or None)


# -- Hom complex -----------------------------------------------------------------------


class HomComplexDGLA(DGLieAlgebra):
    """``Hom^*(E, E)`` with ``[f, g] = fg - (-1)^{|f||g|} gf`` and ``d f = [D, f]``.

    Elements are also available as total matrices on ``E = (+)_k E^k``; the
    basis of ``Hom^n`` is ordered by source degree ``k``, then row, then column
    of the block ``E^k -> E^{k+n}``.
    """

    def __init__(self, E: GradedComplex):
        self.E = E
        self.offsets = {}
        off = 0
        for k in E.degrees:
            self.offsets[k] = off
            off += E.dim(k)
        self.total = off
        self.blocks: dict = {}
        dims = {}
        if E.degrees:
            span = E.hi - E.lo
            for n in range(-span, span + 1):
                entries = []
                for k in E.degrees:
                    if E.dim(k + n):
                        for i in range(E.dim(k + n)):
                            for j in range(E.dim(k)):
                                entries.append((k, i, j))
                if entries:
                    self.blocks[n] = entries
                    dims[n] = len(entries)
        super().__init__(dims)
        self.D = self.to_total_from_blocks({k: E.diff(k) for k in E.degrees if E.dim(k + 1)}, 1)

    def to_total_from_blocks(self, blocks: dict, n: int) -> RatMatrix:
        rows = [[Fraction(0)] * self.total for _ in range(self.total)]
        for k, m in blocks.items():
            if m.nrows == 0 or m.ncols == 0:
                continue
            r0, c0 = self.offsets[k + n], self.offsets[k]
            for i, r in enumerate(m.rows):
                for j, x in enumerate(r):
                    rows[r0 + i][c0 + j] = x
        return RatMatrix(rows, self.total)

    def to_matrix(self, n: int, v: Sequence) -> RatMatrix:
        rows = [[Fraction(0)] * self.total for _ in range(self.total)]
        for x, (k, i, j) in zip(v, self.blocks.get(n, ())):
            if x:
                rows[self.offsets[k + n] + i][self.offsets[k] + j] = x
        return RatMatrix(rows, self.total)

    def from_matrix(self, n: int, M: RatMatrix, strict: bool = True) -> Vector:
        out = []
        seen = set()
        for (k, i, j) in self.blocks.get(n, ()):
            r, c = self.offsets[k + n] + i, self.offsets[k] + j
            seen.add((r, c))
            out.append(M.rows[r][c])
        if strict:
            for r, row in enumerate(M.rows):
                for c, x in enumerate(row):
                    if x and (r, c) not in seen:
                        raise ValueError(f"matrix has entry outside Hom^{n} blocks at {(r, c)}")
        return tuple(out)

    def embed(self, k: int, v: Sequence) -> Vector:
        """Place ``v`` in ``E^k`` inside the total space."""
        out = [Fraction(0)] * self.total
        if self.E.dim(k):
            o = self.offsets[k]
            for i, x in enumerate(v):
                out[o + i] = frac(x)
        return tuple(out)

    def extract(self, k: int, w: Sequence) -> Vector:
        if not self.E.dim(k):
            return ()
        o = self.offsets[k]
        return tuple(w[o:o + self.E.dim(k)])

    def act(self, p: int, f: Sequence, q: int, v: Sequence) -> Vector:
        """``f(v)`` for ``f`` in ``Hom^p`` and ``v`` in ``E^q``."""
        if self.E.dim(p + q) == 0:
            return ()
        return self.extract(p + q, self.to_matrix(p, f).apply(self.embed(q, v)))

    def _d(self, p, v):
        F = self.to_matrix(p, v)
        return self.from_matrix(p + 1, self.D @ F - (F @ self.D).scale(sign(p)))

    def _bracket(self, p, u, q, w):
        F, G = self.to_matrix(p, u), self.to_matrix(q, w)
        return self.from_matrix(p + q, F @ G - (G @ F).scale(sign(p * q)))


def hom_complex(E: GradedComplex) -> HomComplexDGLA:
    return HomComplexDGLA(E)


class HomSubalgebra(DGLieAlgebra):
    """DG-Lie subalgebra of a Hom complex presented by its inclusion.

    ``inclusion[p]`` is a matrix whose columns are the basis of the subspace in
    degree ``p`` written in the parent's basis.
    """

    def __init__(self, parent: HomComplexDGLA, inclusion: dict, names=None):
        self.parent = parent
        self.E = parent.E
        self.inclusion = {p: m for p, m in inclusion.items() if m.ncols}
        super().__init__({p: m.ncols for p, m in self.inclusion.items()}, names)
        for p, m in self.inclusion.items():
            if m.rank() != m.ncols:
                raise ValueError(f"inclusion in degree {p} is not injective")

    def include(self, p, v):
        return self.inclusion[p].apply(v)

    def _restrict(self, p, w):
        if self.dim(p) == 0:
            if not is_zero(w):
                raise ValueError(f"subspace not closed: nonzero value in degree {p}")
            return ()
        x = solve(self.inclusion[p], w)
        if x is None:
            raise ValueError(f"subspace not closed in degree {p}")
        return x

    def _d(self, p, v):
        return self._restrict(p + 1, self.parent.d(p, self.include(p, v)))

    def _bracket(self, p, u, q, w):
        return self._restrict(p + q, self.parent.bracket(p, self.include(p, u), q, self.include(q, w)))

    def act(self, p, f, q, v):
        return self.parent.act(p, self.include(p, f), q, v)


# -- Cocone ----------------------------------------------------------------------------


class CoconeDGLA(DGLieAlgebra):
    """``M^i = L^i (+) E^{i-1}`` with the twisted differential by evaluation at ``s``.

    ``[(f, v), (g, w)] = ([f, g], f(w) - (-1)^{|f||g|} g(v))`` and
    ``d(f, v) = ([D, f], D v - (-1)^{|f|} f(s))``.
    The L-part comes first in each degree's coordinates.
    """

    def __init__(self, base: DGLieAlgebra, s: Sequence):
        self.base = base
        self.E = base.E
        s = vec(s)
        if len(s) != self.E.dim(0):
            raise ValueError(f"section has length {len(s)}, E^0 has dimension {self.E.dim(0)}")
        if not is_zero(self.E.apply(0, s)):
            raise ComplexError("section is not a cycle: D s != 0", 0)
        self.s = s
        degs = set(base.degrees) | {k + 1 for k in self.E.degrees}
        dims = {i: base.dim(i) + self.E.dim(i - 1) for i in degs}
        super().__init__(dims)

    def split(self, i: int, x: Sequence):
        a = self.base.dim(i)
        return tuple(x[:a]), tuple(x[a:])

    def join(self, i: int, f: Sequence, v: Sequence) -> Vector:
        f = tuple(f) if self.base.dim(i) else ()
        v = tuple(v) if self.E.dim(i - 1) else ()
        return f + v

    def _act(self, p, f, q, v):
        if self.E.dim(p + q) == 0 or self.base.dim(p) == 0 or self.E.dim(q) == 0:
            return zero_vec(self.E.dim(p + q))
        return self.base.act(p, f, q, v)

    def _d(self, i, x):
        f, v = self.split(i, x)
        df = self.base.d(i, f) if self.base.dim(i) else self.base.zero(i + 1)
        ev = self._act(i, f, 0, self.s)
        dv = self.E.apply(i - 1, v) if self.E.dim(i - 1) else zero_vec(self.E.dim(i))
        return self.join(i + 1, df, vsub(dv, vscale(sign(i), ev)))

    def _bracket(self, p, x, q, y):
        f, v = self.split(p, x)
        g, w = self.split(q, y)
        fg = self.base.bracket(p, f, q, g) if self.base.dim(p) and self.base.dim(q) else self.base.zero(p + q)
        e = vsub(self._act(p, f, q - 1, w), vscale(sign(p * q), self._act(q, g, p - 1, v)))
        return self.join(p + q, fg, e)

    def act(self, p, x, q, v):
        """Action of the L-part of ``x`` on ``E`` (used for nested cocones)."""
        f, _ = self.split(p, x)
        return self._act(p, f, q, v)

    def projection(self, i: int) -> RatMatrix:
        a, b = self.base.dim(i), self.E.dim(i - 1)
        return RatMatrix([[1 if c == r else 0 for c in range(a + b)] for r in range(a)], a + b)

    def inclusion(self, i: int) -> RatMatrix:
        """``iota(x) = (-1)^i (0, x)`` for ``x`` in ``E^{i-1}``."""
        a, b = self.base.dim(i), self.E.dim(i - 1)
        sg = sign(i)
        return RatMatrix([[sg if (r >= a and c == r - a) else 0 for c in range(b)] for r in range(a + b)], b)

    def shifted_E(self) -> GradedComplex:
        """``E[-1]``: degree ``i`` is ``E^{i-1}`` with differential ``-D``."""
        E = self.E
        return GradedComplex({k + 1: E.dim(k) for k in E.degrees},
                             {k + 1: -E.diff(k) for k in E.degrees if E.dim(k + 1)})


def cocone(L: DGLieAlgebra, s: Sequence) -> CoconeDGLA:
    return CoconeDGLA(L, s)


def cocone_sequence_violations(C: CoconeDGLA) -> list[str]:
    """Check that ``0 -> E[-1] -> M -> L -> 0`` is a short exact sequence of complexes."""
    E1 = C.shifted_E()
    bad = []
    for i in C.degrees:
        inc, proj = C.inclusion(i), C.projection(i)
        if not (proj @ inc).is_zero():
            bad.append(f"composite nonzero in degree {i}")
        if inc.rank() != E1.dim(i) or proj.rank() != C.base.dim(i) or E1.dim(i) + C.base.dim(i) != C.dim(i):
            bad.append(f"not exact in degree {i}")
        if C.dim(i + 1):
            D = C.differential_matrix(i)
            if E1.dim(i) and not (D @ inc - C.inclusion(i + 1) @ E1.diff(i)).is_zero():
                bad.append(f"inclusion is not a chain map in degree {i}")
            if C.base.dim(i) and not (C.projection(i + 1) @ D - C.base.differential_matrix(i) @ proj).is_zero():
                bad.append(f"projection is not a chain map in degree {i}")
    return bad


@dataclass
class DGLieMap:
    """Degree-preserving linear map between DG-Lie algebras, one matrix per degree."""

    source: DGLieAlgebra
    target: DGLieAlgebra
    matrices: dict

    def apply(self, p: int, v: Sequence) -> Vector:
        m = self.matrices.get(p)
        if m is None:
            return self.target.zero(p)
        return m.apply(v)

    def violations(self) -> list[str]:
        out = []
        S, T = self.source, self.target
        for p in S.degrees:
            for i, e in enumerate(S.basis(p)):
                if self.apply(p + 1, S.d(p, e)) != T.d(p, self.apply(p, e)):
                    out.append(f"d at degree {p} basis {i}")
        if S.has_bracket and T.has_bracket:
            for p in S.degrees:
                for q in S.degrees:
                    for i, e in enumerate(S.basis(p)):
                        for j, g in enumerate(S.basis(q)):
                            lhs = self.apply(p + q, S.bracket(p, e, q, g))
                            rhs = T.bracket(p, self.apply(p, e), q, self.apply(q, g))
                            if lhs != rhs:
                                out.append(f"bracket at ({p},{i}),({q},{j})")
        return out

    def is_bijective(self) -> bool:
        return all(S_dim == self.target.dim(p) and (S_dim == 0 or self.matrices[p].rank() == S_dim)
                   for p, S_dim in ((p, self.source.dim(p)) for p in set(self.source.degrees) | set(self.target.degrees)))


def twist_iso(C: CoconeDGLA, r: Sequence) -> DGLieMap:
    """Isomorphism ``C(s) -> C(s + D r)``, ``(u, x) -> (u, x - [r, u]) = (u, x + u(r))``."""
    r = vec(r)
    if len(r) != C.E.dim(-1):
        raise ValueError("r must lie in E^{-1}")
    target = CoconeDGLA(C.base, vadd(C.s, C.E.apply(-1, r)) if C.E.dim(-1) else C.s)
    mats = {}
    for i in C.degrees:
        cols = []
        for e in C.basis(i):
            f, x = C.split(i, e)
            ur = C._act(i, f, -1, r) if C.E.dim(-1) else zero_vec(C.E.dim(i - 1))
            cols.append(C.join(i, f, vadd(x, ur) if x else ()))
        mats[i] = RatMatrix.from_columns(cols, C.dim(i))
    return DGLieMap(C, target, mats)


# -- Axiom verification ----------------------------------------------------------------


@dataclass
class AxiomReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _global_layout(L: DGLieAlgebra):
    index = []
    for p in L.degrees:
        for i in range(L.dim(p)):
            index.append((p, i))
    pos = {}
    start = 0
    for p in L.degrees:
        pos[p] = start
        start += L.dim(p)
    return index, pos


def _to_int_array(entries: dict, shape) -> tuple[np.ndarray, int]:
    den = 1
    for x in entries.values():
        den = lcm(den, x.denominator)
    big = max((abs(x.numerator) * (den // x.denominator) for x in entries.values()), default=0)
    safe = big * big * max(shape) < 2 ** 62
    arr = np.zeros(shape, dtype=np.int64 if safe else object)
    for k, x in entries.items():
        arr[k] = x.numerator * (den // x.denominator)
    return arr, den


def structure_tensor(L: DGLieAlgebra):
    """Dense scaled-integer bracket tensor and differential over the global basis."""
    index, pos = _global_layout(L)
    n = len(index)
    C, D = {}, {}
    for p in L.degrees:
        for i, e in enumerate(L.basis(p)):
            a = pos[p] + i
            dv = L.d(p, e)
            for k, x in enumerate(dv):
                if x:
                    D[(pos[p + 1] + k, a)] = x
            if not L.has_bracket:
                continue
            for q in L.degrees:
                if L.dim(p + q) == 0:
                    continue
                for j, g in enumerate(L.basis(q)):
                    b = pos[q] + j
                    for k, x in enumerate(L.bracket(p, e, q, g)):
                        if x:
                            C[(a, b, pos[p + q] + k)] = x
    Ct, _ = _to_int_array(C, (n, n, n))
    Dt, _ = _to_int_array(D, (n, n))
    if Ct.dtype != Dt.dtype:
        Ct, Dt = Ct.astype(object), Dt.astype(object)
    deg = np.array([p for p, _ in index], dtype=np.int64)
    return index, Ct, Dt, deg


def _first_nonzero(arr):
    nz = np.argwhere(arr != 0)
    return tuple(int(x) for x in nz[0]) if len(nz) else None


def check_axioms(L: DGLieAlgebra, limit: int = 10) -> AxiomReport:
    """Exact check of d^2 = 0, graded antisymmetry, Jacobi and Leibniz on all basis tuples.

    Structure constants are scaled to integers by a common denominator; every
    identity is homogeneous in them, so the scaled check is exact.
    """
    index, C, D, deg = structure_tensor(L)
    viol = []

    def name(a):
        p, i = index[a]
        return (p, i, L.label(p, i))

    dd = D @ D if D.size else D
    w = _first_nonzero(dd) if D.size else None
    if w:
        viol.append({"identity": "d^2", "witness": [name(w[1])]})
    if L.has_bracket and len(index):
        par = (np.outer(deg, deg) % 2).astype(np.int64)
        sgn = (1 - 2 * par).astype(C.dtype)
        anti = C + np.einsum("ab,bam->abm", sgn, C)
        w = _first_nonzero(anti)
        if w:
            viol.append({"identity": "antisymmetry", "witness": [name(w[0]), name(w[1])]})
        j1 = np.einsum("bcl,alm->abcm", C, C)
        j2 = np.einsum("abl,lcm->abcm", C, C)
        j3 = np.einsum("ab,acl,blm->abcm", sgn, C, C)
        w = _first_nonzero(j1 - j2 - j3)
        if w:
            viol.append({"identity": "jacobi", "witness": [name(w[0]), name(w[1]), name(w[2])]})
        lhs = np.einsum("abl,ml->abm", C, D)
        r1 = np.einsum("la,lbm->abm", D, C)
        sa = (1 - 2 * (deg % 2)).astype(C.dtype)
        r2 = np.einsum("a,lb,alm->abm", sa, D, C)
        w = _first_nonzero(lhs - r1 - r2)
        if w:
            viol.append({"identity": "leibniz", "witness": [name(w[0]), name(w[1])]})
    anchor = getattr(L, "anchor", None)
    if anchor:
        tan = L.tangent
        for p in L.degrees:
            if p not in anchor:
                continue
            for i, e in enumerate(L.basis(p)):
                a1 = anchor.get(p + 1)
                lhs = a1.apply(L.d(p, e)) if a1 is not None else zero_vec(tan.dim(p + 1))
                rhs = tan.d(p, anchor[p].apply(e))
                if lhs != rhs:
                    viol.append({"identity": "anchor-d", "witness": [(p, i, L.label(p, i))]})
                if not L.has_bracket:
                    continue
                for q in L.degrees:
                    if q not in anchor:
                        continue
                    for j, g in enumerate(L.basis(q)):
                        ab = anchor.get(p + q)
                        lhs = ab.apply(L.bracket(p, e, q, g)) if ab is not None else zero_vec(tan.dim(p + q))
                        rhs = tan.bracket(p, anchor[p].apply(e), q, anchor[q].apply(g))
                        if lhs != rhs:
                            viol.append({"identity": "anchor-bracket",
                                         "witness": [(p, i, L.label(p, i)), (q, j, L.label(q, j))]})
    return AxiomReport(not viol, viol[:limit])
