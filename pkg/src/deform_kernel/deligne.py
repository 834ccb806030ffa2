"""Maurer-Cartan elements, gauge action and the Deligne groupoid of ``L (x) m_A``.

All functions take a :class:`~deform_kernel.artin.TensorDGLA` ``T`` and plain
coordinate tuples; degree-1 tuples are MC candidates, degree-0 tuples are gauge
elements, degree-(-1) tuples parametrize stabilizers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .artin import AMatrix, TensorDGLA, bch
from .dgla import CoconeDGLA, DGLieAlgebra, HomComplexDGLA, HomSubalgebra
from .exactlin import (
    CohomologyReport,
    RatMatrix,
    Vector,
    cohomology,
    is_zero,
    rref,
    solve,
    vadd,
    vscale,
    vsub,
    zero_vec,
)


def mc_residual(T: DGLieAlgebra, x: Sequence) -> Vector:
    """``dx + [x, x] / 2``."""
    return vadd(T.d(1, x), vscale(Fraction(1, 2), T.bracket(1, x, 1, x)))


def _hom_parent(L):
    if isinstance(L, HomComplexDGLA):
        return L, None
    if isinstance(L, HomSubalgebra):
        return L.parent, L
    return None, None


def hom_matrix(L: DGLieAlgebra, p: int, f: Sequence) -> RatMatrix:
    """Total matrix on ``E`` of an element of a Hom algebra or subalgebra."""
    H, sub = _hom_parent(L)
    if sub is not None:
        f = sub.include(p, f) if sub.dim(p) else H.zero(p)
    return H.to_matrix(p, f)


def hom_amatrix(T: TensorDGLA, p: int, x: Sequence) -> AMatrix:
    """``x`` in ``(Hom (x) m_A)^p`` as a matrix with entries in ``m_A``."""
    H, _ = _hom_parent(T.base)
    parts = {j: hom_matrix(T.base, p, c) for j, c in T.components(p, x).items()}
    return AMatrix(T.A, RatMatrix.zeros(H.total, H.total), parts)


def mc_check(T: TensorDGLA, x: Sequence) -> dict:
    """Exact MC verdict; Hom-type bases also report the ``(D + x)^2`` residual."""
    r = mc_residual(T, x)
    out = {"ok": is_zero(r), "residual": r}
    H, _ = _hom_parent(T.base)
    if H is not None:
        Dx = AMatrix(T.A, H.D) + hom_amatrix(T, 1, x)
        sq = Dx @ Dx
        out["square_zero"] = sq.const.is_zero() and not sq.parts
    return out


def gauge_act(T: TensorDGLA, a: Sequence, x: Sequence) -> Vector:
    """``e^a * x = x + sum_n ad(a)^n / (n+1)! ([a, x] - da)``."""
    term = vsub(T.bracket(0, a, 1, x), T.d(0, a))
    out = tuple(x)
    for n in range(T.A.nilpotency):
        if is_zero(term):
            break
        out = vadd(out, vscale(Fraction(1, factorial(n + 1)), term))
        term = T.bracket(0, a, 1, term)
    return out


def gauge_compose(T: TensorDGLA, a: Sequence, b: Sequence) -> Vector:
    """``[a] o [b] = [bch(a, b)]``: ``b`` acts first."""
    return bch(T, a, b)


def stabilizer_element(T: TensorDGLA, x: Sequence, nu: Sequence) -> Vector:
    """``d nu + [x, nu]`` for ``nu`` of degree -1."""
    return vadd(T.d(-1, nu), T.bracket(1, x, -1, nu))


def stabilizer_matrix(T: TensorDGLA, x: Sequence) -> RatMatrix:
    """Columns ``d nu + [x, nu]`` over the basis of ``(L (x) m)^{-1}``; its image is ``I(x)``."""
    cols = [stabilizer_element(T, x, e) for e in T.basis(-1)]
    return RatMatrix.from_columns(cols, T.dim(0)) if cols else RatMatrix.zeros(T.dim(0), 0)


def morphism_equal(T: TensorDGLA, a: Sequence, b: Sequence, x: Sequence) -> dict:
    """Decide whether ``a`` and ``b`` give the same morphism out of ``x``.

    ``e^a = e^b e^c`` with ``c = bch(-b, a)``; the morphisms agree iff ``c`` lies
    in ``I(x)``, the image of the linear map ``nu -> d nu + [x, nu]``.
    """
    ya, yb = gauge_act(T, a, x), gauge_act(T, b, x)
    if ya != yb:
        raise ValueError("precondition: a and b must send x to the same target")
    c = bch(T, vscale(-1, b), a)
    if is_zero(c):
        return {"equal": True, "nu": zero_vec(T.dim(-1)), "c": c}
    nu = solve(stabilizer_matrix(T, x), c)
    return {"equal": nu is not None, "nu": nu, "c": c}


# -- tangent space and lifting ----------------------------------------------------------


def tangent_space(L: DGLieAlgebra) -> list:
    """Representative basis of ``H^1(L)``."""
    return cohomology(L.complex()).representatives(1)


def def_over_dual_numbers(L: DGLieAlgebra) -> dict:
    """Over ``K[e]``: MC elements are 1-cycles, gauge orbits are cosets of ``im d^0``."""
    C = L.complex()
    H = cohomology(C)
    z1 = C.dim(1) - C.diff(1).rank()
    b1 = C.diff(0).rank() if C.dim(0) else 0
    return {"cycles": z1, "boundaries": b1, "dim": H.dim(1), "basis": H.representatives(1)}


@dataclass
class ObstructionReport:
    order: int
    x: Vector
    lifted: bool
    obstruction: dict = field(default_factory=dict)
    correction: dict = field(default_factory=dict)


def lift_order_by_order(T: TensorDGLA, x1: Sequence, H: CohomologyReport | None = None) -> list[ObstructionReport]:
    """Extend a first-order MC solution one power of ``m`` at a time.

    At order ``k`` each residual component on a monomial of order ``k`` is a
    2-cocycle of ``L``.  If all classes vanish, the canonical preimage is
    subtracted; otherwise the classes are returned as the obstruction.
    """
    L = T.base
    H = H or cohomology(L.complex())
    x = tuple(x1)
    if T.truncate(2, mc_residual(T, x), 2) != zero_vec(T.dim(2)):
        raise ValueError("first-order element does not satisfy MC modulo m^2")
    reports = []
    for k in range(2, T.A.max_order + 1):
        r = mc_residual(T, x)
        part = T.order_part(2, r, k)
        classes, corr = {}, {}
        for j, rj in sorted(part.items()):
            if not H.is_cocycle(2, rj):
                raise ArithmeticError(f"residual at order {k} is not a cocycle")
            cls = H.project(2, rj)
            if not is_zero(cls):
                classes[T.A.name(j)] = cls
            else:
                y = H.solve_membership(2, rj)
                corr[j] = vscale(-1, y)
        if classes:
            reports.append(ObstructionReport(k, x, False, classes))
            return reports
        x = vadd(x, T.from_components(1, corr))
        if not is_zero(T.truncate(2, mc_residual(T, x), k + 1)):
            raise ArithmeticError(f"lift fails at order {k}")
        reports.append(ObstructionReport(k, x, True, {}, {T.A.name(j): v for j, v in corr.items()}))
    return reports


def primary_obstruction(T: TensorDGLA, x1: Sequence, H: CohomologyReport | None = None) -> dict:
    """Classes of ``[x1, x1] / 2`` on the order-2 monomials."""
    H = H or cohomology(T.base.complex())
    half = vscale(Fraction(1, 2), T.bracket(1, x1, 1, x1))
    return {T.A.name(j): H.project(2, v) for j, v in sorted(T.order_part(2, half, 2).items())}


# -- Hom-complex oracle -----------------------------------------------------------------


def hom_gauge_oracle(T: TensorDGLA, a: Sequence, x: Sequence) -> Vector:
    """``y`` with ``D + y = e^a (D + x) e^{-a}`` for a Hom base, computed with matrices."""
    H, sub = _hom_parent(T.base)
    A = hom_amatrix(T, 0, a)
    ea, eam = A.exp(), (-A).exp()
    M = ea @ (AMatrix(T.A, H.D) + hom_amatrix(T, 1, x)) @ eam
    if M.const != H.D:
        raise ArithmeticError("constant part changed under conjugation")
    comps = {}
    for j, m in M.parts.items():
        v = H.from_matrix(1, m)
        comps[j] = sub._restrict(1, v) if sub is not None else v
    return T.from_components(1, comps)


# -- cocone deformations on an affine chart ---------------------------------------------


class _ASpace:
    """``V (x) A`` as a K-space: slot 0 is the constant part, slot ``j + 1`` is ``m_j``."""

    def __init__(self, A, n):
        self.A, self.n = A, n
        self.dim = n * (A.dim + 1)

    def pack(self, const, parts):
        out = list(const) if const else [Fraction(0)] * self.n
        for j in range(self.A.dim):
            out.extend(parts.get(j, zero_vec(self.n)))
        return tuple(out)

    def unpack(self, v):
        const = tuple(v[:self.n])
        parts = {}
        for j in range(self.A.dim):
            w = tuple(v[(j + 1) * self.n:(j + 2) * self.n])
            if not is_zero(w):
                parts[j] = w
        return const, parts


def _linearize(M: AMatrix, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
    """K-matrix of the block ``rows x cols`` of an A-linear matrix on ``V (x) A``."""
    A = M.A
    nr, nc = len(rows), len(cols)
    out_cols = []
    for slot in range(A.dim + 1):
        for c in range(nc):
            full = [Fraction(0)] * M.n
            full[cols[c]] = Fraction(1)
            if slot == 0:
                const, parts = M.apply(full, {})
            else:
                const, parts = M.apply(zero_vec(M.n), {slot - 1: tuple(full)})
            pick = lambda w: tuple(w[r] for r in rows)
            out_cols.append(_ASpace(A, nr).pack(pick(const), {j: pick(w) for j, w in parts.items()}))
    return RatMatrix.from_columns(out_cols, nr * (A.dim + 1))


class QuotientSpace:
    """``V / W`` with a canonical normal form from the RREF of ``W``."""

    def __init__(self, ambient_dim: int, spanning: Sequence[Sequence]):
        self.ambient_dim = ambient_dim
        R, piv = rref([list(v) for v in spanning], ambient_dim) if spanning else ([], [])
        self.rows = [tuple(r) for r in R[:len(piv)]]
        self.pivots = list(piv)
        self.dim = ambient_dim - len(piv)

    def normal_form(self, v: Sequence) -> Vector:
        v = list(v)
        for r, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, r)]
        return tuple(v)

    def contains(self, v) -> bool:
        return is_zero(self.normal_form(v))


@dataclass
class Materialized:
    differential: dict
    F_dim: int
    flat: bool
    section: Vector
    exact: bool
    quotient: QuotientSpace
    cohomology_dims: dict


def _split_cocone(T: TensorDGLA, y: Sequence):
    """Split ``y`` in ``(M (x) m)^1`` into ``u`` (Hom^1 (x) m) and ``t`` parts ``{j: E^0 vector}``."""
    C = T.base
    u_parts, t_parts = {}, {}
    for j, c in T.components(1, y).items():
        f, v = C.split(1, c)
        if f and not is_zero(f):
            u_parts[j] = f
        if v and not is_zero(v):
            t_parts[j] = v
    return u_parts, t_parts


def deformed_differential(T: TensorDGLA, u_parts: dict) -> AMatrix:
    C = T.base
    H, _ = _hom_parent(C.base)
    parts = {j: hom_matrix(C.base, 1, f) for j, f in u_parts.items()}
    return AMatrix(T.A, H.D, parts)


def materialize_deformation(T: TensorDGLA, y: Sequence) -> Materialized:
    """Presentation of ``(F_A, sigma_A)`` from an MC element ``(u, t)`` of ``M (x) m_A``.

    ``F_A = coker(D + u : E^{-1} (x) A -> E^0 (x) A)`` and ``sigma_A`` is the class
    of ``s + t``.  ``E`` must be finite dimensional.
    """
    C = T.base
    if not isinstance(C, CoconeDGLA):
        raise TypeError("materialize_deformation needs a tensor of a cocone algebra")
    if not mc_check(T, y)["ok"]:
        raise ValueError("input is not a Maurer-Cartan element")
    E = C.E
    H, _ = _hom_parent(C.base)
    u_parts, t_parts = _split_cocone(T, y)
    Du = deformed_differential(T, u_parts)
    sq = Du @ Du
    if not (sq.const.is_zero() and not sq.parts):
        raise ArithmeticError("(D + u)^2 != 0 for an MC element")
    idx = lambda k: list(range(H.offsets[k], H.offsets[k] + E.dim(k))) if E.dim(k) else []
    blocks = {}
    for k in E.degrees:
        if E.dim(k + 1):
            blocks[k] = _linearize(Du, idx(k + 1), idx(k))
    nA = T.A.dim + 1
    deformed = {k: E.dim(k) * nA for k in E.degrees}
    from .exactlin import GradedComplex, cohomology_dims
    DC = GradedComplex(deformed, blocks)
    hd = cohomology_dims(DC)
    h0 = cohomology_dims(E)
    exact = all(hd.get(k, 0) == 0 for k in E.degrees if k < 0 and h0.get(k, 0) == 0)
    im = blocks[-1].columns() if -1 in blocks else []
    Q = QuotientSpace(E.dim(0) * nA, [c for c in im if not is_zero(c)])
    F0 = E.dim(0) - (E.diff(-1).rank() if E.dim(-1) else 0)
    sec = _ASpace(T.A, E.dim(0)).pack(C.s, t_parts)
    return Materialized(blocks, Q.dim, Q.dim == F0 * nA, Q.normal_form(sec), exact, Q, hd)


def gauge_affine_check(T: TensorDGLA, g: Sequence, y: Sequence) -> dict:
    """With ``(u', t') = e^g * (u, t)`` for ``g = (f, a)``: ``s + t' - e^f (s + t)`` lies in
    ``(D + u')(E^{-1} (x) m_A)``.  Returns the membership witness."""
    C = T.base
    E = C.E
    H, _ = _hom_parent(C.base)
    y2 = gauge_act(T, g, y)
    u2, t2 = _split_cocone(T, y2)
    _, t1 = _split_cocone(T, y)
    f_parts = {}
    for j, c in T.components(0, g).items():
        f, _ = C.split(0, c)
        if f and not is_zero(f):
            f_parts[j] = hom_matrix(C.base, 0, f)
    ef = AMatrix(T.A, RatMatrix.zeros(H.total, H.total), f_parts).exp()
    emb = lambda v: H.embed(0, v)
    c0, p0 = ef.apply(emb(C.s), {j: emb(v) for j, v in t1.items()})
    ext = lambda w: H.extract(0, w)
    rhs_parts = {j: ext(w) for j, w in p0.items()}
    if ext(c0) != tuple(C.s):
        raise ArithmeticError("constant part of e^f(s + t) differs from s")
    diff = {}
    for j in set(t2) | set(rhs_parts):
        w = vsub(t2.get(j, zero_vec(E.dim(0))), rhs_parts.get(j, zero_vec(E.dim(0))))
        if not is_zero(w):
            diff[j] = w
    Du2 = deformed_differential(T, u2)
    if not E.dim(-1):
        return {"ok": not diff, "witness": (), "target": y2}
    full = _linearize(Du2, list(range(H.offsets[0], H.offsets[0] + E.dim(0))),
                      list(range(H.offsets[-1], H.offsets[-1] + E.dim(-1))))
    # restrict the source to E^{-1} (x) m_A: drop the constant slot
    n1 = E.dim(-1)
    M = RatMatrix([r[n1:] for r in full.rows], full.ncols - n1)
    target = _ASpace(T.A, E.dim(0)).pack(zero_vec(E.dim(0)), diff)
    w = solve(M, target)
    return {"ok": w is not None, "witness": w, "target": y2}


def gauge_conjugation_check(T: TensorDGLA, g: Sequence, y: Sequence) -> bool:
    """``D + u' = e^f (D + u) e^{-f}`` where ``(u', t') = e^g * (u, t)`` and ``f`` is the Hom part of ``g``."""
    C = T.base
    H, _ = _hom_parent(C.base)
    u1, _ = _split_cocone(T, y)
    u2, _ = _split_cocone(T, gauge_act(T, g, y))
    f_parts = {}
    for j, c in T.components(0, g).items():
        f, _ = C.split(0, c)
        if f and not is_zero(f):
            f_parts[j] = hom_matrix(C.base, 0, f)
    F = AMatrix(T.A, RatMatrix.zeros(H.total, H.total), f_parts)
    diff = F.exp() @ deformed_differential(T, u1) @ (-F).exp() - deformed_differential(T, u2)
    return diff.const.is_zero() and not diff.parts


def section_classes_match(T: TensorDGLA, g: Sequence, y: Sequence) -> bool:
    """``e^f`` carries the section class of ``y`` to that of ``e^g * y``."""
    C = T.base
    H, _ = _hom_parent(C.base)
    y2 = gauge_act(T, g, y)
    m1, m2 = materialize_deformation(T, y), materialize_deformation(T, y2)
    f_parts = {}
    for j, c in T.components(0, g).items():
        f, _ = C.split(0, c)
        if f and not is_zero(f):
            f_parts[j] = hom_matrix(C.base, 0, f)
    ef = AMatrix(T.A, RatMatrix.zeros(H.total, H.total), f_parts).exp()
    E0 = list(range(H.offsets[0], H.offsets[0] + C.E.dim(0)))
    F = _linearize(ef, E0, E0)
    return m2.quotient.normal_form(F.apply(m1.section)) == m2.section
