"""Local Artin algebras given by monomial truncations, and L (x) m_A.

Only monomial ideals are supported: either a total-degree cutoff
``K[x_1..x_r]/(m^c)`` or per-variable exponents ``K[x_1..x_r]/(x_i^{e_i})``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Sequence

from .dgla import DGLieAlgebra
from .exactlin import RatMatrix, Vector, frac, is_zero, vadd, vscale, zero_vec


class ArtinLocalAlgebra:
    """``K (+) m_A`` with a monomial basis of ``m_A``.

    Basis monomials are exponent tuples, ordered by total degree and then
    lexicographically (descending), so ``t, t^2, ...`` for one variable.
    """

    def __init__(self, vars: Sequence[str], total_degree: int | None = None, exponents: Sequence[int] | None = None):
        self.vars = tuple(vars)
        r = len(self.vars)
        if r == 0:
            raise ValueError("at least one variable is required")
        if total_degree is None and exponents is None:
            raise ValueError("no truncation given: the algebra would not be Artinian")
        if total_degree is not None and total_degree < 1:
            raise ValueError("cutoff must be >= 1")
        if exponents is not None:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != r or any(e < 1 for e in exponents):
                raise ValueError("one exponent >= 1 per variable is required")
        self.total_degree = total_degree
        self.exponents = exponents
        bound = exponents or (total_degree,) * r
        monos = [m for m in product(*(range(b) for b in bound)) if any(m) and self._alive(m)]
        monos.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
        self.basis = tuple(monos)
        self.index = {m: i for i, m in enumerate(monos)}
        self.dim = len(monos)
        self.order = tuple(sum(m) for m in monos)
        self.max_order = max(self.order, default=0)
        # product of any N elements of m is zero
        self.nilpotency = self.max_order + 1
        self.table = {}
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                c = tuple(x + y for x, y in zip(a, b))
                k = self.index.get(c)
                if k is not None:
                    self.table[(i, j)] = k

    def _alive(self, m) -> bool:
        if self.total_degree is not None and sum(m) >= self.total_degree:
            return False
        if self.exponents is not None and any(x >= e for x, e in zip(m, self.exponents)):
            return False
        return True

    def mul(self, i: int, j: int):
        """Index of ``m_i * m_j`` or ``None`` when the product is zero."""
        return self.table.get((i, j))

    def name(self, i: int) -> str:
        parts = []
        for v, e in zip(self.vars, self.basis[i]):
            if e == 1:
                parts.append(v)
            elif e > 1:
                parts.append(f"{v}^{e}")
        return "*".join(parts)

    def power_indices(self, k: int) -> list[int]:
        """Basis indices spanning ``m^k``."""
        return [i for i, o in enumerate(self.order) if o >= k]

    def filtration_dims(self) -> list[int]:
        """``[dim m, dim m^2, ...]`` down to 0."""
        out = []
        k = 1
        while True:
            n = len(self.power_indices(k))
            out.append(n)
            if n == 0:
                return out
            k += 1

    def check(self) -> list[str]:
        """Commutativity, associativity and nilpotency on all basis tuples."""
        bad = []
        n = self.dim
        for i in range(n):
            for j in range(n):
                if self.mul(i, j) != self.mul(j, i):
                    bad.append(f"commutativity {self.name(i)},{self.name(j)}")
                for k in range(n):
                    ij, jk = self.mul(i, j), self.mul(j, k)
                    left = None if ij is None else self.mul(ij, k)
                    right = None if jk is None else self.mul(i, jk)
                    if left != right:
                        bad.append(f"associativity {self.name(i)},{self.name(j)},{self.name(k)}")
        dims = self.filtration_dims()
        if any(a <= b for a, b in zip(dims, dims[1:]) if a):
            bad.append("filtration not strictly decreasing")
        if len(self.power_indices(self.nilpotency)) != 0:
            bad.append("nilpotency bound")
        return bad

    def to_json(self) -> dict:
        trunc = {"total_degree": self.total_degree} if self.exponents is None else {"exponents": list(self.exponents)}
        return {"vars": list(self.vars), "truncation": trunc}


def make_truncated(vars: Sequence[str] | str, total_degree: int | None = None,
                   exponents: Sequence[int] | None = None) -> ArtinLocalAlgebra:
    if isinstance(vars, str):
        vars = [vars]
    return ArtinLocalAlgebra(vars, total_degree=total_degree, exponents=exponents)


def dual_numbers(var: str = "e") -> ArtinLocalAlgebra:
    return make_truncated([var], total_degree=2)


def truncated_poly(n: int, var: str = "t") -> ArtinLocalAlgebra:
    """``K[t]/(t^n)``."""
    return make_truncated([var], total_degree=n)


def from_json(data: dict) -> ArtinLocalAlgebra:
    tr = data.get("truncation", {})
    return make_truncated(data["vars"], total_degree=tr.get("total_degree"), exponents=tr.get("exponents"))


# -- L (x) m_A ---------------------------------------------------------------------------


class TensorDGLA(DGLieAlgebra):
    """``L (x) m_A``; coordinates are grouped by monomial (``index = j * dim L^n + i``).

    The bracket of ``L`` is only evaluated on components whose product in
    ``m_A`` is nonzero, so a linear-only ``L`` is fine over square-zero ``A``.
    """

    def __init__(self, base: DGLieAlgebra, A: ArtinLocalAlgebra):
        self.base = base
        self.A = A
        super().__init__({n: base.dim(n) * A.dim for n in base.degrees})
        self.has_bracket = base.has_bracket or not A.table

    def label(self, n, k):
        b = self.base.dim(n)
        return f"{self.base.label(n, k % b)}*{self.A.name(k // b)}"

    def components(self, n: int, v: Sequence) -> dict:
        """Nonzero components ``{j: x_j}`` with ``v = sum x_j (x) m_j``."""
        b = self.base.dim(n)
        out = {}
        for j in range(self.A.dim):
            x = tuple(v[j * b:(j + 1) * b])
            if not is_zero(x):
                out[j] = x
        return out

    def from_components(self, n: int, comps: dict) -> Vector:
        b = self.base.dim(n)
        out = [Fraction(0)] * (b * self.A.dim)
        for j, x in comps.items():
            for i, c in enumerate(x):
                out[j * b + i] += frac(c)
        return tuple(out)

    def pure(self, n: int, x: Sequence, j: int) -> Vector:
        return self.from_components(n, {j: x})

    def truncate(self, n: int, v: Sequence, k: int) -> Vector:
        """Reduce modulo ``m^k``: keep components of order < k."""
        return self.from_components(n, {j: x for j, x in self.components(n, v).items() if self.A.order[j] < k})

    def order_part(self, n: int, v: Sequence, k: int) -> dict:
        """Components on monomials of order exactly ``k``."""
        return {j: x for j, x in self.components(n, v).items() if self.A.order[j] == k}

    def valuation(self, n: int, v: Sequence) -> int | None:
        orders = [self.A.order[j] for j in self.components(n, v)]
        return min(orders) if orders else None

    def _d(self, n, v):
        return self.from_components(n + 1, {j: self.base.d(n, x) for j, x in self.components(n, v).items()})

    def _bracket(self, p, u, q, w):
        cu, cw = self.components(p, u), self.components(q, w)
        out = {}
        for j1, x in cu.items():
            for j2, y in cw.items():
                k = self.A.mul(j1, j2)
                if k is None:
                    continue
                z = self.base.bracket(p, x, q, y)
                out[k] = vadd(out[k], z) if k in out else z
        return self.from_components(p + q, out)


def tensor(L: DGLieAlgebra, A: ArtinLocalAlgebra) -> TensorDGLA:
    return TensorDGLA(L, A)


def lower_central_series(T: TensorDGLA) -> list[int]:
    """Dimensions of ``g, [g,g], [g,[g,g]], ...`` for ``g = (L (x) m)^0`` until 0.

    Uses the filtration bound: the k-th term lies in ``L^0 (x) m^k``, and the
    spans are computed exactly.
    """
    from .exactlin import image_basis
    g = T.basis(0)
    dims = []
    cur = g
    while True:
        span = image_basis(RatMatrix.from_columns(cur, T.dim(0))) if cur else []
        dims.append(len(span))
        if not span:
            return dims
        cur = [T.bracket(0, a, 0, b) for a in g for b in span]
        cur = [c for c in cur if not is_zero(c)]


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli numbers with ``B_1 = -1/2``."""
    if n == 0:
        return Fraction(1)
    return -sum(comb(n + 1, k) * bernoulli(k) for k in range(n)) / Fraction(n + 1)


def _compositions(n: int, parts: int):
    if parts == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def bch(T: TensorDGLA, a: Sequence, b: Sequence) -> Vector:
    """``log(e^a e^b)`` in ``(L (x) m)^0`` by the recursive commutator formula.

    The homogeneous part of bracket length ``n`` lies in ``m^n``, so the
    recursion stops at the nilpotency bound.
    """
    br = lambda x, y: T.bracket(0, x, 0, y)
    apb = vadd(a, b)
    amb = tuple(x - y for x, y in zip(a, b))
    Z = {1: apb}
    for n in range(1, T.A.nilpotency - 1):
        acc = vscale(Fraction(1, 2), br(amb, Z[n]))
        for p in range(1, n // 2 + 1):
            coef = bernoulli(2 * p) / factorial(2 * p)
            for ks in _compositions(n, 2 * p):
                term = apb
                for k in reversed(ks):
                    term = br(Z[k], term)
                acc = vadd(acc, vscale(coef, term))
        Z[n + 1] = vscale(Fraction(1, n + 1), acc)
    out = zero_vec(T.dim(0))
    for z in Z.values():
        out = vadd(out, z)
    return out


def exp_ad(T: DGLieAlgebra, a: Sequence, n: int, x: Sequence, nilpotency: int) -> Vector:
    """``e^{ad a} x = sum_k ad(a)^k x / k!`` for degree-0 ``a`` and ``x`` of degree ``n``."""
    out = tuple(x)
    term = tuple(x)
    for k in range(1, nilpotency):
        term = vscale(Fraction(1, k), T.bracket(0, a, n, term))
        if is_zero(term):
            break
        out = vadd(out, term)
    return out


# -- matrices over A --------------------------------------------------------------------


class AMatrix:
    """Square matrix with entries in ``A = K (+) m_A``: ``const + sum_j parts[j] (x) m_j``."""

    def __init__(self, A: ArtinLocalAlgebra, const: RatMatrix, parts: dict | None = None):
        self.A = A
        self.const = const
        self.parts = {j: m for j, m in (parts or {}).items() if not m.is_zero()}

    @property
    def n(self):
        return self.const.nrows

    @classmethod
    def identity(cls, A, n):
        return cls(A, RatMatrix.identity(n))

    @classmethod
    def zero(cls, A, n):
        return cls(A, RatMatrix.zeros(n, n))

    def __add__(self, other):
        parts = dict(self.parts)
        for j, m in other.parts.items():
            parts[j] = parts[j] + m if j in parts else m
        return AMatrix(self.A, self.const + other.const, parts)

    def __neg__(self):
        return AMatrix(self.A, -self.const, {j: -m for j, m in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return AMatrix(self.A, self.const.scale(c), {j: m.scale(c) for j, m in self.parts.items()})

    def __matmul__(self, other):
        parts = {}

        def put(k, m):
            parts[k] = parts[k] + m if k in parts else m

        for j, m in other.parts.items():
            put(j, self.const @ m)
        for j, m in self.parts.items():
            put(j, m @ other.const)
            for k, m2 in other.parts.items():
                jk = self.A.mul(j, k)
                if jk is not None:
                    put(jk, m @ m2)
        return AMatrix(self.A, self.const @ other.const, parts)

    def __eq__(self, other):
        return self.const == other.const and self.parts == other.parts

    def is_nilpotent_part(self) -> bool:
        return self.const.is_zero()

    def exp(self) -> "AMatrix":
        """Finite exponential of a matrix with entries in ``m_A``."""
        if not self.const.is_zero():
            raise ValueError("exp needs entries in the maximal ideal")
        out = AMatrix.identity(self.A, self.n)
        term = AMatrix.identity(self.A, self.n)
        for k in range(1, self.A.nilpotency):
            term = (term @ self).scale(Fraction(1, k))
            if not term.parts:
                break
            out = out + term
        return out

    def apply(self, const_v: Sequence, parts_v: dict | None = None):
        """Apply to ``v = const_v + sum_j parts_v[j] m_j``; returns ``(const, parts)``."""
        parts_v = parts_v or {}
        c = self.const.apply(const_v)
        out = {}

        def put(k, w):
            out[k] = vadd(out[k], w) if k in out else w

        for j, m in self.parts.items():
            put(j, m.apply(const_v))
        for j, w in parts_v.items():
            put(j, self.const.apply(w))
            for k, m in self.parts.items():
                jk = self.A.mul(k, j)
                if jk is not None:
                    put(jk, m.apply(w))
        return c, {k: w for k, w in out.items() if not is_zero(w)}
