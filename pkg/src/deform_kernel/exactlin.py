"""Exact rational linear algebra and cohomology of finite cochain complexes.

Everything here works over :class:`fractions.Fraction`; there is no floating
point anywhere.  Matrices are immutable and act on column vectors, so a
differential ``d_n : V^n -> V^{n+1}`` is stored as a ``dim V^{n+1} x dim V^n``
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


class ComplexError(ValueError):
    """Raised when a differential fails ``d o d = 0`` or shapes disagree."""

    def __init__(self, message: str, degree=None):
        super().__init__(message)
        self.degree = degree


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted")
    return Fraction(x)


def vec(entries: Iterable) -> Vector:
    return tuple(frac(x) for x in entries)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def vadd(u: Sequence, w: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, w))


def vsub(u: Sequence, w: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, w))


def vscale(c, u: Sequence) -> Vector:
    c = frac(c)
    return tuple(c * a for a in u)


def unit_vec(n: int, i: int) -> Vector:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))


class RatMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(frac(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "RatMatrix":
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"RatMatrix({self.nrows}x{self.ncols}: [{body}])"

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for {self.nrows}x{self.ncols} matrix")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.rows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = [[(j, x) for j, x in enumerate(r) if x] for r in other.rows]
        out = []
        for r in self.rows:
            acc = {}
            for k, a in enumerate(r):
                if a:
                    for j, x in orows[k]:
                        acc[j] = acc.get(j, 0) + a * x
            row = [Fraction(0)] * other.ncols
            for j, x in acc.items():
                row[j] = x
            out.append(row)
        return RatMatrix(out, other.ncols)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix([vadd(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix([vsub(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c) -> "RatMatrix":
        return RatMatrix([vscale(c, r) for r in self.rows], self.ncols)

    def __neg__(self):
        return self.scale(-1)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def rank(self) -> int:
        return len(rref(self.rows, self.ncols)[1])

    def rank_by_columns(self) -> int:
        """Rank via elimination on the transpose; must agree with :meth:`rank`."""
        return len(rref(self.T.rows, self.nrows)[1])

    def kernel(self) -> list[Vector]:
        return kernel_basis(self)

    def solve(self, b: Sequence) -> Vector | None:
        return solve(self, b)


def hstack(blocks: Sequence[RatMatrix], nrows: int) -> RatMatrix:
    rows = [[] for _ in range(nrows)]
    for b in blocks:
        if b.nrows != nrows:
            raise ValueError("hstack row mismatch")
        for i, r in enumerate(b.rows):
            rows[i].extend(r)
    return RatMatrix(rows, sum(b.ncols for b in blocks))


def block_matrix(blocks: dict, row_dims: Sequence[int], col_dims: Sequence[int]) -> RatMatrix:
    """Assemble a matrix from ``{(i, j): RatMatrix}``; missing blocks are zero."""
    roff = [0]
    for r in row_dims:
        roff.append(roff[-1] + r)
    coff = [0]
    for c in col_dims:
        coff.append(coff[-1] + c)
    out = [[Fraction(0)] * coff[-1] for _ in range(roff[-1])]
    for (i, j), m in blocks.items():
        if m.shape != (row_dims[i], col_dims[j]):
            raise ValueError(f"block {(i, j)} has shape {m.shape}, expected {(row_dims[i], col_dims[j])}")
        for a, r in enumerate(m.rows):
            row = out[roff[i] + a]
            for b, x in enumerate(r):
                if x:
                    row[coff[j] + b] += x
    return RatMatrix(out, coff[-1])


def rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form.

    Pivots are chosen as the first nonzero entry in row-major scan order, so
    results are deterministic.  Returns ``(reduced_rows, pivot_columns)``.
    Elimination runs on sparse rows; the result is returned dense.
    """
    m = [{j: x for j, x in enumerate(r) if x} for r in rows]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if c in m[i]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        pr = {j: x * inv for j, x in m[r].items()}
        m[r] = pr
        for i in range(nrows):
            if i != r:
                row = m[i]
                f = row.get(c)
                if f is None:
                    continue
                for j, x in pr.items():
                    y = row.get(j, 0) - f * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        pivots.append(c)
        r += 1
    zero = Fraction(0)
    dense = []
    for row in m:
        d = [zero] * ncols
        for j, x in row.items():
            d[j] = Fraction(x)
        dense.append(d)
    return dense, pivots


def rank(M: RatMatrix) -> int:
    return M.rank()


def kernel_basis(M: RatMatrix) -> list[Vector]:
    R, pivots = rref(M.rows, M.ncols)
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(tuple(v))
    return basis


def image_basis(M: RatMatrix) -> list[Vector]:
    """Independent columns of ``M`` (pivot columns, in order)."""
    _, pivots = rref(M.rows, M.ncols)
    return [M.column(j) for j in pivots]


def solve(M: RatMatrix, b: Sequence) -> Vector | None:
    """A particular solution of ``M x = b`` or ``None``.

    Free variables are set to zero, which makes the returned preimage canonical.
    """
    b = vec(b)
    if len(b) != M.nrows:
        raise ValueError("right-hand side length mismatch")
    aug = [list(r) + [x] for r, x in zip(M.rows, b)]
    R, pivots = rref(aug, M.ncols + 1)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [Fraction(0)] * M.ncols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][M.ncols]
    return tuple(x)


def left_null_combination(M: RatMatrix, b: Sequence) -> Vector | None:
    """For an inconsistent system ``M x = b`` return ``y`` with ``y M = 0`` and ``y b = 1``."""
    b = vec(b)
    # Solve [M^T ; b^T] y = (0, ..., 0, 1).
    rows = [list(r) for r in M.T.rows] + [list(b)]
    sys_ = RatMatrix(rows, M.nrows)
    rhs = [Fraction(0)] * M.ncols + [Fraction(1)]
    return solve(sys_, rhs)


@dataclass(frozen=True)
class GradedComplex:
    """Finite graded vector space with a degree +1 differential.

    ``dims`` maps degree to dimension; degrees absent from ``dims`` are zero.
    ``d`` maps degree ``n`` to the matrix of ``d_n``; missing entries are zero.
    """

    dims: dict
    d: dict = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        dims = {int(k): int(v) for k, v in self.dims.items() if int(v) > 0}
        object.__setattr__(self, "dims", dims)
        dd = {}
        for n, m in self.d.items():
            n = int(n)
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise ComplexError(
                    f"d_{n} has shape {m.shape}, expected {(self.dim(n + 1), self.dim(n))}", n
                )
            if not m.is_zero():
                dd[n] = m
        object.__setattr__(self, "d", dd)
        if self.check:
            self.verify()

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    @property
    def lo(self) -> int:
        return min(self.dims) if self.dims else 0

    @property
    def hi(self) -> int:
        return max(self.dims) if self.dims else 0

    def diff(self, n: int) -> RatMatrix:
        m = self.d.get(n)
        return m if m is not None else RatMatrix.zeros(self.dim(n + 1), self.dim(n))

    def apply(self, n: int, v: Sequence) -> Vector:
        return self.diff(n).apply(v)

    def verify(self):
        for n in sorted(self.d):
            if n + 1 in self.d and not (self.d[n + 1] @ self.d[n]).is_zero():
                raise ComplexError(f"d o d != 0 starting in degree {n}", n)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())


@dataclass
class DegreeCohomology:
    degree: int
    dim: int
    representatives: list
    cocycle_basis: list
    boundary_basis: list
    _span: RatMatrix | None = None  # columns: boundary basis then representatives


class CohomologyReport:
    """Per-degree cohomology of a :class:`GradedComplex`."""

    def __init__(self, complex_: GradedComplex):
        self.complex = complex_
        self.degrees: dict[int, DegreeCohomology] = {}
        lo, hi = complex_.lo, complex_.hi
        for n in range(lo, hi + 1):
            dim_n = complex_.dim(n)
            if dim_n == 0:
                continue
            Z = kernel_basis(complex_.diff(n))
            B = image_basis(complex_.diff(n - 1)) if complex_.dim(n - 1) else []
            # pivot columns of [B | Z] beyond B extend the boundaries to the cocycles
            reps = []
            if Z:
                _, piv = rref(RatMatrix.from_columns(list(B) + list(Z), dim_n).rows, len(B) + len(Z))
                reps = [Z[j - len(B)] for j in piv if j >= len(B)]
            span = list(B) + reps
            self.degrees[n] = DegreeCohomology(
                n, len(reps), reps, Z, B,
                RatMatrix.from_columns(span, dim_n) if span else None,
            )

    def dim(self, n: int) -> int:
        h = self.degrees.get(n)
        return h.dim if h else 0

    def dims(self) -> dict:
        return {n: h.dim for n, h in sorted(self.degrees.items())}

    def representatives(self, n: int) -> list:
        h = self.degrees.get(n)
        return list(h.representatives) if h else []

    def is_cocycle(self, n: int, v: Sequence) -> bool:
        return is_zero(self.complex.apply(n, v))

    def project(self, n: int, v: Sequence) -> Vector:
        """Coordinates of the class of the cocycle ``v`` in the representative basis."""
        if not self.is_cocycle(n, v):
            raise ValueError(f"vector is not a cocycle in degree {n}")
        h = self.degrees.get(n)
        if h is None or h.dim == 0:
            return ()
        x = solve(h._span, v)
        if x is None:
            raise ArithmeticError("cocycle outside span of boundaries and representatives")
        return x[len(h.boundary_basis):]

    def solve_membership(self, n: int, v: Sequence) -> Vector | None:
        """A preimage ``u`` with ``d_{n-1} u = v`` or ``None`` if ``v`` is not a boundary."""
        if self.complex.dim(n - 1) == 0:
            return () if is_zero(v) else None
        return solve(self.complex.diff(n - 1), v)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * h.dim for n, h in self.degrees.items())


def cohomology(C: GradedComplex) -> CohomologyReport:
    C.verify()
    return CohomologyReport(C)


def cohomology_dims(C: GradedComplex) -> dict:
    """Dimensions only, via rank-nullity (cheaper than building representatives)."""
    out = {}
    ranks = {n: C.diff(n).rank() for n in range(C.lo - 1, C.hi + 1)}
    for n in range(C.lo, C.hi + 1):
        out[n] = C.dim(n) - ranks.get(n, 0) - ranks.get(n - 1, 0)
    return out


@dataclass(frozen=True)
class DoubleComplex:
    """Grid of spaces ``(p, q)`` with commuting horizontal and vertical differentials.

    ``h[(p, q)] : (p, q) -> (p + 1, q)`` and ``v[(p, q)] : (p, q) -> (p, q + 1)``.
    The totalization applies the sign ``(-1)^p`` to vertical maps.
    """

    dims: dict
    h: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def dim(self, p, q):
        return self.dims.get((p, q), 0)

    def hmap(self, p, q):
        m = self.h.get((p, q))
        return m if m is not None else RatMatrix.zeros(self.dim(p + 1, q), self.dim(p, q))

    def vmap(self, p, q):
        m = self.v.get((p, q))
        return m if m is not None else RatMatrix.zeros(self.dim(p, q + 1), self.dim(p, q))


def total_complex(D: DoubleComplex) -> tuple[GradedComplex, dict]:
    """Totalize ``D`` with ``d = d_h + (-1)^p d_v``.

    Returns the total complex and the block layout ``{n: [(p, q, offset, dim), ...]}``.
    """
    cells = sorted(k for k, v in D.dims.items() if v > 0)
    for (p, q) in cells:
        if not (D.hmap(p + 1, q) @ D.hmap(p, q)).is_zero():
            raise ComplexError(f"horizontal d o d != 0 at {(p, q)}", (p, q))
        if not (D.vmap(p, q + 1) @ D.vmap(p, q)).is_zero():
            raise ComplexError(f"vertical d o d != 0 at {(p, q)}", (p, q))
        if not (D.hmap(p, q + 1) @ D.vmap(p, q) == D.vmap(p + 1, q) @ D.hmap(p, q)):
            raise ComplexError(f"square at {(p, q)} does not commute", (p, q))
    layout: dict = {}
    for (p, q) in cells:
        layout.setdefault(p + q, []).append((p, q))
    offsets = {}
    dims = {}
    for n, lst in layout.items():
        off = 0
        entries = []
        for (p, q) in sorted(lst):
            entries.append((p, q, off, D.dim(p, q)))
            off += D.dim(p, q)
        offsets[n] = entries
        dims[n] = off
    diffs = {}
    for n in dims:
        if n + 1 not in dims:
            continue
        src = {(p, q): i for i, (p, q, _, _) in enumerate(offsets[n])}
        tgt = {(p, q): i for i, (p, q, _, _) in enumerate(offsets[n + 1])}
        blocks = {}
        for (p, q), j in src.items():
            if (p + 1, q) in tgt:
                blocks[(tgt[(p + 1, q)], j)] = D.hmap(p, q)
            if (p, q + 1) in tgt:
                m = D.vmap(p, q)
                blocks[(tgt[(p, q + 1)], j)] = m if p % 2 == 0 else -m
        diffs[n] = block_matrix(
            blocks, [e[3] for e in offsets[n + 1]], [e[3] for e in offsets[n]]
        )
    return GradedComplex(dims, diffs), offsets
