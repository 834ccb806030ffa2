"""Truncated section spaces on A^1 and P^1.

P^1 is covered by ``U0 = Spec K[t]`` and ``U1 = Spec K[s]`` with ``s = 1/t`` on
``U01``.  A line bundle ``O(a)`` has frames ``e0`` on ``U0`` and ``e1`` on
``U1`` with ``e1 = t^a e0``, so a global section ``f0 e0`` reads
``s^a f0(1/s) e1`` on ``U1``.

Every section monomial carries a torus weight (``t`` has weight 1, ``e0``
weight 0, ``d/dt`` weight -1) that is independent of the chart.  Restrictions
preserve weight, and every differential used here is a sum of terms that do not
lower it.  Sections are truncated to the weight window ``[-N, N]`` in every
degree: a differential is applied and terms of weight above ``N`` are dropped,
which is the subquotient ``V_{>=-N} / V_{>N}`` of the full Cech complex.  Far
from zero the weight-graded pieces are acyclic, so the truncated cohomology is
the true one once ``N`` is large; this is certified by stabilization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

import sympy

from .cosimp import SemicosimplicialDGLA, build_cech_scdgla, total_cochain
from .dgla import StructureConstantDGLA
from .exactlin import GradedComplex, RatMatrix, cohomology_dims, frac


class WindowOverflow(ArithmeticError):
    pass


class StabilizationError(ArithmeticError):
    pass


# -- Laurent polynomials as {exponent: coefficient} ----------------------------------


def padd(*ps) -> dict:
    out: dict = {}
    for p in ps:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def pscale(c, p) -> dict:
    c = frac(c)
    return {e: c * x for e, x in p.items() if c * x}


def pmul(p, q) -> dict:
    out: dict = {}
    for e, a in p.items():
        for f, b in q.items():
            out[e + f] = out.get(e + f, 0) + a * b
    return {e: c for e, c in out.items() if c}


def pderiv(p) -> dict:
    return {e - 1: e * c for e, c in p.items() if e}


def pdeg(p) -> int:
    return max(p) if p else -1


def parse_poly(text, var: str = "t") -> dict:
    """Parse a polynomial in one variable with rational coefficients."""
    if isinstance(text, dict):
        return {int(e): frac(c) for e, c in text.items() if frac(c)}
    if isinstance(text, (int, Fraction)):
        return {0: frac(text)} if text else {}
    sym = sympy.Symbol(var)
    expr = sympy.sympify(str(text).replace("^", "**"), locals={var: sym})
    poly = sympy.Poly(sympy.expand(expr), sym)
    out = {}
    for (e,), c in poly.terms():
        c = sympy.Rational(c)
        if c:
            out[int(e)] = Fraction(int(c.p), int(c.q))
    return out


def format_poly(p: dict, var: str = "t") -> str:
    if not p:
        return "0"
    terms = []
    for e in sorted(p, reverse=True):
        c = p[e]
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = str(c) + ("*" + mono if mono else "")
        terms.append(s)
    return "+".join(terms).replace("+-", "-")


def poly_divmod(a: dict, b: dict) -> tuple[dict, dict]:
    """Division of polynomials (nonnegative exponents)."""
    a = padd(a)
    q: dict = {}
    db, lb = pdeg(b), frac(b[pdeg(b)])
    while a and pdeg(a) >= db:
        e = pdeg(a)
        c = a[e] / lb
        q[e - db] = c
        a = padd(a, pscale(-c, {f + e - db: x for f, x in b.items()}))
    return q, a


def poly_mod(a: dict, b: dict) -> dict:
    return poly_divmod(a, b)[1]


def poly_ext_gcd(a: dict, b: dict):
    """``(g, x, y)`` with ``x a + y b = g`` monic."""
    r0, r1 = dict(a), dict(b)
    x0, x1, y0, y1 = {0: Fraction(1)}, {}, {}, {0: Fraction(1)}
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, padd(x0, pscale(-1, pmul(q, x1)))
        y0, y1 = y1, padd(y0, pscale(-1, pmul(q, y1)))
    lc = r0[pdeg(r0)]
    return pscale(1 / lc, r0), pscale(1 / lc, x0), pscale(1 / lc, y0)


def strip_t(f: dict) -> tuple[dict, int]:
    """``f = t^k g`` with ``g(0) != 0``; returns ``(g, k)``."""
    k = min(f)
    return {e - k: c for e, c in f.items()}, k


# -- components and sheaf complexes ---------------------------------------------------


@dataclass(frozen=True)
class Comp:
    """A rank-one summand of one degree of a sheaf complex.

    On ``U1`` the monomial ``s^k`` in this component is ``coef * t^(m - k)`` in
    the ``U0`` frame (plus ``extras`` in other components).  ``off`` is 1 for
    vector fields so that the weight of ``t^e`` is ``e - off``.
    """

    key: tuple
    degree: int
    m: int
    off: int = 0
    coef: int = 1

    @property
    def kind(self) -> str:
        return self.key[0]


class SheafComplex:
    """Bounded complex of sums of line bundles and Theta on P^1 (or A^1).

    ``local_d(chart, n, idx, e)`` returns ``{(idx', e'): c}``: the differential
    of the monomial ``x^e`` in component ``idx`` of degree ``n``, in the chart's
    coordinate and frame.  The default differential is zero.
    """

    def __init__(self, comps: dict):
        self.comps = {n: list(c) for n, c in comps.items() if c}

    @property
    def degrees(self):
        return sorted(self.comps)

    def local_d(self, chart: str, n: int, idx: int, e: int) -> dict:
        return {}

    def extras(self, n: int, idx: int, k: int) -> dict:
        return {}

    def transition(self, n: int, idx: int, k: int) -> dict:
        """``s^k`` in component ``idx`` on ``U1`` rewritten in the ``U0`` frame on ``U01``."""
        c = self.comps[n][idx]
        out = {(idx, c.m - k): Fraction(c.coef)}
        for key, v in self.extras(n, idx, k).items():
            out[key] = out.get(key, 0) + v
        return {k2: v for k2, v in out.items() if v}

    def weight(self, chart: str, n: int, idx: int, e: int) -> int:
        c = self.comps[n][idx]
        return (c.m - e - c.off) if chart == "s" else (e - c.off)

    def exponent_range(self, chart: str, n: int, idx: int, N: int) -> range:
        c = self.comps[n][idx]
        if chart == "t":
            return range(max(0, c.off - N), c.off + N + 1)
        if chart == "L":
            return range(c.off - N, c.off + N + 1)
        return range(max(0, c.m - c.off - N), max(0, c.m - c.off + N + 1))

    def basis(self, chart: str, n: int, N: int) -> list:
        out = []
        for idx in range(len(self.comps.get(n, []))):
            out.extend((idx, e) for e in self.exponent_range(chart, n, idx, N))
        return out


def line_bundle(d: int) -> SheafComplex:
    """``O(d)`` in degree 0."""
    return SheafComplex({0: [Comp(("E", 0, 0), 0, d)]})


def tangent_sheaf() -> SheafComplex:
    """Theta with ``s^k d/ds = -t^(2-k) d/dt``."""
    return SheafComplex({0: [Comp(("X",), 0, 2, 1, -1)]})


@dataclass
class Resolution:
    """Bounded complex of sums of line bundles ``E^k = (+)_i O(a_ki)``, ``k <= 0``.

    ``d[k][i][j]`` is the polynomial (in ``t``) of the map ``O(a_kj) -> O(a_{k+1,i})``,
    a global section of ``O(a_{k+1,i} - a_kj)``.  ``s`` lists the components of a
    global section of ``E^0``.
    """

    twists: dict
    d: dict = field(default_factory=dict)
    s: list = field(default_factory=list)

    def __post_init__(self):
        self.twists = {int(k): [int(a) for a in v] for k, v in self.twists.items() if v}
        if any(k > 0 for k in self.twists):
            raise ValueError("resolution terms must sit in degrees <= 0")
        self.d = {int(k): [[parse_poly(g) for g in row] for row in m] for k, m in self.d.items()}
        r0 = len(self.twists.get(0, []))
        s = [parse_poly(x) for x in self.s] if self.s else [{} for _ in range(r0)]
        if len(s) != r0:
            raise ValueError("section must have one entry per summand of E^0")
        self.s = s
        for k, m in self.d.items():
            src, tgt = self.twists.get(k, []), self.twists.get(k + 1, [])
            if len(m) != len(tgt) or any(len(r) != len(src) for r in m):
                raise ValueError(f"d_{k} has the wrong shape")
            for i, row in enumerate(m):
                for j, g in enumerate(row):
                    if g and (min(g) < 0 or pdeg(g) > tgt[i] - src[j]):
                        raise ValueError(f"d_{k}[{i}][{j}] is not a global section of O({tgt[i] - src[j]})")
        for i, g in enumerate(self.s):
            if g and (min(g) < 0 or pdeg(g) > self.twists[0][i]):
                raise ValueError(f"s[{i}] is not a global section of O({self.twists[0][i]})")
        for k in self.d:
            if k + 1 in self.d:
                prod = self._compose(self.d[k + 1], self.d[k])
                if any(g for row in prod for g in row):
                    raise ValueError(f"d_{k + 1} o d_{k} != 0")

    @staticmethod
    def _compose(A, B):
        return [[padd(*[pmul(A[i][l], B[l][j]) for l in range(len(B))]) for j in range(len(B[0]) if B else 0)]
                for i in range(len(A))]

    def rank(self, k: int) -> int:
        return len(self.twists.get(k, []))

    def dmat(self, k: int, chart: str):
        """Entries of ``d_k`` in the chart coordinate and frame."""
        m = self.d.get(k)
        if m is None:
            return None
        if chart != "s":
            return m
        src, tgt = self.twists[k], self.twists[k + 1]
        return [[{tgt[i] - src[j] - e: c for e, c in g.items()} for j, g in enumerate(row)] for i, row in enumerate(m)]

    def section(self, chart: str):
        if chart != "s":
            return self.s
        return [{self.twists[0][i] - e: c for e, c in g.items()} for i, g in enumerate(self.s)]

    def with_section(self, s) -> "Resolution":
        return Resolution(self.twists, {k: [[dict(g) for g in r] for r in m] for k, m in self.d.items()}, list(s))


def line_bundle_resolution(d: int, sigma) -> Resolution:
    """``(F, sigma) = (O(d), sigma)`` resolved by itself."""
    return Resolution({0: [d]}, {}, [sigma])


class CoconeSheaf(SheafComplex):
    """The cocone of ``e_s : P^*(E) -> E^*`` as a typed sheaf complex.

    Degree ``n`` has the vector-field component ``X`` (``n = 0`` only), the
    Hom components ``('H', k, i, j) : O(a_kj) -> O(a_{k+n,i})`` and the
    components ``('E', n-1, i)``.  On each chart ``P^0 = Theta (+) Hom^0`` with
    vector fields acting on frame coefficients; the frame change on ``U01``
    adds ``a * t^(1-k)`` to the diagonal Hom entries for ``s^k d/ds``.
    ``d(u, v) = ([D, u], D v - (-1)^n u(s))`` and ``[D, chi] = -chi(D)``.
    """

    def __init__(self, R: Resolution):
        self.R = R
        tw = R.twists
        degs = sorted(tw)
        span = degs[-1] - degs[0] if degs else 0
        comps: dict = {}
        for n in range(-span - 1, span + 2):
            lst = []
            if n == 0:
                lst.append(Comp(("X",), 0, 2, 1, -1))
            for k in degs:
                if k + n in tw:
                    for i, ai in enumerate(tw[k + n]):
                        for j, aj in enumerate(tw[k]):
                            lst.append(Comp(("H", k, i, j), n, ai - aj))
            for i, a in enumerate(tw.get(n - 1, [])):
                lst.append(Comp(("E", n - 1, i), n, a))
            if lst:
                comps[n] = lst
        super().__init__(comps)
        self.index = {n: {c.key: i for i, c in enumerate(lst)} for n, lst in self.comps.items()}

    def extras(self, n, idx, k):
        c = self.comps[n][idx]
        if c.kind != "X":
            return {}
        out = {}
        for kk, tw in self.R.twists.items():
            for j, a in enumerate(tw):
                if a:
                    out[(self.index[0][("H", kk, j, j)], 1 - k)] = Fraction(a)
        return out

    def local_d(self, chart, n, idx, e):
        c = self.comps[n][idx]
        R = self.R
        out: dict = {}
        tgt = self.index.get(n + 1, {})

        def put(key, poly, coef):
            if key not in tgt:
                raise KeyError(f"component {key} missing in degree {n + 1}")
            for f, x in poly.items():
                k2 = (tgt[key], f)
                out[k2] = out.get(k2, 0) + coef * x

        mono = {e: Fraction(1)}
        sg = -1 if n % 2 else 1
        if c.kind == "X":
            for k in R.d:
                D = R.dmat(k, chart)
                for i, row in enumerate(D):
                    for j, g in enumerate(row):
                        if g:
                            put(("H", k, i, j), pmul(mono, pderiv(g)), -1)
            for i, g in enumerate(R.section(chart)):
                if g:
                    put(("E", 0, i), pmul(mono, pderiv(g)), -1)
        elif c.kind == "H":
            _, k, i, j = c.key
            Dn = R.dmat(k + n, chart)
            if Dn is not None:
                for r in range(len(Dn)):
                    g = Dn[r][i]
                    if g:
                        put(("H", k, r, j), pmul(mono, g), 1)
            Dp = R.dmat(k - 1, chart)
            if Dp is not None:
                for cc, g in enumerate(Dp[j]):
                    if g:
                        put(("H", k - 1, i, cc), pmul(mono, g), -sg)
            if k == 0:
                g = R.section(chart)[j]
                if g:
                    put(("E", n, i), pmul(mono, g), -sg)
        else:
            _, k, i = c.key
            D = R.dmat(k, chart)
            if D is not None:
                for r in range(len(D)):
                    g = D[r][i]
                    if g:
                        put(("E", k + 1, r), pmul(mono, g), 1)
        return {k2: v for k2, v in out.items() if v}


# -- covers and windowed sections ------------------------------------------------------


@dataclass(frozen=True)
class Cover:
    """Finite cover of P^1 (or a single affine chart).

    ``charts[i]`` is the representation on ``U_i``: ``'t'`` (polynomials in t),
    ``'s'`` (polynomials in s) or ``'L'`` (Laurent polynomials in t).  Every
    intersection of two or more charts is the torus, represented by ``'L'``.
    """

    charts: tuple
    name: str = ""

    def kind(self, opens: tuple) -> str:
        if len(opens) == 1:
            return self.charts[opens[0]]
        return "L"

    @property
    def n(self):
        return len(self.charts)


P1_STANDARD = Cover(("t", "s"), "P1")
P1_REDUNDANT = Cover(("t", "s", "L"), "P1-3")
A1 = Cover(("t",), "A1")


class WindowedSheaf:
    """Sections of a :class:`SheafComplex` over the opens of a cover in the window ``[-N, N]``."""

    def __init__(self, F: SheafComplex, cover: Cover, N: int):
        self.F, self.cover, self.N = F, cover, N
        self._basis: dict = {}
        self._alg: dict = {}

    def basis(self, opens: tuple, n: int) -> list:
        key = (self.cover.kind(opens), n)
        if key not in self._basis:
            self._basis[key] = self.F.basis(key[0], n, self.N)
        return self._basis[key]

    def _truncate(self, chart, n, terms: dict, where) -> dict:
        out = {}
        for (idx, e), c in terms.items():
            w = self.F.weight(chart, n, idx, e)
            if w > self.N:
                continue
            if w < -self.N:
                raise WindowOverflow(f"weight {w} below the window at {where}; differential lowers weight")
            out[(idx, e)] = c
        return out

    def chart_complex(self, opens: tuple) -> GradedComplex:
        chart = self.cover.kind(opens)
        dims, ds = {}, {}
        for n in self.F.degrees:
            dims[n] = len(self.basis(opens, n))
        for n in self.F.degrees:
            if n + 1 not in self.F.comps:
                continue
            tb = {b: r for r, b in enumerate(self.basis(opens, n + 1))}
            cols = []
            for (idx, e) in self.basis(opens, n):
                img = self._truncate(chart, n + 1, self.F.local_d(chart, n, idx, e), (opens, n, idx, e))
                col = [Fraction(0)] * len(tb)
                for b, c in img.items():
                    if b not in tb:
                        raise WindowOverflow(f"image {b} outside chart basis on {opens}")
                    col[tb[b]] += c
                cols.append(col)
            ds[n] = RatMatrix.from_columns(cols, len(tb)) if cols else RatMatrix.zeros(len(tb), 0)
        return GradedComplex(dims, ds)

    def algebra(self, opens: tuple) -> StructureConstantDGLA:
        key = self.cover.kind(opens)
        if key not in self._alg:
            self._alg[key] = StructureConstantDGLA(self.chart_complex(opens), None)
        return self._alg[key]

    def restriction(self, src: tuple, dst: tuple) -> dict:
        a, b = self.cover.kind(src), self.cover.kind(dst)
        out = {}
        for n in self.F.degrees:
            sb, tb = self.basis(src, n), self.basis(dst, n)
            tpos = {x: r for r, x in enumerate(tb)}
            cols = []
            for (idx, e) in sb:
                col = [Fraction(0)] * len(tb)
                if a == b:
                    col[tpos[(idx, e)]] = Fraction(1)
                elif a == "t":
                    col[tpos[(idx, e)]] = Fraction(1)
                elif a == "s":
                    for key, c in self.F.transition(n, idx, e).items():
                        if key not in tpos:
                            raise WindowOverflow(f"transition of {(idx, e)} leaves the window")
                        col[tpos[key]] += c
                else:
                    raise ValueError(f"no restriction from {a} to {b}")
                cols.append(col)
            out[n] = RatMatrix.from_columns(cols, len(tb)) if cols else RatMatrix.zeros(len(tb), 0)
        return out


@dataclass
class CechModel:
    """Cech total complex with a label for every basis vector."""

    sheaf: object
    cover: Cover
    N: int
    scdgla: SemicosimplicialDGLA
    total: GradedComplex
    labels: dict

    def dims(self) -> dict:
        return cohomology_dims(self.total)

    def select(self, kinds: set) -> list:
        return {n: [i for i, lab in enumerate(lst) if lab[3][0] in kinds] for n, lst in self.labels.items()}


def cech_model(W, cover: Cover) -> CechModel:
    """Assemble the Cech semicosimplicial object of a windowed sheaf and totalize it.

    ``W`` provides ``algebra(opens)``, ``restriction(src, dst)`` and
    ``basis(opens, n)`` with labels ``(comp_index, exponent)``.
    """
    levels = 3 if cover.n >= 2 else 1
    S = build_cech_scdgla(cover.n, W.algebra, W.restriction, levels=levels)
    total, layout = total_cochain(S)
    tuples = [list(combinations(range(cover.n), k + 1)) for k in range(levels)]
    labels = {}
    for n, cells in layout.items():
        lst = []
        for (p, q, off, dim) in cells:
            for t in tuples[p]:
                for b in (W.basis(t, q) if W.algebra(t).dim(q) else []):
                    lst.append((p, q, t, W.comp_key(q, b[0]), b[1]))
        if len(lst) != total.dim(n):
            raise AssertionError("label bookkeeping mismatch")
        labels[n] = lst
    return CechModel(W, cover, W.N, S, total, labels)


def _comp_key(self, n, idx):
    return self.F.comps[n][idx].key


WindowedSheaf.comp_key = _comp_key


def default_window(F=None, d: int = 0) -> int:
    return 8 + abs(d)


@dataclass
class StabilizedDims:
    dims: dict
    window: int
    history: dict


def _nonzero(d: dict) -> dict:
    return {n: v for n, v in d.items() if v}


def stabilized(compute: Callable[[int], dict], N: int, max_window: int | None = None) -> StabilizedDims:
    """Increase the window until dims agree at ``N``, ``N + 1`` and ``N + 2``."""
    max_window = max_window if max_window is not None else N + 12
    hist = {}
    w = N
    while w + 2 <= max_window:
        for k in (w, w + 1, w + 2):
            if k not in hist:
                hist[k] = dict(compute(k))
        if _nonzero(hist[w]) == _nonzero(hist[w + 1]) == _nonzero(hist[w + 2]):
            return StabilizedDims(_nonzero(hist[w]), w, hist)
        w += 1
    raise StabilizationError(f"dimensions did not stabilize up to window {max_window}")


def cech_cohomology(F: SheafComplex, cover: Cover = P1_STANDARD, window: int | None = None,
                    max_window: int | None = None) -> StabilizedDims:
    N = window if window is not None else default_window()
    return stabilized(lambda k: cech_model(WindowedSheaf(F, cover, k), cover).dims(), N, max_window)


def line_bundle_oracle(d: int) -> dict:
    """Monomial count: ``H^0 = max(d+1, 0)``, ``H^1 = max(-d-1, 0)``."""
    return {0: max(d + 1, 0), 1: max(-d - 1, 0)}


def global_sections(W: WindowedSheaf, n: int = 0):
    """Kernel of the Cech difference on ``n``-th degree sections (2-chart cover)."""
    from .exactlin import kernel_basis
    r0 = W.restriction((0,), (0, 1))[n]
    r1 = W.restriction((1,), (0, 1))[n]
    M = RatMatrix([list(a) + [-x for x in b] for a, b in zip(r0.rows, r1.rows)], r0.ncols + r1.ncols)
    return kernel_basis(M)


# -- P^*(E) on a chart: anchor and Atiyah sequence -------------------------------------


def build_P(R: Resolution) -> CoconeSheaf:
    """``P^*(E)`` is the quotient of the cocone sheaf by its ``E`` components."""
    return CoconeSheaf(R)


def atiyah_check(R: Resolution, chart: str, N: int) -> dict:
    """On chart sections: ``dim P^0 = dim Hom^0 + dim Theta`` and the anchor is onto Theta."""
    C = CoconeSheaf(R)
    comps = C.comps.get(0, [])
    basis = C.basis(chart, 0, N)
    kinds = [comps[i].kind for i, _ in basis]
    p0 = sum(1 for k in kinds if k in "XH")
    hom = sum(1 for k in kinds if k == "H")
    theta = len(tangent_sheaf().basis(chart, 0, N))
    return {"P0": p0, "Hom0": hom, "Theta": theta, "exact": p0 == hom + theta, "anchor_onto": p0 - hom == theta}


def transition_cocycle_check(F: SheafComplex, N: int) -> bool:
    """``d`` commutes with the ``U1 -> U01`` transition on all window monomials."""
    W = WindowedSheaf(F, P1_STANDARD, N)
    r1 = W.restriction((1,), (0, 1))
    c1, c01 = W.chart_complex((1,)), W.chart_complex((0, 1))
    for n in F.degrees:
        if n + 1 not in F.comps:
            continue
        if r1[n + 1] @ c1.diff(n) != c01.diff(n) @ r1[n]:
            return False
    return True


# -- divisors: O_Z, N_{Z|X}, gamma, T^1_Z ----------------------------------------------


class FiniteAlgebra:
    """``K[x]/(f)`` with basis ``1, x, ..., x^{deg f - 1}``."""

    def __init__(self, f: dict):
        if not f:
            raise ValueError("zero local equation")
        self.f = f
        self.dim = pdeg(f)

    def reduce(self, p: dict) -> tuple:
        if self.dim == 0:
            return ()
        r = poly_mod(p, self.f)
        return tuple(Fraction(r.get(e, 0)) for e in range(self.dim))

    def inverse_of_x(self) -> dict:
        g, x, _ = poly_ext_gcd({1: Fraction(1)}, self.f)
        if pdeg(g) != 0:
            raise ValueError("x is not a unit")
        return x

    def reduce_laurent(self, p: dict) -> tuple:
        if self.dim == 0:
            return ()
        neg = [e for e in p if e < 0]
        if not neg:
            return self.reduce(p)
        inv = self.inverse_of_x()
        k = -min(neg)
        shifted = {e + k: c for e, c in p.items()}
        invk = {0: Fraction(1)}
        for _ in range(k):
            invk = poly_mod(pmul(invk, inv), self.f)
        return self.reduce(pmul(shifted, invk))


class DivisorData:
    """``Z = {sigma = 0}`` for a section ``sigma`` of ``O(d)`` on P^1, or ``{f = 0}`` on A^1.

    ``N_{Z|X} = Hom(I_Z, O_Z)`` is identified with ``O_Z`` through the local
    generator, and ``gamma(p d/dx)`` with ``p f' mod f``.  On the torus the
    generator is ``f0``; the ``U1`` generator ``f1 = t^(-d) f0`` gives the
    restriction ``n1(s) -> t^d n1(1/t)``.
    """

    def __init__(self, sigma, d: int | None = None, space: str = "P1"):
        self.space = space
        self.f0 = parse_poly(sigma)
        if not self.f0:
            raise ValueError("the zero section does not cut out a divisor")
        if space == "P1":
            if d is None or pdeg(self.f0) > d:
                raise ValueError("sigma must be a global section of O(d)")
            self.d = d
            self.f1 = {d - e: c for e, c in self.f0.items()}
            g, _ = strip_t(self.f0)
            self.O = {"t": FiniteAlgebra(self.f0), "s": FiniteAlgebra(self.f1), "L": FiniteAlgebra(g)}
        else:
            self.d = pdeg(self.f0)
            self.f1 = None
            self.O = {"t": FiniteAlgebra(self.f0)}

    def local_equation(self, chart: str) -> dict:
        return self.f1 if chart == "s" else self.f0

    def gamma_column(self, chart: str, e: int) -> tuple:
        """``gamma(x^e d/dx)`` in the basis of ``O_Z`` on the chart."""
        f = self.local_equation(chart)
        img = pmul({e: Fraction(1)}, pderiv(f))
        return self.O[chart].reduce_laurent(img) if chart == "L" else self.O[chart].reduce(img)

    def restrict_N(self, chart: str) -> RatMatrix:
        """Restriction of ``N`` sections from a chart to the torus."""
        tgt = self.O["L"]
        src = self.O[chart]
        cols = []
        for e in range(src.dim):
            if chart == "t":
                cols.append(tgt.reduce({e: Fraction(1)}))
            else:
                cols.append(tgt.reduce_laurent({self.d - e: Fraction(1)}))
        return RatMatrix.from_columns(cols, tgt.dim) if cols else RatMatrix.zeros(tgt.dim, 0)

    def gamma_matrix(self, chart: str, N: int) -> tuple[RatMatrix, list]:
        basis = tangent_sheaf().basis(chart, 0, N)
        cols = [self.gamma_column(chart, e) for _, e in basis]
        return RatMatrix.from_columns(cols, self.O[chart].dim), basis

    def T1_dim(self, chart: str, N: int = 8) -> int:
        """``dim coker gamma`` on the chart (sections of ``T^1_Z``)."""
        M, _ = self.gamma_matrix(chart, N)
        return self.O[chart].dim - M.rank()

    def log_tangent(self, chart: str, N: int = 8) -> list:
        """``Theta(-log Z) = ker gamma`` inside the window sections."""
        from .exactlin import kernel_basis
        M, basis = self.gamma_matrix(chart, N)
        return kernel_basis(M)


class GammaWindowed:
    """The two-term complex ``Theta --gamma--> N_{Z|X}`` with windowed Theta sections.

    Theta's Cech differential preserves weight, so its window is a direct
    summand and the truncation is a quasi-isomorphism for large windows.
    """

    def __init__(self, Z: DivisorData, cover: Cover, N: int):
        if cover.charts[:2] != ("t", "s"):
            raise ValueError("gamma complex needs the standard P^1 charts")
        self.Z, self.cover, self.N = Z, cover, N
        self.theta = WindowedSheaf(tangent_sheaf(), cover, N)

    def basis(self, opens, n):
        if n == 0:
            return self.theta.basis(opens, 0)
        return [(1, e) for e in range(self.Z.O[self.cover.kind(opens)].dim)]

    def comp_key(self, n, idx):
        return ("X",) if n == 0 else ("N",)

    def algebra(self, opens):
        chart = self.cover.kind(opens)
        M, _ = self.Z.gamma_matrix(chart, self.N)
        dims = {0: M.ncols, 1: M.nrows}
        return StructureConstantDGLA(GradedComplex(dims, {0: M} if M.nrows else {}), None)

    def restriction(self, src, dst):
        out = {0: self.theta.restriction(src, dst)[0]}
        a, b = self.cover.kind(src), self.cover.kind(dst)
        if a == b:
            n = self.Z.O[a].dim
            out[1] = RatMatrix.identity(n)
        else:
            out[1] = self.Z.restrict_N(a)
        return out


def eval_complex(d: int, sigma) -> CoconeSheaf:
    """``P(X, L) --e_sigma--> L`` for ``L = O(d)``."""
    return CoconeSheaf(line_bundle_resolution(d, sigma))


def gamma_complex(Z: DivisorData, N: int, cover: Cover = P1_STANDARD) -> GammaWindowed:
    return GammaWindowed(Z, cover, N)


# -- affine plane: Tjurina numbers ------------------------------------------------------


def tjurina_number(f: str, vars=("x", "y"), start: int = 4, max_degree: int = 24) -> StabilizedDims:
    """``dim K[x,y]/(f, f_x, f_y)`` (sections of ``T^1_Z`` for a plane curve germ set).

    Computed as the codimension of the truncated ideal in polynomials of degree
    at most ``n``, certified by stabilization in ``n``.
    """
    xs = sympy.symbols(vars)
    F = sympy.Poly(sympy.sympify(f.replace("^", "**"), locals=dict(zip(vars, xs))), *xs)
    gens = [F, F.diff(xs[0]), F.diff(xs[1])]

    def codim(n):
        monos = [(i, n_ - i) for n_ in range(n + 1) for i in range(n_, -1, -1)]
        pos = {m: k for k, m in enumerate(monos)}
        rows = []
        for g in gens:
            if g.is_zero:
                continue
            dg = g.total_degree()
            for (a, b) in monos:
                if a + b + dg > n:
                    continue
                row = [Fraction(0)] * len(monos)
                for (e1, e2), c in g.terms():
                    c = sympy.Rational(c)
                    row[pos[(e1 + a, e2 + b)]] += Fraction(int(c.p), int(c.q))
                rows.append(row)
        r = RatMatrix(rows, len(monos)).rank() if rows else 0
        return {0: len(monos) - r}

    return stabilized(codim, start, max_degree)
