"""Triples ``(X, F, sigma)``: the invariants ``T^i``, long exact sequences,
forgetful smoothness, descent tangent check and bracket-extension feasibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy

from .artin import dual_numbers
from .cosimp import DescentLevels, descent_check, first_order_descent
from .exactlin import (
    GradedComplex,
    RatMatrix,
    cohomology,
    cohomology_dims,
    left_null_combination,
    rref,
    solve,
)
from .geom import (
    P1_STANDARD,
    CechModel,
    CoconeSheaf,
    Cover,
    DivisorData,
    Resolution,
    WindowedSheaf,
    cech_model,
    default_window,
    gamma_complex,
    line_bundle_oracle,
    padd,
    parse_poly,
    pderiv,
    pdeg,
    pmul,
    stabilized,
)

TI_RANGE = range(-1, 4)

# component kinds of the cocone sheaf: vector fields, Hom entries, E entries
PIECES = {
    "triple": "XHE",
    "pair": "XH",
    "F": "E",
    "K": "HE",
    "Hom": "H",
    "Theta": "X",
}


def subquotient(total: GradedComplex, labels: dict, kinds: str) -> tuple[GradedComplex, dict]:
    """Restrict a labelled total complex to the components of the given kinds.

    Valid whenever the kinds form a sub-quotient (a subcomplex of a quotient).
    Returns the complex and the kept indices per degree.
    """
    idx = {n: [i for i, lab in enumerate(lst) if lab[3][0] in kinds] for n, lst in labels.items()}
    dims = {n: len(v) for n, v in idx.items()}
    ds = {}
    for n, cols in idx.items():
        rows = idx.get(n + 1)
        if not rows or not cols:
            continue
        D = total.diff(n)
        ds[n] = RatMatrix([[D.rows[r][c] for c in cols] for r in rows], len(cols))
    return GradedComplex(dims, ds), idx


# -- long exact sequences ---------------------------------------------------------------


@dataclass
class LESNode:
    name: str
    degree: int
    dim: int
    rank_in: int
    rank_out: int

    @property
    def exact(self) -> bool:
        return self.rank_in == self.dim - self.rank_out


@dataclass
class LESReport:
    names: tuple
    nodes: list
    euler_ok: bool

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)

    def failures(self) -> list[str]:
        return [f"{n.name}^{n.degree}" for n in self.nodes if not n.exact]

    def map_ranks(self) -> list:
        return [(n.name, n.degree, n.rank_out) for n in self.nodes]

    def table(self) -> list[dict]:
        return [{"node": f"{n.name}^{n.degree}", "dim": n.dim, "rank_in": n.rank_in,
                 "rank_out": n.rank_out, "exact": n.exact} for n in self.nodes]


def _matrix_rank(cols: list, nrows: int) -> int:
    if not cols or nrows == 0:
        return 0
    return RatMatrix.from_columns(cols, nrows).rank()


def long_exact_sequence(B: GradedComplex, sub: dict, names=("A", "B", "C")) -> LESReport:
    """Cohomology sequence of ``0 -> A -> B -> B/A -> 0`` for a coordinate subcomplex ``A``.

    ``sub[n]`` lists the coordinates of ``B^n`` spanning ``A^n``.  The induced
    maps, including the connecting map, are computed on representatives and
    exactness is checked at every node by ranks.
    """
    degs = B.degrees
    lo, hi = (degs[0], degs[-1]) if degs else (0, 0)
    A_idx = {n: list(sub.get(n, [])) for n in range(lo, hi + 2)}
    Q_idx = {n: [i for i in range(B.dim(n)) if i not in set(A_idx[n])] for n in range(lo, hi + 2)}

    def restrict(idx):
        dims = {n: len(v) for n, v in idx.items()}
        ds = {}
        for n in range(lo, hi + 1):
            r, c = idx.get(n + 1, []), idx[n]
            if r and c:
                D = B.diff(n)
                ds[n] = RatMatrix([[D.rows[i][j] for j in c] for i in r], len(c))
        return GradedComplex(dims, ds)

    for n in range(lo, hi + 1):
        D = B.diff(n)
        qs = Q_idx.get(n + 1, [])
        for j in A_idx[n]:
            if any(D.rows[i][j] for i in qs):
                raise ValueError(f"coordinates do not span a subcomplex in degree {n}")
    A, Q = restrict(A_idx), restrict(Q_idx)
    HA, HB, HQ = cohomology(A), cohomology(B), cohomology(Q)

    def embed(n, idx, v):
        out = [Fraction(0)] * B.dim(n)
        for i, x in zip(idx[n], v):
            out[i] = x
        return out

    maps = {}
    for n in range(lo - 1, hi + 1):
        maps[("i", n)] = _matrix_rank([HB.project(n, embed(n, A_idx, z)) for z in HA.representatives(n)], HB.dim(n))
        maps[("p", n)] = _matrix_rank([HQ.project(n, [z[i] for i in Q_idx[n]]) for z in HB.representatives(n)], HQ.dim(n))
        cols = []
        for z in HQ.representatives(n):
            w = B.apply(n, embed(n, Q_idx, z))
            if any(w[i] for i in Q_idx.get(n + 1, [])):
                raise ArithmeticError("connecting map: lift is not a cycle modulo the subcomplex")
            cols.append(HA.project(n + 1, [w[i] for i in A_idx.get(n + 1, [])]))
        maps[("c", n)] = _matrix_rank(cols, HA.dim(n + 1))
    nodes = []
    for n in range(lo - 1, hi + 2):
        nodes.append(LESNode(names[0], n, HA.dim(n), maps.get(("c", n - 1), 0), maps.get(("i", n), 0)))
        nodes.append(LESNode(names[1], n, HB.dim(n), maps.get(("i", n), 0), maps.get(("p", n), 0)))
        nodes.append(LESNode(names[2], n, HQ.dim(n), maps.get(("p", n), 0), maps.get(("c", n), 0)))
    euler = HA.euler_characteristic() - HB.euler_characteristic() + HQ.euler_characteristic() == 0
    return LESReport(tuple(names), nodes, euler)


# -- T^i of a triple ----------------------------------------------------------------------


def triple_model(R: Resolution, N: int, cover: Cover = P1_STANDARD) -> CechModel:
    """Cech model of the cocone ``C^*(X, E, s)`` on the cover in the window ``N``."""
    return cech_model(WindowedSheaf(CoconeSheaf(R), cover, N), cover)


def piece_dims(model: CechModel) -> dict:
    out = {}
    for name, kinds in PIECES.items():
        C, _ = subquotient(model.total, model.labels, kinds)
        out[name] = cohomology_dims(C)
    return out


def _pad(d: dict, shift: int = 0) -> dict:
    return {i: d.get(i + shift, 0) for i in TI_RANGE}


@dataclass
class TIReport:
    window: int
    T_triple: dict
    T_pair: dict
    H_F: dict
    H_K: dict
    H_Hom: dict
    H_Theta: dict
    les_forget: LESReport | None = None
    les_top: LESReport | None = None
    les_bottom: LESReport | None = None
    stabilization: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "window": self.window,
            "T_triple": self.T_triple,
            "T_pair": self.T_pair,
            "H_F": self.H_F,
            "H_K": self.H_K,
            "Ext_FF": self.H_Hom,
            "H_Theta": self.H_Theta,
        }
        for key in ("les_forget", "les_top", "les_bottom"):
            rep = getattr(self, key)
            if rep is not None:
                out[key] = {"exact": rep.exact, "euler": rep.euler_ok, "nodes": rep.table()}
        return out


def compute_TI(R: Resolution, window: int | None = None, cover: Cover = P1_STANDARD,
               les: bool = True, max_window: int | None = None) -> TIReport:
    """``T^i`` of the triple, ``T^i`` of the pair and companion groups, stabilized in the window.

    ``H_F`` is read off the ``E[-1]`` part, so ``H_F[i] = H^i(X, F)`` for a resolution.
    """
    N = window if window is not None else default_window(d=max((abs(a) for v in R.twists.values() for a in v), default=0))
    cache = {}

    def dims_at(k):
        cache[k] = triple_model(R, k, cover)
        pd = piece_dims(cache[k])
        return {(name, n): v for name, d in pd.items() for n, v in d.items()}

    st = stabilized(dims_at, N, max_window)
    model = cache[st.window]
    pd = piece_dims(model)
    rep = TIReport(st.window, _pad(pd["triple"]), _pad(pd["pair"]), _pad(pd["F"], 1), _pad(pd["K"]),
                   _pad(pd["Hom"]), _pad(pd["Theta"]),
                   stabilization={"window": st.window,
                                  "history": {k: {f"{name}:{n}": v for (name, n), v in h.items() if v}
                                              for k, h in st.history.items()}})
    if les:
        rep.les_forget, rep.les_top, rep.les_bottom = les_reports(model)
    return rep


def les_reports(model: CechModel):
    """The three sequences: ``E[-1] -> C -> P``, ``K -> C -> Theta`` and ``Hom -> P -> Theta``."""
    C = model.total
    labels = model.labels
    sub_E = {n: [i for i, lab in enumerate(lst) if lab[3][0] == "E"] for n, lst in labels.items()}
    forget = long_exact_sequence(C, sub_E, ("H(F)[-1]", "T_triple", "T_pair"))
    sub_K = {n: [i for i, lab in enumerate(lst) if lab[3][0] in "HE"] for n, lst in labels.items()}
    top = long_exact_sequence(C, sub_K, ("H(K)", "T_triple", "H(Theta)"))
    P, idx = subquotient(C, labels, "XH")
    sub_H = {n: [k for k, i in enumerate(lst) if labels[n][i][3][0] == "H"] for n, lst in idx.items()}
    bottom = long_exact_sequence(P, sub_H, ("Ext(F,F)", "T_pair", "H(Theta)"))
    return forget, top, bottom


def split_check(rep: TIReport) -> dict:
    """For ``sigma = 0`` the sequence ``E[-1] -> C -> P`` splits: connecting maps vanish."""
    nodes = rep.les_forget.nodes
    conn = [n.rank_out for n in nodes if n.name == "T_pair"]
    dims_ok = all(rep.T_triple[i] == rep.T_pair[i] + rep.H_F.get(i - 1, 0) for i in TI_RANGE if i - 1 in rep.H_F)
    return {"connecting_zero": all(r == 0 for r in conn), "dims_add": dims_ok}


# -- forgetful map ------------------------------------------------------------------------


def forgetful_analysis(rep: TIReport) -> dict:
    """Smoothness of ``Def(X, F, sigma) -> Def(X, F)`` when ``H^1(X, F) = 0``.

    Ranks of ``T^i_triple -> T^i_pair`` come from the verified exact sequence;
    the report states surjectivity on ``T^1`` and injectivity on ``T^2``.
    """
    les = rep.les_forget
    rank = {n.degree: n.rank_out for n in les.nodes if n.name == "T_triple"}
    h1 = rep.H_F.get(1, 0)
    t1_pair, t2 = rep.T_pair.get(1, 0), rep.T_triple.get(2, 0)
    surj = rank.get(1, 0) == t1_pair
    inj = rank.get(2, 0) == t2
    out = {
        "H1_F": h1,
        "tangent_rank": rank.get(1, 0),
        "T1_pair": t1_pair,
        "obstruction_rank": rank.get(2, 0),
        "T2_triple": t2,
        "tangent_surjective": surj,
        "obstruction_injective": inj,
        "sequence_exact": les.exact,
    }
    if h1 == 0:
        out["verdict"] = "smooth" if (surj and inj and les.exact) else "certificate failed"
    else:
        out["verdict"] = "criterion not applicable"
    return out


# -- descent tangent check ----------------------------------------------------------------


def descent_tangent_check(R: Resolution, window: int, cover: Cover = P1_STANDARD, verify_reps: bool = True) -> dict:
    """``dim T^1`` against the count of first-order descent classes on the cover."""
    model = triple_model(R, window, cover)
    t1 = cohomology_dims(model.total).get(1, 0)
    S = model.scdgla
    fo = first_order_descent(S)
    verified = None
    if verify_reps:
        D = DescentLevels(S, dual_numbers())
        T0, T1 = D.T[0], D.T[1]
        ok = True
        for l, m in fo["representatives"]:
            v = descent_check(D, T0.pure(1, l, 0), T1.pure(0, m, 0))
            ok = ok and v.ok
        verified = ok
    return {"T1": t1, "descent_classes": fo["count"], "objects_dim": fo["objects_dim"],
            "equivalences_dim": fo["equivalences_dim"], "representatives_verified": verified,
            "match": t1 == fo["count"]}


# -- oracles for line bundles -------------------------------------------------------------


def log_tangent_oracle(d: int) -> dict:
    """For reduced ``Z`` the triple complex is quasi-isomorphic to ``Theta(-log Z) = O(2 - d)``."""
    o = line_bundle_oracle(2 - d)
    return {i: o.get(i, 0) for i in TI_RANGE}


def gamma_dims(d: int, sigma, window: int) -> dict:
    """Hypercohomology of ``Theta --gamma--> N_{Z|X}`` (independent Cech assembly)."""
    Z = DivisorData(sigma, d)
    st = stabilized(lambda k: cech_model(gamma_complex(Z, k), P1_STANDARD).dims(), window)
    return {i: st.dims.get(i, 0) for i in TI_RANGE}


# -- resolution independence --------------------------------------------------------------


def _minors_gcd(mat, var):
    """gcd of maximal minors of a polynomial matrix (list of rows of dicts)."""
    x = sympy.Symbol(var)
    M = sympy.Matrix([[sum(sympy.Rational(c.numerator, c.denominator) * x ** e for e, c in g.items()) for g in row]
                      for row in mat])
    r, c = M.shape
    g = sympy.Integer(0)
    for rows in combinations(range(r), c):
        g = sympy.gcd(g, M.extract(list(rows), list(range(c))).det())
    return sympy.Poly(g, x)


def comparison_check(R1: Resolution, R2: Resolution, phi: dict) -> list[str]:
    """Checks that ``phi : E1 -> E2`` is a chain map, fibrewise injective (locally free
    cokernel) on both charts, global, and sends ``s1`` to ``s2``."""
    bad = []
    phi = {int(k): [[parse_poly(g) for g in row] for row in m] for k, m in phi.items()}
    for k, m in phi.items():
        src, tgt = R1.twists.get(k, []), R2.twists.get(k, [])
        if len(m) != len(tgt) or any(len(r) != len(src) for r in m):
            bad.append(f"phi_{k} has the wrong shape")
            continue
        for i, row in enumerate(m):
            for j, g in enumerate(row):
                if g and (min(g) < 0 or pdeg(g) > tgt[i] - src[j]):
                    bad.append(f"phi_{k}[{i}][{j}] is not global")
        for chart in ("t", "s"):
            mm = m if chart == "t" else [[{tgt[i] - src[j] - e: c for e, c in g.items()} for j, g in enumerate(row)]
                                         for i, row in enumerate(m)]
            if src and _minors_gcd(mm, "x").degree() != 0:
                bad.append(f"phi_{k} is not fibrewise injective on chart {chart}")
    comp = Resolution._compose
    for k in set(R1.twists) | set(R2.twists):
        if k + 1 not in R1.twists and k + 1 not in R2.twists:
            continue
        p_k, p_k1 = phi.get(k), phi.get(k + 1)
        d1, d2 = R1.d.get(k), R2.d.get(k)
        lhs = comp(d2, p_k) if d2 and p_k else None
        rhs = comp(p_k1, d1) if p_k1 and d1 else None
        z = lambda M: M is None or not any(g for row in M for g in row)
        if lhs is None or rhs is None:
            if not (z(lhs) and z(rhs)):
                bad.append(f"phi is not a chain map in degree {k}")
        elif lhs != rhs:
            bad.append(f"phi is not a chain map in degree {k}")
    p0 = phi.get(0)
    if p0 is not None:
        img = [padd(*[pmul(p0[i][j], R1.s[j]) for j in range(len(R1.s))]) for i in range(len(p0))]
        if img != R2.s:
            bad.append("phi(s) differs from the second section")
    return bad


def resolution_independence_check(R1: Resolution, R2: Resolution, phi: dict | None, window: int | None = None) -> dict:
    bad = comparison_check(R1, R2, phi) if phi is not None else []
    if bad:
        return {"ok": False, "errors": bad}
    a = compute_TI(R1, window, les=False)
    b = compute_TI(R2, window, les=False)
    return {"ok": a.T_triple == b.T_triple and a.T_pair == b.T_pair, "T1": a.T_triple, "T2": b.T_triple}


def add_acyclic_pair(R: Resolution, a: int = 0) -> tuple[Resolution, dict]:
    """``E (+) (O(a) --id--> O(a))`` in degrees -1, 0 with the inclusion as comparison."""
    tw = {k: list(v) for k, v in R.twists.items()}
    tw.setdefault(-1, [])
    tw[-1] = tw[-1] + [a]
    tw[0] = tw[0] + [a]
    d = {}
    for k in set(R.d) | {-1}:
        src, tgt = tw.get(k, []), tw.get(k + 1, [])
        old = R.d.get(k, [[{} for _ in R.twists.get(k, [])] for _ in R.twists.get(k + 1, [])])
        rows = []
        for i in range(len(tgt)):
            row = []
            for j in range(len(src)):
                if i < len(old) and j < len(old[i]):
                    row.append(old[i][j])
                elif k == -1 and i == len(tgt) - 1 and j == len(src) - 1:
                    row.append({0: Fraction(1)})
                else:
                    row.append({})
            rows.append(row)
        d[k] = rows
    R2 = Resolution(tw, d, list(R.s) + [{}])
    phi = {}
    for k, v in R.twists.items():
        phi[k] = [[{0: Fraction(1)} if i == j else {} for j in range(len(v))] for i in range(len(tw[k]))]
    return R2, phi


# -- bracket-extension feasibility --------------------------------------------------------


class Poly2:
    """Polynomials of degree <= 2 in the unknowns: ``{(): c, (i,): c, (i, j): c}``."""

    @staticmethod
    def add(*ps):
        out = {}
        for p in ps:
            for k, v in p.items():
                out[k] = out.get(k, 0) + v
        return {k: v for k, v in out.items() if v}

    @staticmethod
    def scale(c, p):
        return {k: c * v for k, v in p.items() if c * v}

    @staticmethod
    def mul(p, q):
        out = {}
        for a, x in p.items():
            for b, y in q.items():
                k = tuple(sorted(a + b))
                out[k] = out.get(k, 0) + x * y
        return {k: v for k, v in out.items() if v}


@dataclass
class FeasibilityProblem:
    """Extend a fixed bracket on ``V0`` to ``V0 x V1 -> V1`` on a two-term complex ``d : V0 -> V1``.

    ``bracket0(i, j)`` and ``d0(i)`` return coordinate dicts, or ``None`` when
    the value leaves the truncation box; ``jacobi_ok(i, j, k)`` may veto
    Jacobi rows whose intermediate values could leave the box.
    """

    V0: list
    V1: list
    bracket0: object
    d0: object
    jacobi_ok: object = None

    def unknown(self, x: int, v: int, w: int) -> int:
        """Index of the coefficient of ``V1[w]`` in ``[V0[x], V1[v]]``."""
        n1 = len(self.V1)
        return (x * n1 + v) * n1 + w

    @property
    def n_unknowns(self):
        return len(self.V0) * len(self.V1) ** 2

    def B(self, x: int, vec: dict) -> dict:
        """``[V0[x], sum_v vec[v] V1[v]]`` as ``{w: Poly2}``."""
        out = {}
        for v, c in vec.items():
            for w in range(len(self.V1)):
                term = Poly2.mul(c if isinstance(c, dict) else {(): Fraction(c)}, {(self.unknown(x, v, w),): Fraction(1)})
                out[w] = Poly2.add(out.get(w, {}), term)
        return {w: p for w, p in out.items() if p}

    def rows(self) -> list:
        """All constraint rows as ``(label, Poly2)`` (each must vanish)."""
        out = []
        n0, n1 = len(self.V0), len(self.V1)
        for i in range(n0):
            for j in range(n0):
                br = self.bracket0(i, j)
                dx, dy = self.d0(i), self.d0(j)
                if br is None or dx is None or dy is None:
                    continue
                dbr = {}
                for k, c in br.items():
                    dk = self.d0(k)
                    if dk is None:
                        dbr = None
                        break
                    for w, x in dk.items():
                        dbr[w] = dbr.get(w, 0) + c * x
                if dbr is None:
                    continue
                # d[x, y] = [dx, y] + [x, dy] = -[y, dx] + [x, dy]
                lhs = {w: {(): Fraction(c)} for w, c in dbr.items() if c}
                rhs = {}
                for w, p in self.B(j, dx).items():
                    rhs[w] = Poly2.add(rhs.get(w, {}), Poly2.scale(-1, p))
                for w, p in self.B(i, dy).items():
                    rhs[w] = Poly2.add(rhs.get(w, {}), p)
                for w in range(n1):
                    row = Poly2.add(lhs.get(w, {}), Poly2.scale(-1, rhs.get(w, {})))
                    if row:
                        out.append((("leibniz", i, j, w), row))
        for i in range(n0):
            for j in range(i + 1, n0):
                br = self.bracket0(i, j)
                if br is None:
                    continue
                for v in range(n1):
                    if self.jacobi_ok is not None and not self.jacobi_ok(i, j, v):
                        continue
                    # [x,[y,v]] - [y,[x,v]] - [[x,y],v] = 0
                    inner_y = self.B(j, {v: Fraction(1)})
                    inner_x = self.B(i, {v: Fraction(1)})
                    t1 = self.B(i, inner_y)
                    t2 = self.B(j, inner_x)
                    t3 = {}
                    for k, c in br.items():
                        for w, p in self.B(k, {v: Fraction(c)}).items():
                            t3[w] = Poly2.add(t3.get(w, {}), p)
                    for w in range(n1):
                        row = Poly2.add(t1.get(w, {}), Poly2.scale(-1, t2.get(w, {})), Poly2.scale(-1, t3.get(w, {})))
                        if row:
                            out.append((("jacobi", i, j, v, w), row))
        return out


def _evaluate(p: dict, values: dict):
    """Substitute known values; returns a Poly2 in the remaining unknowns."""
    out = {}
    for k, c in p.items():
        coef = c
        rest = []
        for u in k:
            if u in values:
                coef *= values[u]
            else:
                rest.append(u)
        if coef:
            key = tuple(rest)
            out[key] = out.get(key, 0) + coef
    return {k: v for k, v in out.items() if v}


def _linear_rows(rows, forced: dict) -> list:
    """Rows that are of degree <= 1 after substituting the forced values."""
    out = []
    for lab, p in rows:
        q = _evaluate(p, forced)
        if all(len(k) <= 1 for k in q):
            out.append((lab, q))
    return out


def _linear_system(rows, n):
    """Rows of degree <= 1 as ``(M, b)`` with ``M u = b``."""
    M, b = [], []
    for _, p in rows:
        r = [Fraction(0)] * n
        for k, c in p.items():
            if len(k) == 1:
                r[k[0]] += c
        M.append(r)
        b.append(-p.get((), Fraction(0)))
    return RatMatrix(M, n), b


def _forced(M: RatMatrix, b: list) -> dict:
    """Unknowns whose value is determined by ``M u = b``."""
    aug = [list(r) + [x] for r, x in zip(M.rows, b)]
    R, piv = rref(aug, M.ncols + 1)
    out = {}
    for i, c in enumerate(piv):
        if c == M.ncols:
            break
        if all(R[i][j] == 0 for j in range(M.ncols) if j != c):
            out[c] = R[i][M.ncols]
    return out


@dataclass
class FeasibilityCertificate:
    verdict: str
    combination: list = field(default_factory=list)
    contradiction: Fraction | None = None
    forced: dict = field(default_factory=dict)
    witness: dict | None = None
    rows_used: int = 0
    derived: list = field(default_factory=list)
    derived_values: dict = field(default_factory=dict)
    reduced_row: tuple | None = None

    def to_json(self, problem: FeasibilityProblem | None = None) -> dict:
        out = {"verdict": self.verdict, "rows": self.rows_used}
        if self.verdict == "INFEASIBLE":
            out["contradiction"] = str(self.contradiction)
            out["combination"] = [{"row": describe_row(problem, lab) if problem else list(map(str, lab)),
                                   "multiplier": str(c)} for lab, c in self.combination]
            out["derived"] = list(self.derived)
            if self.reduced_row is not None and problem is not None:
                out["contradiction_row"] = describe_reduction(problem, *self.reduced_row)
        if self.witness is not None:
            out["witness"] = {str(k): str(v) for k, v in sorted(self.witness.items()) if v}
        return out


def describe_row(P: FeasibilityProblem, lab: tuple) -> str:
    if lab[0] == "leibniz":
        _, i, j, w = lab
        return f"leibniz({P.V0[i]}, {P.V0[j]}) on {P.V1[w]}"
    _, i, j, v, w = lab
    return f"jacobi({P.V0[i]}, {P.V0[j]}, {P.V1[v]}) on {P.V1[w]}"


def describe_reduction(P: FeasibilityProblem, lab: tuple, residual: dict) -> str:
    terms = [f"{c}" if not k else f"{c}*u{k[0]}" for k, c in sorted(residual.items())]
    lhs = " + ".join(terms) if terms else "0"
    return f"{describe_row(P, lab)} reduces to {lhs} = 0"


def reduce_rows(P: FeasibilityProblem) -> tuple[dict, tuple | None]:
    """Absorb rows in order into a consistent linear system.

    Returns the values it forces and the first row contradicting them, as
    ``(label, residual)`` with the residual evaluated at those values.
    """
    n = P.n_unknowns
    kept: list = []
    values: dict = {}
    pending = P.rows()
    progress = True
    while progress and pending:
        progress = False
        rest = []
        for lab, p in pending:
            q = _evaluate(p, values)
            if any(len(k) > 1 for k in q):
                rest.append((lab, p))
                continue
            M, b = _linear_system(kept + [(lab, q)], n)
            if left_null_combination(M, b) is not None:
                return values, (lab, q)
            kept.append((lab, q))
            M, b = _linear_system(kept, n)
            values.update(_forced(M, b))
            progress = True
        pending = rest
    return values, None


def describe_forced(P: FeasibilityProblem, forced: dict) -> list[str]:
    out = []
    n1 = len(P.V1)
    for u in sorted(forced):
        x, rem = divmod(u, n1 * n1)
        v, w = divmod(rem, n1)
        out.append(f"[{P.V0[x]},{P.V1[v]}] has {forced[u]} on {P.V1[w]}")
    return out


def bracket_extension_feasibility(P: FeasibilityProblem, candidate: dict | None = None,
                                  max_rounds: int = 20) -> FeasibilityCertificate:
    """Linear feasibility of Leibniz and single-slot Jacobi constraints.

    Quadratic Jacobi terms are linearized by substituting values already forced
    by the linear rows, repeated until nothing new is forced.
    """
    n = P.n_unknowns
    allrows = P.rows()
    if n == 0:
        bad = [lab for lab, p in allrows if p]
        if bad:
            return FeasibilityCertificate("INFEASIBLE", [(bad[0], Fraction(1))], allrows[0][1].get((), Fraction(0)))
        return FeasibilityCertificate("FEASIBLE", witness={}, rows_used=len(allrows))
    forced: dict = {}
    for _ in range(max_rounds):
        lin = _linear_rows(allrows, forced)
        M, b = _linear_system(lin, n)
        y = left_null_combination(M, b) if lin else None
        if y is not None:
            comb = [(lab, c) for (lab, _), c in zip(lin, y) if c]
            values, red = reduce_rows(P)
            derived = describe_forced(P, values)
            if red is not None:
                derived.append(describe_reduction(P, *red))
            return FeasibilityCertificate("INFEASIBLE", comb, Fraction(1), dict(forced), rows_used=len(lin),
                                          derived=derived, derived_values=values, reduced_row=red)
        new = _forced(M, b)
        if not new:
            break
        forced.update(new)
    if candidate is not None and verify_witness(allrows, candidate):
        return FeasibilityCertificate("FEASIBLE", forced=forced, witness=dict(candidate), rows_used=len(allrows))
    M, b = _linear_system(_linear_rows(allrows, forced), n)
    sol = solve(M, b)
    if sol is not None:
        wit = {i: x for i, x in enumerate(sol) if x}
        wit.update({k: v for k, v in forced.items() if v})
        if verify_witness(allrows, wit):
            return FeasibilityCertificate("FEASIBLE", forced=forced, witness=wit, rows_used=len(allrows))
    return FeasibilityCertificate("UNDECIDED", forced=forced, rows_used=len(allrows))


def verify_witness(rows, values: dict) -> bool:
    full = {i: Fraction(v) for i, v in values.items()}
    for _, p in rows:
        total = Fraction(0)
        for k, c in p.items():
            t = c
            for u in k:
                t *= full.get(u, Fraction(0))
            total += t
        if total:
            return False
    return True


def verify_certificate(P: FeasibilityProblem, cert: FeasibilityCertificate) -> bool:
    """Independent re-check: rebuild the rows, substitute, and recombine."""
    rows = dict(P.rows())
    if cert.verdict == "FEASIBLE":
        return verify_witness(list(rows.items()), cert.witness or {})
    if cert.verdict != "INFEASIBLE":
        return False
    # forced values must follow from the linear rows they came from
    if cert.forced:
        prev: dict = {}
        for _ in range(20):
            M, b = _linear_system(_linear_rows(list(rows.items()), prev), P.n_unknowns)
            nxt = _forced(M, b)
            if not nxt:
                break
            prev.update(nxt)
        if any(prev.get(k) != v for k, v in cert.forced.items()):
            return False
    if cert.reduced_row is not None:
        values, red = reduce_rows(P)
        if values != cert.derived_values or red != cert.reduced_row:
            return False
        residual = red[1]
        if set(residual) != {()} or not residual[()]:
            return False
    total = {}
    for lab, c in cert.combination:
        total = Poly2.add(total, Poly2.scale(c, _evaluate(rows[lab], cert.forced)))
    const = total.pop((), Fraction(0))
    return not total and const != 0


def _vf_bracket(n: int, m: int):
    """``[t^n d, t^m d] = (m - n) t^(n+m-1) d``."""
    return n + m - 1, m - n


def gamma_problem(f, D: int) -> FeasibilityProblem:
    """``Theta(A^1) --gamma--> N_{Z|A^1}`` for ``Z = {f = 0}``, vector fields ``t^n d/dt``, ``n <= D``."""
    Z = DivisorData(f, space="A1")
    V0 = [f"t^{n}d" for n in range(D + 1)]
    V1 = [f"t^{e}" for e in range(Z.O["t"].dim)] if Z.O["t"].dim > 1 else ["a"] * Z.O["t"].dim

    def br(i, j):
        e, c = _vf_bracket(i, j)
        if c == 0:
            return {}
        if e < 0:
            return {}
        if e > D:
            return None
        return {e: Fraction(c)}

    def d0(i):
        col = Z.gamma_column("t", i)
        return {w: x for w, x in enumerate(col) if x}

    return FeasibilityProblem(V0, V1, br, d0)


def eval_problem(d: int, sigma, D: int) -> tuple[FeasibilityProblem, dict]:
    """``P(U0, L) --e_sigma--> L`` on the affine chart, with the cocone bracket as candidate."""
    sig = parse_poly(sigma)
    ds = pdeg(sig) if sig else 0
    D1 = D + ds
    V0 = [f"t^{n}d" for n in range(D + 1)] + [f"t^{n}" for n in range(D + 1)]
    V1 = [f"t^{k}e" for k in range(D1 + 1)]
    nv = D + 1

    def elem(i):
        return ("X", i) if i < nv else ("O", i - nv)

    def pos(kind, e):
        if e < 0 or e > D:
            return None
        return e if kind == "X" else nv + e

    def br(i, j):
        (a, n), (b, m) = elem(i), elem(j)
        if a == "X" and b == "X":
            e, c = _vf_bracket(n, m)
            kind = "X"
        elif a == "X" and b == "O":
            e, c, kind = n + m - 1, m, "O"
        elif a == "O" and b == "X":
            e, c, kind = n + m - 1, -n, "O"
        else:
            return {}
        if c == 0:
            return {}
        p = pos(kind, e)
        return None if p is None else {p: Fraction(c)}

    def d0(i):
        a, n = elem(i)
        img = pmul({n: Fraction(1)}, pderiv(sig) if a == "X" else sig)
        if any(e > D1 for e in img):
            return None
        return dict(img)

    def shift(i):
        a, n = elem(i)
        return max(n - 1, 0) if a == "X" else n

    def jac_ok(i, j, v):
        return shift(i) + shift(j) + v <= D1

    P = FeasibilityProblem(V0, V1, br, d0, jac_ok)
    cand = {}
    for i in range(len(V0)):
        a, n = elem(i)
        for k in range(D1 + 1):
            if a == "X":
                e, c = n + k - 1, k
            else:
                e, c = n + k, 1
            if c and 0 <= e <= D1:
                cand[P.unknown(i, k, e)] = Fraction(c)
    return P, cand


def zero_problem() -> FeasibilityProblem:
    return FeasibilityProblem([], [], lambda i, j: {}, lambda i: {})


# -- scenarios ----------------------------------------------------------------------------


def _sym_matrix(mat, x):
    return sympy.Matrix([[sum(sympy.Rational(c.numerator, c.denominator) * x ** e for e, c in g.items()) for g in row]
                         for row in mat])


def _minor_ideal_gcd(M: sympy.Matrix, r: int, x):
    g = sympy.Integer(0)
    for rows in combinations(range(M.rows), r):
        for cols in combinations(range(M.cols), r):
            g = sympy.gcd(g, M.extract(list(rows), list(cols)).det())
            if g.is_number and g != 0:
                return g
    return g


def exactness_certificate(R: Resolution) -> dict:
    """Buchsbaum-Eisenbud check that ``E^*`` is exact in negative degrees on each chart.

    On a chart the terms are free over ``K[x]``.  Exactness at ``E^k`` (``k < 0``)
    holds iff ranks add up and the ideal of ``rank``-minors of each map into a
    negative degree is the unit ideal; the map into ``E^0`` only needs nonzero minors.
    """
    x = sympy.Symbol("x")
    out = {}
    degs = sorted(R.twists)
    for chart in ("t", "s"):
        ranks, ideals = {}, {}
        for k in degs:
            m = R.dmat(k, chart)
            if m is None or not m or not m[0]:
                ranks[k] = 0
                continue
            M = _sym_matrix(m, x)
            ranks[k] = M.rank()
            if ranks[k]:
                ideals[k] = _minor_ideal_gcd(M, ranks[k], x)
        errs = []
        for k in degs:
            if k >= 0:
                continue
            if ranks.get(k - 1, 0) + ranks.get(k, 0) != R.rank(k):
                errs.append(f"rank condition fails at E^{k}")
        for k, g in ideals.items():
            if k + 1 < 0 and not (g.is_number and g != 0):
                errs.append(f"minors of d_{k} have a common zero")
        out[chart] = {"ranks": {k: int(v) for k, v in ranks.items()}, "errors": errs}
    out["ok"] = not any(out[c]["errors"] for c in ("t", "s"))
    return out


@dataclass
class TripleScenario:
    """A triple on P^1 given by a resolution with section lift, a cover and a window."""

    resolution: Resolution
    cover: Cover = P1_STANDARD
    window: int | None = None

    def validate(self) -> dict:
        cert = exactness_certificate(self.resolution)
        if not cert["ok"]:
            raise ValueError("; ".join(cert["t"]["errors"] + cert["s"]["errors"]))
        return cert

    @property
    def N(self) -> int:
        if self.window is not None:
            return self.window
        return default_window(d=max((abs(a) for v in self.resolution.twists.values() for a in v), default=0))


def assemble_cocone_scdgla(sc: TripleScenario, N: int | None = None):
    """Semicosimplicial cocone over the cover; faces are restrictions."""
    return triple_model(sc.resolution, N if N is not None else sc.N, sc.cover).scdgla


def twist_section(R: Resolution, r: list) -> Resolution:
    """The same resolution with section ``s + d r`` for ``r`` in ``Gamma(E^-1)``."""
    m = R.d.get(-1)
    if m is None:
        raise ValueError("no degree -1 term to twist by")
    rr = [parse_poly(x) for x in r]
    s2 = [padd(R.s[i], *[pmul(m[i][j], rr[j]) for j in range(len(rr))]) for i in range(len(R.s))]
    return R.with_section(s2)
