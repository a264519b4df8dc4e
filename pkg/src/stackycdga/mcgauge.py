"""Maurer-Cartan elements, gauge action, points of [Y/g], flat connections
and (quasi-)Cartesian modules.

Matrices are lists of rows of :class:`Element`.  For a matrix ``w`` of
degree-1 entries, ``1/2 [w, w]`` in ``gl_n (x) B`` equals the matrix
product ``w w``: writing ``w = sum_a A_a w_a`` gives
``1/2 sum_{a,b} [A_a, A_b] w_a w_b = sum_{a,b} A_a A_b w_a w_b`` because
``w_a w_b = -w_b w_a``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import (
    Element,
    Monomial,
    Presentation,
    Truth,
    as_scalar,
    format_element,
    is_unit,
    monomial_element,
    random_element,
)
from .cdga import CDGA, FreeDGModule
from .constructions import ActionData, AffineData, LieAlgebraData
from .doldkan import DLevelElement, coface
from .errors import DegreeError, MixedPresentation, RelationViolation, SizeMismatch, ValidationError
from .report import Verdict, VerificationReport, combine

Matrix = List[List[Element]]


# ----------------------------------------------------------------------
# matrices over B
# ----------------------------------------------------------------------


def as_matrix(B: CDGA, rows: Sequence[Sequence[Union[Element, str, int]]]) -> Matrix:
    P = B.presentation
    out: Matrix = []
    width = None
    for row in rows:
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SizeMismatch("ragged matrix")
        new = []
        for x in row:
            if isinstance(x, Element):
                if x.presentation != P:
                    raise MixedPresentation("matrix entry over another presentation")
                new.append(x)
            else:
                new.append(P.parse(x) if isinstance(x, str) else P.scalar(x))
        out.append(new)
    return out


def mat_identity(P: Presentation, n: int) -> Matrix:
    return [[P.one() if i == j else P.zero() for j in range(n)] for i in range(n)]


def mat_zero(P: Presentation, r: int, c: Optional[int] = None) -> Matrix:
    return [[P.zero() for _ in range(r if c is None else c)] for _ in range(r)]


def mat_shape(m: Matrix) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    (r, k), (k2, c) = mat_shape(a), mat_shape(b)
    if k != k2:
        raise SizeMismatch(f"cannot multiply {r}x{k} by {k2}x{c}")
    P = a[0][0].presentation if r and k else b[0][0].presentation
    out = mat_zero(P, r, c)
    for i in range(r):
        for t in range(k):
            x = a[i][t]
            if not x:
                continue
            for j in range(c):
                if b[t][j]:
                    out[i][j] = out[i][j] + x * b[t][j]
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if mat_shape(a) != mat_shape(b):
        raise SizeMismatch("matrix sizes differ")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def mat_d(B: CDGA, a: Matrix) -> Matrix:
    return [[B.d(x) for x in row] for row in a]


def mat_is_zero(a: Matrix) -> bool:
    return not any(x for row in a for x in row)


def mat_first_nonzero(a: Matrix) -> Optional[Tuple[int, int, Element]]:
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if x:
                return i, j, x
    return None


def format_matrix(a: Matrix) -> List[List[str]]:
    return [[format_element(x) for x in row] for row in a]


def _check_degree(a: Matrix, degree: int, what: str) -> None:
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            for d, _ in x.bidegrees():
                if d != degree:
                    raise DegreeError(f"{what} entry ({i}, {j}) has degree {d}, expected {degree}")


# ----------------------------------------------------------------------
# Lie data and MC elements
# ----------------------------------------------------------------------


class MatrixLieData:
    """gl_n, or the subalgebra spanned by ``basis`` (scalar n x n matrices)."""

    def __init__(self, n: int, basis: Optional[Sequence[Sequence[Sequence]]] = None, names: Optional[Sequence[str]] = None):
        self.n = n
        if basis is None:
            self.basis = None
            self.names = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
            return
        mats = [[[as_scalar(x) for x in row] for row in m] for m in basis]
        for m in mats:
            if len(m) != n or any(len(r) != n for r in m):
                raise SizeMismatch(f"basis matrices must be {n}x{n}")
        self.basis = mats
        self.names = list(names) if names is not None else [f"b{i + 1}" for i in range(len(mats))]
        flat = [self._flat(m) for m in mats]
        if linalg.span_rank(flat, n * n) != len(flat):
            raise ValidationError("subalgebra basis is linearly dependent")
        for a in mats:
            for b in mats:
                if not self._in_span(self._commutator(a, b)):
                    raise ValidationError("subalgebra basis is not closed under the commutator")

    @staticmethod
    def _flat(m) -> List[Fraction]:
        return [x for row in m for x in row]

    def _commutator(self, a, b):
        n = self.n
        ab = linalg.matmul(a, b, n, n)
        ba = linalg.matmul(b, a, n, n)
        return [[ab[i][j] - ba[i][j] for j in range(n)] for i in range(n)]

    def _in_span(self, m) -> bool:
        if self.basis is None:
            return True
        return linalg.in_span([self._flat(b) for b in self.basis], self._flat(m))

    def contains(self, m) -> bool:
        return self._in_span(m)

    def dim(self) -> int:
        return self.n * self.n if self.basis is None else len(self.basis)

    def basis_matrices(self) -> List[List[List[Fraction]]]:
        if self.basis is not None:
            return self.basis
        out = []
        for i in range(self.n):
            for j in range(self.n):
                m = linalg.zeros(self.n, self.n)
                m[i][j] = Fraction(1)
                out.append(m)
        return out


def gl(n: int) -> MatrixLieData:
    return MatrixLieData(n)


@dataclass
class MCCandidate:
    """An n x n matrix of degree-1 elements of B."""

    algebra: CDGA
    omega: Matrix

    def __post_init__(self):
        self.omega = as_matrix(self.algebra, self.omega)
        r, c = mat_shape(self.omega)
        if r != c:
            raise SizeMismatch("MC candidate must be square")
        _check_degree(self.omega, 1, "omega")

    @property
    def n(self) -> int:
        return len(self.omega)


def curvature(B: CDGA, omega: Matrix) -> Matrix:
    """d omega + omega omega."""
    return mat_add(mat_d(B, omega), mat_mul(omega, omega))


def lie_membership(g: MatrixLieData, omega: Matrix) -> Optional[Tuple[Monomial, List[List[Fraction]]]]:
    """First monomial whose coefficient matrix lies outside g, or None."""
    if g.basis is None:
        return None
    monos = sorted({m for row in omega for x in row for m in x.terms})
    for m in monos:
        coeff = [[x.coefficient(m) for x in row] for row in omega]
        if not g.contains(coeff):
            return m, coeff
    return None


def mc_check(g: MatrixLieData, B: CDGA, omega: Union[MCCandidate, Matrix]) -> VerificationReport:
    if not isinstance(omega, MCCandidate):
        omega = MCCandidate(B, omega)
    if omega.algebra != B:
        raise MixedPresentation("MC candidate lives over another algebra")
    if omega.n != g.n:
        raise SizeMismatch(f"omega is {omega.n}x{omega.n} but g acts on Q^{g.n}")
    bad = lie_membership(g, omega.omega)
    if bad is not None:
        m, coeff = bad
        return VerificationReport(
            "mc",
            Verdict.FAIL,
            "omega is not in g (x) B^1",
            witness={"monomial": format_element(monomial_element(B.presentation, m)), "coefficient": [[str(x) for x in r] for r in coeff]},
        )
    F = curvature(B, omega.omega)
    hit = mat_first_nonzero(F)
    if hit is not None:
        i, j, x = hit
        return VerificationReport(
            "mc",
            Verdict.FAIL,
            f"d omega + omega omega has nonzero entry ({i + 1}, {j + 1})",
            witness={"entry": [i + 1, j + 1], "value": format_element(x), "curvature": format_matrix(F)},
            payload=F,
        )
    return VerificationReport("mc", Verdict.PASS, "d omega + 1/2[omega, omega] = 0")


# ----------------------------------------------------------------------
# gauge
# ----------------------------------------------------------------------


class GaugeElement:
    """An invertible matrix over B^0 together with its exact inverse."""

    def __init__(self, algebra: CDGA, g, g_inv):
        self.algebra = algebra
        self.g = as_matrix(algebra, g)
        self.g_inv = as_matrix(algebra, g_inv)
        n, c = mat_shape(self.g)
        if n != c or mat_shape(self.g_inv) != (n, n):
            raise SizeMismatch("gauge element and inverse must be square of the same size")
        _check_degree(self.g, 0, "g")
        _check_degree(self.g_inv, 0, "g^-1")
        ident = mat_identity(algebra.presentation, n)
        if mat_mul(self.g, self.g_inv) != ident or mat_mul(self.g_inv, self.g) != ident:
            raise ValidationError("supplied inverse does not satisfy g g^-1 = g^-1 g = id")

    @property
    def n(self) -> int:
        return len(self.g)

    @classmethod
    def identity(cls, B: CDGA, n: int) -> "GaugeElement":
        I = mat_identity(B.presentation, n)
        return cls(B, I, I)

    @classmethod
    def elementary(cls, B: CDGA, n: int, i: int, j: int, a: Union[Element, str, int]) -> "GaugeElement":
        """1 + a E_ij (i != j, 0-based) with inverse 1 - a E_ij."""
        if i == j:
            raise ValidationError("elementary gauge needs i != j")
        a = as_matrix(B, [[a]])[0][0]
        g = mat_identity(B.presentation, n)
        gi = mat_identity(B.presentation, n)
        g[i][j] = a
        gi[i][j] = -a
        return cls(B, g, gi)

    @classmethod
    def diagonal(cls, B: CDGA, entries: Sequence[Union[Element, str, int]]) -> "GaugeElement":
        from .algebra import unit_inverse

        P = B.presentation
        es = as_matrix(B, [list(entries)])[0]
        n = len(es)
        g = mat_zero(P, n)
        gi = mat_zero(P, n)
        for k, e in enumerate(es):
            if is_unit(e) is not Truth.YES:
                raise ValidationError(f"diagonal entry {format_element(e)} is not a unit")
            g[k][k] = e
            gi[k][k] = unit_inverse(e)
        return cls(B, g, gi)

    def compose(self, other: "GaugeElement") -> "GaugeElement":
        """self * other (act by other first)."""
        return GaugeElement(self.algebra, mat_mul(self.g, other.g), mat_mul(other.g_inv, self.g_inv))


def gauge_transform(g: GaugeElement, omega: Union[MCCandidate, Matrix]) -> MCCandidate:
    """g omega g^-1 - (d g) g^-1, the transport of the connection d + omega along g."""
    if not isinstance(omega, MCCandidate):
        omega = MCCandidate(g.algebra, omega)
    if omega.algebra != g.algebra:
        raise MixedPresentation("gauge element and omega live over different algebras")
    if omega.n != g.n:
        raise SizeMismatch(f"gauge element is {g.n}x{g.n} but omega is {omega.n}x{omega.n}")
    B = g.algebra
    conj = mat_mul(mat_mul(g.g, omega.omega), g.g_inv)
    return MCCandidate(B, mat_add(conj, mat_neg(mat_mul(mat_d(B, g.g), g.g_inv))))


# ----------------------------------------------------------------------
# points of [Y/g]
# ----------------------------------------------------------------------


@dataclass
class PointCandidate:
    """y: generators of O(Y) -> B^0, and optionally gamma: Lie basis -> B^1."""

    y: Dict[str, Element]
    gamma: Dict[str, Element] = field(default_factory=dict)


def _point_images(Y: AffineData, B: CDGA, y: Mapping) -> Dict[str, Element]:
    P = B.presentation
    out = {}
    for name in Y.names:
        if name not in y:
            raise ValidationError(f"point has no value on generator {name}")
        v = y[name]
        if not isinstance(v, Element):
            v = P.parse(v) if isinstance(v, str) else P.scalar(v)
        elif v.presentation != P:
            raise MixedPresentation(f"y({name}) lives over another presentation")
        for d, _ in v.bidegrees():
            if d != 0:
                raise DegreeError(f"y({name}) must have degree 0")
        if Y.presentation.spec(name).invertible and is_unit(v) is not Truth.YES:
            raise RelationViolation(f"inverted generator {name} maps to the non-unit {format_element(v)}")
        out[name] = v
    return out


def point_check(
    Y: AffineData,
    g: LieAlgebraData,
    alpha: ActionData,
    B: CDGA,
    point: PointCandidate,
) -> VerificationReport:
    """(y, gamma) is a B-point of [Y/g].

    MC: ``d gamma_k - sum_{i<j} c^k_ij gamma_i gamma_j = 0`` (the sign that
    makes the tautological point (id, -e^v) of the CE algebra valid).
    Compatibility on each generator f:
    ``sum_i gamma_i y(alpha(e_i) f) + d_B y(f) = 0``.
    """
    from .algebra import apply_homomorphism

    P = B.presentation
    y = _point_images(Y, B, point.y)
    gamma: Dict[str, Element] = {}
    for b in g.basis:
        v = point.gamma.get(b, 0)
        if not isinstance(v, Element):
            v = P.parse(v) if isinstance(v, str) else P.scalar(v)
        for d, _ in v.bidegrees():
            if d != 1:
                raise DegreeError(f"gamma({b}) must have degree 1")
        gamma[b] = v
    extra = set(point.gamma) - set(g.basis)
    if extra:
        raise ValidationError(f"gamma given on unknown Lie basis elements {sorted(extra)}")

    mc = VerificationReport("point_mc", Verdict.PASS, "d gamma + 1/2[gamma, gamma] = 0")
    for k, bk in enumerate(g.basis):
        val = B.d(gamma[bk])
        for (i, j), vec in g.constants.items():
            c = vec.get(k)
            if c:
                val = val - (gamma[g.basis[i]] * gamma[g.basis[j]]).scale(c)
        if val:
            mc = VerificationReport(
                "point_mc", Verdict.FAIL, f"MC condition fails on component {bk}", witness={"component": bk, "value": format_element(val)}
            )
            break
    compat = VerificationReport("point_compatibility", Verdict.PASS, "y alpha(gamma) + d y = 0 on all generators")
    for f in Y.names:
        fe = Y.presentation.gen(f)
        val = B.d(y[f])
        for b in g.basis:
            if gamma[b]:
                val = val + gamma[b] * apply_homomorphism(alpha.apply(b, fe), y, P)
        if val:
            compat = VerificationReport(
                "point_compatibility",
                Verdict.FAIL,
                f"compatibility fails on generator {f}",
                witness={"generator": f, "value": format_element(val)},
            )
            break
    return combine("point", [mc, compat], "B-point of [Y/g]")


def equaliser_membership(Y: AffineData, B: CDGA, y: Union[PointCandidate, Mapping]) -> VerificationReport:
    """y lands in the equaliser of the two cofaces D^0 B -> D^1 B."""
    images = _point_images(Y, B, y.y if isinstance(y, PointCandidate) else y)
    for name, v in images.items():
        x = DLevelElement(B, 0, {(): v})
        diff = coface(0, x) - coface(1, x)
        if diff:
            return VerificationReport(
                "equaliser",
                Verdict.FAIL,
                f"d^0 y({name}) != d^1 y({name})",
                witness={"generator": name, "d_of_image": format_element(B.d(v))},
            )
    return VerificationReport("equaliser", Verdict.PASS, "y is equalised by d^0 and d^1")


# ----------------------------------------------------------------------
# flat connections
# ----------------------------------------------------------------------


@dataclass
class ConnectionData:
    """nabla = d_B + omega on (B^0)^r (x) B, omega an r x r matrix of degree-1 elements."""

    algebra: CDGA
    omega: Matrix

    def __post_init__(self):
        self.omega = MCCandidate(self.algebra, self.omega).omega

    @property
    def rank(self) -> int:
        return len(self.omega)

    def apply(self, v: Sequence[Element]) -> List[Element]:
        B = self.algebra
        out = []
        for i in range(self.rank):
            acc = B.d(v[i])
            for j in range(self.rank):
                if self.omega[i][j] and v[j]:
                    acc = acc + self.omega[i][j] * v[j]
            out.append(acc)
        return out

    def module(self, weights: Optional[Sequence[int]] = None) -> FreeDGModule:
        """The free module with basis m_j in degree 0 and d m_j = sum_i omega_ij m_i.

        ``weights`` places m_j in weight ``weights[j]`` (default 0), which a
        weight-homogeneous omega with nonzero entry weights needs.
        """
        weights = list(weights) if weights is not None else [0] * self.rank
        if len(weights) != self.rank:
            raise SizeMismatch(f"need {self.rank} basis weights")
        basis = [(f"m{j + 1}", 0, weights[j]) for j in range(self.rank)]
        return FreeDGModule(self.algebra, basis, self.omega)

    def gauge(self, g: GaugeElement) -> "ConnectionData":
        return ConnectionData(self.algebra, gauge_transform(g, self.omega).omega)


def _random_homogeneous(rng: random.Random, B: CDGA, degree: int, weights: Sequence[int]) -> Element:
    P = B.presentation
    for _ in range(10):
        w = rng.choice(list(weights))
        try:
            e = random_element(rng, P, degree, w)
        except Exception:
            continue
        if e:
            return e
    return P.one() if degree == 0 else P.zero()


def flatness_check(c: ConnectionData, seed: int = 0, trials: int = 5) -> VerificationReport:
    B = c.algebra
    P = B.presentation
    F = curvature(B, c.omega)
    hit = mat_first_nonzero(F)
    if hit is None:
        curv = VerificationReport("curvature", Verdict.PASS, "d omega + omega omega = 0")
    else:
        i, j, x = hit
        curv = VerificationReport(
            "curvature",
            Verdict.FAIL,
            f"curvature entry ({i + 1}, {j + 1}) is nonzero",
            witness={"entry": [i + 1, j + 1], "value": format_element(x), "curvature": format_matrix(F)},
        )
    rng = random.Random(seed)
    weights = sorted({g.weight for g in P.generators} | {0})
    leib = VerificationReport("leibniz", Verdict.PASS, f"nabla(b m) = d(b) m + (-1)^|b| b nabla(m) on {trials} random samples")
    for _ in range(trials):
        deg = rng.choice([0, 1])
        b = _random_homogeneous(rng, B, deg, weights)
        m = [_random_homogeneous(rng, B, 0, weights) for _ in range(c.rank)]
        lhs = c.apply([b * x for x in m])
        db = B.d(b)
        nm = c.apply(m)
        sign = -1 if deg % 2 else 1
        rhs = [db * x + (b * y).scale(sign) for x, y in zip(m, nm)]
        if lhs != rhs:
            leib = VerificationReport(
                "leibniz", Verdict.FAIL, "Leibniz rule fails", witness={"b": format_element(b), "m": [format_element(x) for x in m]}
            )
            break
    return combine("flatness", [curv, leib], "nabla o nabla = 0")


# ----------------------------------------------------------------------
# Cartesian modules
# ----------------------------------------------------------------------


class QuotientModule:
    """M = F / K with F a free B-module and K generated by ``relations``.

    Only the graded module structure matters for the Cartesian test, so no
    compatibility of K with the differential is required.
    """

    def __init__(self, free: FreeDGModule, relations: Sequence[Mapping[int, Element]] = ()):
        self.free = free
        P = free.over.presentation
        rels = []
        for r in relations:
            rr = {}
            for i, e in r.items():
                i = free.index(i) if isinstance(i, str) else i
                if not isinstance(e, Element):
                    e = P.parse(e) if isinstance(e, str) else P.scalar(e)
                rr[i] = e
            degs = set()
            wts = set()
            for i, e in rr.items():
                for d, w in e.bidegrees():
                    degs.add(d + free.basis[i].degree)
                    wts.add(w + free.basis[i].weight)
            if len(degs) > 1 or len(wts) > 1:
                raise ValidationError("relations must be homogeneous")
            if rr and degs:
                rels.append((rr, degs.pop(), wts.pop()))
        self.relations = rels

    @property
    def over(self) -> CDGA:
        return self.free.over

    def relation_span(self, degree: int, weight: int) -> List[List[Fraction]]:
        """Coordinates (in F's slice basis) spanning K^{degree, weight}."""
        keys = self.free.slice_basis(degree, weight)
        pos = {k: i for i, k in enumerate(keys)}
        P = self.over.presentation
        vecs = []
        for rel, d, w in self.relations:
            for m in P.slice_basis(degree - d, weight - w):
                b = monomial_element(P, m)
                v = [Fraction(0)] * len(keys)
                for i, e in rel.items():
                    for mm, c in (b * e).terms.items():
                        v[pos[(i, mm)]] += c
                vecs.append(v)
        return vecs


def _positive_part(P: Presentation) -> Presentation:
    return Presentation([g for g in P.generators if g.degree > 0])


def _v_weight_range(V: Presentation, n: int) -> Tuple[int, int]:
    ws = [V.weight_of(m) for m in _all_degree(V, n)]
    return (min(ws), max(ws)) if ws else (0, -1)


def _all_degree(V: Presentation, n: int) -> List[Monomial]:
    """Monomials of V of degree n (any weight)."""
    out: List[Monomial] = []
    gens = V.generators

    def rec(k, rem, exps):
        if k == len(gens):
            if rem == 0:
                out.append(tuple(exps))
            return
        g = gens[k]
        top = 1 if g.odd else rem // g.degree
        for a in range(min(top, rem // g.degree) + 1):
            exps.append(a)
            rec(k + 1, rem - a * g.degree, exps)
            exps.pop()

    rec(0, n, [])
    return out


def cartesian_check(
    B: CDGA,
    M: Union[FreeDGModule, QuotientModule],
    degree_bound: int = 3,
    weight_bound: int = 4,
) -> VerificationReport:
    """M^0 (x)_{B^0} B^# -> M^# is bijective on every probed slice.

    Uses B^# = B^0 (x) V with V free on the positive-degree generators, so
    the source slice is ``(+)_u M^{0,u} (x) V^{n, w-u}``.
    """
    if isinstance(M, FreeDGModule):
        M = QuotientModule(M)
    if M.over != B:
        raise MixedPresentation("module is over another algebra")
    F = M.free
    P = B.presentation
    V = _positive_part(P)
    posV = [P.index[g.name] for g in V.generators]
    lo_w = min([b.weight for b in F.basis] + [0]) - (weight_bound if P.inverted else 0)
    for n in range(0, degree_bound + 1):
        vlo, vhi = _v_weight_range(V, n)
        for w in range(lo_w, weight_bound + 1):
            keys = F.slice_basis(n, w)
            pos = {k: i for i, k in enumerate(keys)}
            K = M.relation_span(n, w)
            rk_K = linalg.span_rank(K, len(keys))
            tgt_dim = len(keys) - rk_K
            images: List[List[Fraction]] = []
            src_dim = 0
            for u in range(w - vhi, w - vlo + 1):
                # basis of M^{0,u}: complement of K^{0,u} inside F^{0,u}
                k0 = F.slice_basis(0, u)
                if not k0:
                    continue
                K0 = M.relation_span(0, u)
                reps = _complement(K0, len(k0))
                vmonos = [m for m in V.slice_basis(n, w - u)] if vlo <= w - u <= vhi else []
                src_dim += len(reps) * len(vmonos)
                for rep in reps:
                    vec0 = {k0[i]: c for i, c in enumerate(rep) if c}
                    for vm in vmonos:
                        full = [0] * len(P.generators)
                        for idx, x in zip(posV, vm):
                            full[idx] = x
                        v_el = monomial_element(P, tuple(full))
                        img = [Fraction(0)] * len(keys)
                        for (j, m0), c in vec0.items():
                            for mm, cc in (v_el * monomial_element(P, m0, c)).terms.items():
                                img[pos[(j, mm)]] += cc
                        images.append(img)
            rank = linalg.span_rank(K + images, len(keys)) - rk_K
            if rank != src_dim or rank != tgt_dim:
                kind = "not injective" if rank != src_dim else "not surjective"
                return VerificationReport(
                    "cartesian",
                    Verdict.FAIL,
                    f"M^0 (x) B^# -> M^# is {kind} in degree {n}, weight {w}",
                    witness={"degree": n, "weight": w, "source_dim": src_dim, "target_dim": tgt_dim, "rank": rank},
                )
    return VerificationReport(
        "cartesian",
        Verdict.PASS,
        f"M^0 (x) B^# -> M^# is bijective for degrees <= {degree_bound}, weights <= {weight_bound}",
    )


def _complement(span: List[List[Fraction]], n: int) -> List[List[Fraction]]:
    """Standard basis vectors completing ``span`` to a basis of Q^n."""
    out: List[List[Fraction]] = []
    cur = list(span)
    r = linalg.span_rank(cur, n)
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        if linalg.span_rank(cur + [e], n) > r:
            cur.append(e)
            out.append(e)
            r += 1
    return out


# ----------------------------------------------------------------------
# quasi-Cartesian modules over B in chain degree 0
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BigradedBasis:
    name: str
    degree: int  # cochain
    chain: int
    weight: int = 0


class BigradedModule:
    """A free B^#-module on bigraded basis vectors with a chain differential delta.

    ``delta[i][j]`` is the coefficient of basis i in delta(basis j); it has
    cochain degree ``deg_j - deg_i`` and requires ``chain_i = chain_j - 1``.
    delta is B-linear with the Koszul sign ``delta(b m) = (-1)^|b| b delta(m)``.
    """

    def __init__(self, over: CDGA, basis: Sequence, delta: Optional[Sequence[Sequence]] = None):
        self.over = over
        P = over.presentation
        self.basis = tuple(b if isinstance(b, BigradedBasis) else BigradedBasis(*b) for b in basis)
        r = len(self.basis)
        delta = delta if delta is not None else [[0] * r for _ in range(r)]
        D = as_matrix(over, delta) if r else []
        for i in range(r):
            for j in range(r):
                x = D[i][j]
                if not x:
                    continue
                bi, bj = self.basis[i], self.basis[j]
                if bi.chain != bj.chain - 1:
                    raise ValidationError(f"delta({bj.name}) may only involve chain degree {bj.chain - 1}")
                for d, w in x.bidegrees():
                    if d != bj.degree - bi.degree or w != bj.weight - bi.weight:
                        raise ValidationError(f"delta entry ({bi.name}, {bj.name}) has the wrong bidegree")
        self.delta = D
        for j in range(r):
            dd = self._delta_vec(self._delta_vec({j: P.one()}))
            if dd:
                raise ValidationError(f"delta^2 != 0 on {self.basis[j].name}")

    def _delta_vec(self, v: Mapping[int, Element]) -> Dict[int, Element]:
        P = self.over.presentation
        out: Dict[int, Element] = {}
        for j, b in v.items():
            even = Element(P, {m: c for m, c in b.terms.items() if P.degree_of(m) % 2 == 0})
            odd = Element(P, {m: c for m, c in b.terms.items() if P.degree_of(m) % 2 == 1})
            s = even - odd
            for i in range(len(self.basis)):
                if self.delta[i][j]:
                    out[i] = out.get(i, P.zero()) + s * self.delta[i][j]
        return {i: e for i, e in out.items() if e}

    def slice_keys(self, degree: int, chain: int, weight: int, only: Optional[Sequence[int]] = None):
        P = self.over.presentation
        keys = []
        for j, b in enumerate(self.basis):
            if only is not None and j not in only:
                continue
            if b.chain != chain:
                continue
            for m in P.slice_basis(degree - b.degree, weight - b.weight):
                keys.append((j, m))
        return keys


def quasi_cartesian_check(
    B: CDGA,
    M: BigradedModule,
    degree_bound: int = 3,
    weight_bound: int = 4,
) -> VerificationReport:
    """M^0 (x)_{B^0} B^# -> M^# is a quasi-isomorphism for delta.

    The map is the inclusion of the submodule generated by cochain-degree-0
    basis vectors, so it is a quasi-isomorphism exactly when the quotient
    complex (basis vectors of positive cochain degree, induced delta) is
    acyclic; this is checked slice by slice with exact ranks.
    """
    if M.over != B:
        raise MixedPresentation("module is over another algebra")
    if any(b.degree < 0 for b in M.basis):
        raise DegreeError("basis vectors must have non-negative cochain degree")
    P = B.presentation
    quotient = [j for j, b in enumerate(M.basis) if b.degree > 0]
    if not quotient:
        return VerificationReport("quasi_cartesian", Verdict.PASS, "M is generated by M^0 (isomorphism)")
    chains = sorted({M.basis[j].chain for j in quotient})
    lo_w = min(M.basis[j].weight for j in quotient) - (weight_bound if P.inverted else 0)
    qset = set(quotient)
    for n in range(1, degree_bound + 1):
        for w in range(lo_w, weight_bound + 1):
            mats = {}
            for c in range(chains[0], chains[-1] + 2):
                src = M.slice_keys(n, c, w, quotient)
                tgt = M.slice_keys(n, c - 1, w, quotient)
                pos = {k: i for i, k in enumerate(tgt)}
                mat = linalg.zeros(len(tgt), len(src))
                for col, (j, m) in enumerate(src):
                    for i, e in M._delta_vec({j: monomial_element(P, m)}).items():
                        if i not in qset:
                            continue
                        for mm, cc in e.terms.items():
                            mat[pos[(i, mm)]][col] += cc
                mats[c] = (len(src), len(tgt), mat)
            for c in range(chains[0], chains[-1] + 1):
                dim = mats[c][0]
                rk_out = linalg.rank(mats[c][2], mats[c][0]) if dim else 0
                up = mats.get(c + 1)
                rk_in = linalg.rank(up[2], up[0]) if up and up[0] else 0
                h = dim - rk_out - rk_in
                if h:
                    return VerificationReport(
                        "quasi_cartesian",
                        Verdict.FAIL,
                        f"extra chain homology in cochain degree {n}, weight {w}, chain degree {c}",
                        witness={"degree": n, "weight": w, "chain": c, "homology_dim": h},
                    )
    return VerificationReport(
        "quasi_cartesian",
        Verdict.PASS,
        f"M^0 (x) B^# -> M^# is a quasi-isomorphism for degrees <= {degree_bound}, weights <= {weight_bound}",
    )
