"""Dold-Kan denormalisation of a CDGA as a cosimplicial commutative algebra.

Level n of DA is a direct sum of copies of A^m, one for each subset
J = {j_1 < ... < j_s} of {1..n} with m + s = n; the copy indexed by J holds
the formal words  d^{j_s} ... d^{j_1} a.  Stored words never involve the
zeroth coface: d^0 is rewritten eagerly through

    d^0 v = d_A v - sum_{i=1}^{m+1} (-1)^i d^i v      (v in A^m),

after commuting it past the outer cofaces with d^0 d^k = d^{k+1} d^0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .algebra import Element, Monomial, format_element, monomial_element, multiply
from .cdga import CDGA
from .errors import IndexOutOfRange, LevelMismatch, ValidationError
from .report import Verdict, VerificationReport

Subset = Tuple[int, ...]


class DLevelElement:
    """An element of D^n A: ``{J: a_J}`` with ``a_J`` homogeneous of degree n - |J|."""

    __slots__ = ("algebra", "level", "terms")

    def __init__(self, algebra: CDGA, level: int, terms: Mapping[Subset, Element] = ()):
        self.algebra = algebra
        self.level = level
        clean: Dict[Subset, Element] = {}
        for J, a in dict(terms).items():
            J = tuple(J)
            if list(J) != sorted(set(J)) or (J and (J[0] < 1 or J[-1] > level)):
                raise ValidationError(f"subset {J} is not a sorted subset of 1..{level}")
            if not a:
                continue
            d = a.degree
            if d is None or d != level - len(J):
                raise ValidationError(f"term {J} must have degree {level - len(J)}")
            clean[J] = clean[J] + a if J in clean else a
        self.terms = {J: a for J, a in clean.items() if a}

    def __repr__(self):
        return f"DLevelElement(level={self.level}, {format_dlevel(self)})"

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DLevelElement):
            return NotImplemented
        return self.level == other.level and self.terms == other.terms

    def __hash__(self):
        return hash((self.level, frozenset(self.terms.items())))

    def _check(self, other: "DLevelElement"):
        if other.level != self.level:
            raise LevelMismatch(f"levels {self.level} and {other.level} differ")

    def __add__(self, other: "DLevelElement") -> "DLevelElement":
        self._check(other)
        out = dict(self.terms)
        for J, a in other.terms.items():
            out[J] = out[J] + a if J in out else a
        return DLevelElement(self.algebra, self.level, out)

    def __neg__(self):
        return DLevelElement(self.algebra, self.level, {J: -a for J, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DLevelElement":
        return DLevelElement(self.algebra, self.level, {J: a.scale(c) for J, a in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DLevelElement):
            return shuffle(self, other)
        return self.scale(other)

    def weight_terms(self) -> Dict[Tuple[Subset, Monomial], Fraction]:
        return {(J, m): c for J, a in self.terms.items() for m, c in a.terms.items()}


def format_dlevel(x: DLevelElement) -> str:
    if not x.terms:
        return "0"
    parts = []
    for J in sorted(x.terms, key=lambda J: (len(J), J)):
        word = "".join(f"d^{j}" for j in reversed(J))
        a = format_element(x.terms[J])
        parts.append(f"{word}({a})" if word else f"({a})")
    return " + ".join(parts)


def zero(A: CDGA, level: int) -> DLevelElement:
    return DLevelElement(A, level)


def embed(A: CDGA, a: Element) -> DLevelElement:
    """An element of A^m as the normalised (J = {}) term of D^m A."""
    d = a.degree
    if d is None:
        if not a:
            raise ValidationError("embed needs a nonzero homogeneous element (level is ambiguous)")
        raise ValidationError("embed needs a homogeneous element")
    return DLevelElement(A, d, {(): a})


def term(A: CDGA, level: int, J: Sequence[int], a: Element) -> DLevelElement:
    return DLevelElement(A, level, {tuple(J): a})


def unit(A: CDGA, level: int) -> DLevelElement:
    return DLevelElement(A, level, {tuple(range(1, level + 1)): A.presentation.one()})


# -- cosimplicial structure ------------------------------------------------


def _shift_insert(J: Subset, i: int) -> Subset:
    """d^i d^J = d^{J'} with J' = {j < i} + {i} + {j + 1 : j >= i}  (i >= 1)."""
    return tuple(sorted([j for j in J if j < i] + [i] + [j + 1 for j in J if j >= i]))


def coface(i: int, x: DLevelElement) -> DLevelElement:
    n = x.level
    if not 0 <= i <= n + 1:
        raise IndexOutOfRange(f"coface index {i} outside 0..{n + 1}")
    A = x.algebra
    if i >= 1:
        return DLevelElement(A, n + 1, {_shift_insert(J, i): a for J, a in x.terms.items()})
    out = DLevelElement(A, n + 1)
    for J, a in x.terms.items():
        out = out + _coface0_word(A, J, a)
    return out


def _coface0_word(A: CDGA, J: Subset, a: Element) -> DLevelElement:
    m = a.degree
    acc = DLevelElement(A, m + 1, {(): A.d(a)})
    for k in range(1, m + 2):
        acc = acc + DLevelElement(A, m + 1, {(k,): a.scale(-((-1) ** k))})
    for j in J:  # d^0 d^j = d^{j+1} d^0, innermost first
        acc = coface(j + 1, acc)
    return acc


def codegeneracy(i: int, x: DLevelElement) -> DLevelElement:
    n = x.level
    if not 0 <= i <= n - 1:
        raise IndexOutOfRange(f"codegeneracy index {i} outside 0..{n - 1}")
    out: Dict[Subset, Element] = {}
    for J, a in x.terms.items():
        r = _codegeneracy_word(i, J)
        if r is not None:
            out[r] = out[r] + a if r in out else a
    return DLevelElement(x.algebra, n - 1, out)


def _codegeneracy_word(j: int, J: Subset) -> Optional[Subset]:
    """Push s^j inward through d^{J} (outermost first); None when it reaches a bare element."""
    word = list(reversed(J))  # outermost first
    outer: List[int] = []
    k = j
    for pos, i in enumerate(word):
        if i < k:
            outer.append(i)
            k -= 1
        elif i == k or i == k + 1:
            inner = word[pos + 1:]
            return tuple(sorted(outer + inner))
        else:
            outer.append(i - 1)
    return None


def shuffle_sign(S: Iterable[int], T: Iterable[int]) -> int:
    """Sign of the (S, T)-shuffle: (-1)^{#{(s, t): s > t}}."""
    T = list(T)
    inv = sum(1 for s in S for t in T if s > t)
    return -1 if inv % 2 else 1


def shuffle(x: DLevelElement, y: DLevelElement) -> DLevelElement:
    """Eilenberg-Zilber product on the basis of positive-index words."""
    if x.level != y.level:
        raise LevelMismatch(f"shuffle of levels {x.level} and {y.level}")
    A = x.algebra
    out: Dict[Subset, Element] = {}
    for I, a in x.terms.items():
        sI = set(I)
        for J, b in y.terms.items():
            sJ = set(J)
            J_minus_I = sorted(sJ - sI)
            I_minus_J = sorted(sI - sJ)
            if a.degree != len(J_minus_I) or b.degree != len(I_minus_J):
                continue
            p = multiply(a, b)
            if not p:
                continue
            if shuffle_sign(J_minus_I, I_minus_J) < 0:
                p = -p
            K = tuple(sorted(sI & sJ))
            out[K] = out[K] + p if K in out else p
    return DLevelElement(A, x.level, out)


# -- slices ---------------------------------------------------------------


def level_basis(A: CDGA, n: int, weight: int) -> Tuple[Tuple[Subset, Monomial], ...]:
    keys = []
    for s in range(n + 1):
        for J in itertools.combinations(range(1, n + 1), s):
            for m in A.slice_basis(n - s, weight):
                keys.append((J, m))
    return tuple(keys)


def basis_element(A: CDGA, n: int, key: Tuple[Subset, Monomial]) -> DLevelElement:
    J, m = key
    return DLevelElement(A, n, {J: monomial_element(A.presentation, m)})


def dimension_formula(A: CDGA, n: int, weight: int) -> int:
    """sum_m C(n, m) dim A^m_w."""
    return sum(comb(n, m) * len(A.slice_basis(m, weight)) for m in range(n + 1))


class CosimplicialAlgebraView:
    """Lazy per-(level, weight) access to DA with operator matrices."""

    def __init__(self, A: CDGA):
        self.algebra = A
        self._basis: Dict[Tuple[int, int], Tuple] = {}

    def basis(self, n: int, weight: int):
        key = (n, weight)
        if key not in self._basis:
            self._basis[key] = level_basis(self.algebra, n, weight)
        return self._basis[key]

    def element(self, n: int, key) -> DLevelElement:
        return basis_element(self.algebra, n, key)

    def coordinates(self, x: DLevelElement, weight: int) -> List[Fraction]:
        pos = {k: i for i, k in enumerate(self.basis(x.level, weight))}
        v = [Fraction(0)] * len(pos)
        for k, c in x.weight_terms().items():
            v[pos[k]] += c
        return v

    def operator_matrix(self, op, n_src: int, n_tgt: int, weight: int) -> linalg.Matrix:
        src = self.basis(n_src, weight)
        tgt = self.basis(n_tgt, weight)
        cols = [self.coordinates(op(self.element(n_src, k)), weight) for k in src]
        return [[cols[j][i] for j in range(len(src))] for i in range(len(tgt))]

    def coface_matrix(self, i: int, n: int, weight: int) -> linalg.Matrix:
        return self.operator_matrix(lambda x: coface(i, x), n, n + 1, weight)

    def codegeneracy_matrix(self, i: int, n: int, weight: int) -> linalg.Matrix:
        return self.operator_matrix(lambda x: codegeneracy(i, x), n, n - 1, weight)


@dataclass
class NormalisedSlice:
    level: int
    weight: int
    basis: Tuple[Monomial, ...]
    kernel_dim: int
    kernel_is_normalised_part: bool
    differential: linalg.Matrix
    differential_target: Tuple[Monomial, ...]
    differential_lands_in_normalised: bool


def normalise(view: CosimplicialAlgebraView, n: int, weight: int) -> NormalisedSlice:
    """N(DA)^n = joint kernel of the codegeneracies, with differential sum (-1)^i d^i."""
    A = view.algebra
    basis = view.basis(n, weight)
    rows: linalg.Matrix = []
    for i in range(n):
        rows.extend(view.codegeneracy_matrix(i, n, weight))
    kernel = linalg.nullspace(rows, len(basis)) if rows else [
        [Fraction(int(a == b)) for b in range(len(basis))] for a in range(len(basis))
    ]
    plain = [idx for idx, (J, _) in enumerate(basis) if not J]
    units = [[Fraction(int(j == i)) for j in range(len(basis))] for i in plain]
    same = len(kernel) == len(plain) and linalg.span_rank(kernel + units, len(basis)) == len(plain)

    src = A.slice_basis(n, weight)
    tgt = A.slice_basis(n + 1, weight)
    tpos = {m: i for i, m in enumerate(tgt)}
    mat = linalg.zeros(len(tgt), len(src))
    lands = True
    for j, m in enumerate(src):
        x = embed_monomial(A, n, m)
        total = DLevelElement(A, n + 1)
        for i in range(n + 2):
            c = coface(i, x)
            total = total + (c if i % 2 == 0 else -c)
        for (J, mm), c in total.weight_terms().items():
            if J:
                lands = False
                continue
            mat[tpos[mm]][j] += c
    return NormalisedSlice(n, weight, src, len(kernel), same, mat, tgt, lands)


def embed_monomial(A: CDGA, n: int, m: Monomial) -> DLevelElement:
    return DLevelElement(A, n, {(): monomial_element(A.presentation, m)})


def augmentation(x: DLevelElement) -> Element:
    """Iterated s^0: D^n A -> A^0."""
    y = x
    while y.level > 0:
        y = codegeneracy(0, y)
    return y.terms.get((), y.algebra.presentation.zero())


def augmentation_nilpotency(A: CDGA, n: int, weight_bound: int) -> VerificationReport:
    """K^{n+1} = 0 under the shuffle product for K = ker(D^n A -> A^0).

    Spans of K^j are tracked per weight (<= weight_bound) by multiplying
    basis elements and row-reducing.
    """
    view = CosimplicialAlgebraView(A)
    kernel: Dict[int, List[DLevelElement]] = {}
    for w in range(weight_bound + 1):
        basis = view.basis(n, w)
        cols = [view.coordinates(DLevelElement(A, 0, {(): augmentation(view.element(n, k))}), w) for k in basis] if n else []
        if n == 0:
            kernel[w] = []
            continue
        target_dim = len(A.slice_basis(0, w))
        mat = [[cols[j][i] for j in range(len(basis))] for i in range(target_dim)]
        kernel[w] = [_from_coords(view, n, w, v) for v in linalg.nullspace(mat, len(basis))]
    power = dict(kernel)
    for step in range(2, n + 2):
        nxt: Dict[int, List[DLevelElement]] = {}
        for w1, xs in power.items():
            for w2, ys in kernel.items():
                w = w1 + w2
                if w > weight_bound:
                    continue
                for x in xs:
                    for y in ys:
                        p = shuffle(x, y)
                        if p:
                            nxt.setdefault(w, []).append(p)
        power = {w: _reduce_span(view, n, w, ps) for w, ps in nxt.items()}
        power = {w: ps for w, ps in power.items() if ps}
        if step == n + 1 and power:
            w, ps = next(iter(sorted(power.items())))
            return VerificationReport(
                "augmentation_nilpotency",
                Verdict.FAIL,
                f"K^{n + 1} != 0 at weight {w}",
                witness={"weight": w, "element": format_dlevel(ps[0])},
            )
    dims = {w: len(v) for w, v in kernel.items()}
    return VerificationReport(
        "augmentation_nilpotency",
        Verdict.PASS,
        f"K^{n + 1} = 0 on weights <= {weight_bound}",
        witness={"level": n, "kernel_dims": dims},
    )


def _from_coords(view: CosimplicialAlgebraView, n: int, w: int, v: Sequence[Fraction]) -> DLevelElement:
    A = view.algebra
    out = DLevelElement(A, n)
    for (J, m), c in zip(view.basis(n, w), v):
        if c:
            out = out + DLevelElement(A, n, {J: monomial_element(A.presentation, m, c)})
    return out


def _reduce_span(view: CosimplicialAlgebraView, n: int, w: int, xs: List[DLevelElement]) -> List[DLevelElement]:
    if not xs:
        return []
    rows = [view.coordinates(x, w) for x in xs]
    red, _ = linalg.rref(rows, len(rows[0]))
    return [_from_coords(view, n, w, r) for r in red]


# -- verification -----------------------------------------------------------


def check_cosimplicial_identities(A: CDGA, max_level: int, weights: Iterable[int]) -> VerificationReport:
    """The cosimplicial identities on every basis element of D^n A, n <= max_level.

    cofaces: d^j d^i = d^i d^{j-1} for i < j;
    codegeneracies: s^j s^i = s^i s^{j+1} for i <= j;
    mixed: s^j d^i = d^i s^{j-1} (i < j), id (i = j, j + 1), d^{i-1} s^j (i > j + 1).
    """
    checked = 0
    for w in weights:
        for n in range(max_level + 1):
            for key in level_basis(A, n, w):
                x = basis_element(A, n, key)
                for j in range(n + 2):
                    for i in range(j):
                        lhs, rhs = coface(j, coface(i, x)), coface(i, coface(j - 1, x))
                        checked += 1
                        if lhs != rhs:
                            return _identity_failure("cofaces", f"d^{j} d^{i}", x, lhs, rhs)
                for j in range(n - 1):
                    for i in range(j + 1):
                        lhs, rhs = codegeneracy(j, codegeneracy(i, x)), codegeneracy(i, codegeneracy(j + 1, x))
                        checked += 1
                        if lhs != rhs:
                            return _identity_failure("codegeneracies", f"s^{j} s^{i}", x, lhs, rhs)
                for j in range(n + 1):
                    for i in range(n + 2):
                        lhs = codegeneracy(j, coface(i, x))
                        if i < j:
                            rhs = coface(i, codegeneracy(j - 1, x))
                        elif i in (j, j + 1):
                            rhs = x
                        else:
                            rhs = coface(i - 1, codegeneracy(j, x))
                        checked += 1
                        if lhs != rhs:
                            return _identity_failure("mixed", f"s^{j} d^{i}", x, lhs, rhs)
    return VerificationReport(
        "cosimplicial_identities",
        Verdict.PASS,
        f"cosimplicial identities hold on all basis elements up to level {max_level}",
        witness={"checked": checked},
    )


def _identity_failure(which: str, word: str, x, lhs, rhs) -> VerificationReport:
    return VerificationReport(
        "cosimplicial_identities",
        Verdict.FAIL,
        f"identity {which} fails for {word}",
        witness={"identity": which, "element": format_dlevel(x), "lhs": format_dlevel(lhs), "rhs": format_dlevel(rhs)},
    )


def normalisation_roundtrip(A: CDGA, max_level: int, weights: Iterable[int]) -> VerificationReport:
    """N(DA) = A: the normalised part is the J = {} copy and carries d_A."""
    from .cdga import slice_matrix

    view = CosimplicialAlgebraView(A)
    slices = 0
    for w in weights:
        for n in range(max_level + 1):
            ns = normalise(view, n, w)
            _, _, expected = slice_matrix(A, n, w)
            problem = None
            if not ns.kernel_is_normalised_part:
                problem = "joint kernel of the codegeneracies is not the J = {} copy"
            elif not ns.differential_lands_in_normalised:
                problem = "alternating coface sum leaves the normalised part"
            elif ns.basis != A.slice_basis(n, w):
                problem = "normalised basis differs"
            elif ns.differential != expected:
                problem = "normalised differential differs from d_A"
            if problem:
                return VerificationReport(
                    "normalisation_roundtrip", Verdict.FAIL, problem, witness={"level": n, "weight": w}
                )
            slices += 1
    return VerificationReport(
        "normalisation_roundtrip",
        Verdict.PASS,
        f"N(DA) = A on {slices} slices",
        witness={"slices": slices},
    )
