"""Free graded-commutative algebras over Q with Koszul signs.

A :class:`Presentation` is an ordered list of generators, each with a
cochain degree, a weight and (in degree 0) an optional invertibility flag.
The algebra it presents is

    Q[x_1, ..., t_1^{+-1}, ...] (x) Sym(even positive-degree generators)
                                (x) Lambda(odd generators).

Monomials are exponent tuples aligned with the generator order.  A monomial
always denotes the product of its factors *in generator order*; the sign
produced by reordering odd factors is absorbed into the coefficient, so
two elements are equal exactly when their term dictionaries are equal.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InfiniteSlice, MixedPresentation, ParseError, PositiveDegreeInput, ValidationError

Monomial = Tuple[int, ...]
Scalar = Fraction
ScalarLike = Union[int, Fraction, str]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def as_scalar(c: ScalarLike) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool) or isinstance(c, float):
        raise TypeError(f"refusing inexact or boolean scalar {c!r}")
    return Fraction(c)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    weight: int = 0
    invertible: bool = False

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME_RE.match(self.name):
            raise ValidationError(f"generator name {self.name!r} is not an identifier")
        if self.degree < 0:
            raise ValidationError(f"generator {self.name}: cochain degree must be non-negative")
        if self.weight < 0:
            raise ValidationError(f"generator {self.name}: weight must be non-negative")
        if self.invertible and self.degree != 0:
            raise ValidationError(f"generator {self.name}: only degree-0 generators may be inverted")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class Truth(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Presentation:
    """Ordered generators of a free graded-commutative algebra."""

    def __init__(self, generators: Iterable[GeneratorSpec]):
        gens = tuple(generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"generator names must be unique; repeated: {dup}")
        self.generators: Tuple[GeneratorSpec, ...] = gens
        self.index: Dict[str, int] = {n: i for i, n in enumerate(names)}
        self.odd_indices = tuple(i for i, g in enumerate(gens) if g.odd)
        self._slice_cache: Dict[Tuple[int, int], Tuple[Monomial, ...]] = {}

    @classmethod
    def from_tuples(cls, *specs) -> "Presentation":
        """``Presentation.from_tuples(("x", 0, 1), ("xi", 1, 1))``."""
        return cls(GeneratorSpec(*s) for s in specs)

    def __eq__(self, other):
        return isinstance(other, Presentation) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        inner = ", ".join(
            f"{g.name}:{g.degree}/{g.weight}{'*' if g.invertible else ''}" for g in self.generators
        )
        return f"Presentation({inner})"

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.generators]

    def spec(self, name: str) -> GeneratorSpec:
        return self.generators[self.index[name]]

    @property
    def inverted(self) -> List[str]:
        return [g.name for g in self.generators if g.invertible]

    # -- constructors -------------------------------------------------
    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.scalar(1)

    def scalar(self, c: ScalarLike) -> "Element":
        return Element(self, {self.unit_monomial: as_scalar(c)})

    @property
    def unit_monomial(self) -> Monomial:
        return (0,) * len(self.generators)

    def gen(self, name: str) -> "Element":
        try:
            i = self.index[name]
        except KeyError:
            raise ValidationError(f"unknown generator {name!r}") from None
        m = [0] * len(self.generators)
        m[i] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def gens(self, *names: str) -> List["Element"]:
        return [self.gen(n) for n in names]

    def parse(self, text: str) -> "Element":
        return parse_element(self, text)

    # -- monomial bookkeeping -----------------------------------------
    def degree_of(self, m: Monomial) -> int:
        return sum(e * g.degree for e, g in zip(m, self.generators))

    def weight_of(self, m: Monomial) -> int:
        return sum(e * g.weight for e, g in zip(m, self.generators))

    def check_monomial(self, m: Monomial) -> None:
        for e, g in zip(m, self.generators):
            if e < 0 and not g.invertible:
                raise ValidationError(f"negative exponent on non-inverted generator {g.name}")
            if g.odd and e > 1:
                raise ValidationError(f"odd generator {g.name} with exponent {e}")

    def sub(self, names: Iterable[str]) -> "Presentation":
        """The presentation on a subset of generators, in this order."""
        keep = set(names)
        return Presentation(g for g in self.generators if g.name in keep)

    def degree_zero(self) -> "Presentation":
        return Presentation(g for g in self.generators if g.degree == 0)

    def positive_degree_names(self) -> List[str]:
        return [g.name for g in self.generators if g.degree > 0]

    # -- finite slices ------------------------------------------------
    def slice_basis(self, degree: int, weight: int) -> Tuple[Monomial, ...]:
        """All monomials of the given cochain degree and weight, sorted.

        Finite when every non-inverted degree-0 generator has positive
        weight and the only degree-0 generator of a Laurent presentation is
        its (positive-weight) inverted generator.  Otherwise raises
        :class:`InfiniteSlice`.
        """
        key = (degree, weight)
        hit = self._slice_cache.get(key)
        if hit is not None:
            return hit
        result = tuple(sorted(self._enumerate_slice(degree, weight)))
        self._slice_cache[key] = result
        return result

    def _enumerate_slice(self, degree: int, weight: int) -> Iterator[Monomial]:
        if degree < 0:
            return
        gens = self.generators
        positive = [i for i, g in enumerate(gens) if g.degree > 0]
        poly0 = [i for i, g in enumerate(gens) if g.degree == 0 and not g.invertible]
        inv = [i for i, g in enumerate(gens) if g.invertible]
        for i in poly0:
            if gens[i].weight == 0:
                raise InfiniteSlice(f"degree-0 generator {gens[i].name} has weight 0")
        if inv and (len(inv) > 1 or poly0 or gens[inv[0]].weight == 0):
            raise InfiniteSlice(
                "slices of a Laurent presentation are finite only when its single "
                "inverted generator has positive weight and is the only degree-0 generator"
            )
        n = len(gens)

        def tail(rem_w: int, exps: List[int]) -> Iterator[Monomial]:
            if inv:
                t = inv[0]
                wt = gens[t].weight
                if rem_w % wt == 0:
                    e = list(exps)
                    e[t] = rem_w // wt
                    yield tuple(e)
                return
            if rem_w < 0:
                return

            def dist(k: int, r: int, e: List[int]) -> Iterator[Monomial]:
                if k == len(poly0):
                    if r == 0:
                        yield tuple(e)
                    return
                i = poly0[k]
                w = gens[i].weight
                for a in range(r // w + 1):
                    e[i] = a
                    yield from dist(k + 1, r - a * w, e)
                e[i] = 0

            yield from dist(0, rem_w, list(exps))

        def rec(k: int, rem_d: int, rem_w: int, exps: List[int]) -> Iterator[Monomial]:
            if k == len(positive):
                if rem_d == 0:
                    yield from tail(rem_w, exps)
                return
            i = positive[k]
            g = gens[i]
            top = 1 if g.odd else rem_d // g.degree
            for a in range(min(top, rem_d // g.degree) + 1):
                exps[i] = a
                yield from rec(k + 1, rem_d - a * g.degree, rem_w - a * g.weight, exps)
            exps[i] = 0

        yield from rec(0, degree, weight, [0] * n)

    def has_finite_slices(self) -> bool:
        try:
            self.slice_basis(0, 0)
        except InfiniteSlice:
            return False
        return True

    def max_degree(self) -> Optional[int]:
        """Top cochain degree of the algebra, or None if unbounded."""
        if any(g.degree > 0 and not g.odd for g in self.generators):
            return None
        return sum(g.degree for g in self.generators if g.odd)


def _mono_product(P: Presentation, m1: Monomial, m2: Monomial) -> Optional[Tuple[int, Monomial]]:
    """Sign and canonical monomial of ``m1 * m2`` (None when an odd square appears)."""
    sign = 1
    odd = P.odd_indices
    if odd:
        inversions = 0
        for i in odd:
            if m2[i]:
                if m1[i]:
                    return None
                # m2's odd factor i must move left past m1's odd factors with index > i
                for j in odd:
                    if j > i and m1[j]:
                        inversions += 1
        if inversions & 1:
            sign = -1
    return sign, tuple(a + b for a, b in zip(m1, m2))


class Element:
    """A finite Q-linear combination of canonical monomials."""

    __slots__ = ("presentation", "terms")

    def __init__(self, presentation: Presentation, terms: Mapping[Monomial, ScalarLike] = ()):
        self.presentation = presentation
        clean = {}
        n = len(presentation.generators)
        for m, c in dict(terms).items():
            c = as_scalar(c)
            if c:
                m = tuple(m)
                if len(m) != n:
                    raise ValidationError(f"monomial {m} has {len(m)} exponents, expected {n}")
                if min(m, default=0) < 0 or any(m[i] > 1 for i in presentation.odd_indices):
                    presentation.check_monomial(m)
                clean[m] = c
        self.terms: Dict[Monomial, Fraction] = clean

    # -- basic protocol -------------------------------------------------
    def __repr__(self):
        return f"Element({format_element(self)!r})"

    def __str__(self):
        return format_element(self)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.presentation == other.presentation and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.presentation.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.presentation, frozenset(self.terms.items())))

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.presentation != self.presentation:
                raise MixedPresentation("elements belong to different presentations")
            return other
        if isinstance(other, (int, Fraction, str)) and not isinstance(other, bool):
            return self.presentation.scalar(other)
        raise TypeError(f"cannot combine Element with {type(other).__name__}")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Element(self.presentation, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.presentation, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: ScalarLike) -> "Element":
        c = as_scalar(c)
        return Element(self.presentation, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return multiply(self._coerce(other), self)

    def __pow__(self, k: int):
        if k < 0:
            return unit_inverse(self) ** (-k)
        out = self.presentation.one()
        for _ in range(k):
            out = out * self
        return out

    # -- grading --------------------------------------------------------
    def bidegrees(self) -> set:
        P = self.presentation
        return {(P.degree_of(m), P.weight_of(m)) for m in self.terms}

    @property
    def degree(self) -> Optional[int]:
        """Cochain degree when homogeneous in degree (None for 0 or mixed)."""
        ds = {self.presentation.degree_of(m) for m in self.terms}
        return ds.pop() if len(ds) == 1 else None

    @property
    def weight(self) -> Optional[int]:
        ws = {self.presentation.weight_of(m) for m in self.terms}
        return ws.pop() if len(ws) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    def homogeneous_part(self, degree: int, weight: Optional[int] = None) -> "Element":
        return homogeneous_part(self, degree, weight)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient(self.presentation.unit_monomial)

    def monomials(self) -> List[Monomial]:
        return sorted(self.terms)

    def transport(self, target: Presentation) -> "Element":
        """Re-express over another presentation containing the same generators."""
        src = self.presentation
        if src == target:
            return self
        for i, g in enumerate(src.generators):
            j = target.index.get(g.name)
            if j is None or target.generators[j] != g:
                if any(m[i] for m in self.terms):
                    raise MixedPresentation(f"generator {g.name} has no counterpart in target")
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for mm, cc in _monomial_in_order(target, src, m).terms.items():
                out[mm] = out.get(mm, 0) + c * cc
        return Element(target, out)


def _monomial_in_order(target: Presentation, src: Presentation, m: Monomial) -> Element:
    acc = target.one()
    for i, e in enumerate(m):
        if e:
            g = target.gen(src.generators[i].name)
            acc = acc * (g ** e if e > 0 else unit_inverse(g) ** (-e))
    return acc


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product with Koszul signs."""
    if not isinstance(a, Element) or not isinstance(b, Element):
        raise TypeError("multiply expects Elements")
    if a.presentation != b.presentation:
        raise MixedPresentation("elements belong to different presentations")
    P = a.presentation
    out: Dict[Monomial, Fraction] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            r = _mono_product(P, m1, m2)
            if r is None:
                continue
            s, m = r
            out[m] = out.get(m, 0) + (c1 * c2 if s > 0 else -c1 * c2)
    return Element(P, out)


def homogeneous_part(e: Element, degree: int, weight: Optional[int] = None) -> Element:
    """Sub-sum of monomials of the given degree (and weight, if given)."""
    P = e.presentation
    return Element(
        P,
        {
            m: c
            for m, c in e.terms.items()
            if P.degree_of(m) == degree and (weight is None or P.weight_of(m) == weight)
        },
    )


def is_unit(e: Element) -> Truth:
    """Decide invertibility of a degree-0 element.

    Degree-0 parts here are Q[x_1..x_k][t_1^{+-1}..t_l^{+-1}], whose units are
    exactly c * t^a with c a nonzero rational, so the answer is never UNKNOWN
    for these presentations.
    """
    P = e.presentation
    for m in e.terms:
        if P.degree_of(m) != 0:
            raise PositiveDegreeInput("is_unit expects a degree-0 element")
    if len(e.terms) != 1:
        return Truth.NO
    (m,) = e.terms
    for x, g in zip(m, P.generators):
        if x and not g.invertible:
            return Truth.NO
    return Truth.YES


def unit_inverse(e: Element) -> Element:
    if is_unit(e) is not Truth.YES:
        raise ValidationError(f"{format_element(e)} is not a unit")
    ((m, c),) = e.terms.items()
    return Element(e.presentation, {tuple(-x for x in m): 1 / c})


def monomial_element(P: Presentation, m: Monomial, c: ScalarLike = 1) -> Element:
    return Element(P, {tuple(m): as_scalar(c)})


def apply_homomorphism(e: Element, images: Mapping[str, Element], target: Presentation) -> Element:
    """Image of ``e`` under the algebra map sending each generator to ``images[name]``."""
    P = e.presentation
    out = target.zero()
    cache: Dict[Tuple[str, int], Element] = {}
    for m, c in e.terms.items():
        acc = target.scalar(c)
        for i, x in enumerate(m):
            if not x:
                continue
            name = P.generators[i].name
            key = (name, x)
            if key not in cache:
                img = images[name]
                cache[key] = img ** x if x > 0 else unit_inverse(img) ** (-x)
            acc = acc * cache[key]
        out = out + acc
    return out


def partial_derivative(e: Element, name: str) -> Element:
    """d/d(name) for an even generator; chain rule on Laurent exponents."""
    P = e.presentation
    i = P.index[name]
    if P.generators[i].odd:
        raise ValidationError("partial_derivative is defined for even generators only")
    out: Dict[Monomial, Fraction] = {}
    for m, c in e.terms.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + c * m[i]
    return Element(P, out)


# ----------------------------------------------------------------------
# text format:  "3/2 * x^2 * e1v - t^-1 * dt + 4"
# ----------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, P: Presentation, text: str):
        self.P = P
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.peek()[2] if pos is None else pos, self.text)

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2], self.text)

    def parse(self) -> Element:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Element:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term().scale(sign)
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                nxt = self.term()
                acc = acc + nxt if t[1] == "+" else acc - nxt
            else:
                return acc

    def term(self) -> Element:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Element:
        t = self.take()
        if t[0] == "num":
            num = int(t[1])
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "num":
                    raise ParseError("expected denominator", d[2], self.text)
                if int(d[1]) == 0:
                    raise ParseError("zero denominator", d[2], self.text)
                return self.P.scalar(Fraction(num, int(d[1])))
            return self.P.scalar(num)
        if t[0] == "name":
            if t[1] not in self.P.index:
                raise ParseError(f"unknown generator {t[1]!r}", t[2], self.text)
            base = self.P.gen(t[1])
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                self.take()
                neg = False
                if self.peek()[0] == "op" and self.peek()[1] == "-":
                    self.take()
                    neg = True
                k = self.take()
                if k[0] != "num":
                    raise ParseError("expected integer exponent", k[2], self.text)
                n = int(k[1])
                if neg:
                    if not self.P.spec(t[1]).invertible:
                        raise ParseError(f"negative power of non-inverted {t[1]!r}", k[2], self.text)
                    return unit_inverse(base) ** n
                return base ** n
            return base
        if t[0] == "op" and t[1] in "+-":
            inner = self.factor()
            return -inner if t[1] == "-" else inner
        if t[0] == "op" and t[1] == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected {t[1]!r}" if t[1] else "unexpected end of input", t[2], self.text)


def parse_element(P: Presentation, text: str) -> Element:
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            return P.scalar(text)
        raise ParseError(f"expected an element string, got {type(text).__name__}")
    return _Parser(P, text).parse()


def _fmt_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(P: Presentation, m: Monomial) -> str:
    parts = []
    for e, g in zip(m, P.generators):
        if e == 1:
            parts.append(g.name)
        elif e:
            parts.append(f"{g.name}^{e}")
    return "*".join(parts)


def format_element(e: Element) -> str:
    if not e.terms:
        return "0"
    P = e.presentation
    chunks = []
    for m in sorted(e.terms, key=lambda m: (P.degree_of(m), P.weight_of(m), tuple(-x for x in m))):
        c = e.terms[m]
        body = format_monomial(P, m)
        mag = abs(c)
        if not body:
            txt = _fmt_scalar(mag)
        elif mag == 1:
            txt = body
        else:
            txt = f"{_fmt_scalar(mag)}*{body}"
        chunks.append(("-" if c < 0 else "+", txt))
    first_sign, first = chunks[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, txt in chunks[1:]:
        out += f" {s} {txt}"
    return out


def random_element(
    rng, P: Presentation, degree: int, weight: int, density: float = 0.6, coeff_range: int = 3
) -> Element:
    """Random element of a finite slice, integer coefficients in [-r, r]."""
    terms = {}
    for m in P.slice_basis(degree, weight):
        if rng.random() < density:
            terms[m] = rng.randint(-coeff_range, coeff_range)
    return Element(P, terms)


def all_monomials_up_to(P: Presentation, max_degree: int, max_weight: int) -> Iterator[Monomial]:
    for d, w in itertools.product(range(max_degree + 1), range(max_weight + 1)):
        yield from P.slice_basis(d, w)
