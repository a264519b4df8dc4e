"""CDGAs, free dg-modules over them, slice cohomology and Kähler differentials."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import (
    Element,
    Monomial,
    Presentation,
    format_element,
    monomial_element,
    multiply,
)
from .errors import MixedPresentation, NonHomogeneousDifferential, ValidationError
from .report import Verdict, VerificationReport

SliceKey = object


class CDGA:
    """A free graded-commutative algebra with a derivation given on generators.

    ``base`` optionally names a sub-CDGA ``A`` (same generator specs, same
    differential) so that relative constructions such as Omega^1_{B/A} know
    which generators to treat as scalars.
    """

    def __init__(
        self,
        presentation: Presentation,
        differential: Optional[Mapping[str, Union[Element, str, int]]] = None,
        base: Optional["CDGA"] = None,
    ):
        self.presentation = P = presentation
        diff: Dict[str, Element] = {}
        differential = dict(differential or {})
        unknown = set(differential) - set(P.names)
        if unknown:
            raise ValidationError(f"differential given on unknown generators {sorted(unknown)}")
        for g in P.generators:
            img = differential.get(g.name, 0)
            if not isinstance(img, Element):
                img = P.parse(img) if isinstance(img, str) else P.scalar(img)
            elif img.presentation != P:
                raise MixedPresentation(f"differential of {g.name} lives over another presentation")
            for d, w in img.bidegrees():
                if d != g.degree + 1 or w != g.weight:
                    raise NonHomogeneousDifferential(
                        f"d({g.name}) must have degree {g.degree + 1} and weight {g.weight}; "
                        f"found a term of degree {d}, weight {w}"
                    )
            diff[g.name] = img
        self.differential = diff
        self.base = base
        if base is not None:
            for g in base.presentation.generators:
                if P.index.get(g.name) is None or P.spec(g.name) != g:
                    raise ValidationError(f"base generator {g.name} is not a generator of the algebra")
                if base.differential[g.name].transport(P) != diff[g.name]:
                    raise ValidationError(f"differential of base generator {g.name} disagrees with the base")
        self._dmono: Dict[Monomial, Element] = {}

    def __repr__(self):
        body = ", ".join(f"d{n}={format_element(e)}" for n, e in self.differential.items() if e)
        return f"CDGA({self.presentation!r}; {body})"

    def __eq__(self, other):
        return (
            isinstance(other, CDGA)
            and self.presentation == other.presentation
            and self.differential == other.differential
        )

    def __hash__(self):
        return hash((self.presentation, tuple(sorted((k, hash(v)) for k, v in self.differential.items()))))

    @classmethod
    def build(cls, generators: Sequence[tuple], differential: Mapping[str, str] = (), base=None) -> "CDGA":
        """Shorthand: ``CDGA.build([("x", 0, 1), ("dx", 1, 1)], {"x": "dx"})``."""
        return cls(Presentation.from_tuples(*generators), dict(differential), base=base)

    # ------------------------------------------------------------------
    def gen(self, name: str) -> Element:
        return self.presentation.gen(name)

    def parse(self, text: str) -> Element:
        return self.presentation.parse(text)

    def zero(self) -> Element:
        return self.presentation.zero()

    def one(self) -> Element:
        return self.presentation.one()

    def d(self, e: Element) -> Element:
        return extend_differential(self, e)

    @property
    def base_names(self) -> List[str]:
        return self.base.presentation.names if self.base is not None else []

    def degree_zero_ring(self) -> "CDGA":
        """B^0 as a CDGA concentrated in degree 0 (zero differential)."""
        return CDGA(self.presentation.degree_zero())

    # -- slices -------------------------------------------------------
    def slice_basis(self, degree: int, weight: int) -> Tuple[Monomial, ...]:
        return self.presentation.slice_basis(degree, weight)

    def apply_to_basis(self, key: Monomial) -> Dict[Monomial, Fraction]:
        return dict(self._d_monomial(key).terms)

    def _d_monomial(self, m: Monomial) -> Element:
        hit = self._dmono.get(m)
        if hit is not None:
            return hit
        P = self.presentation
        out = P.zero()
        gens = P.generators
        for i, a in enumerate(m):
            if not a:
                continue
            g = gens[i]
            dg = self.differential[g.name]
            if not dg:
                continue
            prefix = tuple(x if j < i else 0 for j, x in enumerate(m))
            suffix = tuple(x if j > i else 0 for j, x in enumerate(m))
            power = tuple(a - 1 if j == i else 0 for j in range(len(m)))
            piece = multiply(monomial_element(P, power, a if not g.odd else 1), dg)
            term = multiply(multiply(monomial_element(P, prefix), piece), monomial_element(P, suffix))
            if P.degree_of(prefix) % 2:
                term = -term
            out = out + term
        self._dmono[m] = out
        return out


def extend_differential(A: CDGA, e: Element) -> Element:
    """The unique Q-linear derivation extending the generator differential."""
    if e.presentation != A.presentation:
        raise MixedPresentation("element does not belong to this CDGA")
    out = A.presentation.zero()
    for m, c in e.terms.items():
        dm = A._d_monomial(m)
        if dm:
            out = out + dm.scale(c)
    return out


def check_d_squared(A: CDGA) -> VerificationReport:
    """d^2 = 0 on every generator; enough because d^2 = (1/2)[d, d] is a derivation."""
    for g in A.presentation.generators:
        dd = A.d(A.differential[g.name])
        if dd:
            return VerificationReport(
                "d_squared",
                Verdict.FAIL,
                f"d(d({g.name})) != 0",
                witness={"generator": g.name, "d_squared": format_element(dd)},
                payload=dd,
            )
    return VerificationReport(
        "d_squared", Verdict.PASS, "d^2 vanishes on all generators (d^2 is a derivation)"
    )


# ----------------------------------------------------------------------
# free dg-modules
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BasisSpec:
    name: str
    degree: int
    weight: int = 0


ModuleVector = Dict[int, Element]


class FreeDGModule:
    """A finite-rank free module ``(+)_j B m_j`` with ``d m_j = sum_i D[i][j] m_i``.

    Coefficients always sit on the left, and
    ``d(b m) = (db) m + (-1)^{|b|} b (dm)``.
    """

    def __init__(
        self,
        over: CDGA,
        basis: Sequence[Union[BasisSpec, tuple]],
        differential: Optional[Sequence[Sequence[Union[Element, str, int]]]] = None,
    ):
        self.over = over
        P = over.presentation
        self.basis: Tuple[BasisSpec, ...] = tuple(b if isinstance(b, BasisSpec) else BasisSpec(*b) for b in basis)
        names = [b.name for b in self.basis]
        if len(set(names)) != len(names):
            raise ValidationError("module basis names must be unique")
        r = len(self.basis)
        if differential is None:
            differential = [[0] * r for _ in range(r)]
        if len(differential) != r or any(len(row) != r for row in differential):
            raise ValidationError(f"module differential must be a {r}x{r} matrix")
        D: List[List[Element]] = []
        for i, row in enumerate(differential):
            out_row = []
            for j, x in enumerate(row):
                if not isinstance(x, Element):
                    x = P.parse(x) if isinstance(x, str) else P.scalar(x)
                elif x.presentation != P:
                    raise MixedPresentation("module differential entry over another presentation")
                want_d = self.basis[j].degree + 1 - self.basis[i].degree
                want_w = self.basis[j].weight - self.basis[i].weight
                for d, w in x.bidegrees():
                    if d != want_d or w != want_w:
                        raise NonHomogeneousDifferential(
                            f"entry ({self.basis[i].name}, {self.basis[j].name}) must have degree "
                            f"{want_d} and weight {want_w}; found ({d}, {w})"
                        )
                out_row.append(x)
            D.append(out_row)
        self.differential = D
        self._index = {n: i for i, n in enumerate(names)}

    def __repr__(self):
        return f"FreeDGModule(rank={self.rank}, basis={[b.name for b in self.basis]})"

    @property
    def rank(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        return self._index[name]

    def basis_vector(self, name: str, coeff: Optional[Element] = None) -> ModuleVector:
        P = self.over.presentation
        return {self._index[name]: coeff if coeff is not None else P.one()}

    def d_basis(self, j: int) -> ModuleVector:
        return {i: row[j] for i, row in enumerate(self.differential) if row[j]}

    def apply(self, v: Mapping[int, Element]) -> ModuleVector:
        """Module differential on a vector of left coefficients."""
        out: Dict[int, Element] = {}
        P = self.over.presentation
        for j, b in v.items():
            if not b:
                continue
            db = self.over.d(b)
            if db:
                out[j] = out.get(j, P.zero()) + db
            # (-1)^{|b|} b (d m_j), split b by parity
            even = {m: c for m, c in b.terms.items() if P.degree_of(m) % 2 == 0}
            odd = {m: c for m, c in b.terms.items() if P.degree_of(m) % 2 == 1}
            signed = Element(P, even) - Element(P, odd)
            for i, coeff in self.d_basis(j).items():
                out[i] = out.get(i, P.zero()) + multiply(signed, coeff)
        return {i: e for i, e in out.items() if e}

    def slice_basis(self, degree: int, weight: int) -> Tuple[Tuple[int, Monomial], ...]:
        P = self.over.presentation
        keys = []
        for j, b in enumerate(self.basis):
            for m in P.slice_basis(degree - b.degree, weight - b.weight):
                keys.append((j, m))
        return tuple(keys)

    def apply_to_basis(self, key: Tuple[int, Monomial]) -> Dict[Tuple[int, Monomial], Fraction]:
        j, m = key
        out: Dict[Tuple[int, Monomial], Fraction] = {}
        for i, e in self.apply({j: monomial_element(self.over.presentation, m)}).items():
            for mm, c in e.terms.items():
                out[(i, mm)] = c
        return out

    def vector_to_keys(self, v: Mapping[int, Element]) -> Dict[Tuple[int, Monomial], Fraction]:
        return {(i, m): c for i, e in v.items() for m, c in e.terms.items()}

    def keys_to_vector(self, coords: Mapping[Tuple[int, Monomial], Fraction]) -> ModuleVector:
        P = self.over.presentation
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for (i, m), c in coords.items():
            if c:
                out.setdefault(i, {})[m] = c
        return {i: Element(P, t) for i, t in out.items()}

    def format_vector(self, v: Mapping[int, Element]) -> str:
        parts = [f"({format_element(e)})*{self.basis[i].name}" for i, e in sorted(v.items()) if e]
        return " + ".join(parts) if parts else "0"

    def differential_strings(self) -> List[List[str]]:
        return [[format_element(x) for x in row] for row in self.differential]


def check_module_d_squared(M: FreeDGModule) -> VerificationReport:
    """d^2 = 0 on the basis; d^2 is B-linear once d_B^2 = 0, so this suffices."""
    for j, b in enumerate(M.basis):
        dd = M.apply(M.d_basis(j))
        if dd:
            return VerificationReport(
                "module_d_squared",
                Verdict.FAIL,
                f"d(d({b.name})) != 0",
                witness={"basis": b.name, "d_squared": M.format_vector(dd)},
                payload=dd,
            )
    return VerificationReport("module_d_squared", Verdict.PASS, "d^2 vanishes on the basis")


# ----------------------------------------------------------------------
# slice linear algebra (works for any object exposing slice_basis/apply_to_basis)
# ----------------------------------------------------------------------


def slice_matrix(obj, degree: int, weight: int):
    """Source keys, target keys and the exact matrix of d: slice(n, w) -> slice(n+1, w)."""
    src = obj.slice_basis(degree, weight)
    tgt = obj.slice_basis(degree + 1, weight)
    pos = {k: i for i, k in enumerate(tgt)}
    mat = linalg.zeros(len(tgt), len(src))
    for j, k in enumerate(src):
        for kk, c in obj.apply_to_basis(k).items():
            try:
                mat[pos[kk]][j] += c
            except KeyError:
                raise NonHomogeneousDifferential(f"differential of {k} leaves the ({degree + 1}, {weight}) slice")
    return src, tgt, mat


def cohomology_dim(obj, degree: int, weight: int) -> int:
    """dim ker(d on slice (n, w)) - rank(d into slice (n, w))."""
    src, tgt, out_mat = slice_matrix(obj, degree, weight)
    _, _, in_mat = slice_matrix(obj, degree - 1, weight)
    return len(src) - linalg.rank(out_mat, len(src)) - linalg.rank(in_mat, len(obj.slice_basis(degree - 1, weight)))


def cohomology_dims(obj, degrees: Iterable[int], weights: Iterable[int]) -> Dict[int, Dict[int, int]]:
    """``{degree: {weight: dim}}`` over the given ranges."""
    weights = list(weights)
    return {n: {w: cohomology_dim(obj, n, w) for w in weights} for n in degrees}


def cohomology_witness(obj, degree: int, weight: int) -> Optional[Dict]:
    """Coordinates of a cocycle that is not a coboundary, or None if H = 0."""
    src, tgt, out_mat = slice_matrix(obj, degree, weight)
    prev, _, in_mat = slice_matrix(obj, degree - 1, weight)
    kernel = linalg.nullspace(out_mat, len(src))
    images = linalg.transpose(in_mat, len(prev)) if prev else []
    base = linalg.span_rank(images, len(src))
    for v in kernel:
        if linalg.span_rank(images + [v], len(src)) > base:
            return {k: c for k, c in zip(src, v) if c}
    return None


def is_coboundary(obj, degree: int, weight: int, coords: Mapping) -> bool:
    prev, tgt, in_mat = slice_matrix(obj, degree - 1, weight)
    pos = {k: i for i, k in enumerate(tgt)}
    v = [Fraction(0)] * len(tgt)
    for k, c in coords.items():
        v[pos[k]] = Fraction(c)
    return linalg.solve(in_mat, v, len(prev)) is not None


def is_cocycle(obj, degree: int, weight: int, coords: Mapping) -> bool:
    src, tgt, out_mat = slice_matrix(obj, degree, weight)
    pos = {k: i for i, k in enumerate(src)}
    v = [Fraction(0)] * len(src)
    for k, c in coords.items():
        v[pos[k]] = Fraction(c)
    return not any(linalg.matvec(out_mat, v))


# ----------------------------------------------------------------------
# Kähler differentials
# ----------------------------------------------------------------------


def kahler_d(B: CDGA, e: Element, base_names: Iterable[str] = ()) -> Dict[str, Element]:
    """Universal derivation d: B -> Omega^1, as ``{generator: coefficient of d(generator)}``.

    ``d`` has cochain degree 0, so ``d(bc) = (-1)^{|b||c|} c db + b dc``
    with coefficients written on the left; d vanishes on ``base_names``.
    """
    P = B.presentation
    skip = set(base_names)
    out: Dict[str, Element] = {}
    for m, c in e.terms.items():
        for i, a in enumerate(m):
            if not a:
                continue
            g = P.generators[i]
            if g.name in skip:
                continue
            rest = tuple(x - 1 if j == i else x for j, x in enumerate(m))
            coeff = Fraction(c) * (a if not g.odd else 1)
            suffix_deg = sum(x * P.generators[j].degree for j, x in enumerate(m) if j > i)
            if (g.degree * suffix_deg) % 2:
                coeff = -coeff
            term = monomial_element(P, rest, coeff)
            out[g.name] = out.get(g.name, P.zero()) + term
    return {k: v for k, v in out.items() if v}


def kahler(B: CDGA, base_names: Optional[Iterable[str]] = None) -> FreeDGModule:
    """Omega^1_{B/A} on symbols ``d(g)`` for generators g of B outside A.

    ``d(g)`` has the degree and weight of g, and the module differential is
    ``d_Omega(dg) = d(d_B g)``, which makes ``d_Omega d = d d_B``.
    """
    if base_names is None:
        base_names = B.base_names
    base = set(base_names)
    gens = [g for g in B.presentation.generators if g.name not in base]
    basis = [BasisSpec(f"d({g.name})", g.degree, g.weight) for g in gens]
    pos = {g.name: i for i, g in enumerate(gens)}
    P = B.presentation
    r = len(gens)
    D = [[P.zero() for _ in range(r)] for _ in range(r)]
    for j, g in enumerate(gens):
        for name, coeff in kahler_d(B, B.differential[g.name], base).items():
            D[pos[name]][j] = coeff
    return FreeDGModule(B, basis, D)


def augment_to_degree_zero(e: Element, target: Presentation) -> Element:
    """Image under B -> B^0 killing every monomial with a positive-degree factor."""
    P = e.presentation
    keep = {m: c for m, c in e.terms.items() if all(not x or P.generators[i].degree == 0 for i, x in enumerate(m))}
    return Element(P, keep).transport(target)


def base_change_degree0(M: FreeDGModule) -> FreeDGModule:
    """M (x)_B B^0 along the graded augmentation; a complex of free B^0-modules."""
    R0 = M.over.degree_zero_ring()
    T = R0.presentation
    D = [[augment_to_degree_zero(x, T) for x in row] for row in M.differential]
    return FreeDGModule(R0, M.basis, D)


# ----------------------------------------------------------------------
# morphisms
# ----------------------------------------------------------------------


class MorphismPresentation:
    """A CDGA map A -> B given by generator images.

    Generators of A without an explicit image go to the generator of B
    with the same name.
    """

    def __init__(self, source: CDGA, target: CDGA, images: Optional[Mapping[str, Union[Element, str]]] = None):
        from .algebra import Truth, is_unit

        self.source = source
        self.target = target
        images = dict(images or {})
        P, Q = source.presentation, target.presentation
        unknown = set(images) - set(P.names)
        if unknown:
            raise ValidationError(f"images given for unknown generators {sorted(unknown)}")
        imgs: Dict[str, Element] = {}
        for g in P.generators:
            img = images.get(g.name)
            if img is None:
                if g.name not in Q.index:
                    raise ValidationError(f"no image for generator {g.name}")
                img = Q.gen(g.name)
            elif not isinstance(img, Element):
                img = Q.parse(img) if isinstance(img, str) else Q.scalar(img)
            elif img.presentation != Q:
                raise MixedPresentation(f"image of {g.name} is not over the target")
            for d, w in img.bidegrees():
                if d != g.degree or w != g.weight:
                    raise ValidationError(
                        f"image of {g.name} must have degree {g.degree} and weight {g.weight}; found ({d}, {w})"
                    )
            if g.invertible and is_unit(img) is not Truth.YES:
                raise ValidationError(f"inverted generator {g.name} must map to a unit")
            imgs[g.name] = img
        self.images = imgs

    def apply(self, e: Element) -> Element:
        from .algebra import apply_homomorphism

        return apply_homomorphism(e, self.images, self.target.presentation)

    def check_chain_map(self) -> VerificationReport:
        for name, img in self.images.items():
            lhs = self.target.d(img)
            rhs = self.apply(self.source.differential[name])
            if lhs != rhs:
                return VerificationReport(
                    "chain_map",
                    Verdict.FAIL,
                    f"d_B f({name}) != f(d_A {name})",
                    witness={"generator": name, "d_of_image": format_element(lhs), "image_of_d": format_element(rhs)},
                )
        return VerificationReport("chain_map", Verdict.PASS, "f commutes with d on generators")

    def generator_inclusion(self) -> Optional[Dict[str, str]]:
        """``{a: b}`` if every generator goes to a distinct generator, else None."""
        Q = self.target.presentation
        out: Dict[str, str] = {}
        for name, img in self.images.items():
            if len(img.terms) != 1:
                return None
            ((m, c),) = img.terms.items()
            if c != 1 or sum(abs(x) for x in m) != 1 or min(m) < 0:
                return None
            out[name] = Q.generators[m.index(1)].name
        if len(set(out.values())) != len(out):
            return None
        return out


def identity_morphism(A: CDGA) -> MorphismPresentation:
    return MorphismPresentation(A, A)


def ground_field() -> CDGA:
    return CDGA(Presentation([]))


def structure_map(B: CDGA) -> MorphismPresentation:
    """Q -> B."""
    return MorphismPresentation(ground_field(), B)
