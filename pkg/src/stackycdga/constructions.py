"""Chevalley-Eilenberg algebras of [Y/g] and de Rham algebras of affines."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import (
    Element,
    GeneratorSpec,
    Presentation,
    ScalarLike,
    as_scalar,
    format_element,
    partial_derivative,
)
from .cdga import CDGA, check_d_squared
from .errors import InvalidAction, InvalidLie, ValidationError
from .report import Verdict, VerificationReport, combine

LieVector = Dict[int, Fraction]


@dataclass(frozen=True)
class AffineData:
    """O(Y) as a localized polynomial ring: every generator in degree 0."""

    presentation: Presentation

    def __post_init__(self):
        for g in self.presentation.generators:
            if g.degree != 0:
                raise ValidationError(f"affine generator {g.name} must have degree 0, got {g.degree}")

    @classmethod
    def build(cls, *specs) -> "AffineData":
        """``AffineData.build(("x", 0, 1), ("t", 0, 1, True))``; degrees may be omitted."""
        gens = []
        for s in specs:
            if isinstance(s, GeneratorSpec):
                gens.append(s)
            elif isinstance(s, str):
                gens.append(GeneratorSpec(s, 0, 1))
            else:
                gens.append(GeneratorSpec(*s))
        return cls(Presentation(gens))

    @classmethod
    def point(cls) -> "AffineData":
        return cls(Presentation([]))

    @classmethod
    def affine_space(cls, k: int, prefix: str = "x", weight: int = 1) -> "AffineData":
        names = [prefix] if k == 1 else [f"{prefix}{i + 1}" for i in range(k)]
        return cls(Presentation([GeneratorSpec(n, 0, weight) for n in names]))

    @classmethod
    def gm(cls, name: str = "t", weight: int = 1) -> "AffineData":
        return cls(Presentation([GeneratorSpec(name, 0, weight, invertible=True)]))

    @property
    def names(self) -> List[str]:
        return self.presentation.names

    def ring(self) -> CDGA:
        return CDGA(self.presentation)


class LieAlgebraData:
    """A free finite-rank Lie algebra over Q.

    ``constants[(i, j)]`` for ``i < j`` is the sparse vector of
    ``[e_i, e_j]`` in the basis.
    """

    def __init__(self, basis: Sequence[str], constants: Optional[Mapping] = None):
        self.basis: Tuple[str, ...] = tuple(basis)
        if len(set(self.basis)) != len(self.basis):
            raise ValidationError("Lie basis names must be unique")
        self.index = {b: i for i, b in enumerate(self.basis)}
        table: Dict[Tuple[int, int], LieVector] = {}
        for key, val in dict(constants or {}).items():
            if len(key) == 3:
                i, j, k = (self._idx(x) for x in key)
                vec = {k: as_scalar(val)}
            else:
                i, j = (self._idx(x) for x in key)
                vec = {self._idx(k): as_scalar(c) for k, c in dict(val).items()}
            if i == j:
                raise ValidationError("[e_i, e_i] = 0 is forced; do not list it")
            if i > j:
                i, j = j, i
                vec = {k: -c for k, c in vec.items()}
            acc = table.setdefault((i, j), {})
            for k, c in vec.items():
                acc[k] = acc.get(k, Fraction(0)) + c
        self.constants = {ij: {k: c for k, c in v.items() if c} for ij, v in table.items()}
        self.constants = {ij: v for ij, v in self.constants.items() if v}

    def _idx(self, x) -> int:
        if isinstance(x, int):
            if not 0 <= x < len(self.basis):
                raise ValidationError(f"Lie basis index {x} out of range")
            return x
        if x not in self.index:
            raise ValidationError(f"unknown Lie basis element {x!r}")
        return self.index[x]

    @classmethod
    def from_brackets(cls, basis: Sequence[str], brackets: Mapping[Tuple[str, str], Mapping[str, ScalarLike]]):
        """``from_brackets(["h","e","f"], {("h","e"): {"e": 2}, ...})``."""
        return cls(basis, brackets)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"LieAlgebraData({list(self.basis)}, {self.constants})"

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self.constants.get((i, j), {}).get(k, Fraction(0))
        return -self.constants.get((j, i), {}).get(k, Fraction(0))

    def bracket_basis(self, i: int, j: int) -> LieVector:
        if i == j:
            return {}
        if i < j:
            return dict(self.constants.get((i, j), {}))
        return {k: -c for k, c in self.constants.get((j, i), {}).items()}

    def bracket(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> LieVector:
        out: LieVector = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out.get(k, Fraction(0)) + a * b * c
        return {k: c for k, c in out.items() if c}

    def format_vector(self, v: Mapping[int, Fraction]) -> str:
        if not v:
            return "0"
        return " + ".join(f"{c}*{self.basis[k]}" for k, c in sorted(v.items()))


def abelian(k: int, prefix: str = "e") -> LieAlgebraData:
    names = [prefix] if k == 1 else [f"{prefix}{i + 1}" for i in range(k)]
    return LieAlgebraData(names, {})


def sl2() -> LieAlgebraData:
    return LieAlgebraData(
        ["h", "e", "f"],
        {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}},
    )


def gl(n: int) -> LieAlgebraData:
    """gl_n on the matrix units ``E<i><j>`` (1-based)."""
    names = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    idx = {(i, j): i * n + j for i in range(n) for j in range(n)}
    brackets: Dict[Tuple[str, str], Dict[str, int]] = {}
    units = list(idx)
    for a, (i, j) in enumerate(units):
        for (k, l) in units[a + 1:]:
            # [E_ij, E_kl] = delta_jk E_il - delta_li E_kj
            vec: Dict[str, int] = {}
            if j == k:
                vec[names[idx[(i, l)]]] = vec.get(names[idx[(i, l)]], 0) + 1
            if l == i:
                vec[names[idx[(k, j)]]] = vec.get(names[idx[(k, j)]], 0) - 1
            vec = {x: c for x, c in vec.items() if c}
            if vec:
                brackets[(names[idx[(i, j)]], names[idx[(k, l)]])] = vec
    return LieAlgebraData(names, brackets)


def check_jacobi(g: LieAlgebraData) -> VerificationReport:
    """Jacobi on all basis triples i < j < k (the identity is trilinear and alternating)."""
    n = g.dim
    for i, j, k in combinations(range(n), 3):
        total: LieVector = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            inner = g.bracket_basis(a, b)
            for x, val in g.bracket({**inner}, {c: Fraction(1)}).items():
                total[x] = total.get(x, Fraction(0)) + val
        total = {x: v for x, v in total.items() if v}
        if total:
            triple = [g.basis[i], g.basis[j], g.basis[k]]
            return VerificationReport(
                "jacobi",
                Verdict.FAIL,
                f"Jacobi identity fails on ({', '.join(triple)})",
                witness={"triple": triple, "jacobi_sum": g.format_vector(total)},
            )
    return VerificationReport("jacobi", Verdict.PASS, f"Jacobi identity holds on all triples of a {n}-dimensional algebra")


class ActionData:
    """Derivations of O(Y), one per Lie basis vector, given on generators.

    Generators that are omitted for a basis vector are sent to 0.
    """

    def __init__(self, affine: AffineData, lie: LieAlgebraData, fields: Mapping[str, Mapping[str, Union[Element, str, int]]]):
        self.affine = affine
        self.lie = lie
        P = affine.presentation
        unknown = set(fields) - set(lie.basis)
        if unknown:
            raise ValidationError(f"action given for unknown Lie basis elements {sorted(unknown)}")
        table: Dict[str, Dict[str, Element]] = {}
        for b in lie.basis:
            given = dict(fields.get(b, {}))
            extra = set(given) - set(P.names)
            if extra:
                raise ValidationError(f"action of {b} given on unknown generators {sorted(extra)}")
            row = {}
            for gname in P.names:
                v = given.get(gname, 0)
                if not isinstance(v, Element):
                    v = P.parse(v) if isinstance(v, str) else P.scalar(v)
                elif v.presentation != P:
                    raise ValidationError(f"action of {b} on {gname} is not an element of O(Y)")
                row[gname] = v
            table[b] = row
        self.fields = table

    @classmethod
    def trivial(cls, affine: AffineData, lie: LieAlgebraData) -> "ActionData":
        return cls(affine, lie, {})

    def apply(self, basis_name: str, f: Element) -> Element:
        """alpha(e)(f) via the chain rule (degree-0 derivation)."""
        P = self.affine.presentation
        out = P.zero()
        for gname, v in self.fields[basis_name].items():
            if v:
                out = out + partial_derivative(f, gname) * v
        return out

    def apply_vector(self, vec: Mapping[int, Fraction], f: Element) -> Element:
        out = self.affine.presentation.zero()
        for i, c in vec.items():
            out = out + self.apply(self.lie.basis[i], f).scale(c)
        return out


def check_action(alpha: ActionData) -> VerificationReport:
    """alpha([x, y]) = [alpha(x), alpha(y)] on every generator of O(Y)."""
    g, P = alpha.lie, alpha.affine.presentation
    for i, j in combinations(range(g.dim), 2):
        bi, bj = g.basis[i], g.basis[j]
        for x in P.names:
            xe = P.gen(x)
            lhs = alpha.apply_vector(g.bracket_basis(i, j), xe)
            rhs = alpha.apply(bi, alpha.apply(bj, xe)) - alpha.apply(bj, alpha.apply(bi, xe))
            if lhs != rhs:
                return VerificationReport(
                    "action",
                    Verdict.FAIL,
                    f"alpha([{bi},{bj}]) != [alpha({bi}), alpha({bj})] on {x}",
                    witness={
                        "pair": [bi, bj],
                        "generator": x,
                        "alpha_of_bracket": format_element(lhs),
                        "commutator": format_element(rhs),
                    },
                )
    return VerificationReport("action", Verdict.PASS, "alpha is a Lie algebra map into derivations")


def dual_name(basis_name: str) -> str:
    return f"{basis_name}v"


def chevalley_eilenberg(
    Y: AffineData,
    g: LieAlgebraData,
    alpha: Optional[ActionData] = None,
    dual_weights: Optional[Mapping[str, int]] = None,
    validate: bool = True,
) -> CDGA:
    """O([Y/g]): O(Y) tensor the exterior algebra on odd degree-1 duals ``<e>v``.

    ``d f = sum_i alpha(e_i)(f) e_i^v`` and
    ``d e_k^v = -sum_{i<j} c^k_ij e_i^v e_j^v``.
    """
    if alpha is None:
        alpha = ActionData.trivial(Y, g)
    if alpha.lie is not g and alpha.lie.basis != g.basis:
        raise ValidationError("action is defined for a different Lie algebra")
    if validate:
        rep = check_jacobi(g)
        if not rep.passed:
            raise InvalidLie(rep.message)
        rep = check_action(alpha)
        if not rep.passed:
            raise InvalidAction(rep.message)
    dual_weights = dict(dual_weights or {})
    unknown = set(dual_weights) - set(g.basis)
    if unknown:
        raise ValidationError(f"weight overrides for unknown Lie basis elements {sorted(unknown)}")
    duals = [GeneratorSpec(dual_name(b), 1, dual_weights.get(b, 0)) for b in g.basis]
    clash = {s.name for s in duals} & set(Y.names)
    if clash:
        raise ValidationError(f"dual generator names clash with O(Y) generators: {sorted(clash)}")
    P = Presentation(list(Y.presentation.generators) + duals)
    dv = [P.gen(s.name) for s in duals]
    diff: Dict[str, Element] = {}
    for x in Y.names:
        out = P.zero()
        for i, b in enumerate(g.basis):
            v = alpha.fields[b][x]
            if v:
                out = out + v.transport(P) * dv[i]
        diff[x] = out
    for k, b in enumerate(g.basis):
        out = P.zero()
        for (i, j), vec in g.constants.items():
            c = vec.get(k)
            if c:
                out = out - (dv[i] * dv[j]).scale(c)
        diff[dual_name(b)] = out
    return CDGA(P, diff)


def de_rham(Y: AffineData, prefix: str = "d") -> CDGA:
    """Omega^*_Y: generators x and odd ``dx`` of degree 1, same weight, d x = dx."""
    diffs = [GeneratorSpec(prefix + g.name, 1, g.weight) for g in Y.presentation.generators]
    clash = {s.name for s in diffs} & set(Y.names)
    if clash:
        raise ValidationError(f"differential names clash with generators: {sorted(clash)}")
    P = Presentation(list(Y.presentation.generators) + diffs)
    return CDGA(P, {x: P.gen(prefix + x) for x in Y.names})


def ce_flatness_equivalence(
    Y: AffineData,
    g: LieAlgebraData,
    alpha: Optional[ActionData] = None,
    dual_weights: Optional[Mapping[str, int]] = None,
) -> VerificationReport:
    """d^2 = 0 on the CE algebra exactly when Jacobi and the action law both hold."""
    if alpha is None:
        alpha = ActionData.trivial(Y, g)
    jac = check_jacobi(g)
    act = check_action(alpha)
    dsq = check_d_squared(chevalley_eilenberg(Y, g, alpha, dual_weights, validate=False))
    hypotheses = jac.passed and act.passed
    agree = hypotheses == dsq.passed
    rep = combine("ce_flatness_equivalence", [jac, act, dsq])
    rep.verdict = Verdict.of(agree)
    rep.message = (
        f"jacobi={jac.verdict.value}, action={act.verdict.value}, d_squared={dsq.verdict.value}; "
        + ("verdicts agree" if agree else "verdicts disagree")
    )
    return rep
