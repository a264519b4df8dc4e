"""Geometric and étale verdicts for morphisms of stacky affines.

A morphism A -> B is étale when B is geometric over A, B^0 is smooth over
A^0, and the fiber complex ``Omega^1_{B/A} (x)_B B^0`` is acyclic.  Only
the last condition needs real computation; smoothness is by declaration
since every degree-0 part here is a localized polynomial ring.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .algebra import Element, Presentation, Truth, format_element, is_unit, monomial_element, unit_inverse
from .cdga import (
    CDGA,
    FreeDGModule,
    MorphismPresentation,
    base_change_degree0,
    cohomology_witness,
    is_coboundary,
    is_cocycle,
    kahler,
)
from .errors import InfiniteSlice, NotSurjective, UnsupportedDegree0, UnsupportedMorphism
from .report import Verdict, VerificationReport, combine

__all__ = [
    "MorphismPresentation",
    "ExtensionKind",
    "ExtensionClassification",
    "classify_extension",
    "check_geometric",
    "AcyclicityStatus",
    "AcyclicityResult",
    "acyclicity",
    "solve_over_ring",
    "EtaleReport",
    "check_etale",
]

LFP_NOTE = "finitely presented inputs are locally finitely presented; not machine-checked"


# ----------------------------------------------------------------------
# square-zero extensions
# ----------------------------------------------------------------------


class ExtensionKind(enum.Enum):
    NOT_SQUARE_ZERO = "not_square_zero"
    SQUARE_ZERO = "square_zero"
    CONTRACTIBLE_SQUARE_ZERO = "contractible_square_zero"


@dataclass
class ExtensionClassification:
    kind: ExtensionKind
    message: str
    witness: Optional[dict] = None
    homotopy: Optional[Dict[str, str]] = None

    def to_report(self) -> VerificationReport:
        w = self.witness if self.homotopy is None else {"homotopy": self.homotopy}
        v = Verdict.PASS if self.kind is ExtensionKind.CONTRACTIBLE_SQUARE_ZERO else Verdict.FAIL
        return VerificationReport("classify_extension", v, f"{self.kind.value}: {self.message}", witness=w)


class _Kernel:
    """Kernel slices of f: C' -> C with C' truncated above a weight."""

    def __init__(self, f: MorphismPresentation, truncate_above: Optional[int], weight_bound: int, degree_bound: int):
        self.f = f
        self.Cp = f.source
        self.P = f.source.presentation
        self.cap = weight_bound if truncate_above is None else min(weight_bound, truncate_above)
        self.truncate_above = truncate_above
        self.degree_bound = degree_bound
        self.slices: Dict[Tuple[int, int], Tuple[Tuple, List[List[Fraction]]]] = {}
        lo = min([0] + [g.weight for g in self.P.generators])
        for n in range(0, degree_bound + 2):
            for w in range(lo if lo < 0 else 0, self.cap + 1):
                self.slices[(n, w)] = self._kernel(n, w)

    def in_range(self, n: int, w: int) -> bool:
        return (n, w) in self.slices

    def _kernel(self, n: int, w: int):
        src = self.Cp.slice_basis(n, w)
        tgt = self.f.target.slice_basis(n, w)
        pos = {m: i for i, m in enumerate(tgt)}
        mat = linalg.zeros(len(tgt), len(src))
        for j, m in enumerate(src):
            for mm, c in self.f.apply(monomial_element(self.P, m)).terms.items():
                mat[pos[mm]][j] += c
        if linalg.rank(mat, len(src)) != len(tgt):
            raise NotSurjective(f"f is not surjective in degree {n}, weight {w}")
        return src, linalg.nullspace(mat, len(src))

    def element(self, n: int, w: int, v: Sequence[Fraction]) -> Element:
        src, _ = self.slices[(n, w)]
        return Element(self.P, {m: c for m, c in zip(src, v) if c})

    def coords(self, e: Element, n: int, w: int) -> Optional[List[Fraction]]:
        """Kernel-basis coordinates of e (which must lie in the kernel slice)."""
        src, K = self.slices[(n, w)]
        if not K:
            return [] if not e else None
        pos = {m: i for i, m in enumerate(src)}
        vec = [Fraction(0)] * len(src)
        for m, c in e.terms.items():
            vec[pos[m]] = c
        # columns of the system are kernel vectors
        A = [[K[k][r] for k in range(len(K))] for r in range(len(src))]
        return linalg.solve(A, vec, len(K))

    def truncate(self, e: Element) -> Element:
        if self.truncate_above is None:
            return e
        return Element(self.P, {m: c for m, c in e.terms.items() if self.P.weight_of(m) <= self.truncate_above})


def classify_extension(
    f: MorphismPresentation,
    weight_bound: int = 4,
    degree_bound: int = 3,
    truncate_above: Optional[int] = None,
) -> ExtensionClassification:
    """Classify a levelwise-surjective f: C' -> C by its kernel I.

    ``truncate_above`` models C' as its free presentation modulo all
    monomials of weight above the given value (for instance Q[e]/e^2 is the
    free algebra on e of weight 1 truncated above 1).  Checks I*I = 0 on
    kernel bases, then solves for a C'-linear h with h d + d h = id on I
    within the probed range.
    """
    ker = _Kernel(f, truncate_above, weight_bound, degree_bound)
    keys = [k for k, (_, K) in ker.slices.items() if K]
    # square-zero
    for (n1, w1), (n2, w2) in product(keys, repeat=2):
        if (n1, w1) > (n2, w2):
            continue
        for a in ker.slices[(n1, w1)][1]:
            for b in ker.slices[(n2, w2)][1]:
                prod = ker.truncate(ker.element(n1, w1, a) * ker.element(n2, w2, b))
                if prod:
                    return ExtensionClassification(
                        ExtensionKind.NOT_SQUARE_ZERO,
                        "the kernel has a nonzero product",
                        witness={
                            "left": format_element(ker.element(n1, w1, a)),
                            "right": format_element(ker.element(n2, w2, b)),
                            "product": format_element(prod),
                        },
                    )
    if not keys:
        return ExtensionClassification(ExtensionKind.CONTRACTIBLE_SQUARE_ZERO, "zero kernel", homotopy={})
    h = _solve_kernel_homotopy(ker)
    if h is None:
        return ExtensionClassification(
            ExtensionKind.SQUARE_ZERO,
            "square-zero kernel without a C'-linear contracting homotopy in the probed range",
            witness=_kernel_class_witness(ker),
        )
    return ExtensionClassification(ExtensionKind.CONTRACTIBLE_SQUARE_ZERO, "square-zero with contracting homotopy", homotopy=h)


def _kernel_class_witness(ker: _Kernel) -> Optional[dict]:
    for (n, w), (_, K) in sorted(ker.slices.items()):
        if K and n <= ker.degree_bound:
            return {"degree": n, "weight": w, "kernel_dim": len(K)}
    return None


def _solve_kernel_homotopy(ker: _Kernel) -> Optional[Dict[str, str]]:
    # unknowns: H[(n, w)] is a dim I^{n-1,w} x dim I^{n,w} matrix
    var: Dict[Tuple[int, int, int, int], int] = {}
    for (n, w), (_, K) in sorted(ker.slices.items()):
        if n >= 1 and (n - 1, w) in ker.slices:
            Kp = ker.slices[(n - 1, w)][1]
            for r in range(len(Kp)):
                for c in range(len(K)):
                    var[(n, w, r, c)] = len(var)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def dcoords(n, w, v):
        e = ker.Cp.d(ker.element(n, w, v))
        return ker.coords(ker.truncate(e), n + 1, w)

    # h d + d h = id on I^{n,w}, n <= degree_bound
    for (n, w), (_, K) in sorted(ker.slices.items()):
        if n > ker.degree_bound or not K:
            continue
        Kup = ker.slices.get((n + 1, w), ((), []))[1]
        Kdn = ker.slices.get((n - 1, w), ((), []))[1]
        for c, v in enumerate(K):
            dv = dcoords(n, w, v) or []
            for out in range(len(K)):
                coeffs: Dict[int, Fraction] = {}
                for s, x in enumerate(dv):
                    if x:
                        idx = var.get((n + 1, w, out, s))
                        if idx is not None:
                            coeffs[idx] = coeffs.get(idx, Fraction(0)) + x
                for r in range(len(Kdn)):
                    idx = var[(n, w, r, c)]
                    dr = dcoords(n - 1, w, Kdn[r]) or []
                    if dr and dr[out]:
                        coeffs[idx] = coeffs.get(idx, Fraction(0)) + dr[out]
                rows.append(coeffs)
                rhs.append(Fraction(1 if out == c else 0))
    # C'-linearity: h(g i) = (-1)^{|g|} g h(i)
    for g in ker.P.generators:
        ge = ker.P.gen(g.name)
        for (n, w), (_, K) in sorted(ker.slices.items()):
            tgt = (n + g.degree, w + g.weight)
            low = (n - 1 + g.degree, w + g.weight)
            if not K or tgt not in ker.slices or low not in ker.slices:
                continue
            Kt = ker.slices[tgt][1]
            Kl = ker.slices[low][1]
            if not Kl:
                continue
            Kdn = ker.slices.get((n - 1, w), ((), []))[1]
            sign = -1 if g.degree % 2 else 1
            gK = [ker.coords(ker.truncate(ge * ker.element(n - 1, w, u)), *low) for u in Kdn]
            for c, v in enumerate(K):
                gi = ker.coords(ker.truncate(ge * ker.element(n, w, v)), *tgt)
                for out in range(len(Kl)):
                    coeffs: Dict[int, Fraction] = {}
                    for s, x in enumerate(gi or []):
                        if x:
                            idx = var.get((tgt[0], tgt[1], out, s))
                            if idx is not None:
                                coeffs[idx] = coeffs.get(idx, Fraction(0)) + x
                    for r, u in enumerate(gK):
                        if u and u[out]:
                            idx = var[(n, w, r, c)]
                            coeffs[idx] = coeffs.get(idx, Fraction(0)) - sign * u[out]
                    if coeffs:
                        rows.append(coeffs)
                        rhs.append(Fraction(0))
    nv = len(var)
    A = [[row.get(i, Fraction(0)) for i in range(nv)] for row in rows]
    sol = linalg.solve(A, rhs, nv) if rows else []
    if sol is None:
        return None
    out: Dict[str, str] = {}
    for (n, w), (_, K) in sorted(ker.slices.items()):
        if n > ker.degree_bound + 1:
            continue
        Kdn = ker.slices.get((n - 1, w), ((), []))[1]
        for c, v in enumerate(K):
            img = ker.P.zero()
            for r, u in enumerate(Kdn):
                x = sol[var[(n, w, r, c)]]
                if x:
                    img = img + ker.element(n - 1, w, u).scale(x)
            out[format_element(ker.element(n, w, v))] = format_element(img)
    return out


# ----------------------------------------------------------------------
# geometric
# ----------------------------------------------------------------------


def check_geometric(f: MorphismPresentation) -> VerificationReport:
    """Freeness of B^# over A^# (x)_{A^0} B^0.

    Generator inclusions are free on the remaining positive-degree
    generators.  A positive-degree generator with image 0 makes B^# a
    torsion module (Fail).  Other maps are left Unknown.
    """
    inc = f.generator_inclusion()
    if inc is not None:
        hit = set(inc.values())
        free = [g.name for g in f.target.presentation.generators if g.degree > 0 and g.name not in hit]
        return VerificationReport(
            "geometric",
            Verdict.PASS,
            "generator inclusion: B^# is free over A^# (x) B^0 on the remaining positive-degree generators",
            witness={"free_generators": free},
        )
    for g in f.source.presentation.generators:
        if g.degree > 0 and not f.images[g.name]:
            return VerificationReport(
                "geometric",
                Verdict.FAIL,
                f"positive-degree generator {g.name} maps to 0, so B^# has torsion over A^#",
                witness={"generator": g.name},
            )
    return VerificationReport(
        "geometric",
        Verdict.UNKNOWN,
        "freeness is only decided for generator inclusions",
        witness={"images": {k: format_element(v) for k, v in f.images.items()}},
    )


# ----------------------------------------------------------------------
# acyclicity of complexes of free modules over a degree-0 ring
# ----------------------------------------------------------------------


class AcyclicityStatus(enum.Enum):
    ACYCLIC = "acyclic"
    NOT_ACYCLIC = "not_acyclic"
    UNKNOWN = "unknown"


@dataclass
class AcyclicityResult:
    status: AcyclicityStatus
    message: str
    homotopy: Optional[Dict[str, str]] = None
    cohomology_class: Optional[dict] = None
    homotopy_matrix: Optional[Dict[int, Dict[int, Element]]] = field(default=None, repr=False)

    def to_report(self) -> VerificationReport:
        verdict = {
            AcyclicityStatus.ACYCLIC: Verdict.PASS,
            AcyclicityStatus.NOT_ACYCLIC: Verdict.FAIL,
            AcyclicityStatus.UNKNOWN: Verdict.UNKNOWN,
        }[self.status]
        witness = None
        if self.homotopy is not None:
            witness = {"homotopy": self.homotopy}
        elif self.cohomology_class is not None:
            witness = {"cohomology_class": self.cohomology_class}
        return VerificationReport("acyclicity", verdict, f"{self.status.value}: {self.message}", witness=witness)


def solve_over_ring(A: List[List[Element]], B: List[List[Element]], P: Presentation) -> Optional[List[List[Element]]]:
    """Some X with A X = B over a degree-0 ring, eliminating on unit pivots only.

    Returns None when elimination stalls on non-unit pivots or the system
    is inconsistent; any returned X satisfies A X = B exactly.
    """
    r = len(A)
    c = len(A[0]) if A else 0
    k = len(B[0]) if B else 0
    M = [list(A[i]) + list(B[i]) for i in range(r)]
    pivots: List[Tuple[int, int]] = []
    row = 0
    for col in range(c):
        if row >= r:
            break
        piv = None
        for i in range(row, r):
            if M[i][col] and is_unit(M[i][col]) is Truth.YES:
                piv = i
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = unit_inverse(M[row][col])
        M[row] = [x * inv for x in M[row]]
        for i in range(r):
            if i != row and M[i][col]:
                fac = M[i][col]
                M[i] = [a - fac * b for a, b in zip(M[i], M[row])]
        pivots.append((row, col))
        row += 1
    X = [[P.zero() for _ in range(k)] for _ in range(c)]
    for pr, pc in pivots:
        X[pc] = list(M[pr][c:])
    # verify
    for i in range(r):
        for j in range(k):
            acc = P.zero()
            for t in range(c):
                if A[i][t] and X[t][j]:
                    acc = acc + A[i][t] * X[t][j]
            if acc != B[i][j]:
                return None
    return X


def _probe_weights(M: FreeDGModule, weight_bound: int) -> range:
    P = M.over.presentation
    ws = [b.weight for b in M.basis] or [0]
    if P.inverted or any(g.weight < 0 for g in P.generators):
        return range(min(ws) - weight_bound, weight_bound + 1)
    return range(min(ws), max(weight_bound, min(ws)) + 1)


def _format_class(M: FreeDGModule, degree: int, weight: int, coords: dict) -> dict:
    return {"degree": degree, "weight": weight, "representative": M.format_vector(M.keys_to_vector(coords))}


def acyclicity(M: FreeDGModule, weight_bound: int = 6) -> AcyclicityResult:
    """Decide acyclicity of a complex of free modules over a degree-0 ring.

    First exact slice cohomology (weights up to the bound); a nonzero class
    gives NOT_ACYCLIC.  Then a contracting homotopy is solved degree by
    degree with unit pivots and re-verified; failure gives UNKNOWN.
    """
    P = M.over.presentation
    if any(g.degree != 0 for g in P.generators):
        raise UnsupportedDegree0("acyclicity expects a module over a degree-0 ring")
    if M.rank == 0:
        return AcyclicityResult(AcyclicityStatus.ACYCLIC, "zero complex", homotopy={}, homotopy_matrix={})
    degrees = sorted({b.degree for b in M.basis})
    sliced = True
    try:
        for n in degrees:
            for w in _probe_weights(M, weight_bound):
                cls = cohomology_witness(M, n, w)
                if cls is not None:
                    assert is_cocycle(M, n, w, cls) and not is_coboundary(M, n, w, cls)
                    return AcyclicityResult(
                        AcyclicityStatus.NOT_ACYCLIC,
                        f"nonzero cohomology in degree {n}, weight {w}",
                        cohomology_class=_format_class(M, n, w, cls),
                    )
    except InfiniteSlice:
        sliced = False
    H = _homotopy_search(M)
    if H is not None:
        text = {
            M.basis[j].name: M.format_vector(col) for j, col in sorted(H.items())
        }
        return AcyclicityResult(AcyclicityStatus.ACYCLIC, "contracting homotopy found and verified", homotopy=text, homotopy_matrix=H)
    reason = "slice cohomology vanishes up to the weight bound but no unit-pivot homotopy was found"
    if not sliced:
        reason = "slices are infinite and no unit-pivot homotopy was found"
    return AcyclicityResult(AcyclicityStatus.UNKNOWN, reason)


def _homotopy_search(M: FreeDGModule) -> Optional[Dict[int, Dict[int, Element]]]:
    P = M.over.presentation
    by_deg: Dict[int, List[int]] = {}
    for j, b in enumerate(M.basis):
        by_deg.setdefault(b.degree, []).append(j)
    degrees = sorted(by_deg)
    lo, hi = degrees[0], degrees[-1]

    def block(src: int, tgt: int) -> List[List[Element]]:
        """Matrix of d from degree src to tgt (rows tgt basis, cols src basis)."""
        return [[M.differential[i][j] for j in by_deg.get(src, [])] for i in by_deg.get(tgt, [])]

    # h[n]: F^n -> F^{n-1}, rows index F^{n-1}, columns F^n
    h: Dict[int, List[List[Element]]] = {}
    for n in range(lo, hi + 1):
        Fn = by_deg.get(n, [])
        Fup = by_deg.get(n + 1, [])
        Fdn = by_deg.get(n - 1, [])
        # P = id - d_{n-1} h_n on F^n
        proj = [[P.one() if a == b else P.zero() for b in range(len(Fn))] for a in range(len(Fn))]
        if Fdn and n in h:
            dprev = block(n - 1, n)
            hn = h[n]
            for a in range(len(Fn)):
                for b in range(len(Fn)):
                    acc = P.zero()
                    for t in range(len(Fdn)):
                        if dprev[a][t] and hn[t][b]:
                            acc = acc + dprev[a][t] * hn[t][b]
                    proj[a][b] = proj[a][b] - acc
        if not Fn:
            continue
        if not Fup:
            if any(x for row in proj for x in row):
                return None
            continue
        d = block(n, n + 1)
        # X d = proj  <=>  d^T X^T = proj^T
        dT = [[d[i][j] for i in range(len(Fup))] for j in range(len(Fn))]
        pT = [[proj[j][i] for j in range(len(Fn))] for i in range(len(Fn))]
        XT = solve_over_ring(dT, pT, P)
        if XT is None:
            return None
        h[n + 1] = [[XT[j][i] for j in range(len(Fup))] for i in range(len(Fn))]
    H: Dict[int, Dict[int, Element]] = {}
    for n, mat in h.items():
        for c, j in enumerate(by_deg.get(n, [])):
            col = {by_deg[n - 1][r]: mat[r][c] for r in range(len(mat)) if mat[r][c]}
            H[j] = col
    if not verify_homotopy(M, H):
        return None
    return H


def verify_homotopy(M: FreeDGModule, H: Dict[int, Dict[int, Element]]) -> bool:
    """h d + d h = id on every basis vector (coefficients in degree 0)."""
    P = M.over.presentation

    def h_apply(v: Dict[int, Element]) -> Dict[int, Element]:
        out: Dict[int, Element] = {}
        for j, b in v.items():
            for i, c in H.get(j, {}).items():
                out[i] = out.get(i, P.zero()) + b * c
        return {i: e for i, e in out.items() if e}

    for j in range(M.rank):
        e = {j: P.one()}
        lhs = h_apply(M.apply(e))
        for i, x in M.apply(h_apply(e)).items():
            lhs[i] = lhs.get(i, P.zero()) + x
        lhs = {i: x for i, x in lhs.items() if x}
        if lhs != e:
            return False
    return True


# ----------------------------------------------------------------------
# étale
# ----------------------------------------------------------------------


@dataclass
class EtaleReport:
    geometric: VerificationReport
    degree0_smooth: str
    fiber_complex: FreeDGModule
    acyclicity: AcyclicityResult
    assumptions: List[str] = field(default_factory=lambda: [LFP_NOTE])

    @property
    def etale(self) -> bool:
        return (
            self.geometric.passed
            and self.degree0_smooth == "DeclaredSmooth"
            and self.acyclicity.status is AcyclicityStatus.ACYCLIC
        )

    @property
    def verdict(self) -> Verdict:
        if self.etale:
            return Verdict.PASS
        if self.geometric.verdict is Verdict.FAIL or self.acyclicity.status is AcyclicityStatus.NOT_ACYCLIC:
            return Verdict.FAIL
        if self.degree0_smooth != "DeclaredSmooth":
            return Verdict.FAIL
        return Verdict.UNKNOWN

    def to_report(self) -> VerificationReport:
        smooth = VerificationReport(
            "degree0_smooth",
            Verdict.PASS if self.degree0_smooth == "DeclaredSmooth" else Verdict.FAIL,
            self.degree0_smooth,
        )
        fiber = VerificationReport(
            "fiber_complex",
            Verdict.PASS,
            "Omega^1_{B/A} (x)_B B^0",
            witness={
                "basis": [[b.name, b.degree, b.weight] for b in self.fiber_complex.basis],
                "differential": self.fiber_complex.differential_strings(),
            },
        )
        rep = combine("etale", [self.geometric, smooth, fiber, self.acyclicity.to_report()])
        rep.verdict = self.verdict
        rep.message = ("etale" if self.etale else "not etale") + "; assumption: " + "; ".join(self.assumptions)
        return rep


def check_etale(f: MorphismPresentation, weight_bound: int = 6) -> EtaleReport:
    """Étale test for a generator inclusion A -> B."""
    inc = f.generator_inclusion()
    if inc is None:
        raise UnsupportedMorphism("check_etale supports generator inclusions only")
    B = f.target
    for a, b in inc.items():
        if B.presentation.spec(b).degree == 0 and f.source.presentation.spec(a).invertible != B.presentation.spec(b).invertible:
            raise UnsupportedDegree0(f"degree-0 generator {a} changes localization under f")
    geo = check_geometric(f)
    omega = kahler(B, base_names=list(inc.values()))
    fiber = base_change_degree0(omega)
    return EtaleReport(geo, "DeclaredSmooth", fiber, acyclicity(fiber, weight_bound))
