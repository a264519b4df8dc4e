"""Chain cochain complexes over Q, hat-Tot, internal Hom and tangent complexes.

Bidegrees are ``(i, j)`` with ``i`` the cochain and ``j`` the chain index;
``d`` maps ``V^i_j -> V^{i+1}_j`` and ``delta`` maps ``V^i_j -> V^i_{j-1}``.
Matrices act on column vectors (rows index the target basis).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import Element, Presentation, format_element
from .cdga import (
    CDGA,
    BasisSpec,
    FreeDGModule,
    MorphismPresentation,
    check_module_d_squared,
    cohomology_dim,
    cohomology_witness,
    kahler,
)
from .errors import SizeMismatch, UnsupportedMorphism, ValidationError
from .report import Verdict, VerificationReport, combine

Bidegree = Tuple[int, int]


def _mat(rows: int, cols: int, m: Optional[Sequence[Sequence]]) -> linalg.Matrix:
    if m is None:
        return linalg.zeros(rows, cols)
    out = [[Fraction(x) for x in row] for row in m]
    if len(out) != rows or any(len(r) != cols for r in out):
        raise SizeMismatch(f"expected a {rows}x{cols} matrix")
    return out


class ChainCochainComplex:
    """A finitely supported bigraded family of Q-vector spaces with d and delta."""

    def __init__(
        self,
        dims: Mapping[Bidegree, int],
        d: Optional[Mapping[Bidegree, Sequence[Sequence]]] = None,
        delta: Optional[Mapping[Bidegree, Sequence[Sequence]]] = None,
        labels: Optional[Mapping[Bidegree, Sequence]] = None,
    ):
        self.dims = {tuple(k): int(v) for k, v in dims.items() if v}
        self.labels = {tuple(k): list(v) for k, v in (labels or {}).items()}
        self.d: Dict[Bidegree, linalg.Matrix] = {}
        self.delta: Dict[Bidegree, linalg.Matrix] = {}
        for (i, j), m in (d or {}).items():
            self.d[(i, j)] = _mat(self.dim(i + 1, j), self.dim(i, j), m)
        for (i, j), m in (delta or {}).items():
            self.delta[(i, j)] = _mat(self.dim(i, j - 1), self.dim(i, j), m)

    def dim(self, i: int, j: int) -> int:
        return self.dims.get((i, j), 0)

    def d_at(self, i: int, j: int) -> linalg.Matrix:
        return self.d.get((i, j)) or linalg.zeros(self.dim(i + 1, j), self.dim(i, j))

    def delta_at(self, i: int, j: int) -> linalg.Matrix:
        return self.delta.get((i, j)) or linalg.zeros(self.dim(i, j - 1), self.dim(i, j))

    @property
    def support(self) -> List[Bidegree]:
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def __repr__(self):
        return f"ChainCochainComplex({dict(sorted(self.dims.items()))})"


def _mm(a, b, inner, ncols):
    return linalg.matmul(a, b, inner, ncols)


def check_bicomplex(V: ChainCochainComplex) -> VerificationReport:
    """d^2 = 0, delta^2 = 0 and d delta + delta d = 0 on every bidegree."""
    for (i, j) in V.support:
        n = V.dim(i, j)
        dd = _mm(V.d_at(i + 1, j), V.d_at(i, j), V.dim(i + 1, j), n)
        if not linalg.is_zero(dd):
            return VerificationReport("bicomplex", Verdict.FAIL, f"d^2 != 0 on V^{i}_{j}", witness={"identity": "d^2", "bidegree": [i, j]})
        ee = _mm(V.delta_at(i, j - 1), V.delta_at(i, j), V.dim(i, j - 1), n)
        if not linalg.is_zero(ee):
            return VerificationReport(
                "bicomplex", Verdict.FAIL, f"delta^2 != 0 on V^{i}_{j}", witness={"identity": "delta^2", "bidegree": [i, j]}
            )
        a = _mm(V.d_at(i, j - 1), V.delta_at(i, j), V.dim(i, j - 1), n)
        b = _mm(V.delta_at(i + 1, j), V.d_at(i, j), V.dim(i + 1, j), n)
        mixed = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
        if not linalg.is_zero(mixed):
            return VerificationReport(
                "bicomplex",
                Verdict.FAIL,
                f"d delta + delta d != 0 on V^{i}_{j}",
                witness={"identity": "d delta + delta d", "bidegree": [i, j], "value": [[str(x) for x in r] for r in mixed]},
            )
    return VerificationReport("bicomplex", Verdict.PASS, "d^2 = delta^2 = d delta + delta d = 0")


# ----------------------------------------------------------------------
# cochain complexes and hat-Tot
# ----------------------------------------------------------------------


@dataclass
class CochainComplex:
    """Finite-dimensional cochain complex: dims[m] and diff[m]: C^m -> C^{m+1}."""

    dims: Dict[int, int]
    diff: Dict[int, linalg.Matrix]
    labels: Dict[int, List] = field(default_factory=dict)

    def dim(self, m: int) -> int:
        return self.dims.get(m, 0)

    def diff_at(self, m: int) -> linalg.Matrix:
        return self.diff.get(m) or linalg.zeros(self.dim(m + 1), self.dim(m))

    @property
    def degrees(self) -> List[int]:
        return sorted(m for m, n in self.dims.items() if n)

    def check_d_squared(self) -> VerificationReport:
        for m in self.degrees:
            dd = _mm(self.diff_at(m + 1), self.diff_at(m), self.dim(m + 1), self.dim(m))
            if not linalg.is_zero(dd):
                return VerificationReport("total_d_squared", Verdict.FAIL, f"D^2 != 0 from degree {m}", witness={"degree": m})
        return VerificationReport("total_d_squared", Verdict.PASS, "D^2 = 0")

    def cohomology_dim(self, m: int) -> int:
        n = self.dim(m)
        if not n:
            return 0
        return n - linalg.rank(self.diff_at(m), n) - linalg.rank(self.diff_at(m - 1), self.dim(m - 1))

    def cohomology(self) -> Dict[int, int]:
        return {m: self.cohomology_dim(m) for m in self.degrees}


def hat_tot(V: ChainCochainComplex, convention: str = "plain") -> CochainComplex:
    """(hat-Tot V)^m = (+)_i V^i_{i-m} with D = d + delta.

    ``convention="alternating"`` uses d + (-1)^i delta instead; with
    anticommuting d and delta that choice does not square to zero and is
    kept only so the failure can be demonstrated.
    """
    if convention not in ("plain", "alternating"):
        raise ValidationError("convention must be 'plain' or 'alternating'")
    # finitely supported: the product over i >= 0 is a sum
    offsets: Dict[int, Dict[Bidegree, int]] = {}
    dims: Dict[int, int] = {}
    labels: Dict[int, List] = {}
    for (i, j) in V.support:
        m = i - j
        offsets.setdefault(m, {})[(i, j)] = dims.get(m, 0)
        dims[m] = dims.get(m, 0) + V.dim(i, j)
        labels.setdefault(m, []).extend(((i, j), k) for k in range(V.dim(i, j)))
    diff: Dict[int, linalg.Matrix] = {}
    for m in dims:
        D = linalg.zeros(dims.get(m + 1, 0), dims[m])
        for (i, j), off in offsets[m].items():
            n = V.dim(i, j)
            sign = -1 if convention == "alternating" and i % 2 else 1
            if V.dim(i + 1, j):
                toff = offsets[m + 1][(i + 1, j)]
                blk = V.d_at(i, j)
                for r in range(V.dim(i + 1, j)):
                    for c in range(n):
                        D[toff + r][off + c] += blk[r][c]
            if V.dim(i, j - 1):
                toff = offsets[m + 1][(i, j - 1)]
                blk = V.delta_at(i, j)
                for r in range(V.dim(i, j - 1)):
                    for c in range(n):
                        D[toff + r][off + c] += sign * blk[r][c]
        diff[m] = D
    return CochainComplex(dims, diff, labels)


# ----------------------------------------------------------------------
# internal Hom of bicomplexes over Q
# ----------------------------------------------------------------------


def _bicomplex_hom(M: ChainCochainComplex, N: ChainCochainComplex) -> ChainCochainComplex:
    """cHom(M, N)^i_j = prod Hom(M^a_b, N^{a+i}_{b+j}).

    Total degree of f is ``|f| = i - j``;
    ``d f = d_N f - (-1)^|f| f d_M`` and likewise for delta.
    Basis of each piece: elementary maps ``(a, b, r, c)`` sending basis c
    of M^a_b to basis r of N^{a+i}_{b+j}.
    """
    labels: Dict[Bidegree, List[Tuple[int, int, int, int]]] = {}
    for (a, b) in M.support:
        for (p, q) in N.support:
            i, j = p - a, q - b
            for r in range(N.dim(p, q)):
                for c in range(M.dim(a, b)):
                    labels.setdefault((i, j), []).append((a, b, r, c))
    pos = {k: {lab: t for t, lab in enumerate(v)} for k, v in labels.items()}
    dims = {k: len(v) for k, v in labels.items()}

    def apply(kind: str, i: int, j: int, lab) -> Dict[int, Fraction]:
        a, b, r, c = lab
        s = -1 if (i - j) % 2 else 1
        if kind == "d":
            ti, tj = i + 1, j
            n_map = N.d_at(a + i, b + j)  # N^{a+i}_{b+j} -> N^{a+i+1}_{b+j}
            out: Dict[int, Fraction] = {}
            # d_N o f : M^a_b -> N^{a+i+1}_{b+j}
            for rr in range(N.dim(a + i + 1, b + j)):
                x = n_map[rr][r] if n_map else 0
                if x:
                    k = pos[(ti, tj)][(a, b, rr, c)]
                    out[k] = out.get(k, Fraction(0)) + x
            # f o d_M : M^{a-1}_b -> N^{a+i}_{b+j}; sources are basis cc of M^{a-1}_b
            m_map = M.d_at(a - 1, b)  # M^{a-1}_b -> M^a_b
            for cc in range(M.dim(a - 1, b)):
                x = m_map[c][cc] if m_map else 0
                if x:
                    k = pos[(ti, tj)][(a - 1, b, r, cc)]
                    out[k] = out.get(k, Fraction(0)) - s * x
            return out
        ti, tj = i, j - 1
        n_map = N.delta_at(a + i, b + j)
        out = {}
        for rr in range(N.dim(a + i, b + j - 1)):
            x = n_map[rr][r] if n_map else 0
            if x:
                k = pos[(ti, tj)][(a, b, rr, c)]
                out[k] = out.get(k, Fraction(0)) + x
        m_map = M.delta_at(a, b + 1)  # M^a_{b+1} -> M^a_b
        for cc in range(M.dim(a, b + 1)):
            x = m_map[c][cc] if m_map else 0
            if x:
                k = pos[(ti, tj)][(a, b + 1, r, cc)]
                out[k] = out.get(k, Fraction(0)) - s * x
        return out

    d: Dict[Bidegree, linalg.Matrix] = {}
    delta: Dict[Bidegree, linalg.Matrix] = {}
    for (i, j), labs in labels.items():
        dm = linalg.zeros(dims.get((i + 1, j), 0), len(labs))
        em = linalg.zeros(dims.get((i, j - 1), 0), len(labs))
        for col, lab in enumerate(labs):
            for k, x in apply("d", i, j, lab).items():
                dm[k][col] += x
            for k, x in apply("delta", i, j, lab).items():
                em[k][col] += x
        d[(i, j)] = dm
        delta[(i, j)] = em
    return ChainCochainComplex(dims, d, delta, labels)


def module_hom(M: FreeDGModule, N: FreeDGModule) -> FreeDGModule:
    """cHom_B(M, N) for free M of finite rank, as a free B-module.

    Basis ``e_ij = n_i (x) m_j^v`` with ``e_ij(m_k) = delta_jk n_i``; maps
    are Koszul-linear, ``phi(b m) = (-1)^{|phi||b|} b phi(m)``, and
    ``d phi = d_N phi - (-1)^|phi| phi d_M``.
    """
    if M.over != N.over:
        raise ValidationError("modules live over different algebras")
    B = M.over
    P = B.presentation
    basis = []
    idx = {}
    for i, n in enumerate(N.basis):
        for j, m in enumerate(M.basis):
            idx[(i, j)] = len(basis)
            name = f"{n.name}*{m.name}^v" if N.rank > 1 or n.name != "1" else f"{m.name}^v"
            basis.append(BasisSpec(name, n.degree - m.degree, n.weight - m.weight))
    r = len(basis)
    D = [[P.zero() for _ in range(r)] for _ in range(r)]
    for (i, j), col in idx.items():
        e_deg = basis[col].degree
        for l in range(N.rank):
            x = N.differential[l][i]
            if x:
                D[idx[(l, j)]][col] = D[idx[(l, j)]][col] + x
        for k in range(M.rank):
            x = M.differential[j][k]
            if not x:
                continue
            # e(d m_k) = (-1)^{|e||M_jk|} M_jk n_i; M_jk is homogeneous
            xd = x.degree or 0
            sign = -1 if (e_deg % 2 and (1 + xd) % 2) else 1
            D[idx[(i, k)]][col] = D[idx[(i, k)]][col] - x.scale(sign)
    return FreeDGModule(B, basis, D)


def internal_hom(M, N):
    """cHom(M, N) for two bicomplexes over Q or two free dg-modules over a CDGA."""
    if isinstance(M, ChainCochainComplex) and isinstance(N, ChainCochainComplex):
        return _bicomplex_hom(M, N)
    if isinstance(M, FreeDGModule) and isinstance(N, FreeDGModule):
        return module_hom(M, N)
    raise ValidationError("internal_hom needs two bicomplexes or two free dg-modules")


HomComplex = ChainCochainComplex


def hat_hhom(M: ChainCochainComplex, N: ChainCochainComplex) -> CochainComplex:
    return hat_tot(internal_hom(M, N))


def total_hom(M: CochainComplex, N: CochainComplex) -> CochainComplex:
    """Hom(M, N) of two cochain complexes with D f = d_N f - (-1)^|f| f d_M."""
    labels: Dict[int, List[Tuple[int, int, int]]] = {}
    for p in M.degrees:
        for q in N.degrees:
            for r in range(N.dim(q)):
                for c in range(M.dim(p)):
                    labels.setdefault(q - p, []).append((p, r, c))
    pos = {k: {lab: t for t, lab in enumerate(v)} for k, v in labels.items()}
    diff = {}
    for k, labs in labels.items():
        s = -1 if k % 2 else 1
        mat = linalg.zeros(len(labels.get(k + 1, [])), len(labs))
        for col, (p, r, c) in enumerate(labs):
            nd = N.diff_at(p + k)
            for rr in range(N.dim(p + k + 1)):
                if nd[rr][r]:
                    mat[pos[k + 1][(p, rr, c)]][col] += nd[rr][r]
            md = M.diff_at(p - 1)
            for cc in range(M.dim(p - 1)):
                if md[c][cc]:
                    mat[pos[k + 1][(p - 1, r, cc)]][col] -= s * md[c][cc]
        diff[k] = mat
    return CochainComplex({k: len(v) for k, v in labels.items()}, diff, labels)


# ----------------------------------------------------------------------
# tangent complexes
# ----------------------------------------------------------------------


def unit_module(B: CDGA) -> FreeDGModule:
    return FreeDGModule(B, [BasisSpec("1", 0, 0)])


def tangent_complex(B: CDGA, base_names: Optional[Iterable[str]] = None) -> FreeDGModule:
    """cHom_B(Omega^1_B, B); basis ``d(g)^v`` in degree -deg g, weight -weight g."""
    return module_hom(kahler(B, base_names), unit_module(B))


def _slice_range(M: FreeDGModule, weight_bound: int) -> Tuple[range, range]:
    P = M.over.presentation
    top = P.max_degree()
    degs = [b.degree for b in M.basis] or [0]
    hi = max(degs) + (top if top is not None else 4)
    ws = [b.weight for b in M.basis] or [0]
    lo_w = min(ws) - (weight_bound if P.inverted or any(g.weight < 0 for g in P.generators) else 0)
    return range(min(degs), hi + 1), range(min(lo_w, -weight_bound if P.inverted else lo_w), weight_bound + 1)


def tangent_base_change(
    f: MorphismPresentation, weight_bound: int = 5
) -> VerificationReport:
    """Restriction T_C -> T_A (x)_A C is a quasi-isomorphism slice by slice.

    For a generator inclusion f: A -> C the map sends ``d(c)^v`` to
    ``d(a)^v`` when c = f(a) and to 0 otherwise.  Its mapping cone is built
    as a free C-module and every probed slice is checked to be acyclic.
    """
    inc = f.generator_inclusion()
    if inc is None:
        raise UnsupportedMorphism("tangent_base_change supports generator inclusions only")
    A, C = f.source, f.target
    P = C.presentation
    TC = tangent_complex(C)
    TA = tangent_complex(A)
    # T_A (x)_A C: same basis, entries pushed along f
    TAC = FreeDGModule(C, TA.basis, [[f.apply(x) for x in row] for row in TA.differential])
    rc, ra = TC.rank, TAC.rank
    basis = [BasisSpec("s" + b.name, b.degree - 1, b.weight) for b in TC.basis] + list(TAC.basis)
    D = [[P.zero() for _ in range(rc + ra)] for _ in range(rc + ra)]
    # on the shift, d(s m) = -s(d m) and s passes a coefficient b with sign (-1)^|b|
    for i in range(rc):
        for j in range(rc):
            x = TC.differential[i][j]
            D[i][j] = x if (x.degree or 0) % 2 else -x
    for i in range(ra):
        for j in range(ra):
            D[rc + i][rc + j] = TAC.differential[i][j]
    inv = {c: a for a, c in inc.items()}
    gens_C = [g.name for g in C.presentation.generators]
    gens_A = [g.name for g in A.presentation.generators]
    for j, c in enumerate(gens_C):
        if c in inv:
            D[rc + gens_A.index(inv[c])][j] = P.one()
    cone = FreeDGModule(C, basis, D)
    dsq = check_module_d_squared(cone)
    if not dsq.passed:
        return combine("tangent_base_change", [dsq], "restriction map is not a chain map")
    degrees, weights = _slice_range(cone, weight_bound)
    for n in degrees:
        for w in weights:
            if cohomology_dim(cone, n, w):
                cls = cohomology_witness(cone, n, w)
                return VerificationReport(
                    "tangent_base_change",
                    Verdict.FAIL,
                    f"mapping cone has cohomology in degree {n}, weight {w}",
                    witness={"degree": n, "weight": w, "class": cone.format_vector(cone.keys_to_vector(cls))},
                )
    return VerificationReport(
        "tangent_base_change",
        Verdict.PASS,
        f"T_C -> T_A (x)_A C is a quasi-isomorphism on degrees {degrees.start}..{degrees.stop - 1}, weights {weights.start}..{weights.stop - 1}",
        witness={"degrees": [degrees.start, degrees.stop - 1], "weights": [weights.start, weights.stop - 1]},
    )
