"""JSON input documents and report documents.

An input document is a JSON object.  Recognised sections:

``generators``
    list of ``[name, degree, weight]`` / ``[name, degree, weight, invertible]``
    or objects ``{"name", "degree", "weight", "invertible"}``.
``differential``
    ``{generator: element string}``.
``morphism``
    ``{"source": <algebra section> | "ground", "images": {name: element}}``.
``affine``
    generators of a degree-0 ring, same shape as ``generators``.
``lie``
    ``{"preset": "sl2" | "gl2" | "abelian:k"}`` or
    ``{"basis": [...], "brackets": [[a, b, {c: coeff}], ...]}``,
    optionally ``"dual_weights": {basis: weight}``.
``action``
    ``{basis: {generator: element string}}``.
``omega`` / ``connection``
    square matrices of element strings.
``gauge``
    ``{"g": matrix, "inverse": matrix}``.
``point``
    ``{"y": {generator: element}, "gamma": {basis: element}}``.
``module``
    ``{"basis": [[name, degree, weight]], "differential": matrix, "relations": [{basis: element}]}``.
``bicomplex``
    ``{"dims": [[i, j, dim]], "d": [{"at": [i, j], "matrix": rows}], "delta": [...]}``.
``job``
    ``{"command", "weight_bound", "degree_bound", "seed", "expect", "verdict"}``;
    ``expect`` is checked by the command itself, ``verdict`` records the
    outcome the fixture is meant to produce.

Elements are signed monomial strings such as ``"3/2*x^2*e1v - t^-1"``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional

from .algebra import Element, GeneratorSpec, Presentation, format_element
from .cdga import CDGA, BasisSpec, FreeDGModule, MorphismPresentation, ground_field, structure_map
from .constructions import ActionData, AffineData, LieAlgebraData, abelian, gl, sl2
from .errors import ParseError, ValidationError
from .report import Verdict, VerificationReport

TOOL = "stackycdga"


def load_document(text: str, source: Optional[str] = None) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", exc.pos, source) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", 0, source)
    return doc


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ----------------------------------------------------------------------
# scalars and elements
# ----------------------------------------------------------------------


def parse_scalar(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ValidationError(f"{where}: scalars must be integers or strings like '3/2', got {x!r}")
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: cannot read {x!r} as a rational number") from None


def format_scalar(c: Fraction) -> Any:
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_elem(P: Presentation, x: Any, where: str) -> Element:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ValidationError(f"{where}: expected an element string, got {type(x).__name__}")
    try:
        return P.parse(x) if isinstance(x, str) else P.scalar(x)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc.message}", exc.position, exc.source) from None


def _need(doc: Mapping, key: str, where: str = "document"):
    if key not in doc:
        raise ValidationError(f"{where}: missing section {key!r}")
    return doc[key]


# ----------------------------------------------------------------------
# presentations and algebras
# ----------------------------------------------------------------------


def parse_generators(items: Any, where: str = "generators") -> Presentation:
    if not isinstance(items, list):
        raise ValidationError(f"{where}: expected a list")
    specs = []
    for k, g in enumerate(items):
        at = f"{where}[{k}]"
        if isinstance(g, dict):
            unknown = set(g) - {"name", "degree", "weight", "invertible"}
            if unknown:
                raise ValidationError(f"{at}: unknown keys {sorted(unknown)}")
            g = [_need(g, "name", at), _need(g, "degree", at), g.get("weight", 0), g.get("invertible", False)]
        if not isinstance(g, list) or not 2 <= len(g) <= 4:
            raise ValidationError(f"{at}: expected [name, degree, weight, invertible?]")
        name, deg = g[0], g[1]
        wt = g[2] if len(g) > 2 else 0
        inv = g[3] if len(g) > 3 else False
        if not isinstance(deg, int) or not isinstance(wt, int) or isinstance(deg, bool) or isinstance(wt, bool):
            raise ValidationError(f"{at}: degree and weight must be integers")
        if not isinstance(inv, bool):
            raise ValidationError(f"{at}: invertible must be true or false")
        specs.append(GeneratorSpec(name, deg, wt, inv))
    return Presentation(specs)


def generators_to_json(P: Presentation) -> List[list]:
    return [[g.name, g.degree, g.weight] + ([True] if g.invertible else []) for g in P.generators]


def parse_cdga(doc: Mapping, where: str = "document") -> CDGA:
    P = parse_generators(_need(doc, "generators", where), f"{where}.generators")
    diff = doc.get("differential", {})
    if not isinstance(diff, dict):
        raise ValidationError(f"{where}.differential: expected an object")
    images = {}
    for name, text in diff.items():
        if name not in P.index:
            raise ValidationError(f"{where}.differential: unknown generator {name!r}")
        images[name] = parse_elem(P, text, f"{where}.differential.{name}")
    return CDGA(P, images)


def cdga_to_json(A: CDGA) -> Dict[str, Any]:
    return {
        "generators": generators_to_json(A.presentation),
        "differential": {n: format_element(e) for n, e in A.differential.items() if e},
    }


def parse_morphism(doc: Mapping, target: CDGA) -> MorphismPresentation:
    """The ``morphism`` section, defaulting to the structure map Q -> target."""
    sec = doc.get("morphism")
    if sec is None:
        return structure_map(target)
    if not isinstance(sec, dict):
        raise ValidationError("morphism: expected an object")
    src = sec.get("source", "ground")
    if src == "ground":
        A = ground_field()
    elif isinstance(src, dict):
        A = parse_cdga(src, "morphism.source")
    else:
        raise ValidationError("morphism.source: expected 'ground' or an algebra section")
    imgs = sec.get("images", {})
    if not isinstance(imgs, dict):
        raise ValidationError("morphism.images: expected an object")
    images = {n: parse_elem(target.presentation, t, f"morphism.images.{n}") for n, t in imgs.items()}
    return MorphismPresentation(A, target, images)


# ----------------------------------------------------------------------
# quotient data
# ----------------------------------------------------------------------


def parse_affine(doc: Mapping) -> AffineData:
    return AffineData(parse_generators(_need(doc, "affine"), "affine"))


def parse_lie(doc: Mapping) -> LieAlgebraData:
    sec = _need(doc, "lie")
    if not isinstance(sec, dict):
        raise ValidationError("lie: expected an object")
    preset = sec.get("preset")
    if preset is not None:
        if preset == "sl2":
            return sl2()
        if isinstance(preset, str) and preset.startswith("gl") and preset[2:].isdigit():
            return gl(int(preset[2:]))
        if isinstance(preset, str) and preset.startswith("abelian:") and preset[8:].isdigit():
            return abelian(int(preset[8:]))
        raise ValidationError(f"lie.preset: unknown preset {preset!r}")
    basis = _need(sec, "basis", "lie")
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise ValidationError("lie.basis: expected a list of names")
    consts: Dict[tuple, Dict[str, Fraction]] = {}
    for k, entry in enumerate(sec.get("brackets", [])):
        at = f"lie.brackets[{k}]"
        if not isinstance(entry, list) or len(entry) != 3 or not isinstance(entry[2], dict):
            raise ValidationError(f"{at}: expected [a, b, {{c: coefficient}}]")
        a, b, vec = entry
        consts[(a, b)] = {c: parse_scalar(v, f"{at}.{c}") for c, v in vec.items()}
    return LieAlgebraData(basis, consts)


def lie_to_json(g: LieAlgebraData) -> Dict[str, Any]:
    brackets = []
    for (i, j), vec in sorted(g.constants.items()):
        if vec:
            brackets.append([g.basis[i], g.basis[j], {g.basis[k]: format_scalar(c) for k, c in sorted(vec.items())}])
    return {"basis": list(g.basis), "brackets": brackets}


def parse_dual_weights(doc: Mapping) -> Optional[Dict[str, int]]:
    dw = doc.get("lie", {}).get("dual_weights") if isinstance(doc.get("lie"), dict) else None
    if dw is None:
        return None
    if not isinstance(dw, dict) or not all(isinstance(v, int) and not isinstance(v, bool) for v in dw.values()):
        raise ValidationError("lie.dual_weights: expected {basis: integer}")
    return dict(dw)


def parse_action(doc: Mapping, Y: AffineData, g: LieAlgebraData) -> ActionData:
    sec = doc.get("action")
    if sec is None:
        return ActionData.trivial(Y, g)
    if not isinstance(sec, dict):
        raise ValidationError("action: expected an object")
    fields: Dict[str, Dict[str, str]] = {}
    for b, row in sec.items():
        if not isinstance(row, dict):
            raise ValidationError(f"action.{b}: expected {{generator: element}}")
        fields[b] = {}
        for x, t in row.items():
            parse_elem(Y.presentation, t, f"action.{b}.{x}")
            fields[b][x] = t
    return ActionData(Y, g, fields)


def parse_matrix(B: CDGA, rows: Any, where: str) -> List[List[Element]]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{where}: expected a list of rows")
    return [[parse_elem(B.presentation, x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]


def matrix_to_json(m) -> List[List[str]]:
    return [[format_element(x) for x in row] for row in m]


def parse_module(B: CDGA, sec: Any, where: str = "module") -> FreeDGModule:
    if not isinstance(sec, dict):
        raise ValidationError(f"{where}: expected an object")
    basis = []
    for k, b in enumerate(_need(sec, "basis", where)):
        if not isinstance(b, list) or not 1 <= len(b) <= 3:
            raise ValidationError(f"{where}.basis[{k}]: expected [name, degree, weight]")
        basis.append(BasisSpec(b[0], b[1] if len(b) > 1 else 0, b[2] if len(b) > 2 else 0))
    D = sec.get("differential")
    D = parse_matrix(B, D, f"{where}.differential") if D is not None else None
    return FreeDGModule(B, basis, D)


# ----------------------------------------------------------------------
# report documents
# ----------------------------------------------------------------------


@dataclass
class ReportDocument:
    """Everything a run produces; ``timing`` is the only nondeterministic field."""

    command: str
    options: Dict[str, Any]
    report: VerificationReport
    result: Dict[str, Any] = field(default_factory=dict)
    timing: float = 0.0
    tool: str = TOOL
    version: str = ""

    @property
    def verdict(self) -> Verdict:
        return self.report.verdict

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    def to_dict(self, with_timing: bool = True) -> Dict[str, Any]:
        d = {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "options": self.options,
            "verdict": self.verdict.value,
            "report": self.report.to_dict(),
            "result": self.result,
        }
        if with_timing:
            d["timing"] = {"seconds": round(self.timing, 6)}
        return d

    def to_json(self, with_timing: bool = True) -> str:
        return dumps(self.to_dict(with_timing))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ReportDocument":
        rep = VerificationReport.from_dict(d["report"])
        if rep.verdict.value != d["verdict"]:
            raise ValidationError("report verdict disagrees with the top-level verdict")
        return cls(
            command=d["command"],
            options=dict(d["options"]),
            report=rep,
            result=dict(d.get("result", {})),
            timing=float(d.get("timing", {}).get("seconds", 0.0)),
            tool=d.get("tool", TOOL),
            version=d.get("version", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(load_document(text))

    def same_content(self, other: "ReportDocument") -> bool:
        return self.to_dict(with_timing=False) == other.to_dict(with_timing=False)

    def to_text(self) -> str:
        lines = [f"{self.tool} {self.version} {self.command}: {self.verdict.value.upper()}"]
        lines.extend(self.report.lines(1))
        for key in sorted(self.result):
            val = self.result[key]
            flat = json.dumps(val, sort_keys=True)
            if isinstance(val, (dict, list)) and len(flat) > 100:
                lines.append(f"{key}:")
                lines.extend("  " + ln for ln in json.dumps(val, sort_keys=True, indent=2).splitlines())
            else:
                lines.append(f"{key}: {flat}")
        lines.append(f"time: {self.timing:.3f}s")
        return "\n".join(lines) + "\n"
