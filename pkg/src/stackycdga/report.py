"""Structured verdicts shared by every check."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "unknown": 2}[self.value]

    @classmethod
    def of(cls, ok: bool) -> "Verdict":
        return cls.PASS if ok else cls.FAIL


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``witness`` holds a JSON-ready description (strings, numbers, lists,
    dicts); ``payload`` carries the live Python objects behind it and is
    never serialized.
    """

    check: str
    verdict: Verdict
    message: str = ""
    witness: Any = None
    children: List["VerificationReport"] = field(default_factory=list)
    payload: Any = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def __bool__(self):
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"check": self.check, "verdict": self.verdict.value}
        if self.message:
            d["message"] = self.message
        if self.witness is not None:
            d["witness"] = self.witness
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "VerificationReport":
        return cls(
            check=d["check"],
            verdict=Verdict(d["verdict"]),
            message=d.get("message", ""),
            witness=d.get("witness"),
            children=[cls.from_dict(c) for c in d.get("children", [])],
        )

    def lines(self, indent: int = 0) -> List[str]:
        pad = "  " * indent
        out = [f"{pad}{self.check}: {self.verdict.value.upper()}" + (f" - {self.message}" if self.message else "")]
        if self.witness is not None and not self.children:
            out.append(f"{pad}  witness: {self.witness}")
        for c in self.children:
            out.extend(c.lines(indent + 1))
        return out

    def __str__(self):
        return "\n".join(self.lines())


def combine(check: str, children: List[VerificationReport], message: str = "") -> VerificationReport:
    """PASS iff all children pass; UNKNOWN beats PASS, FAIL beats both."""
    verdicts = {c.verdict for c in children}
    if Verdict.FAIL in verdicts:
        v = Verdict.FAIL
    elif Verdict.UNKNOWN in verdicts:
        v = Verdict.UNKNOWN
    else:
        v = Verdict.PASS
    return VerificationReport(check, v, message, children=list(children))
