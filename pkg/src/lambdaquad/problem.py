"""Problem bundles and their JSON form.

A problem document is a JSON object whose expression fields are strings in
the infix grammar.  Linear bases listed under ``linear_bases`` are
generated numerically at load time and their solutions become callable
functions (``psi1(x)``, ``dpsi1(x)``, ...) inside every other expression.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .expr import Box, Expr, Point, parse, render
from .linear import LinearBasis, make_linear_basis

REQUIRED = ("phi", "lambda1", "lambda2", "f1", "f2", "box", "base_point")


class ProblemError(ValueError):
    pass


@dataclass
class Problem:
    name: str
    phi: Expr
    lambda1: Expr
    lambda2: Expr
    f1: Expr
    f2: Expr
    g1: Expr | None
    g2: Expr | None
    box: Box
    base_point: Point
    F: Expr | None = None
    bases: dict[str, LinearBasis] = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    closed_forms: dict[str, Expr] = field(default_factory=dict)
    reduced: dict[str, Expr] = field(default_factory=dict)
    aux: dict[str, Any] = field(default_factory=dict)
    solutions: list[dict] = field(default_factory=list)
    trajectories: list[dict] = field(default_factory=list)
    source: dict = field(default_factory=dict, repr=False)

    def parse(self, text: str) -> Expr:
        return parse(text, self.functions)

    @classmethod
    def from_dict(cls, d: dict) -> "Problem":
        missing = [k for k in REQUIRED if k not in d]
        if missing:
            raise ProblemError(f"problem spec lacks fields: {', '.join(missing)}")
        bases: dict[str, LinearBasis] = {}
        functions: dict = {}
        for bname, spec in d.get("linear_bases", {}).items():
            q = parse(spec["q"])
            basis = make_linear_basis(q, spec.get("x0", 0.0), tuple(spec["span"]), name=bname)
            bases[bname] = basis
            functions.update(basis.functions())

        def p(text):
            return parse(text, functions)

        try:
            box_spec = d["box"]
            box = Box(
                {k: tuple(box_spec[k]) for k in ("x", "u", "ux")},
                tuple(p(t) for t in box_spec.get("excluded", [])),
            )
        except KeyError as exc:
            raise ProblemError(f"box lacks interval {exc}") from None
        base = Point.of(d["base_point"])
        aux = {}
        for k, v in d.get("aux", {}).items():
            aux[k] = p(v) if isinstance(v, str) else v
        sols = []
        for s in d.get("solutions", []):
            sols.append({**s, "expr": p(s["u"])})
        return cls(
            name=d.get("name", "unnamed"),
            phi=p(d["phi"]),
            lambda1=p(d["lambda1"]),
            lambda2=p(d["lambda2"]),
            f1=p(d["f1"]),
            f2=p(d["f2"]),
            g1=p(d["g1"]) if d.get("g1") else None,
            g2=p(d["g2"]) if d.get("g2") else None,
            box=box,
            base_point=base,
            F=p(d["F"]) if d.get("F") else None,
            bases=bases,
            functions=functions,
            closed_forms={k: p(v) for k, v in d.get("closed_forms", {}).items()},
            reduced={k: p(v) for k, v in d.get("reduced", {}).items()},
            aux=aux,
            solutions=sols,
            trajectories=[dict(t) for t in d.get("trajectories", [])],
            source=d,
        )

    def to_dict(self) -> dict:
        """Serializable document; expressions are re-rendered from the trees."""
        d: dict[str, Any] = {"name": self.name}
        for k in ("phi", "lambda1", "lambda2", "f1", "f2", "g1", "g2", "F"):
            v = getattr(self, k)
            if v is not None:
                d[k] = render(v)
        d["box"] = {k: list(v) for k, v in self.box.intervals.items()}
        d["box"]["excluded"] = [render(e) for e in self.box.excluded]
        d["base_point"] = list(self.base_point.as_tuple())
        if self.bases:
            d["linear_bases"] = {
                n: {"q": render(b.q), "x0": b.x0, "span": list(b.span)} for n, b in self.bases.items()
            }
        for key in ("closed_forms", "reduced"):
            if getattr(self, key):
                d[key] = {k: render(v) for k, v in getattr(self, key).items()}
        if self.aux:
            d["aux"] = {k: render(v) if isinstance(v, Expr) else v for k, v in self.aux.items()}
        if self.solutions:
            d["solutions"] = [
                {k: (render(v) if k == "expr" else v) for k, v in s.items() if k != "expr"}
                for s in self.solutions
            ]
        if self.trajectories:
            d["trajectories"] = self.trajectories
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_problem(path) -> Problem:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"{path}: {exc}") from None
    return Problem.from_dict(d)
