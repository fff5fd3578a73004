"""Built-in problems.

Every entry is a plain problem document (see `lambdaquad.problem`), so the
catalog doubles as a set of example inputs for the command line.
"""

from __future__ import annotations

import math
import re

from .problem import Problem

PG27_BOX = {"x": [0.0, 1.0], "u": [0.5, 2.0], "ux": [-2.0, 2.0], "excluded": ["u"]}

PG27_LAMBDAS = {
    "lambda1": "ux/u - u + 1/u",
    "lambda2": "ux/u - u - 1/u",
    "f1": "u^2",
    "f2": "u^2",
}

W1 = "-(ux + u^2 + 1)/(2*u)"
W2 = "(ux + u^2 - 1)/(2*u)"


def pg27_phi(F: str) -> str:
    return f"ux^2/(2*u) - 2*u*ux - u^3/2 + ({F})*u - 1/(2*u)"


def pg27_general_spec(F: str = "sin(x)", name: str | None = None) -> dict:
    """The family with forcing F(x), solved through two numerical linear bases.

    Both bases start at x = 0 with unit Wronskian, which is why no
    Wronskian factors appear in the formulas below.
    """
    D1 = "((u^2 + ux + 1)*psi2(x) - 2*u*dpsi2(x))"
    D2 = "((u^2 + ux - 1)*theta2(x) - 2*u*dtheta2(x))"
    span = [-0.5, 1.5]
    return {
        "name": name or f"pg27_general({F})",
        "F": F,
        "phi": pg27_phi(F),
        **PG27_LAMBDAS,
        "g1": f"(theta2(x)*{W2} - dtheta2(x))^2",
        "g2": f"(psi2(x)*{W1} + dpsi2(x))^2",
        "box": PG27_BOX,
        "base_point": [0.0, 1.0, -2.0],
        "linear_bases": {
            "psi": {"q": f"(({F}) + 1)/2", "x0": 0.0, "span": span},
            "theta": {"q": f"(({F}) - 1)/2", "x0": 0.0, "span": span},
        },
        "closed_forms": {
            "rho": "2/u",
            "w1": W1,
            "w2": W2,
            "I1": f"((u^2 + ux + 1)*psi1(x) - 2*u*dpsi1(x))/{D1}",
            "I2": f"((u^2 + ux - 1)*theta1(x) - 2*u*dtheta1(x))/{D2}",
            "mu1": f"-2*u/{D1}^2",
            "mu2": f"-2*u/{D2}^2",
            "M": f"8*u/({D1}^2*{D2}^2)",
            "h1": f"{D2}^2/4",
            "h2": f"{D1}^2/4",
        },
        "reduced": {
            "phi1": f"w^2 - (({F}) + 1)/2",
            "phi2": f"-w^2 + (({F}) - 1)/2",
            "g1": "(theta2(x)*w - dtheta2(x))^2",
            "g2": "(psi2(x)*w + dpsi2(x))^2",
            "nu1": "1/(psi2(x)*w + dpsi2(x))^2",
            "nu2": "1/(theta2(x)*w - dtheta2(x))^2",
            "Ihat1": "(w*psi1(x) + dpsi1(x))/(w*psi2(x) + dpsi2(x))",
            "Ihat2": "(w*theta1(x) - dtheta1(x))/(w*theta2(x) - dtheta2(x))",
        },
        "aux": {
            "C": 0.3,
            "H1": "2*u*(C*dpsi2(x) - dpsi1(x))/(C*psi2(x) - psi1(x)) - u^2 - 1",
            "H2": "2*u*(C*dtheta2(x) - dtheta1(x))/(C*theta2(x) - theta1(x)) - u^2 + 1",
            "nu_tilde1_variant": "-(C*psi2(x) - psi1(x))/(u^2*(C*dpsi2(x) - dpsi1(x)))",
            "nu_tilde2_variant": "(C*theta2(x) - theta1(x))/(u^2*(C*dtheta2(x) - dtheta1(x)))",
        },
        "solutions": [
            {
                "name": "general",
                "u": "1/((C1*dpsi2(x) - dpsi1(x))/(C1*psi2(x) - psi1(x))"
                " - (C2*dtheta2(x) - dtheta1(x))/(C2*theta2(x) - theta1(x)))",
                "C1": 0.3,
                "C2": 0.7,
                "interval": [0.0, 0.4],
            }
        ],
        "trajectories": [{"ic": [0.0, 1.0, 0.0], "x_end": 0.5}],
    }


def pg27_f0_spec() -> dict:
    # constants placing the coth branch of the explicit solution on u(0)=1, u'(0)=0
    c1 = math.atanh(1 / math.sqrt(2)) / math.sqrt(2)
    return {
        "name": "pg27_f0",
        "F": "0",
        "phi": "ux^2/(2*u) - 2*u*ux - u^3/2 - 1/(2*u)",
        **PG27_LAMBDAS,
        "g1": f"2*({W2})^2 + 1",
        "g2": f"2*({W1})^2 - 1",
        "box": PG27_BOX,
        "base_point": [0.0, 1.0, -2.0],
        "closed_forms": {
            "rho": "2/u",
            "rho1": "-ux/u - u + 1/u",
            "rho2": "-ux/u - u - 1/u",
            "w1": W1,
            "w2": W2,
            "I1": "-1/2*(x - sqrt(2)*arctanh((u^2 + ux + 1)/(sqrt(2)*u)))",
            "I2": "1/2*(x + sqrt(2)*arctan((u^2 + ux - 1)/(sqrt(2)*u)))",
            "mu1": "-u/((u^2 + ux + 1)^2 - 2*u^2)",
            "mu2": "u/((u^2 + ux - 1)^2 + 2*u^2)",
            "M": "-2*u/(((u^2 + ux - 1)^2 + 2*u^2)*((u^2 + ux + 1)^2 - 2*u^2))",
            "h1": "((u^2 + ux - 1)^2 + 2*u^2)/2",
            "h2": "((u^2 + ux + 1)^2 - 2*u^2)/2",
            "h1_variant": "((u^2 + ux - 1)^2 + u^2)/2",
            "h2_variant": "((u^2 + ux + 1)^2 - u^2)/2",
        },
        "reduced": {
            "phi1": "w^2 - 1/2",
            "phi2": "-w^2 - 1/2",
            "g1": "2*w^2 + 1",
            "g2": "2*w^2 - 1",
            "nu1": "1/(2*w^2 - 1)",
            "nu2": "1/(2*w^2 + 1)",
        },
        "solutions": [
            {
                "name": "tanh branch",
                "u": "sqrt(2)/(tanh(sqrt(2)/2*(x + 2*C1)) - tan(sqrt(2)/2*(-x + 2*C2)))",
                "C1": 0.3,
                "C2": 0.7,
                "interval": [0.0, 0.4],
            },
            {
                "name": "coth branch",
                "u": "sqrt(2)/(1/tanh(sqrt(2)/2*(x + 2*C1)) - tan(sqrt(2)/2*(-x + 2*C2)))",
                "C1": c1,
                "C2": 0.0,
                "interval": [0.0, 0.5],
            },
        ],
        "trajectories": [{"ic": [0.0, 1.0, 0.0], "x_end": 0.5}],
    }


def example9_spec() -> dict:
    R = "sqrt(u^2 + (ux + 1)^2)"
    return {
        "name": "example9",
        "phi": "-ux/u - 1/u - u",
        "lambda1": "-(1/u + (u^2 + 1)/(ux*u))",
        "lambda2": "(ux + 1)/u",
        "f1": "ux",
        "f2": f"u/{R}",
        "g1": "1",
        "g2": "1",
        "box": {"x": [0.0, 1.0], "u": [0.5, 2.0], "ux": [0.2, 2.0], "excluded": ["u", "ux"]},
        "base_point": [0.0, 1.0, 1.0],
        "closed_forms": {
            "rho": "(ux + 1)/(ux*u)",
            "w1": f"{R} - ln(abs(({R} + ux + 1)/u))",
            "w2": "arctan(u/(1 + ux))",
            "I1": f"{R} - arctanh((ux + 1)/{R})",
            "I2": "x - arctan(u/(ux + 1))",
        },
        "reduced": {"phi1": "0", "phi2": "1", "g1": "1", "g2": "1", "nu1": "1", "nu2": "1"},
        "solutions": [
            {
                "name": "explicit",
                "u": "sin(C2 - x)*(C1 - arctanh(cos(C2 - x)))",
                "C1": 1.0,
                "C2": math.pi / 2,
                "interval": [0.0, 1.0],
                "abel_w": "1/(cos(C2 - x)*(arctanh(cos(C2 - x)) - C1) - 1)",
            }
        ],
        "trajectories": [
            {"ic": [0.0, 1.0, -1.0], "x_end": 1.0},
            {"ic": [0.0, 1.0, 2.0], "x_end": 0.5},
        ],
    }


def pg27_airy_spec() -> dict:
    return pg27_general_spec("2*x + 1", name="pg27_airy")


SPECS = {
    "pg27_f0": pg27_f0_spec,
    "pg27_airy": pg27_airy_spec,
    "pg27_general": pg27_general_spec,
    "example9": example9_spec,
}

_GENERAL = re.compile(r"^pg27_general\((?P<F>.+)\)$")


def catalog_names() -> list[str]:
    return sorted(SPECS)


def get_spec(name: str) -> dict:
    m = _GENERAL.match(name.strip())
    if m:
        return pg27_general_spec(m.group("F"))
    try:
        return SPECS[name]()
    except KeyError:
        raise KeyError(f"unknown catalog problem {name!r}; known: {', '.join(catalog_names())}") from None


def get_problem(name: str) -> Problem:
    return Problem.from_dict(get_spec(name))
