"""Numerical fundamental pairs of psi'' = q(x) psi exposed as expression functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expr, UserFunction, Var, as_expr, call, mul, substitute
from .numverify import Trajectory, integrate_ode2


@dataclass
class LinearBasis:
    """Solutions with (psi, psi') = (1, 0) and (0, 1) at x0.

    Each solution is tabulated on both sides of x0 so the pair covers
    ``span``; the Wronskian is 1 at x0 and stays constant in exact
    arithmetic because the equation has no first-derivative term.
    """

    name: str
    q: Expr
    x0: float
    span: tuple
    pieces: dict  # solution index -> list of trajectories

    def _eval(self, idx: int, col: int, xs):
        xs = np.asarray(xs, dtype=float)
        flat = xs.ravel()
        out = np.full(flat.shape, np.nan)
        for traj in self.pieces[idx]:
            lo, hi = sorted((traj.x[0], traj.x[-1]))
            m = (flat >= lo) & (flat <= hi) & np.isnan(out)
            if m.any():
                out[m] = traj(flat[m])[:, col]
        return out.reshape(xs.shape) if xs.ndim else float(out[0])

    def value(self, idx, xs):
        return self._eval(idx, 0, xs)

    def slope(self, idx, xs):
        return self._eval(idx, 1, xs)

    def wronskian(self, xs):
        return self.value(1, xs) * self.slope(2, xs) - self.slope(1, xs) * self.value(2, xs)

    def functions(self) -> dict[str, UserFunction]:
        """User functions ``name1, name2, dname1, dname2`` for the parser."""
        fns: dict[str, UserFunction] = {}
        for i in (1, 2):
            val_name, der_name = f"{self.name}{i}", f"d{self.name}{i}"

            def d_val(arg, der_name=der_name):
                return call(fns[der_name], arg)

            def d_der(arg, val_name=val_name):
                return mul(substitute(self.q, {"x": arg}), call(fns[val_name], arg))

            fns[val_name] = UserFunction(val_name, lambda x, i=i: self.value(i, x), d_val)
            fns[der_name] = UserFunction(der_name, lambda x, i=i: self.slope(i, x), d_der)
        return fns


def make_linear_basis(q, x0: float = 0.0, span=(0.0, 1.0), name: str = "psi", tol: float = 1e-12) -> LinearBasis:
    q = as_expr(q)
    phi = mul(q, Var("u"))
    a, b = float(span[0]), float(span[1])
    if not a <= x0 <= b:
        raise ValueError("x0 must lie inside the span")
    pieces = {1: [], 2: []}
    for idx, (u0, p0) in ((1, (1.0, 0.0)), (2, (0.0, 1.0))):
        for end in (b, a):
            if end != x0:
                pieces[idx].append(integrate_ode2(phi, x0, u0, p0, end, tol=tol))
    return LinearBasis(name, q, float(x0), (a, b), pieces)
