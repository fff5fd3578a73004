"""Dormand-Prince 5(4) integration and trajectory-level checks."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .expr import DomainError, Expr, as_expr, compile_expr, diff, evaluate, parse, substitute

# Butcher tableau of the 5(4) pair; row i gives a_{i,j} for j < i.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
# continuous extension coefficients (Hairer, Norsett & Wanner)
_D = np.array(
    [
        -12715105075 / 11282082432,
        0.0,
        87487479700 / 32700410799,
        -10690763975 / 1880347072,
        701980252875 / 199316789632,
        -1453857185 / 822651844,
        69997945 / 29380423,
    ]
)

BLOWUP = 1e8


class IntegrationError(RuntimeError):
    pass


class SingularityError(IntegrationError):
    """The step size collapsed, typically near a singular locus."""


class BlowUpError(IntegrationError):
    pass


@dataclass
class Trajectory:
    """Accepted steps with a quartic dense-output interpolant on each."""

    x: np.ndarray
    y: np.ndarray  # shape (n_points, dim)
    coeffs: np.ndarray = field(repr=False)  # shape (n_steps, 5, dim)
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0
    columns: tuple = ("u", "ux")

    @property
    def direction(self) -> float:
        return 1.0 if self.x[-1] >= self.x[0] else -1.0

    def _locate(self, xq):
        xq = np.atleast_1d(np.asarray(xq, dtype=float))
        lo, hi = min(self.x[0], self.x[-1]), max(self.x[0], self.x[-1])
        if np.any((xq < lo - 1e-12 * (1 + abs(lo))) | (xq > hi + 1e-12 * (1 + abs(hi)))):
            raise ValueError("evaluation outside the integrated interval")
        if self.direction > 0:
            idx = np.searchsorted(self.x, xq, side="right") - 1
        else:
            idx = len(self.x) - 1 - np.searchsorted(self.x[::-1], xq, side="left")
        idx = np.clip(idx, 0, len(self.x) - 2)
        h = self.x[idx + 1] - self.x[idx]
        theta = (xq - self.x[idx]) / h
        return idx, theta, h

    def __call__(self, xq) -> np.ndarray:
        """Interpolated state; shape (len(xq), dim) or (dim,) for a scalar."""
        scalar = np.ndim(xq) == 0
        idx, th, _ = self._locate(xq)
        r = self.coeffs[idx]
        t = th[:, None]
        out = r[:, 0] + t * (r[:, 1] + (1 - t) * (r[:, 2] + t * (r[:, 3] + (1 - t) * r[:, 4])))
        return out[0] if scalar else out

    def derivative(self, xq) -> np.ndarray:
        """d/dx of the dense-output interpolant."""
        scalar = np.ndim(xq) == 0
        idx, th, h = self._locate(xq)
        r = self.coeffs[idx]
        t = th[:, None]
        dth = (
            r[:, 1]
            + (1 - 2 * t) * r[:, 2]
            + (2 * t - 3 * t**2) * r[:, 3]
            + (2 * t - 6 * t**2 + 4 * t**3) * r[:, 4]
        )
        out = dth / h[:, None]
        return out[0] if scalar else out

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(("x",) + tuple(self.columns))
        for xi, yi in zip(self.x, self.y):
            wr.writerow([repr(float(xi))] + [repr(float(v)) for v in yi])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def stats(self) -> dict:
        return {"steps": self.steps, "rejected": self.rejected, "max_local_error": self.max_error}


def dopri45(
    f: Callable[[float, np.ndarray], np.ndarray],
    x0: float,
    y0,
    x_end: float,
    tol: float = 1e-10,
    h0: float | None = None,
    columns=None,
) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) with error per step <= tol*(1+|y|)."""
    if not 1e-13 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-13, 1e-4]")
    y = np.array(y0, dtype=float)
    span = x_end - x0
    if span == 0:
        raise ValueError("empty integration interval")
    direction = math.copysign(1.0, span)
    hmin = 1e-12 * abs(span)
    h = direction * (h0 if h0 else min(abs(span), 1e-2))
    x = float(x0)
    k = np.empty((7, y.size))
    k[0] = f(x, y)
    xs, ys, cs = [x], [y.copy()], []
    steps = rejected = 0
    max_err = 0.0
    while direction * (x_end - x) > 0:
        if direction * (x + h - x_end) > 0:
            h = x_end - x
        for i in range(1, 7):
            yi = y + h * (np.dot(_A[i], k[:i]))
            k[i] = f(x + _C[i] * h, yi)
        y_new = y + h * np.dot(_B5, k)
        err_vec = h * np.dot(_E, k)
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        with np.errstate(invalid="ignore"):
            err = float(np.max(np.abs(err_vec) / scale))
        if not np.all(np.isfinite(y_new)) or not math.isfinite(err):
            err = math.inf
        if err <= 1.0:
            steps += 1
            max_err = max(max_err, float(np.max(np.abs(err_vec))))
            # dense output coefficients
            ydiff = y_new - y
            bspl = h * k[0] - ydiff
            k_new = f(x + h, y_new)
            r = np.stack(
                [y, ydiff, bspl, ydiff - h * k_new - bspl, h * np.dot(_D, np.vstack([k[:6], k_new[None]]))]
            )
            cs.append(r)
            x = x + h
            y = y_new
            k[0] = k_new
            xs.append(x)
            ys.append(y.copy())
            if np.max(np.abs(y)) > BLOWUP:
                raise BlowUpError(f"solution exceeds {BLOWUP:g} at x={x}")
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
        else:
            rejected += 1
            fac = 0.2 if not math.isfinite(err) else max(0.2, 0.9 * err ** (-0.2))
        h *= fac
        if abs(h) < hmin and direction * (x_end - x) > hmin:
            raise SingularityError(f"step size collapsed at x={x}")
    cols = tuple(columns) if columns else tuple(f"y{i}" for i in range(y.size))
    return Trajectory(
        x=np.array(xs),
        y=np.array(ys),
        coeffs=np.array(cs),
        steps=steps,
        rejected=rejected,
        max_error=max_err,
        columns=cols,
    )


def _scalar_fn(e: Expr, names, params):
    fn = compile_expr(e)
    params = dict(params or {})

    def g(*vals):
        env = dict(zip(names, vals))
        env.update(params)
        return float(fn(env))

    return g


def integrate_ode2(phi, x0, u0, ux0, x_end, tol=1e-10, params=None) -> Trajectory:
    """Integrate u'' = phi(x, u, ux) from (x0, u0, ux0) to x_end."""
    g = _scalar_fn(as_expr(phi), ("x", "u", "ux"), params)
    start = g(x0, u0, ux0)
    if not math.isfinite(start):
        raise DomainError(f"right-hand side undefined at the initial point ({x0}, {u0}, {ux0})")

    def f(x, y):
        return np.array([y[1], g(x, y[0], y[1])])

    return dopri45(f, x0, [u0, ux0], x_end, tol=tol, columns=("u", "ux"))


def integrate_ode1(rhs, x0, w0, x_end, tol=1e-10, var="w", params=None) -> Trajectory:
    """Integrate w' = rhs(x, w)."""
    g = _scalar_fn(as_expr(rhs), ("x", var), params)

    def f(x, y):
        return np.array([g(x, y[0])])

    return dopri45(f, x0, [w0], x_end, tol=tol, columns=(var,))


def first_integral_drift(I: Callable | Expr, traj: Trajectory, params=None) -> float:
    """Largest relative change of I along the trajectory samples.

    `I` is an expression in (x, u, ux) or a callable taking arrays x, u, ux.
    """
    if isinstance(I, Expr):
        fn = compile_expr(I)
        env = {"x": traj.x, "u": traj.y[:, 0], "ux": traj.y[:, 1]}
        env.update(params or {})
        vals = fn(env)
    else:
        vals = np.asarray(I(traj.x, traj.y[:, 0], traj.y[:, 1]), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise DomainError(f"first integral undefined at trajectory sample x={traj.x[bad]}")
    return float(np.max(np.abs(vals - vals[0])) / (1.0 + abs(vals[0])))


@dataclass(frozen=True)
class ClosedFormSolution:
    """u(x) as an expression in x with constants C1, C2 bound by value."""

    expr: Expr
    C1: float
    C2: float
    interval: tuple

    @classmethod
    def from_text(cls, text, C1, C2, interval, functions=None) -> "ClosedFormSolution":
        return cls(parse(text, functions), float(C1), float(C2), tuple(interval))

    @property
    def params(self) -> dict:
        return {"C1": self.C1, "C2": self.C2}

    def derivatives(self) -> tuple[Expr, Expr, Expr]:
        u = self.expr
        du = diff(u, "x")
        return u, du, diff(du, "x")

    def values(self, xs) -> tuple:
        u, du, ddu = self.derivatives()
        env = {"x": np.asarray(xs, dtype=float), **self.params}
        return tuple(evaluate(e, env, strict=True) for e in (u, du, ddu))


def check_closed_form(sol: ClosedFormSolution, phi, n: int = 200, params=None) -> float:
    """Max over a uniform grid of |u'' - phi(x, u, u')| / (1 + |phi|)."""
    a, b = sol.interval
    xs = np.linspace(a, b, n)
    u, du, ddu = (np.broadcast_to(v, xs.shape) for v in sol.values(xs))
    env = {"x": xs, "u": u, "ux": du}
    env.update(params or {})
    ph = evaluate(as_expr(phi), env, strict=True)
    return float(np.max(np.abs(ddu - ph) / (1.0 + np.abs(ph))))


def closed_form_initial_data(sol: ClosedFormSolution, x0: float) -> tuple[float, float]:
    u, du, _ = sol.values(np.array([x0]))
    return float(np.ravel(u)[0]), float(np.ravel(du)[0])


def fit_constants(template: Expr, x0, u0, ux0, guess=(0.0, 0.0)) -> tuple[float, float]:
    """Solve for (C1, C2) so the template matches u(x0)=u0, u'(x0)=ux0."""
    from scipy.optimize import least_squares

    du = diff(template, "x")
    fu, fdu = compile_expr(template), compile_expr(du)

    def resid(c):
        env = {"x": x0, "C1": c[0], "C2": c[1]}
        r = np.array([float(fu(env)) - u0, float(fdu(env)) - ux0])
        return np.where(np.isfinite(r), r, 1e6)

    out = least_squares(resid, np.asarray(guess, dtype=float), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return float(out.x[0]), float(out.x[1])


def reduction_residual(w: Expr, rhs: Expr, traj: Trajectory, n: int = 200, params=None) -> float:
    """Residual of d/dx[w(traj)] - rhs(x, w(traj)) using dense-output derivatives.

    The derivative of the composition is taken by the chain rule with the
    interpolated (u, ux) and their interpolated derivatives.
    """
    xs = np.linspace(traj.x[0], traj.x[-1], n)
    y = traj(xs)
    dy = traj.derivative(xs)
    env = {"x": xs, "u": y[:, 0], "ux": y[:, 1]}
    env.update(params or {})
    wx, wu, wux = (compile_expr(diff(w, v))(env) for v in ("x", "u", "ux"))
    dw = wx + wu * dy[:, 0] + wux * dy[:, 1]
    wv = compile_expr(w)(env)
    renv = {"x": xs, "w": wv}
    renv.update(params or {})
    r = compile_expr(as_expr(rhs))(renv)
    return float(np.max(np.abs(dw - r) / (1.0 + np.abs(r))))
