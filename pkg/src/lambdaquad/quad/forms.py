"""Exact one-forms and their potentials by axis-aligned path integration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..expr import (
    Box,
    Expr,
    as_expr,
    compile_expr,
    diff,
    is_zero_sampled,
    singular_loci,
    sub,
)
from .gk import QuadratureError, integrate

LOCUS_MARGIN = 1e-2


class NoAdmissiblePath(RuntimeError):
    pass


@dataclass
class OneForm:
    """sum_v components[v] dv over a subset of the jet coordinates.

    Coordinates not listed are held fixed along every path (they act as
    parameters of the potential).
    """

    components: Mapping[str, Expr]
    box: Box
    name: str = ""
    _closed: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.components = {k: as_expr(v) for k, v in self.components.items()}

    @property
    def variables(self) -> tuple:
        return tuple(self.components)

    def loci(self) -> list:
        out = list(self.box.excluded)
        for c in self.components.values():
            for locus in singular_loci(c):
                if locus not in out:
                    out.append(locus)
        return out

    def closedness_residual(self, n=200, tol=1e-9, seed=None, params=None) -> float:
        """Largest sampled relative residual of the mixed-partials identities (cached)."""
        key = (n, tol, seed, tuple(sorted((params or {}).items())))
        if key not in self._closed:
            kw = {"params": params} if seed is None else {"params": params, "seed": seed}
            worst = 0.0
            for r in closedness_residuals(self):
                worst = max(worst, is_zero_sampled(r, self.box, n=n, tol=tol, **kw).max_residual)
            self._closed[key] = worst
        return self._closed[key]


def closedness_residuals(form: OneForm) -> list[Expr]:
    out = []
    for a, b in itertools.combinations(form.variables, 2):
        out.append(sub(diff(form.components[a], b), diff(form.components[b], a)))
    return out


@dataclass
class QuadratureResult:
    value: float
    path: list
    estimated_error: float
    closedness_residual: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "estimated_error": self.estimated_error,
            "closedness_residual": self.closedness_residual,
            "path": [list(p) for p in self.path],
        }


_ORDER = ("x", "u", "ux")


def _as_env(p) -> dict:
    if isinstance(p, Mapping):
        return {k: float(v) for k, v in p.items()}
    if hasattr(p, "as_dict"):
        return p.as_dict()
    return dict(zip(_ORDER, map(float, p)))


class PathIntegrator:
    """Line integrals of one form along staircase paths, avoiding its loci."""

    def __init__(self, form: OneForm, params: Mapping[str, float] | None = None, atol=1e-10):
        self.form = form
        self.params = dict(params or {})
        self.atol = atol
        self.fns = {v: compile_expr(c) for v, c in form.components.items()}
        self.loci = [compile_expr(l) for l in form.loci()]

    def _env(self, pts: dict) -> dict:
        env = dict(pts)
        env.update(self.params)
        return env

    def segment_ok(self, p: dict, var: str, a: float, b: float, m: int = 48) -> bool:
        """True when no locus vanishes or nears zero along the segment."""
        if a == b:
            return True
        t = np.linspace(a, b, m)
        env = self._env({k: np.full(m, v) for k, v in p.items()})
        env[var] = t
        for fn in self.loci:
            val = fn(env)
            if not np.all(np.isfinite(val)):
                return False
            if np.any(np.abs(val) < LOCUS_MARGIN) or np.any(np.sign(val) != np.sign(val[0])):
                return False
        comp = self.fns[var](env)
        return bool(np.all(np.isfinite(comp)))

    def segment_integral(self, p: dict, var: str, a: float, b: float):
        fn = self.fns[var]
        base = {k: v for k, v in p.items() if k != var}

        def f(t):
            env = self._env({k: np.full(t.shape, v) for k, v in base.items()})
            env[var] = t
            return fn(env)

        return integrate(f, a, b, atol=self.atol)

    def staircase(self, start: dict, end: dict, order: Sequence[str], k: int) -> list[tuple]:
        """Segments (point, var, a, b) of a k-step staircase from start to end."""
        segs = []
        cur = dict(start)
        for j in range(1, k + 1):
            stop = {v: start[v] + (end[v] - start[v]) * j / k for v in order}
            for v in order:
                if cur[v] != stop[v]:
                    segs.append((dict(cur), v, cur[v], stop[v]))
                    cur[v] = stop[v]
        return segs

    def plan(self, start: dict, end: dict):
        vars_ = [v for v in self.form.variables if start[v] != end[v]]
        if not vars_:
            return []
        for k in (1, 2, 4, 8, 16, 32):
            for order in itertools.permutations(vars_):
                segs = self.staircase(start, end, order, k)
                if all(self.segment_ok(*s) for s in segs):
                    return segs
        return None

    def integrate(self, start, end, waypoints: Sequence = ()) -> tuple[float, float, list]:
        """Integral from start to end; coordinates outside the form follow `end`."""
        s, e = _as_env(start), _as_env(end)
        fixed = {k: e[k] for k in e if k not in self.form.components}
        s.update(fixed)
        chain = [s] + [{**_as_env(w), **fixed} for w in waypoints] + [e]
        total = err = 0.0
        path = [dict(s)]
        for a, b in zip(chain, chain[1:]):
            segs = self.plan(a, b)
            if segs is None:
                raise NoAdmissiblePath(f"no admissible staircase from {a} to {b}")
            for p, var, lo, hi in segs:
                v, ee = self.segment_integral(p, var, lo, hi)
                total += v
                err += ee
                q = dict(p)
                q[var] = hi
                path.append(q)
        return total, err, path


def path_integrate(
    form: OneForm, base, target, params=None, waypoints: Sequence = (), atol=1e-10
) -> QuadratureResult:
    """Potential difference between two points along an admissible staircase."""
    pi = PathIntegrator(form, params=params, atol=atol)
    closed = form.closedness_residual(params=params)
    try:
        value, err, path = pi.integrate(base, target, waypoints)
    except NoAdmissiblePath:
        if waypoints:
            raise
        value, err, path = pi.integrate(base, target, _detour(pi, base, target))
    return QuadratureResult(
        value=value,
        path=[tuple(p[k] for k in _ORDER if k in p) for p in path],
        estimated_error=err,
        closedness_residual=closed,
    )


def _detour(pi: PathIntegrator, base, target, tries: int = 16):
    """Find one waypoint reachable from both ends by admissible staircases."""
    s, e = _as_env(base), _as_env(target)
    fixed = {k: e[k] for k in e if k not in pi.form.components}
    s.update(fixed)
    cand = pi.form.box.sample(tries, seed=7, params=pi.params or None)
    for i in range(tries):
        w = {**{k: float(v[i]) for k, v in cand.items()}, **fixed}
        if pi.plan(s, w) is not None and pi.plan(w, e) is not None:
            return [w]
    raise NoAdmissiblePath(f"no admissible path from {base} to {target}")


class Potential:
    """Numerical potential of an exact form, zero at `base`."""

    def __init__(self, form: OneForm, base, params=None, atol=1e-10):
        self.form = form
        self.base = _as_env(base)
        self.params = params
        self.atol = atol
        self._pi = PathIntegrator(form, params=params, atol=atol)

    def at(self, point) -> float:
        return self.result(point).value

    def result(self, point) -> QuadratureResult:
        return path_integrate(self.form, self.base, point, params=self.params, atol=self.atol)

    def __call__(self, x, u, ux) -> np.ndarray:
        xs, us, uxs = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, u, ux)))
        out = np.empty(xs.shape)
        for i in np.ndindex(xs.shape):
            out[i] = self.at((xs[i], us[i], uxs[i]))
        return out

    def along(self, points: Sequence) -> np.ndarray:
        """Potential at consecutive points, e.g. trajectory samples.

        Each value is integrated from the base directly; when no direct
        staircase exists the previous point is used as a stepping stone.
        """
        vals = np.empty(len(points))
        prev = None
        for j, p in enumerate(points):
            try:
                v, _, _ = self._pi.integrate(self.base, p)
            except (NoAdmissiblePath, QuadratureError):
                if prev is None or len(self.form.variables) < 3:
                    raise
                dv, _, _ = self._pi.integrate(points[j - 1], p)
                v = prev + dv
            vals[j] = v
            prev = v
        return vals
