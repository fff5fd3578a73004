"""Sampled zero testing on boxes of jet space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from .evaluate import compile_expr
from .nodes import Expr, ExprError, additive_terms, singular_loci

DEFAULT_SEED = 1729
LOCUS_EPS = 1e-3


class BoxExhausted(ExprError):
    """Not enough admissible sample points could be drawn from a box."""


@dataclass(frozen=True)
class Point:
    x: float
    u: float
    ux: float

    def __post_init__(self):
        for name in ("x", "u", "ux"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {name}={v}")
            object.__setattr__(self, name, v)

    def as_dict(self) -> dict:
        return {"x": self.x, "u": self.u, "ux": self.ux}

    def as_tuple(self) -> tuple:
        return (self.x, self.u, self.ux)

    @classmethod
    def of(cls, p) -> "Point":
        if isinstance(p, Point):
            return p
        if isinstance(p, Mapping):
            return cls(p["x"], p["u"], p["ux"])
        x, u, ux = p
        return cls(x, u, ux)


@dataclass(frozen=True)
class Box:
    """Closed intervals per variable plus loci whose neighbourhoods are avoided."""

    intervals: Mapping[str, tuple]
    excluded: tuple = ()

    def __post_init__(self):
        iv = {}
        for k, (lo, hi) in dict(self.intervals).items():
            lo, hi = float(lo), float(hi)
            if not hi > lo:
                raise ValueError(f"degenerate interval for {k}: [{lo}, {hi}]")
            iv[k] = (lo, hi)
        object.__setattr__(self, "intervals", iv)
        object.__setattr__(self, "excluded", tuple(self.excluded))

    @property
    def variables(self) -> tuple:
        return tuple(self.intervals)

    def replace(self, excluded=None, **intervals) -> "Box":
        iv = dict(self.intervals)
        iv.update(intervals)
        return Box(iv, self.excluded if excluded is None else tuple(excluded))

    def contains(self, p: Mapping[str, float]) -> bool:
        return all(lo <= p[k] <= hi for k, (lo, hi) in self.intervals.items() if k in p)

    def admissible(self, env: Mapping[str, object], extra: Sequence[Expr] = ()) -> np.ndarray:
        """Mask of points not within `LOCUS_EPS` of any excluded locus."""
        shape = np.broadcast_shapes(*(np.shape(v) for v in env.values()))
        ok = np.ones(shape, dtype=bool)
        for locus in tuple(self.excluded) + tuple(extra):
            val = compile_expr(locus)(env)
            ok &= np.isfinite(val) & (np.abs(val) >= LOCUS_EPS)
        return ok

    def sample(
        self,
        n: int,
        seed: int = DEFAULT_SEED,
        params: Mapping[str, float] | None = None,
        extra_loci: Sequence[Expr] = (),
        max_rounds: int = 20,
    ) -> dict:
        """Draw `n` admissible Halton points; returns arrays keyed by variable."""
        if n < 1:
            raise ValueError("n must be at least 1")
        names = self.variables
        lo = np.array([self.intervals[k][0] for k in names])
        hi = np.array([self.intervals[k][1] for k in names])
        sampler = qmc.Halton(d=len(names), scramble=True, seed=seed)
        kept = []
        total = 0
        for _ in range(max_rounds):
            raw = qmc.scale(sampler.random(max(2 * n, 64)), lo, hi)
            env = {k: raw[:, i] for i, k in enumerate(names)}
            if params:
                env.update({k: float(v) for k, v in params.items()})
            mask = self.admissible(env, extra_loci)
            kept.append(raw[mask])
            total += int(mask.sum())
            if total >= n:
                break
        if total < n:
            raise BoxExhausted(f"found {total} admissible points of {n} requested")
        pts = np.concatenate(kept)[:n]
        return {k: pts[:, i].copy() for i, k in enumerate(names)}


@dataclass
class ZeroTest:
    """Outcome of `is_zero_sampled`; truthy when the expression vanished."""

    passed: bool
    max_residual: float
    tol: float
    n_points: int
    witness: dict | None = None
    witness_value: float | None = None
    residuals: np.ndarray = field(default=None, repr=False)
    points: dict = field(default=None, repr=False)
    n_undefined: int = 0

    def __bool__(self):
        return self.passed

    def summary(self) -> dict:
        out = {"residual": self.max_residual, "tolerance": self.tol, "passed": self.passed}
        if self.witness is not None and not self.passed:
            out["witness"] = self.witness
            out["value"] = self.witness_value
        return out


def relative_residual(e: Expr, env: Mapping[str, object]):
    """|e| / (1 + largest |additive term|) evaluated pointwise; also returns e."""
    val = compile_expr(e)(env)
    scale = np.zeros_like(val)
    terms = additive_terms(e)
    if len(terms) > 1:
        for t in terms:
            scale = np.maximum(scale, np.abs(compile_expr(t)(env)))
    else:
        scale = np.abs(val)
    return np.abs(val) / (1.0 + scale), val


def is_zero_sampled(
    e: Expr,
    box: Box,
    n: int = 200,
    tol: float = 1e-9,
    seed: int = DEFAULT_SEED,
    params: Mapping[str, float] | None = None,
    avoid_singular: bool = True,
    points: Mapping[str, np.ndarray] | None = None,
) -> ZeroTest:
    """Test ``e == 0`` at `n` quasi-random admissible points of `box`.

    With `avoid_singular`, the singular loci of `e` itself (denominators,
    logarithm and root arguments) are avoided in addition to the box's.
    Points where `e` is undefined in real arithmetic are discarded and
    counted; if that leaves nothing, `BoxExhausted` is raised.
    """
    extra = singular_loci(e) if avoid_singular else ()
    if points is None:
        points = box.sample(n, seed=seed, params=params, extra_loci=extra)
    env = dict(points)
    if params:
        env.update({k: float(v) for k, v in params.items()})
    res, val = relative_residual(e, env)
    defined = np.isfinite(res)
    n_undefined = int((~defined).sum())
    if not defined.any():
        raise BoxExhausted(f"{e} is undefined at every sampled point")
    res_d = np.where(defined, res, -np.inf)
    worst = int(np.argmax(res_d))
    max_res = float(res_d[worst])
    passed = max_res <= tol
    witness = {k: float(np.asarray(v)[worst]) for k, v in points.items()}
    return ZeroTest(
        passed=passed,
        max_residual=max_res,
        tol=tol,
        n_points=int(defined.sum()),
        witness=witness,
        witness_value=float(val[worst]),
        residuals=res,
        points=dict(points),
        n_undefined=n_undefined,
    )
