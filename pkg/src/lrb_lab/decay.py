"""Decay profiles and the exact lattice sums built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .lattice import SiteGraph, _as_sites, shell_sizes

__all__ = [
    "DecayFn",
    "power_law",
    "stretched_exp",
    "finite_range",
    "decay_from_dict",
    "eval_decay",
    "double_sum",
    "tail_sum_at",
    "tail_sum_sup",
    "fit_tail_constant",
]


@dataclass(frozen=True)
class DecayFn:
    """A decay profile ``F(r)``.

    kind is one of ``power_law`` (``(1 + r + shift)**-alpha``),
    ``stretched_exp`` (``exp(-b (r + shift)**p)``) or ``finite_range``
    (1 up to ``R``, then 0). The finite-range profile is only meant for
    support tests and is never used as a norm denominator.
    """

    kind: str
    alpha: float | None = None
    b: float | None = None
    p: float | None = None
    R: int | None = None
    shift: float = 0.0

    def __post_init__(self):
        if self.shift < 0:
            raise ValueError("shift must be >= 0")
        if self.kind == "power_law":
            if self.alpha is None or not self.alpha > 0:
                raise ValueError(f"power law needs alpha > 0, got {self.alpha}")
        elif self.kind == "stretched_exp":
            if self.b is None or not self.b > 0:
                raise ValueError(f"stretched exponential needs b > 0, got {self.b}")
            if self.p is None or not 0 < self.p <= 1:
                raise ValueError(f"stretched exponential needs p in (0, 1], got {self.p}")
        elif self.kind == "finite_range":
            if self.R is None or self.R < 0:
                raise ValueError(f"finite range needs R >= 0, got {self.R}")
        else:
            raise ValueError(f"unknown decay kind {self.kind!r}")

    def __call__(self, r):
        return eval_decay(self, r)

    def shifted(self, by: float) -> "DecayFn":
        """The profile ``r -> F(r + by)``."""
        return replace(self, shift=self.shift + by)

    def reduced(self, D: int) -> "DecayFn":
        """``F_{alpha - D}``, the profile the volume sums decay with."""
        if self.kind != "power_law":
            raise ValueError("only power laws have a reduced exponent")
        if not self.alpha > D:
            raise ValueError(f"reduced profile needs alpha > D, got alpha={self.alpha}, D={D}")
        return power_law(self.alpha - D, shift=self.shift)

    def with_rate(self, b: float) -> "DecayFn":
        """Same stretched exponential with a different rate ``b``."""
        if self.kind != "stretched_exp":
            raise ValueError("with_rate applies to stretched exponentials only")
        return replace(self, b=b)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key in ("alpha", "b", "p", "R"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.shift:
            out["shift"] = self.shift
        return out


def power_law(alpha: float, shift: float = 0.0) -> DecayFn:
    return DecayFn("power_law", alpha=float(alpha), shift=shift)


def stretched_exp(b: float, p: float = 1.0, shift: float = 0.0) -> DecayFn:
    return DecayFn("stretched_exp", b=float(b), p=float(p), shift=shift)


def finite_range(R: int, shift: float = 0.0) -> DecayFn:
    return DecayFn("finite_range", R=int(R), shift=shift)


def decay_from_dict(spec: dict) -> DecayFn:
    kind = spec.get("kind")
    shift = float(spec.get("shift", 0.0))
    if kind == "power_law":
        return power_law(float(spec["alpha"]), shift=shift)
    if kind == "stretched_exp":
        return stretched_exp(float(spec["b"]), float(spec.get("p", 1.0)), shift=shift)
    if kind == "finite_range":
        return finite_range(int(spec["R"]), shift=shift)
    raise ValueError(f"unknown decay kind {kind!r}")


def eval_decay(F: DecayFn, r):
    """Evaluate ``F`` at ``r >= 0`` (scalar or array)."""
    arr = np.asarray(r, dtype=float)
    if (arr < 0).any():
        raise ValueError("decay functions are defined for r >= 0 only")
    x = arr + F.shift
    if F.kind == "power_law":
        out = (1.0 + x) ** (-F.alpha)
    elif F.kind == "stretched_exp":
        out = np.exp(-F.b * x ** F.p)
    else:
        out = np.where(x <= F.R, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


def double_sum(g: SiteGraph, F: DecayFn, X: Iterable[int], Y: Iterable[int]) -> float:
    """``sum_{x in X} sum_{y in Y} F(d(x, y))``, compensated."""
    xs, ys = _as_sites(g, X, "X"), _as_sites(g, Y, "Y")
    if xs.size == 0 or ys.size == 0:
        raise ValueError("double_sum needs non-empty sets")
    vals = eval_decay(F, g.dist[np.ix_(xs, ys)].ravel())
    return math.fsum(np.atleast_1d(vals).tolist())


def tail_sum_at(g: SiteGraph, F: DecayFn, x: int, R: float) -> float:
    """``sum_{y : d(x, y) >= R} F(d(x, y))`` for one center ``x``."""
    row = g.dist[x]
    d = row[row >= R]
    if d.size == 0:
        return 0.0
    return math.fsum(np.atleast_1d(eval_decay(F, d)).tolist())


def tail_sum_sup(g: SiteGraph, F: DecayFn, R: float) -> float:
    """Supremum over centers of :func:`tail_sum_at` on the finite graph."""
    if R < 0:
        raise ValueError("R must be non-negative")
    counts = shell_sizes(g)
    radii = np.arange(counts.shape[1])
    keep = radii >= R
    if not keep.any():
        return 0.0
    weights = np.atleast_1d(eval_decay(F, radii[keep]))
    # the tail only depends on the shell counts of each center
    return max(math.fsum((row * weights).tolist()) for row in counts[:, keep])


def fit_tail_constant(
    g: SiteGraph, F: DecayFn, reference: DecayFn, radii: Iterable[int] | None = None
) -> float:
    """``max_R tail_sum_sup(g, F, R) / reference(R)`` over the given radii.

    This is the measured value of the geometric constant multiplying
    ``reference`` in the volume-summed bounds. Radii default to
    ``1..diam(g)``.
    """
    if radii is None:
        radii = range(1, g.diam + 1)
    best = 0.0
    for R in radii:
        ref = eval_decay(reference, R)
        if ref <= 0:
            raise ValueError(f"reference profile vanishes at R={R}")
        best = max(best, tail_sum_sup(g, F, R) / ref)
    return best
