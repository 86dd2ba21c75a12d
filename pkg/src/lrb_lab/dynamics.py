"""Heisenberg evolution: the commuting engine, the dense oracle, measured
Lieb-Robinson quantities and the Section 4.3 interaction picture."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .algebra import (
    LocalOp,
    check_dense,
    commutator,
    conditional_expectation,
    embed,
    exp_hermitian,
    spectral_norm,
)
from .decay import DecayFn, double_sum
from .lattice import neighborhood
from .model import COMMUTING_TOL, Interaction, NonCommutingError, Term, interaction_norm

__all__ = [
    "EvolutionRequest",
    "ConvergenceError",
    "evolve_heisenberg",
    "evolve_dense_oracle",
    "evolve",
    "LocalApproxResult",
    "local_approx_error",
    "commutator_norm_measured",
    "localization_error_measured",
    "localization_profile",
    "interaction_picture",
    "propagate_time_dependent",
]


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (last residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class EvolutionRequest:
    """Evolve ``A`` for time ``t`` under ``psi`` restricted to ``region``."""

    psi: Interaction
    A: LocalOp
    t: float
    region: tuple[int, ...] | None = None

    def __post_init__(self):
        region = _region(self.psi, self.region)
        if not set(self.A.support) <= set(region):
            raise ValueError(
                f"supp(A)={list(self.A.support)} is not inside the region {list(region)}"
            )
        object.__setattr__(self, "region", region)


def _region(psi: Interaction, region: Iterable[int] | None) -> tuple[int, ...]:
    n = psi.graph.n_sites
    if region is None:
        return tuple(range(n))
    region = tuple(sorted(set(int(s) for s in region)))
    if region and (region[0] < 0 or region[-1] >= n):
        raise ValueError(f"region leaves the graph with {n} sites")
    return region


def _apply_left(M: np.ndarray, V: np.ndarray, positions: Sequence[int], n: int, q: int) -> np.ndarray:
    """``(V (x) 1) M`` with ``V`` acting on the tensor factors ``positions``."""
    k = len(positions)
    T = M.reshape((q,) * n + (M.shape[1],))
    T = np.tensordot(V.reshape((q,) * (2 * k)), T, axes=(list(range(k, 2 * k)), list(positions)))
    T = np.moveaxis(T, list(range(k)), list(positions))
    return T.reshape(M.shape)


def _conjugate_local(M: np.ndarray, V: np.ndarray, positions, n: int, q: int) -> np.ndarray:
    """``V M V^dagger`` for ``V`` local on ``positions``."""
    M = _apply_left(M, V, positions, n, q)
    return _apply_left(M.conj().T, V, positions, n, q).conj().T


def evolve_heisenberg(
    psi: Interaction | EvolutionRequest,
    A: LocalOp | None = None,
    t: float | None = None,
    region: Iterable[int] | None = None,
) -> LocalOp:
    """``tau_t^{region}(A)`` for a commuting interaction (Lemma 3.5).

    Only the terms inside ``region`` that meet ``supp(A)`` are used. The
    result lives on ``supp(A)`` united with those term supports. Diagonal
    terms are folded into a single phase vector; the others are applied as
    local conjugations in term-index order.
    """
    req = psi if isinstance(psi, EvolutionRequest) else EvolutionRequest(psi, A, t, region)
    psi, A, t, region = req.psi, req.A, float(req.t), req.region
    residual = psi.commuting_residual(region)
    if residual > COMMUTING_TOL:
        raise NonCommutingError(
            f"interaction is not commuting on the region (residual {residual:.3e}); "
            "use evolve_dense_oracle"
        )
    q = A.q
    X = set(A.support)
    region_set = set(region)
    active = [
        term for term in psi.terms if set(term.support) <= region_set and X & set(term.support)
    ]
    if t == 0 or not active:
        return A
    S = tuple(sorted(X.union(*(term.support for term in active))))
    check_dense(len(S), q)
    n = len(S)
    pos = {s: i for i, s in enumerate(S)}
    M = embed(A, S).mat.copy()

    diag = [term for term in active if term.diagonal]
    if diag:
        phi = np.zeros((q,) * n)
        for term in diag:
            shape = [1] * n
            for s in term.support:
                shape[pos[s]] = q
            phi = phi + np.diagonal(term.op.mat).real.reshape(shape)
        u = np.exp(1j * t * phi.ravel())
        M = M * u[:, None] * u.conj()[None, :]
    for term in active:
        if term.diagonal:
            continue
        V = exp_hermitian(term.op, t).mat
        M = _conjugate_local(M, V, [pos[s] for s in term.support], n, q)
    return LocalOp(S, M, q)


def _eigh_cached(psi: Interaction, region: tuple[int, ...]):
    key = ("eigh", region)
    if key not in psi._cache:
        H = psi.dense(region)
        psi._cache[key] = np.linalg.eigh(H.mat)
    return psi._cache[key]


def evolve_dense_oracle(
    psi: Interaction, A: LocalOp, t: float, region: Iterable[int] | None = None
) -> LocalOp:
    """Reference ``e^{itH} A e^{-itH}`` with ``H`` the dense sum over ``region``."""
    req = EvolutionRequest(psi, A, t, region)
    region = req.region
    check_dense(len(region), A.q)
    w, V = _eigh_cached(psi, region)
    M = embed(A, region).mat
    B = V.conj().T @ M @ V
    phase = np.exp(1j * float(t) * w)
    B = B * phase[:, None] * phase.conj()[None, :]
    return LocalOp(region, V @ B @ V.conj().T, A.q)


def evolve(psi: Interaction, A: LocalOp, t: float, region=None, engine: str = "auto") -> LocalOp:
    """Pick the commuting engine when the interaction commutes, else the oracle."""
    if engine not in ("auto", "heisenberg", "dense"):
        raise ValueError(f"unknown engine {engine!r}")
    region = _region(psi, region)
    if engine == "heisenberg" or (
        engine == "auto" and psi.commuting_residual(region) <= COMMUTING_TOL
    ):
        return evolve_heisenberg(psi, A, t, region)
    return evolve_dense_oracle(psi, A, t, region)


def _difference_norm(a: LocalOp, b: LocalOp) -> float:
    target = sorted(set(a.support) | set(b.support))
    return spectral_norm(embed(a, target).mat - embed(b, target).mat)


@dataclass(frozen=True)
class LocalApproxResult:
    """Theorem 3.6: measured ``||tau^Lambda - tau^Lambda'||`` and both bounds."""

    lhs: float
    rhs_terms: float
    rhs_norm: float | None
    psi_norm: float | None


def local_approx_error(
    psi: Interaction,
    A: LocalOp,
    t: float,
    Lam: Iterable[int] | None,
    Lam_p: Iterable[int],
    F: DecayFn | None = None,
    distinct_only: bool = True,
    full: LocalOp | None = None,
) -> LocalApproxResult:
    """Compare ``tau_t^Lambda(A)`` with ``tau_t^Lambda'(A)`` (Theorem 3.6).

    ``rhs_terms`` is ``2||A|||t| sum ||Psi(Z)||`` over ``Z`` inside Lambda
    meeting both ``X = supp(A)`` and ``Lambda \\ Lambda'``; ``rhs_norm`` is
    the ``||Psi||_F`` double-sum form (only when ``F`` is given). ``full``
    may carry a precomputed ``tau_t^Lambda(A)``.
    """
    Lam = _region(psi, Lam)
    Lam_p = _region(psi, Lam_p)
    X = set(A.support)
    if not X <= set(Lam_p) or not set(Lam_p) <= set(Lam):
        raise ValueError("need supp(A) inside Lambda' inside Lambda")
    if full is None:
        full = evolve_heisenberg(psi, A, t, Lam)
    part = evolve_heisenberg(psi, A, t, Lam_p)
    lhs = _difference_norm(full, part)

    outside = set(Lam) - set(Lam_p)
    a_norm = spectral_norm(A)
    inside = psi.restrict(Lam)
    total = math.fsum(
        value
        for Z, value in inside.support_values().items()
        if X & set(Z) and outside & set(Z)
    )
    rhs_terms = 2 * a_norm * abs(t) * total
    rhs_norm = psi_norm = None
    if F is not None:
        psi_norm = interaction_norm(inside, F, distinct_only=distinct_only)
        ds = double_sum(psi.graph, F, X, outside) if outside else 0.0
        rhs_norm = 2 * a_norm * psi_norm * abs(t) * ds
    return LocalApproxResult(lhs, rhs_terms, rhs_norm, psi_norm)


def commutator_norm_measured(
    psi: Interaction,
    A: LocalOp,
    B: LocalOp,
    t: float,
    region: Iterable[int] | None = None,
    engine: str = "auto",
) -> float:
    """``||[tau_t(A), B]||`` on the common support of ``tau_t(A)`` and ``B``."""
    if set(A.support) & set(B.support):
        raise ValueError(
            f"supp(A)={list(A.support)} and supp(B)={list(B.support)} must be disjoint"
        )
    tA = evolve(psi, A, t, region, engine)
    return spectral_norm(commutator(tA, B))


def localization_profile(
    psi: Interaction,
    A: LocalOp,
    t: float,
    radii: Iterable[int],
    region: Iterable[int] | None = None,
    engine: str = "auto",
) -> list[float]:
    """``||tau_t(A) - E_{X_r}(tau_t(A))||`` for each ``r``; evolves once."""
    region = _region(psi, region)
    tA = evolve(psi, A, t, region, engine)
    out = []
    for r in radii:
        if r < 0:
            raise ValueError("radius must be non-negative")
        Xr = neighborhood(psi.graph, A.support, int(r)) & set(region)
        Y = sorted(Xr & set(tA.support))
        E = conditional_expectation(tA, Y)
        out.append(spectral_norm(tA.mat - embed(E, tA.support).mat))
    return out


def localization_error_measured(
    psi: Interaction,
    A: LocalOp,
    t: float,
    r: int,
    region: Iterable[int] | None = None,
    engine: str = "auto",
) -> float:
    """Corollary 3.7(ii) left-hand side at one radius."""
    return localization_profile(psi, A, t, [r], region, engine)[0]


def interaction_picture(
    psi: Interaction, phi: Interaction, t: float, R: int | None = None
) -> Interaction:
    """``Phi^int(t, Z) = sum over X with X_R = Z of tau_t^Psi(Phi(X))``.

    ``psi`` must commute and have range at most ``R`` (defaults to its own
    range). Terms of ``phi`` with the same ``X_R`` are summed.
    """
    if psi.graph is not phi.graph and psi.graph.n_sites != phi.graph.n_sites:
        raise ValueError("psi and phi live on different graphs")
    residual = psi.commuting_residual()
    if residual > COMMUTING_TOL:
        raise NonCommutingError(f"psi is not commuting (residual {residual:.3e})")
    actual = psi.range
    if R is None:
        R = actual
    elif actual > R:
        raise ValueError(f"psi has range {actual}, more than the declared R={R}")
    g = phi.graph
    grouped: dict[tuple[int, ...], np.ndarray] = {}
    for term in phi.terms:
        Z = tuple(sorted(neighborhood(g, term.support, R)))
        moved = evolve_heisenberg(psi, term.op, t)
        mat = embed(moved, Z).mat
        grouped[Z] = grouped[Z] + mat if Z in grouped else mat
    terms = []
    for Z, mat in grouped.items():
        herm = 0.5 * (mat + mat.conj().T)
        terms.append(Term(LocalOp(Z, herm, g.q), label=f"int{Z}"))
    return Interaction(g, tuple(terms), f"interaction_picture(t={t},R={R})")


HamiltonianLike = Union[Interaction, LocalOp, Callable[[float], Union[Interaction, LocalOp]]]


def _dense_at(H: HamiltonianLike, u: float, region: tuple[int, ...]) -> np.ndarray:
    h = H(u) if callable(H) and not isinstance(H, (Interaction, LocalOp)) else H
    if isinstance(h, Interaction):
        return h.dense(region).mat
    return embed(h, region).mat


def propagate_time_dependent(
    H: HamiltonianLike,
    A: LocalOp,
    s: float,
    t: float,
    tol: float = 1e-10,
    region: Iterable[int] | None = None,
    max_halvings: int = 20,
) -> LocalOp:
    """``tau_{t,s}(A)`` with ``-i d/dt tau_{t,s}(A) = tau_{t,s}([H(t), A])``.

    ``tau_{t,s}(A) = V A V^dagger`` with ``V`` the time-ordered product of
    midpoint factors ``exp(i H(u_k) dt)``, earliest on the left. Step
    counts double until two successive Richardson estimates
    ``(4 T_{2n} - T_n) / 3`` differ by less than ``tol`` in norm.
    """
    if region is None:
        if isinstance(H, Interaction):
            region = tuple(H.graph.sites)
        else:
            raise ValueError("region is required unless H is an Interaction")
    region = tuple(sorted(set(region)))
    if not set(A.support) <= set(region):
        raise ValueError("supp(A) must lie in the region")
    check_dense(len(region), A.q)
    M = embed(A, region).mat
    if s == t:
        return LocalOp(region, M, A.q)

    def product(n: int) -> np.ndarray:
        dt = (t - s) / n
        V = np.eye(M.shape[0], dtype=complex)
        for k in range(n):
            h = _dense_at(H, s + (k + 0.5) * dt, region)
            w, U = np.linalg.eigh(0.5 * (h + h.conj().T))
            V = V @ ((U * np.exp(1j * dt * w)) @ U.conj().T)
        return V @ M @ V.conj().T

    n = 1
    coarse = product(n)
    previous = None
    residual = math.inf
    for _ in range(max_halvings):
        fine = product(2 * n)
        estimate = (4 * fine - coarse) / 3
        if previous is not None:
            residual = spectral_norm(estimate - previous)
            if residual < tol:
                return LocalOp(region, estimate, A.q)
        previous, coarse, n = estimate, fine, 2 * n
    raise ConvergenceError(f"time-ordered propagation did not converge after {max_halvings} halvings", residual)
