"""Ground-state data and the end-to-end verification drivers."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .algebra import LocalOp, check_dense, embed, pauli_op, spectral_norm
from .bounds import (
    BoundSpec,
    corr_rhs,
    corr_short_constant,
    lppl_rhs,
    lrb_constant,
    lrb_rhs,
    phi_int_norm_check,
)
from .decay import DecayFn, double_sum, eval_decay, power_law
from .dynamics import (
    _apply_left,
    evolve_dense_oracle,
    evolve_heisenberg,
    interaction_picture,
    local_approx_error,
    localization_profile,
    propagate_time_dependent,
)
from .lattice import SiteGraph, neighborhood, set_distance
from .model import (
    Interaction,
    Term,
    cnot_pair,
    interaction_norm,
    xxz,
    zz_set_observables,
    zz_set_protocol,
)

__all__ = [
    "SLACK_TOL",
    "DEGENERACY_TOL",
    "NotGappedError",
    "GroundData",
    "ground_data",
    "SweepRow",
    "SweepReport",
    "parallel_map",
    "commutator_with_local",
    "run_sharpness",
    "run_lrb_sweep",
    "run_localization_sweep",
    "run_decay_correlations",
    "run_lppl",
    "run_stability",
    "random_commuting_pauli_model",
    "run_oracle_equivalence",
]

SLACK_TOL = -1e-12
DEGENERACY_TOL = 1e-9
T = TypeVar("T")


class NotGappedError(ValueError):
    """The spectrum has no gap (or a degenerate ground state where one is required)."""

    def __init__(self, message: str, eigenvalues: Sequence[float] = ()):
        self.eigenvalues = list(eigenvalues)
        low = ", ".join(f"{e:.6g}" for e in self.eigenvalues[:6])
        super().__init__(f"{message}; lowest eigenvalues: [{low}]")


@dataclass(frozen=True, eq=False)
class GroundData:
    """Spectral data of ``H`` (plus an optional perturbation) on a region."""

    region: tuple[int, ...]
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    degeneracy: int
    gap: float | None
    P0: LocalOp = field(repr=False)
    rho0: np.ndarray = field(repr=False)

    @property
    def E0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gapped(self) -> bool:
        return self.gap is not None and self.gap > 0

    def expect(self, op: LocalOp, rho: np.ndarray | None = None) -> complex:
        rho = self.rho0 if rho is None else rho
        return complex(np.trace(rho @ embed(op, self.region).mat))


def _group(eigenvalues: np.ndarray, tol: float) -> list[int]:
    """Sizes of the clusters of sorted ``eigenvalues`` (consecutive gaps <= tol)."""
    sizes = [1]
    for a, b in zip(eigenvalues[:-1], eigenvalues[1:]):
        if b - a <= tol:
            sizes[-1] += 1
        else:
            sizes.append(1)
    return sizes


def ground_data(
    psi: Interaction,
    region: Iterable[int] | None = None,
    perturbation: LocalOp | None = None,
    lam: float = 0.0,
    tol: float = DEGENERACY_TOL,
) -> GroundData:
    """Dense diagonalization of ``H + lam V`` on ``region``.

    ``rho0`` is the normalized ground-sector projector ``P0 / tr(P0)``,
    i.e. the ground state itself when it is unique.
    """
    region = tuple(sorted(set(psi.graph.sites if region is None else region)))
    check_dense(len(region), psi.graph.q)
    H = psi.dense(region).mat
    if perturbation is not None:
        if not perturbation.hermitian:
            raise ValueError("the perturbation must be Hermitian")
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {lam}")
        H = H + lam * embed(perturbation, region).mat
    w, v = np.linalg.eigh(H)
    sizes = _group(w, tol)
    deg = sizes[0]
    gap = float(w[deg] - w[0]) if len(sizes) > 1 else None
    ground = v[:, :deg]
    P0 = ground @ ground.conj().T
    return GroundData(region, w, v, deg, gap, LocalOp(region, P0, psi.graph.q), P0 / deg)


@dataclass
class SweepRow:
    params: dict
    lhs: float
    rhs: float
    extras: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack >= SLACK_TOL


@dataclass
class SweepReport:
    """Inequality rows ``lhs <= rhs`` plus ungated data curves."""

    name: str
    rows: list[SweepRow] = field(default_factory=list)
    curves: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, params: dict, lhs: float, rhs: float, **extras) -> SweepRow:
        row = SweepRow(dict(params), float(lhs), float(rhs), extras)
        self.rows.append(row)
        return row

    def extend(self, other: "SweepReport") -> None:
        self.rows.extend(other.rows)
        self.curves.extend(other.curves)
        self.meta.update(other.meta)

    @property
    def min_slack(self) -> float | None:
        return min((r.slack for r in self.rows), default=None)

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if not r.passed)

    def summary(self) -> dict:
        return {"min_slack": self.min_slack, "violations": self.violations, "rows": len(self.rows)}

    def failures(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.passed]


def parallel_map(fn: Callable[..., T], items: Sequence, threads: int | None = None) -> list[T]:
    """``[fn(x) for x in items]`` on a thread pool, results in input order."""
    items = list(items)
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def commutator_with_local(M: LocalOp, B: LocalOp) -> LocalOp:
    """``[M, B]`` applying ``B`` as a local factor instead of a dense product."""
    target = tuple(sorted(set(M.support) | set(B.support)))
    big = embed(M, target).mat
    q, n = M.q, len(target)
    pos = [target.index(s) for s in B.support]
    left = _apply_left(big, B.mat, pos, n, q)
    right = _apply_left(big.conj().T, B.mat.conj().T, pos, n, q).conj().T
    return LocalOp(target, right - left, q)


def _commutator_norm(tA: LocalOp, B: LocalOp) -> float:
    return spectral_norm(commutator_with_local(tA, B))


# ---------------------------------------------------------------------------
# Section 3.5 sharpness


def run_sharpness(
    g: SiteGraph,
    proto: str,
    params: dict,
    t_grid: Sequence[float],
    threads: int | None = None,
    equality_tol: float = 1e-10,
) -> SweepReport:
    """Sharpness protocols of Remark 3.4 (``cnot_pair``) and Section 3.5.1 (``zz_sets``).

    Each time gives two rows: the analytic lower bound against the measured
    norm, and the measured norm against the Corollary 3.7 right-hand side.
    """
    if not list(t_grid):
        raise ValueError("t-grid must be non-empty")
    alpha = float(params.get("alpha", 1.0))
    F = power_law(alpha)
    if proto == "zz_sets":
        X, Y = sorted(params["X"]), sorted(params["Y"])
        C = float(params.get("C", 1.0))
        psi = zz_set_protocol(g, X, Y, alpha, C)
        A, B = zz_set_observables(X, Y)
        c = C * double_sum(g, F, X, Y)
        lower = lambda t: 2 * abs(math.sin(2 * t * c))
    elif proto == "cnot_pair":
        x, y = int(params["x"]), int(params["y"])
        X, Y = [x], [y]
        psi = cnot_pair(g, x, y, alpha)
        A, B = pauli_op({x: "X"}), pauli_op({y: "Z"})
        w = eval_decay(F, g.d(x, y))
        lower = lambda t: 2 * abs(math.sin(t * w))
    else:
        raise ValueError(f"unknown sharpness protocol {proto!r}; expected cnot_pair or zz_sets")
    if set(X) & set(Y):
        raise ValueError(f"X={X} and Y={Y} must be disjoint")
    psi_norm = interaction_norm(psi, F, distinct_only=True)
    ds = double_sum(g, F, X, Y)
    a_norm, b_norm = spectral_norm(A), spectral_norm(B)

    def measure(t):
        return _commutator_norm(evolve_heisenberg(psi, A, t), B)

    measured = parallel_map(measure, t_grid, threads)
    report = SweepReport(f"sharpness[{proto}]")
    eq_violations = []
    for t, m in zip(t_grid, measured):
        low = lower(t)
        up = lrb_rhs(BoundSpec("cor_3_7_comm", psi_norm=psi_norm, A_norm=a_norm,
                               B_norm=b_norm, t=t, double_sum=ds))
        ratio = m / up if up > 0 else None
        report.add({"protocol": proto, "t": t, "check": "analytic<=measured"}, low, m,
                   ratio=ratio, deviation=abs(m - low))
        report.add({"protocol": proto, "t": t, "check": "measured<=cor_3_7"}, m, up,
                   ratio=ratio, deviation=abs(m - low))
        if abs(m - low) > equality_tol:
            eq_violations.append({"t": t, "measured": m, "analytic": low})
    positive = [t for t in t_grid if t > 0]
    if positive:
        t_min = min(positive)
        i = list(t_grid).index(t_min)
        up = report.rows[2 * i + 1].rhs
        report.meta["sharpness_ratio"] = measured[i] / up if up > 0 else None
        report.meta["sharpness_t"] = t_min
    report.meta["equality_violations"] = eq_violations
    report.meta["psi_norm"] = psi_norm
    return report


# ---------------------------------------------------------------------------
# Lieb-Robinson sweeps


def _reference_profile(g: SiteGraph, F: DecayFn):
    """``(name, F_ref, C)`` for the volume-summed theorem form, or ``None``."""
    if F.kind == "power_law":
        if F.alpha > g.dim:
            F_ref = F.reduced(g.dim)
            return "long_range_3_3", F_ref, lrb_constant(g, F, F_ref)
        return None
    if F.kind == "stretched_exp":
        F_ref = F.with_rate(F.b / 2)
        return "short_range_3_2", F_ref, lrb_constant(g, F, F_ref)
    return None


def _first_at_distance(g: SiteGraph, x0: int, r: int) -> int | None:
    hits = np.flatnonzero(g.dist[x0] == r)
    return int(hits[0]) if hits.size else None


def run_lrb_sweep(
    psi: Interaction,
    F: DecayFn,
    t_grid: Sequence[float],
    r_grid: Sequence[int] | None = None,
    x0: int = 0,
    threads: int | None = None,
) -> SweepReport:
    """Commutator bounds for ``A = X_{x0}`` and ``B = X_y`` at distance ``r``.

    Rows per ``(t, r)``: Corollary 3.7(i), Theorem 3.3(i) in the
    ``|X||Y|`` form (power laws), the ``min(|X|,|Y|)`` form of Theorem 3.3
    (``alpha > D``) or Theorem 3.2 (stretched exponentials) with the
    measured constant, and Theorem 3.6 with ``Lambda' = Lambda \\ Y`` in its
    term-sum and ``||Psi||_F`` forms.
    """
    g = psi.graph
    if not list(t_grid):
        raise ValueError("t-grid must be non-empty")
    ecc = int(g.dist[x0].max())
    radii = list(range(1, ecc + 1)) if r_grid is None else [int(r) for r in r_grid]
    targets = []
    for r in radii:
        y = _first_at_distance(g, x0, r)
        if y is None:
            raise ValueError(f"no site at distance {r} from site {x0}")
        targets.append((r, y))
    psi_norm = interaction_norm(psi, F, distinct_only=True)
    ref = _reference_profile(g, F)
    A = pauli_op({x0: "X"})
    lam = tuple(g.sites)

    def work(t):
        tA = evolve_heisenberg(psi, A, t)
        out = []
        for r, y in targets:
            B = pauli_op({y: "X"})
            measured = _commutator_norm(tA, B)
            approx = local_approx_error(psi, A, t, lam, [s for s in lam if s != y], F, full=tA)
            out.append((r, y, measured, approx))
        return out

    report = SweepReport("lrb_sweep")
    report.meta.update(psi_norm=psi_norm, F=F.to_dict(), x0=x0)
    if ref is not None:
        report.meta["measured_constant"] = {"form": ref[0], "C": ref[2], "F_ref": ref[1].to_dict()}
    for t, results in zip(t_grid, parallel_map(work, t_grid, threads)):
        for r, y, measured, approx in results:
            base = {"t": t, "r": r, "x0": x0, "y": y}
            ds = double_sum(g, F, [x0], [y])
            spec = BoundSpec("cor_3_7_comm", psi_norm=psi_norm, A_norm=1.0, B_norm=1.0,
                             t=t, double_sum=ds, nX=1, nY=1, r=r, F=F)
            report.add({**base, "bound": "cor_3_7_comm"}, measured, lrb_rhs(spec))
            if F.kind == "finite_range":
                report.add({**base, "bound": "finite_range_3_1"}, measured,
                           lrb_rhs(spec.with_(theorem="finite_range_3_1")))
            if F.kind == "power_law":
                report.add({**base, "bound": "long_range_3_3_comm_XY"}, measured,
                           lrb_rhs(spec.with_(theorem="long_range_3_3_comm_XY")))
            if ref is not None:
                name, F_ref, C = ref
                th = f"{name}_comm_minXY" if name.startswith("long") else f"{name}_comm"
                report.add({**base, "bound": th}, measured,
                           lrb_rhs(spec.with_(theorem=th, F_ref=F_ref, constant=C)))
            report.add({**base, "bound": "thm_3_6_terms[L'=L\\Y]"}, approx.lhs, approx.rhs_terms)
            report.add({**base, "bound": "thm_3_6_norm[L'=L\\Y]"}, approx.lhs, approx.rhs_norm)
            report.add({**base, "bound": "cor_3_7_proof[2*thm_3_6]"}, measured, 2 * approx.lhs)
    return report


def run_localization_sweep(
    psi: Interaction,
    F: DecayFn,
    t_grid: Sequence[float],
    r_grid: Sequence[int] | None = None,
    x0: int = 0,
    threads: int | None = None,
) -> SweepReport:
    """Operator localization ``||tau_t(A) - E_{X_r} tau_t(A)||`` for ``A = X_{x0}``.

    Rows per ``(t, r)``: Corollary 3.7(ii), Theorem 3.3(ii) or 3.2(ii)
    with the measured constant, and Theorem 3.6 with ``Lambda' = X_r``.
    The error curve itself goes to ``curves``; every step where it grows
    with ``r`` is listed in ``meta["monotonicity_violations"]``. This is an
    observation, not a bound: the operator-norm error of the conditional
    expectation need not be monotone in ``r``.
    """
    g = psi.graph
    if not list(t_grid):
        raise ValueError("t-grid must be non-empty")
    ecc = int(g.dist[x0].max())
    radii = list(range(0, ecc + 1)) if r_grid is None else sorted(int(r) for r in r_grid)
    psi_norm = interaction_norm(psi, F, distinct_only=True)
    ref = _reference_profile(g, F)
    A = pauli_op({x0: "X"})
    lam = tuple(g.sites)

    def work(t):
        tA = evolve_heisenberg(psi, A, t)
        errs = localization_profile(psi, A, t, radii)
        approx = []
        for r in radii:
            Xr = sorted(neighborhood(g, [x0], r))
            approx.append(
                local_approx_error(psi, A, t, lam, Xr, F, full=tA) if len(Xr) < len(lam) else None
            )
        return errs, approx

    report = SweepReport("localization_sweep")
    increases = []
    report.meta.update(psi_norm=psi_norm, F=F.to_dict(), x0=x0)
    if ref is not None:
        report.meta["measured_constant"] = {"form": ref[0], "C": ref[2], "F_ref": ref[1].to_dict()}
    for t, (errs, approx) in zip(t_grid, parallel_map(work, t_grid, threads)):
        for i, r in enumerate(radii):
            base = {"t": t, "r": r, "x0": x0}
            outside = [y for y in g.sites if g.d(x0, y) > r]
            ds = double_sum(g, F, [x0], outside) if outside else 0.0
            spec = BoundSpec("cor_3_7_loc", psi_norm=psi_norm, A_norm=1.0, t=t,
                             double_sum=ds, nX=1, r=r)
            report.add({**base, "bound": "cor_3_7_loc"}, errs[i], lrb_rhs(spec))
            if ref is not None:
                name, F_ref, C = ref
                report.add({**base, "bound": f"{name}_loc"}, errs[i],
                           lrb_rhs(spec.with_(theorem=f"{name}_loc", F_ref=F_ref, constant=C)))
            if approx[i] is not None:
                report.add({**base, "bound": "thm_3_6_terms[L'=X_r]"}, approx[i].lhs, approx[i].rhs_terms)
                report.add({**base, "bound": "thm_3_6_norm[L'=X_r]"}, approx[i].lhs, approx[i].rhs_norm)
            report.curves.append({"t": t, "r": r, "localization_error": errs[i]})
            if i + 1 < len(radii) and errs[i + 1] - errs[i] > -SLACK_TOL:
                increases.append({"t": t, "r": r, "next_r": radii[i + 1],
                                  "err_r": errs[i], "err_next": errs[i + 1]})
    report.meta["monotonicity_violations"] = increases
    return report


# ---------------------------------------------------------------------------
# Section 4 applications


def _require_gapped(gd: GroundData, what: str) -> None:
    if not gd.gapped:
        raise NotGappedError(f"{what}: Hamiltonian is not gapped", gd.eigenvalues)


def correlation_lhs(gd: GroundData, A: LocalOp, B: LocalOp) -> float:
    """``|tr(rho0 A B) - (tr(rho0 A P0 B) + tr(rho0 B P0 A)) / 2|``."""
    a = embed(A, gd.region).mat
    b = embed(B, gd.region).mat
    rho, P0 = gd.rho0, gd.P0.mat
    value = np.trace(rho @ a @ b) - 0.5 * (np.trace(rho @ a @ P0 @ b) + np.trace(rho @ b @ P0 @ a))
    return float(abs(value))


def run_decay_correlations(
    psi: Interaction,
    A: LocalOp,
    Bs: Sequence[LocalOp],
    F: DecayFn,
    b_tilde: float | None = None,
    constant_form: str = "derived",
) -> SweepReport:
    """Theorem 4.1 for one ``A`` against each ``B`` in ``Bs``."""
    g = psi.graph
    gd = ground_data(psi)
    _require_gapped(gd, "decay of correlations")
    psi_norm = interaction_norm(psi, F)
    report = SweepReport("decay_correlations")
    report.meta.update(gap=gd.gap, degeneracy=gd.degeneracy, E0=gd.E0, psi_norm=psi_norm)
    if F.kind == "power_law":
        base_spec = BoundSpec("decay_corr_4_1_long", F=F, psi_norm=psi_norm, gap=gd.gap)
    elif F.kind == "stretched_exp":
        b_tilde = F.b / 2 if b_tilde is None else b_tilde
        C_bb = lrb_constant(g, F, F.with_rate((F.b + b_tilde) / 2))
        C = corr_short_constant(F.b, b_tilde, C_bb, constant_form)
        report.meta.update(C_bb=C_bb, C=C, b_tilde=b_tilde, constant_form=constant_form)
        base_spec = BoundSpec("decay_corr_4_1_short", F=F, F_ref=F.with_rate(b_tilde),
                              constant=C, psi_norm=psi_norm, gap=gd.gap)
    else:
        raise ValueError("decay of correlations needs a power law or stretched exponential")
    a_norm = spectral_norm(A)
    for B in Bs:
        if set(A.support) & set(B.support):
            raise ValueError(f"supp(A)={list(A.support)} and supp(B)={list(B.support)} overlap")
        r = set_distance(g, A.support, B.support)
        lhs = correlation_lhs(gd, A, B)
        spec = base_spec.with_(A_norm=a_norm, B_norm=spectral_norm(B), nX=len(A.support),
                               nY=len(B.support), r=r)
        extras = {}
        if gd.degeneracy == 1:
            cov = gd.expect(A @ B) - gd.expect(A) * gd.expect(B)
            extras["covariance"] = float(abs(cov))
        report.add({"r": r, "B_support": " ".join(map(str, B.support))}, lhs, corr_rhs(spec), **extras)
    return report


def _perturbed(psi: Interaction, V: LocalOp, lam: float) -> Interaction:
    if lam == 0:
        return psi
    return Interaction(psi.graph, psi.terms + (Term(V * lam, label="V"),), f"{psi.label}+{lam}V")


def run_lppl(
    psi: Interaction,
    V: LocalOp,
    B: LocalOp,
    F: DecayFn,
    lam_grid: Sequence[float] | None = None,
    t_grid: Sequence[float] = (0.1, 0.25, 0.5, 1.0, 2.0),
    g_min: float = 0.0,
) -> SweepReport:
    """Theorem 4.2 plus its perturbed Lieb-Robinson premise.

    Every grid point must have a unique ground state and a gap above
    ``g_min``; the bound uses the smallest gap over the grid.
    """
    if F.kind != "power_law":
        raise ValueError("run_lppl implements the long-range (power-law) form")
    lam_grid = list(np.linspace(0.0, 1.0, 21)) if lam_grid is None else [float(x) for x in lam_grid]
    if not lam_grid or min(lam_grid) != 0.0 or max(lam_grid) != 1.0:
        raise ValueError("the lambda grid must contain both 0 and 1")
    g = psi.graph
    data = {}
    for lam in lam_grid:
        gd = ground_data(psi, perturbation=V, lam=lam)
        if gd.degeneracy != 1 or not gd.gapped or gd.gap <= g_min:
            raise NotGappedError(
                f"lambda={lam}: degeneracy {gd.degeneracy}, gap {gd.gap}", gd.eigenvalues
            )
        data[lam] = gd
    gap = min(gd.gap for gd in data.values())
    psi_norm = interaction_norm(psi, F)
    r = set_distance(g, V.support, B.support)
    b_norm, v_norm = spectral_norm(B), spectral_norm(V)
    lhs = abs(data[0.0].expect(B) - data[1.0].expect(B))
    spec = BoundSpec("lppl_4_2_long", F=F, psi_norm=psi_norm, B_norm=b_norm, V_norm=v_norm,
                     nX=len(V.support), nY=len(B.support), r=r, gap=gap)
    report = SweepReport("lppl")
    report.meta.update(gap_min=gap, lambda_grid=lam_grid, psi_norm=psi_norm,
                       gaps=[data[lam].gap for lam in lam_grid])
    report.add({"check": "lppl_4_2_long", "r": r, "lambda": "", "t": ""}, lhs, lppl_rhs(spec))
    for lam in lam_grid:
        model = _perturbed(psi, V, lam)
        for t in t_grid:
            tB = evolve_dense_oracle(model, B, -t)
            measured = _commutator_norm(tB, V)
            premise = (4 * psi_norm * b_norm * v_norm * len(V.support) * len(B.support) * abs(t)
                       * (1 + v_norm * abs(t)) * eval_decay(F, r))
            report.add({"check": "perturbed_lrb", "r": r, "lambda": lam, "t": t}, measured, premise)
    return report


def run_stability(
    psi: Interaction,
    phi: Interaction,
    F: DecayFn,
    t: float = 1.0,
    s: float = 0.0,
    A: LocalOp | None = None,
    ode_tol: float = 1e-8,
    delta_grid: Sequence[float] | None = None,
    curve_t_grid: Sequence[float] = (0.5,),
) -> SweepReport:
    """Section 4.3: decomposition identity, ``Phi^int`` norm bound, XXZ curves."""
    g = psi.graph
    region = tuple(g.sites)
    check_dense(len(region), g.q)
    A = pauli_op({len(region) // 2: "X"}) if A is None else A
    full = Interaction(g, psi.terms + phi.terms, "psi+phi")
    inner_tol = ode_tol / 100
    direct = propagate_time_dependent(full, A, s, t, inner_tol, region)
    moved = evolve_heisenberg(psi, A, t)
    if phi.terms:
        moved = propagate_time_dependent(
            lambda u: interaction_picture(psi, phi, u), moved, s, t, inner_tol, region
        )
    composed = evolve_heisenberg(psi, moved, -s)
    residual = spectral_norm(direct.mat - embed(composed, region).mat)
    report = SweepReport("stability")
    report.add({"check": "decomposition_identity", "t": t, "s": s}, residual, ode_tol)
    lhs, rhs = phi_int_norm_check(psi, phi, F, t)
    report.add({"check": "phi_int_norm", "t": t, "s": s}, lhs, rhs, R=psi.range)
    if delta_grid:
        n = g.n_sites
        X0, XN = pauli_op({0: "X"}), pauli_op({n - 1: "X"})
        for delta in delta_grid:
            model = xxz(g, float(delta))
            for tc in curve_t_grid:
                value = _commutator_norm(evolve_dense_oracle(model, X0, tc), XN)
                report.curves.append({"Delta": float(delta), "t": float(tc), "r": n - 1,
                                      "commutator_norm": value})
    return report


# ---------------------------------------------------------------------------
# Lemma 3.5 oracle equivalence on random commuting models


def random_commuting_pauli_model(
    g: SiteGraph, rng: np.random.Generator, n_terms: int = 12, max_weight: int = 3
) -> Interaction:
    """Random Pauli strings accepted greedily when they commute with all earlier ones.

    Coefficients are uniform in ``[-1, 1]``; supports have 1 to
    ``max_weight`` sites.
    """
    from .algebra import PauliString

    accepted: list[PauliString] = []
    attempts = 0
    while len(accepted) < n_terms and attempts < 50 * n_terms:
        attempts += 1
        k = int(rng.integers(1, max_weight + 1))
        sites = sorted(rng.choice(g.n_sites, size=min(k, g.n_sites), replace=False).tolist())
        letters = rng.choice(list("XYZ"), size=len(sites)).tolist()
        cand = PauliString(tuple(zip(sites, letters)))
        if all(cand.commutes(p) and cand.letters != p.letters for p in accepted):
            accepted.append(cand)
    terms = tuple(
        Term.from_pauli([(float(rng.uniform(-1, 1)), p)], label=str(p)) for p in accepted
    )
    return Interaction(g, terms, "random_commuting_pauli")


def run_oracle_equivalence(
    g: SiteGraph,
    seed: int,
    n_models: int = 100,
    t_grid: Sequence[float] = (0.3, 1.0, 3.0),
    n_terms: int = 12,
    tol: float = 1e-10,
    threads: int | None = None,
) -> SweepReport:
    """Lemma 3.5: the commuting engine against the dense oracle.

    Model ``i`` is drawn from ``default_rng([seed, i])`` so every model is
    reproducible on its own. The observable is a random single-site Pauli.
    """

    def work(i):
        rng = np.random.default_rng([seed, i])
        psi = random_commuting_pauli_model(g, rng, n_terms)
        x = int(rng.integers(g.n_sites))
        A = pauli_op({x: str(rng.choice(list("XYZ")))})
        out = []
        for t in t_grid:
            fast = evolve_heisenberg(psi, A, t)
            slow = evolve_dense_oracle(psi, A, t)
            diff = spectral_norm(embed(fast, slow.support).mat - slow.mat)
            out.append((t, x, len(psi), len(fast.support), diff))
        return out

    report = SweepReport("oracle_equivalence")
    report.meta.update(seed=seed, n_models=n_models)
    for i, results in enumerate(parallel_map(work, range(n_models), threads)):
        for t, x, n_terms_i, width, diff in results:
            report.add({"model": i, "t": t, "site": x, "terms": n_terms_i,
                        "evolved_support": width}, diff, tol)
    return report
