"""Interactions as finite term lists and the named model builders."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    LocalOp,
    PauliString,
    check_dense,
    commutator,
    embed,
    local_op,
    spectral_norm,
)
from .decay import DecayFn, decay_from_dict, eval_decay, power_law
from .lattice import SiteGraph, graph_from_edges

__all__ = [
    "COMMUTING_TOL",
    "NonCommutingError",
    "Term",
    "Interaction",
    "interaction_norm",
    "check_commuting",
    "terms_intersecting",
    "build_model",
    "MODEL_KINDS",
    "zz_long_range",
    "cnot_pair",
    "zz_set_protocol",
    "zz_set_observables",
    "zz_field",
    "transverse_field",
    "xxz",
    "toric_edge_graph",
    "toric_code_long_range",
    "ToricLayout",
    "custom",
    "load_custom_terms",
]

COMMUTING_TOL = 1e-12


class NonCommutingError(ValueError):
    """The commuting engine was asked to evolve a non-commuting interaction."""


def _pauli_sum_matrix(pauli, support: Sequence[int]) -> np.ndarray:
    dim = 2 ** len(support)
    mat = np.zeros((dim, dim), dtype=complex)
    for coef, string in pauli:
        mat += coef * string.to_local_op(support).mat
    return mat


@dataclass(frozen=True, eq=False)
class Term:
    """One Hermitian operator ``Psi(Z)`` with an optional Pauli expansion.

    ``pauli`` is a tuple of ``(coefficient, PauliString)`` pairs whose sum
    equals ``op``; it enables the symbolic commutation fast path.
    """

    op: LocalOp
    pauli: tuple | None = None
    label: str = ""
    diagonal: bool = field(init=False, repr=False)

    def __post_init__(self):
        if not self.op.support:
            raise ValueError("a term needs a non-empty support")
        if not self.op.hermitian:
            raise ValueError(f"term {self.label or self.op.support} is not Hermitian")
        if self.pauli is not None:
            pauli = tuple((complex(c), s) for c, s in self.pauli)
            if any(not set(s.support) <= set(self.op.support) for _, s in pauli):
                raise ValueError("Pauli expansion leaves the term support")
            dense = _pauli_sum_matrix(pauli, self.op.support)
            if np.abs(dense - self.op.mat).max() > 1e-12:
                raise ValueError("Pauli expansion does not match the dense term")
            object.__setattr__(self, "pauli", pauli)
        m = self.op.mat
        object.__setattr__(
            self, "diagonal", bool(np.count_nonzero(m - np.diag(np.diagonal(m))) == 0)
        )

    @property
    def support(self) -> tuple[int, ...]:
        return self.op.support

    @classmethod
    def from_pauli(cls, pauli, support: Iterable[int] | None = None, label: str = "") -> "Term":
        pauli = tuple((complex(c), s) for c, s in pauli)
        if support is None:
            support = sorted(set().union(*(s.support for _, s in pauli)))
        support = tuple(sorted(support))
        return cls(LocalOp(support, _pauli_sum_matrix(pauli, support), 2), pauli, label)


@dataclass(frozen=True, eq=False)
class Interaction:
    """A finite list of terms on a graph; ``H = sum of all terms``.

    Several terms may share a support; the interaction value ``Psi(Z)`` is
    then their sum. Derived quantities (norms, commutator residuals,
    eigendecompositions) are cached on the instance.
    """

    graph: SiteGraph
    terms: tuple[Term, ...] = ()
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        for term in terms:
            if term.support[-1] >= self.graph.n_sites:
                raise ValueError(
                    f"term support {term.support} leaves the graph with {self.graph.n_sites} sites"
                )
            if term.op.q != self.graph.q:
                raise ValueError("term local dimension differs from the graph")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def pauli_terms(self) -> list | None:
        """Per-term Pauli expansions, or ``None`` if any term lacks one."""
        if any(t.pauli is None for t in self.terms):
            return None
        return [t.pauli for t in self.terms]

    def subset(self, keep: Iterable[int], label: str | None = None) -> "Interaction":
        idx = list(keep)
        return Interaction(self.graph, tuple(self.terms[i] for i in idx), label or self.label)

    def restrict(self, region: Iterable[int]) -> "Interaction":
        """Terms whose support lies inside ``region`` (the interaction on Lambda')."""
        region = set(region)
        return self.subset(i for i, t in enumerate(self.terms) if set(t.support) <= region)

    def intersecting(self, X: Iterable[int]) -> "Interaction":
        X = set(X)
        return self.subset(i for i, t in enumerate(self.terms) if X & set(t.support))

    def support_values(self) -> dict[tuple[int, ...], float]:
        """``{Z: ||Psi(Z)||}`` with terms of equal support summed first."""
        if "support_values" not in self._cache:
            grouped: dict[tuple[int, ...], np.ndarray] = {}
            for term in self.terms:
                if term.support in grouped:
                    grouped[term.support] = grouped[term.support] + term.op.mat
                else:
                    grouped[term.support] = term.op.mat
            self._cache["support_values"] = {
                Z: spectral_norm(m) for Z, m in grouped.items()
            }
        return self._cache["support_values"]

    @property
    def range(self) -> int:
        """Largest diameter of a term support (0 for an empty interaction)."""
        dist = self.graph.dist
        best = 0
        for Z in self.support_values():
            idx = np.asarray(Z)
            best = max(best, int(dist[np.ix_(idx, idx)].max()))
        return best

    def commuting_residual(self, region: Iterable[int] | None = None) -> float:
        """:func:`check_commuting` on the terms inside ``region``, cached."""
        if "residual" not in self._cache:
            self._cache["residual"] = check_commuting(self)
        full = self._cache["residual"]
        if region is None or full <= COMMUTING_TOL:
            return full
        key = ("residual", frozenset(region))
        if key not in self._cache:
            self._cache[key] = check_commuting(self.restrict(region))
        return self._cache[key]

    def dense(self, region: Iterable[int] | None = None) -> LocalOp:
        """``H_region``: the sum of all terms supported inside ``region``."""
        region = tuple(sorted(set(self.graph.sites if region is None else region)))
        check_dense(len(region), self.graph.q)
        dim = self.graph.q ** len(region)
        mat = np.zeros((dim, dim), dtype=complex)
        region_set = set(region)
        for term in self.terms:
            if set(term.support) <= region_set:
                mat += embed(term.op, region).mat
        return LocalOp(region, mat, self.graph.q)


def terms_intersecting(psi: Interaction, X: Iterable[int]) -> Interaction:
    """``Psi_{cap X}``: the terms whose support meets ``X``."""
    X = list(X)
    if not X:
        raise ValueError("X must be non-empty")
    return psi.intersecting(X)


def interaction_norm(psi: Interaction, F: DecayFn, distinct_only: bool = False) -> float:
    """``sup_{x,y} sum_{Z contains x,y} ||Psi(Z)|| / F(d(x, y))``.

    The paper's definition includes ``x = y``; ``distinct_only`` restricts
    the supremum to ``x != y``, which is all the Lieb-Robinson proofs use.
    """
    key = ("norm", F, distinct_only)
    if key in psi._cache:
        return psi._cache[key]
    g = psi.graph
    acc = np.zeros((g.n_sites, g.n_sites))
    for Z, value in psi.support_values().items():
        idx = np.asarray(Z)
        acc[np.ix_(idx, idx)] += value
    if distinct_only:
        np.fill_diagonal(acc, 0.0)
    used = acc > 0
    if not used.any():
        psi._cache[key] = 0.0
        return 0.0
    denom = np.asarray(eval_decay(F, g.dist[used]))
    if (denom <= 0).any():
        raise ValueError(
            "decay profile vanishes on a distance realized by the interaction; "
            "the interaction norm is infinite"
        )
    value = float((acc[used] / denom).max())
    psi._cache[key] = value
    return value


def _pair_residual(a: Term, b: Term) -> float:
    if not set(a.support) & set(b.support):
        return 0.0
    if a.diagonal and b.diagonal:
        return 0.0
    if a.pauli is not None and b.pauli is not None:
        if all(p.commutes(s) for _, p in a.pauli for _, s in b.pauli):
            return 0.0
    return spectral_norm(commutator(a.op, b.op))


def check_commuting(psi: Interaction) -> float:
    """Largest ``||[Psi(Z1), Psi(Z2)]||`` over pairs of terms.

    Disjoint or both-diagonal pairs cost nothing; pairs of Pauli sums whose
    strings commute pairwise are certified symbolically (a sufficient
    condition); the rest fall back to a dense commutator on the union
    support.
    """
    worst = 0.0
    for a, b in itertools.combinations(psi.terms, 2):
        worst = max(worst, _pair_residual(a, b))
    return worst


# ---------------------------------------------------------------------------
# builders


def _ps(label) -> PauliString:
    return PauliString.from_label(label)


def _zz(x: int, y: int) -> PauliString:
    return PauliString(((x, "Z"), (y, "Z")))


def zz_long_range(g: SiteGraph, C: float = 1.0, F: DecayFn | None = None) -> Interaction:
    """``C F(d(x, y)) Z_x Z_y`` on every pair of distinct sites."""
    F = power_law(1.0) if F is None else F
    _require_qubits(g, "zz_long_range")
    terms = []
    for x, y in itertools.combinations(g.sites, 2):
        coef = C * eval_decay(F, g.d(x, y))
        if coef != 0:
            terms.append(Term.from_pauli([(coef, _zz(x, y))], (x, y), f"ZZ{x},{y}"))
    return Interaction(g, tuple(terms), f"zz_long_range(C={C},{F.to_dict()})")


def cnot_pair(g: SiteGraph, x: int, y: int, alpha: float = 2.0) -> Interaction:
    """``F_alpha(d(x, y)) U`` with the CNOT ``U`` of Remark 3.4 controlled by ``x``.

    ``U = exp(i pi/4 (1 + Z_x)(1 - X_y))`` flips ``y`` when ``x`` is up
    (``|0>``); it equals ``(1 + X_y - Z_x + Z_x X_y) / 2``.
    """
    _require_qubits(g, "cnot_pair")
    if x == y:
        raise ValueError("cnot_pair needs two distinct sites")
    w = eval_decay(power_law(alpha), g.d(x, y))
    pauli = [
        (0.5 * w, PauliString()),
        (0.5 * w, PauliString(((y, "X"),))),
        (-0.5 * w, PauliString(((x, "Z"),))),
        (0.5 * w, PauliString(((x, "Z"), (y, "X")))),
    ]
    term = Term.from_pauli(pauli, sorted((x, y)), f"CNOT{x},{y}")
    return Interaction(g, (term,), f"cnot_pair({x},{y},alpha={alpha})")


def zz_set_protocol(
    g: SiteGraph, X: Iterable[int], Y: Iterable[int], alpha: float = 1.0, C: float = 1.0
) -> Interaction:
    """Section 3.5.1: ``C F_alpha(d(x, y)) Z_x Z_y`` for ``x`` in X, ``y`` in Y."""
    _require_qubits(g, "zz_set_protocol")
    X, Y = sorted(set(X)), sorted(set(Y))
    if set(X) & set(Y):
        raise ValueError(f"X={X} and Y={Y} must be disjoint")
    F = power_law(alpha)
    terms = []
    for x in X:
        for y in Y:
            coef = C * eval_decay(F, g.d(x, y))
            terms.append(Term.from_pauli([(coef, _zz(x, y))], sorted((x, y)), f"ZZ{x},{y}"))
    return Interaction(g, tuple(terms), f"zz_set_protocol(alpha={alpha},C={C})")


def zz_set_observables(X: Iterable[int], Y: Iterable[int]) -> tuple[LocalOp, LocalOp]:
    """``A = prod X_x`` on X and ``B = |up..><down..| + h.c.`` on Y."""
    X, Y = sorted(set(X)), sorted(set(Y))
    A = PauliString(tuple((x, "X") for x in X)).to_local_op()
    dim = 2 ** len(Y)
    B = np.zeros((dim, dim), dtype=complex)
    B[0, dim - 1] = B[dim - 1, 0] = 1.0
    return A, LocalOp(tuple(Y), B, 2)


def zz_field(g: SiteGraph, J: float = 1.0, h: float = 1.0, alpha: float | None = None) -> Interaction:
    """``-J sum Z_x Z_y - h sum Z_x``.

    Without ``alpha`` the bonds are the graph edges; with ``alpha`` every
    pair is coupled by ``-J F_alpha(d) Z_x Z_y``.
    """
    _require_qubits(g, "zz_field")
    terms = []
    if alpha is None:
        pairs = [(x, y, 1.0) for x, y in sorted(g.edges)]
    else:
        F = power_law(alpha)
        pairs = [(x, y, eval_decay(F, g.d(x, y))) for x, y in itertools.combinations(g.sites, 2)]
    for x, y, w in pairs:
        if J * w != 0:
            terms.append(Term.from_pauli([(-J * w, _zz(x, y))], (x, y), f"ZZ{x},{y}"))
    if h != 0:
        for x in g.sites:
            terms.append(Term.from_pauli([(-h, PauliString(((x, "Z"),)))], (x,), f"Z{x}"))
    return Interaction(g, tuple(terms), f"zz_field(J={J},h={h},alpha={alpha})")


def transverse_field(g: SiteGraph, h: float = 1.0) -> Interaction:
    """``-h sum X_x``: the non-commuting perturbation of Section 4.3."""
    _require_qubits(g, "transverse_field")
    terms = tuple(
        Term.from_pauli([(-h, PauliString(((x, "X"),)))], (x,), f"X{x}") for x in g.sites
    )
    return Interaction(g, terms if h != 0 else (), f"transverse_field(h={h})")


XXZ_PARTS = ("full", "commuting", "flip")


def xxz(g: SiteGraph, Delta: float = 1.0, part: str = "full") -> Interaction:
    """Spin-1/2 ``-sum (S1S1 + S2S2 + Delta S3S3)`` over the graph edges.

    ``part="commuting"`` keeps only the ``Delta S3S3`` bonds (the commuting
    ``Psi`` of Section 4.3); ``part="flip"`` keeps the ``S1S1 + S2S2`` rest.
    """
    _require_qubits(g, "xxz")
    if part not in XXZ_PARTS:
        raise ValueError(f"unknown xxz part {part!r}; expected one of {XXZ_PARTS}")
    terms = []
    for x, y in sorted(g.edges):
        pauli = []
        if part in ("full", "flip"):
            pauli += [(-0.25, PauliString(((x, "X"), (y, "X")))),
                      (-0.25, PauliString(((x, "Y"), (y, "Y"))))]
        if part in ("full", "commuting") and Delta != 0:
            pauli.append((-0.25 * Delta, _zz(x, y)))
        if pauli:
            terms.append(Term.from_pauli(pauli, (x, y), f"XXZ{x},{y}"))
    return Interaction(g, tuple(terms), f"xxz(Delta={Delta},part={part})")


@dataclass(frozen=True)
class ToricLayout:
    """Edge bookkeeping of an ``L x L`` torus.

    Horizontal edge ``h(x, y)`` joins vertices ``(x, y)`` and ``(x+1, y)``;
    vertical edge ``v(x, y)`` joins ``(x, y)`` and ``(x, y+1)``.
    """

    L: int

    def h(self, x: int, y: int) -> int:
        L = self.L
        return (y % L) * L + x % L

    def v(self, x: int, y: int) -> int:
        L = self.L
        return L * L + (y % L) * L + x % L

    @property
    def n_edges(self) -> int:
        return 2 * self.L * self.L

    def cells(self) -> list[tuple[int, int]]:
        return [(x, y) for y in range(self.L) for x in range(self.L)]

    def star(self, x: int, y: int) -> tuple[int, ...]:
        return tuple(sorted({self.h(x, y), self.h(x - 1, y), self.v(x, y), self.v(x, y - 1)}))

    def plaquette(self, x: int, y: int) -> tuple[int, ...]:
        return tuple(sorted({self.h(x, y), self.v(x + 1, y), self.h(x, y + 1), self.v(x, y)}))

    def cell_distance(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        L = self.L
        dx, dy = abs(a[0] - b[0]) % L, abs(a[1] - b[1]) % L
        return min(dx, L - dx) + min(dy, L - dy)

    def endpoints(self, e: int) -> tuple[tuple[int, int], tuple[int, int]]:
        L = self.L
        vertical, rest = divmod(e, L * L)
        y, x = divmod(rest, L)
        other = (x, (y + 1) % L) if vertical else ((x + 1) % L, y)
        return (x, y), other


def toric_edge_graph(L: int) -> SiteGraph:
    """Qubits on the edges of an ``L x L`` torus; edges sharing a vertex are adjacent."""
    if L < 2:
        raise ValueError("the toric code needs L >= 2")
    lay = ToricLayout(L)
    by_vertex: dict[tuple[int, int], list[int]] = {}
    for e in range(lay.n_edges):
        for vert in lay.endpoints(e):
            by_vertex.setdefault(vert, []).append(e)
    adjacency = set()
    for edges in by_vertex.values():
        for a, b in itertools.combinations(sorted(set(edges)), 2):
            adjacency.add((a, b))
    coords = [("h" if e < L * L else "v",) + lay.endpoints(e)[0] for e in range(lay.n_edges)]
    return graph_from_edges(
        lay.n_edges, adjacency, q=2, dim=2, coords=coords, label=f"toric_edges(L={L})"
    )


def toric_code_long_range(
    L: int = 2,
    alpha: float = 1.0,
    C_f: float = 0.25,
    C_g: float | None = None,
    bound: float = 1.0,
    f: Callable[[tuple, tuple, int], float] | None = None,
    g: Callable[[tuple, tuple, int], float] | None = None,
    graph: SiteGraph | None = None,
) -> Interaction:
    """Example 1.2: ``H = -sum A_s - sum B_p + sum f A A + sum g B B``.

    ``A_s = -1 + prod_{e at s} X_e`` and ``B_p = -1 + prod_{e around p} Z_e``.
    The long-range products run over unordered pairs of distinct stars and
    of distinct plaquettes. ``f`` and ``g`` default to ``C F_alpha(d)`` with
    ``d`` the torus distance between the vertices (faces); any coefficient
    outside ``[0, bound F_alpha(d)]`` is rejected.
    """
    lay = ToricLayout(L)
    G = toric_edge_graph(L) if graph is None else graph
    if G.n_sites != lay.n_edges:
        raise ValueError(f"toric code on L={L} needs {lay.n_edges} edge sites, graph has {G.n_sites}")
    F = power_law(alpha)
    C_g = C_f if C_g is None else C_g
    f = f or (lambda a, b, d: C_f * eval_decay(F, d))
    g = g or (lambda a, b, d: C_g * eval_decay(F, d))

    def checked(fn, name, a, b):
        d = lay.cell_distance(a, b)
        val = float(fn(a, b, d))
        cap = bound * eval_decay(F, d)
        if not (0.0 <= val <= cap * (1 + 1e-12)):
            raise ValueError(
                f"{name}({a},{b})={val} violates 0 <= {name} <= {bound}*F_{alpha}({d})={cap}"
            )
        return val

    one = PauliString()
    stars = {c: PauliString(tuple((e, "X") for e in lay.star(*c))) for c in lay.cells()}
    plaqs = {c: PauliString(tuple((e, "Z") for e in lay.plaquette(*c))) for c in lay.cells()}
    terms = []
    for kind, ops in (("A", stars), ("B", plaqs)):
        for c, P in ops.items():
            # -A_s = 1 - prod X
            terms.append(Term.from_pauli([(1.0, one), (-1.0, P)], P.support, f"-{kind}{c}"))
    for kind, ops, fn in (("A", stars, f), ("B", plaqs, g)):
        for (c1, P1), (c2, P2) in itertools.combinations(ops.items(), 2):
            w = checked(fn, "f" if kind == "A" else "g", c1, c2)
            if w == 0:
                continue
            # A1 A2 = (P1 - 1)(P2 - 1) = 1 - P1 - P2 + P1 P2
            prod = P1 * P2
            pauli = [(w, one), (-w, P1), (-w, P2), (w * prod.phase, PauliString(prod.letters))]
            support = sorted(set(P1.support) | set(P2.support))
            terms.append(Term.from_pauli(pauli, support, f"{kind}{c1}{kind}{c2}"))
    return Interaction(G, tuple(terms), f"toric_code_long_range(L={L},alpha={alpha},C_f={C_f},C_g={C_g})")


def toric_stabilizers(L: int) -> tuple[list[LocalOp], list[LocalOp]]:
    """Dense ``A_s`` and ``B_p`` (each ``-1 + product``) for frustration checks."""
    lay = ToricLayout(L)
    stars, plaqs = [], []
    for c in lay.cells():
        for ops, support, letter in ((stars, lay.star(*c), "X"), (plaqs, lay.plaquette(*c), "Z")):
            P = PauliString(tuple((e, letter) for e in support)).to_local_op()
            ops.append(LocalOp(P.support, P.mat - np.eye(P.mat.shape[0]), 2))
    return stars, plaqs


def _parse_matrix(raw, dim: int) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 3 and arr.shape == (dim, dim, 2):
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2 and arr.shape == (dim * dim, 2):
        return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)
    if arr.ndim == 2 and arr.shape == (dim, dim):
        return arr.astype(complex)
    raise ValueError(
        f"matrix must be {dim}x{dim} entries of [re, im] (nested rows or a flat row-major list), "
        f"got shape {arr.shape}"
    )


def custom(g: SiteGraph, term_specs: Sequence[dict]) -> Interaction:
    """Terms from dicts ``{support: [...], matrix: ...}`` or ``{pauli: "X0 Z1", coefficient: c}``."""
    terms = []
    for i, spec in enumerate(term_specs):
        if "pauli" in spec:
            _require_qubits(g, "custom Pauli terms")
            string = PauliString.from_label(spec["pauli"])
            coef = spec.get("coefficient", 1.0)
            coef = complex(*coef) if isinstance(coef, (list, tuple)) else complex(coef)
            terms.append(Term.from_pauli([(coef, string)], label=f"term{i}"))
            continue
        support = [int(s) for s in spec["support"]]
        dim = g.q ** len(support)
        mat = _parse_matrix(spec["matrix"], dim)
        terms.append(Term(local_op(mat, support, g.q), label=f"term{i}"))
    return Interaction(g, tuple(terms), "custom")


def load_custom_terms(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "terms" not in doc:
        raise ValueError(f"{path}: expected a JSON object with a 'terms' list")
    return doc["terms"]


def _require_qubits(g: SiteGraph, what: str) -> None:
    if g.q != 2:
        raise ValueError(f"{what} needs q=2 sites, graph has q={g.q}")


def _decay_of(spec: dict, default_alpha: float = 1.0) -> DecayFn:
    if "decay" in spec:
        return decay_from_dict(spec["decay"])
    return power_law(spec.get("alpha", default_alpha))


MODEL_KINDS = (
    "zz_long_range",
    "cnot_pair",
    "zz_set_protocol",
    "zz_field",
    "transverse_field",
    "xxz",
    "toric_code_long_range",
    "custom",
)


def build_model(g: SiteGraph, spec: dict) -> Interaction:
    """Dispatch on ``spec["kind"]``; see :data:`MODEL_KINDS`."""
    kind = spec.get("kind")
    if kind == "zz_long_range":
        return zz_long_range(g, float(spec.get("coupling", spec.get("C", 1.0))), _decay_of(spec))
    if kind == "cnot_pair":
        return cnot_pair(g, int(spec["x"]), int(spec["y"]), float(spec.get("alpha", 2.0)))
    if kind == "zz_set_protocol":
        return zz_set_protocol(
            g, spec["X"], spec["Y"], float(spec.get("alpha", 1.0)), float(spec.get("C", 1.0))
        )
    if kind == "zz_field":
        alpha = spec.get("alpha")
        return zz_field(
            g, float(spec.get("J", 1.0)), float(spec.get("h", 1.0)),
            None if alpha is None else float(alpha),
        )
    if kind == "transverse_field":
        return transverse_field(g, float(spec.get("h", 1.0)))
    if kind == "xxz":
        return xxz(g, float(spec.get("Delta", 1.0)), spec.get("part", "full"))
    if kind == "toric_code_long_range":
        L = int(spec.get("L", round(math.sqrt(g.n_sites / 2))))
        return toric_code_long_range(
            L,
            float(spec.get("alpha", 1.0)),
            float(spec.get("C_f", 0.25)),
            None if spec.get("C_g") is None else float(spec["C_g"]),
            float(spec.get("bound", 1.0)),
            graph=g,
        )
    if kind == "custom":
        specs = spec["terms"] if "terms" in spec else load_custom_terms(spec["path"])
        return custom(g, specs)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
