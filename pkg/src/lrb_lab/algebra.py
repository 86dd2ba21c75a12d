"""Dense operators on tensor-product spaces.

Every :class:`LocalOp` carries the sorted list of sites it acts on. The
basis index is big-endian over that list: the first site is the most
significant base-``q`` digit, which matches ``np.kron(A_first, A_second)``.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "HERMITIAN_TOL",
    "DimensionCapError",
    "dense_site_cap",
    "check_dense",
    "LocalOp",
    "local_op",
    "identity",
    "embed",
    "trim",
    "conditional_expectation",
    "spectral_norm",
    "exp_hermitian",
    "commutator",
    "PauliString",
    "pauli_commute",
    "pauli_op",
    "PAULI",
]

HERMITIAN_TOL = 1e-12
DEFAULT_DENSE_SITES = 14

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionCapError(RuntimeError):
    """A dense object would exceed the configured dimension cap."""

    def __init__(self, required_sites: int, q: int, allowed_sites: int):
        self.required_sites = required_sites
        self.allowed_sites = allowed_sites
        self.q = q
        super().__init__(
            f"dense computation needs {required_sites} sites at q={q} "
            f"(dimension {q ** required_sites}) but the cap allows {allowed_sites} "
            f"sites at q=2 (dimension {2 ** allowed_sites}); "
            "set LRB_LAB_DIM_CAP to change it"
        )


def dense_site_cap() -> int:
    """Maximum number of q=2 sites for full-space dense objects."""
    raw = os.environ.get("LRB_LAB_DIM_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_DENSE_SITES
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"LRB_LAB_DIM_CAP must be a positive integer, got {raw!r}")
    return cap


def check_dense(n_sites: int, q: int = 2) -> None:
    cap = dense_site_cap()
    if q**n_sites > 2**cap:
        raise DimensionCapError(n_sites, q, cap)


def _is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    if mat.size == 0:
        return True
    return bool(np.abs(mat - mat.conj().T).max() <= tol)


@dataclass(frozen=True, eq=False)
class LocalOp:
    """A matrix on ``q**len(support)`` dimensions tagged with its support."""

    support: tuple[int, ...]
    mat: np.ndarray = field(repr=False)
    q: int = 2

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        if list(support) != sorted(set(support)):
            raise ValueError(f"support must be sorted and duplicate free, got {support}")
        mat = np.asarray(self.mat, dtype=complex)
        dim = self.q ** len(support)
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match q**|support| = {dim}"
            )
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mat", mat)

    @functools.cached_property
    def hermitian(self) -> bool:
        """``||mat - mat^dagger||_max <= 1e-12``, computed on first use."""
        return _is_hermitian(self.mat)

    @property
    def n_sites(self) -> int:
        return len(self.support)

    @property
    def dag(self) -> "LocalOp":
        return LocalOp(self.support, self.mat.conj().T, self.q)

    def norm(self) -> float:
        return spectral_norm(self)

    def on(self, target: Iterable[int]) -> "LocalOp":
        return embed(self, target)

    def _aligned(self, other: "LocalOp"):
        if self.q != other.q:
            raise ValueError("local dimensions differ")
        target = sorted(set(self.support) | set(other.support))
        return embed(self, target).mat, embed(other, target).mat, tuple(target)

    def __matmul__(self, other: "LocalOp") -> "LocalOp":
        a, b, target = self._aligned(other)
        return LocalOp(target, a @ b, self.q)

    def __add__(self, other: "LocalOp") -> "LocalOp":
        a, b, target = self._aligned(other)
        return LocalOp(target, a + b, self.q)

    def __sub__(self, other: "LocalOp") -> "LocalOp":
        a, b, target = self._aligned(other)
        return LocalOp(target, a - b, self.q)

    def __mul__(self, scalar) -> "LocalOp":
        return LocalOp(self.support, self.mat * scalar, self.q)

    __rmul__ = __mul__

    def __neg__(self) -> "LocalOp":
        return LocalOp(self.support, -self.mat, self.q)


def local_op(mat, support: Iterable[int], q: int = 2) -> LocalOp:
    """Wrap ``mat`` given in the order of ``support`` (sorted if needed)."""
    support = [int(s) for s in support]
    mat = np.asarray(mat, dtype=complex)
    if support == sorted(support):
        return LocalOp(tuple(support), mat, q)
    n = len(support)
    order = np.argsort(support)
    T = mat.reshape((q,) * (2 * n)).transpose(list(order) + [n + i for i in order])
    return LocalOp(tuple(sorted(support)), T.reshape(q**n, q**n), q)


def identity(support: Iterable[int] = (), q: int = 2) -> LocalOp:
    support = tuple(sorted(set(int(s) for s in support)))
    return LocalOp(support, np.eye(q ** len(support), dtype=complex), q)


def embed(op: LocalOp, target: Iterable[int]) -> LocalOp:
    """Tensor ``op`` with identities so that it lives on ``target``."""
    target = tuple(sorted(set(int(s) for s in target)))
    if target == op.support:
        return op
    if not set(op.support) <= set(target):
        missing = sorted(set(op.support) - set(target))
        raise ValueError(f"cannot embed: sites {missing} are not in the target support")
    q = op.q
    check_dense(len(target), q)
    extra = [s for s in target if s not in op.support]
    m = len(target)
    full = np.kron(op.mat, np.eye(q ** len(extra), dtype=complex))
    if not extra or list(op.support) + extra == list(target):
        return LocalOp(target, full, q)
    position = {s: i for i, s in enumerate(list(op.support) + extra)}
    perm = [position[s] for s in target]
    T = full.reshape((q,) * (2 * m)).transpose(perm + [m + p for p in perm])
    return LocalOp(target, T.reshape(q**m, q**m), q)


def trim(op: LocalOp, tol: float = 0.0) -> LocalOp:
    """Drop every site on which ``op`` acts as the identity.

    A site is dropped when ``op`` equals ``B (x) 1`` up to ``tol`` in
    Frobenius norm, ``B`` being the ``(0, 0)`` block on that site, so an
    exact embedding is undone exactly.
    """
    q = op.q
    current = op
    for site in op.support:
        n = current.n_sites
        pos = current.support.index(site)
        T = current.mat.reshape((q,) * (2 * n))
        block = np.take(np.take(T, 0, axis=n + pos), 0, axis=pos)
        rest = tuple(s for s in current.support if s != site)
        cand = LocalOp(rest, block.reshape(q ** (n - 1), q ** (n - 1)), q)
        diff = embed(cand, current.support).mat - current.mat
        if np.linalg.norm(diff) <= tol:
            current = cand
    return current


def conditional_expectation(op: LocalOp, Y: Iterable[int]) -> LocalOp:
    """Normalized partial trace of ``op`` over ``support \\ Y``.

    ``Y`` must be contained in ``op.support``; callers embed first.
    """
    Y = tuple(sorted(set(int(y) for y in Y)))
    if not set(Y) <= set(op.support):
        raise ValueError(
            f"Y={list(Y)} is not contained in the operator support {list(op.support)}"
        )
    if Y == op.support:
        return op
    q, n = op.q, op.n_sites
    keep = [i for i, s in enumerate(op.support) if s in Y]
    drop = [i for i, s in enumerate(op.support) if s not in Y]
    dk, dr = q ** len(keep), q ** len(drop)
    T = op.mat.reshape((q,) * (2 * n))
    T = T.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    T = T.reshape(dk, dr, dk, dr)
    return LocalOp(Y, np.einsum("ajbj->ab", T) / dr, q)


def spectral_norm(op) -> float:
    """Largest singular value.

    Generalized permutation matrices (at most one non-zero per row and
    column) are read off exactly; Hermitian and anti-Hermitian matrices go
    through ``eigvalsh``; anything else through an SVD.
    """
    m = op.mat if isinstance(op, LocalOp) else np.asarray(op, dtype=complex)
    if m.size == 0:
        return 0.0
    if not np.isfinite(m).all():
        raise ValueError("operator has NaN or infinite entries")
    mx = np.abs(m).max()
    if mx == 0:
        return 0.0
    nz = m != 0
    if (nz.sum(axis=0) <= 1).all() and (nz.sum(axis=1) <= 1).all():
        return float(mx)
    h = m.conj().T
    if np.abs(m - h).max() <= 1e-12 * mx:
        return float(np.abs(np.linalg.eigvalsh((m + h) / 2)).max())
    if np.abs(m + h).max() <= 1e-12 * mx:
        return float(np.abs(np.linalg.eigvalsh(0.5j * (m - h))).max())
    return float(np.linalg.norm(m, 2))


def exp_hermitian(op: LocalOp, t: float) -> LocalOp:
    """``exp(i t op)`` for Hermitian ``op``."""
    if not op.hermitian:
        raise ValueError("exp_hermitian needs a Hermitian operator")
    if t == 0:
        return identity(op.support, op.q)
    w, v = np.linalg.eigh(op.mat)
    return LocalOp(op.support, (v * np.exp(1j * t * w)) @ v.conj().T, op.q)


def commutator(a: LocalOp, b: LocalOp) -> LocalOp:
    if not set(a.support) & set(b.support):
        target = tuple(sorted(set(a.support) | set(b.support)))
        return LocalOp(target, np.zeros((a.q ** len(target),) * 2, dtype=complex), a.q)
    return a @ b - b @ a


_PAULI_PRODUCT = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}


@dataclass(frozen=True)
class PauliString:
    """A product of single-qubit Paulis with a unit phase.

    ``letters`` is a sorted tuple of ``(site, letter)`` pairs with letters in
    ``XYZ``; identity factors are not stored.
    """

    letters: tuple[tuple[int, str], ...] = ()
    phase: complex = 1.0

    def __post_init__(self):
        cleaned = []
        for site, letter in self.letters:
            letter = letter.upper()
            if letter not in "IXYZ" or len(letter) != 1:
                raise ValueError(f"unknown Pauli letter {letter!r}")
            if letter != "I":
                cleaned.append((int(site), letter))
        sites = [s for s, _ in cleaned]
        if len(set(sites)) != len(sites):
            raise ValueError("a Pauli string has at most one letter per site")
        if not np.isclose(abs(self.phase), 1.0):
            raise ValueError(f"phase must have unit modulus, got {self.phase}")
        object.__setattr__(self, "letters", tuple(sorted(cleaned)))

    @classmethod
    def from_label(cls, label: str | Mapping[int, str], phase: complex = 1.0) -> "PauliString":
        """Parse ``"X0 Z3"`` or ``{0: "X", 3: "Z"}``."""
        if isinstance(label, Mapping):
            return cls(tuple(label.items()), phase)
        letters = []
        for token in label.replace("*", " ").split():
            letters.append((int(token[1:]), token[0]))
        return cls(tuple(letters), phase)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.letters)

    def letter(self, site: int) -> str:
        return dict(self.letters).get(site, "I")

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        mine, theirs = dict(self.letters), dict(other.letters)
        phase = self.phase * other.phase
        out = {}
        for site in sorted(set(mine) | set(theirs)):
            a, b = mine.get(site, "I"), theirs.get(site, "I")
            if a == "I" or b == "I":
                out[site] = b if a == "I" else a
            elif a != b:
                factor, out[site] = _PAULI_PRODUCT[(a, b)]
                phase *= factor
        return PauliString(tuple(out.items()), phase)

    def commutes(self, other: "PauliString") -> bool:
        theirs = dict(other.letters)
        clashes = sum(1 for s, a in self.letters if theirs.get(s, a) != a)
        return clashes % 2 == 0

    def to_local_op(self, support: Iterable[int] | None = None) -> LocalOp:
        target = self.support if support is None else tuple(sorted(set(support)))
        if not set(self.support) <= set(target):
            raise ValueError("target support misses sites of the string")
        mat = np.ones((1, 1), dtype=complex)
        for site in target:
            mat = np.kron(mat, PAULI[self.letter(site)])
        return LocalOp(target, self.phase * mat, 2)

    def __str__(self) -> str:
        body = " ".join(f"{a}{s}" for s, a in self.letters) or "I"
        return body if self.phase == 1 else f"({self.phase})*{body}"


def pauli_commute(a: PauliString, b: PauliString, q: int = 2) -> bool:
    """Symbolic commutation test, valid for qubits only."""
    if q != 2:
        raise ValueError(f"Pauli strings need q=2 sites, got q={q}")
    return a.commutes(b)


def pauli_op(label: str | Mapping[int, str], coefficient: complex = 1.0) -> LocalOp:
    """Dense form of a Pauli product such as ``"X0 Z3"``."""
    return PauliString.from_label(label).to_local_op() * coefficient
