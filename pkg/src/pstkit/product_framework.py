"""Matrices of the form ``B (x) C + M (x) N`` with ``BM = MB`` and ``CN = NC``.

A commuting pair ``(B, M)`` has common eigenprojectors ``E_r`` with
``B E_r = beta_r E_r`` and ``M E_r = mu_r E_r``.  Conjugating by a basis
adapted to the ``E_r`` splits the walk on ``B (x) C + M (x) N`` into blocks
``exp(it L_r)`` with ``L_r = beta_r C + mu_r N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotCommuting, UnsupportedSpectrum
from .qfield import QuadValue, RadMatrix
from .spectra import _as_int_matrix, decompose_matrix

__all__ = [
    "BlockDecomposition",
    "FactorRequirement",
    "Violation",
    "simultaneous_decompose",
    "sum_product_unitary",
    "block_basis",
    "block_unitaries",
    "necessary_check",
]


@dataclass(frozen=True)
class Violation:
    """A necessary condition that fails, with a human-readable witness."""

    reason: str
    witness: str = ""
    index: Optional[int] = None

    passed = False

    def to_json(self) -> dict:
        return {"type": "violation", "reason": self.reason, "witness": self.witness, "index": self.index}


@dataclass(frozen=True)
class FactorRequirement:
    r: int
    kind: str  # "periodicity_at_u" or "pst_u_to_v"
    sign: int
    beta: QuadValue
    mu: QuadValue

    def to_json(self) -> dict:
        return {"r": self.r, "kind": self.kind, "sign": self.sign, "beta": str(self.beta), "mu": str(self.mu)}


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    b: np.ndarray
    m: np.ndarray
    pairs: tuple[tuple[QuadValue, QuadValue, RadMatrix], ...]

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def __len__(self):
        return len(self.pairs)

    def projectors(self) -> list[RadMatrix]:
        return [e for _, _, e in self.pairs]

    def blocks(self, c, n) -> list[RadMatrix]:
        """Exact ``L_r = beta_r C + mu_r N``."""
        c, n = _as_int_matrix(c), _as_int_matrix(n)
        return [RadMatrix.combine([beta, mu], [c, n]) for beta, mu, _ in self.pairs]

    def blocks_float(self, c, n) -> list[np.ndarray]:
        c, n = np.asarray(c, dtype=float), np.asarray(n, dtype=float)
        return [float(beta) * c + float(mu) * n for beta, mu, _ in self.pairs]


def _check_commute(b: np.ndarray, m: np.ndarray, what: str):
    if b.shape != m.shape:
        raise ValueError(f"{what}: shapes differ, {b.shape} vs {m.shape}")
    bo, mo = b.astype(object), m.astype(object)
    if not np.array_equal(bo.dot(mo), mo.dot(bo)):
        raise NotCommuting(f"{what} do not commute")


def simultaneous_decompose(b, m) -> BlockDecomposition:
    """Common exact eigenprojectors of two commuting symmetric integer matrices.

    Each nonzero product ``E_i F_j`` of eigenprojectors of ``B`` and ``M`` is
    the projector onto a common eigenspace with eigenvalues ``(beta_i, mu_j)``.
    """
    b, m = _as_int_matrix(b), _as_int_matrix(m)
    _check_commute(b, m, "B and M")
    db, dm = decompose_matrix(b), decompose_matrix(m)
    for name, d in (("B", db), ("M", dm)):
        if not d.fully_recognized:
            raise UnsupportedSpectrum(f"{name} has eigenvalues of degree >= 3")
    pairs = []
    for beta, e in zip(db.eigenvalues, db.projectors):
        for mu, f in zip(dm.eigenvalues, dm.projectors):
            p = e @ f
            if not p.is_zero():
                pairs.append((beta, mu, p))
    return BlockDecomposition(b, m, tuple(pairs))


def sum_product_unitary(b, c, m, n, t: float) -> np.ndarray:
    """``exp(it (B (x) C + M (x) N))`` as a double sum over common projectors."""
    left = simultaneous_decompose(b, m)
    right = simultaneous_decompose(c, n)
    t = float(t)
    lf = [(float(beta), float(mu), e.to_float()) for beta, mu, e in left.pairs]
    rf = [(float(gam), float(nu), f.to_float()) for gam, nu, f in right.pairs]
    size = left.n * right.n
    out = np.zeros((size, size), dtype=complex)
    for beta, mu, e in lf:
        for gam, nu, f in rf:
            out += np.exp(1j * t * (beta * gam + mu * nu)) * np.kron(e, f)
    return out


def block_basis(dec: BlockDecomposition) -> tuple[np.ndarray, list[int]]:
    """Orthogonal ``P`` whose column groups span the common eigenspaces, and their dimensions."""
    cols, dims = [], []
    for _, _, e in dec.pairs:
        lam, vecs = np.linalg.eigh(e.to_float())
        keep = vecs[:, lam > 0.5]
        cols.append(keep)
        dims.append(keep.shape[1])
    return np.hstack(cols), dims


def block_unitaries(dec: BlockDecomposition, c, n, t: float) -> list[np.ndarray]:
    """``exp(it L_r)`` for each block, via a symmetric eigensolver."""
    out = []
    for lr in dec.blocks_float(c, n):
        lam, vecs = np.linalg.eigh(lr)
        out.append((vecs * np.exp(1j * float(t) * lam)) @ vecs.T)
    return out


def necessary_check(b, c, m, n, wu: tuple[int, int], zv: tuple[int, int]):
    """Block requirements forced by ``U(tau) e_(w,u) = lam e_(z,v)``.

    ``w`` and ``z`` must be strongly cospectral for every common projector of
    ``(B, M)``.  Each block ``r`` with ``E_r e_w != 0`` then has to carry
    ``exp(i tau L_r) e_u = sign_r * lam * e_v``.  Returns the list of
    requirements or a :class:`Violation` naming the first bad block.
    """
    (w, u), (z, v) = wu, zv
    c, n = _as_int_matrix(c), _as_int_matrix(n)
    if c.shape != n.shape:
        raise ValueError("C and N must have the same shape")
    _check_commute(c, n, "C and N")
    dec = simultaneous_decompose(b, m)
    kind = "periodicity_at_u" if u == v else "pst_u_to_v"
    reqs = []
    for r, (beta, mu, e) in enumerate(dec.pairs):
        zw, zz = e.column_is_zero(w), e.column_is_zero(z)
        if zw and zz:
            continue
        if w == z or e.columns_equal(w, z, 1):
            sign = 1
        elif e.columns_equal(w, z, -1):
            sign = -1
        else:
            return Violation("not strongly cospectral",
                             f"common projector {r} (beta={beta}, mu={mu}) has E e_w != +-E e_z", r)
        reqs.append(FactorRequirement(r, kind, sign, beta, mu))
    return reqs
