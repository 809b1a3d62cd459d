"""Perfect state transfer on tensor products ``X x Y``.

With ``A(X) = sum_r theta_r E_r`` the walk on ``X x Y`` is
``sum_r E_r (x) U_Y(theta_r t)``, so transfer from ``(w, u)`` to ``(z, v)``
reduces to the factor ``Y`` evaluated at the rescaled times ``theta_r t``.
When ``Y`` has ``uv``-PST with eigenvalues ``b_i sqrt(D_u)`` on the support of
``u``, the question becomes a set of 2-adic and residue conditions on the
integers ``t_r`` with ``theta_r = t_r sqrt(D_w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import UnsupportedSpectrum
from .graph_core import Graph, cartesian_power, tensor
from .pst_core import PSTCertificate, certify_pst, minimal_period
from .product_framework import Violation
from .qfield import ExactTime, QuadValue, UnitPhase, odd_part, phase_order, v2
from .spectra import SpectralDecomposition, decompose, strong_cospectral, support
from .walk_oracle import unitary

__all__ = [
    "YCertificate",
    "TensorPSTReport",
    "FactorCheck",
    "tensor_unitary",
    "make_y_certificate",
    "tensor_necessary",
    "tensor_pst_check",
    "cartesian_power_certificate",
    "min_cartesian_power",
]


# -- Lemma-1 style unitary ----------------------------------------------------

def _numeric_projectors(d: SpectralDecomposition):
    """``(theta, E)`` pairs in floating point, residual roots taken from the eigensolver."""
    out = [(float(th), d.projector_float(r)) for r, th in enumerate(d.eigenvalues)]
    if d.residual:
        lam, vecs = np.linalg.eigh(d.matrix.astype(float))
        for grp in d.residual:
            for root in grp.roots:
                cols = vecs[:, np.abs(lam - root) < 1e-7 * max(1.0, abs(root))]
                out.append((float(root), cols @ cols.T))
    return out


def tensor_unitary(dx: Union[SpectralDecomposition, Graph], y: Graph, t: float) -> np.ndarray:
    """``U_{X x Y}(t) = sum_r E_r (x) U_Y(theta_r t)``."""
    if isinstance(dx, Graph):
        dx = decompose(dx)
    size = dx.n * y.n
    out = np.zeros((size, size), dtype=complex)
    for theta, e in _numeric_projectors(dx):
        out += np.kron(e, unitary(y, theta * float(t)))
    return out


# -- certificates for the Y factor --------------------------------------------

@dataclass(frozen=True, eq=False)
class YCertificate:
    """PST in ``Y`` from ``u`` to ``v`` with support eigenvalues ``b_i sqrt(delta)``.

    ``power`` is ``k`` for a certificate synthesized for ``Y^k`` (Cartesian
    power); ``u``, ``v`` then index the diagonal vertices ``(u,...,u)`` and
    ``(v,...,v)`` of the power graph.
    """

    cert: PSTCertificate
    b: tuple[int, ...]
    base: Graph = field(repr=False)
    base_u: int = 0
    base_v: int = 0
    power: int = 1

    @property
    def delta(self) -> int:
        return self.cert.delta

    @property
    def h(self) -> int:
        return self.cert.g

    @property
    def e(self) -> int:
        return v2(self.h)

    @property
    def ell(self) -> int:
        return self.h >> self.e

    @property
    def phase(self) -> UnitPhase:
        return self.cert.phase

    @property
    def tau0(self) -> ExactTime:
        return self.cert.tau0

    @property
    def u(self) -> int:
        return self.cert.u

    @property
    def v(self) -> int:
        return self.cert.v

    @property
    def graph(self) -> Graph:
        if self.cert.graph is not None:
            return self.cert.graph
        return cartesian_power(self.base, self.power)

    def to_json(self) -> dict:
        return {"delta_u": self.delta, "b": list(self.b), "h": self.h, "e": self.e, "ell": self.ell,
                "tau0": str(self.tau0), "phase": str(self.phase), "power": self.power}


def _surd_coefficient(theta: QuadValue, delta: int) -> Optional[int]:
    """Integer ``t`` with ``theta = t sqrt(delta)``, or None."""
    if delta == 1 or theta == 0:
        return int(theta.x) if theta.is_integer else None
    if theta.x != 0 or theta.delta != delta or theta.y.denominator != 1:
        return None
    return int(theta.y)


def make_y_certificate(gy: Graph, u: int, v: int) -> YCertificate:
    """Certify ``uv``-PST in ``Y`` and extract the integers ``b_i``.

    Raises :class:`UnsupportedSpectrum` if ``Y`` has no such PST or if a
    support eigenvalue is not an integer multiple of ``sqrt(delta)``.
    """
    cert = certify_pst(gy, u, v)
    if not cert.passed:
        raise UnsupportedSpectrum(f"Y has no PST from {u} to {v}: condition {cert.condition} ({cert.witness})")
    b = [_surd_coefficient(th, cert.delta) for th in cert.support]
    if any(x is None for x in b):
        raise UnsupportedSpectrum(
            f"support of {u} in Y is not of the form b*sqrt({cert.delta}) "
            f"(eigenvalues {', '.join(map(str, cert.support))}); outside the tensor criterion")
    return YCertificate(cert, tuple(b), gy, u, v, 1)


def _power_index(x: int, n: int, k: int) -> int:
    return sum(x * n ** j for j in range(k))


def cartesian_power_certificate(ycert: YCertificate, k: int, build_graph: bool = False) -> YCertificate:
    """Certificate for ``Y^k`` between the diagonal vertices, without decomposing ``Y^k``.

    The walk on a Cartesian power is the tensor power of the walk, so the
    transfer time is unchanged and the phase becomes ``lam**k``.  Support
    eigenvalues are the ``k``-fold sums of the base support.
    """
    if k < 1:
        raise ValueError("power must be positive")
    base = ycert.cert if ycert.power == 1 else None
    if base is None:
        raise ValueError("synthesize powers from a base (power 1) certificate")
    sums = {0}
    for _ in range(k):
        sums = {s + b for s in sums for b in ycert.b}
    bs = tuple(sorted(sums, reverse=True))
    d, h = ycert.delta, ycert.h
    sqrt_d = QuadValue(0, 1, d) if d > 1 else QuadValue(1)
    support_vals = tuple(sqrt_d * b for b in bs)
    plus = tuple(sv for sv, b in zip(support_vals, bs) if ((bs[0] - b) // h) % 2 == 0)
    minus = tuple(sv for sv, b in zip(support_vals, bs) if ((bs[0] - b) // h) % 2 == 1)
    n = ycert.base.n
    graph = cartesian_power(ycert.base, k) if build_graph else None
    cert = PSTCertificate(
        u=_power_index(ycert.base_u, n, k), v=_power_index(ycert.base_v, n, k),
        delta=d, a=0, b=tuple(2 * x for x in bs),
        g=h, tau0=base.tau0, phase=base.phase ** k,
        support=support_vals, plus=plus, minus=minus, graph=graph,
    )
    return YCertificate(cert, bs, ycert.base, ycert.base_u, ycert.base_v, k)


# -- necessary conditions -----------------------------------------------------

@dataclass(frozen=True)
class FactorCheck:
    factor: str
    kind: str  # "periodicity" or "pst"
    vertices: tuple[int, int]
    certificate: object = field(repr=False, default=None)

    def to_json(self) -> dict:
        c = self.certificate
        return {"factor": self.factor, "kind": self.kind, "vertices": list(self.vertices),
                "certificate": c.to_json() if c is not None else None}


def _factor_phenomenon(name: str, g: Graph, a: int, b: int):
    if a == b:
        per = minimal_period(g, a)
        if per is None:
            return Violation(f"{name} is not periodic at {a}", "eigenvalue differences on the support are incommensurable")
        return FactorCheck(name, "periodicity", (a, a), per)
    cert = certify_pst(g, a, b)
    if not cert.passed:
        return Violation(f"{name} has no PST from {a} to {b}", f"condition {cert.condition}: {cert.witness}")
    return FactorCheck(name, "pst", (a, b), cert)


def tensor_necessary(gx: Graph, gy: Graph, wu: tuple[int, int], zv: tuple[int, int]):
    """Factor phenomena forced by PST from ``(w,u)`` to ``(z,v)`` in ``X x Y``.

    Each factor must be periodic at its vertex when the two coordinates agree
    and must have PST between them otherwise.  Returns the list of
    :class:`FactorCheck` or the first :class:`Violation`.
    """
    (w, u), (z, v) = wu, zv
    out = []
    for name, g, a, b in (("X", gx, w, z), ("Y", gy, u, v)):
        res = _factor_phenomenon(name, g, a, b)
        if isinstance(res, Violation):
            return res
        out.append(res)
    return out


# -- the iff check ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TensorPSTReport:
    w: int
    z: int
    u: int
    v: int
    verdict: dict
    reason: str = ""
    delta_w: Optional[int] = None
    delta_u: Optional[int] = None
    t_r: tuple[int, ...] = ()
    plus: tuple[int, ...] = ()
    minus: tuple[int, ...] = ()
    f: Optional[int] = None
    e: Optional[int] = None
    ell: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    tau: Optional[ExactTime] = None
    phase: Optional[UnitPhase] = None
    power: int = 1
    x: Optional[Graph] = field(default=None, repr=False)
    ycert: Optional[YCertificate] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(self.verdict.get(k) is True for k in ("i", "ii", "iii"))

    def product_graph(self) -> Graph:
        return tensor(self.x, self.ycert.graph)

    def product_vertices(self) -> tuple[int, int]:
        ny = self.ycert.base.n ** self.ycert.power
        return self.w * ny + self.u, self.z * ny + self.v

    def oracle_claims(self):
        if not self.passed:
            return []
        a, b = self.product_vertices()
        return [(self.product_graph(), a, b, self.tau, self.phase)]

    def to_json(self) -> dict:
        return {
            "type": "tensor_pst",
            "passed": self.passed,
            "verdict": dict(self.verdict),
            "reason": self.reason,
            "w": self.w, "z": self.z, "u": self.u, "v": self.v,
            "power": self.power,
            "delta_w": self.delta_w, "delta_u": self.delta_u,
            "t_r": list(self.t_r), "f": self.f, "e": self.e, "ell": self.ell,
            "n": self.n, "m": self.m,
            "tau": None if self.tau is None else str(self.tau),
            "phase": None if self.phase is None else str(self.phase),
        }


def _fail(w, z, ycert, cond, reason, x, **kw) -> TensorPSTReport:
    verdict = {"i": None, "ii": None, "iii": None}
    for c in ("i", "ii", "iii"):
        if c == cond:
            verdict[c] = False
            break
        verdict[c] = True
    return TensorPSTReport(w, z, ycert.u, ycert.v, verdict, reason, delta_u=ycert.delta,
                           e=ycert.e, ell=ycert.ell, power=ycert.power, x=x, ycert=ycert, **kw)


def tensor_pst_check(gx: Union[Graph, SpectralDecomposition], w: int, z: int, ycert: YCertificate) -> TensorPSTReport:
    """Decide PST from ``(w, u)`` to ``(z, v)`` in ``X x Y`` given ``uv``-PST in ``Y``."""
    dx = gx if isinstance(gx, SpectralDecomposition) else decompose(gx)
    x = dx.graph if dx.graph is not None else Graph(dx.matrix)
    if w == z:
        if dx.touches_residual(w):
            return _fail(w, z, ycert, "i", f"support of {w} in X has eigenvalues of degree >= 3", x)
        idx, plus, minus = support(dx, w), support(dx, w), []
    else:
        rep = strong_cospectral(dx, w, z)
        if not rep.strongly_cospectral:
            return _fail(w, z, ycert, "i", f"{w} and {z} are not strongly cospectral in X: {rep.witness}", x)
        if rep.residual_touched:
            return _fail(w, z, ycert, "i", f"support of {w} in X has eigenvalues of degree >= 3", x)
        idx, plus, minus = sorted(rep.plus + rep.minus), list(rep.plus), list(rep.minus)
    thetas = [dx.eigenvalues[r] for r in idx]

    # (i) theta_r = t_r sqrt(D_w)
    fields = {th.delta for th in thetas if not th.is_rational}
    if len(fields) > 1:
        return _fail(w, z, ycert, "i", "support of w mixes quadratic fields", x)
    dw = fields.pop() if fields else 1
    ts = [_surd_coefficient(th, dw) for th in thetas]
    if any(t is None for t in ts):
        bad = next(th for th, t in zip(thetas, ts) if t is None)
        return _fail(w, z, ycert, "i", f"eigenvalue {bad} is not an integer multiple of sqrt({dw})", x,
                     delta_w=dw)
    tr = dict(zip(idx, ts))
    t_plus = tuple(tr[r] for r in sorted(plus))
    t_minus = tuple(tr[r] for r in sorted(minus))
    common = dict(delta_w=dw, t_r=tuple(ts), plus=t_plus, minus=t_minus)

    # (ii) common power of two, no zero eigenvalue
    if 0 in ts:
        return _fail(w, z, ycert, "ii", "0 is in the eigenvalue support of w", x, **common)
    vals = {v2(t) for t in ts}
    if len(vals) > 1:
        return _fail(w, z, ycert, "ii", f"t_r have different powers of two: {sorted(vals)}", x, **common)
    f = vals.pop()
    common["f"] = f

    # (iii) residues of the odd parts modulo the phase order
    lam = ycert.phase
    n = phase_order(lam)
    common["n"] = n
    kp = [odd_part(t) for t in t_plus]
    km = [odd_part(t) for t in t_minus]
    if w == z:
        res = {k % n for k in kp}
        if len(res) > 1:
            return _fail(w, z, ycert, "iii", f"odd parts {kp} fall in several classes mod {n}", x, **common)
        m = res.pop()
        phase = lam ** kp[0]
    else:
        if n % 2:
            return _fail(w, z, ycert, "iii", f"phase order n = {n} is odd", x, **common)
        res_p = {k % n for k in kp}
        res_m = {(k - n // 2) % n for k in km}
        allres = res_p | res_m
        if len(allres) > 1:
            return _fail(w, z, ycert, "iii",
                         f"odd parts {kp} (plus) and {km} (minus) do not fit one class m mod {n}",
                         x, **common)
        m = allres.pop()
        phase = lam ** kp[0] if kp else -(lam ** km[0])
    tau = ExactTime(Fraction(1, (1 << (ycert.e + f)) * ycert.ell), dw * ycert.delta)
    return TensorPSTReport(w, z, ycert.u, ycert.v, {"i": True, "ii": True, "iii": True}, "",
                           delta_u=ycert.delta, e=ycert.e, ell=ycert.ell, m=m, tau=tau, phase=phase,
                           power=ycert.power, x=x, ycert=ycert, **common)


def min_cartesian_power(gx: Union[Graph, SpectralDecomposition], ycert: YCertificate, w: int,
                        z: Optional[int] = None) -> Optional[int]:
    """Smallest ``k`` with PST from ``(w, u..u)`` to ``(z, v..v)`` in ``X x Y^k``.

    Conditions (i) and (ii) do not depend on ``k``; if they fail the answer is
    None.  Otherwise ``lam**k`` cycles with period ``n``, so ``k <= n`` suffices.
    """
    z = w if z is None else z
    dx = gx if isinstance(gx, SpectralDecomposition) else decompose(gx)
    n = phase_order(ycert.phase)
    for k in range(1, n + 1):
        rep = tensor_pst_check(dx, w, z, cartesian_power_certificate(ycert, k))
        if rep.passed:
            return k
        if rep.verdict["i"] is False or rep.verdict["ii"] is False:
            return None
    return None
