"""Perfect state transfer and periodicity certificates for a single graph.

``certify_pst`` checks, in order, strong cospectrality of the two vertices,
the quadratic shape ``theta_r = (a + b_r sqrt(D)) / 2`` of their common
eigenvalue support, and the parity pattern of ``(theta_0 - theta_r) / (g sqrt(D))``
against the sign partition.  On success the minimal transfer time is
``pi / (g sqrt(D))`` and the phase is ``exp(i tau theta_0)``, both exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import UnsupportedSpectrum
from .graph_core import Graph, write_graph6
from .qfield import ExactTime, QuadValue, UnitPhase, v2
from .spectra import SpectralDecomposition, decompose, strong_cospectral, support

__all__ = [
    "PSTCertificate",
    "PSTFailure",
    "PeriodicityCertificate",
    "quadratic_shape",
    "certify_pst",
    "periodic_at",
    "minimal_period",
    "transfer_phase",
]


@dataclass(frozen=True, eq=False)
class PSTFailure:
    u: int
    v: int
    condition: str
    witness: str
    graph: Optional[Graph] = field(default=None, repr=False)

    passed = False

    def oracle_claims(self):
        return []

    def to_json(self) -> dict:
        out = {"type": "pst_failure", "u": self.u, "v": self.v,
               "condition": self.condition, "witness": self.witness}
        if self.graph is not None:
            out["graph"] = write_graph6(self.graph)
        return out


@dataclass(frozen=True, eq=False)
class PSTCertificate:
    u: int
    v: int
    delta: int
    a: int
    b: tuple[int, ...]
    g: int
    tau0: ExactTime
    phase: UnitPhase
    support: tuple[QuadValue, ...]
    plus: tuple[QuadValue, ...]
    minus: tuple[QuadValue, ...]
    graph: Optional[Graph] = field(default=None, repr=False)

    passed = True

    @property
    def theta0(self) -> QuadValue:
        return self.support[0]

    def oracle_claims(self):
        return [(self.graph, self.u, self.v, self.tau0, self.phase)]

    def time(self, k: int = 1) -> ExactTime:
        """``k * tau0``; transfer happens exactly at odd ``k``."""
        return self.tau0 * k

    def conditions(self) -> dict:
        return {
            "i": {"passed": True, "plus": [str(t) for t in self.plus], "minus": [str(t) for t in self.minus]},
            "ii": {"passed": True, "delta": self.delta, "a": self.a, "b": list(self.b)},
            "iii": {"passed": True, "g": self.g},
        }

    def to_json(self) -> dict:
        out = {
            "type": "pst",
            "u": self.u,
            "v": self.v,
            "delta": self.delta,
            "g": self.g,
            "tau0": str(self.tau0),
            "phase": str(self.phase),
            "conditions": self.conditions(),
        }
        if self.graph is not None:
            out["graph"] = write_graph6(self.graph)
        return out


@dataclass(frozen=True, eq=False)
class PeriodicityCertificate:
    """``U(period) e_u = phase * e_u``.

    ``period`` is None for a vertex whose support is a single eigenvalue
    ``theta``: it is then an eigenvector and returns at every time with
    phase ``exp(i t theta)``; ``phase`` holds ``theta`` as exponent per unit pi.
    """

    u: int
    period: Optional[ExactTime]
    phase: UnitPhase
    g: int = 0
    delta: int = 1
    graph: Optional[Graph] = field(default=None, repr=False)

    def oracle_claims(self):
        if self.period is None:
            return []
        return [(self.graph, self.u, self.u, self.period, self.phase)]

    def to_json(self) -> dict:
        return {"type": "periodicity", "u": self.u,
                "period": None if self.period is None else str(self.period),
                "phase": str(self.phase)}


def _as_decomposition(g: Union[Graph, SpectralDecomposition]) -> SpectralDecomposition:
    return g if isinstance(g, SpectralDecomposition) else decompose(g)


def quadratic_shape(thetas: list[QuadValue]):
    """Write ``thetas`` as ``(a + b_r sqrt(D)) / 2`` with common ``a`` and ``D``.

    Returns ``(D, a, b)`` or a string naming the obstruction.
    """
    fields = sorted({t.delta for t in thetas if t.delta > 1})
    if len(fields) > 1:
        return f"support mixes quadratic fields sqrt({fields[0]}) and sqrt({fields[1]})"
    if not fields:
        return 1, 0, tuple(int(2 * t.x) for t in thetas)
    delta = fields[0]
    x0 = thetas[0].x
    for t in thetas[1:]:
        if t.x != x0:
            return f"no common integer a: {thetas[0]} and {t} have rational parts {x0} != {t.x}"
    hf = [t.half_form() for t in thetas]
    if any(h is None for h in hf):
        return "support eigenvalues are not quadratic integers"
    return delta, hf[0][0], tuple(h[1] for h in hf)


def _scaled_gaps(thetas, delta, b) -> list[int]:
    """``(theta_0 - theta_r) / sqrt(D)`` as exact integers."""
    if delta == 1:
        return [int(thetas[0].x - t.x) for t in thetas]
    out = []
    for br in b:
        diff = b[0] - br
        assert diff % 2 == 0, "quadratic integers with common a have b of one parity"
        out.append(diff // 2)
    return out


def certify_pst(g: Union[Graph, SpectralDecomposition], u: int, v: int):
    """Decide perfect state transfer between ``u`` and ``v``.

    Returns a :class:`PSTCertificate` or a :class:`PSTFailure` naming the
    first violated condition (``"i"``, ``"ii"`` or ``"iii"``) with a witness.
    """
    if u == v:
        raise ValueError("PST needs two distinct vertices; use minimal_period for u == v")
    d = _as_decomposition(g)
    graph = d.graph
    rep = strong_cospectral(d, u, v)
    if not rep.strongly_cospectral:
        return PSTFailure(u, v, "i", f"not strongly cospectral: {rep.witness}", graph)
    if rep.residual_touched:
        polys = [str(grp.poly) for grp in d.residual if not grp.projector.column_is_zero(u)]
        return PSTFailure(u, v, "ii", f"support contains roots of degree >= 3: {', '.join(polys)}", graph)

    idx = sorted(rep.plus + rep.minus)
    thetas = [d.eigenvalues[r] for r in idx]
    shape = quadratic_shape(thetas)
    if isinstance(shape, str):
        return PSTFailure(u, v, "ii", shape, graph)
    delta, a, b = shape
    gaps = _scaled_gaps(thetas, delta, b)
    gg = math.gcd(*gaps)
    if gg == 0:
        return PSTFailure(u, v, "iii", "support is a single eigenvalue", graph)
    plus = set(rep.plus)
    # for graphs theta0 is always in Phi+; signed matrices may put it in Phi-
    first = idx[0] in plus
    for r, gap in zip(idx, gaps):
        even = (gap // gg) % 2 == 0
        if even != ((r in plus) == first):
            side = "+" if r in plus else "-"
            return PSTFailure(
                u, v, "iii",
                f"{d.eigenvalues[r]} is in Phi{side} but (theta0 - theta)/(g sqrt({delta})) = {gap // gg}",
                graph)
    tau0 = ExactTime(Fraction(1, gg), delta)
    phase = UnitPhase(tau0.exponent(thetas[0]))
    if not first:
        phase = -phase
    return PSTCertificate(
        u=u, v=v, delta=delta, a=a, b=b, g=gg, tau0=tau0, phase=phase,
        support=tuple(thetas),
        plus=tuple(d.eigenvalues[r] for r in rep.plus),
        minus=tuple(d.eigenvalues[r] for r in rep.minus),
        graph=graph,
    )


def _exponents(d: SpectralDecomposition, idx, tau: ExactTime) -> list[QuadValue]:
    try:
        return [tau.exponent(d.eigenvalues[r]) for r in idx]
    except ValueError as exc:
        raise UnsupportedSpectrum(str(exc)) from exc


def _even_integer(w: QuadValue) -> bool:
    return w.is_integer and w.x.numerator % 2 == 0


def periodic_at(g: Union[Graph, SpectralDecomposition], u: int, tau: ExactTime) -> Optional[UnitPhase]:
    """Phase ``lam`` with ``U(tau) e_u = lam e_u`` if it exists, else None.

    Raises :class:`UnsupportedSpectrum` when the support of ``u`` contains
    eigenvalues of degree >= 3 (the answer is then left undetermined).
    """
    d = _as_decomposition(g)
    idx = support(d, u)
    ws = _exponents(d, idx, tau)
    for w in ws[1:]:
        try:
            diff = w - ws[0]
        except ValueError:
            return None  # irrational difference across fields
        if not _even_integer(diff):
            return None
    return UnitPhase(ws[0])


def transfer_phase(g: Union[Graph, SpectralDecomposition], u: int, v: int, tau: ExactTime) -> Optional[UnitPhase]:
    """Phase ``lam`` with ``U(tau) e_u = lam e_v`` (exact), else None."""
    d = _as_decomposition(g)
    if u == v:
        return periodic_at(d, u, tau)
    rep = strong_cospectral(d, u, v)
    if not rep.strongly_cospectral:
        return None
    if rep.residual_touched:
        raise UnsupportedSpectrum(f"support of vertex {u} contains eigenvalues of degree >= 3")
    idx = sorted(rep.plus + rep.minus)
    minus = set(rep.minus)
    ws = [w + (1 if r in minus else 0) for w, r in zip(_exponents(d, idx, tau), idx)]
    for w in ws[1:]:
        try:
            diff = w - ws[0]
        except ValueError:
            return None
        if not _even_integer(diff):
            return None
    return UnitPhase(ws[0])


def minimal_period(g: Union[Graph, SpectralDecomposition], u: int) -> Optional[PeriodicityCertificate]:
    """Smallest ``tau > 0`` with ``U(tau) e_u`` a multiple of ``e_u``, or None if never.

    The candidate ``2 pi / (g_u sqrt(D))`` is verified exactly with
    :func:`periodic_at` and then halved while the check still passes.
    """
    d = _as_decomposition(g)
    idx = support(d, u)
    thetas = [d.eigenvalues[r] for r in idx]
    if len(thetas) == 1:
        return PeriodicityCertificate(u, None, UnitPhase(thetas[0]), graph=d.graph)
    shape = quadratic_shape(thetas)
    if isinstance(shape, str):
        # eigenvalue differences are not commensurable
        return None
    delta, _, b = shape
    gg = math.gcd(*_scaled_gaps(thetas, delta, b))
    tau = ExactTime(Fraction(2, gg), delta)
    phase = periodic_at(d, u, tau)
    if phase is None:
        raise AssertionError("candidate period failed exact verification")
    for _ in range(v2(gg) + 1):
        half = tau * Fraction(1, 2)
        ph = periodic_at(d, u, half)
        if ph is None:
            break
        tau, phase = half, ph
    return PeriodicityCertificate(u, tau, phase, gg, delta, d.graph)
