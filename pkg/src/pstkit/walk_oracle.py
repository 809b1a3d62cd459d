"""Numerical oracle for ``U(t) = exp(itA)`` built on a dense symmetric eigensolver.

Nothing here depends on the exact machinery; it exists to check it.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from . import _kernels
from .graph_core import Graph
from .qfield import ExactTime, UnitPhase

__all__ = [
    "default_tol",
    "unitary",
    "amplitude",
    "fidelity",
    "ScanResult",
    "scan",
    "VerifyResult",
    "verify_certificate",
    "verify_claim",
]

PHASE_TOL = 1e-8


def default_tol() -> float:
    """Fidelity tolerance; ``PSTKIT_TOL`` overrides the default ``1e-9``."""
    return float(os.environ.get("PSTKIT_TOL", "1e-9"))


def _matrix(g) -> np.ndarray:
    return g.adj if isinstance(g, Graph) else np.asarray(g)


@lru_cache(maxsize=256)
def _eigh_cached(key: bytes, n: int):
    a = np.frombuffer(key, dtype=np.float64).reshape(n, n)
    lam, vecs = np.linalg.eigh(a)
    lam.setflags(write=False)
    vecs.setflags(write=False)
    return lam, vecs


def eigh(g) -> tuple[np.ndarray, np.ndarray]:
    a = np.ascontiguousarray(_matrix(g), dtype=np.float64)
    return _eigh_cached(a.tobytes(), a.shape[0])


def _as_float_time(t) -> float:
    return t.to_float() if isinstance(t, ExactTime) else float(t)


def unitary(g: Union[Graph, np.ndarray], t) -> np.ndarray:
    """``exp(itA) = Q diag(exp(it lam)) Q^T``."""
    lam, vecs = eigh(g)
    t = _as_float_time(t)
    return (vecs * np.exp(1j * t * lam)) @ vecs.T


def amplitude(g, u: int, v: int, t) -> complex:
    """``<e_v, U(t) e_u>``."""
    lam, vecs = eigh(g)
    t = _as_float_time(t)
    return complex(np.sum(vecs[v] * vecs[u] * np.exp(1j * t * lam)))


def fidelity(g, u: int, v: int, t) -> float:
    return abs(amplitude(g, u, v, t))


@dataclass(frozen=True)
class ScanResult:
    best_t: float
    best_fidelity: float
    t_max: float
    step: float


def scan(g, u: int, v: int, t_max: float = 20.0, step: float = 1e-3, tie_tol: float = 1e-6) -> ScanResult:
    """Grid maximum of ``|<e_v, U(t) e_u>|`` over ``t = step, 2 step, ..., t_max``.

    ``best_t`` is the earliest grid time within ``tie_tol`` of the maximum, so
    a periodic pattern reports its first occurrence rather than whichever
    repetition happens to land closest to a grid point.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    lam, vecs = eigh(g)
    coef = np.ascontiguousarray(vecs[v] * vecs[u])
    times = step * np.arange(1, int(round(t_max / step)) + 1, dtype=np.float64)
    amps = _kernels.amplitude_grid(coef, np.ascontiguousarray(lam), times)
    best = float(amps.max())
    i = int(np.argmax(amps >= best - tie_tol))
    return ScanResult(float(times[i]), best, t_max, step)


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    fidelity: float
    phase_error: float
    time: float
    detail: str = ""


def verify_claim(g, u: int, v: int, tau, phase: UnitPhase, tol: float = None) -> VerifyResult:
    """Check ``U(tau) e_u = phase * e_v`` numerically."""
    tol = default_tol() if tol is None else tol
    t = _as_float_time(tau)
    amp = amplitude(g, u, v, t)
    err = abs(amp - phase.to_complex())
    ok = abs(amp) >= 1 - tol and err <= PHASE_TOL
    return VerifyResult(ok, abs(amp), err, t, f"{u}->{v} at {tau}")


def verify_certificate(cert, graph=None, tol: float = None) -> VerifyResult:
    """Run every oracle claim carried by a certificate or report.

    Certificates expose ``oracle_claims()`` returning
    ``(graph, u, v, time, phase)`` tuples; ``graph`` may be None when the
    caller passes it in.
    """
    claims = cert.oracle_claims()
    if not claims:
        return VerifyResult(False, 0.0, float("inf"), 0.0, "certificate makes no claim")
    worst = None
    for g, u, v, tau, phase in claims:
        g = g if g is not None else graph
        if g is None:
            raise ValueError("certificate carries no graph; pass one explicitly")
        res = verify_claim(g, u, v, tau, phase, tol)
        if worst is None or (not res.passed and worst.passed) or res.fidelity < worst.fidelity:
            worst = res
        if not res.passed:
            return res
    return worst
