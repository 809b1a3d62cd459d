"""Exact spectral decompositions of integer symmetric matrices.

Eigenvalues are guessed numerically, snapped to integers or quadratic
integers, and then certified exactly: the product ``m`` of the candidate
minimal polynomials must annihilate ``A`` and each recognized factor must
divide the characteristic polynomial.  Projectors come from
``E = q(A) / q(theta)`` with ``q = m / (x - theta)``, so every identity
(``E^2 = E``, ``sum E = I``, ``A = sum theta E``) holds exactly.

Eigenvalues that are neither integers nor quadratic are kept together by
irreducible factor as "residual groups" with rational group projectors.
Support and cospectrality queries remain exact on them; PST queries reject
them because such eigenvalues cannot carry perfect state transfer.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import UnsupportedSpectrum
from .graph_core import Graph
from .qfield import QuadValue, RadMatrix, squarefree_part

log = logging.getLogger(__name__)

__all__ = [
    "IntPolynomial",
    "char_poly",
    "SpectralDecomposition",
    "ResidualGroup",
    "CospectralReport",
    "decompose",
    "decompose_matrix",
    "support",
    "strong_cospectral",
]

# Characteristic polynomials above this size are not cross-checked (cost grows as n^4).
CHARPOLY_CHECK_MAX_N = 64
_SNAP_TOL = 1e-6


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients from the leading term down."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def divides(self, other: "IntPolynomial") -> bool:
        """Exact test that monic ``self`` divides ``other``."""
        _, rem = _divmod_monic(list(other.coeffs), list(self.coeffs))
        return all(r == 0 for r in rem)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(tuple(_poly_mul(self.coeffs, other.coeffs)))

    def __str__(self):
        terms = []
        d = self.degree
        for i, c in enumerate(self.coeffs):
            k = d - i
            if c == 0:
                continue
            mono = "" if k == 0 else "x" if k == 1 else f"x^{k}"
            coef = str(c) if (k == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            terms.append(f"{coef}{mono}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _divmod_monic(num: list, den: list):
    """Long division by a monic polynomial (coefficients high to low)."""
    num = list(num)
    dd = len(den) - 1
    if len(num) <= dd:
        return [0], num
    quo = []
    for i in range(len(num) - dd):
        c = num[i]
        quo.append(c)
        if c:
            for j in range(1, dd + 1):
                num[i + j] -= c * den[j]
    return quo, num[len(num) - dd:]


def _as_int_matrix(a) -> np.ndarray:
    if isinstance(a, Graph):
        return a.adj
    arr = np.asarray(a)
    if arr.dtype == object:
        arr = arr.astype(np.int64)
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise ValueError("matrix must have integer entries")
        arr = rounded.astype(np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or not np.array_equal(arr, arr.T):
        raise ValueError("matrix must be square and symmetric")
    return arr.astype(np.int64)


def char_poly(g: Union[Graph, np.ndarray]) -> IntPolynomial:
    """``det(xI - A)`` by the Faddeev-LeVerrier recursion in exact integers.

    Every division by ``k`` in the recursion is exact for integer matrices.
    """
    a = _as_int_matrix(g).astype(object)
    n = a.shape[0]
    eye = np.eye(n, dtype=np.int64).astype(object)
    coeffs = [1]
    m = np.zeros((n, n), dtype=np.int64).astype(object)
    for k in range(1, n + 1):
        m = a.dot(m) + coeffs[-1] * eye
        tr = int(np.trace(a.dot(m)))
        assert tr % k == 0
        coeffs.append(-tr // k)
    return IntPolynomial(tuple(int(c) for c in coeffs))


# -- decomposition ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResidualGroup:
    """All roots of one irreducible factor of degree >= 3 (or unsplit remainder)."""

    poly: IntPolynomial
    roots: tuple[float, ...]
    projector: RadMatrix
    multiplicity: int


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    matrix: np.ndarray
    eigenvalues: tuple[QuadValue, ...]
    multiplicities: tuple[int, ...]
    projectors: tuple[RadMatrix, ...]
    residual: tuple[ResidualGroup, ...] = ()
    minimal_poly: Optional[IntPolynomial] = None
    graph: Optional[Graph] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def fully_recognized(self) -> bool:
        return not self.residual

    @property
    def deltas(self) -> set[int]:
        return {t.delta for t in self.eigenvalues if t.delta > 1}

    @property
    def delta(self) -> Optional[int]:
        """The single quadratic field of the spectrum: 1 if integral, None if mixed."""
        ds = self.deltas
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 1

    def index_of(self, theta) -> int:
        return self.eigenvalues.index(QuadValue.coerce(theta))

    def touches_residual(self, u: int) -> bool:
        return any(not grp.projector.column_is_zero(u) for grp in self.residual)

    def projector_float(self, r: int) -> np.ndarray:
        return self.projectors[r].to_float()


def _cluster(vals: np.ndarray, tol: float) -> list[float]:
    vals = np.sort(vals)[::-1]
    groups: list[list[float]] = []
    for v in vals:
        if groups and abs(groups[-1][-1] - v) < tol:
            groups[-1].append(float(v))
        else:
            groups.append([float(v)])
    return [float(np.mean(g)) for g in groups]


def _near_int(v: float, scale: float = 1.0) -> Optional[int]:
    r = round(v)
    return int(r) if abs(v - r) < _SNAP_TOL * max(1.0, scale) else None


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _guess_factors(centers: list[float]):
    """Split numeric eigenvalues into integer, quadratic and leftover candidates."""
    linear, quadratic, leftover = [], [], []
    rest = []
    for c in centers:
        k = _near_int(c)
        if k is not None:
            linear.append(k)
        else:
            rest.append(c)
    used = [False] * len(rest)
    for i, a in enumerate(rest):
        if used[i]:
            continue
        best = None
        for j in range(i + 1, len(rest)):
            if used[j]:
                continue
            b = rest[j]
            s, p = _near_int(a + b), _near_int(a * b, abs(a * b))
            if s is None or p is None:
                continue
            disc = s * s - 4 * p
            if disc <= 0 or _is_square(disc):
                continue
            err = abs(a + b - s) + abs(a * b - p)
            if best is None or err < best[0]:
                best = (err, j, s, p)
        if best is None:
            leftover.append(a)
            continue
        _, j, s, p = best
        used[i] = used[j] = True
        quadratic.append((s, p))
    return linear, quadratic, leftover


def _quadratic_roots(s: int, p: int) -> tuple[QuadValue, QuadValue]:
    c, d = squarefree_part(s * s - 4 * p)
    return QuadValue(Fraction(s, 2), Fraction(c, 2), d), QuadValue(Fraction(s, 2), Fraction(-c, 2), d)


def _powers(a: np.ndarray, k: int) -> list[np.ndarray]:
    """``[A^0, ..., A^k]`` as exact object arrays."""
    n = a.shape[0]
    rowsum = int(np.abs(a).sum(axis=1).max()) if n else 0
    if rowsum <= 1 or k * math.log2(max(rowsum, 2)) < 62:
        cur = np.eye(n, dtype=np.int64)
        out = [cur.astype(object)]
        for _ in range(k):
            cur = a @ cur
            out.append(cur.astype(object))
        return out
    ao = a.astype(object)
    out = [np.eye(n, dtype=np.int64).astype(object)]
    for _ in range(k):
        out.append(ao.dot(out[-1]))
    return out


def _poly_at_matrix(coeffs, powers) -> np.ndarray:
    d = len(coeffs) - 1
    acc = np.zeros(powers[0].shape, dtype=np.int64).astype(object)
    for i, c in enumerate(coeffs):
        if c:
            acc = acc + int(c) * powers[d - i]
    return acc


def _exact_factors(a: np.ndarray):
    """Fallback: factor the squarefree part of the characteristic polynomial with sympy."""
    import sympy as sp

    x = sp.Symbol("x")
    cp = char_poly(a)
    poly = sp.Poly(list(cp.coeffs), x, domain="ZZ").sqf_part()
    _, facs = poly.factor_list()
    linear, quadratic, residual = [], [], []
    for f, _mult in facs:
        c = [int(v) for v in f.all_coeffs()]
        if c[0] < 0:
            c = [-v for v in c]
        if len(c) == 2:
            linear.append(-c[1])
        elif len(c) == 3:
            quadratic.append((-c[1], c[2]))
        else:
            residual.append(tuple(c))
    return linear, quadratic, residual, cp


def _split_residual(coeffs: tuple[int, ...]) -> list[tuple[int, ...]]:
    import sympy as sp

    x = sp.Symbol("x")
    _, facs = sp.Poly(list(coeffs), x, domain="ZZ").factor_list()
    out = []
    for f, _ in facs:
        c = [int(v) for v in f.all_coeffs()]
        out.append(tuple(-v for v in c) if c[0] < 0 else tuple(c))
    return out


def _group_projector(minpoly: tuple, factor: tuple, powers) -> RadMatrix:
    """Rational projector ``(s*h mod m)(A)`` onto the roots of ``factor``; ``h = m/factor``."""
    import sympy as sp

    x = sp.Symbol("x")
    m = sp.Poly(list(minpoly), x, domain="QQ")
    f = sp.Poly(list(factor), x, domain="QQ")
    h = m.exquo(f)
    s = h.invert(f)
    p = (s * h).rem(m)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in p.all_coeffs()]
    deg = len(coeffs) - 1
    return RadMatrix.combine(coeffs, [powers[deg - i] for i in range(len(coeffs))])


def _synthetic_div(coeffs, theta: QuadValue):
    out = [QuadValue(Fraction(coeffs[0]))]
    for c in coeffs[1:]:
        out.append(out[-1] * theta + c)
    rem = out.pop()
    return out, rem


def decompose_matrix(a, graph: Optional[Graph] = None) -> SpectralDecomposition:
    """Exact spectral decomposition of an integer symmetric matrix."""
    a = _as_int_matrix(a)
    n = a.shape[0]
    if n == 0:
        return SpectralDecomposition(a, (), (), (), graph=graph)
    scale = max(1.0, float(np.abs(a).sum(axis=1).max()))
    centers = _cluster(np.linalg.eigvalsh(a.astype(float)), 1e-7 * scale)

    linear, quadratic, leftover = _guess_factors(centers)
    residual_polys: list = []
    if leftover:
        approx = np.poly(np.array(leftover))
        rounded = np.rint(approx)
        if np.all(np.abs(approx - rounded) < 1e-6 * np.maximum(1.0, np.abs(approx))):
            for f in _split_residual(tuple(int(v) for v in rounded)):
                if len(f) == 2:
                    linear.append(-f[1])
                elif len(f) == 3:
                    quadratic.append((-f[1], f[2]))
                else:
                    residual_polys.append(f)
        else:
            residual_polys = [None]  # force the exact fallback

    def minimal_poly_of(lin, quad, res):
        coeffs = [1]
        for k in lin:
            coeffs = _poly_mul(coeffs, [1, -k])
        for s, p in quad:
            coeffs = _poly_mul(coeffs, [1, -s, p])
        for r in res:
            coeffs = _poly_mul(coeffs, list(r))
        return coeffs

    cp = None
    ok = None not in residual_polys
    if ok:
        m = minimal_poly_of(linear, quadratic, residual_polys)
        powers = _powers(a, len(m) - 1)
        ok = len(m) - 1 == len(centers) and not any(v != 0 for v in _poly_at_matrix(m, powers).flat)
    if not ok:
        log.debug("numeric eigenvalue guess failed verification; factoring exactly")
        linear, quadratic, residual_polys, cp = _exact_factors(a)
        m = minimal_poly_of(linear, quadratic, residual_polys)
        powers = _powers(a, len(m) - 1)
        if any(v != 0 for v in _poly_at_matrix(m, powers).flat):
            raise UnsupportedSpectrum("minimal polynomial failed exact verification")

    # each recognized factor must divide det(xI - A)
    if n <= CHARPOLY_CHECK_MAX_N:
        cp = cp or char_poly(a)
        for k in linear:
            if not IntPolynomial((1, -k)).divides(cp):
                raise UnsupportedSpectrum(f"x - {k} does not divide the characteristic polynomial")
        for s, p in quadratic:
            if not IntPolynomial((1, -s, p)).divides(cp):
                raise UnsupportedSpectrum(f"x^2 - {s}x + {p} does not divide the characteristic polynomial")

    thetas = [QuadValue(Fraction(k)) for k in linear]
    for s, p in quadratic:
        thetas.extend(_quadratic_roots(s, p))
    thetas.sort(reverse=True)

    deg = len(m) - 1
    eigs, mults, projs = [], [], []
    for th in thetas:
        q, rem = _synthetic_div(m, th)
        assert rem == 0, "eigenvalue is not a root of the minimal polynomial"
        qt = QuadValue(Fraction(0))
        for c in q:
            qt = qt * th + c
        coeffs = [c / qt for c in q]
        e = RadMatrix.combine(coeffs, [powers[deg - 1 - i] for i in range(len(coeffs))])
        if e.is_zero():
            continue
        eigs.append(th)
        mults.append(int(e.rational_trace()))
        projs.append(e)

    groups = []
    for f in residual_polys:
        e = _group_projector(tuple(m), f, powers)
        roots = tuple(sorted(np.roots(np.array(f, dtype=float)).real.tolist(), reverse=True))
        groups.append(ResidualGroup(IntPolynomial(f), roots, e, int(e.rational_trace())))

    return SpectralDecomposition(
        matrix=a,
        eigenvalues=tuple(eigs),
        multiplicities=tuple(mults),
        projectors=tuple(projs),
        residual=tuple(groups),
        minimal_poly=IntPolynomial(tuple(m)),
        graph=graph,
    )


def decompose(g: Union[Graph, np.ndarray]) -> SpectralDecomposition:
    if isinstance(g, Graph):
        return decompose_matrix(g.adj, graph=g)
    return decompose_matrix(g)


# -- vertex queries -----------------------------------------------------------

def support(d: SpectralDecomposition, u: int, strict: bool = True) -> list[int]:
    """Indices ``r`` with ``E_r e_u != 0``.

    With ``strict`` an :class:`UnsupportedSpectrum` is raised when ``e_u`` also
    has weight on eigenvalues that are not integers or quadratic integers.
    """
    if not 0 <= u < d.n:
        raise IndexError(f"vertex {u} out of range")
    if strict and d.touches_residual(u):
        raise UnsupportedSpectrum(f"support of vertex {u} contains eigenvalues of degree >= 3")
    return [r for r, e in enumerate(d.projectors) if not e.column_is_zero(u)]


@dataclass(frozen=True)
class CospectralReport:
    strongly_cospectral: bool
    plus: tuple[int, ...] = ()
    minus: tuple[int, ...] = ()
    witness: Optional[str] = None
    residual_touched: bool = False


def strong_cospectral(d: SpectralDecomposition, u: int, v: int) -> CospectralReport:
    """Exact test of ``E_r e_u = +-E_r e_v`` for every projector, with the sign partition."""
    if u == v:
        raise ValueError("strong cospectrality needs two distinct vertices")
    plus, minus = [], []
    for r, e in enumerate(d.projectors):
        zu, zv = e.column_is_zero(u), e.column_is_zero(v)
        if zu and zv:
            continue
        if e.columns_equal(u, v, 1):
            plus.append(r)
        elif e.columns_equal(u, v, -1):
            minus.append(r)
        else:
            return CospectralReport(False, witness=f"E[{d.eigenvalues[r]}] e_u != +-E e_v")
    touched = False
    for grp in d.residual:
        e = grp.projector
        if e.column_is_zero(u) and e.column_is_zero(v):
            continue
        touched = True
        if not (e.columns_equal(u, v, 1) or e.columns_equal(u, v, -1)):
            return CospectralReport(False, witness=f"roots of {grp.poly} separate u and v",
                                    residual_touched=True)
    return CospectralReport(True, tuple(plus), tuple(minus), residual_touched=touched)
