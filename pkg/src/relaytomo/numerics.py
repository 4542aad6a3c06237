"""Self-contained numerical kernels: special functions, root finding,
tensor-product quadrature, and reproducible random streams.

The incomplete-gamma implementation is deliberately dependency-free so the
whole numerical chain stays auditable; everything else leans on numpy for
nodes/weights and bit-generator plumbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BracketError, DomainError

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 500


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product Gauss-Legendre rule with `order` points per axis."""

    order: int = 16

    def __post_init__(self) -> None:
        if self.order < 2:
            raise DomainError(f"quadrature order must be >= 2, got {self.order}")


@dataclass(frozen=True)
class RngStream:
    """Seeded, splittable random stream.

    Identical (seed, path) always reproduces the same draw sequence.  Each
    logical sampling task should own its stream: derive one with `child`,
    which never collides with siblings (SeedSequence spawn-key semantics).
    """

    seed: int
    path: tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.path + (index,))


def regularized_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x) = gamma(a, x) / Gamma(a).

    Series expansion for x < a + 1, continued fraction for the complement
    otherwise (the standard split).  Absolute accuracy is well below 1e-12
    for a <= 50.
    """
    if a <= 0.0:
        raise DomainError(f"shape parameter must be positive, got a={a}")
    if x < 0.0:
        raise DomainError(f"argument must be non-negative, got x={x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _lower_gamma_series(a, x)
    return 1.0 - _upper_gamma_cf(a, x)


def _lower_gamma_series(a: float, x: float) -> float:
    # P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    return total * math.exp(log_prefactor)


def _upper_gamma_cf(a: float, x: float) -> float:
    # Q(a,x) via modified Lentz continued fraction, valid for x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    return math.exp(log_prefactor) * h


def solve_increasing_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    max_doublings: int = 60,
) -> float:
    """Root of a continuous non-decreasing f with f(lo) <= 0 <= f(hi).

    Plain bisection: unconditionally safe even where f' is tiny.  If f(hi)
    is still negative the upper bound is doubled (at most `max_doublings`
    times) before giving up.  Returns the bracket midpoint once the bracket
    width is <= tol.
    """
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if hi <= lo:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    flo = f(lo)
    if flo > 0.0:
        raise BracketError(f"f(lo)={flo} is positive; no root in bracket")
    if flo == 0.0:
        return lo
    fhi = f(hi)
    doublings = 0
    width = hi - lo
    while fhi < 0.0:
        if doublings >= max_doublings:
            raise BracketError(
                f"no sign change after {max_doublings} doublings (last hi={hi})"
            )
        lo, flo = hi, fhi
        width *= 2.0
        hi = lo + width
        doublings += 1
        fhi = f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float exhaustion
            break
        fmid = f(mid)
        if fmid < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached per order."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def integrate_1d(f: Callable[[float], float], lo: float, hi: float, order: int) -> float:
    if hi <= lo:
        return 0.0
    nodes, weights = gauss_legendre(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * sum(w * f(mid + half * t) for t, w in zip(nodes, weights))


def integrate_2d(
    f: Callable[[float, float], float],
    domain: tuple[float, float, float, float],
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Tensor-product Gauss-Legendre integral of f over [x0,x1] x [y0,y1].

    Exact for bivariate polynomials of per-axis degree <= 2*order - 1.
    A zero-area domain integrates to 0.
    """
    x0, x1, y0, y1 = domain
    if x1 <= x0 or y1 <= y0:
        return 0.0
    nodes, weights = gauss_legendre(spec.order)
    xm, xh = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    ym, yh = 0.5 * (y0 + y1), 0.5 * (y1 - y0)
    xs = xm + xh * nodes
    ys = ym + yh * nodes
    total = 0.0
    for wx, x in zip(weights, xs):
        row = 0.0
        for wy, y in zip(weights, ys):
            row += wy * f(x, y)
        total += wx * row
    return total * xh * yh


def sample_gamma(
    shape: float,
    scale: float,
    rng: RngStream | np.random.Generator,
    size: int | None = None,
):
    """Draw from the gamma distribution G(shape, scale).

    Returns a scalar for size=None, else an ndarray of length `size`.
    A Generator may be passed directly when the caller manages stream
    lifetime itself (e.g. inside a vectorized simulation loop).
    """
    if shape <= 0.0 or scale <= 0.0:
        raise DomainError(f"gamma parameters must be positive, got shape={shape}, scale={scale}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    if size is None:
        return float(gen.gamma(shape, scale))
    return gen.gamma(shape, scale, size=size)
