"""Diagonal reproducing kernels ``K(z, w) = sum b_n z^n w̄^n`` and their geometry.

All radial quantities are functions of ``t = r^2``: a diagonal kernel is
radial, which collapses the mixed Wirtinger derivative to one real variable.
With ``g(t) = sum b_n t^n`` the bundle metric along the radius is ``g`` and
the rank-one curvature is

    curvature(r) = -( t (g'' g - g'^2) / g^2 + g' / g ),   t = r^2,

i.e. ``-d d̄ log g``.  Series are summed in chunks with certified geometric
tail bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, TruncationError
from .rules import RationalRule, poly_mul
from .shifts import WeightSequence

_CHUNK = 2048
_MAX_TERMS = 8_000_000
#: Relative certified-tail target for partial series sums.
_TAIL_REL = 1e-15


@dataclass(frozen=True)
class DiagonalKernel:
    """Coefficient sequence ``b_n > 0`` of a diagonal kernel.

    Same shape as a weight sequence: explicit prefix plus an optional
    rational tail evaluated at the coefficient index.  A kernel without a
    tail rule is a polynomial kernel (coefficients vanish beyond the prefix);
    those are admitted as degenerate cases but cannot be turned into shifts.
    """

    prefix: tuple[float, ...] = ()
    tail: RationalRule | None = None
    offset: int | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(b) for b in self.prefix))
        if any(not math.isfinite(b) or b <= 0.0 for b in self.prefix):
            raise DomainError("kernel coefficients must be positive and finite")
        off = len(self.prefix) if self.offset is None else int(self.offset)
        object.__setattr__(self, "offset", off)
        if off > len(self.prefix):
            raise DomainError(f"tail offset {off} leaves coefficients undefined")
        if self.tail is not None:
            for s in (0, 1, 2, 64, 4096):
                if self.tail(off + s) <= 0.0:
                    raise DomainError(f"kernel coefficient nonpositive at index {off + s}")
            # ratio test on a sampled window: the limit of b_{n+1}/b_n must be
            # <= 1 + tol for the radius of convergence to reach 1.  For a
            # rational tail the ratio behaves like 1 + c/n, so Richardson
            # extrapolation of two samples estimates the limit to O(1/n^2).
            n = off + 4096
            r1 = self.tail(n + 1) / self.tail(n)
            r2 = self.tail(2 * n + 1) / self.tail(2 * n)
            limit_est = 2.0 * r2 - r1
            if limit_est > 1.0 + 1e-6:
                raise DomainError(
                    f"coefficient ratio limit estimate {limit_est:.6f} puts the radius of convergence below 1"
                )

    @property
    def coverage(self) -> int | None:
        """Number of defined coefficients, or None when the tail extends forever."""
        return None if self.tail is not None else len(self.prefix)

    def coeff(self, n: int) -> float:
        if n < 0:
            raise DomainError("coefficient index must be nonnegative")
        if n < len(self.prefix):
            return self.prefix[n]
        if self.tail is not None and n >= self.offset:
            return float(self.tail(n))
        return 0.0

    def coeffs(self, count: int) -> np.ndarray:
        """First ``count`` coefficients (zeros beyond a finite kernel's prefix)."""
        return self.coeffs_slice(0, count)

    def coeffs_slice(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients ``b_lo .. b_{hi-1}`` as a float array."""
        out = np.zeros(hi - lo)
        p = max(0, min(len(self.prefix), hi) - lo)
        if p > 0:
            out[:p] = self.prefix[lo : lo + p]
        if self.tail is not None and hi > max(lo, len(self.prefix)):
            start = max(lo, len(self.prefix))
            out[start - lo :] = self.tail(np.arange(start, hi))
        return out


def szego_power_coeffs(k: int) -> DiagonalKernel:
    """Coefficients ``b_n = C(n+k-1, n)`` of the power kernel ``(1 - z w̄)^{-k}``."""
    if k < 1:
        raise DomainError("kernel power must be >= 1")
    p: tuple[int, ...] = (1,)
    for j in range(1, k):
        p = poly_mul(p, (j, 1))
    return DiagonalKernel(tail=RationalRule(p, (math.factorial(k - 1),)), label=f"szego:{k}")


def inv_szego_coeffs(k: int) -> tuple[float, ...]:
    """Coefficients of the polynomial inverse kernel ``(1 - t)^k``."""
    if k < 1:
        raise DomainError("kernel power must be >= 1")
    return tuple(float((-1) ** j * math.comb(k, j)) for j in range(k + 1))


def _series_sums(K: DiagonalKernel, t: float, max_order: int) -> np.ndarray:
    """Sums ``g^(m)(t) = sum_n b_n n!/(n-m)! t^(n-m)`` for ``m = 0..max_order``.

    Stops once a geometric majorant certifies every tail below ``1e-15`` of
    its partial sum.  The forward term ratio is bounded by sampling it at the
    current index, at twice and four times it, and at its limit ``t``; for
    rational coefficient rules the ratio approaches ``t`` monotonically, so
    the sample bound is sharp.
    """
    if not 0.0 <= t < 1.0:
        raise DomainError(f"series argument t={t} outside [0, 1)")
    sums = np.zeros(max_order + 1)
    if t == 0.0:
        for m in range(max_order + 1):
            sums[m] = K.coeff(m) * math.factorial(m)
        return sums
    n0 = 0
    while n0 < _MAX_TERMS:
        idx = np.arange(n0, n0 + _CHUNK, dtype=float)
        b = K.coeffs_slice(n0, n0 + _CHUNK)
        tpow = t ** idx
        fall = np.ones(_CHUNK)
        last_terms = np.empty(max_order + 1)
        for m in range(max_order + 1):
            if m > 0:
                fall = fall * np.maximum(idx - (m - 1), 0.0)
            terms = b * fall * tpow / t ** m
            sums[m] += terms.sum()
            last_terms[m] = abs(terms[-1])
        n_last = n0 + _CHUNK - 1
        if K.coverage is not None and n_last + 1 >= K.coverage:
            return sums  # finite kernel: the sum is exact
        rho = t
        for probe in (n_last, 2 * n_last, 4 * n_last):
            br = K.coeff(probe + 1) / K.coeff(probe)
            rho = max(rho, br * t * (probe + 1) / max(probe + 1 - max_order, 1))
        if rho < 1.0:
            tails = last_terms * rho / (1.0 - rho)
            if np.all(tails <= _TAIL_REL * np.maximum(np.abs(sums), 1e-300)):
                return sums
        n0 += _CHUNK
    raise TruncationError(f"series did not certify its tail within {_MAX_TERMS} terms at t={t}")


def metric_eval(K: DiagonalKernel, r: float) -> float:
    """Radial metric ``h(r) = sum b_n r^(2n)`` with a certified tail bound."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius {r} outside [0, 1)")
    return float(_series_sums(K, r * r, 0)[0])


def curvature_series(K: DiagonalKernel, r: float) -> float:
    """Rank-one curvature ``-d d̄ log h`` at radius ``r`` via series sums."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius {r} outside [0, 1)")
    t = r * r
    g0, g1, g2 = _series_sums(K, t, 2)
    u = g1 / g0
    u1 = g2 / g0 - u * u
    return float(-(t * u1 + u))


def curvature_fd(K: DiagonalKernel, r: float, step: float = 1e-3) -> float:
    """Curvature via ``-(1/4)`` of the radial Laplacian of ``log h``.

    Central differences of ``f(r) = log h(r)``: ``Δf = f'' + f'/r``.  The
    step shrinks to ``(1-r)/10`` near the boundary so the stencil stays
    inside the disk.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius {r} outside (0, 1)")
    if step <= 0.0:
        raise DomainError("step must be positive")
    h = min(step, (1.0 - r) / 10.0)
    if r - 2.0 * h <= 0.0 or r + 2.0 * h >= 1.0:
        raise DomainError(f"finite-difference stencil leaves (0, 1) at r={r}, step={h}")
    f0 = math.log(metric_eval(K, r))
    fp = math.log(metric_eval(K, r + h))
    fm = math.log(metric_eval(K, r - h))
    d2 = (fp - 2.0 * f0 + fm) / (h * h)
    d1 = (fp - fm) / (2.0 * h)
    return -0.25 * (d2 + d1 / r)


def covariant_derivative_rank1(K: DiagonalKernel, r: float, i: int, j: int) -> float:
    """Covariant derivative of the curvature on the radial slice, rank one.

    At rank one the bracket correction in the covariant derivative vanishes
    (scalars commute), so these are ordinary Wirtinger derivatives.  Writing
    the curvature as ``F(t)`` with ``t = |w|^2``:

        (0,0) -> F,            (1,0) = (0,1) -> F'(t) r,
        (1,1) -> t F'' + F',   (2,0) = (0,2) -> F'' r^2.

    Orders beyond ``i + j = 2`` belong to higher-rank machinery and are
    rejected.  On the real-radius slice ``(1,0)`` and ``(0,1)`` coincide
    (off the slice they are complex conjugates).
    """
    if i < 0 or j < 0:
        raise DomainError("derivative orders must be nonnegative")
    if i + j > 2:
        raise ConfigurationError(f"covariant derivative order (i={i}, j={j}) not supported; need i+j <= 2")
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius {r} outside [0, 1)")
    t = r * r
    total = i + j
    g = _series_sums(K, t, 2 + total)
    g0 = g[0]
    u = g[1] / g0
    u1 = g[2] / g0 - u * u
    F = -(t * u1 + u)
    if total == 0:
        return float(F)
    u2 = g[3] / g0 - 3.0 * g[2] * g[1] / g0 ** 2 + 2.0 * u ** 3
    F1 = -(2.0 * u1 + t * u2)
    if total == 1:
        return float(F1 * r)
    u3 = (
        g[4] / g0
        - 4.0 * g[3] * g[1] / g0 ** 2
        - 3.0 * (g[2] / g0) ** 2
        + 12.0 * g[2] * g[1] ** 2 / g0 ** 3
        - 6.0 * u ** 4
    )
    F2 = -(3.0 * u2 + t * u3)
    if (i, j) == (1, 1):
        return float(t * F2 + F1)
    return float(F2 * r * r)


def shift_from_kernel(K: DiagonalKernel) -> WeightSequence:
    """Backward-shift weights ``w_n = sqrt(b_n / b_{n+1})`` of the kernel's
    adjoint multiplication operator."""
    if K.tail is None:
        raise DomainError("polynomial kernel has vanishing coefficients; no shift exists")
    boundary = K.offset
    prefix = tuple(math.sqrt(K.coeff(n) / K.coeff(n + 1)) for n in range(boundary))
    shifted = K.tail.shifted(1)
    rule = RationalRule(poly_mul(K.tail.p, shifted.q), poly_mul(K.tail.q, shifted.p))
    return WeightSequence(prefix=prefix, tail=rule, offset=boundary)


@dataclass(frozen=True)
class KernelRatioBound:
    """Lower-bound certificate for a kernel quotient ``K1 / K2``.

    ``certified`` means every product coefficient of ``(1/K2) * K1`` on the
    scanned window is nonnegative within tolerance, both absolutely and
    relative to ``b_i``; the quotient is then bounded below by ``bound = b_0``.
    """

    bound: float
    certified: bool
    first_violation: int | None


def kernel_ratio_lower_bound(
    K1: DiagonalKernel, inv_k2_coeffs, window: int = 512, tol: float = 1e-10
) -> KernelRatioBound:
    """Certify ``K1(r,r) / K2(r,r) >= b_0`` from product coefficients.

    ``inv_k2_coeffs`` are the coefficients ``(1, a_1, ..., a_k)`` of the
    polynomial ``1/K2``.  The product series has coefficients
    ``c_i = b_i + a_1 b_{i-1} + ...``; nonnegativity of every ``c_i`` (the
    same inequalities as ``1 + a_1 b_{i-1}/b_i + ... >= 0``) bounds the
    quotient below by ``b_0``.
    """
    a = np.atleast_1d(np.asarray(inv_k2_coeffs, dtype=float))
    if a.size == 0:
        raise DomainError("inverse-kernel coefficient list is empty")
    if abs(a[0] - 1.0) > 1e-14:
        raise DomainError(f"inverse kernel must have constant term 1, got {a[0]}")
    b = K1.coeffs(window + 1)
    if np.any(b <= 0.0):
        raise DomainError("kernel coefficients must be positive on the scanned window")
    c = np.convolve(a, b)[: window + 1]
    bad = np.nonzero((c < -tol) | (c / b < -tol))[0]
    first = int(bad[0]) if len(bad) else None
    return KernelRatioBound(bound=float(b[0]), certified=first is None, first_violation=first)


@dataclass(frozen=True)
class CurvatureProfile:
    """Curvature samples on a radial grid."""

    radii: np.ndarray
    values: np.ndarray
    method: str

    def __post_init__(self):
        r = np.array(self.radii, dtype=float)
        v = np.array(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ConfigurationError("radii and values must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DomainError("curvature profile must be finite")
        if self.method not in ("closed-form", "series", "finite-difference"):
            raise ConfigurationError(f"unknown profile method {self.method!r}")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)


def curvature_profile(K: DiagonalKernel, radii, method: str = "series", step: float = 1e-3) -> CurvatureProfile:
    """Sample the curvature of ``K`` on a radial grid."""
    r = np.asarray(radii, dtype=float)
    if method == "series":
        vals = np.array([curvature_series(K, x) for x in r])
    elif method == "finite-difference":
        vals = np.array([curvature_fd(K, x, step) for x in r])
    else:
        raise ConfigurationError(f"unknown method {method!r}; use 'series' or 'finite-difference'")
    return CurvatureProfile(r, vals, method)


def power_curvature_closed_form(n: int, radii) -> CurvatureProfile:
    """Closed form ``-n / (1 - r^2)^2`` for the power kernel of order ``n``."""
    if n < 1:
        raise DomainError("kernel power must be >= 1")
    r = np.asarray(radii, dtype=float)
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise DomainError("radii must lie in [0, 1)")
    return CurvatureProfile(r, -n / (1.0 - r ** 2) ** 2, "closed-form")


def boundary_radii(k_min: int = 3, k_max: int = 12) -> np.ndarray:
    """Canonical dyadic boundary approach ``r_k = 1 - 2^{-k}``."""
    if not 1 <= k_min <= k_max:
        raise ConfigurationError("need 1 <= k_min <= k_max")
    return 1.0 - 2.0 ** -np.arange(k_min, k_max + 1, dtype=float)


def write_curvature_csv(profile: CurvatureProfile, path) -> None:
    """CSV serialization: columns ``r, value, method``; 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("r,value,method\n")
        for r, v in zip(profile.radii, profile.values):
            fh.write(f"{r:.17g},{v:.17g},{profile.method}\n")
