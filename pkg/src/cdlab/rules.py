"""Integer-coefficient rational rules ``i -> p(i)/q(i)``.

Weight tails and kernel-coefficient tails share this representation: a pair
of integer-coefficient polynomials evaluated at the sequence index.  Keeping
the coefficients integral makes index shifts and products exact, which the
kernel <-> shift translations rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Product of two integer polynomials, coefficients lowest degree first."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return tuple(out)


def poly_shift(coeffs: tuple[int, ...], k: int) -> tuple[int, ...]:
    """Coefficients of ``p(i + k)`` given those of ``p(i)``; exact in integers."""
    n = len(coeffs)
    out = [0] * n
    for ell, c in enumerate(coeffs):
        for m in range(ell + 1):
            out[m] += c * math.comb(ell, m) * k ** (ell - m)
    return tuple(out)


def _degree(coeffs: tuple[int, ...]) -> int:
    for d in range(len(coeffs) - 1, -1, -1):
        if coeffs[d] != 0:
            return d
    return 0


@dataclass(frozen=True)
class RationalRule:
    """Rational sequence rule ``i -> p(i)/q(i)``.

    Coefficients are stored lowest degree first: ``p=(1, 1)`` is ``1 + i``.
    """

    p: tuple[int, ...]
    q: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not self.p or not self.q:
            raise DomainError("rational rule needs nonempty numerator and denominator")
        object.__setattr__(self, "p", tuple(int(c) for c in self.p))
        object.__setattr__(self, "q", tuple(int(c) for c in self.q))
        if not any(self.q):
            raise DomainError("rational rule denominator is identically zero")

    def __call__(self, i):
        """Evaluate ``p(i)/q(i)``; ``i`` may be a scalar index or an index array."""
        idx = np.asarray(i, dtype=float)
        num = np.polyval(self.p[::-1], idx)
        den = np.polyval(self.q[::-1], idx)
        if np.any(den == 0):
            raise DomainError(f"rational rule denominator vanishes at index {i!r}")
        out = num / den
        return float(out) if np.isscalar(i) or np.ndim(i) == 0 else out

    def limit(self) -> float:
        """Limit of ``p(i)/q(i)`` as ``i -> oo`` (signed inf when deg p > deg q)."""
        dp, dq = _degree(self.p), _degree(self.q)
        if dp > dq:
            return math.copysign(math.inf, self.p[dp] * self.q[dq])
        if dp < dq:
            return 0.0
        return self.p[dp] / self.q[dq]

    def shifted(self, k: int = 1) -> "RationalRule":
        """The rule ``i -> p(i+k)/q(i+k)``."""
        return RationalRule(poly_shift(self.p, k), poly_shift(self.q, k))
