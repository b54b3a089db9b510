"""Similarity diagnostics: determinant-ratio profiles and witness checks.

For an operator with bundle metric ``h`` and the rank-``n`` model built on a
diagonal kernel ``K``, the profile sampled here is
``ratio(r) = det h(r) / K(r, r)^n``.  Boundedness of the ratio and a
positive boundary limit are the numerically checkable hypotheses of the
similarity criterion; the bounded-subharmonic witness is
``phi = log ratio``, whose quarter-Laplacian must reproduce the trace
curvature difference between the model and the operator.

The diagnostics never assert similarity: a finite grid can certify a failed
hypothesis, or report the hypotheses numerically consistent, nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .blockops import BlockOperator, MatrixBlock, ShiftBlock, frame_solver
from .errors import ConfigurationError, DomainError
from .matrix_core import hermitian_det
from .rkhs import CurvatureProfile, DiagonalKernel, boundary_radii, metric_eval
from .shifts import hardy, materialize

FRAME_RADIUS_CAP = 0.95
ANALYTIC_RADIUS_CAP = 1.0 - 2.0 ** -12


@dataclass(frozen=True)
class SimilarityDiagnostic:
    """Radial det-ratio profile with verdict fields.

    Verdicts stay ``None`` until :func:`boundedness_verdict` or
    :func:`subharmonic_witness_check` fills them in.  ``radius_cap`` records
    a truncation-imposed cap when the requested grid had to stop early.
    """

    radii: np.ndarray
    ratio: np.ndarray
    source: str = ""
    upper_bound_ok: bool | None = None
    boundary_limit_positive: bool | None = None
    witness_residual: float | None = None
    radius_cap: float | None = None

    def __post_init__(self):
        r = np.array(self.radii, dtype=float)
        q = np.array(self.ratio, dtype=float)
        if r.ndim != 1 or r.shape != q.shape:
            raise ConfigurationError("radii and ratio must be 1-d arrays of equal length")
        if np.any(np.diff(r) <= 0):
            raise ConfigurationError("radii must be strictly increasing")
        if not np.all(np.isfinite(q)) or np.any(q <= 0.0):
            raise DomainError("ratio samples must be finite and positive (gram and kernel positivity)")
        r.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "ratio", q)

    @property
    def phi(self) -> np.ndarray:
        """The witness candidate ``phi = log ratio``."""
        return np.log(self.ratio)


def det_ratio_fn(source, kernel: DiagonalKernel, n: int) -> Callable[[float], float]:
    """Closure ``r -> det h(r) / K(r,r)^n`` for a metric source.

    ``source`` may be a single diagonal kernel (rank one, ``det h = h``), a
    sequence of diagonal kernels (direct sum: determinant of the
    block-diagonal gram is the product of the metrics), or an
    upper-triangular 2x2 block operator handed to the frame solver.
    """
    if n < 1:
        raise DomainError("model multiplicity must be >= 1")
    if isinstance(source, DiagonalKernel):
        kernels = (source,)
    elif isinstance(source, BlockOperator):
        kernels = None
    elif isinstance(source, Sequence):
        kernels = tuple(source)
        if not kernels or not all(isinstance(k, DiagonalKernel) for k in kernels):
            raise ConfigurationError("metric source sequence must hold diagonal kernels")
    else:
        raise ConfigurationError(f"unsupported metric source {type(source).__name__}")

    if kernels is not None:
        def ratio(r: float) -> float:
            det_h = 1.0
            for k in kernels:
                det_h *= metric_eval(k, r)
            return det_h / metric_eval(kernel, r) ** n
    else:
        def ratio(r: float) -> float:
            gram = frame_solver(source, r)
            return hermitian_det(gram) / metric_eval(kernel, r) ** n

    return ratio


def det_ratio_profile(source, kernel: DiagonalKernel, n: int, radii) -> SimilarityDiagnostic:
    """Sample ``det h / K^n`` on a radial grid (verdicts unset).

    Analytic sources may approach the boundary up to ``1 - 2^-12``;
    frame-solver sources stop at the truncation-reliability cap 0.95.
    """
    r = np.asarray(radii, dtype=float)
    cap = FRAME_RADIUS_CAP if isinstance(source, BlockOperator) else ANALYTIC_RADIUS_CAP
    if np.any(r < 0.0) or np.any(r > cap):
        raise DomainError(f"radii must lie in [0, {cap}] for this source")
    fn = det_ratio_fn(source, kernel, n)
    samples = np.array([fn(x) for x in r])
    if isinstance(source, BlockOperator):
        return SimilarityDiagnostic(r, samples, source="frame", radius_cap=FRAME_RADIUS_CAP)
    return SimilarityDiagnostic(r, samples, source="analytic")


def boundedness_verdict(
    D: SimilarityDiagnostic, bound: float = 1e6, m_floor: float = 1e-6
) -> SimilarityDiagnostic:
    """Fill in the boundedness and boundary-limit verdicts.

    Requires the canonical dyadic boundary grid ``r_k = 1 - 2^-k``,
    ``k = 3..12`` (a prefix of it is accepted for capped frame sources).
    ``upper_bound_ok`` holds when every sample stays below ``bound``;
    ``boundary_limit_positive`` when the last four samples sit above
    ``m_floor`` and have stabilized (pairwise relative change below 5%).
    The true boundary limit is not finitely decidable; this is a diagnostic
    along the radial approach, not a proof.
    """
    canonical = boundary_radii(3, 12)
    k = len(D.radii)
    if k < 1 or k > len(canonical) or not np.allclose(D.radii, canonical[:k], rtol=0, atol=1e-12):
        raise ConfigurationError("profile must be sampled on the dyadic boundary grid 1 - 2^-k, k = 3..12")
    upper = bool(np.max(D.ratio) < bound)
    if k >= 4:
        last = D.ratio[-4:]
        stable = bool(np.max(last) / np.min(last) - 1.0 < 0.05)
        limit_pos = bool(np.all(last > m_floor) and stable)
    else:
        limit_pos = None
    return replace(D, upper_bound_ok=upper, boundary_limit_positive=limit_pos)


@dataclass(frozen=True)
class WitnessReport:
    """Residuals of the trace-curvature identity against the FD Laplacian.

    ``residuals[i] = |(model - operator) trace curvature - (1/4) Δ phi|`` at
    ``radii[i]``; nodes where the Laplacian stencil is unavailable hold NaN.
    ``subharmonic_ok`` samples ``Δ phi >= -tolerance`` where computable, and
    ``phi_sup`` reports ``sup |phi|`` over the grid (boundedness of the
    witness).
    """

    diagnostic: SimilarityDiagnostic
    radii: np.ndarray
    phi: np.ndarray
    quarter_laplacian: np.ndarray
    trace_difference: np.ndarray
    residuals: np.ndarray
    max_residual: float
    tolerance: float
    passed: bool
    phi_sup: float
    subharmonic_ok: bool


def _as_samples(fn_or_array, radii: np.ndarray) -> np.ndarray:
    if callable(fn_or_array):
        return np.array([float(fn_or_array(r)) for r in radii])
    arr = np.asarray(fn_or_array, dtype=float)
    if arr.shape != radii.shape:
        raise ConfigurationError("curvature source samples must match the profile grid")
    return arr


def subharmonic_witness_check(
    D: SimilarityDiagnostic,
    model_trace_curvature,
    operator_trace_curvature,
    ratio_fn: Callable[[float], float] | None = None,
    step: float = 1e-3,
    tol: float = 1e-10,
) -> WitnessReport:
    """Check ``trace K_model - trace K_T = (1/4) Δ phi`` with ``phi = log ratio``.

    The left side comes from the supplied curvature sources (callables on the
    radius or precomputed samples); the right side is a central-difference
    radial Laplacian ``(phi'' + phi'/r)/4``.  With ``ratio_fn`` given, fresh
    evaluations at ``r ± step`` make every grid node usable (the step shrinks
    near the boundary); otherwise a non-uniform three-point stencil runs on
    the profile's own samples and the end nodes are skipped.

    PASS when the worst residual stays below ``max(1e-4, 50 * step^2)`` for
    the largest step actually used.
    """
    radii = D.radii
    phi_grid = D.phi
    model = _as_samples(model_trace_curvature, radii)
    oper = _as_samples(operator_trace_curvature, radii)
    trace_diff = model - oper
    lap = np.full(len(radii), np.nan)
    max_step = 0.0
    if ratio_fn is not None:
        for i, r in enumerate(radii):
            h = min(step, (1.0 - r) / 10.0, r / 3.0 if r > 0 else step)
            if h <= 0 or r - h <= 0.0 or r + h >= 1.0:
                continue
            fp = math.log(ratio_fn(r + h))
            f0 = math.log(ratio_fn(r))
            fm = math.log(ratio_fn(r - h))
            d2 = (fp - 2.0 * f0 + fm) / (h * h)
            d1 = (fp - fm) / (2.0 * h)
            lap[i] = d2 + d1 / r
            max_step = max(max_step, h)
    else:
        if len(radii) < 3:
            raise ConfigurationError("need at least three profile samples for the interior stencil")
        for i in range(1, len(radii) - 1):
            hm = radii[i] - radii[i - 1]
            hp = radii[i + 1] - radii[i]
            denom = hm * hp * (hm + hp)
            d2 = 2.0 * (hm * phi_grid[i + 1] - (hm + hp) * phi_grid[i] + hp * phi_grid[i - 1]) / denom
            d1 = (hm ** 2 * phi_grid[i + 1] + (hp ** 2 - hm ** 2) * phi_grid[i] - hp ** 2 * phi_grid[i - 1]) / denom
            lap[i] = d2 + d1 / radii[i]
            max_step = max(max_step, hm, hp)
    usable = np.isfinite(lap)
    if not np.any(usable):
        raise ConfigurationError("no interior node admits a Laplacian stencil")
    residuals = np.where(usable, np.abs(trace_diff - lap / 4.0), np.nan)
    max_residual = float(np.nanmax(residuals))
    tolerance = max(1e-4, 50.0 * max_step ** 2)
    passed = max_residual < tolerance
    subharmonic_ok = bool(np.all(lap[usable] >= -max(tol, tolerance)))
    updated = replace(D, witness_residual=max_residual)
    return WitnessReport(
        diagnostic=updated,
        radii=radii,
        phi=phi_grid,
        quarter_laplacian=lap / 4.0,
        trace_difference=trace_diff,
        residuals=residuals,
        max_residual=max_residual,
        tolerance=tolerance,
        passed=passed,
        phi_sup=float(np.max(np.abs(phi_grid))),
        subharmonic_ok=subharmonic_ok,
    )


# ---------------------------------------------------------------------------
# the commutator coupling example

def _x_diagonal(x_diag) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x_diag, dtype=complex))
    if x.ndim != 1:
        raise ConfigurationError("X must be described by its diagonal")
    if not np.all(np.isfinite(x)):
        raise DomainError("X diagonal must be bounded (finite entries)")
    return x


def _commutator_det_polys(x: np.ndarray):
    """Polynomials in ``t = r^2`` entering the closed-form determinant.

    With the unweighted shift's section ``t(w) = (1, w, w^2, ...)`` and a
    diagonal ``X``: ``|t|^2 = h = 1/(1-t)``, ``|X t|^2 = P(t)``,
    ``<t, X t> = Q(t)``, and

        det h_T = h^2 + h P - |Q|^2.
    """
    P = np.abs(x) ** 2
    Q = np.conj(x)
    R = npoly.polymul(Q, np.conj(Q))  # |Q|^2 on the real slice
    return P, Q, R


def commutator_closed_det(x_diag) -> Callable[[float], float]:
    """Closed-form ``det h_T(r)`` for the commutator coupling with diagonal X."""
    x = _x_diagonal(x_diag)
    P, _, R = _commutator_det_polys(x)

    def det(r: float) -> float:
        t = r * r
        h = 1.0 / (1.0 - t)
        return h * h + h * float(npoly.polyval(t, P).real) - float(npoly.polyval(t, R).real)

    return det


def commutator_ratio_fn(x_diag) -> Callable[[float], float]:
    """Closed-form ``det h_T / K^2`` with the unweighted-shift kernel."""
    det = commutator_closed_det(x_diag)

    def ratio(r: float) -> float:
        t = r * r
        return det(r) * (1.0 - t) ** 2

    return ratio


def commutator_trace_curvature(x_diag) -> Callable[[float], float]:
    """Analytic trace curvature ``-d d̄ log det h_T`` of the commutator example.

    Independent of any finite-difference path: the determinant's ``t``
    derivatives are evaluated from its polynomial pieces, then
    ``trace K = -(t u' + u)`` with ``u = D'/D``.
    """
    x = _x_diagonal(x_diag)
    P, _, R = _commutator_det_polys(x)
    P1, P2 = npoly.polyder(P), npoly.polyder(P, 2)
    R1, R2 = npoly.polyder(R), npoly.polyder(R, 2)

    def trace(r: float) -> float:
        t = r * r
        h = 1.0 / (1.0 - t)
        h1 = h * h
        h2 = 2.0 * h ** 3
        pv, p1, p2 = (float(npoly.polyval(t, c).real) for c in (P, P1, P2))
        rv, r1, r2 = (float(npoly.polyval(t, c).real) for c in (R, R1, R2))
        Dv = h * h + h * pv - rv
        D1 = 2.0 * h * h1 + h1 * pv + h * p1 - r1
        D2 = 2.0 * (h1 * h1 + h * h2) + h2 * pv + 2.0 * h1 * p1 + h * p2 - r2
        u = D1 / Dv
        u1 = D2 / Dv - u * u
        return -(t * u1 + u)

    return trace


@dataclass(frozen=True)
class CommutatorReport:
    """Frame-vs-closed-form comparison for the commutator coupling."""

    profile: SimilarityDiagnostic
    closed_form_check: bool
    pinch_ok: bool
    frame_dets: np.ndarray
    closed_dets: np.ndarray
    max_rel_err: float
    x_norm: float


def commutator_example(x_diag, N: int = 192, radii=None) -> CommutatorReport:
    """Couple two unweighted shifts by ``S = X M* - M* X`` and compare paths.

    The assembled operator's determinant is computed from the frame solver
    and from the closed form ``|t|^4 + |t|^2 |Xt|^2 - |<t, Xt>|^2``; they
    must agree to 1e-8 relative.  The det ratio against the squared kernel
    is pinched in ``[1, 1 + |X|^2]`` by Cauchy-Schwarz.
    """
    if radii is None:
        radii = np.arange(0.1, 0.95, 0.1)
    radii = np.asarray(radii, dtype=float)
    x = _x_diagonal(x_diag)
    if len(x) > N:
        raise ConfigurationError("X diagonal longer than the truncation")
    x_norm = float(np.max(np.abs(x))) if len(x) else 0.0
    M = materialize(hardy(), N).matrix
    X = np.zeros((N, N), dtype=complex)
    X[np.arange(len(x)), np.arange(len(x))] = x
    S = X @ M - M @ X
    B = BlockOperator(
        ((ShiftBlock(hardy()), MatrixBlock(S)), (None, ShiftBlock(hardy()))), order=N
    )
    closed = commutator_closed_det(x)
    frame_dets = np.empty(len(radii))
    closed_dets = np.empty(len(radii))
    for i, r in enumerate(radii):
        frame_dets[i] = hermitian_det(frame_solver(B, r))
        closed_dets[i] = closed(r)
    rel = np.abs(frame_dets - closed_dets) / np.abs(closed_dets)
    ratio = frame_dets * (1.0 - radii ** 2) ** 2
    profile = SimilarityDiagnostic(radii, ratio, source="commutator-frame")
    pinch = bool(np.all(ratio >= 1.0 - 1e-10) and np.all(ratio <= 1.0 + x_norm ** 2 + 1e-10))
    return CommutatorReport(
        profile=profile,
        closed_form_check=bool(np.max(rel) <= 1e-8),
        pinch_ok=pinch,
        frame_dets=frame_dets,
        closed_dets=closed_dets,
        max_rel_err=float(np.max(rel)),
        x_norm=x_norm,
    )


def direct_sum_det(h1_samples, h2_samples) -> np.ndarray:
    """Determinant of a block-diagonal gram: the pointwise product."""
    a = np.asarray(h1_samples, dtype=float)
    b = np.asarray(h2_samples, dtype=float)
    if a.shape != b.shape:
        raise ConfigurationError(f"sample grids disagree: {a.shape} vs {b.shape}")
    return a * b


def curvature_quotient_necessary(
    profile_a: CurvatureProfile, profile_b: CurvatureProfile, condition_bound: float, tol: float = 1e-10
) -> bool:
    """Necessary-condition screen from curvature quotients.

    Similarity through an invertible ``X`` pins the curvature-norm quotient
    inside ``[1/c, c]`` with ``c = |X|^2 |X^{-1}|^2``; a quotient escaping
    the band certifies non-similarity under the assumed bound.  Passing the
    screen proves nothing (it is famously not strong enough).
    """
    if condition_bound < 1.0:
        raise DomainError("condition bound must be >= 1")
    if profile_a.radii.shape != profile_b.radii.shape or not np.allclose(
        profile_a.radii, profile_b.radii, rtol=0, atol=1e-14
    ):
        raise ConfigurationError("curvature profiles must share one grid")
    q = np.abs(profile_a.values) / np.abs(profile_b.values)
    return bool(np.all(q >= 1.0 / condition_bound - tol) and np.all(q <= condition_bound + tol))


# ---------------------------------------------------------------------------
# serialization

def write_similarity_csv(D: SimilarityDiagnostic, path, witness: WitnessReport | None = None) -> None:
    """CSV columns ``r, ratio, phi, laplacian_phi, trace_curv_diff, residual``."""
    n = len(D.radii)
    lap = witness.quarter_laplacian * 4.0 if witness is not None else np.full(n, np.nan)
    diff = witness.trace_difference if witness is not None else np.full(n, np.nan)
    res = witness.residuals if witness is not None else np.full(n, np.nan)
    phi = D.phi
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("r,ratio,phi,laplacian_phi,trace_curv_diff,residual\n")
        for i in range(n):
            fh.write(
                f"{D.radii[i]:.17g},{D.ratio[i]:.17g},{phi[i]:.17g},"
                f"{lap[i]:.17g},{diff[i]:.17g},{res[i]:.17g}\n"
            )


def diagnostic_verdicts(D: SimilarityDiagnostic, witness: WitnessReport | None = None) -> dict:
    """JSON-ready verdict block for a similarity diagnostic."""
    block = {
        "upper_bound_ok": D.upper_bound_ok,
        "boundary_limit_positive": D.boundary_limit_positive,
        "witness_residual": D.witness_residual,
        "max_ratio": float(np.max(D.ratio)),
        "min_ratio": float(np.min(D.ratio)),
        "radius_cap": D.radius_cap,
        "source": D.source,
    }
    if witness is not None:
        block.update(
            witness_residual=witness.max_residual,
            witness_tolerance=witness.tolerance,
            witness_passed=witness.passed,
            phi_sup=witness.phi_sup,
            subharmonic_ok=witness.subharmonic_ok,
        )
    return block
