"""The curvature trace operator on a locus and its spectral Einstein test.

For tangent fields of a totally real locus the operator

    zeta  ->  sum_a J [ R(J e_a, zeta) e_a ]^normal

is tangent-valued; the locus carries an Einstein induced metric exactly
when this operator is -C times the identity for a constant C.  Two
independent evaluations are kept side by side: the projection route above
and the scalar route -sum_a Rm(J e_a, e_b, e_c, J e_a); they must agree to
tensor-assembly precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coords import RealTangent, apply_J
from .locus import LocusPoint
from .metrics import PotentialChart

DEFAULT_TOL_SYM = 1e-6
DEFAULT_TOL_EIG = 1e-5
DEFAULT_TOL_CONST = 1e-5


def _normal_projection(frame, G, v: RealTangent) -> RealTangent:
    comps = frame.normal.T @ (frame.normal @ G @ v.components)
    return RealTangent(comps, v.base)


def map_normal_projector(mapping, point):
    """The splitting projector (v - Df v) / 2 from the map differential."""
    D = mapping.jacobian_real(point)

    def project(v: RealTangent) -> RealTangent:
        return RealTangent((v.components - D @ v.components) / 2.0, v.base)

    return project


def j_normal_curvature(
    chart: PotentialChart,
    lp: LocusPoint,
    zeta: RealTangent,
    eta: RealTangent,
    rho: RealTangent,
    projector=None,
) -> RealTangent:
    """J applied to the normal part of R(J zeta, eta) rho.

    The output is tangent to the locus (J exchanges tangent and normal on a
    totally real submanifold).  ``projector`` overrides the frame-based
    normal projection, e.g. with :func:`map_normal_projector`.
    """
    geom = chart.geometry(lp.point)
    u = geom.curvature_endomorphism(apply_J(zeta), eta, rho)
    if projector is None:
        u_perp = _normal_projection(lp.frame, geom.G, u)
    else:
        u_perp = projector(u)
    return apply_J(u_perp)


def mixed_curvature_trace(
    chart: PotentialChart, lp: LocusPoint, zeta: RealTangent, eta: RealTangent
) -> float:
    """sum_a Rm(J e_a, zeta, eta, J e_a) over the normal half of the frame."""
    geom = chart.geometry(lp.point)
    return float(
        sum(geom.riemann(je, zeta, eta, je) for je in lp.frame.normal_vectors())
    )


def mixed_curvature_matrix(chart: PotentialChart, lp: LocusPoint) -> np.ndarray:
    """The mixed trace evaluated on frame pairs: out[a, b] on (e_a, e_b)."""
    geom = chart.geometry(lp.point)
    es = lp.frame.tangent_vectors()
    n = lp.frame.n
    out = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            out[a, b] = sum(
                geom.riemann(je, es[a], es[b], je)
                for je in lp.frame.normal_vectors()
            )
    return out


@dataclass(frozen=True, eq=False)
class TraceOperatorAt:
    """The trace operator in the frame basis, from both evaluation routes.

    ``matrix``[b, a] = G(sum_c J[R(J e_c, e_a) e_c]^normal, e_b); the
    ``cross_matrix`` is the same object assembled from curvature scalars.
    The matrix depends on the frame only through orthogonal conjugation.
    """

    matrix: np.ndarray
    cross_matrix: np.ndarray
    base: LocusPoint

    @property
    def route_agreement(self) -> float:
        return float(
            np.max(np.abs(self.matrix - self.cross_matrix))
            / max(1.0, float(np.max(np.abs(self.matrix))))
        )


def trace_operator_at(
    chart: PotentialChart, lp: LocusPoint, projector=None, frame=None
) -> TraceOperatorAt:
    frame = frame if frame is not None else lp.frame
    if frame is not lp.frame:
        lp = LocusPoint(lp.t, lp.point, frame, lp.jacobian, lp.chart, lp.locus)
    geom = chart.geometry(lp.point)
    es = frame.tangent_vectors()
    n = frame.n
    M = np.empty((n, n))
    for a in range(n):
        image = np.zeros(2 * chart.dimension)
        for c in range(n):
            image += j_normal_curvature(
                chart, lp, es[c], es[a], es[c], projector=projector
            ).components
        for b in range(n):
            M[b, a] = float(frame.tangent[b] @ geom.G @ image)
    cross = -mixed_curvature_matrix(chart, lp).T
    return TraceOperatorAt(M, cross, lp)


@dataclass(frozen=True)
class SpectralVerdict:
    """Per-point outcome of the spectral Einstein test."""

    eigenvalues: tuple
    symmetric_residual: float
    eigenvalue_spread: float
    C_est: float
    einstein: bool
    complex_eigenvalues: bool


def spectral_test(M, tol_sym=DEFAULT_TOL_SYM, tol_eig=DEFAULT_TOL_EIG) -> SpectralVerdict:
    """Decide whether M is (numerically) -C times the identity.

    A real matrix is orthogonally diagonalizable iff it is symmetric, so
    the test is: symmetric defect below ``tol_sym`` and relative eigenvalue
    spread of the symmetrized matrix below ``tol_eig``.  C is reported with
    the sign convention M = -C Id, so raw eigenvalues are also returned.
    """
    M = np.asarray(M, dtype=float)
    scale = max(1.0, float(np.linalg.norm(M)))
    sym_res = float(np.linalg.norm(M - M.T) / scale)
    eigs = np.linalg.eigvalsh(0.5 * (M + M.T))
    mean = float(np.mean(eigs))
    spread = float((eigs[-1] - eigs[0]) / max(1.0, abs(mean)))
    raw = np.linalg.eigvals(M)
    has_complex = bool(np.max(np.abs(raw.imag)) > 1e-9 * scale)
    return SpectralVerdict(
        eigenvalues=tuple(float(e) for e in eigs),
        symmetric_residual=sym_res,
        eigenvalue_spread=spread,
        C_est=-mean,
        einstein=bool(sym_res < tol_sym and spread < tol_eig),
        complex_eigenvalues=has_complex,
    )
