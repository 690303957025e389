"""Metric, curvature and Einstein diagnostics from a Kahler potential.

Everything is generated from one scalar potential per chart: the Hermitian
metric is its mixed second Wirtinger derivative, the Ricci form comes from
the log determinant, and the curvature tensor from the standard potential
formula.  All differentiation goes through exact jet arithmetic, so the
fourth derivatives entering the curvature carry no step-size error.

Normalization, pinned by the self-consistency checks in the test suite:
the real Riemannian metric is G(v, w) = 2 Re(g_jk V^j conj(W^k)) where V, W
are holomorphic components, the Kahler form is w(v, w) = G(Jv, w), and the
Riemann tensor sign is fixed so the orthonormal frame trace of Rm
reproduces the Ricci form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from . import exprs
from .coords import ChartPoint, RealTangent, j_matrix, wirtinger, wirtinger_jet
from .errors import ChartDomainError, DegenerateMetricError, NonAnalyticFieldError
from .jets import DEFAULT_ORDER, Jet, jet_space, lift_callable_to_jet

# Smallest admissible ratio of metric eigenvalues; below this a point is
# rejected as degenerate rather than failing the whole run.
DEGENERACY_RATIO = 1e-10

ScalarField = Union[tuple, Callable[[np.ndarray], float]]


def coordinate_jets(point: ChartPoint, order=DEFAULT_ORDER):
    """Jets of the holomorphic coordinates z^j = x^j + i y^j around a point."""
    n = point.n
    space = jet_space(2 * n, order)
    out = []
    for j, z in enumerate(point.holo):
        xj = space.variable(2 * j, z.real)
        yj = space.variable(2 * j + 1, z.imag)
        out.append(xj + 1j * yj)
    return out


def lift_to_jet(field: ScalarField, point: ChartPoint, order=DEFAULT_ORDER):
    """Lift a real scalar field to its jet at a point.

    Expression-tree fields are evaluated in exact jet arithmetic; callables
    (black boxes on the real coordinate vector) fall back to Richardson-
    extrapolated central finite differences and lose roughly half the
    significant digits of the exact route.
    """
    if callable(field):
        return lift_callable_to_jet(field, point.real_view, order=order)
    env = dict(zip(exprs.coord_names(point.n), coordinate_jets(point, order)))
    jet = exprs.evaluate(field, env)
    if not isinstance(jet, Jet):
        jet = jet_space(2 * point.n, order).constant(jet)
    dust = float(np.max(np.abs(jet.coeffs.imag)))
    scale = 1.0 + float(np.max(np.abs(jet.coeffs.real)))
    if dust > 1e-8 * scale:
        raise NonAnalyticFieldError(
            f"field is not real-valued at {point.holo}: imaginary size {dust:.3g}"
        )
    return jet.real


@dataclass(frozen=True)
class PotentialChart:
    """A chart of C^n carrying a Kahler potential.

    ``potential`` is an expression tree in the coordinates w1..wn, or a
    callable on the real coordinate vector (finite-difference fallback).
    ``box`` bounds the real coordinates for sampling; ``domain`` is an
    optional expression whose positive part is the admitted region.
    """

    dimension: int
    potential: ScalarField
    box: tuple
    domain: Optional[tuple] = None
    label: str = "chart"
    fd_scale: float = 1.0

    @property
    def is_exact(self):
        return not callable(self.potential)

    @property
    def coord_names(self):
        return exprs.coord_names(self.dimension)

    def potential_value(self, point: ChartPoint) -> float:
        if callable(self.potential):
            return float(self.potential(point.real_view))
        env = dict(zip(self.coord_names, point.holo))
        return complex(exprs.evaluate(self.potential, env)).real

    def in_box(self, point: ChartPoint, margin=0.0) -> bool:
        r = point.real_view
        for c, (lo, hi) in zip(r, self.box):
            pad = margin * (hi - lo)
            if not (lo + pad <= c <= hi - pad):
                return False
        return True

    def admits(self, point: ChartPoint, margin=0.0) -> bool:
        if len(self.box) != 2 * self.dimension:
            raise ValueError("box must bound all 2n real coordinates")
        if not self.in_box(point, margin):
            return False
        if self.domain is not None:
            env = dict(zip(self.coord_names, point.holo))
            if complex(exprs.evaluate(self.domain, env)).real <= 0.0:
                return False
        return True

    def require(self, point: ChartPoint):
        if not self.admits(point):
            raise ChartDomainError(f"{point.holo} outside domain of {self.label}")

    def geometry(self, point: ChartPoint) -> "ChartGeometry":
        return _geometry_at(self, point)


@dataclass(frozen=True, eq=False)
class HermitianMetric:
    matrix: np.ndarray
    base: ChartPoint

    def hermitian_defect(self):
        m = self.matrix
        return float(np.linalg.norm(m - m.conj().T) / (1.0 + np.linalg.norm(m)))


@dataclass(frozen=True, eq=False)
class RealMetricAt:
    matrix: np.ndarray
    base: ChartPoint


@dataclass(frozen=True, eq=False)
class KahlerCurvature:
    """Complex curvature coefficients R[i, j, k, l] of type (i, jbar, k, lbar)."""

    tensor: np.ndarray
    base: ChartPoint

    def hermitian_defect(self):
        R = self.tensor
        return float(np.max(np.abs(np.conj(R) - R.transpose(1, 0, 3, 2))))

    def kahler_defect(self):
        R = self.tensor
        return float(np.max(np.abs(R - R.transpose(2, 1, 0, 3))))


@dataclass(frozen=True, eq=False)
class KahlerForm:
    matrix: np.ndarray
    base: ChartPoint

    def __call__(self, v: RealTangent, w: RealTangent) -> float:
        return float(v.components @ self.matrix @ w.components)


class ChartGeometry:
    """Lazily computed geometric data of one chart at one point.

    The object owns the order-4 potential jet and derives all metric,
    connection and curvature values from it; instances are cached per
    (chart, point) and treated as immutable.
    """

    def __init__(self, chart: PotentialChart, point: ChartPoint):
        chart.require(point)
        self.chart = chart
        self.point = point
        self.n = chart.dimension
        self._cache = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # -- potential and metric jets -------------------------------------------

    @property
    def psi_jet(self):
        return self._get("psi", lambda: lift_to_jet(self.chart.potential, self.point))

    @property
    def g_jets(self):
        def build():
            psi = self.psi_jet
            n = self.n
            return [
                [wirtinger_jet(psi, (j,), (k,)) for k in range(n)] for j in range(n)
            ]

        return self._get("g_jets", build)

    @property
    def g(self):
        def build():
            n = self.n
            g = np.array(
                [[self.g_jets[j][k].value for k in range(n)] for j in range(n)]
            )
            eigs = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
            if eigs[0] <= DEGENERACY_RATIO * max(eigs[-1], 0.0) or eigs[-1] <= 0.0:
                raise DegenerateMetricError(
                    f"metric degenerate at {self.point.holo}: eigenvalues {eigs}"
                )
            return g

        return self._get("g", build)

    @property
    def g_inv(self):
        return self._get("g_inv", lambda: np.linalg.inv(self.g))

    @property
    def dg(self):
        """dg[i, k, l] = d_i g_{k lbar} at the point."""

        def build():
            n = self.n
            out = np.empty((n, n, n), dtype=complex)
            for k in range(n):
                for l in range(n):
                    gj = self.g_jets[k][l]
                    for i in range(n):
                        out[i, k, l] = wirtinger(gj, (i,), ())
            return out

        return self._get("dg", build)

    @property
    def ddg(self):
        """ddg[i, j, k, l] = d_i dbar_j g_{k lbar} at the point."""

        def build():
            n = self.n
            out = np.empty((n, n, n, n), dtype=complex)
            for k in range(n):
                for l in range(n):
                    gj = self.g_jets[k][l]
                    for i in range(n):
                        di = wirtinger_jet(gj, (i,), ())
                        for j in range(n):
                            out[i, j, k, l] = wirtinger(di, (), (j,))
            return out

        return self._get("ddg", build)

    # -- Ricci and curvature ---------------------------------------------------

    @property
    def log_det_g_jet(self):
        def build():
            _ = self.g  # degeneracy check before taking the log
            return _jet_matrix_det(self.g_jets).log()

        return self._get("logdet", build)

    @property
    def ricci(self):
        """Ricci coefficients Ric_{j kbar} = -d_j dbar_k log det g."""

        def build():
            n = self.n
            ld = self.log_det_g_jet
            return np.array(
                [[-wirtinger(ld, (j,), (k,)) for k in range(n)] for j in range(n)]
            )

        return self._get("ricci", build)

    @property
    def curvature(self):
        """R[i,j,k,l] = -d_i dbar_j g_{k lbar} + g^{qbar p} d_i g_{k qbar} dbar_j g_{p lbar}."""

        def build():
            dg = self.dg
            term2 = np.einsum("qp,ikq,jlp->ijkl", self.g_inv, dg, np.conj(dg))
            return -self.ddg + term2

        return self._get("curvature", build)

    # -- real metric data --------------------------------------------------------

    @property
    def G(self):
        return self._get("G", lambda: _real_metric_matrix(self.g))

    @property
    def G_inv(self):
        return self._get("G_inv", lambda: np.linalg.inv(self.G))

    @property
    def G_jets(self):
        def build():
            n = self.n
            out = [[None] * (2 * n) for _ in range(2 * n)]
            for j in range(n):
                for k in range(n):
                    re2 = 2.0 * self.g_jets[j][k].real
                    im2 = 2.0 * self.g_jets[j][k].imag
                    out[2 * j][2 * k] = re2
                    out[2 * j][2 * k + 1] = im2
                    out[2 * j + 1][2 * k] = -1.0 * im2
                    out[2 * j + 1][2 * k + 1] = re2
            return out

        return self._get("G_jets", build)

    @property
    def dG(self):
        """dG[c, a, b] = d_c G_{ab} (real first derivatives of the real metric)."""

        def build():
            n2 = 2 * self.n
            out = np.empty((n2, n2, n2))
            for a in range(n2):
                for b in range(a, n2):
                    jet = self.G_jets[a][b]
                    for c in range(n2):
                        val = jet.deriv(c).value.real
                        out[c, a, b] = val
                        out[c, b, a] = val
            return out

        return self._get("dG", build)

    @property
    def christoffel(self):
        """Levi-Civita symbols Gamma[d, a, b] of G, symmetric in (a, b)."""

        def build():
            dG = self.dG
            brace = (
                dG.transpose(1, 0, 2) + dG.transpose(1, 2, 0) - dG
            )  # d_a G_eb + d_b G_ea - d_e G_ab, indexed [e, a, b]
            return 0.5 * np.einsum("de,eab->dab", self.G_inv, brace)

        return self._get("christoffel", build)

    @property
    def kahler_form(self):
        return self._get("omega", lambda: j_matrix(self.n).T @ self.G)

    # -- tensor evaluation ---------------------------------------------------------

    def ricci_real(self, v: RealTangent, w: RealTangent) -> float:
        """The real Ricci tensor: the same 2 Re pairing that turns g into G."""
        V, W = v.holo_components, w.holo_components
        return float(2.0 * np.real(V @ self.ricci @ np.conj(W)))

    def riemann_covector(self, zeta, eta, rho):
        """Covector c with c[a] = Rm(zeta, eta, rho, basis_a)."""
        Z = zeta.holo_components
        H = eta.holo_components
        P = rho.holo_components
        T = np.einsum("ijkl,i,j->kl", self.curvature, Z, np.conj(H))
        q = T.T @ P
        r = T @ np.conj(P)
        c = np.empty(2 * self.n)
        c[0::2] = 2.0 * np.real(q - r)
        c[1::2] = 2.0 * np.imag(q + r)
        return c

    def riemann(self, zeta, eta, rho, upsilon) -> float:
        return float(self.riemann_covector(zeta, eta, rho) @ upsilon.components)

    def curvature_endomorphism(self, zeta, eta, rho) -> RealTangent:
        """R(zeta, eta) rho with the index raised by G."""
        c = self.riemann_covector(zeta, eta, rho)
        return RealTangent(self.G_inv @ c, self.point)


def _real_metric_matrix(g):
    n = g.shape[0]
    G = np.empty((2 * n, 2 * n))
    re, im = 2.0 * g.real, 2.0 * g.imag
    G[0::2, 0::2] = re
    G[0::2, 1::2] = im
    G[1::2, 0::2] = -im
    G[1::2, 1::2] = re
    # g is Hermitian only to roundoff; make G symmetric exactly
    return 0.5 * (G + G.T)


def _jet_matrix_det(m):
    """Determinant of a small matrix of jets by Laplace expansion."""
    n = len(m)
    if n == 1:
        return m[0][0]

    def minor_det(rows, cols):
        if len(rows) == 1:
            return m[rows[0]][cols[0]]
        r = rows[0]
        acc = None
        for s, c in enumerate(cols):
            rest = cols[:s] + cols[s + 1:]
            term = m[r][c] * minor_det(rows[1:], rest)
            if s % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc

    return minor_det(tuple(range(n)), tuple(range(n)))


@lru_cache(maxsize=4096)
def _geometry_at(chart, point):
    return ChartGeometry(chart, point)


# -- module-level operations (thin wrappers over the geometry cache) -------------


def metric_at(chart, point) -> HermitianMetric:
    return HermitianMetric(chart.geometry(point).g, point)


def real_metric_at(chart, point) -> RealMetricAt:
    return RealMetricAt(chart.geometry(point).G, point)


def kahler_form_at(chart, point) -> KahlerForm:
    return KahlerForm(chart.geometry(point).kahler_form, point)


def ricci_form_at(chart, point) -> HermitianMetric:
    return HermitianMetric(chart.geometry(point).ricci, point)


def curvature_at(chart, point) -> KahlerCurvature:
    return KahlerCurvature(chart.geometry(point).curvature, point)


def christoffel_real(chart, point):
    return chart.geometry(point).christoffel


def riemann_real(chart, point, zeta, eta, rho, upsilon) -> float:
    return chart.geometry(point).riemann(zeta, eta, rho, upsilon)


def curvature_endomorphism(chart, point, zeta, eta, rho) -> RealTangent:
    return chart.geometry(point).curvature_endomorphism(zeta, eta, rho)


# Entries smaller than this fraction of the metric norm are too noisy for
# entrywise Ricci/metric ratios.
RATIO_FLOOR = 1e-6


def einstein_residual(chart, samples):
    """Estimate the Einstein constant and the worst relative defect.

    Returns (lambda_est, max_residual) where lambda_est is the median of
    entrywise Ric/g ratios over well-conditioned entries of all samples and
    max_residual = max_p ||Ric - lambda g||_F / ||g||_F.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("einstein_residual needs at least 2 sample points")
    pairs = []
    ratios = []
    for p in samples:
        geom = chart.geometry(p)
        g, ric = geom.g, geom.ricci
        pairs.append((g, ric))
        floor = RATIO_FLOOR * np.linalg.norm(g)
        mask = np.abs(g) > floor
        ratios.extend(np.real(ric[mask] / g[mask]).tolist())
    lam = float(np.median(ratios))
    worst = 0.0
    for g, ric in pairs:
        worst = max(worst, float(np.linalg.norm(ric - lam * g) / np.linalg.norm(g)))
    return lam, worst
