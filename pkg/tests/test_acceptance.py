"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints `PASS criterion k: ...` (visible with pytest -s / -v) and
asserts the same condition, so the suite doubles as a checklist.
"""

import time

import numpy as np
import pytest

from einlocus import (
    AntiholoMap,
    ChartPoint,
    PotentialChart,
    RealTangent,
    apply_J,
    builtin_cpn,
    builtin_flat_torus,
    curvature_endomorphism,
    einstein_residual,
    locus_point,
    make_builtin,
    project_tn,
    pullback_potential,
    riemann_real,
    run_verify,
    sff_max_norm,
    spectral_test,
    trace_operator_at,
)
from einlocus.bundles import DEFAULT_SUITE, ManifoldBundle, _conjugation, _real_slice
from einlocus.criterion import map_normal_projector
from einlocus.locus import FixedLocusParam
from einlocus.sampling import SamplingConfig, sample_chart_points, sample_parameters

from conftest import admitted_points, random_tangents


def _report(k, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"{status} criterion {k}: {detail}")
    assert ok, f"criterion {k}: {detail}"


def test_criterion_01_projective_space_baseline():
    details = []
    ok = True
    for n in (1, 2, 3):
        bundle = builtin_cpn(n)
        start = time.perf_counter()
        pts, stats = sample_chart_points(bundle.chart, 50, seed=101)
        lam, res = einstein_residual(bundle.chart, pts)
        elapsed = time.perf_counter() - start
        good = (
            len(pts) >= 50
            and abs(lam - (n + 1)) < 1e-9
            and res < 1e-7
            and elapsed < 10.0
        )
        ok &= good
        details.append(f"n={n}: lambda={lam:.9f} residual={res:.2e} {elapsed:.2f}s")
    _report(1, ok, "; ".join(details))


def test_criterion_02_conjugation_is_isometry():
    from einlocus import anti_isometry_residual, isometry_residual

    worst_iso, worst_anti = 0.0, 0.0
    for n in (1, 2, 3):
        bundle = builtin_cpn(n)
        for p in admitted_points(bundle.chart, 25, seed=102):
            worst_iso = max(worst_iso, isometry_residual(bundle.mapping, bundle.chart, p))
            worst_anti = max(
                worst_anti, anti_isometry_residual(bundle.mapping, bundle.chart, p)
            )
    ok = worst_iso < 1e-9 and worst_anti < 1e-9
    _report(2, ok, f"worst isometry {worst_iso:.2e}, anti-isometry {worst_anti:.2e}")


def test_criterion_03_totally_geodesic_loci():
    worst_rp = 0.0
    for n in (1, 2, 3):
        bundle = builtin_cpn(n)
        for t in sample_parameters(bundle.locus, 8, seed=103):
            worst_rp = max(worst_rp, sff_max_norm(bundle.chart, bundle.locus, t))
    worst_q = 0.0
    for n in (1, 2, 3):
        bundle = make_builtin("quadric", n)
        for t in sample_parameters(bundle.locus, 8, seed=104):
            worst_q = max(worst_q, sff_max_norm(bundle.chart, bundle.locus, t))
    euclid = PotentialChart(1, ("*", 0.5, ("abs2", "w1")), ((-3.0, 3.0),) * 2, label="euclid")
    circle_ok = True
    circle_vals = []
    for r in (0.5, 1.0, 2.0):
        circle = FixedLocusParam(
            (("*", r, ("exp", ("*", "I", "t1"))),), ((-0.7, 0.7),), label=f"circle-{r}"
        )
        h = sff_max_norm(euclid, circle, (0.2,))
        circle_vals.append(f"r={r}: {h:.4f}")
        circle_ok &= abs(h - 1.0 / r) <= 0.05 / r
    ok = worst_rp < 1e-7 and worst_q < 1e-6 and circle_ok
    _report(
        3,
        ok,
        f"real-form worst {worst_rp:.2e}, quadric worst {worst_q:.2e}, "
        + ", ".join(circle_vals),
    )


def test_criterion_04_projection_identities():
    families = [("cpn", 2), ("quadric", 2), ("flat-torus", 2), ("toric-fs", 2), ("toric-flat", 2)]
    worst_swap = 0.0
    exact_sum = True
    for name, n in families:
        bundle = make_builtin(name, n)
        ts = sample_parameters(bundle.locus, 4, seed=105)
        rng = np.random.default_rng(hash(name) % 2**32)
        per_point = 1000 // len(ts) + 1
        for t in ts:
            lp = locus_point(bundle.chart, bundle.locus, t)
            for _ in range(per_point):
                v = RealTangent(rng.standard_normal(2 * n), lp.point)
                vt, vp = project_tn(bundle.mapping, bundle.chart, lp.point, v)
                exact_sum &= bool(
                    np.array_equal(vt.components + vp.components, v.components)
                )
                jv = apply_J(v)
                jvt, jvp = project_tn(bundle.mapping, bundle.chart, lp.point, jv)
                worst_swap = max(
                    worst_swap,
                    float(np.max(np.abs(apply_J(vt).components - jvp.components))),
                )
    ok = exact_sum and worst_swap < 1e-12
    _report(4, ok, f"decomposition exact={exact_sum}, J-swap worst {worst_swap:.2e}")


def test_criterion_05_trace_operator_routes_agree():
    worst = 0.0
    for name, n in DEFAULT_SUITE:
        bundle = make_builtin(name, n)
        for t in sample_parameters(bundle.locus, 4, seed=106):
            lp = locus_point(bundle.chart, bundle.locus, t)
            op = trace_operator_at(
                bundle.chart, lp, projector=map_normal_projector(bundle.mapping, lp.point)
            )
            worst = max(worst, float(np.max(np.abs(op.matrix - op.cross_matrix))))
    ok = worst < 1e-8
    _report(5, ok, f"worst entrywise route gap {worst:.2e}")


def test_criterion_06_biconditional_and_constant_splitting():
    details = []
    ok = True
    for n in (2, 3):
        rep, code = run_verify(builtin_cpn(n), SamplingConfig(30, 25, seed=107))
        d = rep.data
        gap = abs(d["constants"]["lambda_minus_kappa_minus_C"])
        good = (
            code == 0
            and d["verdict"]["einstein_by_spectrum"]
            and d["verdict"]["einstein_by_restricted_ricci"]
            and gap < 1e-6
        )
        ok &= good
        details.append(
            f"cpn-{n}: lambda={d['constants']['lambda_est']:.6f} "
            f"kappa={d['constants']['kappa_est']:.6f} C={d['constants']['C_est']:.6f} "
            f"gap={gap:.2e}"
        )
    rep, code = run_verify(builtin_flat_torus(2), SamplingConfig(20, 15, seed=108))
    c = rep.data["constants"]
    flat_ok = (
        code == 0
        and abs(c["lambda_est"]) < 1e-10
        and abs(c["kappa_est"]) < 1e-10
        and abs(c["C_est"]) < 1e-10
    )
    ok &= flat_ok
    details.append(
        f"flat: lambda={c['lambda_est']:.2e} kappa={c['kappa_est']:.2e} C={c['C_est']:.2e}"
    )
    _report(6, ok, "; ".join(details))


def test_criterion_07_pullback_preserves_einstein_constant():
    details = []
    ok = True
    for name, n in DEFAULT_SUITE:
        bundle = make_builtin(name, n)
        pts = admitted_points(bundle.chart, 10, seed=109)
        lam0, _ = einstein_residual(bundle.chart, pts)
        pulled = pullback_potential(bundle.mapping, bundle.chart)
        lam1, _ = einstein_residual(pulled, pts)
        good = abs(lam1 - lam0) < 1e-7
        ok &= good
        details.append(f"{bundle.label}: {abs(lam1 - lam0):.1e}")
    _report(7, ok, "lambda gaps " + ", ".join(details))


def test_criterion_08_commutation_and_bianchi():
    chart = builtin_cpn(2).chart
    pts = admitted_points(chart, 20, seed=110)
    worst_comm, worst_bianchi = 0.0, 0.0
    count = 0
    rng = np.random.default_rng(110)
    while count < 1000:
        p = pts[count % len(pts)]
        z, e, r, u = random_tangents(p, 4, seed=int(rng.integers(1 << 30)))
        lhs = curvature_endomorphism(chart, p, z, e, apply_J(r)).components
        rhs = apply_J(curvature_endomorphism(chart, p, z, e, r)).components
        worst_comm = max(worst_comm, float(np.linalg.norm(lhs - rhs)))
        b = (
            riemann_real(chart, p, z, e, r, u)
            + riemann_real(chart, p, e, r, z, u)
            + riemann_real(chart, p, r, z, e, u)
        )
        worst_bianchi = max(worst_bianchi, abs(b))
        count += 1
    ok = worst_comm < 1e-9 and worst_bianchi < 1e-9
    _report(8, ok, f"commutation {worst_comm:.2e}, first Bianchi {worst_bianchi:.2e} over 1000 draws")


def test_criterion_09_negative_controls():
    perturbed = PotentialChart(
        2,
        ("+", ("abs2", "w1"), ("abs2", "w2"), ("*", 0.1, ("pow", ("abs2", "w1"), 2))),
        ((-0.8, 0.8),) * 4,
        label="perturbed",
    )
    non_ke = ManifoldBundle(
        chart=perturbed,
        mapping=_conjugation(2),
        locus=_real_slice(2, 0.8),
        c1_sign="zero",
        label="perturbed",
    )
    _, code_a = run_verify(non_ke, SamplingConfig(15, 10, seed=111))

    base = builtin_cpn(1)
    stretched = ManifoldBundle(
        chart=base.chart,
        mapping=AntiholoMap((("*", 2, ("conj", "w1")),), label="2conj"),
        locus=base.locus,
        c1_sign="positive",
        label="stretched-map",
    )
    rep_b, code_b = run_verify(stretched, SamplingConfig(15, 10, seed=112))

    sv = spectral_test(np.diag([-3.0, -3.5]))
    ok = code_a == 3 and code_b == 3 and sv.einstein is False
    _report(
        9,
        ok,
        f"non-Einstein ambient exit {code_a}, non-isometric map exit {code_b}, "
        f"spread fixture einstein={sv.einstein}",
    )


def test_criterion_10_determinism_and_suite_runtime():
    config = SamplingConfig(50, 50, seed=113)
    start = time.perf_counter()
    codes = {}
    for name, n in DEFAULT_SUITE:
        _, code = run_verify(make_builtin(name, n), config)
        codes[f"{name}-{n}"] = code
    elapsed = time.perf_counter() - start
    rep1, _ = run_verify(builtin_cpn(2), config)
    rep2, _ = run_verify(builtin_cpn(2), config)
    identical = rep1.to_json() == rep2.to_json()
    ok = identical and elapsed < 120.0 and all(c == 0 for c in codes.values())
    _report(
        10,
        ok,
        f"byte-identical={identical}, suite of {len(codes)} built-ins in {elapsed:.1f}s, "
        f"exit codes {sorted(set(codes.values()))}",
    )
