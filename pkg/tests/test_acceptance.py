"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

import json
import math

import numpy as np
import pytest

from varspec import cli
from varspec.convergence import FamilyMember, PASS, FAIL, condition_report, verify_forward_nodes, verify_reverse_bound
from varspec.families import (
    GalerkinSpec,
    PerforatedSpec,
    ShiftFamilySpec,
    ThinStripSpec,
    make_galerkin_family,
    make_perforated_family,
    make_shift_family,
    make_thin_strip_family,
    shift_residual_bound,
)
from varspec.operators import SpectralWindow, operator_norm, resolvent_norm
from varspec.resolvent_engine import check_graph_resolvent_bound, propagation_identity_residual
from varspec.spectra import (
    certify_isolated_eigenvalue,
    circle_nodes,
    hausdorff_distance,
    spectral_set,
    windowed_hausdorff_run,
)

from conftest import random_complex, random_normal_matrix


@pytest.fixture(scope="module")
def strip():
    return make_thin_strip_family(ThinStripSpec(eps_list=(0.5, 0.25, 0.125), nx=24, nt=24))


@pytest.fixture(scope="module")
def strip_lemma_setting(strip):
    limit, fam = strip
    nodes = circle_nodes(-1, 0.5, 16)
    r = max(abs(z) for z in nodes) + 1.0
    return limit, fam, nodes, r


def test_criterion_01_shift_norm_convergence(criterion):
    limit, fam = make_shift_family(ShiftFamilySpec(n_list=(2, 5, 10, 100), window_N=128))
    errors = [abs(operator_norm(m.A_eps.entries - limit.A.entries) - m.eps) for m in fam]
    criterion(1, "shift family: ||T_n - T|| = 1/n to 1e-14 at N = 128", max(errors) <= 1e-14,
              f"max error {max(errors):.1e}")


def test_criterion_02_shift_inclusion_failure(criterion):
    lam = 0.5
    bounds = {}
    ok_bound = True
    for N in range(10, 31):
        _, bound = shift_residual_bound(lam, N)
        norm_x = math.sqrt((1 - lam ** (2 * (N + 1))) / (1 - lam**2))
        ok_bound &= bound >= 0.95 * norm_x / lam ** (N + 1)
        bounds[N] = bound
    ratios = [bounds[N + 1] / bounds[N] for N in range(10, 30)]
    limit, fam = make_shift_family(ShiftFamilySpec(n_list=(2, 5, 10, 100), window_N=128, wrap=True))
    run = windowed_hausdorff_run(fam, limit, SpectralWindow(0, 0.9))
    d_back = [h.d_backward for _, h in run]
    ok = ok_bound and min(ratios) >= 1.9 and all(d >= 0.8 for d in d_back)
    criterion(2, "shift family: resolvent blow-up and persistent inclusion failure", ok,
              f"min growth ratio {min(ratios):.4f}, d_backward {d_back}")


def test_criterion_03_propagation_identity(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    done = 0
    while done < 100:
        A, A_eps, J = (random_complex(rng, (5, 5)) for _ in range(3))
        z, z0 = (complex(*(2 * rng.standard_normal(2))) for _ in range(2))
        spectra = np.concatenate([np.linalg.eigvals(A), np.linalg.eigvals(A_eps)])
        if min(np.abs(spectra - z).min(), np.abs(spectra - z0).min()) < 1e-3:
            continue
        residual, vz = propagation_identity_residual(FamilyMember(1.0, A_eps, np.eye(5), J), A, z, z0)
        worst = max(worst, residual / (1 + vz))
        done += 1
    criterion(3, "propagation identity for V(z) on 100 random 5x5 instances", worst <= 1e-9,
              f"worst relative residual {worst:.1e}")


def _z_grid(operators):
    grid = [complex(x, y) for x in (-3.0, 0.0, 3.0) for y in (-3.0, 1.5, 3.0)]
    for A in operators:
        vals = spectral_set(A).as_array()
        for z in grid:
            assert np.abs(vals - z).min() >= 0.1
    return grid


def test_criterion_04_graph_norm_resolvent_lemma(criterion):
    rng = np.random.default_rng(7)
    random_ok, exact_ok, draws = True, True, 0
    while draws < 200:
        n = int(rng.integers(1, 9))
        A = random_complex(rng, (n, n))
        z = complex(*(2 * rng.standard_normal(2)))
        if np.abs(np.linalg.eigvals(A) - z).min() < 0.1:
            continue
        c = check_graph_resolvent_bound(A, z, n_samples=16, seed=draws)
        random_ok &= c.holds_sampled
        exact_ok &= c.holds
        draws += 1

    families = {
        "shift": make_shift_family(ShiftFamilySpec()),
        "galerkin": make_galerkin_family(GalerkinSpec(np.diag(np.arange(1.0, 41.0)), (5, 10, 20, 40))),
        "perforated": make_perforated_family(PerforatedSpec()),
        "thin_strip": make_thin_strip_family(ThinStripSpec()),
    }
    family_ok, count = True, 0
    for limit, fam in families.values():
        ops = [limit.A] + [m.A_eps for m in fam]
        grid = _z_grid(ops)
        for A in ops:
            for z in grid:
                c = check_graph_resolvent_bound(A, z, n_samples=8)
                family_ok &= c.holds_sampled
                exact_ok &= c.holds
                count += 1
    criterion(4, "graph-norm resolvent bound on 200 random draws and all built-in members",
              random_ok and family_ok,
              f"{count} family evaluations; exact sum-norm bound also holds: {exact_ok}")


def test_criterion_05_forward_bound(criterion, strip_lemma_setting):
    limit, fam, nodes, r = strip_lemma_setting
    l = max(resolvent_norm(limit.A, z).resolvent_norm for z in nodes)
    checks = [c for m in fam for c in verify_forward_nodes(m, limit, nodes, l, r)]
    active = [c for c in checks if c.status in (PASS, FAIL)]
    violations = [c for c in active if c.status == FAIL]
    ok = bool(active) and not violations
    criterion(5, "forward resolvent bound on the thin strip, |z + 1| = 0.5", ok,
              f"{len(active)}/{len(checks)} nodes satisfy the hypotheses, {len(violations)} violations, "
              f"L_forward = {checks[0].L:.4g}, max observed {max(c.observed for c in checks):.4g}")


def test_criterion_06_reverse_bound(criterion, strip_lemma_setting):
    limit, fam, nodes, r = strip_lemma_setting
    l = max(resolvent_norm(m.A_eps, z).resolvent_norm for m in fam for z in nodes)
    checks = [c for m in fam for c in verify_reverse_bound(m, limit, nodes, l, r)]
    violations = [c for c in checks if not c.holds_safe or c.status == FAIL]
    stated = all(c.holds_stated for c in checks)
    criterion(6, "reverse resolvent bound on the thin strip with the safe constant", not violations,
              f"{len(violations)} violations of L_reverse_safe = {checks[0].L_safe:.4g}; "
              f"stated constant {checks[0].L_stated:.4g} holds: {stated}")


def test_criterion_07_strip_condition_i(criterion, strip):
    limit, fam = strip
    values = [(m.eps, condition_report(m, limit).cond_i[1]) for m in fam]
    ok = all(v <= 1.2 * eps for eps, v in values)
    criterion(7, "thin strip: cond (i) upper bound <= 1.2 eps", ok,
              ", ".join(f"eps={eps}: {v:.3e}" for eps, v in values))


def test_criterion_08_exactness_anchors(criterion, strip):
    _, galerkin = make_galerkin_family(GalerkinSpec(np.diag(np.arange(1.0, 41.0)), (5, 10, 20, 40)))
    _, perforated = make_perforated_family(PerforatedSpec())
    limit, fam = strip
    g = all(np.array_equal(m.I_eps @ m.J_eps, np.eye(m.A_eps.dim)) for m in galerkin)
    p = all(np.array_equal(m.I_eps @ m.J_eps, np.eye(m.A_eps.dim)) for m in perforated)
    s = max(np.abs(m.J_eps @ m.I_eps - np.eye(limit.dim)).max() for m in fam)
    criterion(8, "identification identities (Galerkin IJ, perforated IJ exact; strip JI to 1e-12)",
              g and p and s <= 1e-12, f"strip max deviation {s:.1e}")


def test_criterion_09_windowed_hausdorff(criterion, strip):
    limit, fam = strip
    run = windowed_hausdorff_run(fam, limit, SpectralWindow(5, 6))
    d = [h.d_H for _, h in run]
    # 10% relative slack plus an absolute roundoff floor: here the windowed spectra
    # coincide up to eigensolver roundoff at every eps
    trend = all(b <= 1.1 * a + 1e-9 for a, b in zip(d, d[1:]))
    ok = trend and d[-1] <= 0.5
    criterion(9, "thin strip: windowed Hausdorff distance decreasing and final d_H <= 0.5", ok,
              "d_H " + ", ".join(f"{v:.2e}" for v in d))


def test_criterion_10_isolated_eigenvalue(criterion, strip):
    limit, fam = strip
    vals = np.sort(spectral_set(limit.A).as_array().real)
    lam = vals[vals > 1e-9][0]
    eig_gap = np.min(np.abs(vals[np.abs(vals - lam) > 1e-8] - lam))
    out = certify_isolated_eigenvalue(fam, limit, lam, 0.5 * eig_gap)
    final_gap = out.witnesses["sequence"][-1]["gap"]
    strip_ok = out.verdict == "pass" and final_gap <= 0.1 * eig_gap

    glimit, gfam = make_galerkin_family(GalerkinSpec(np.diag(np.arange(1.0, 41.0)), (5, 10, 20, 40)))
    gout = certify_isolated_eigenvalue(gfam, glimit, 7.0, 0.5)
    exact = all(s["gap"] == 0.0 for s in gout.witnesses["sequence"] if 1 / s["eps"] >= 7)
    ok = strip_ok and gout.verdict == "pass" and exact
    criterion(10, "isolated eigenvalue tracking (thin strip, Galerkin lambda = 7)", ok,
              f"strip lambda {lam:.6f}, final gap {final_gap:.1e} vs eigenvalue gap {eig_gap:.3f}")


def _brute_one_sided(X, Y):
    if not X:
        return 0.0
    if not Y:
        return math.inf
    return max(min(abs(x - y) for y in Y) for x in X)


def test_criterion_11_hausdorff_oracle(criterion):
    rng = np.random.default_rng(11)

    def draw():
        k = int(rng.integers(1, 9))
        return list(random_complex(rng, k))

    exact, triangle = True, True
    for _ in range(100):
        P, Q, S = draw(), draw(), draw()
        h = hausdorff_distance(P, Q)
        f, b = _brute_one_sided(P, Q), _brute_one_sided(Q, P)
        exact &= (h.d_forward, h.d_backward, h.d_H) == (f, b, max(f, b))
        triangle &= hausdorff_distance(P, S).d_H <= h.d_H + hausdorff_distance(Q, S).d_H + 1e-12
    criterion(11, "Hausdorff distance equals the all-pairs oracle and obeys the triangle inequality",
              exact and triangle)


def test_criterion_12_normal_resolvent_oracle(criterion):
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        A, lam = random_normal_matrix(rng, n)
        z = complex(*rng.standard_normal(2))
        value = resolvent_norm(A, z).resolvent_norm
        worst = max(worst, abs(value - 1 / np.abs(z - lam).min()) / value)
    criterion(12, "resolvent norm of normal matrices equals 1/dist(z, spectrum)", worst <= 1e-8,
              f"worst relative error {worst:.1e}")


def test_criterion_13_cli_determinism(criterion, tmp_path):
    config = {
        "family": {"name": "thin_strip", "nx": 8, "nt": 10},
        "window": {"center": [5, 0], "radius": 6},
        "probes": {"count": 5, "seed": 3},
        "checks": ["conditions", "lemma_forward", "lemma_reverse", "no_pollution", "isolated",
                   "hausdorff", "pseudospectrum"],
        "pseudospectrum": {"resolution": [9, 9]},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    a, b = tmp_path / "a", tmp_path / "b"
    codes = [cli.main(["run", str(path), "--output-dir", str(a)]),
             cli.main(["run", str(path), "--output-dir", str(b)])]
    csvs = sorted(p.name for p in a.glob("*.csv"))
    same = bool(csvs) and all((a / n).read_bytes() == (b / n).read_bytes() for n in csvs)

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": {"name": "no_such_family"}, "checks": ["conditions"]}))
    bad_out = tmp_path / "bad_out"
    bad_code = cli.main(["run", str(bad), "--output-dir", str(bad_out)])
    ok = codes == [0, 0] and same and bad_code == 2 and not bad_out.exists()
    criterion(13, "CLI: byte-identical CSVs across runs; invalid config exits 2 with no output", ok,
              f"{len(csvs)} CSVs compared, invalid-config exit {bad_code}")
