"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the run summary.
"""

import os
import subprocess
import sys

import numpy as np

from anihsi import (ApproximationSchedule, GridFunction, GridSpec, PotentialKernel, centered_diff,
                    check_admissibility, denseness_study, derive_profile, full_symbol, gaussian,
                    interpolation_check, inversion_residual, noncentered_diff, polynomial,
                    rho_lam, spectral_inversion_residual, symbol_consistency)
from anihsi.lemmasuite import default_suite

from acceptance_log import record

ANISO = derive_profile([1.0, 1.5])


def test_c1_symbol_operator_consistency():
    cases = [(derive_profile([0.5]), GridSpec(1, 8.0, 256), 64, e) for e in (0.5, 0.25, 0.125)]
    cases.append((ANISO, GridSpec(2, 6.0, 64), 4, 0.5))
    worst, parts = 0.0, []
    for prof, grid, pad, eps in cases:
        rep = symbol_consistency(gaussian(1.0, prof.n), prof, grid, eps, pad=pad)
        worst = max(worst, rep.error)
        parts.append(f"n={prof.n} eps={eps}: {rep.error:.2e}")
    ok = record("C1 symbol/operator consistency (<= 1e-2)", worst <= 1e-2, "; ".join(parts))
    assert ok


def test_c2_one_dimensional_power_law():
    xi = np.array([[0.5], [1.0], [2.0], [4.0]])
    worst = 0.0
    for alpha, ell in ((0.3, 1), (0.5, 1), (1.2, 2)):
        prof = derive_profile([alpha])
        for method in ("table", "direct"):
            ratio = full_symbol(xi, prof, ell, method=method) / ((-1) ** ell * xi[:, 0] ** alpha)
            worst = max(worst, np.ptp(ratio) / abs(ratio.mean()))
    ok = record("C2 power-law collapse (<= 1e-3)", worst <= 1e-3, f"max relative spread {worst:.2e}")
    assert ok


def test_c3_homogeneity():
    rng = np.random.default_rng(2024)
    lam = ANISO.lam_array
    x = rng.normal(size=(1000, 2)) * np.exp(rng.uniform(-3, 3, (1000, 1)))
    t = np.exp(rng.uniform(-3, 3, 1000))
    lhs = rho_lam(t[:, None] ** lam * x, lam)
    rho_err = float(np.max(np.abs(lhs / (t * rho_lam(x, lam)) - 1)))
    sym_err = 0.0
    for prof in (derive_profile([0.5]), ANISO):
        xi = rng.uniform(-3, 3, (20, prof.n))
        a = full_symbol(xi, prof, method="direct")
        b = full_symbol(2.0 ** prof.lam_array * xi, prof, method="direct")
        sym_err = max(sym_err, float(np.max(np.abs(b / (2.0 ** prof.alpha_star * a) - 1))))
    ok = record("C3 homogeneity (rho 1e-10, symbol 1e-3)", rho_err <= 1e-10 and sym_err <= 1e-3,
                f"rho {rho_err:.2e}, symbol {sym_err:.2e}")
    assert ok


def test_c4_inversion():
    grid = GridSpec(2, 32.0, 128)
    f = gaussian(1.0, 2)
    res = inversion_residual(f, ANISO, grid, PotentialKernel(ANISO))
    control = spectral_inversion_residual(f, ANISO, grid)
    ok = record("C4 inversion (kernel 5e-2, spectral 1e-10)", res <= 5e-2 and control <= 1e-10,
                f"kernel route {res:.3e}, spectral route {control:.2e} (L=32, N=128)")
    assert ok


def test_c5_admissibility():
    a = check_admissibility(derive_profile([3.0, 6.0]))
    b_prof = derive_profile([4.0, 4.0])
    b = check_admissibility(b_prof)
    c = check_admissibility(derive_profile([1.0, 1.0]))
    ok = (not a.valid and a.violating_index == (1, 1) and b.valid and b_prof.m_cap == 2
          and c.valid and c.checked_orders == [])
    record("C5 admissibility", ok, f"(3,6)->{a.violating_index}, (4,4) m={b_prof.m_cap}, (1,1) vacuous")
    assert ok


def test_c6_denseness():
    rep = denseness_study(gaussian(1.0, 2), ANISO, (2, 2), (2, 2), ApproximationSchedule.default(),
                          GridSpec(2, 16.0, 128))
    ok = record("C6 denseness (final <= 1% of initial)", rep.final.relative <= 0.01,
                f"final relative error {rep.final.relative:.3e}")
    assert ok


def test_c7_interpolation():
    grid = GridSpec(2, 4.0, 16)
    families = [
        [((1.0, 2.0), 0.5), ((3.0, 4.0), 0.5)],
        [((1.5, np.inf), 0.3), ((6.0, 1.2), 0.7)],
    ]
    rng = np.random.default_rng(7)
    violations = 0
    for k in range(100):
        vals = rng.standard_normal(grid.shape) * np.exp(rng.uniform(-5, 5))
        g = GridFunction(grid, vals)
        for fam in families:
            violations += not interpolation_check(g, fam, rel_slack=1e-10).holds
    ok = record("C7 interpolation inequality", violations == 0, f"{violations} violations in 200 checks")
    assert ok


def test_c8_finite_differences():
    rng = np.random.default_rng(8)
    worst_poly = 0.0
    for ell in (1, 2, 3):
        coeffs = {}
        for _ in range(8):
            k = rng.multinomial(rng.integers(0, 2 * ell), [0.5, 0.5])
            coeffs[tuple(int(v) for v in k)] = rng.standard_normal()
        p = polynomial(coeffs, 2)
        # unit-box samples: the rounding floor grows like eps * 4^l * |x + l t|^(2l-1)
        x = rng.uniform(-1, 1, (100, 2))
        t = rng.uniform(-1, 1, (100, 2))
        worst_poly = max(worst_poly, float(np.abs(centered_diff(p, t, 2 * ell, x)).max()),
                         float(np.abs(noncentered_diff(p, t, 2 * ell, x)).max()))
    f = gaussian(0.7, 2)
    worst_shift = 0.0
    for ell in (1, 2, 3):
        x = rng.uniform(-3, 3, (100, 2))
        t = rng.uniform(-1.5, 1.5, (100, 2))
        a = centered_diff(f, t, 2 * ell, x)
        b = noncentered_diff(f, t, 2 * ell, x + ell * t)
        worst_shift = max(worst_shift, float(np.abs(a - b).max()))
    ok = record("C8 finite differences (1e-10 / 1e-12)", worst_poly <= 1e-10 and worst_shift <= 1e-12,
                f"annihilation {worst_poly:.2e}, shift identity {worst_shift:.2e}")
    assert ok


def test_c9_lemma_suite():
    reports = default_suite()
    decay = [r for r in reports if r.name == "I_decay"]
    slopes_ok = len(decay) == 3 and all(r.applicable and abs(r.slope - r.predicted) <= 0.15
                                        for r in decay)
    stable = [r for r in reports if r.name in ("diff_norm_bound", "moment_inequality")]
    stable_ok = bool(stable) and all(r.extra["max_ratio_doubled"] <= 2 * r.max_ratio for r in stable)
    all_pass = all(r.passed for r in reports)
    detail = ", ".join(f"{r.slope:.3f} vs {r.predicted:.3f}" for r in decay)
    ok = record("C9 lemma suite", slopes_ok and stable_ok and all_pass,
                f"I slopes {detail}; {sum(r.passed for r in reports)}/{len(reports)} probes pass")
    assert ok


STUDIES = [
    ["approx", "study", "--alpha", "1,1.5", "--p", "2,2", "--r", "2,2"],
    ["potential", "invert", "--alpha", "1,1.5", "--sizes", "4:16,6:24"],
    ["hsi", "converge", "--alpha", "1,1.5", "--point", "0,0", "--point", "0.5,-0.5", "--count", "4"],
    ["hsi", "apply", "--alpha", "0.5", "--point", "0", "--point", "1", "--eps", "0,0.25"],
]


def _study(args, threads, path):
    env = dict(os.environ, ANIHSI_THREADS=str(threads))
    subprocess.run([sys.executable, "-m", "anihsi.cli", *args, "--out", str(path)], env=env,
                   check=True, capture_output=True)
    return path.read_bytes()


def test_c10_determinism(tmp_path):
    same = 0
    for i, args in enumerate(STUDIES):
        outs = [_study(args, th, tmp_path / f"{i}_{th}_{rep}.csv") for th in (1, 4) for rep in (0, 1)]
        same += all(o == outs[0] for o in outs)
    ok = record("C10 determinism (byte-identical CSV)", same == len(STUDIES),
                f"{same}/{len(STUDIES)} studies identical across ANIHSI_THREADS 1, 4 and reruns")
    assert ok

