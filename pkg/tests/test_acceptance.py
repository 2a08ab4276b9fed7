"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line per criterion (run with ``-s`` to see
them live).  Criterion 11 is exploratory: it reports refinement trends and
checks only the qualitative verdicts, not a numeric threshold.
"""

import math

import pytest

from coneheat.experiments import (
    run_estimate,
    run_exponent_anchors,
    run_kernel_bound,
    run_kernel_consistency,
    run_kernel_images,
    run_time_integral,
    run_gaussian_halfspace,
    run_gaussian_wedge,
    run_norm_equivalence,
    run_regularity,
    run_sharpness,
    run_solver_crossval,
    run_window_table,
)


def _report(number: int, title: str, results) -> None:
    if not isinstance(results, (list, tuple)):
        results = [results]
    ok = all(r.passed for r in results)
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:02d}: {title}")
    for r in results:
        for c in r.checks:
            print(c.line())
    assert ok, f"criterion {number} failed"


def test_criterion_01_exponent_anchors():
    _report(1, "exponent anchors (wedge pi/kappa, hemisphere cap)",
            run_exponent_anchors())


def test_criterion_02_window_logic():
    _report(2, "theta = Theta feasibility table matches hand derivation",
            run_window_table())


def test_criterion_03_kernel_vs_images():
    _report(3, "series kernel matches reflection kernel at opening pi (< 1e-6)",
            run_kernel_images(n_samples=1000))


def test_criterion_04_kernel_internal_consistency():
    _report(4, "kernel symmetry, domination, Chapman-Kolmogorov, mass, decay",
            run_kernel_consistency())


def test_criterion_05_kernel_envelope_bound():
    results = [run_kernel_bound(kappa) for kappa in (math.pi, 1.5 * math.pi)]
    _report(5, "envelope-bound sup finite and stable under sample doubling",
            results)


def test_criterion_06_integral_bound_oracles():
    _report(6, "integral-bound oracles (time integral, plane, wedge)",
            [run_time_integral(), run_gaussian_halfspace(), run_gaussian_wedge()])


def test_criterion_07_solver_cross_validation():
    _report(7, "kernel convolution vs implicit differences (< 2%), "
               "manufactured recovery (< 1%)", run_solver_crossval())


def test_criterion_08_norm_equivalence():
    _report(8, "shell-decomposition norm equivalent to graded norm "
               "(12-field suite, refinement-stable)", run_norm_equivalence())


def test_criterion_09_main_estimate():
    results = [run_estimate(math.pi, 2.0, 2.0, 2.0),
               run_estimate(1.5 * math.pi, 2.0, 2.0, 2.0)]
    _report(9, "main-estimate ratio: finite, refinement-stable (< 10%), "
               "dilation-invariant (< 5%)", results)


def test_criterion_10_regularity_estimate():
    _report(10, "derivative-recovery ratio bounded, refinement-stable, "
                "horizon-independent", run_regularity())


def test_criterion_11_sharpness_probe():
    probe = run_sharpness(1.9 * math.pi, 5.0, 2.0, 2.0)
    controls = [run_sharpness(math.pi, 2.0, 2.0, 2.0),
                run_sharpness(1.5 * math.pi, 2.0, 2.0, 2.0)]
    print(f"\n[TREND] criterion 11: sharpness probe (exploratory)")
    print(f"  infeasible kappa=1.9pi, p=5: verdict={probe.info['verdict']}"
          f" ratios={[round(v, 4) for v in probe.info['ratios']]}")
    for ctrl, kappa in zip(controls, ("pi", "3pi/2")):
        print(f"  feasible control kappa={kappa}: verdict={ctrl.info['verdict']}"
              f" ratios={[round(v, 4) for v in ctrl.info['ratios']]}")
    assert probe.info["verdict"] == "growing"
    assert all(c.info["verdict"] == "flat" for c in controls)
