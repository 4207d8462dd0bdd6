"""Exit criteria, one test per criterion (criterion 8 split by family).

Each test records a single PASS/FAIL line that is printed in the pytest
terminal summary under "acceptance criteria".
"""
import math
import time

import numpy as np
import pytest

from circvoi import oracle
from circvoi.cli import main
from circvoi.engine import (
    beta_for_info,
    curve_shape,
    default_beta_grid,
    evaluate,
    gibbs_channel,
    value_at_info,
    voi_curve,
)
from circvoi.measure import mutual_information
from circvoi.models import (
    FAMILIES,
    brute_force_Z,
    build_problem,
    circle_gamma_prime,
    closed_form_Z,
    csch,
    hartley_table,
    limit_Z_unit_linear,
    maxent_cost,
)

pytestmark = pytest.mark.acceptance

BUNDLED = [f for f in FAMILIES if f != "custom"]
CLOSED = ["circle_circumference_n_linear", "unit_circle_linear", "unit_circle_log", "one_way_line_linear"]


def test_closed_form_fidelity(criterion):
    start = time.perf_counter()
    worst = 0.0
    ok = True
    for family in CLOSED:
        for n in (4, 8, 16, 64):
            for beta in (0.01, 0.1, 1.0, 5.0, 20.0):
                cf, bf = closed_form_Z(family, beta, n), brute_force_Z(family, beta, n)
                rel = abs(cf - bf) / abs(bf)
                tol = 1e-9 if family == "unit_circle_log" and beta == 20.0 else 1e-12
                ok &= rel < tol
                worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    criterion("1", ok, f"closed form vs brute force, max rel dev {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_information_identity(criterion):
    start = time.perf_counter()
    grid = default_beta_grid()
    worst = 0.0
    for family in BUNDLED:
        problem = build_problem(family, 8)
        for beta in grid:
            gamma, gamma_prime, _, _ = evaluate(problem, beta)
            sol = gibbs_channel(problem.prior, problem.ref, problem.cost, beta)
            worst = max(worst, abs(beta * gamma_prime - gamma - mutual_information(sol.channel)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 5.0
    criterion("2", ok, f"|beta*Gamma' - Gamma - I| max {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_oracle_equivalence(criterion):
    start = time.perf_counter()
    grid = default_beta_grid(count=49)
    dev = unif = 0.0
    for family in ("circle_circumference_n_linear", "unit_circle_linear"):
        problem = build_problem(family, 8)
        for beta, res in zip(grid, oracle.curve(problem.prior, problem.cost, grid)):
            _, _, e_cost, info = evaluate(problem, beta)
            dev = max(dev, abs(res.info_nats - info), abs(res.expected_cost - e_cost))
            unif = max(unif, float(np.max(np.abs(res.final_ref_u - 1 / 8))))
    elapsed = time.perf_counter() - start
    ok = dev < 1e-6 and unif < 1e-9 and elapsed < 10.0
    criterion("3", ok, f"engine vs oracle max dev {dev:.2e}, q uniform within {unif:.2e}, {elapsed:.2f}s")
    assert ok


def test_maxent_anchors(criterion):
    unit = max(abs(maxent_cost("unit_circle_linear", n) - math.pi / 2) for n in range(2, 2**10 + 1, 2))
    circ = max(abs(maxent_cost("circle_circumference_n_linear", n) - n / 4) for n in range(2, 2**10 + 1, 2))
    log_gap = abs(maxent_cost("unit_circle_log", 2**16) - (math.log(math.pi) - 1))
    ok = unit < 1e-12 and circ < 1e-12 and log_gap < 1e-3
    criterion("4", ok, f"pi/2 dev {unit:.1e}, n/4 dev {circ:.1e}, log limit gap {log_gap:.2e}")
    assert ok


def test_large_n_limits(criterion):
    n = 2**14
    z_gap = max(abs(closed_form_Z("unit_circle_linear", b, n) - limit_Z_unit_linear(b)) for b in (0.1, 1.0, 10.0))
    g_gap = abs(circle_gamma_prime(n, 1.0) + csch(1.0))
    ok = z_gap < 1e-3 and g_gap < 1e-3
    criterion("5", ok, f"Z limit gap {z_gap:.2e}, Gamma' vs -csch gap {g_gap:.2e}")
    assert ok


def test_hartley_dots(criterion):
    values = [round(float(p.value), 12) for p in hartley_table("circle_circumference_n_linear", 8)]
    ok = np.allclose(values, [1.0, 1.5, 2.0], atol=1e-12)
    margin = math.inf
    for n in (8, 16):
        problem = build_problem("circle_circumference_n_linear", n)
        for pt in hartley_table("circle_circumference_n_linear", n):
            margin = min(margin, value_at_info(problem, pt.info_nats) - pt.value)
    ok &= margin >= -1e-9
    criterion("6", ok, f"Hartley values {values}, min Shannon-minus-Hartley margin {margin:.3e}")
    assert ok


ORDERINGS = {
    "unit_circle_linear": ((8, 16, 1024), -1),
    "unit_circle_log": ((8, 16, 1024), +1),
    "unit_circle_root": ((8, 16, 1024), -1),
    "one_way_line_linear": ((8, 16, 1024), +1),
}


def test_figure_orderings(criterion):
    start = time.perf_counter()
    ok = True
    bad = []
    for family, (ns, sign) in ORDERINGS.items():
        problems = [build_problem(family, n) for n in ns]
        maxent = [maxent_cost(family, n) for n in ns]
        for bits in (0.5, 1.0, 2.0):
            target = bits * math.log(2)
            betas = [beta_for_info(p, target) for p in problems]
            vals = [m - evaluate(p, b)[2] for m, p, b in zip(maxent, problems, betas)]
            if not np.all(sign * np.diff(vals) > 0):
                ok = False
                bad.append((family, bits))
            if family == "unit_circle_root":
                # no closed form: confirm the generic-path points with the oracle
                for p, b in zip(problems[:2], betas[:2]):
                    res = oracle.solve(p.prior, p.cost, b)
                    _, _, e_cost, info = evaluate(p, b)
                    ok &= abs(res.info_nats - info) < 1e-8 and abs(res.expected_cost - e_cost) < 1e-8
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    criterion("7", ok, f"orderings at 0.5/1/2 bits hold for all four families, {elapsed:.2f}s" if ok else f"violations {bad}")
    assert ok


@pytest.mark.parametrize("family", BUNDLED)
def test_curve_shape(criterion, family):
    grid = default_beta_grid()
    failures = []
    for n in (8, 16):
        problem = build_problem(family, n)
        shape = curve_shape(voi_curve(problem, grid, base="nats"))
        maxent = maxent_cost(family, n)
        checks = {
            "V(0)=0": shape["value_at_zero"] == 0,
            "V nondecreasing": shape["min_value_step"] >= -1e-12,
            "V concave": shape["max_second_difference"] <= 1e-8,
            "V <= MaxEnt": shape["max_value"] <= maxent + 1e-9,
            "I <= ln n": shape["max_info_nats"] <= math.log(n) + 1e-9,
        }
        for name, passed in checks.items():
            if not passed:
                extra = f" (max V {shape['max_value']:.4f}, MaxEnt {maxent:.4f})" if name == "V <= MaxEnt" else ""
                failures.append(f"n={n} {name}{extra}")
    ok = not failures
    criterion(f"8.{family}", ok, "all shape checks hold at n=8,16" if ok else "; ".join(failures))
    assert ok, failures


def test_cli_determinism(criterion, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [main(["curve", "--model", "unit-circle-root", "--n", "16", "--out", str(p)]) for p in paths]
    ok = codes == [0, 0] and paths[0].read_bytes() == paths[1].read_bytes()
    criterion("9", ok, "two curve runs are byte-identical")
    assert ok
