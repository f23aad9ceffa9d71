"""Smoke tests for the Python bindings against the C++ core."""

import math

import pytest

import mpbvp

TWO_POINT = """
{
  "n": 1,
  "mode": "linear",
  "A": [["1"]],
  "f": ["1"],
  "points": [
    {"t": 0.0, "F": [[1.0]]},
    {"t": 1.0, "F": [[1.0]]}
  ],
  "alpha": [0.0]
}
"""

QUASILINEAR = """
{
  "n": 1,
  "mode": "quasilinear",
  "A": [["-1"]],
  "f": ["0.1*sin(x1)+1"],
  "points": [
    {"t": 0.0, "F": [[1.0]]},
    {"t": 1.0, "F": [[1.0]]}
  ],
  "alpha": [1.0],
  "B": [["-1"]]
}
"""

LAYER = """
{
  "n": 1,
  "mode": "linear",
  "A": [["-1"]],
  "f": ["t"],
  "points": [{"t": 0.0, "F": [[1.0]]}],
  "alpha": [2.0]
}
"""


def test_two_point_solve():
    p = mpbvp.problem_from_json(TWO_POINT)
    assert p.n == 1 and p.m == 2 and p.mode == "linear"
    sol = mpbvp.solve(p)
    coeff = 2.0 / (1.0 + math.e)
    for i in range(101):
        t = i / 100.0
        assert abs(sol(t)[0] - (coeff * math.exp(t) - 1.0)) < 1e-8
    # anchored-at-0 split: the representation constant equals x(0)
    assert abs(sol.C[0] - (coeff - 1.0)) < 1e-8
    assert sol.residuals["ode_residual_max"] < 1e-6
    assert sol.residuals["bc_residual"] < 1e-8
    assert len(sol.sample(11)) == 11


def test_split_invariance():
    p = mpbvp.problem_from_json(TWO_POINT)
    a = mpbvp.solve(p, split="default")
    b = mpbvp.solve(p, split="uniform")
    diff = max(abs(a(i / 50.0)[0] - b(i / 50.0)[0]) for i in range(51))
    assert diff < 1e-7


def test_picard_quasilinear():
    p = mpbvp.problem_from_json(QUASILINEAR)
    sol, trace = mpbvp.solve_picard(p)
    assert trace["converged"]
    assert sol.residuals["ode_residual_max"] < 1e-7


def test_spectrum_verdicts():
    ok = mpbvp.problem_from_json(
        """{"n": 2, "A": [["-1", "0"], ["0", "1"]], "f": ["0", "0"],
            "points": [{"t": 0.0, "F": [[1, 0], [0, 0]]},
                       {"t": 1.0, "F": [[0, 0], [0, 1]]}],
            "alpha": [0.0, 0.0]}"""
    )
    report = mpbvp.spectrum(ok)
    assert report["overall"]
    names = {c["name"] for c in report["conditions"]}
    assert "lambda_nonzero" in names and "integral_negative" in names


def test_sweep_layers_shrink():
    p = mpbvp.problem_from_json(LAYER)
    entries = mpbvp.sweep(p, [0.1, 0.01])
    assert [e["status"] for e in entries] == ["solved", "solved"]
    assert entries[1]["layers"][0]["radius"] < entries[0]["layers"][0]["radius"]
    refused = mpbvp.sweep(p, [1e-6])
    assert refused[0]["status"] == "refused"


def test_eigenvalues():
    eig = sorted(mpbvp.eigenvalues([[2.0, 1.0], [1.0, 2.0]]), key=lambda z: z.real)
    assert abs(eig[0] - 1.0) < 1e-9
    assert abs(eig[1] - 3.0) < 1e-9


def test_collocation_oracle():
    p = mpbvp.problem_from_json(TWO_POINT)
    nodes = mpbvp.collocation(p, 400)
    sol = mpbvp.solve(p)
    worst = max(
        abs(nodes[i][0] - sol(i / 400.0)[0]) for i in range(401)
    )
    assert worst < 1e-4


def test_expression_evaluation():
    assert mpbvp.evaluate_expression("2*t+1", {"t": 2.0}) == 5.0
    with pytest.raises(mpbvp.SolverError):
        mpbvp.evaluate_expression("1/t", {"t": 0.0})


def test_ill_posed_raises():
    p = mpbvp.problem_from_json(
        """{"n": 1, "A": [["0"]], "f": ["0"],
            "points": [{"t": 0.0, "F": [[1.0]]}, {"t": 1.0, "F": [[-1.0]]}],
            "alpha": [1.0]}"""
    )
    with pytest.raises(mpbvp.SolverError):
        mpbvp.solve(p)
