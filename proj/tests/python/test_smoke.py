import math

import mpmath
import pytest
import sympy

import ddslab


def test_version_string():
    assert ddslab.__version__.startswith("ddslab ")


def test_kronecker_matches_sympy_jacobi():
    for a in range(-30, 31):
        for n in range(1, 80, 2):
            assert ddslab.kronecker(a, n) == sympy.jacobi_symbol(a, n)


def test_chi_and_reciprocity():
    assert ddslab.chi(5, 3) == -1
    for D in range(1, 60, 2):
        for N in range(1, 60, 2):
            if math.gcd(D, N) == 1:
                sign = -1 if (D % 4 == 3 and N % 4 == 3) else 1
                assert ddslab.chi(D, N) * ddslab.chi(N, D) == ddslab.eta(D, N) == sign


def test_group_and_region():
    assert ddslab.group_order() == 12
    assert len(set(ddslab.group_elements())) == 12
    assert ddslab.box_covered(-20, 20, 41)


@pytest.mark.parametrize("d,period", [(5, [0, 1, -1, -1, 1]), (-3, [0, 1, -1])])
def test_gl1_value_against_mpmath(d, period):
    for s in (0.5, 0.7 + 3j):
        ref = complex(mpmath.dirichlet(s, period))
        assert abs(ddslab.gl1_value(d, s) - ref) < 1e-8


def test_gl1_zeta():
    s = 0.5 + 14j
    assert abs(ddslab.gl1_value(1, s) - complex(mpmath.zeta(s))) < 1e-8


def test_rr_closed_form():
    r, s = 101, 0.5
    for a in (-1.5, 0.0, 0.7, 2.0):
        x = r ** -s
        prod = 1 - (a * a - 2 * a) * x**2 + (a * a - 2 * a) * x**4 - x**6
        L1 = (a + x**2) * x / prod
        L2 = (1 + a * x**2) / prod
        ref = (1 + 1 / r) * L1 / (1 / r + L2)
        assert abs(ddslab.rr_from_coefficient(a, r, s) - ref) < 1e-12
    assert ddslab.rr_monotone(101)


def test_z_pure_orders_agree():
    a = ddslab.z_pure(2.5, 2.5, 400)
    b = ddslab.z_pure(2.5, 2.5, 400, n_first=True)
    assert abs(a - b) < 1e-12


def test_meansquare_table():
    t = ddslab.exp_meansquare({"Y_ladder": "1, 21"})
    assert t["columns"][:2] == ["Y", "sum"]
    sums = [row[1] for row in t["rows"]]
    assert sums[1] >= sums[0] > 0


def test_cli_errors_are_single_line():
    code, out, err = ddslab.cli(["suite", "nosuch"])
    assert code != 0
    assert err.startswith("error E_USAGE:") and err.count("\n") == 1
    with pytest.raises(ddslab.DdslabError):
        ddslab.exp_meansquare({"field": "Q(sqrt5)"})


def test_fast_criterion():
    r = ddslab.run_criterion(1)
    assert r["pass"], r["detail"]
