from math import factorial

import pytest
from hypothesis import given, strategies as st

from planarcc.bounds import (IndexPolynomial, ParityError, bound_table, bouquet_poly,
                             divide_by_one_plus_t, equivariant_morse_check, first_palmore_poly,
                             ignored_palmore_poly, mccord_poly, morse_inequality_check)

# golden rows, index by index
TABLES = {
    3: {"bouquet": [1, 2], "first_palmore": [2, 3], "mccord": [2, 3], "ignored_palmore": [2, 3]},
    4: {"bouquet": [1, 5, 6], "first_palmore": [1, 11, 12], "mccord": [2, 12, 12],
        "ignored_palmore": [6, 16, 12]},
    5: {"bouquet": [1, 9, 26, 24], "first_palmore": [1, 9, 62, 60],
        "mccord": [2, 20, 72, 60], "ignored_palmore": [24, 90, 120, 60]},
}
TOTALS = {3: (3, 5, 5, 5), 4: (12, 24, 26, 34), 5: (60, 132, 154, 294)}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_table_rows(n):
    table = bound_table(n)
    for name, coeffs, total in table.rows():
        assert coeffs == TABLES[n][name], name
        assert total == sum(TABLES[n][name])
    assert table.totals == TOTALS[n]


def test_bouquet_is_product():
    # (1+2t)(1+3t)(1+4t) by hand
    assert bouquet_poly(5).coeffs == (1, 9, 26, 24)
    assert bouquet_poly(2).coeffs == (1,)


@pytest.mark.parametrize("n", range(3, 13))
def test_closed_forms(n):
    assert first_palmore_poly(n).total == (3 * n - 4) * factorial(n - 1) // 2
    ip = ignored_palmore_poly(n)
    assert ip.total == factorial(n - 2) * (2 ** (n - 1) * (n - 2) + 1)
    assert ip[0] == factorial(n - 1)
    assert ip[1] == n * (n - 2) * factorial(n - 2)
    assert ip[n - 2] == factorial(n) // 2
    assert bouquet_poly(n).total == factorial(n) // 2
    assert mccord_poly(n)[n - 2] == factorial(n) // 2


def test_six_bodies_total():
    assert ignored_palmore_poly(6).total == 24 * (32 * 4 + 1) == 3096
    assert first_palmore_poly(6).total == 14 * 120 // 2


def test_large_n_exact():
    p = ignored_palmore_poly(20)
    assert all(isinstance(c, int) for c in p.coeffs)
    assert p.total == factorial(18) * (2 ** 19 * 18 + 1)
    assert p[18] == factorial(20) // 2


@pytest.mark.parametrize("bad", [2, 1, 0, -3])
def test_bound_table_rejects_small_n(bad):
    with pytest.raises(ValueError):
        bound_table(bad)


def test_bound_table_rejects_non_int():
    with pytest.raises(TypeError):
        bound_table(4.0)
    with pytest.raises(TypeError):
        bound_table(True)


def test_index_polynomial_validation():
    with pytest.raises(ValueError):
        IndexPolynomial([1, -1])
    with pytest.raises(TypeError):
        IndexPolynomial([1.5])
    assert IndexPolynomial([0, 0]).is_zero
    assert IndexPolynomial([1, 2, 0]).coeffs == (1, 2)
    assert IndexPolynomial([1, 2])[7] == 0


def test_division_examples():
    assert divide_by_one_plus_t([1, 2, 1]) == ([1, 1], 0)
    assert divide_by_one_plus_t([1, 0, 1]) == ([-1, 1], 2)
    assert divide_by_one_plus_t([0]) == ([0], 0)


def _pad(v, size):
    return list(v) + [0] * (size - len(v))


coeff_lists = st.lists(st.integers(-50, 50), min_size=1, max_size=8)


@given(coeff_lists)
def test_division_reconstructs(coeffs):
    q, rem = divide_by_one_plus_t(coeffs)
    rebuilt = [0] * (len(q) + 1)
    for k, c in enumerate(q):
        rebuilt[k] += c
        rebuilt[k + 1] += c
    rebuilt[0] += rem
    size = max(len(rebuilt), len(coeffs))
    assert _pad(rebuilt, size) == _pad(coeffs, size)


@given(st.lists(st.integers(0, 30), min_size=1, max_size=6),
       st.lists(st.integers(0, 30), min_size=1, max_size=5))
def test_morse_check_accepts_poincare_plus_multiple(p, s):
    # M = P + (1+t)S with S >= 0 must always pass
    m = [0] * (max(len(p), len(s) + 1))
    for k, c in enumerate(p):
        m[k] += c
    for k, c in enumerate(s):
        m[k] += c
        m[k + 1] += c
    check = morse_inequality_check(m, p)
    assert check.passed
    size = max(len(check.s_poly.coeffs), len(s))
    assert _pad(list(check.s_poly), size) == _pad(s, size)


def test_morse_check_examples():
    assert morse_inequality_check([2, 3], [1, 2]).passed
    assert morse_inequality_check([6, 24, 20], [1, 5, 6]).passed
    assert not morse_inequality_check([1, 0, 12], [1, 5, 6]).passed
    assert not morse_inequality_check([1, 2, 1], [1, 2, 2]).passed


def test_equivariant_check():
    check = equivariant_morse_check([6, 24, 8], 4)
    assert check.passed
    assert list(check.s_poly) == [2, 4]
    with pytest.raises(ParityError):
        equivariant_morse_check([6, 23, 8], 4)


def test_mccord_row_is_per_index_bound_of_known_census():
    equal4 = [6, 24, 20]
    assert all(c >= b for c, b in zip(equal4, mccord_poly(4).padded(3)))
