import pytest

from src.series import (
    A_QUOTIENT, EXACT, PARITY, PEND_QUOTIENT, Backend, EtaQuotient, QuotientParseError, Series,
    SeriesError, dilate, divide, eta_series, expand_quotient, first_mismatch, inverse, mul, one,
    parity_factors, parse_quotient, reduce,
)


def naive_eta(k, order):
    coeffs = [1] + [0] * (order - 1)
    n = 1
    while k * n < order:
        e = k * n
        coeffs[e:] = [x - y for x, y in zip(coeffs[e:], coeffs[:order - e])]
        n += 1
    return coeffs


def exact(values, order=None):
    return Series.from_coefficients(values, EXACT, order)


def test_eta_series_examples():
    assert eta_series(1, 8).coefficients() == [1, -1, -1, 0, 0, 1, 0, 1]
    assert eta_series(2, 5).coefficients() == [1, 0, -1, 0, -1]


@pytest.mark.parametrize("k", range(1, 13))
@pytest.mark.parametrize("order", [1, 17, 200])
def test_eta_series_matches_naive_product(k, order):
    assert eta_series(k, order).coefficients() == naive_eta(k, order)


def test_eta_series_rejects_empty_truncation():
    with pytest.raises(SeriesError):
        eta_series(1, 0)
    with pytest.raises(SeriesError):
        eta_series(0, 5)


def test_mul_telescopes():
    geometric = exact([1] * 10)
    assert mul(exact([1, -1], 10), geometric).coefficients() == [1] + [0] * 9


def test_mul_truncates_to_shorter_operand():
    assert mul(exact([1, 1, 1, 1, 1]), exact([1, 1, 1])).order == 3


def test_cube_of_eta():
    f1 = eta_series(1, 7)
    assert mul(mul(f1, f1), f1).coefficients() == [1, -3, 0, 5, 0, 0, -7]


def test_mul_is_commutative_and_associative():
    a = exact([1, 2, -1, 0, 3, 5, 0, 1])
    b = exact([2, 0, 1, -4, 0, 0, 7, 1])
    c = eta_series(3, 8)
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, one(8)) == a


def test_mul_rejects_backend_mismatch():
    with pytest.raises(SeriesError):
        mul(eta_series(1, 5), eta_series(1, 5, PARITY))


def test_inverse_of_eta_gives_partition_numbers():
    assert inverse(eta_series(1, 7)).coefficients() == [1, 1, 2, 3, 5, 7, 11]
    assert inverse(exact([1])).coefficients() == [1]
    f1 = eta_series(1, 5)
    assert inverse(mul(mul(f1, f1), f1))[2] == 9


@pytest.mark.parametrize("backend", [EXACT, PARITY, Backend.residue(7), Backend.residue(2 ** 61 - 1)])
def test_eta_times_inverse_is_one(backend):
    f1 = eta_series(1, 300, backend)
    assert mul(f1, inverse(f1)) == one(300, backend)


def test_inverse_rejects_non_units():
    with pytest.raises(SeriesError):
        inverse(exact([2, 1, 0]))
    with pytest.raises(SeriesError):
        inverse(Series.from_coefficients([2, 1, 0], Backend.residue(4)))
    with pytest.raises(SeriesError):
        inverse(Series.from_coefficients([0, 1], PARITY))


def test_divide_without_kernel_bound():
    # coefficients 5 and 7 times a modulus near 2**62 overflow the compiled path
    backend = Backend.residue(2 ** 62 - 57)
    a = Series.from_coefficients([3, 1, 4, 1, 5, 9, 2, 6], backend)
    b = Series.from_coefficients([1, 5, 0, 7, 0, 0, 0, 0], backend)
    assert divide(mul(a, b), b) == a
    assert mul(divide(a, b), b) == a


def test_expand_quotient_examples():
    assert expand_quotient(PEND_QUOTIENT, 8).coefficients() == [1, 1, 1, 2, 3, 4, 6, 8]
    assert expand_quotient(A_QUOTIENT, 4).coefficients() == [1, 3, 9, 20]
    assert expand_quotient(EtaQuotient(((1, 1),)), 3).coefficients() == [1, -1, -1]
    assert expand_quotient("1:0", 3).coefficients() == [1, 0, 0]


def test_expand_quotient_ignores_factor_order():
    shuffled = parse_quotient("6:-1,1:-1,12:1,4:-1,2:1")
    assert expand_quotient(shuffled, 50) == expand_quotient(PEND_QUOTIENT, 50)


def test_reduce_examples():
    assert reduce(exact([1, 3, 9, 20]), 2).coefficients() == [1, 1, 1, 0]
    assert reduce(exact([1, 1, 1, 2, 3, 4, 6, 8]), 2).coefficients() == [1, 1, 1, 0, 1, 0, 0, 0]
    x = reduce(exact([5, -7, 12, 100, -1]), 6)
    assert x.coefficients() == [5, 5, 0, 4, 5]
    assert reduce(x, 6) == x


def test_reduce_rejects_small_or_incompatible_moduli():
    with pytest.raises(SeriesError):
        reduce(exact([1, 2]), 1)
    with pytest.raises(SeriesError):
        reduce(Series.from_coefficients([1, 2], Backend.residue(9)), 2)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 12])
@pytest.mark.parametrize("order", [10, 97, 400])
def test_square_of_eta_is_dilation_mod_2(k, order):
    f = eta_series(k, order)
    assert reduce(mul(f, f), 2) == reduce(eta_series(2 * k, order), 2)


@pytest.mark.parametrize("modulus", [2, 3, 7, 1000003, 2 ** 61 - 1])
@pytest.mark.parametrize("quotient", [PEND_QUOTIENT, A_QUOTIENT])
def test_exact_then_reduce_matches_residue_backend(quotient, modulus):
    expected = reduce(expand_quotient(quotient, 400), modulus)
    assert expand_quotient(quotient, 400, Backend.residue(modulus)) == expected


@pytest.mark.parametrize("quotient", [PEND_QUOTIENT, A_QUOTIENT, parse_quotient("2:5,1:-2,4:-2")])
def test_parity_backend_matches_exact(quotient):
    assert expand_quotient(quotient, 1000, PARITY) == expand_quotient(quotient, 1000).to_parity()


def test_parity_normal_form():
    assert parity_factors(PEND_QUOTIENT, 100) == [1, 4, 6, 8, 16, 32, 64]
    assert parity_factors(A_QUOTIENT, 100) == [1, 4, 6, 8, 16, 32, 64]
    assert parity_factors(parse_quotient("3:2"), 100) == [6]
    assert parity_factors(parse_quotient("200:-1"), 100) == []


def test_parse_quotient_merges_and_sorts():
    assert parse_quotient(" 2:1, 12:1,1:-1 ,4:-1,6:-1") == PEND_QUOTIENT
    assert parse_quotient("1:2,1:-1").factors == ((1, 1),)
    assert parse_quotient("1:0").factors == ()
    assert str(PEND_QUOTIENT) == "1:-1,2:1,4:-1,6:-1,12:1"


@pytest.mark.parametrize("text, position", [
    ("", 0),
    ("1:1,x", 4),
    ("1:1, 0:2", 5),
    ("2:", 0),
])
def test_parse_quotient_reports_position(text, position):
    with pytest.raises(QuotientParseError) as excinfo:
        parse_quotient(text)
    assert excinfo.value.position == position


def test_first_mismatch():
    assert first_mismatch(eta_series(1, 50), eta_series(1, 50)) is None
    assert first_mismatch(exact([1, 2, 3]), exact([1, 2, 4])) == 2
    assert first_mismatch(eta_series(1, 40, PARITY), eta_series(2, 40, PARITY)) == 1


def test_dilate():
    assert dilate(exact([1, 2, 3, 4]), 2).coefficients() == [1, 0, 2, 0]
    assert dilate(eta_series(1, 30, PARITY), 3) == eta_series(3, 30, PARITY)


def test_backend_validation():
    with pytest.raises(SeriesError):
        Backend('residue', 1)
    with pytest.raises(SeriesError):
        Backend('floating')
    assert Backend('parity').modulus == 2
    assert str(Backend.residue(3)) == "residue(3)"
