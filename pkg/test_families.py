import pytest

from src.families import (
    CASE_I, CASE_II, FamilyError, PrimeCase, ProgressionFamily, classify, max_level,
    ramanujan_families, sellers_families, theorem_families, verify_family, verify_families,
)
from src.partitions import p_table, pend_bruteforce, pend_table
from src.series import PARITY, Backend, reduce


@pytest.fixture(scope="module")
def parities():
    return pend_table(100_000, PARITY)


def test_classify_small_primes(parities):
    five = classify(5, parities)
    assert (five.delta, five.pend_delta_parity, five.case_label) == (3, 0, CASE_II)
    seven = classify(7, parities)
    assert (seven.delta, seven.pend_delta_parity, seven.case_label) == (6, 0, CASE_II)
    eleven = classify(11, parities)
    assert eleven.delta == 15
    assert eleven.pend_delta_parity == pend_bruteforce(15) % 2
    assert eleven.case_label == (CASE_I if eleven.pend_delta_parity else CASE_II)


@pytest.mark.parametrize("p", [2, 3, 4, 9, 25])
def test_classify_rejects_bad_primes(parities, p):
    with pytest.raises(FamilyError):
        classify(p, parities)


def test_case_two_families_for_five():
    families = theorem_families(PrimeCase(5, 3, 0, CASE_II), 0)
    zero = [f for f in families if not f.is_point]
    points = [f for f in families if f.is_point]
    assert {f.modulus for f in zero} == {15625}
    assert [f.residue for f in zero] == [5078, 8203, 11328, 14453]
    assert all(f.expected_residue == 0 and f.check_modulus == 2 for f in zero)
    assert [f.residue for f in points] == [0, 1953]
    assert all(f.expected_residue == 1 for f in points)
    assert zero[1].provenance == "case-ii,k=0,j=2"


def test_case_one_families():
    families = theorem_families(PrimeCase(7, 6, 1, CASE_I), 0)
    zero = [f for f in families if not f.is_point]
    assert {f.modulus for f in zero} == {2401}
    assert [f.residue for f in zero] == [343 * j + 300 for j in range(1, 7)]
    assert 300 not in [f.residue for f in zero]
    assert [f.residue for f in families if f.is_point] == [0, 300]


def test_max_level():
    case = PrimeCase(5, 3, 0, CASE_II)
    assert max_level(case, 10 ** 6) == 0
    assert max_level(case, 5 ** 12) == 1
    assert max_level(case, 10) == 0


def test_sellers_families():
    pairs = [(f.modulus, f.residue) for f in sellers_families(3)]
    assert pairs == [(27, 19), (27, 19), (243, 172), (2187, 1549)]
    assert all(f.check_modulus == 3 and f.expected_residue == 0 for f in sellers_families(3))
    with pytest.raises(FamilyError):
        sellers_families(0)


def test_sellers_congruence_holds():
    table = pend_table(10_000, Backend.residue(3))
    report = verify_family(ProgressionFamily(27, 19, 3, 0, 'sellers,27n+19'), table)
    assert report.status == 'verified'
    assert report.n_checked == 370
    assert report.max_index == 27 * 369 + 19


def test_theorem_family_report_matches_table(parities):
    family = ProgressionFamily(15625, 5078, 2, 0, 'case-ii,k=0,j=1')
    report = verify_family(family, parities)
    assert report.n_checked == 7
    assert report.max_index == 5078 + 6 * 15625
    odd = [(i, 1) for i in range(5078, 100_000, 15625) if parities[i] == 1]
    assert report.counterexamples == odd
    assert report.status == ('refuted' if odd else 'verified')


def test_point_families(parities):
    origin = verify_family(ProgressionFamily(None, 0, 2, 1, 'case-ii,point,k=0'), parities)
    assert origin.status == 'verified'
    assert origin.n_checked == 1
    point = verify_family(ProgressionFamily(None, 1953, 2, 1, 'case-ii,point,k=1'), parities)
    assert point.n_checked == 1
    assert (point.status == 'verified') == (parities[1953] == 1)


def test_out_of_range_family_is_insufficient(parities):
    report = verify_family(ProgressionFamily(10 ** 7, 2 * 10 ** 6, 2, 0, 'far'), parities)
    assert report.status == 'insufficient-range'
    assert report.n_checked == 0
    assert report.to_dict()['max_index'] is None


def test_backends_give_identical_reports():
    family = ProgressionFamily(27, 19, 2, 0, 'probe')
    parity = verify_family(family, pend_table(3000, PARITY))
    reduced = verify_family(family, reduce(pend_table(3000).series, 2))
    exact = verify_family(family, pend_table(3000))
    assert parity.to_dict() == reduced.to_dict() == exact.to_dict()


def test_modulus_mismatch_is_rejected(parities):
    with pytest.raises(FamilyError):
        verify_family(ProgressionFamily(27, 19, 3, 0, 'sellers'), parities)


def test_verify_families_sorts_reports(parities):
    families = theorem_families(PrimeCase(5, 3, 0, CASE_II), 0)
    reports = verify_families(list(reversed(families)), parities, max_workers=3, show_progress=False)
    keys = [r.family.sort_key() for r in reports]
    assert keys == sorted(keys)
    assert [r.to_dict() for r in reports] == [verify_family(f, parities).to_dict()
                                              for f in sorted(families, key=lambda f: f.sort_key())]


def test_ramanujan_congruences_hold():
    for family in ramanujan_families():
        table = p_table(3000, Backend.residue(family.check_modulus))
        report = verify_family(family, table)
        assert report.status == 'verified', family.provenance
        assert report.n_checked > 0


def test_report_json_shape():
    report = verify_family(ProgressionFamily(27, 19, 3, 0, 'sellers,27n+19'), pend_table(100, Backend.residue(3)))
    assert list(report.to_dict()) == ['A', 'B', 'mod', 'expected', 'status', 'n_checked', 'max_index',
                                      'counterexamples', 'provenance']
