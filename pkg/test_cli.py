import json

import pytest

from src.campaign import VerificationCampaign, aggregate_status
from src.cli import EXIT_INSUFFICIENT, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, expected", [
    (['pend', '0..7'], "1,1,1,2,3,4,6,8\n"),
    (['pend', '3', '--mod', '2'], "0\n"),
    (['pend', '0'], "1\n"),
    (['pend', '6', '--backend', 'parity'], "0\n"),
    (['expand', '1:1', '8'], "1,-1,-1,0,0,1,0,1\n"),
    (['expand', '2:1,12:1,1:-1,4:-1,6:-1', '8'], "1,1,1,2,3,4,6,8\n"),
    (['expand', '1:0', '3'], "1,0,0\n"),
    (['expand', '3:2,1:-3', '--N', '4'], "1,3,9,20\n"),
])
def test_value_listings(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    assert out == expected


def test_pend_formats(capsys):
    assert run(capsys, 'pend', '0..3', '--format', 'csv')[1] == "n,value\n0,1\n1,1\n2,1\n3,2\n"
    assert run(capsys, 'pend', '2..3', '--format', 'csv')[1] == "n,value\n2,1\n3,2\n"
    assert run(capsys, 'pend', '0..3', '--format', 'json')[1] == "[1, 1, 1, 2]\n"


def test_pend_oracle(capsys):
    code, out, err = run(capsys, 'pend', '0..30', '--oracle')
    assert code == EXIT_OK
    assert err == ""


def test_quotient_parse_error(capsys):
    code, out, err = run(capsys, 'expand', '1:1,x', '3')
    assert code == EXIT_USAGE
    assert "position 4" in err
    assert out == ""


@pytest.mark.parametrize("argv", [
    ['pend', '0x7'],
    ['pend', '7..3'],
    ['expand', '1:1', '1e3'],
    ['verify', 'theorem', '--N', '1_000'],
    ['verify', 'nonsense'],
])
def test_decimal_only_usage_errors(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == EXIT_USAGE


def test_bad_prime_is_a_usage_error(capsys):
    assert run(capsys, 'verify', 'theorem', '--p', '4')[0] == EXIT_USAGE
    assert run(capsys, 'pend', '3', '--backend', 'residue')[0] == EXIT_USAGE


def test_verify_sellers_json(capsys):
    code, out, _ = run(capsys, 'verify', 'sellers', '--N', '3000')
    assert code == EXIT_OK
    body = json.loads(out)
    assert body['status'] == 'verified'
    first = body['families'][0]
    assert (first['A'], first['B'], first['n_checked']) == (27, 19, 111)


def test_verify_theta(capsys):
    code, out, _ = run(capsys, 'verify', 'theta', '--N', '300', '--jtp-N', '200', '--format', 'text')
    assert code == EXIT_OK
    assert out.startswith("theta: verified\n")


def test_verify_identity(capsys):
    code, out, _ = run(capsys, 'verify', 'identity', '--N', '20000')
    assert code == EXIT_OK
    assert json.loads(out)['first_mismatch'] is None


def test_verify_newman_reports_residuals(capsys):
    code, out, _ = run(capsys, 'verify', 'newman', '--p', '5', '--n-max', '3')
    body = json.loads(out)
    assert body['alphas'][0] == {'p': 5, 'alpha': 2505, 'omega_parity': 1}
    assert body['status'] == 'refuted'
    assert code == 1


def test_insufficient_range_exit_code(capsys):
    code, out, _ = run(capsys, 'verify', 'theorem', '--p', '13', '--k', '0', '--N', '1000')
    statuses = {family['status'] for family in json.loads(out)['families']}
    assert statuses == {'verified', 'insufficient-range'}
    assert code == EXIT_INSUFFICIENT


def test_reports_are_deterministic(capsys):
    argv = ['verify', 'theorem', '--p', '5', '--k', '0', '--N', '20000', '--format', 'json']
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == second[0]
    assert first[1] == second[1]


def test_output_file_and_envelope(capsys, tmp_path):
    target = tmp_path / "reports" / "sellers.json"
    code, out, _ = run(capsys, 'verify', 'sellers', '--N', '2000', '--envelope', '--output', str(target))
    assert code == EXIT_OK
    assert out == ""
    wrapped = json.loads(target.read_text())
    assert 'generated_at' in wrapped
    assert wrapped['report']['target'] == 'sellers'


def test_csv_report(capsys):
    code, out, _ = run(capsys, 'verify', 'sellers', '--N', '2000', '--format', 'csv')
    lines = out.splitlines()
    assert lines[0].split(',')[:3] == ['target', 'A', 'B']
    assert len(lines) == 5


def test_aggregate_status():
    assert aggregate_status(['verified', 'verified']) == 'verified'
    assert aggregate_status(['verified', 'insufficient-range']) == 'insufficient-range'
    assert aggregate_status(['insufficient-range', 'error']) == 'error'
    assert aggregate_status(['error', 'refuted', 'verified']) == 'refuted'
    assert aggregate_status([]) == 'insufficient-range'


def test_campaign_turns_domain_errors_into_reports():
    campaign = VerificationCampaign(show_progress=False)
    result = campaign.run([('theorem', {'primes': [9], 'order': 100}), ('sellers', {'order': 2000})])
    assert [t['status'] for t in result['targets']] == ['error', 'verified']
    assert result['status'] == 'error'
    assert 'p >= 5' in result['targets'][0]['error']


def test_newman_tables_cover_both_relations():
    report = VerificationCampaign(show_progress=False).verify_newman(primes=[5, 7], n_max=30, step3_n_max=10)
    checked = {(check['p'], check['relation']): check['n_checked'] for check in report['checks']}
    assert checked == {(5, 'newman'): 31, (5, 'step3'): 11, (7, 'newman'): 31, (7, 'step3'): 11}
    assert report['step3_n_max'] == 10


def test_step3_scan_reaches_n_max(capsys):
    code, out, _ = run(capsys, 'verify', 'newman', '--p', '5', '--n-max', '30', '--step3-n-max', '30')
    checks = json.loads(out)['checks']
    assert [check['n_checked'] for check in checks] == [31, 31]
    assert [check['relation'] for check in checks] == ['newman', 'step3']
    assert code == 1


def test_expand_zero_order_is_an_empty_truncation(capsys):
    code, out, err = run(capsys, 'expand', '1:1', '0')
    assert code == EXIT_USAGE
    assert "empty truncation" in err
    assert out == ""
