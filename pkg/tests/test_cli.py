import json

import pytest

from cf_toolkit import EXIT_EMPTY_REGION, EXIT_OK, EXIT_USAGE, main


def run_json(capsys, *argv):
    code = main(list(argv) + ['--no-timestamp'])
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_expand(capsys):
    code, payload = run_json(capsys, 'expand', '--x', '355/113')
    assert code == EXIT_OK
    assert payload['tool_version']
    assert payload['results']['digits'] == '3;7,16'
    assert payload['config']['parameters']['x'] == '355/113'
    assert 'timestamp' not in payload


def test_expand_decimal(capsys):
    code, payload = run_json(capsys, 'expand', '--x', '0.5')
    assert code == EXIT_OK
    assert payload['results']['digits'] == '0;2'


def test_expand_csv(capsys):
    assert main(['expand', '--x', '13/8', '--format', 'csv']) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == 'n,a,p,q,theta,c,d'
    assert len(lines) == 6


def test_expand_parse_error(capsys):
    assert main(['expand', '--x', '1/0']) == EXIT_USAGE
    assert capsys.readouterr().out == ''


def test_upper_bound(capsys):
    code, payload = run_json(capsys, 'bound', '--kind', 'upper_d', '--a', '1', '--b', '3', '--r', '2.9', '--R', '3.6')
    assert code == EXIT_OK
    assert payload['results']['value'] == pytest.approx(5.72, abs=0.005)
    assert payload['results']['tong_value'] == pytest.approx(5.76, abs=0.005)
    assert payload['results']['case'] == 'i'


def test_upper_c_bound(capsys):
    code, payload = run_json(capsys, 'bound', '--kind', 'upper_c', '--a', '1', '--b', '1', '--t', '1.1', '--T', '1.4')
    assert code == EXIT_OK
    assert payload['results']['value'] == pytest.approx(1.50, abs=0.01)


def test_empty_region_exit_code(capsys):
    code, payload = run_json(capsys, 'bound', '--kind', 'lower_d', '--a', '17', '--b', '29')
    assert code == EXIT_EMPTY_REGION
    assert payload['results']['error'] == 'empty_region'


def test_bound_needs_digits(capsys):
    assert main(['bound', '--kind', 'upper_d']) == EXIT_USAGE


def test_bound_table_includes_reference_rows(capsys):
    assert main(['bound', '--table', '--max-a', '3', '--max-b', '4', '--format', 'csv']) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    header = lines[0].split(',')
    assert header[:5] == ['a', 'b', 'case', 'theorem_case', 'bound']
    assert 'reference_bound' in header
    # 12 grid cells plus (1,37), (2,42) and (17,29)
    assert len(lines) == 16
    assert lines[-1].startswith('17,29,v,')


def test_freq_closed(capsys):
    code, payload = run_json(capsys, 'freq', '--r', '2.9', '--R', '3.6', '--event', 'greater', '--method', 'closed')
    assert code == EXIT_OK
    assert payload['results']['total'] == pytest.approx(0.6096, abs=5e-4)
    assert payload['results']['event'] == 'both_greater'


def test_freq_distribution(capsys):
    code, payload = run_json(capsys, 'freq', '--dist', '3')
    assert code == EXIT_OK
    assert payload['results']['distribution'][0]['H'] == pytest.approx(0.1887, abs=1e-4)


def test_freq_monte_carlo(capsys):
    code, payload = run_json(capsys, 'freq', '--method', 'mc', '--samples', '50', '--orbit', '20',
                             '--seed', '7', '--bits', '512')
    assert code == EXIT_OK
    assert payload['config']['seed'] == 7
    assert 0 < payload['results']['total'] < 1


def test_verify_tong_counterexample(capsys):
    code, payload = run_json(capsys, 'verify', '--counterexample-tong-c')
    assert code == EXIT_OK
    assert payload['results']['findings'][0]['tong_K'] == pytest.approx(11.95, abs=0.01)


def test_verify_sweep(capsys):
    code, payload = run_json(capsys, 'verify', '--samples', '2', '--orbit', '10', '--seed', '1',
                             '--bits', '1024', '--random-witnesses', '0')
    assert code == EXIT_OK
    assert payload['results']['success']
    assert payload['results']['errors'] == []


def test_invalid_config_exit_code(capsys):
    assert main(['expand', '--x', '1/2', '--precision', '0']) == EXIT_USAGE


def test_config_file_and_flag_precedence(tmp_path, capsys):
    path = tmp_path / 'run.cfg'
    path.write_text("seed = 5\nprecision = 4\n")
    code, payload = run_json(capsys, 'expand', '--x', '1/3', '--config', str(path), '--precision', '8')
    assert code == EXIT_OK
    assert payload['config']['seed'] == 5
    assert payload['config']['precision'] == 8


def test_output_file(tmp_path, capsys):
    out = tmp_path / 'expansion.json'
    assert main(['expand', '--x', '355/113', '--out', str(out), '--no-timestamp']) == EXIT_OK
    assert capsys.readouterr().out == ''
    assert json.loads(out.read_text())['results']['digits'] == '3;7,16'


def test_bound_kind_ignores_case(capsys):
    for kind in ('upper_d', 'UPPER_D', 'upper_D'):
        code, payload = run_json(capsys, 'bound', '--kind', kind, '--a', '1', '--b', '3')
        assert code == EXIT_OK
        assert payload['results']['kind'] == 'upper_D'
    assert main(['bound', '--kind', 'sideways', '--a', '1', '--b', '3']) == EXIT_USAGE


@pytest.mark.parametrize('argv', [
    ['bound', '--kind', 'upper_d', '--a', '2', '--b', '4'],
    ['freq', '--method', 'mc', '--samples', '20', '--orbit', '10', '--seed', '5', '--bits', '512'],
    ['verify', '--samples', '2', '--orbit', '10', '--seed', '0', '--bits', '1024',
     '--random-witnesses', '2'],
])
def test_reruns_are_identical(capsys, argv):
    outputs = []
    for _ in range(2):
        assert main(argv + ['--no-timestamp']) == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0]
    assert json.loads(outputs[0])['results']
    assert outputs[0] == outputs[1]


def test_unknown_command(capsys):
    assert main(['plot']) == EXIT_USAGE
