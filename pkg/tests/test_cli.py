import json
import logging

import pandas as pd
import pytest

from src import main as cli
from src.reports.suite_config import SuiteConfig


def test_delta_command_writes_csv(capsys):
    assert cli.main(['delta', '--pmax', '5']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'p,delta,is_max,is_min'
    assert lines[1] == '2,0.2075187496,True,False'
    assert len(lines) == 4


def test_delta_command_rejects_an_empty_range():
    assert cli.main(['delta', '--pmax', '1']) == 2


def test_delta_json_to_file(tmp_path):
    out = tmp_path / 'delta.jsonl'
    assert cli.main(['delta', '--pmax', '3', '--format', 'json', '--out', str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert [row['p'] for row in rows] == [2, 3]


def test_decompose_command(capsys, restore_settings):
    assert cli.main(['decompose', '--d', '5', '--p', '3', '--k', '3', '--relaxed-decompose']) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload['chain'] == [3, 4, 5]
    assert payload['verified'] is True


def test_decompose_command_needs_relaxed_mode(restore_settings):
    assert cli.main(['decompose', '--d', '5', '--p', '3', '--k', '3']) == 2


def test_non_prime_is_a_configuration_error():
    assert cli.main(['verify', '--p', '4']) == 2


def test_verify_passes_flags_through(mocker):
    stream = mocker.patch.object(cli, 'iter_task_rows', return_value=[])
    assert cli.main(['verify', '--p', '3', '--n-max', '2', '--seed', '4', '--workers', '1']) == 0
    config = stream.call_args.args[1]
    assert isinstance(config, SuiteConfig)
    assert (config.primes, config.n_max, config.seed, config.fmt) == ([3], 2, 4, 'json')


def test_verify_exit_code_reflects_asserted_failures(mocker):
    rows = [
        {'suite': 'x', 'check': 'a', 'p': 3, 'N': 2, 'passed': False, 'asserted': False, 'params': {}, 'detail': None},
        {'suite': 'x', 'check': 'b', 'p': 3, 'N': 2, 'passed': False, 'asserted': True, 'params': {}, 'detail': None},
    ]
    mocker.patch.object(cli, 'iter_task_rows', return_value=[rows])
    assert cli.main(['verify', '--p', '3']) == 1
    mocker.patch.object(cli, 'iter_task_rows', return_value=[rows[:1]])
    assert cli.main(['verify', '--p', '3']) == 0


def test_sweep_defaults_to_csv(mocker):
    mocker.patch.object(cli, 'run_tasks', return_value=[])
    write = mocker.patch.object(cli, 'write_report')
    assert cli.main(['sweep', '--p', '2', '--n-max', '2']) == 0
    write.assert_called_once_with([], 'csv', None)


def test_config_file_format_is_kept(tmp_path, mocker):
    path = tmp_path / 'lab.env'
    path.write_text('FORMAT=csv\n')
    mocker.patch.object(cli, 'run_tasks', return_value=[])
    write = mocker.patch.object(cli, 'write_report')
    assert cli.main(['verify', '--config', str(path)]) == 0
    assert write.call_args.args[1] == 'csv'


def test_bad_integer_list_is_rejected():
    with pytest.raises(SystemExit):
        cli.main(['verify', '--p', 'two'])


def test_unexpected_errors_exit_with_two(mocker, caplog):
    mocker.patch.object(cli, 'cmd_delta', side_effect=RuntimeError('table exploded'))
    assert cli.main(['delta']) == 2
    assert 'table exploded' in caplog.text


def test_verify_streams_rows_as_tasks_finish(mocker, capsys):
    row = {'suite': 'a', 'check': 'x', 'p': 3, 'N': 1, 'params': {}, 'passed': True, 'asserted': True, 'detail': None}
    seen = []

    def batches(tasks, config):
        yield [row]
        seen.append(capsys.readouterr().out)
        yield [dict(row, suite='b')]

    mocker.patch.object(cli, 'iter_task_rows', side_effect=batches)
    assert cli.main(['verify', '--p', '3', '--n-max', '1']) == 0
    assert [json.loads(line)['suite'] for line in seen[0].splitlines()] == ['a']
    assert [json.loads(line)['suite'] for line in capsys.readouterr().out.splitlines()] == ['b']


@pytest.fixture
def small_counts(tmp_path):
    path = tmp_path / 'small.env'
    path.write_text('RANDOM_MODULES=1\nSHAPIRO_MODULES=1\nPRODUCT_MODULES=1\n')
    return path


def test_verify_runs_end_to_end_at_info(tmp_path, small_counts, caplog, restore_settings):
    caplog.set_level(logging.INFO)
    out = tmp_path / 'verify.jsonl'
    argv = ['--log-level', 'INFO', 'verify', '--p', '3', '--n-max', '2', '--t', '1']
    assert cli.main(argv + ['--config', str(small_counts), '--out', str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert {'delta', 'orders', 'prop_single', 'shapiro', 'generators'} <= {row['suite'] for row in rows}
    assert all(row['passed'] or not row['asserted'] for row in rows)
    assert 'Single-group bound for regular' in caplog.text
    assert f'Verify finished: {len(rows)} checks, 0 failures' in caplog.text


def test_sweep_runs_end_to_end_at_info(tmp_path, caplog, restore_settings):
    caplog.set_level(logging.INFO)
    out = tmp_path / 'sweep.csv'
    assert cli.main(['sweep', '--p', '3', '--n-max', '2', '--modules', '0', '--t', '1', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert {'table', 'p', 'N', 'module', 'subgroup', 'dim', 'ratio'} <= set(frame.columns)
    assert set(frame['table']) == {'decay', 'harris', 'prop_single'}
    assert set(frame['module']) == {'trivial', 'regular'}
    assert 'Single-group bound for trivial' in caplog.text
