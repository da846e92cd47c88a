import io
import json
import time

import pytest

from src.reports.suite_config import SuiteConfig, build_config, read_config_file
from src.reports.suites import SUITES, CheckTask, make_row, plan_verify, run_task, run_tasks, seeded_tasks
from src.reports.sweeps import plan_sweep
from src.reports.writers import sort_rows, write_csv, write_json_lines, write_report
from src.utils.exceptions import ParameterError, StructuralError


def test_config_file_sits_between_settings_and_flags(tmp_path):
    path = tmp_path / 'lab.env'
    path.write_text('PRIMES=3\nN_MAX=2\nSEED=11\nFORMAT=csv\n')
    config = build_config({'n_max': 3, 'seed': None}, path)
    assert config.primes == [3]
    assert config.n_max == 3
    assert config.seed == 11
    assert config.fmt == 'csv'


def test_config_file_errors(tmp_path):
    with pytest.raises(ParameterError):
        read_config_file(tmp_path / 'missing.env')
    unknown = tmp_path / 'unknown.env'
    unknown.write_text('COLOUR=blue\n')
    with pytest.raises(ParameterError):
        read_config_file(unknown)
    bad = tmp_path / 'bad.env'
    bad.write_text('N_MAX=four\n')
    with pytest.raises(ParameterError):
        read_config_file(bad)


@pytest.mark.parametrize(
    'overrides',
    [{'primes': [4]}, {'primes': []}, {'n_max': 0}, {'t_values': [3]}, {'fmt': 'xml'}, {'random_modules': -1}],
)
def test_invalid_configs(overrides):
    with pytest.raises(ParameterError):
        build_config(overrides)


def test_plan_verify_is_deterministic():
    config = SuiteConfig(primes=[3], n_max=3, random_modules=2, shapiro_modules=1, product_modules=1)
    first = plan_verify(config)
    assert first == plan_verify(config)
    assert {task.suite for task in first} <= set(SUITES)
    assert CheckTask('delta', 2, 1) in first
    assert all(task.suite != 'decompose_example' for task in first)


def test_plan_verify_skips_large_products():
    config = SuiteConfig(primes=[3], n_max=2, product_n_max=3, random_modules=0, shapiro_modules=0, product_modules=0)
    products = [task for task in plan_verify(config) if task.suite == 'product']
    assert sorted({task.N for task in products}) == [1, 2]


def test_plan_verify_adds_p_five_single_bound():
    config = SuiteConfig(primes=[2, 3], n_max=3, random_modules=0, shapiro_modules=0, product_modules=0)
    extra = [task for task in plan_verify(config) if task.p == 5]
    assert {task.suite for task in extra} == {'prop_single'}
    assert {task.N for task in extra} == {3}
    assert CheckTask('prop_single', 5, 3) in extra
    shallow = SuiteConfig(primes=[3], n_max=2, random_modules=0, shapiro_modules=0, product_modules=0)
    assert all(task.p != 5 for task in plan_verify(shallow))


def test_seeded_tasks():
    config = SuiteConfig(seed=5)
    tasks = seeded_tasks('shapiro', 3, 2, 2, config)
    assert [task.seed for task in tasks] == [None, 5, 6]


def test_plan_sweep_covers_every_table():
    config = SuiteConfig(primes=[2], n_max=2, product_n_max=1, random_modules=0, product_modules=0)
    suites = {task.suite for task in plan_sweep(config)}
    assert suites == {'sweep_decay', 'sweep_harris', 'sweep_prop_single', 'sweep_product'}


def test_make_row_shape():
    row = make_row(CheckTask('orders', 3, 2), 'subgroup order', 1, {'subgroup': 'G(p^1)'})
    assert row['passed'] is True
    assert row['asserted'] is True
    assert sorted(row) == sorted(['suite', 'check', 'p', 'N', 't', 'seed', 'params', 'passed', 'asserted', 'detail'])


def test_run_task_delta(restore_settings):
    rows = run_task(CheckTask('delta', 2, 1), SuiteConfig())
    assert [row['passed'] for row in rows] == [True, True]


def test_run_task_reports_structural_failures(restore_settings, mocker):
    mocker.patch.dict(SUITES, {'delta': mocker.Mock(side_effect=StructuralError('broken'))})
    (row,) = run_task(CheckTask('delta', 2, 1), SuiteConfig())
    assert row['check'] == 'structure'
    assert not row['passed']
    assert row['detail'] == 'broken'


def test_run_tasks_orders_rows(restore_settings):
    config = SuiteConfig(primes=[3])
    tasks = [CheckTask('orders', 3, 2), CheckTask('convention', 3, 2)]
    rows = run_tasks(tasks, config)
    assert rows[0]['suite'] == 'convention'
    assert all(row['passed'] for row in rows)


def test_small_suites_pass(restore_settings):
    config = SuiteConfig(primes=[3], n_max=2)
    for name in ('cosets', 'symmetric', 'decompose', 'monomials', 'filtration', 'shapiro', 'generators'):
        for row in run_task(CheckTask(name, 3, 2), config):
            assert row['passed'] or not row['asserted'], (name, row['check'], row['params'])


def test_seeded_default_tasks_fit_the_verify_budget(restore_settings):
    # The default plan runs one inequalities and one prop_single task per seed at p=3, N=4.
    config = SuiteConfig(primes=[3], n_max=4, random_modules=200)
    warm = [CheckTask('inequalities', 3, 4, seed=0), CheckTask('prop_single', 3, 4, seed=0)]
    timed = [CheckTask('inequalities', 3, 4, seed=1), CheckTask('prop_single', 3, 4, seed=1)]
    for task in warm:
        run_task(task, config)
    started = time.perf_counter()
    for task in timed:
        rows = run_task(task, config)
        assert rows
        assert all(row['passed'] or not row['asserted'] for row in rows), task
    elapsed = time.perf_counter() - started
    assert elapsed * config.random_modules / 4 < 240


def test_sort_rows_is_canonical():
    rows = [{'p': 3, 'N': 2}, {'p': 2, 'N': 3}, {'p': 2, 'N': 2}]
    assert sort_rows(rows, ['p', 'N']) == [{'p': 2, 'N': 2}, {'p': 2, 'N': 3}, {'p': 3, 'N': 2}]


def test_json_lines_are_sorted_by_key():
    stream = io.StringIO()
    write_json_lines([{'b': 1, 'a': [1, 2]}], stream)
    assert stream.getvalue() == '{"a": [1, 2], "b": 1}\n'


def test_csv_serialises_nested_cells():
    stream = io.StringIO()
    write_csv([{'p': 2, 'params': {'k': 1}, 'ratio': 0.5}], stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == 'p,params,ratio'
    assert lines[1] == '2,"{""k"": 1}",0.5'


def test_write_report_to_file(tmp_path):
    out = tmp_path / 'nested' / 'report.jsonl'
    write_report([{'p': 2}], 'json', str(out))
    assert json.loads(out.read_text()) == {'p': 2}
