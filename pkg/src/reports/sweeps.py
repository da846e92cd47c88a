"""Parameter sweeps for ``cmd_sweep``: decay tables, growth and ratio trends.

Rows share the columns (table, p, N, t, module, seed, subgroup, dim, index,
bound, ratio); columns a table has no use for stay empty.
"""
import logging
from typing import Any, Dict, List

from src.coinvariants.bounds import harris_report, prop_single_check, product_sweep
from src.coinvariants.modules import GModule
from src.groups.subgroups import SubgroupSpec, realize
from src.reports.suite_config import SuiteConfig
from src.reports.suites import LARGE_PRODUCT_ORDER, CheckTask, seeded_tasks, suite, task_modules

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


def table_row(table: str, task: CheckTask, module: GModule, **values: Any) -> Row:
    row: Row = {
        'table': table,
        'p': task.p,
        'N': task.N,
        't': task.t,
        'module': module.label,
        'seed': task.seed,
        'subgroup': None,
        'dim': None,
        'index': None,
        'bound': None,
        'ratio': None,
    }
    row.update(values)
    return row


def _decay_specs(N: int) -> List[SubgroupSpec]:
    specs = [SubgroupSpec.G(k) for k in range(1, N)] + [SubgroupSpec.T(k) for k in range(1, N)]
    specs += [SubgroupSpec.tlj(l, j) for l in range(1, N) for j in range(l)]
    return specs


@suite('sweep_decay')
def decay_sweep(task: CheckTask, config: SuiteConfig) -> List[Row]:
    """Coinvariant dimensions along G(p^k), T(p^k) and T(l,j), at faithful levels."""
    ctx = task.ctx
    rows = []
    for module in task_modules(task):
        for spec in _decay_specs(ctx.N):
            sub = realize(spec, ctx)
            dim = module.coinvariant_dimension(sub)
            index = module.group.order // sub.order
            rows.append(
                table_row('decay', task, module, subgroup=spec.label, dim=dim, index=index, ratio=round(dim / index, 10))
            )
    return rows


@suite('sweep_harris')
def harris_sweep(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rows = []
    for module in task_modules(task):
        for entry in harris_report(module, task.N - 1):
            rows.append(
                table_row(
                    'harris', task, module,
                    subgroup=f"G(p^{entry['n']})", dim=entry['dim'], index=entry['index'],
                    bound=entry['log_p_dim'], ratio=entry['ratio'],
                )
            )
    return rows


@suite('sweep_prop_single')
def prop_single_sweep(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rows = []
    for module in task_modules(task):
        for k in range(1, task.N):
            report = prop_single_check(module, k)
            rows.append(
                table_row(
                    'prop_single', task, module,
                    subgroup=f'T(p^{k})', dim=report.lhs, bound=str(report.bound), ratio=round(report.ratio, 10),
                )
            )
    return rows


@suite('sweep_product')
def product_table_sweep(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rows = []
    for module in task_modules(task):
        sweep = product_sweep(module)
        for report in sweep.reports:
            rows.append(
                table_row(
                    'product', task, module,
                    subgroup='T_(' + ','.join(map(str, report.levels)) + ')',
                    dim=report.dim, index=report.index, ratio=round(report.ratio, 10),
                )
            )
        rows.append(table_row('product_fit', task, module, bound=sweep.fitted_exponent))
    return rows


def plan_sweep(config: SuiteConfig) -> List[CheckTask]:
    tasks: List[CheckTask] = []
    for p in config.primes:
        for N in range(2, config.n_max + 1):
            for name in ('sweep_decay', 'sweep_harris', 'sweep_prop_single'):
                tasks += seeded_tasks(name, p, N, config.random_modules, config)
        if 2 in config.t_values:
            for N in range(1, config.product_n_max + 1):
                if p ** (6 * (N - 1)) > LARGE_PRODUCT_ORDER and not config.allow_large_product:
                    logger.warning('Skipping the large product group at p=%s, N=%s', p, N)
                    continue
                tasks += seeded_tasks('sweep_product', p, N, config.product_modules, config, t=2)
    return tasks
