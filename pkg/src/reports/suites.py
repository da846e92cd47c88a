"""Verification suites run by ``cmd_verify``.

A suite is planned into independent ``CheckTask`` values (one per parameter
point, and one per random module where modules are drawn), so the worker
pool can spread them. Each task returns report rows of the form

    {suite, check, p, N, t, seed, params, passed, asserted, detail}

``asserted`` is false for checks whose outcome is recorded but never fails
the run.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from config.settings import settings
from src.coinvariants.bounds import (
    delta_table,
    delta_of_p,
    indhyp_sweep,
    prop_single_check,
    product_sweep,
    shapiro_fractional_linear_check,
    shapiro_h0_check,
)
from src.coinvariants.coinvariants import (
    conjugation_invariance_check,
    generator_sufficiency,
    inclusion_exclusion_check,
    monotonicity_check,
    recursion_check,
)
from src.coinvariants.modules import (
    GModule,
    PermutationQuotientModule,
    cyclic_module,
    regular_module,
    trivial_module,
)
from src.cosets.filtration import (
    decompose_submodule,
    invariant_subspace_census,
    quotient_iso,
    shift_recurrence_check,
)
from src.cosets.space import CosetSpace, intertwining_convention, stabilizer_of_zero
from src.groups.identities import conjugate_H_to_T, verify_intersection_identity, verify_product_identity
from src.groups.level import LevelContext
from src.groups.matrices import encode
from src.groups.subgroups import SubgroupSpec, ambient_group, iter_level_specs, realize
from src.iwasawa.algebra import TruncatedAlgebra
from src.iwasawa.ideals import ideal_I_alpha_is_two_sided, ideal_Ip, module_filtration, surjection_check
from src.iwasawa.monomials import (
    count_nonmajorizing,
    count_nonmajorizing_brute,
    graded_commutativity_check,
    ordered_indices,
    random_index_pairs,
    successor,
)
from src.reports.suite_config import SuiteConfig
from src.symmetric.lattice import equivariance_check, sym_reduction
from src.utils.exceptions import StructuralError

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

# Module dimension up to which the truncated-algebra filtrations are materialised.
FILTRATION_DIM_LIMIT = 64
# Product groups above this order run only with ALLOW_LARGE_PRODUCT.
LARGE_PRODUCT_ORDER = 10 ** 5
# Seeded modules for the single-group bound at p=5, N=3.
PRIME_FIVE_MODULES = 5


@dataclass(frozen=True)
class CheckTask:
    suite: str
    p: int
    N: int
    t: int = 1
    seed: Optional[int] = None

    @property
    def ctx(self) -> LevelContext:
        return LevelContext(self.p, self.N, self.t)

    def sort_key(self) -> Tuple[str, int, int, int, int]:
        return (self.suite, self.p, self.N, self.t, -1 if self.seed is None else self.seed)


SuiteFn = Callable[[CheckTask, SuiteConfig], List[Row]]
SUITES: Dict[str, SuiteFn] = {}


def suite(name: str) -> Callable[[SuiteFn], SuiteFn]:
    def register(fn: SuiteFn) -> SuiteFn:
        SUITES[name] = fn
        return fn

    return register


def make_row(
    task: CheckTask,
    check: str,
    passed: Any,
    params: Optional[Dict[str, Any]] = None,
    asserted: bool = True,
    detail: Any = None,
) -> Row:
    return {
        'suite': task.suite,
        'check': check,
        'p': task.p,
        'N': task.N,
        't': task.t,
        'seed': task.seed,
        'params': params or {},
        'passed': bool(passed),
        'asserted': asserted,
        'detail': detail,
    }


def task_modules(task: CheckTask) -> List[GModule]:
    """Trivial and regular modules for seedless tasks, one cyclic module otherwise."""
    group = ambient_group(task.ctx)
    if task.seed is None:
        return [trivial_module(group), regular_module(group)]
    return [cyclic_module(group, task.seed)]


@suite('delta')
def delta_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    value = delta_of_p(2)
    table = delta_table(100)
    best = next(row['p'] for row in table if row['is_max'])
    return [
        make_row(task, 'delta(2) ~ 0.207', 0.2070 <= value <= 0.2080, {'p': 2}, detail=round(value, 10)),
        make_row(task, 'delta maximal at p=2', best == 2, {'pmax': 100}, detail=best),
    ]


@suite('convention')
def convention_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    report = intertwining_convention(task.ctx, samples=100, seed=config.seed)
    return [make_row(task, 'phi intertwines a left action', report.left_holds, {'k': task.N}, detail=report.convention)]


@suite('orders')
def orders_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    specs = list(iter_level_specs(ctx))
    specs += [
        factory(l, j)
        for l in range(2, ctx.N + 1)
        for j in range(1, l)
        for factory in (SubgroupSpec.tlj_prime, SubgroupSpec.tlj_double_prime)
    ]
    rows = []
    for spec in specs:
        expected = spec.expected_order(ctx)
        try:
            order = realize(spec, ctx).order
        except StructuralError as exc:
            rows.append(make_row(task, 'subgroup order', False, {'subgroup': spec.label}, detail=str(exc)))
            continue
        rows.append(make_row(task, 'subgroup order', order == expected, {'subgroup': spec.label}, detail=order))
    return rows


@suite('identities')
def identities_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    odd = ctx.p % 2 == 1
    rows = []
    for l in range(3, ctx.N):
        for j in range(2, l):
            params = {'l': l, 'j': j}
            rows.append(make_row(task, 'product identity', verify_product_identity(l, j, ctx), params, asserted=odd))
            rows.append(
                make_row(task, 'intersection identity', verify_intersection_identity(l, j, ctx), params, asserted=odd)
            )
    for k in range(1, ctx.N + 1, 2):
        report = conjugate_H_to_T(k, ctx)
        rows.append(make_row(task, 'H(p^k) conjugate to T', report.holds, {'k': k}, detail={'level': report.level}))
    return rows


@suite('cosets')
def cosets_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx, k, p = task.ctx, task.N, task.p
    space = CosetSpace(ctx, k)
    rows = []
    census = invariant_subspace_census(k, ctx)
    rows.append(
        make_row(task, 'invariant subspace census', len(census) == space.size + 1, {'k': k}, detail=len(census))
    )
    shifts = all(shift_recurrence_check(t, k, ctx) for t in range(space.size))
    rows.append(make_row(task, 'Nbar shift recurrence', shifts, {'k': k}))
    for l in range(1, k + 1):
        for a in range(p ** (k - l)):
            quotient = quotient_iso(a, l, k, ctx)
            rows.append(make_row(task, 'quotient iso', quotient.holds, {'k': k, 'l': l, 'a': a}))
    stabilizer = np.unique(encode(stabilizer_of_zero(space), ctx.modulus))
    transpose = realize(SubgroupSpec.HT(k), ctx).table.keys
    rows.append(make_row(task, 'stabilizer of 0 is HT', np.array_equal(stabilizer, transpose), {'k': k}))
    return rows


@suite('decompose')
def decompose_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx, k = task.ctx, task.N
    rows = []
    for d in range(ctx.p ** (k - 1) + 1):
        descriptor = decompose_submodule(d, k, ctx, relaxed=True)
        rows.append(make_row(task, 'relaxed decomposition', descriptor.holds, {'d': d, 'k': k}))
    if (k - 1) % 4 == 0 and k > 1:
        for d in range(ctx.p ** (k - 1) + 1):
            rows.append(make_row(task, 'base p^4 decomposition', decompose_submodule(d, k, ctx).holds, {'d': d, 'k': k}))
    return rows


@suite('decompose_example')
def decompose_example_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    descriptor = decompose_submodule(17, 9, task.ctx, relaxed=config.relaxed_decompose)
    return [make_row(task, 'decompose F(17)', descriptor.holds, {'d': 17, 'k': 9}, detail=descriptor.to_json()['chain'])]


@suite('symmetric')
def symmetric_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx, k = task.ctx, task.N
    rows = []
    for d in range(min(4, ctx.p ** (k - 1) - 1) + 1):
        reduction = sym_reduction(d, k, ctx)
        rows.append(make_row(task, 'Sym^d reduces to F(d+1)', reduction.m == d + 1, {'d': d, 'k': k}, detail=reduction.m))
        rows.append(make_row(task, 'reduction is equivariant', equivariance_check(d, k, ctx), {'d': d, 'k': k}))
    return rows


def _algebra_fits(ctx: LevelContext, base: int, cap: int) -> bool:
    return base <= ctx.N and ctx.p ** (3 * ctx.copies * (ctx.N - base)) <= cap


@suite('monomials')
def monomials_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    rows = []
    default_base = 2 if ctx.p == 2 else 1
    bases = [default_base] + ([1] if ctx.p == 2 else [])
    for base in bases:
        if not _algebra_fits(ctx, base, config.dim_cap):
            continue
        algebra = TruncatedAlgebra(ctx, base)
        asserted = base == default_base
        rows.append(make_row(task, 'monomial basis', algebra.monomial_basis_check(), {'base': base}, asserted=asserted))
        if not asserted:
            continue
        pairs = random_index_pairs(algebra, 100, config.seed)
        commuting = all(graded_commutativity_check(alpha, beta, algebra) for alpha, beta in pairs)
        rows.append(make_row(task, 'graded commutativity', commuting, {'base': base, 'pairs': len(pairs)}))
        for l in range(1, ctx.N + 1):
            report = ideal_Ip(l, algebra)
            rows.append(make_row(task, 'I(p^l) monomial description', report.matches_monomial_span, {'l': l}))
            rows.append(
                make_row(task, 'I(p^l) literal description', report.matches_literal_span, {'l': l}, asserted=False)
            )
        for alpha in ordered_indices(algebra)[:5]:
            two_sided = ideal_I_alpha_is_two_sided(alpha, algebra)
            rows.append(make_row(task, 'I_alpha two-sided', two_sided, {'alpha': list(alpha)}))
    return rows


@suite('nonmajorizing')
def nonmajorizing_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rng = np.random.default_rng(config.seed)
    rows = []
    for l in range(3):
        side = task.p ** l
        for _ in range(10):
            alpha = tuple(int(v) for v in rng.integers(0, side + 2, size=3))
            count = count_nonmajorizing(alpha, l, task.p)
            params = {'alpha': list(alpha), 'l': l}
            rows.append(make_row(task, 'S_l count bound', count.holds, params, detail=[count.count, count.bound]))
            rows.append(
                make_row(task, 'S_l count closed form', count.count == count_nonmajorizing_brute(alpha, l, task.p), params)
            )
    return rows


@suite('filtration')
def filtration_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    """Module filtrations M_alpha of the truncated algebra on small explicit modules."""
    ctx = task.ctx
    algebra = TruncatedAlgebra(ctx)
    rows = []
    for module in task_modules(task):
        if module.dim > FILTRATION_DIM_LIMIT:
            continue
        explicit = module.to_matrix_module() if isinstance(module, PermutationQuotientModule) else module
        filtration = module_filtration(explicit, algebra)
        following = successor((0,) * algebra.rank, algebra)
        first = explicit.dim - (filtration.steps[following].dim if following is not None else 0)
        params = {'module': module.label}
        rows.append(
            make_row(task, 'first quotient is coinvariants', first == explicit.coinvariant_dimension(algebra.group), params)
        )
        ordered = ordered_indices(algebra)[: 2 * algebra.rank + 1]
        for beta, alpha in product(ordered, repeat=2):
            if any(a < b for a, b in zip(alpha, beta)):
                continue
            report = surjection_check(explicit, beta, alpha, algebra, filtration)
            pair = dict(params, beta=list(beta), alpha=list(alpha))
            rows.append(make_row(task, 'z^(alpha-beta) M_beta inside M_alpha', report.contained, pair))
            rows.append(make_row(task, 'M_alpha covered by z^(alpha-beta) M_beta', report.contains, pair))
    return rows


@suite('inequalities')
def inequalities_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    group = ambient_group(ctx)
    rng = np.random.default_rng(config.seed if task.seed is None else task.seed)
    rows = []
    for module in task_modules(task):
        label = {'module': module.label}
        for l in range(2, ctx.N):
            for j in range(1, l):
                params = dict(label, l=l, j=j)
                first = realize(SubgroupSpec.tlj(l, j), ctx)
                second = realize(SubgroupSpec.tlj_prime(l, j), ctx)
                report = inclusion_exclusion_check(module, first, second)
                rows.append(make_row(task, 'inclusion-exclusion', report.holds, params, detail=[report.lhs, report.rhs]))

                smaller = realize(SubgroupSpec.tlj(l, j - 1), ctx)
                mono = monotonicity_check(module, smaller, first)
                rows.append(make_row(task, 'monotonicity', mono.holds, params))

                conjugators = list(group.random_rows(2, rng))
                if j >= 2:
                    conjugators.append(ctx.upper(ctx.p ** (j - 1)).as_row())
                invariant = all(conjugation_invariance_check(module, first, g) for g in conjugators)
                rows.append(make_row(task, 'conjugation invariance', invariant, params))

                if j >= 2 and l <= ctx.N - 1:
                    report = recursion_check(module, l, j)
                    rows.append(
                        make_row(
                            task, 'recursion', report.holds, params, asserted=ctx.p % 2 == 1, detail=[report.lhs, report.rhs]
                        )
                    )
    return rows


@suite('prop_single')
def prop_single_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    rows = []
    for module in task_modules(task):
        for k in range(1, ctx.N):
            report = prop_single_check(module, k)
            rows.append(
                make_row(
                    task, 'single-group bound', report.holds, {'module': module.label, 'k': k},
                    asserted=report.asserted, detail=report.to_json(),
                )
            )
        for entry in indhyp_sweep(module, ctx.N - 1):
            params = {'module': module.label, 'l': entry['l'], 'j': entry['j']}
            rows.append(make_row(task, 'inductive bound', entry['holds'], params, asserted=entry['asserted'], detail=entry['ratio']))
    return rows


@suite('shapiro')
def shapiro_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rows = []
    for module in task_modules(task):
        for k in range(1, task.N + 1):
            params = {'module': module.label, 'k': k}
            rows.append(make_row(task, 'Shapiro H0', shapiro_h0_check(module, k), params))
            rows.append(make_row(task, 'Shapiro H0 fractional-linear', shapiro_fractional_linear_check(module, k), params))
    return rows


@suite('generators')
def generators_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    ctx = task.ctx
    rows = []
    for module in task_modules(task):
        for spec in iter_level_specs(ctx):
            sufficient = generator_sufficiency(module, realize(spec, ctx))
            rows.append(make_row(task, 'generator sufficiency', sufficient, {'module': module.label, 'subgroup': spec.label}))
    return rows


@suite('product')
def product_suite(task: CheckTask, config: SuiteConfig) -> List[Row]:
    rows = []
    for module in task_modules(task):
        sweep = product_sweep(module)
        for report in sweep.reports:
            params = {'module': module.label, 'levels': list(report.levels)}
            rows.append(make_row(task, 'product coinvariant ratio', report.holds, params, detail=report.to_json()))
        rows.append(make_row(task, 'product monotonicity', sweep.monotone, {'module': module.label}))
        rows.append(
            make_row(task, 'product decay exponent', True, {'module': module.label}, asserted=False, detail=sweep.fitted_exponent)
        )
    return rows


def seeded_tasks(suite_name: str, p: int, N: int, count: int, config: SuiteConfig, t: int = 1) -> List[CheckTask]:
    tasks = [CheckTask(suite_name, p, N, t)]
    tasks += [CheckTask(suite_name, p, N, t, config.seed + i) for i in range(count)]
    return tasks


def plan_verify(config: SuiteConfig) -> List[CheckTask]:
    """Every task of a verify run, in canonical order."""
    tasks = [CheckTask('delta', 2, 1)]
    for p in config.primes:
        levels = range(1, config.n_max + 1)
        tasks += [CheckTask('convention', p, N) for N in levels if N >= 2]
        tasks += [CheckTask('orders', p, N) for N in levels]
        tasks += [CheckTask('identities', p, N) for N in levels]
        tasks += [CheckTask(name, p, k) for k in levels for name in ('cosets', 'decompose', 'symmetric')]
        tasks += [CheckTask('monomials', p, N) for N in levels if N >= 2]
        tasks.append(CheckTask('nonmajorizing', p, 1))
        tasks += [CheckTask('filtration', p, N, seed=s) for N in (2, 3) if N <= config.n_max for s in (None, config.seed)]

        top = config.n_max
        if top >= 3:
            tasks += seeded_tasks('inequalities', p, top, config.random_modules, config)
        if top >= 2:
            tasks += seeded_tasks('prop_single', p, top, config.random_modules, config)
        shapiro_level = min(top, 3)
        tasks += seeded_tasks('shapiro', p, shapiro_level, config.shapiro_modules, config)
        tasks += seeded_tasks('generators', p, min(top, 3), 1, config)

        if 2 in config.t_values:
            for N in range(1, config.product_n_max + 1):
                if p ** (6 * (N - 1)) > LARGE_PRODUCT_ORDER and not config.allow_large_product:
                    logger.warning('Skipping the large product group at p=%s, N=%s', p, N)
                    continue
                tasks += seeded_tasks('product', p, N, config.product_modules, config, t=2)
    if 5 not in config.primes and config.n_max >= 3:
        tasks += seeded_tasks('prop_single', 5, 3, PRIME_FIVE_MODULES, config)
    if 2 in config.primes and config.n_max >= 1:
        tasks.append(CheckTask('decompose_example', 2, 9))
    return tasks


def apply_caps(config: SuiteConfig) -> None:
    for name, value in config.caps().items():
        setattr(settings, name, value)


def run_task(task: CheckTask, config: SuiteConfig) -> List[Row]:
    apply_caps(config)
    try:
        return SUITES[task.suite](task, config)
    except StructuralError as exc:
        logger.error('Structural check failed in %s at p=%s, N=%s: %s', task.suite, task.p, task.N, exc)
        return [make_row(task, 'structure', False, detail=str(exc))]


def iter_task_rows(tasks: Iterable[CheckTask], config: SuiteConfig) -> Iterator[List[Row]]:
    """Yield the rows of each task as it finishes, in canonical task order.

    With workers > 1 the tasks run in a process pool; results still arrive in order.
    """
    tasks = sorted(tasks, key=CheckTask.sort_key)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            yield from pool.map(run_task, tasks, [config] * len(tasks))
    else:
        for task in tasks:
            yield run_task(task, config)


def run_tasks(tasks: Iterable[CheckTask], config: SuiteConfig) -> List[Row]:
    rows = [row for batch in iter_task_rows(tasks, config) for row in batch]
    logger.info('Tasks finished: %s rows', len(rows))
    return rows
