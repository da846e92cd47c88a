"""Growth bounds for coinvariants along the congruence filtrations.

Every check takes the smallest constant C that satisfies its hypothesis on
the module at hand, so the implication being tested is self-contained.
Bounds are exact ``Fraction`` values; ratios are reported as floats.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from sympy import primerange

from config.settings import settings
from src.coinvariants.modules import (
    GModule,
    PermutationQuotientModule,
    coset_module,
    tensor_module,
)
from src.cosets.space import CosetSpace, FractionalLinearGSet
from src.groups.subgroups import Family, ProductSubgroupSpec, SubgroupSpec, realize
from src.linalg.fp import ensure_prime
from src.utils.exceptions import LevelContextError, ParameterError

logger = logging.getLogger(__name__)


def eta(p: int) -> Fraction:
    return Fraction(2 * p * p + 1, p * p)


def delta_of_p(p: int) -> float:
    """(ln 3p^2 - ln(2p^2 + 1)) / (2 ln p)."""
    ensure_prime(p)
    return (math.log(3 * p * p) - math.log(2 * p * p + 1)) / (2 * math.log(p))


def delta_table(pmax: int) -> List[Dict[str, Any]]:
    """delta(p) for every prime up to pmax, with the extremes flagged."""
    primes = list(primerange(2, pmax + 1))
    if not primes:
        raise ParameterError(f'No primes up to pmax={pmax}; the delta table would be empty')
    values = {int(p): delta_of_p(int(p)) for p in primes}
    best = max(values, key=values.get)
    worst = min(values, key=values.get)
    return [
        {'p': p, 'delta': round(value, 10), 'is_max': p == best, 'is_min': p == worst}
        for p, value in values.items()
    ]


def _require_single(module: GModule) -> None:
    if module.ctx.copies != 1:
        raise LevelContextError(f'{module.label} lives on a product group; use the product checks')


def _level_dim(module: GModule, spec: SubgroupSpec) -> int:
    return module.coinvariant_dimension(realize(spec, module.ctx))


def hypothesis_constant(module: GModule, lmax: int) -> Fraction:
    """Smallest C with dim M_G(p^l) <= C p^(2l) for all l <= lmax."""
    p = module.p
    return max(Fraction(_level_dim(module, SubgroupSpec.G(l)), p ** (2 * l)) for l in range(1, lmax + 1))


@dataclass
class PropSingleReport:
    k: int
    constant: Fraction
    lhs: int
    bound: Fraction
    asserted: bool

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound

    @property
    def ratio(self) -> float:
        return float(self.lhs / self.bound)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'C': str(self.constant),
            'dim': self.lhs,
            'bound': str(self.bound),
            'ratio': round(self.ratio, 10),
            'holds': self.holds,
            'asserted': self.asserted,
        }


def prop_single_check(module: GModule, k: int) -> PropSingleReport:
    """dim M_T(p^k) <= C eta^(k-2) p^(2k), asserted for 2 <= k <= N-1.

    At k = 1 the group T(p) is G(p) itself and the minimal C makes the bound
    fail by a factor eta; that case is reported only.
    """
    _require_single(module)
    if not 1 <= k <= module.ctx.N - 1:
        raise ParameterError(f'k={k} must satisfy 1 <= k <= N-1={module.ctx.N - 1}')
    p = module.p
    constant = hypothesis_constant(module, k)
    bound = constant * eta(p) ** (k - 2) * p ** (2 * k)
    report = PropSingleReport(k, constant, _level_dim(module, SubgroupSpec.T(k)), bound, asserted=k >= 2)
    logger.info(
        'Single-group bound for %s at k=%s: dim %s, ratio %s, holds=%s',
        module.label, k, report.lhs, report.ratio, report.holds,
    )
    return report


def indhyp_sweep(module: GModule, lmax: Optional[int] = None) -> List[Dict[str, Any]]:
    """dim M_T(l,j) against C eta^(j-1) p^(2l) for l <= lmax; only j >= 1 is asserted."""
    _require_single(module)
    lmax = module.ctx.check_level(lmax if lmax is not None else module.ctx.N, 'lmax')
    p = module.p
    constant = hypothesis_constant(module, lmax)
    rows = []
    for l in range(1, lmax + 1):
        for j in range(l):
            dim = _level_dim(module, SubgroupSpec.tlj(l, j))
            bound = constant * eta(p) ** (j - 1) * p ** (2 * l)
            rows.append({
                'module': module.label,
                'l': l,
                'j': j,
                'dim': dim,
                'bound': str(bound),
                'ratio': round(float(dim / bound), 10),
                'holds': dim <= bound,
                'asserted': j >= 1,
            })
    return rows


@dataclass
class ProductReport:
    levels: Tuple[int, ...]
    dim: int
    module_dim: int
    index: int
    kappa: int
    ratio: float
    constant: float

    @property
    def within_constant(self) -> bool:
        return self.ratio <= self.constant

    @property
    def holds(self) -> bool:
        return self.dim <= self.module_dim and self.within_constant

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            'levels': list(self.levels),
            'dim': self.dim,
            'module_dim': self.module_dim,
            'index': self.index,
            'kappa': self.kappa,
            'ratio': round(self.ratio, 10),
            'holds': self.holds,
        }


def coinvarlem_product_check(module: GModule, levels: Tuple[int, ...], constant: Optional[float] = None) -> ProductReport:
    """dim M_T_k / (eta^kappa |G : T_k|) on the product group, kappa = min k_i."""
    spec = ProductSubgroupSpec(Family.T, tuple(levels))
    sub = realize(spec, module.ctx)
    index = module.group.order // sub.order
    dim = module.coinvariant_dimension(sub)
    ratio = float(Fraction(dim) / (eta(module.p) ** spec.kappa * index))
    return ProductReport(
        spec.levels,
        dim,
        module.dim,
        index,
        spec.kappa,
        ratio,
        settings.COINVARLEM_CONSTANT if constant is None else constant,
    )


@dataclass
class ProductSweep:
    reports: List[ProductReport]
    monotone: bool
    fitted_exponent: Optional[float]

    def rows(self) -> List[Dict[str, Any]]:
        return [report.to_json() for report in self.reports]


def product_sweep(module: GModule, kmax: Optional[int] = None) -> ProductSweep:
    """Every level vector up to (kmax, ..., kmax), monotonicity, and a fitted decay exponent.

    The exponent is the slope of log_p(ratio) against kappa; it is reported
    and never asserted.
    """
    ctx = module.ctx
    kmax = ctx.check_level(kmax if kmax is not None else ctx.N, 'kmax')
    reports = {
        levels: coinvarlem_product_check(module, levels)
        for levels in product(range(1, kmax + 1), repeat=ctx.copies)
    }

    monotone = True
    for levels, report in reports.items():
        for i in range(ctx.copies):
            bigger = levels[:i] + (levels[i] + 1,) + levels[i + 1:]
            if bigger in reports and reports[bigger].dim < report.dim:
                monotone = False

    points = [(r.kappa, math.log(r.ratio, module.p)) for r in reports.values() if r.ratio > 0]
    fitted = None
    if len({kappa for kappa, _ in points}) >= 2:
        slope, _ = np.polyfit([kappa for kappa, _ in points], [value for _, value in points], 1)
        fitted = float(slope)
    logger.info(
        'Product sweep for %s: %s points, monotone=%s, exponent=%s', module.label, len(reports), monotone, fitted
    )
    return ProductSweep(list(reports.values()), monotone, fitted)


def shapiro_h0_check(module: GModule, k: int) -> bool:
    """dim (M (x) F_p[G/H(p^k)])_G = dim M_H(p^k)."""
    _require_single(module)
    sub = realize(SubgroupSpec.H(k), module.ctx)
    induced = tensor_module(module, coset_module(module.group, sub))
    lhs = induced.coinvariant_dimension(module.group)
    rhs = module.coinvariant_dimension(sub)
    logger.debug('Shapiro check for %s at k=%s: induced %s, restricted %s', module.label, k, lhs, rhs)
    return lhs == rhs


def shapiro_fractional_linear_check(module: GModule, k: int) -> bool:
    """The same identity for the fractional-linear G-set, whose point stabiliser is the transpose family."""
    _require_single(module)
    points = PermutationQuotientModule(
        FractionalLinearGSet(CosetSpace(module.ctx, k)), module.group, None, 'coset', f'F_p[pZ/p^{k}]'
    )
    lhs = tensor_module(module, points).coinvariant_dimension(module.group)
    return lhs == module.coinvariant_dimension(realize(SubgroupSpec.HT(k), module.ctx))


def harris_report(module: GModule, nmax: Optional[int] = None) -> List[Dict[str, Any]]:
    """log_p dim M_G(p^n) against the index |G : G(p^n)|; report only."""
    _require_single(module)
    nmax = module.ctx.check_level(nmax if nmax is not None else module.ctx.N, 'nmax')
    p = module.p
    rows = []
    for n in range(1, nmax + 1):
        dim = _level_dim(module, SubgroupSpec.G(n))
        index = p ** (3 * (n - 1))
        rows.append({
            'module': module.label,
            'n': n,
            'dim': dim,
            'index': index,
            'log_p_dim': round(math.log(dim, p), 10) if dim else None,
            'ratio': round(dim / index, 10),
        })
    return rows
