"""Integral lattices in Sym^d realised as functions g -> q(a, c) of the first column.

The basis polynomial of index t is

    h_t(a, c) = a^(d-t) * prod_{i<t} (c - i p a) / (p^t t!) = a^d * binom(c/(pa), t),

which is p-integral whenever a is a unit and c lies in pZ_p, and reduces to
the Mahler function B_t under phi.
"""
import logging
from dataclasses import dataclass
from math import factorial
from typing import Iterable, List, Optional, Sequence

import numpy as np
import sympy
from sympy import Expr, Rational

from src.cosets.filtration import filtration_F, is_G_invariant
from src.cosets.space import CosetSpace, action_matrix
from src.groups.level import GroupElement, LevelContext
from src.groups.subgroups import ambient_group
from src.linalg.fp import FpSubspace
from src.utils.exceptions import DomainError, ParameterError, StructuralError

logger = logging.getLogger(__name__)

A, C = sympy.symbols('a c')


def reduce_rational(value: Rational, p: int) -> int:
    """Image of a p-integral rational in F_p."""
    value = Rational(value)
    if value.q % p == 0:
        raise DomainError(f'{value} is not p-integral for p={p}')
    return int(value.p) * pow(int(value.q), -1, p) % p


def is_p_integral(value: Rational, p: int) -> bool:
    return Rational(value).q % p != 0


@dataclass(frozen=True)
class HomogeneousFunction:
    degree: int
    index: int
    p: int
    polynomial: Expr

    def evaluate(self, a: int, c: int) -> Rational:
        return Rational(self.polynomial.subs({A: a, C: c}))

    def integrality_certificate(self) -> bool:
        """q(1, p y) is p-integral for y = 0..d, which pins the lattice down."""
        return all(is_p_integral(self.evaluate(1, self.p * y), self.p) for y in range(self.degree + 1))

    def translate(self, g: GroupElement) -> 'HomogeneousFunction':
        """(g.f)(h) = f(g^-1 h); on the first column (a, c) this substitutes g^-1."""
        alpha, beta, gamma, delta = g.entries
        moved = self.polynomial.subs({A: delta * A - beta * C, C: -gamma * A + alpha * C}, simultaneous=True)
        return HomogeneousFunction(self.degree, self.index, self.p, sympy.expand(moved))

    def reduction(self, space: CosetSpace) -> np.ndarray:
        """Values mod p at the cosets, using the representative (1, 0; p x, 1)."""
        return np.array(
            [reduce_rational(self.evaluate(1, self.p * int(x)), self.p) for x in space.points()],
            dtype=np.int64,
        )


def _basis_polynomial(d: int, t: int, p: int) -> Expr:
    numerator = A ** (d - t)
    for i in range(t):
        numerator *= C - i * p * A
    return sympy.expand(numerator / (p ** t * factorial(t)))


def sym_lattice_basis(d: int, k: int, ctx: LevelContext) -> List[HomogeneousFunction]:
    space = CosetSpace(ctx, k)
    if not 0 <= d < space.size:
        raise ParameterError(f'd={d} must satisfy 0 <= d < p^(k-1) = {space.size}')
    basis = [HomogeneousFunction(d, t, ctx.p, _basis_polynomial(d, t, ctx.p)) for t in range(d + 1)]
    for function in basis:
        if not function.integrality_certificate():
            raise StructuralError(f'Basis function h_{function.index} of degree {d} is not p-integral')
    return basis


def integral_on_points(function: HomogeneousFunction, points: Iterable[Sequence[int]]) -> bool:
    """p-integrality at the given (a, c) with a = 1 and c = 0 mod p."""
    for a, c in points:
        if a % function.p != 1 % function.p or c % function.p:
            raise DomainError(f'({a}, {c}) is outside the domain a = 1, c = 0 mod p')
        if not is_p_integral(function.evaluate(a, c), function.p):
            return False
    return True


@dataclass
class SymReduction:
    d: int
    k: int
    subspace: FpSubspace
    m: int
    invariant: bool


def sym_reduction(d: int, k: int, ctx: LevelContext) -> SymReduction:
    """Reduce the lattice mod p through phi and locate it in the filtration."""
    space = CosetSpace(ctx, k)
    if d + 1 > space.size:
        raise ParameterError(f'd+1={d + 1} must not exceed p^(k-1) = {space.size}')
    basis = sym_lattice_basis(d, k, ctx)
    image = FpSubspace(np.vstack([f.reduction(space) for f in basis]), ctx.p, space.size)

    invariant = is_G_invariant(image, space)
    if not invariant:
        raise StructuralError(f'Reduction of the degree-{d} lattice is not G-invariant')
    m = image.dim
    if image != filtration_F(m, k, ctx):
        raise StructuralError(f'Reduction of the degree-{d} lattice is not a filtration step')
    logger.info('Sym^%s at p=%s, k=%s reduces to F(%s)', d, ctx.p, k, m)
    return SymReduction(d, k, image, m, invariant)


def equivariance_check(
    d: int,
    k: int,
    ctx: LevelContext,
    elements: Optional[List[GroupElement]] = None,
) -> bool:
    """reduce(g.f) = g.reduce(f) for the generators of G (or the given elements)."""
    space = CosetSpace(ctx, k)
    basis = sym_lattice_basis(d, k, ctx)
    group_elements = elements if elements is not None else ambient_group(ctx).generator_elements()
    for g in group_elements:
        action = action_matrix(g, space)
        for function in basis:
            lhs = function.translate(g).reduction(space)
            rhs = action @ function.reduction(space) % ctx.p
            if not np.array_equal(lhs, rhs):
                logger.warning('Equivariance of Sym^%s at k=%s failed for %s', d, k, g)
                return False
    return True
