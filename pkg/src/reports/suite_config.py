import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values
from sympy import isprime

from config.settings import _parse_bool, _parse_int_list, settings
from src.utils.exceptions import ParameterError

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')


@dataclass(frozen=True)
class SuiteConfig:
    """Parameters of one verify/sweep run; recorded in every report it produces."""

    primes: List[int] = field(default_factory=lambda: list(settings.DEFAULT_PRIMES))
    n_max: int = settings.N_MAX
    product_n_max: int = settings.PRODUCT_N_MAX
    t_values: List[int] = field(default_factory=lambda: [1, 2])
    seed: int = settings.DEFAULT_SEED
    enum_cap: int = settings.ENUMERATION_CAP
    dim_cap: int = settings.LINALG_DIMENSION_CAP
    random_modules: int = settings.RANDOM_MODULES
    shapiro_modules: int = settings.SHAPIRO_MODULES
    product_modules: int = settings.PRODUCT_MODULES
    workers: int = settings.WORKERS
    out: Optional[str] = None
    fmt: str = 'json'
    relaxed_decompose: bool = False
    allow_large_product: bool = settings.ALLOW_LARGE_PRODUCT

    def validate(self) -> 'SuiteConfig':
        if not self.primes:
            raise ParameterError('At least one prime is required')
        for p in self.primes:
            if not isprime(p):
                raise ParameterError(f'{p} is not prime')
        for name in ('n_max', 'product_n_max', 'enum_cap', 'dim_cap', 'workers'):
            if getattr(self, name) < 1:
                raise ParameterError(f'{name} must be positive, got {getattr(self, name)}')
        for name in ('random_modules', 'shapiro_modules', 'product_modules'):
            if getattr(self, name) < 0:
                raise ParameterError(f'{name} must be nonnegative, got {getattr(self, name)}')
        if not set(self.t_values) <= {1, 2}:
            raise ParameterError(f't must be 1 or 2, got {self.t_values}')
        if self.fmt not in FORMATS:
            raise ParameterError(f'format must be one of {FORMATS}, got {self.fmt!r}')
        return self

    def caps(self) -> Dict[str, Any]:
        return {
            'ENUMERATION_CAP': self.enum_cap,
            'LINALG_DIMENSION_CAP': self.dim_cap,
            'ALLOW_LARGE_PRODUCT': self.allow_large_product,
        }

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


# Keys accepted in a config file, mapped to (field, parser).
_FILE_KEYS = {
    'PRIMES': ('primes', _parse_int_list),
    'N_MAX': ('n_max', int),
    'PRODUCT_N_MAX': ('product_n_max', int),
    'T': ('t_values', _parse_int_list),
    'SEED': ('seed', int),
    'ENUMERATION_CAP': ('enum_cap', int),
    'LINALG_DIMENSION_CAP': ('dim_cap', int),
    'RANDOM_MODULES': ('random_modules', int),
    'SHAPIRO_MODULES': ('shapiro_modules', int),
    'PRODUCT_MODULES': ('product_modules', int),
    'WORKERS': ('workers', int),
    'OUTPUT': ('out', str),
    'FORMAT': ('fmt', str),
    'RELAXED_DECOMPOSE': ('relaxed_decompose', _parse_bool),
    'ALLOW_LARGE_PRODUCT': ('allow_large_product', _parse_bool),
}


def read_config_file(path: Path) -> Dict[str, Any]:
    """KEY=VALUE file, same syntax as .env."""
    if not Path(path).is_file():
        raise ParameterError(f'Config file {path} does not exist')
    values: Dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        if raw is None:
            continue
        if key.upper() not in _FILE_KEYS:
            raise ParameterError(f'Unknown config key {key!r} in {path}')
        name, parser = _FILE_KEYS[key.upper()]
        try:
            values[name] = parser(raw)
        except ValueError as exc:
            raise ParameterError(f'Bad value for {key} in {path}: {raw!r}') from exc
    return values


def build_config(overrides: Mapping[str, Any], config_path: Optional[Path] = None) -> SuiteConfig:
    """settings < config file < command-line flags (None means not given)."""
    config = SuiteConfig()
    if config_path is not None:
        config = replace(config, **read_config_file(config_path))
        logger.info('Loaded config file %s', config_path)
    given = {name: value for name, value in overrides.items() if value is not None}
    return replace(config, **given).validate()
