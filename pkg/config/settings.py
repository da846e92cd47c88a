import os
from pathlib import Path
from typing import List

from dotenv import load_dotenv


BASE_DIR = Path(__file__).resolve().parents[1]
ENV_PATH = BASE_DIR / '.env'

# Load variables from the project root regardless of the current working directory.
load_dotenv(dotenv_path=ENV_PATH)


def _parse_int_list(raw: str) -> List[int]:
    return [int(part) for part in raw.replace(' ', '').split(',') if part]


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in {'1', 'true', 'yes', 'on'}


class Settings:
    def __init__(self) -> None:
        # Application
        self.LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

        # Resource caps
        self.ENUMERATION_CAP = int(os.getenv('ENUMERATION_CAP', str(2 ** 20)))
        self.LINALG_DIMENSION_CAP = int(os.getenv('LINALG_DIMENSION_CAP', '4096'))
        self.ALLOW_LARGE_PRODUCT = _parse_bool(os.getenv('ALLOW_LARGE_PRODUCT', 'false'))

        # Worker pool for verify/sweep dispatch
        self.WORKERS = int(os.getenv('COINVARIANT_LAB_WORKERS', '1'))

        # Suite defaults
        self.DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', '0'))
        self.DEFAULT_PRIMES = _parse_int_list(os.getenv('DEFAULT_PRIMES', '2,3'))
        self.N_MAX = int(os.getenv('N_MAX', '4'))
        self.PRODUCT_N_MAX = int(os.getenv('PRODUCT_N_MAX', '2'))
        self.RANDOM_MODULES = int(os.getenv('RANDOM_MODULES', '200'))
        self.SHAPIRO_MODULES = int(os.getenv('SHAPIRO_MODULES', '50'))
        self.PRODUCT_MODULES = int(os.getenv('PRODUCT_MODULES', '50'))

        # Thresholds
        self.COINVARLEM_CONSTANT = float(os.getenv('COINVARLEM_CONSTANT', '1.0'))


settings = Settings()
