import os

import pytest

from config.settings import Settings, _parse_bool, _parse_int_list


def test_defaults(mocker):
    mocker.patch.dict(os.environ, {}, clear=True)
    values = Settings()
    assert values.DEFAULT_PRIMES == [2, 3]
    assert values.N_MAX == 4
    assert values.WORKERS == 1
    assert values.ALLOW_LARGE_PRODUCT is False
    assert values.LINALG_DIMENSION_CAP == 4096


def test_environment_overrides(mocker):
    mocker.patch.dict(
        os.environ,
        {
            'DEFAULT_PRIMES': '3, 5',
            'COINVARIANT_LAB_WORKERS': '4',
            'ALLOW_LARGE_PRODUCT': 'yes',
            'ENUMERATION_CAP': '1000',
        },
    )
    values = Settings()
    assert values.DEFAULT_PRIMES == [3, 5]
    assert values.WORKERS == 4
    assert values.ALLOW_LARGE_PRODUCT is True
    assert values.ENUMERATION_CAP == 1000


@pytest.mark.parametrize('raw, expected', [('1', True), ('True', True), ('on', True), ('0', False), ('no', False)])
def test_parse_bool(raw, expected):
    assert _parse_bool(raw) is expected


def test_parse_int_list():
    assert _parse_int_list('2,3,,5') == [2, 3, 5]
    with pytest.raises(ValueError):
        _parse_int_list('2,x')
