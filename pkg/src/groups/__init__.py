from src.groups.level import GroupElement, LevelContext, conjugate, inverse, multiply
from src.groups.subgroups import (
    ElementTable,
    Family,
    ProductSubgroupSpec,
    SubgroupRealization,
    SubgroupSpec,
    ambient_group,
    index,
    intersection,
    join,
    realize,
    same_subgroup,
    subgroup_generators,
)

__all__ = [
    'ElementTable',
    'Family',
    'GroupElement',
    'LevelContext',
    'ProductSubgroupSpec',
    'SubgroupRealization',
    'SubgroupSpec',
    'ambient_group',
    'conjugate',
    'index',
    'intersection',
    'inverse',
    'join',
    'multiply',
    'realize',
    'same_subgroup',
    'subgroup_generators',
]
