import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, TextIO

import pandas as pd

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

FLOAT_FORMAT = '%.10g'


def _canonical(value: Any) -> str:
    return json.dumps(value, sort_keys=True, default=str)


def sort_rows(rows: Iterable[Row], keys: List[str]) -> List[Row]:
    """Deterministic order by the given parameter columns, ties broken by the whole row."""
    return sorted(rows, key=lambda row: ([_canonical(row.get(key)) for key in keys], _canonical(row)))


def write_json_lines(rows: Iterable[Row], stream: TextIO) -> None:
    for row in rows:
        stream.write(json.dumps(row, sort_keys=True, default=str) + '\n')
    stream.flush()


def write_csv(rows: List[Row], stream: TextIO) -> None:
    frame = pd.DataFrame(rows)
    for column in frame.columns:
        if frame[column].map(lambda value: isinstance(value, (dict, list))).any():
            frame[column] = frame[column].map(_canonical)
    frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


@contextmanager
def open_report(out: Optional[str] = None) -> Iterator[TextIO]:
    """Yield a stream on ``out`` (a file path), or stdout when it is None."""
    if out is None:
        yield sys.stdout
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as stream:
        yield stream
    logger.info('Wrote report %s', path)


def write_report(rows: List[Row], fmt: str, out: Optional[str] = None) -> None:
    with open_report(out) as stream:
        _write(rows, fmt, stream)


def _write(rows: List[Row], fmt: str, stream: TextIO) -> None:
    if fmt == 'csv':
        write_csv(rows, stream)
    else:
        write_json_lines(rows, stream)
