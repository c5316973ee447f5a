import os
import io
import csv
import sys
import tempfile
import numpy as np
from typing import Iterable, Sequence


class Flag:
    """
    A lightweight interrupt flag utility for task cancellation.
    Long ensemble runs poll it between realizations and stop early once it is set.
    """

    def __init__(self):
        self.stop = False
        self.using = False

    def set(self):
        if self.using:
            self.stop = True
            return "The task will be aborted after the running realizations finish."
        else:
            return "No running tasks."

    def clear(self):
        self.stop = False
        self.using = False

    def is_set(self):
        return self.stop

    def __enter__(self):
        self.stop = False
        self.using = True
        return self

    def __exit__(self, exception_type, exception_value, traceback):
        self.clear()


NULL = [None, '', 'None']


def fix_null(*a):
    r = [None if x in NULL else x for x in a]
    return r if len(r) > 1 else r[0]


def parse_csv_list(value: str | None) -> list[str]:
    """'zz, field' -> ['zz', 'field']; empty or None -> []"""
    if fix_null(value) is None:
        return []
    return [i.strip() for i in str(value).split(",") if i.strip()]


def arange_inclusive(start: float, stop: float, step: float) -> np.ndarray:
    """
    Evenly spaced grid from start to stop (inclusive) with the given step.
    Points are computed as start + k*step so repeated runs give identical values.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"stop ({stop}) is smaller than start ({start})")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    grid = start + step * np.arange(count, dtype=float)
    if stop - grid[-1] > 1e-9 * max(1.0, abs(stop)):
        grid = np.append(grid, stop)
    return grid


def format_value(x, digits: int = 12) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    return f"{x:.{digits}g}"


def render_csv(header: Sequence[str], rows: Iterable[Sequence], digits: int = 12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v, digits) for v in row])
    return buf.getvalue()


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence], digits: int = 12):
    """
    Writes the whole table or nothing: rows are rendered in memory first, then the file
    is replaced atomically. path None or '-' writes to stdout.
    """
    text = render_csv(header, rows, digits)
    if fix_null(path) is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    dir_name = os.path.dirname(os.path.abspath(path))
    os.makedirs(dir_name, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".wct-", suffix=".csv", dir=dir_name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
