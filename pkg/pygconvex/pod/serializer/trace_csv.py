"""
CurveTrace CSV codec.

    # key=value          provenance lines
    t,x_1..x_d,v_1..v_d[,extra columns]
    rows
    # key=value          footer lines

Floats are written with repr so that traces read back exactly.
"""
import csv
import io
from typing import Dict, Iterable, Optional

import numpy as np

from pygconvex.core.exceptions import InputError
from pygconvex.core.geometry.connection import CurveTrace


def trace_columns(d: int, prefix: str = "") -> list:
    return ["%sx_%d" % (prefix, i + 1) for i in range(d)] + ["%sv_%d" % (prefix, i + 1) for i in range(d)]


def _comment_lines(lines: Iterable[str]):
    return ["# " + line for line in lines]


def format_trace_csv(trace: CurveTrace, header: Iterable[str] = (), footer: Iterable[str] = (),
                     extra: Optional[Dict[str, np.ndarray]] = None) -> str:
    """
    :param trace: the trace
    :param header: provenance lines, written as comments before the column header
    :param footer: lines written as comments after the rows
    :param extra: additional columns, name -> values with one entry per sample
    """
    extra = extra or {}
    for name, values in extra.items():
        if len(values) != len(trace):
            raise InputError("Column %s has %d values for %d samples" % (name, len(values), len(trace)))
    out = io.StringIO()
    for line in _comment_lines(header):
        out.write(line + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t"] + trace_columns(trace.dim) + list(extra.keys()))
    for i in range(len(trace)):
        row = [trace.times[i]] + list(trace.points[i]) + list(trace.velocities[i]) + [v[i] for v in extra.values()]
        writer.writerow([repr(float(v)) for v in row])
    for line in _comment_lines(footer):
        out.write(line + "\n")
    return out.getvalue()


def write_trace_csv(path, trace: CurveTrace, header=(), footer=(), extra=None) -> str:
    text = format_trace_csv(trace, header, footer, extra)
    with open(path, "w", newline="") as f:
        f.write(text)
    return text


def parse_trace_csv(text: str) -> CurveTrace:
    """
    Reads the t, x_*, v_* columns of a trace. Comment lines and extra columns are ignored.
    """
    lines = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines:
        raise InputError("Trace has no column header")
    reader = csv.reader(lines)
    columns = next(reader)
    d = sum(1 for c in columns if c.startswith("x_"))
    if d == 0 or columns[:1 + 2 * d] != ["t"] + trace_columns(d):
        raise InputError("Unexpected trace columns %s" % ",".join(columns))
    rows = []
    for number, row in enumerate(reader, start=2):
        try:
            rows.append([float(v) for v in row[:1 + 2 * d]])
        except ValueError:
            raise InputError("Can't parse trace row %d: %s" % (number, ",".join(row)))
        if len(rows[-1]) != 1 + 2 * d:
            raise InputError("Trace row %d has %d values, expected %d" % (number, len(rows[-1]), 1 + 2 * d))
    if not rows:
        raise InputError("Trace has no rows")
    data = np.array(rows)
    return CurveTrace(data[:, 0], data[:, 1:1 + d], data[:, 1 + d:])


def read_trace_csv(path) -> CurveTrace:
    try:
        with open(path, newline="") as f:
            return parse_trace_csv(f.read())
    except OSError as e:
        raise InputError("Can't read %s: %s" % (path, e.strerror))


def read_trace_comments(text: str) -> Dict[str, str]:
    """ key=value pairs of the comment lines. """
    entries = {}
    for line in text.splitlines():
        if line.startswith("#") and "=" in line:
            key, value = line[1:].strip().split("=", 1)
            entries[key.strip()] = value.strip()
    return entries


def format_residual_csv(residuals, header: Iterable[str] = ()) -> str:
    """ iteration,residual rows of the alternating scaling. """
    out = io.StringIO()
    for line in _comment_lines(header):
        out.write(line + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["iteration", "residual"])
    for i, r in enumerate(residuals):
        writer.writerow([i, repr(float(r))])
    return out.getvalue()


def write_residual_csv(path, residuals, header=()) -> str:
    text = format_residual_csv(residuals, header)
    with open(path, "w", newline="") as f:
        f.write(text)
    return text
