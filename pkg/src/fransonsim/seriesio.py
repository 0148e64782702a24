"""CSV reading and writing shared by the runner, the analysis and the CLI.

Files carry metadata as leading '# key = value' comment lines, then one
header line, then comma-separated rows. Floats are written with 9
significant digits; integer columns are written as plain integers.
Writing the same data twice produces byte-identical files.
"""

import csv
import io

import numpy as np


def format_number(x):
    """Render one float with 9 significant digits."""
    return f"{x:.9g}"


def write_table(fh, header, columns, meta=None):
    """Write metadata comments, a header line and the column data."""
    if meta:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
    fh.write(",".join(header) + "\n")
    if not columns:
        return
    rendered = []
    for col in columns:
        col = np.asarray(col)
        if np.issubdtype(col.dtype, np.integer):
            rendered.append([str(int(v)) for v in col])
        else:
            rendered.append([format_number(float(v)) for v in col])
    for row in zip(*rendered):
        fh.write(",".join(row) + "\n")


def table_text(header, columns, meta=None):
    """Render a table to a string."""
    buf = io.StringIO()
    write_table(buf, header, columns, meta)
    return buf.getvalue()


def write_table_path(path, header, columns, meta=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_table(fh, header, columns, meta)


def read_table(fh):
    """Read (meta, columns) from a table stream; all columns come back as floats."""
    meta = {}
    header = None
    rows = []
    for line in fh:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = [name.strip() for name in next(csv.reader([line]))]
            continue
        rows.append(next(csv.reader([line])))
    if header is None:
        raise ValueError("no header line found")
    data = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(header)))
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return meta, columns


def read_table_path(path):
    with open(path, "r", encoding="utf-8") as fh:
        return read_table(fh)
