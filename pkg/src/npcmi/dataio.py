"""Two-column CSV files of paired samples.

Files are UTF-8 with LF line endings and an optional header line. Floats
are written with 17 significant digits so they round-trip exactly.
"""
import numpy as np

from .errors import ParseError


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_pairs(path, integer=False):
    """Read an ``(n, 2)`` array, skipping one optional header line.

    Raises
    ------
    ParseError
        With the 1-based line number of the first malformed row.
    """
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if lineno == 1 and not rows and not all(_is_number(f) for f in fields):
                if len(fields) != 2:
                    raise ParseError(f"expected 2 columns, found {len(fields)}", lineno, path)
                continue
            if len(fields) != 2:
                raise ParseError(f"expected 2 columns, found {len(fields)}", lineno, path)
            try:
                vals = [float(f) for f in fields]
            except ValueError:
                raise ParseError(f"non-numeric value in {line!r}", lineno, path) from None
            if not all(np.isfinite(vals)):
                raise ParseError("non-finite value", lineno, path)
            if integer and any(v != int(v) for v in vals):
                raise ParseError(f"non-integer value in {line!r}", lineno, path)
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows", None, path)
    arr = np.array(rows)
    return arr.astype(np.int64) if integer else arr


def format_value(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_pairs(path, data, header=None):
    """Write pairs; integer arrays are written without a decimal point."""
    data = np.asarray(data)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        if np.issubdtype(data.dtype, np.integer):
            for a, b in data:
                fh.write(f"{int(a)},{int(b)}\n")
        else:
            for a, b in data:
                fh.write(f"{float(a):.17g},{float(b):.17g}\n")
