"""CSV output with round-trip float precision."""

from __future__ import annotations

import io
import math
import sys
from typing import Iterable, Optional, Sequence

import numpy as np


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("NaN cannot be written to CSV output")
    return repr(x)  # shortest string that parses back to the same double


def render_csv(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = (),
               divergence_note: Optional[str] = None) -> str:
    """Render a table as CSV text.

    ``comments`` become leading ``# `` lines.  If any cell is infinite a
    footer ``# diverges: <note>`` is appended.
    """
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    out.write(",".join(header) + "\n")
    saw_inf = False
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        cells = [format_cell(v) for v in row]
        saw_inf = saw_inf or any(c in ("inf", "-inf") for c in cells)
        out.write(",".join(cells) + "\n")
    if saw_inf:
        out.write(f"# diverges: {divergence_note or 'non-finite value'}\n")
    return out.getvalue()


def emit_csv(header, rows, path=None, comments=(), divergence_note=None) -> str:
    """Write CSV to ``path`` (stdout when ``None`` or ``"-"``); return the text."""
    text = render_csv(header, rows, comments, divergence_note)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text
