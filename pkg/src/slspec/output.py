"""Deterministic machine-readable output: JSON, CSV, atomic file writes.

JSON is emitted by a small local serializer so float formatting is under
our control: 17 significant digits (round-trip fidelity), keys sorted,
no whitespace variance between runs.  CSV uses 12 significant digits.
NaN/Inf are rejected; error payloads should be encoded as strings instead.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

from .errors import InvalidInputError

JSON_SIG = 17
CSV_SIG = 12


def fmt_float(x: float, sig: int = JSON_SIG) -> str:
    if not math.isfinite(x):
        raise InvalidInputError("non-finite float in serialized output")
    return f"{x:.{sig}g}"


def to_json(obj, sig: int = JSON_SIG) -> str:
    """Serialize dicts/lists/scalars; complex becomes [re, im]."""
    pieces = []
    _emit(obj, pieces, sig)
    return "".join(pieces)


def _emit(obj, out, sig):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt_float(obj, sig))
    elif isinstance(obj, complex):
        out.append("[" + fmt_float(obj.real, sig) + "," + fmt_float(obj.imag, sig) + "]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for k in sorted(obj):
            if not isinstance(k, str):
                raise InvalidInputError("JSON object keys must be strings")
            if not first:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _emit(obj[k], out, sig)
            first = False
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out, sig)
        out.append("]")
    else:
        try:
            _emit(float(obj), out, sig)
        except (TypeError, ValueError):
            raise InvalidInputError(f"cannot serialize {type(obj).__name__}") from None


def csv_rows(rows, header=None, sig: int = CSV_SIG) -> str:
    lines = []
    if header:
        lines.append(",".join(header))
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, int):
                cells.append(str(v))
            else:
                cells.append(fmt_float(float(v), sig))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def atomic_write_text(path: str, text: str):
    """Write via a temp file in the same directory plus rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config_file(path: str) -> dict:
    """Read a TOML or JSON config file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if path.endswith(".json"):
        return json.loads(data)
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    return tomllib.loads(data.decode())
