"""
Model files (JSON) and Table-style CSV exports.
"""

import csv
import io
import math
from fractions import Fraction

import numpy as np
import orjson
import pydantic_core

from src import log
from src import storage
from src.app.corpus.types import Alphabet

from . import service
from . import types

__all__ = [
    "SchemaMismatch",
    "IOFailure",
    "load_model",
    "save_model",
    "dump_model",
    "as_tpm",
    "parse_model",
    "export_tpm_csv",
    "export_class_csv",
]

LOG = log.get_logger(__name__)

Model = types.CountMatrix | types.TransitionMatrix


class SchemaMismatch(service.Error):
    """Raised when a model file does not describe a valid matrix."""

    code = "SCHEMA_MISMATCH"


class IOFailure(service.Error):
    """Raised when a model file cannot be read or written."""

    code = "IO_FAILURE"


def _fraction_parts(value: str) -> tuple[int, int]:
    """Split "num/den" (or a bare integer) without reducing it."""
    num, _, den = value.partition("/")
    try:
        parts = int(num), int(den or 1)
    except ValueError:
        raise SchemaMismatch(f"Invalid probability {value!r}, expected 'num/den'.")
    if parts[1] <= 0 or parts[0] < 0:
        raise SchemaMismatch(f"Invalid probability {value!r}.")
    return parts


def dump_model(model: Model) -> bytes:
    """Serialize a count or transition matrix to the model file schema."""
    alphabet = model.alphabet
    rows: list[dict] = []
    for row in range(model.n_rows):
        if isinstance(model, types.CountMatrix):
            total = int(model.row_totals[row])
            values: list[int | str] = [int(c) for c in model.counts[row]]
        else:
            total = int(model.denominators[row])
            values = [f"{int(n)}/{total}" for n in model.numerators[row]]
        rows.append(
            {
                "tuple": model.row_label(row),
                "total": total,
                "counts": dict(zip(alphabet.symbols, values)) if total else {},
            }
        )
    document = {
        "alphabet": {"id": alphabet.id, "symbols": list(alphabet.symbols)},
        "order": model.order,
        "rows": rows,
    }
    return orjson.dumps(document, option=orjson.OPT_INDENT_2) + b"\n"


def parse_model(data: bytes) -> Model:
    """Decode a model file.

    :raises :class:`SchemaMismatch`
    """
    try:
        document = types.ModelFile(**orjson.loads(data))
        alphabet = Alphabet(id=document.alphabet.id, symbols=tuple(document.alphabet.symbols))
    except (orjson.JSONDecodeError, TypeError) as err:
        raise SchemaMismatch(f"Cannot decode the model file: {err}")
    except pydantic_core.ValidationError as err:
        e = err.errors()[0]
        raise SchemaMismatch(f"Invalid model file: {'.'.join(map(str, e['loc']))}: {e['msg']}")

    try:
        n_rows = service.check_order(alphabet, document.order)
    except service.OrderTooLarge as err:
        raise SchemaMismatch(str(err))
    labels = {label: row for row, label in enumerate(alphabet.state_labels(document.order))}

    values = [v for r in document.rows for v in r.counts.values()]
    kinds = {type(v) for v in values}
    if len(kinds) > 1:
        raise SchemaMismatch("A model file mixes integer counts and 'num/den' probabilities.")
    is_tpm = kinds == {str}

    matrix = np.zeros((n_rows, alphabet.size), dtype=np.int64)
    denominators = np.zeros(n_rows, dtype=np.int64)
    seen: set[int] = set()
    for r in document.rows:
        if (row := labels.get(r.state)) is None:
            raise SchemaMismatch(f"Unknown state tuple {r.state!r}.")
        if row in seen:
            raise SchemaMismatch(f"Duplicate state tuple {r.state!r}.")
        seen.add(row)
        if unknown := set(r.counts) - set(alphabet.symbols):
            raise SchemaMismatch(f"Row {r.state}: unknown symbols {sorted(unknown)}.")

        if is_tpm:
            parts = {s: _fraction_parts(str(v)) for s, v in r.counts.items()}
            den = math.lcm(*(d for _, d in parts.values())) if parts else 0
            for s, (num, d) in parts.items():
                matrix[row, alphabet.index(s)] = num * (den // d)
            total = int(matrix[row].sum())
            if total == 0:
                den = 0
            elif total != den:
                raise SchemaMismatch(
                    f"Row {r.state} sums to {Fraction(total, den)}, expected 1 or 0."
                )
            denominators[row] = den
        else:
            for s, v in r.counts.items():
                if int(v) < 0:
                    raise SchemaMismatch(f"Row {r.state}: negative count for {s}.")
                matrix[row, alphabet.index(s)] = int(v)
            if int(matrix[row].sum()) != r.total:
                raise SchemaMismatch(
                    f"Row {r.state}: counts sum to {int(matrix[row].sum())}, total is {r.total}."
                )

    if is_tpm:
        return types.TransitionMatrix(
            alphabet=alphabet,
            order=document.order,
            numerators=matrix,
            denominators=denominators,
        )
    return types.CountMatrix(alphabet=alphabet, order=document.order, counts=matrix)


def load_model(key: str) -> Model:
    """Read a count or transition matrix from a model file.

    :raises :class:`SchemaMismatch`
    :raises :class:`IOFailure`
    """
    try:
        data = storage.default.get(key)
    except storage.Error as err:
        raise IOFailure(str(err))
    try:
        model = parse_model(data)
    except SchemaMismatch as err:
        raise SchemaMismatch(f"{key}: {err}")
    LOG.debug("Loaded model.", key=key, kind=type(model).__name__, order=model.order)
    return model


def save_model(model: Model, key: str) -> None:
    """Write a model file.

    :raises :class:`IOFailure`
    """
    try:
        storage.default.create(key, dump_model(model))
    except storage.Error as err:
        raise IOFailure(str(err))
    LOG.info("Saved model.", key=key, kind=type(model).__name__, order=model.order)


def as_tpm(model: Model) -> types.TransitionMatrix:
    return service.to_tpm(model) if isinstance(model, types.CountMatrix) else model


def _csv(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def export_tpm_csv(tpm: types.TransitionMatrix) -> str:
    """The tpm laid out as a table: `num/den` cells over the row total, `0` for zero rows."""
    rows = []
    for row in range(tpm.n_rows):
        den = int(tpm.denominators[row])
        cells = [f"{int(n)}/{den}" if den else "0" for n in tpm.numerators[row]]
        rows.append([tpm.row_label(row), *cells])
    return _csv(["state", *tpm.alphabet.symbols], rows)


def export_class_csv(classes: types.ClassMatrix) -> str:
    """The class matrix laid out as a table: `[lo-hi)` cells, `0` for zero rows."""
    rows = []
    for row in range(classes.n_rows):
        den = int(classes.denominators[row])
        bounds = classes.cumulative[row]
        cells = [
            f"[{int(lo)}/{den}-{int(hi)}/{den})" if den else "0"
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        rows.append([classes.row_label(row), *cells])
    return _csv(["state", *classes.alphabet.symbols], rows)
