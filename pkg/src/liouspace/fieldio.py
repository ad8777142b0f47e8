"""Plain-text field files.

Layout::

    # kind=wave_function
    # t=1
    # xgrid=-6,6,257
    # gauge_anchor=none
    # columns=x,re,im
    -6,1.2345678901234567e-09,-3.0000000000000001e-10
    ...

Records are row-major with the second coordinate fastest.  Numbers carry
17 significant digits, so reading a file and writing it back reproduces it
byte for byte.
"""
from __future__ import annotations

import io
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from .exceptions import FieldFormatError
from .fields import DensityMatrixField, PhaseSpaceField, UniformGrid1D, WaveFunctionField
from .schrodinger_like import GaugePhase

KINDS = ("phase_space_field", "density_matrix", "wave_function", "phase_curve")
COLUMNS = {
    "phase_space_field": "q,p,value",
    "density_matrix": "x,xp,re,im",
    "wave_function": "x,re,im",
    "phase_curve": "t,phi",
}


def _num(v) -> str:
    return format(float(v), ".17g")


def _rows(columns) -> str:
    cols = [np.ravel(c) for c in columns]
    return "".join(",".join(_num(v) for v in row) + "\n" for row in zip(*cols))


def format_field(obj) -> str:
    """Serialize a field (or a tabulated gauge phase) to the text format."""
    if isinstance(obj, PhaseSpaceField):
        q, p = np.meshgrid(obj.qgrid.points, obj.pgrid.points, indexing="ij")
        meta = [
            ("kind", "phase_space_field"),
            ("t", _num(obj.time)),
            ("qgrid", obj.qgrid.spec()),
            ("pgrid", obj.pgrid.spec()),
            ("classical", "true" if obj.classical else "false"),
        ]
        body = _rows([q, p, obj.values])
    elif isinstance(obj, DensityMatrixField):
        x, xp = np.meshgrid(obj.xgrid.points, obj.xgrid.points, indexing="ij")
        meta = [("kind", "density_matrix"), ("t", _num(obj.time)), ("xgrid", obj.xgrid.spec())]
        body = _rows([x, xp, obj.values.real, obj.values.imag])
    elif isinstance(obj, WaveFunctionField):
        anchor = "none" if obj.gauge_anchor is None else str(obj.gauge_anchor)
        meta = [
            ("kind", "wave_function"),
            ("t", _num(obj.time)),
            ("xgrid", obj.xgrid.spec()),
            ("gauge_anchor", anchor),
        ]
        body = _rows([obj.xgrid.points, obj.values.real, obj.values.imag])
    elif isinstance(obj, GaugePhase):
        if obj.samples is None:
            raise ValueError("only tabulated gauge phases can be written")
        ts, phis = obj.samples
        meta = [
            ("kind", "phase_curve"),
            ("t", _num(ts[-1])),
            ("method", obj.kind),
            ("constant", _num(obj.constant)),
        ]
        body = _rows([ts, phis])
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    kind = meta[0][1]
    meta.append(("columns", COLUMNS[kind]))
    return "".join(f"# {k}={v}\n" for k, v in meta) + body


def _split(text: str) -> Tuple[Dict[str, str], List[str]]:
    meta: Dict[str, str] = {}
    records: List[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if records:
                raise FieldFormatError(f"line {lineno}: metadata after data records")
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise FieldFormatError(f"line {lineno}: expected '# key=value'")
            meta[key.strip()] = value.strip()
        else:
            records.append(line)
    return meta, records


def _need(meta, key):
    try:
        return meta[key]
    except KeyError:
        raise FieldFormatError(f"missing metadata key {key!r}") from None


def _grid(meta, key) -> UniformGrid1D:
    try:
        return UniformGrid1D.parse(_need(meta, key))
    except ValueError as exc:
        raise FieldFormatError(f"bad {key}: {exc}") from None


def _table(records, ncols) -> np.ndarray:
    try:
        rows = [[float(v) for v in r.split(",")] for r in records]
    except ValueError as exc:
        raise FieldFormatError(f"non-numeric record: {exc}") from None
    if any(len(r) != ncols for r in rows):
        raise FieldFormatError(f"every record must have {ncols} columns")
    return np.array(rows, dtype=float).reshape(-1, ncols)


def _check_coords(actual, expected, name):
    scale = max(1.0, float(np.abs(expected).max()))
    if actual.shape != expected.shape or np.abs(actual - expected).max() > 1e-12 * scale:
        raise FieldFormatError(f"{name} coordinates do not match the declared grid")


def parse_field(text: str):
    meta, records = _split(text)
    kind = _need(meta, "kind")
    if kind not in KINDS:
        raise FieldFormatError(f"unknown kind {kind!r}")
    if meta.get("columns", COLUMNS[kind]) != COLUMNS[kind]:
        raise FieldFormatError(f"columns for {kind} must be {COLUMNS[kind]}")
    try:
        t = float(_need(meta, "t"))
    except ValueError:
        raise FieldFormatError(f"bad time {meta['t']!r}") from None

    if kind == "phase_space_field":
        qg, pg = _grid(meta, "qgrid"), _grid(meta, "pgrid")
        tab = _table(records, 3)
        if len(tab) != qg.n * pg.n:
            raise FieldFormatError(f"expected {qg.n * pg.n} records, found {len(tab)}")
        q, p = np.meshgrid(qg.points, pg.points, indexing="ij")
        _check_coords(tab[:, 0], q.ravel(), "q")
        _check_coords(tab[:, 1], p.ravel(), "p")
        classical = _need(meta, "classical") if "classical" in meta else "false"
        if classical not in ("true", "false"):
            raise FieldFormatError(f"classical must be true or false, got {classical!r}")
        return PhaseSpaceField(qg, pg, tab[:, 2].reshape(qg.n, pg.n), t, classical == "true")

    if kind == "density_matrix":
        xg = _grid(meta, "xgrid")
        tab = _table(records, 4)
        if len(tab) != xg.n**2:
            raise FieldFormatError(f"expected {xg.n**2} records, found {len(tab)}")
        x, xp = np.meshgrid(xg.points, xg.points, indexing="ij")
        _check_coords(tab[:, 0], x.ravel(), "x")
        _check_coords(tab[:, 1], xp.ravel(), "xp")
        vals = (tab[:, 2] + 1j * tab[:, 3]).reshape(xg.n, xg.n)
        return DensityMatrixField(xg, vals, t)

    if kind == "wave_function":
        xg = _grid(meta, "xgrid")
        tab = _table(records, 3)
        if len(tab) != xg.n:
            raise FieldFormatError(f"expected {xg.n} records, found {len(tab)}")
        _check_coords(tab[:, 0], xg.points, "x")
        raw = meta.get("gauge_anchor", "none")
        try:
            anchor = None if raw == "none" else int(raw)
        except ValueError:
            raise FieldFormatError(f"bad gauge_anchor {raw!r}") from None
        return WaveFunctionField(xg, tab[:, 1] + 1j * tab[:, 2], t, gauge_anchor=anchor)

    tab = _table(records, 2)
    if len(tab) == 0:
        raise FieldFormatError("phase curve has no records")
    try:
        return GaugePhase(
            meta.get("method", "ode_integrated"),
            float(meta.get("constant", "0")),
            (tab[:, 0], tab[:, 1]),
        )
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from None


def write_field(path: Union[str, Path, io.TextIOBase], obj) -> None:
    text = format_field(obj)
    if isinstance(path, (str, Path)):
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        path.write(text)


def read_field(path: Union[str, Path]):
    with open(path, encoding="ascii") as fh:
        return parse_field(fh.read())
