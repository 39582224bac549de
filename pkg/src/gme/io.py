"""File formats: JSON state/ensemble/result files and sweep CSV.

One structured-text (JSON) format covers every object the command line
reads or writes.  Complex numbers are encoded as ``[re, im]`` pairs, and
vectors and matrices follow the row-major tensor-basis convention of
:mod:`gme.states`.  Floats are serialized at full precision so a write
then read round-trips exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .mixed import KktMultipliers, MeasureResult
from .states import (
    DensityMatrix,
    ProductState,
    PureState,
    SeparableEnsemble,
    SpaceShape,
)


class StateFileError(ValueError):
    """Malformed input file; carries the offending path and field."""

    def __init__(self, path, field, message):
        self.path = str(path)
        self.field = field
        super().__init__(f"{path}: field '{field}': {message}")


def _encode_complex_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _decode_complex_vector(data, path, field) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(path, field, f"not numeric: {exc}") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise StateFileError(
            path, field, f"expected a list of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[:, 0] + 1j * arr[:, 1]


def _load_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StateFileError(path, "<file>", str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(
            path, "<json>", f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def _dump_json(payload, path=None) -> str:
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _shape_from(doc, path) -> SpaceShape:
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims:
        raise StateFileError(path, "dims", "missing or not a nonempty list")
    try:
        return SpaceShape(tuple(int(d) for d in dims))
    except (TypeError, ValueError) as exc:
        raise StateFileError(path, "dims", str(exc)) from None


def read_state(path):
    """Read a ``pure`` or ``density`` state file."""
    doc = _load_json(path)
    kind = doc.get("kind")
    if kind not in ("pure", "density"):
        raise StateFileError(path, "kind", f"expected 'pure' or 'density', got {kind!r}")
    shape = _shape_from(doc, path)
    n = shape.total_dim
    data = doc.get("data")
    if data is None:
        raise StateFileError(path, "data", "missing")
    if kind == "pure":
        amps = _decode_complex_vector(data, path, "data")
        if amps.size != n:
            raise StateFileError(
                path, "data", f"dims mismatch: {amps.size} amplitudes for dimension {n}"
            )
        try:
            return PureState(shape, amps)
        except ValueError as exc:
            raise StateFileError(path, "data", str(exc)) from None
    if not isinstance(data, list) or len(data) != n:
        raise StateFileError(
            path, "data", f"dims mismatch: expected {n} rows, got "
            f"{len(data) if isinstance(data, list) else type(data).__name__}"
        )
    rows = [_decode_complex_vector(row, path, f"data[{i}]") for i, row in enumerate(data)]
    mat = np.vstack(rows)
    if mat.shape != (n, n):
        raise StateFileError(path, "data", f"dims mismatch: got shape {mat.shape}")
    try:
        return DensityMatrix(shape, mat)
    except ValueError as exc:
        raise StateFileError(path, "data", str(exc)) from None


def write_state(obj, path=None) -> str:
    """Write a PureState or DensityMatrix to the structured format."""
    if isinstance(obj, PureState):
        payload = {
            "kind": "pure",
            "dims": list(obj.shape.dims),
            "data": _encode_complex_vector(obj.amplitudes),
        }
    elif isinstance(obj, DensityMatrix):
        payload = {
            "kind": "density",
            "dims": list(obj.shape.dims),
            "data": [_encode_complex_vector(row) for row in obj.entries],
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} as a state")
    return _dump_json(payload, path)


def read_ensemble(path) -> SeparableEnsemble:
    doc = _load_json(path)
    if doc.get("kind") != "ensemble":
        raise StateFileError(path, "kind", f"expected 'ensemble', got {doc.get('kind')!r}")
    shape = _shape_from(doc, path)
    weights = doc.get("weights")
    states_doc = doc.get("states")
    if not isinstance(weights, list):
        raise StateFileError(path, "weights", "missing or not a list")
    if not isinstance(states_doc, list) or len(states_doc) != len(weights):
        raise StateFileError(path, "states", "missing or length differs from weights")
    states = []
    for k, entry in enumerate(states_doc):
        factors_doc = entry.get("factors") if isinstance(entry, dict) else None
        if not isinstance(factors_doc, list) or len(factors_doc) != shape.num_factors:
            raise StateFileError(
                path, f"states[{k}].factors",
                f"expected {shape.num_factors} factors"
            )
        factors = tuple(
            _decode_complex_vector(f, path, f"states[{k}].factors[{i}]")
            for i, f in enumerate(factors_doc)
        )
        try:
            states.append(ProductState(shape, factors))
        except ValueError as exc:
            raise StateFileError(path, f"states[{k}]", str(exc)) from None
    try:
        return SeparableEnsemble(shape, np.asarray(weights, dtype=float), tuple(states))
    except ValueError as exc:
        raise StateFileError(path, "weights", str(exc)) from None


def write_ensemble(e: SeparableEnsemble, path=None) -> str:
    payload = _ensemble_payload(e)
    return _dump_json(payload, path)


def _ensemble_payload(e: SeparableEnsemble) -> dict:
    return {
        "kind": "ensemble",
        "dims": list(e.shape.dims),
        "weights": [float(w) for w in e.weights],
        "states": [
            {"factors": [_encode_complex_vector(f) for f in s.factors]}
            for s in e.states
        ],
    }


def read_multipliers(path) -> KktMultipliers:
    doc = _load_json(path)
    if doc.get("kind") != "multipliers":
        raise StateFileError(path, "kind", f"expected 'multipliers', got {doc.get('kind')!r}")
    try:
        return KktMultipliers(
            lam=float(doc["lam"]),
            kappa=float(doc["kappa"]),
            mu=np.asarray(doc["mu"], dtype=float),
            tau=np.asarray(doc["tau"], dtype=float),
        )
    except KeyError as exc:
        raise StateFileError(path, str(exc), "missing") from None
    except (TypeError, ValueError) as exc:
        raise StateFileError(path, "multipliers", str(exc)) from None


def _multipliers_payload(m: KktMultipliers) -> dict:
    return {
        "kind": "multipliers",
        "lam": float(m.lam),
        "kappa": float(m.kappa),
        "mu": [float(x) for x in m.mu],
        "tau": [float(x) for x in m.tau],
    }


def write_multipliers(m: KktMultipliers, path=None) -> str:
    return _dump_json(_multipliers_payload(m), path)


def write_measure_result(result: MeasureResult, path=None) -> str:
    payload = {
        "kind": "measure_result",
        "chi": float(result.chi),
        "half_e_sq": float(result.measure_sq_half),
        "measure": float(result.measure),
        "kkt_residual": float(result.kkt_residual),
        "starts_used": int(result.starts_used),
        "converged": bool(result.converged),
        "ensemble": _ensemble_payload(result.ensemble),
        "multipliers": _multipliers_payload(result.multipliers),
    }
    return _dump_json(payload, path)


def write_sweep_csv(rows, path=None) -> str:
    """Serialize sweep rows as ``alpha,chi,half_E_sq,kkt_residual,converged``."""
    import io as _io

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "chi", "half_E_sq", "kkt_residual", "converged"])
    for r in rows:
        writer.writerow([
            repr(float(r.alpha)),
            repr(float(r.chi)),
            repr(float(r.half_e_sq)),
            repr(float(r.kkt_residual)),
            str(bool(r.converged)).lower(),
        ])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def ensemble_from_rows(dims, rows) -> SeparableEnsemble:
    """Build an ensemble from flat published-table rows.

    Each row lists the weight followed by the real parts of every factor
    (factor-major) and then the imaginary parts in the same order:
    ``[p, x_1^(1), ..., x_d^(m), y_1^(1), ..., y_d^(m)]``.  Values printed
    at low precision are tolerated: factors are renormalized to unit norm.
    """
    shape = SpaceShape(tuple(int(d) for d in dims))
    sizes = shape.dims
    span = sum(sizes)
    weights = []
    states = []
    for k, row in enumerate(rows):
        row = [float(x) for x in row]
        if len(row) != 1 + 2 * span:
            raise ValueError(
                f"row {k} has {len(row)} entries, expected {1 + 2 * span}"
            )
        weights.append(row[0])
        xs = row[1:1 + span]
        ys = row[1 + span:]
        factors = []
        offset = 0
        for d in sizes:
            vec = np.asarray(xs[offset:offset + d]) + 1j * np.asarray(ys[offset:offset + d])
            factors.append(vec / np.linalg.norm(vec))
            offset += d
        states.append(ProductState(shape, tuple(factors)))
    return SeparableEnsemble(shape, np.asarray(weights), tuple(states))
