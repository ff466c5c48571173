"""File formats: per-shot CSV, moment JSON, model JSON, grid exports.

CSV shot files carry the header ``shot,m1,m2`` with integer counts. Moment
JSON carries the five moment keys plus the level tag, and optionally ``eta``
and a ``noise`` object of the same shape. All floating-point CSV output is
printed with 17 significant digits so reruns are byte-identical.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .exceptions import InputFormatError
from .model import TwinBeamModel
from .moments import LEVELS, MomentSet, RawCountData

_FLOAT_FMT = "%.17g"


# -- per-shot CSV ----------------------------------------------------------

def read_shots_csv(path, eta=1.0, noise=None) -> RawCountData:
    path = Path(path)
    shots = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputFormatError(f"{path}: empty file", line=1)
        if [h.strip().lower() for h in header] != ["shot", "m1", "m2"]:
            raise InputFormatError(
                f"{path}: line 1: expected header 'shot,m1,m2', got {','.join(header)!r}",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise InputFormatError(
                    f"{path}: line {lineno}: expected 3 fields, got {len(row)}",
                    line=lineno,
                )
            try:
                m1 = int(row[1])
                m2 = int(row[2])
            except ValueError:
                raise InputFormatError(
                    f"{path}: line {lineno}: counts must be integers, got "
                    f"{row[1]!r},{row[2]!r}",
                    line=lineno,
                )
            if m1 < 0 or m2 < 0:
                raise InputFormatError(
                    f"{path}: line {lineno}: counts must be nonnegative",
                    line=lineno,
                )
            shots.append((m1, m2))
    if not shots:
        raise InputFormatError(f"{path}: no shot records", line=2)
    return RawCountData(shots=np.asarray(shots, dtype=np.int64), eta=eta, noise=noise)


def write_shots_csv(path, shots: np.ndarray):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["shot", "m1", "m2"])
        for i, (m1, m2) in enumerate(shots):
            writer.writerow([i, int(m1), int(m2)])


# -- moment JSON -------------------------------------------------------------

def moments_from_dict(d, default_level=None):
    level = d.get("level", default_level)
    if level not in LEVELS:
        raise InputFormatError(f"moment JSON needs a level tag in {LEVELS}, got {level!r}")
    try:
        ms = MomentSet(
            level=level,
            mean1=float(d["mean1"]),
            mean2=float(d["mean2"]),
            second1=float(d["second1"]),
            second2=float(d["second2"]),
            cross=float(d["cross"]),
        )
    except KeyError as e:
        raise InputFormatError(f"moment JSON missing key {e.args[0]!r}")
    return ms


def read_moments_json(path):
    """Returns (moments, eta or None, noise MomentSet or None)."""
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: invalid JSON: {e}", line=e.lineno)
    ms = moments_from_dict(d)
    eta = d.get("eta")
    noise = None
    if d.get("noise") is not None:
        noise = moments_from_dict(d["noise"], default_level="photoelectron")
    return ms, (float(eta) if eta is not None else None), noise


def write_moments_json(path, ms: MomentSet, eta=None, noise=None):
    d = ms.to_dict()
    if eta is not None:
        d["eta"] = eta
    if noise is not None:
        d["noise"] = noise.to_dict()
    Path(path).write_text(json.dumps(d, indent=2) + "\n")


# -- model JSON --------------------------------------------------------------

def read_model_json(path) -> TwinBeamModel:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: invalid JSON: {e}", line=e.lineno)
    try:
        return TwinBeamModel.from_dict(d)
    except (KeyError, TypeError, ValueError) as e:
        raise InputFormatError(f"{path}: invalid model JSON: {e}")


def write_model_json(path, model: TwinBeamModel):
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


# -- grid exports -------------------------------------------------------------

def write_joint_grid_csv(path, joint):
    """Long-format export: one ``n1,n2,p`` row per grid cell with mass."""
    p = joint.probabilities()
    with Path(path).open("w", newline="") as fh:
        fh.write("n1,n2,p\n")
        nz = np.argwhere(p > 0)
        for n1, n2 in nz:
            fh.write(f"{n1},{n2},{_FLOAT_FMT % p[n1, n2]}\n")


def write_matrix_csv(path, matrix, row_axis=None, col_axis=None):
    """Contour-ready dense matrix; first row/column carry the axes."""
    matrix = np.asarray(matrix)
    with Path(path).open("w", newline="") as fh:
        if col_axis is not None:
            fh.write("," + ",".join(_FLOAT_FMT % c for c in col_axis) + "\n")
        for i, row in enumerate(matrix):
            lead = (_FLOAT_FMT % row_axis[i] + ",") if row_axis is not None else ""
            fh.write(lead + ",".join(_FLOAT_FMT % v for v in row) + "\n")


def write_vector_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_FLOAT_FMT % v for v in row) + "\n")


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
