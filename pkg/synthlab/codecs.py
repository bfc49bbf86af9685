"""
Containers for dictionaries and the result tables written by the command line front end.
"""
import csv
import io
import os
import struct
import tempfile

import numpy as np

from synthlab.errors import DomainError
from synthlab.logger import Logger
from synthlab.models import Dictionary, NoiseSweep, PhaseGrid
from synthlab.utils import format_float, parse_float, safe_join_path


class DictionaryCodec:
    """
    Binary container of a dictionary:

        MAGIC (4 bytes) | VERSION (uint16) | n (uint32) | d (uint32) | LABEL LENGTH (uint16) | LABEL (utf-8) | MATRIX

    All integers are little endian. The matrix follows as n * d little endian float64 values in column-major order.
    """

    MAGIC = b"SYND"
    VERSION = 1
    HEADER = struct.Struct("<4sHIIH")

    @staticmethod
    def encode(dictionary: Dictionary) -> bytes:
        label = dictionary.label.encode("utf-8")
        header = DictionaryCodec.HEADER.pack(
            DictionaryCodec.MAGIC, DictionaryCodec.VERSION, dictionary.n, dictionary.d, len(label))
        return header + label + dictionary.matrix.astype("<f8").tobytes(order="F")

    @staticmethod
    def decode(data: bytes) -> Dictionary:
        size = DictionaryCodec.HEADER.size
        if len(data) < size:
            raise DomainError("Decoding dictionary failed! Container is truncated!")
        magic, version, n, d, label_length = DictionaryCodec.HEADER.unpack(data[:size])
        if magic != DictionaryCodec.MAGIC or version != DictionaryCodec.VERSION:
            raise DomainError("Decoding dictionary failed! Unknown container format!")
        label = data[size:size + label_length].decode("utf-8")
        payload = data[size + label_length:]
        if len(payload) != 8 * n * d:
            raise DomainError("Decoding dictionary failed! Expected {} matrix bytes, got {}!".format(
                8 * n * d, len(payload)))
        matrix = np.frombuffer(payload, dtype="<f8").reshape((n, d), order="F")
        return Dictionary(matrix, label)


class DictionaryCsvCodec:
    """ CSV with a header row `n,d,label`, its values, and then the n rows of the matrix. """

    @staticmethod
    def encode(dictionary: Dictionary) -> str:
        rows = [["n", "d", "label"], [str(dictionary.n), str(dictionary.d), dictionary.label]]
        rows.extend([format_float(value) for value in row] for row in dictionary.matrix)
        return _csv_text(rows)

    @staticmethod
    def decode(text: str) -> Dictionary:
        rows = list(csv.reader(io.StringIO(text)))
        if len(rows) < 2 or rows[0] != ["n", "d", "label"]:
            raise DomainError("Decoding dictionary failed! Missing header 'n,d,label'!")
        n, d, label = int(rows[1][0]), int(rows[1][1]), rows[1][2]
        matrix = rows[2:]
        if len(matrix) != n or any(len(row) != d for row in matrix):
            raise DomainError("Decoding dictionary failed! Expected a {}x{} matrix!".format(n, d))
        return Dictionary([[float(value) for value in row] for row in matrix], label)


def _csv_text(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


PHASE_COLUMNS = ["s", "m", "trials", "coef_successes", "sig_successes", "solver_failures", "statdim", "statdim_stderr"]

NOISE_COLUMNS = ["eta", "trials", "mean_coef_err", "mean_sig_err", "bound_sig"]

WIDTH_COLUMNS = ["cone_label", "statdim", "stderr", "samples", "seed"]

GEOMETRY_COLUMNS = [
    "label", "n", "d", "s_bar", "lineality_dim", "range_generators", "alpha", "cos_alpha", "tan2_alpha", "statdim",
    "statdim_stderr", "polyhedral_width_bound", "gauge_width_bound", "corollary_rate", "coherence", "coherence_bound",
    "lambda_min_upper", "condition_bound",
]


def encode_phase(grid: PhaseGrid) -> str:
    rows = [PHASE_COLUMNS]
    for row, s in enumerate(grid.s_values):
        statdim = grid.overlay[row] if grid.overlay else None
        stderr = grid.overlay_stderr[row] if grid.overlay_stderr else None
        for column, m in enumerate(grid.m_values):
            rows.append([s, m, grid.trials_per_cell, int(grid.success_counts_coef[row, column]),
                         int(grid.success_counts_sig[row, column]), int(grid.solver_failures[row, column]),
                         format_float(statdim), format_float(stderr)])
    return _csv_text(rows)


def encode_noise(sweep: NoiseSweep) -> str:
    rows = [NOISE_COLUMNS]
    for eta, coef, sig, bound in zip(sweep.eta_values, sweep.mean_coef_err, sweep.mean_sig_err, sweep.bound_sig):
        rows.append([format_float(eta), sweep.trials, format_float(coef), format_float(sig), format_float(bound)])
    return _csv_text(rows)


def encode_widths(rows) -> str:
    """ rows: (cone label, WidthEstimate) pairs. """
    return _csv_text([WIDTH_COLUMNS] + [
        [label, format_float(estimate.statdim), format_float(estimate.stderr), estimate.samples, estimate.seed]
        for label, estimate in rows])


def encode_geometry(records) -> str:
    """ records: dicts keyed by the geometry columns; missing values become empty fields. """
    rows = [GEOMETRY_COLUMNS]
    for record in records:
        rows.append([
            value if isinstance(value, (str, int)) and not isinstance(value, bool) else format_float(value)
            for value in (record.get(column) for column in GEOMETRY_COLUMNS)])
    return _csv_text(rows)


def decode_table(text: str):
    """ Reads a result table into a list of dicts, numbers as floats and empty fields as None. """
    records = []
    for record in csv.DictReader(io.StringIO(text)):
        records.append({key: value if key in ("label", "cone_label") else parse_float(value)
                        for key, value in record.items()})
    return records


class OutputDirectory:
    """
    Writes files atomically into a directory: each file is first written under a temporary name and renamed once
    complete. Written files can be removed again when the run fails.
    """

    def __init__(self, path):
        self.path = os.path.abspath(os.path.expanduser(path))
        self.written = []
        self.logger = Logger.get_instance()

    def write(self, name, text):
        os.makedirs(self.path, exist_ok=True)
        target = safe_join_path(self.path, name)
        handle, temporary = tempfile.mkstemp(prefix="." + name, suffix=".tmp", dir=self.path)
        try:
            with os.fdopen(handle, "w", newline="") as f:
                f.write(text)
            os.replace(temporary, target)
        except BaseException:
            if os.path.exists(temporary):
                os.remove(temporary)
            raise
        self.written.append(target)
        self.logger.debug("Wrote {}.".format(target))
        return target

    def remove_written(self, keep=()):
        """ Removes the files written so far except those named in keep. """
        kept = [target for target in self.written if os.path.basename(target) in keep]
        for target in self.written:
            if target not in kept and os.path.exists(target):
                os.remove(target)
                self.logger.debug("Removed {}.".format(target))
        self.written = kept
