"""Core data model: matrices, labels, layer metadata, and their file formats.

All in-memory arithmetic is float64; the binary matrix format stores float32
and loading promotes back to float64. Wrapped arrays are marked read-only,
consumers are expected not to mutate them.

File formats
------------
matrix (binary, .dgm1): magic b"DGM1", uint32 rows, uint32 cols, then
    rows*cols float32 values row-major. All fields little-endian.
matrix (text, .csv): one row per line, comma-separated, no header; values
    written with %.9g (round-trips float32 exactly).
labels (.txt): one base-10 integer per line.
network metadata (.json): {"layers": [[neuron ids...], ...],
    "neurons": [{"low": f, "high": f, "std": f}, ...]}; either key may be
    omitted when only one half is available.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

MATRIX_MAGIC = b"DGM1"
PROB_ROW_TOL = 1e-3


class FormatError(ValueError):
    """File contents that do not match the expected format or shape."""


def _readonly(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Per-test class probabilities: shape (n_tests, n_classes), rows sum to 1."""

    values: np.ndarray

    @classmethod
    def from_values(cls, values, row_tol=PROB_ROW_TOL):
        """Validate and wrap; rows with sum within row_tol of 1 are renormalized."""
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise FormatError(f"probability matrix must be 2-D, got shape {values.shape}")
        n, c = values.shape
        if n < 1 or c < 2:
            raise FormatError(f"probability matrix needs >=1 rows and >=2 columns, got {n}x{c}")
        if not np.all(np.isfinite(values)):
            bad = int(np.argwhere(~np.isfinite(values))[0][0])
            raise FormatError(f"non-finite probability in row {bad}")
        if np.any(values < 0.0) or np.any(values > 1.0):
            bad = int(np.argwhere((values < 0.0) | (values > 1.0))[0][0])
            raise FormatError(f"probability outside [0, 1] in row {bad}")
        sums = values.sum(axis=1)
        off = np.abs(sums - 1.0) > row_tol
        if np.any(off):
            bad = int(np.argmax(off))
            raise FormatError(
                f"row {bad} sums to {sums[bad]:.6g}, outside 1 +/- {row_tol:g}"
            )
        values /= sums[:, None]
        return cls(_readonly(values))

    @property
    def n_tests(self):
        return self.values.shape[0]

    @property
    def n_classes(self):
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class ActivationTrace:
    """Per-test neuron outputs: shape (n_tests, n_neurons), finite."""

    values: np.ndarray

    @classmethod
    def from_values(cls, values):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise FormatError(f"activation trace must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise FormatError(f"activation trace must be non-empty, got {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = int(np.argwhere(~np.isfinite(values))[0][0])
            raise FormatError(f"non-finite activation in row {bad}")
        return cls(_readonly(values))

    @property
    def n_tests(self):
        return self.values.shape[0]

    @property
    def n_neurons(self):
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class LayerMap:
    """Partition of neuron indices 0..n_neurons-1 into per-layer id arrays."""

    layers: tuple

    @classmethod
    def from_lists(cls, lists):
        layers = tuple(np.asarray(ids, dtype=np.int64) for ids in lists)
        if not layers:
            raise FormatError("layer map must contain at least one layer")
        for k, ids in enumerate(layers):
            if ids.ndim != 1 or ids.size == 0:
                raise FormatError(f"layer {k} must be a non-empty id list")
        all_ids = np.concatenate(layers)
        n = all_ids.size
        seen = np.sort(all_ids)
        if not np.array_equal(seen, np.arange(n)):
            raise FormatError("layer map must partition neuron ids 0..n-1 exactly")
        return cls(tuple(_readonly(ids) for ids in layers))

    @property
    def n_neurons(self):
        return sum(ids.size for ids in self.layers)

    @property
    def n_layers(self):
        return len(self.layers)


@dataclass(frozen=True, eq=False)
class NeuronProfile:
    """Per-neuron training statistics: low/high bounds and standard deviation."""

    low: np.ndarray
    high: np.ndarray
    std: np.ndarray

    @classmethod
    def from_arrays(cls, low, high, std):
        low = np.asarray(low, dtype=np.float64)
        high = np.asarray(high, dtype=np.float64)
        std = np.asarray(std, dtype=np.float64)
        if not (low.ndim == high.ndim == std.ndim == 1) or not (low.size == high.size == std.size):
            raise FormatError("profile arrays must be 1-D and equally sized")
        if low.size == 0:
            raise FormatError("profile must cover at least one neuron")
        for name, arr in (("low", low), ("high", high), ("std", std)):
            if not np.all(np.isfinite(arr)):
                raise FormatError(f"non-finite value in profile {name}")
        if np.any(low > high):
            bad = int(np.argmax(low > high))
            raise FormatError(f"profile neuron {bad} has low > high")
        if np.any(std < 0.0):
            bad = int(np.argmax(std < 0.0))
            raise FormatError(f"profile neuron {bad} has negative std")
        return cls(_readonly(low), _readonly(high), _readonly(std))

    @property
    def n_neurons(self):
        return self.low.size


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Ground-truth class index per test."""

    values: np.ndarray

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 1 or values.size == 0:
            raise FormatError("label vector must be 1-D and non-empty")
        if np.any(values < 0):
            raise FormatError("labels must be non-negative class indices")
        return cls(_readonly(values))

    @property
    def n_tests(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class MisclassificationMask:
    """Boolean flag per test: True where the model's prediction misses the label."""

    flags: np.ndarray

    @property
    def n_tests(self):
        return self.flags.size

    @property
    def k(self):
        """Number of misclassified tests."""
        return int(self.flags.sum())


@dataclass(frozen=True, eq=False)
class Permutation:
    """Execution order: order[r] is the test index run at rank r (0-based)."""

    order: np.ndarray

    @classmethod
    def from_order(cls, order):
        order = np.asarray(order, dtype=np.int64)
        if order.ndim != 1 or order.size == 0:
            raise FormatError("permutation must be 1-D and non-empty")
        n = order.size
        if not np.array_equal(np.sort(order), np.arange(n)):
            raise FormatError(f"order is not a permutation of 0..{n - 1}")
        return cls(_readonly(order))

    @property
    def n_tests(self):
        return self.order.size


def compute_misclassification_mask(probs, labels):
    """Flag tests where argmax of the probability row differs from the label.

    Argmax ties resolve to the lowest class index. Labels must be within the
    matrix's class range and match its row count.
    """
    if labels.n_tests != probs.n_tests:
        raise FormatError(
            f"labels cover {labels.n_tests} tests, matrix has {probs.n_tests}"
        )
    if np.any(labels.values >= probs.n_classes):
        bad = int(np.argmax(labels.values >= probs.n_classes))
        raise FormatError(
            f"label {labels.values[bad]} at row {bad} outside 0..{probs.n_classes - 1}"
        )
    predicted = np.argmax(probs.values, axis=1)
    return MisclassificationMask(_readonly(predicted != labels.values))


def profile_neurons(trace):
    """Per-neuron low/high/std over a profiling trace (population std, ddof=0)."""
    v = trace.values
    return NeuronProfile.from_arrays(
        v.min(axis=0), v.max(axis=0), v.std(axis=0, ddof=0)
    )


def _format_for(path, fmt):
    if fmt is not None:
        if fmt not in ("binary", "csv"):
            raise FormatError(f"unknown matrix format {fmt!r}")
        return fmt
    name = str(path)
    if name.endswith(".dgm1"):
        return "binary"
    if name.endswith(".csv"):
        return "csv"
    raise FormatError(f"cannot infer matrix format from {name!r}; pass fmt=")


def save_matrix(path, values, fmt=None):
    """Write a 2-D array (or wrapper with .values) as .dgm1 binary or .csv text."""
    if hasattr(values, "values"):
        values = values.values
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise FormatError(f"matrix must be 2-D, got shape {values.shape}")
    if _format_for(path, fmt) == "binary":
        rows, cols = values.shape
        with open(path, "wb") as fh:
            fh.write(MATRIX_MAGIC)
            fh.write(struct.pack("<II", rows, cols))
            fh.write(values.astype("<f4").tobytes(order="C"))
    else:
        with open(path, "w") as fh:
            for row in values:
                fh.write(",".join(f"{v:.9g}" for v in row))
                fh.write("\n")


def load_matrix(path, fmt=None):
    """Read a matrix written by save_matrix; returns a float64 array."""
    if _format_for(path, fmt) == "binary":
        with open(path, "rb") as fh:
            head = fh.read(12)
            if len(head) < 12 or head[:4] != MATRIX_MAGIC:
                raise FormatError(f"{path}: not a {MATRIX_MAGIC.decode()} matrix file")
            rows, cols = struct.unpack("<II", head[4:12])
            if rows < 1 or cols < 1:
                raise FormatError(f"{path}: empty matrix ({rows}x{cols})")
            payload = fh.read()
        expect = rows * cols * 4
        if len(payload) != expect:
            raise FormatError(
                f"{path}: payload is {len(payload)} bytes, header implies {expect}"
            )
        data = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        return data.reshape(rows, cols)
    rows = []
    width = None
    with open(path) as fh:
        for ln, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise FormatError(f"{path}:{ln + 1}: expected {width} columns, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise FormatError(f"{path}:{ln + 1}: {exc}") from None
    if not rows:
        raise FormatError(f"{path}: no rows")
    return np.array(rows, dtype=np.float64)


def save_labels(path, labels):
    values = labels.values if hasattr(labels, "values") else np.asarray(labels)
    with open(path, "w") as fh:
        for v in values:
            fh.write(f"{int(v)}\n")


def load_labels(path):
    values = []
    with open(path) as fh:
        for ln, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise FormatError(f"{path}:{ln + 1}: not an integer label: {line!r}") from None
    if not values:
        raise FormatError(f"{path}: no labels")
    return LabelVector.from_values(values)


def save_permutation(path, perm):
    """Write an execution order as CSV: header rank,test_index, 0-based ranks."""
    with open(path, "w") as fh:
        fh.write("rank,test_index\n")
        for r, i in enumerate(perm.order):
            fh.write(f"{r},{int(i)}\n")


def load_permutation(path):
    pairs = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "rank,test_index":
            raise FormatError(f"{path}: expected header 'rank,test_index', got {header!r}")
        for ln, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                rank_s, idx_s = line.split(",")
                pairs.append((int(rank_s), int(idx_s)))
            except ValueError:
                raise FormatError(f"{path}:{ln + 2}: expected 'rank,test_index' integers") from None
    if not pairs:
        raise FormatError(f"{path}: no rows")
    n = len(pairs)
    order = np.full(n, -1, dtype=np.int64)
    for rank, idx in pairs:
        if not (0 <= rank < n) or order[rank] != -1:
            raise FormatError(f"{path}: ranks must be 0..{n - 1}, each exactly once")
        order[rank] = idx
    return Permutation.from_order(order)


def save_network_meta(path, layer_map=None, profile=None):
    """Write the layer map and/or neuron profile as a single JSON document."""
    if layer_map is None and profile is None:
        raise FormatError("nothing to write: need a layer map and/or a profile")
    doc = {}
    if layer_map is not None:
        doc["layers"] = [ids.tolist() for ids in layer_map.layers]
    if profile is not None:
        doc["neurons"] = [
            {"low": lo, "high": hi, "std": sd}
            for lo, hi, sd in zip(profile.low, profile.high, profile.std)
        ]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_network_meta(path):
    """Read the JSON metadata document; returns (layer_map or None, profile or None)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top level must be an object")
    layer_map = None
    profile = None
    if "layers" in doc:
        layer_map = LayerMap.from_lists(doc["layers"])
    if "neurons" in doc:
        rows = doc["neurons"]
        try:
            low = [r["low"] for r in rows]
            high = [r["high"] for r in rows]
            std = [r["std"] for r in rows]
        except (TypeError, KeyError):
            raise FormatError(f"{path}: each neuron needs low/high/std") from None
        profile = NeuronProfile.from_arrays(low, high, std)
    if layer_map is None and profile is None:
        raise FormatError(f"{path}: neither 'layers' nor 'neurons' present")
    if layer_map is not None and profile is not None and layer_map.n_neurons != profile.n_neurons:
        raise FormatError(
            f"{path}: layer map covers {layer_map.n_neurons} neurons, profile {profile.n_neurons}"
        )
    return layer_map, profile
