"""Neuron-coverage criteria and per-test coverage signatures.

A signature is the sorted set of entity ids a test covers, where an entity
depends on the criterion:

NAC(t):  entity = neuron i, covered when its output v > t (strictly).
KMNC(k): entity = (neuron i, section s): [low_i, high_i] is split into k equal
         sections, v inside the range covers section floor((v-low)/width*k)
         (v == high counts as the last section); v outside covers nothing.
         Entity id = i*k + s.
NBC(k):  entities = (neuron i, lower) id 2i when v <= low_i - k*std_i, and
         (neuron i, upper) id 2i+1 when v >= high_i + k*std_i (inclusive).
SNAC(k): upper corner only, entity = neuron i, id i.
TKNC(k): entity = neuron i, covered when v is >= the k-th highest output in
         the neuron's layer for this test (ties included; layers with <= k
         neurons are fully covered).

Signature file format (binary, .dgs1): magic b"DGS1", uint32 universe size,
uint32 test count, then per test uint32 id count followed by that many
uint32 ids, ascending. All fields little-endian.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .model import ActivationTrace, FormatError, _readonly

KINDS = ("NAC", "KMNC", "NBC", "SNAC", "TKNC")
_INT_PARAM = {"KMNC": "sections per neuron", "TKNC": "top neurons per layer"}
SIGNATURE_MAGIC = b"DGS1"


@dataclass(frozen=True)
class CriterionConfig:
    """A coverage criterion plus its parameter, e.g. NAC with threshold 0.75."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown criterion {self.kind!r}; expected one of {KINDS}")
        p = self.param
        if not np.isfinite(p):
            raise ValueError(f"{self.kind} parameter must be finite, got {p!r}")
        if self.kind in _INT_PARAM:
            if p != int(p) or p < 1:
                raise ValueError(
                    f"{self.kind} parameter ({_INT_PARAM[self.kind]}) must be an integer >= 1, got {p!r}"
                )
        elif self.kind in ("NBC", "SNAC") and p < 0:
            raise ValueError(f"{self.kind} parameter must be >= 0, got {p!r}")

    @classmethod
    def parse(cls, text):
        """Parse 'KIND:param', e.g. 'NAC:0.75' or 'KMNC:1000'."""
        kind, sep, raw = text.partition(":")
        kind = kind.strip().upper()
        if not sep or not raw.strip():
            raise ValueError(f"criterion must look like KIND:param, got {text!r}")
        try:
            param = float(raw)
        except ValueError:
            raise ValueError(f"criterion parameter is not a number: {text!r}") from None
        return cls(kind, param)

    @property
    def tag(self):
        p = self.param
        return f"{self.kind}({int(p) if p == int(p) else p:g})"


@dataclass(frozen=True, eq=False)
class CoverageSignature:
    """Sorted entity ids one test covers, within a universe of universe_size."""

    universe_size: int
    ids: np.ndarray

    @property
    def rate(self):
        return self.ids.size / self.universe_size


def entity_universe(config, n_neurons, layer_map=None):
    """Total number of entities the criterion defines over n_neurons neurons."""
    if n_neurons < 1:
        raise ValueError("need at least one neuron")
    if config.kind == "KMNC":
        size = int(config.param) * n_neurons
    elif config.kind == "NBC":
        size = 2 * n_neurons
    else:
        size = n_neurons
    if size > 0xFFFFFFFF:
        raise ValueError(f"{config.tag} universe {size} exceeds the uint32 id space")
    return size


def _require_profile(config, profile, n_neurons):
    if profile is None:
        raise ValueError(f"{config.kind} needs a neuron profile")
    if profile.n_neurons != n_neurons:
        raise FormatError(
            f"profile covers {profile.n_neurons} neurons, trace has {n_neurons}"
        )


def _rows_to_signatures(universe, row_ids):
    return [
        CoverageSignature(universe, _readonly(np.asarray(ids, dtype=np.uint32)))
        for ids in row_ids
    ]


def signatures(config, trace, profile=None, layer_map=None):
    """Coverage signatures for every test in an ActivationTrace.

    KMNC/NBC/SNAC need a NeuronProfile, TKNC a LayerMap; NAC needs neither.
    """
    v = trace.values
    n, m = v.shape
    kind = config.kind

    if kind == "NAC":
        mask = v > config.param
        return _rows_to_signatures(m, [np.flatnonzero(r) for r in mask])

    if kind == "KMNC":
        _require_profile(config, profile, m)
        k = int(config.param)
        universe = entity_universe(config, m)
        low, high = profile.low, profile.high
        width = high - low
        out = []
        flat = np.arange(m, dtype=np.int64) * k
        for r in v:
            inside = (r >= low) & (r <= high)
            # zero-width neurons (constant in training) only count at the exact value
            pos = np.zeros(m, dtype=np.float64)
            nz = width > 0
            pos[nz] = (r[nz] - low[nz]) / width[nz]
            sec = np.minimum((pos * k).astype(np.int64), k - 1)
            ids = flat[inside] + sec[inside]
            out.append(np.unique(ids))
        return _rows_to_signatures(universe, out)

    if kind == "NBC":
        _require_profile(config, profile, m)
        kk = config.param
        lower = v <= profile.low - kk * profile.std
        upper = v >= profile.high + kk * profile.std
        out = []
        for rl, ru in zip(lower, upper):
            ids = np.concatenate((2 * np.flatnonzero(rl), 2 * np.flatnonzero(ru) + 1))
            ids.sort()
            out.append(ids)
        return _rows_to_signatures(2 * m, out)

    if kind == "SNAC":
        _require_profile(config, profile, m)
        mask = v >= profile.high + config.param * profile.std
        return _rows_to_signatures(m, [np.flatnonzero(r) for r in mask])

    # TKNC
    if layer_map is None:
        raise ValueError("TKNC needs a layer map")
    if layer_map.n_neurons != m:
        raise FormatError(
            f"layer map covers {layer_map.n_neurons} neurons, trace has {m}"
        )
    k = int(config.param)
    mask = np.zeros((n, m), dtype=bool)
    for ids in layer_map.layers:
        size = ids.size
        vals = v[:, ids]
        if size <= k:
            mask[:, ids] = True
            continue
        thr = np.partition(vals, size - k, axis=1)[:, size - k]
        mask[:, ids] = vals >= thr[:, None]
    return _rows_to_signatures(m, [np.flatnonzero(r) for r in mask])


def signature(config, row, profile=None, layer_map=None):
    """Signature of a single trace row (1-D array of neuron outputs)."""
    row = np.asarray(row, dtype=np.float64)
    return signatures(config, ActivationTrace.from_values(row[None, :]), profile, layer_map)[0]


def suite_coverage_rate(sigs):
    """Fraction of the universe covered by the union of all signatures."""
    if not sigs:
        raise ValueError("need at least one signature")
    universe = sigs[0].universe_size
    if any(s.universe_size != universe for s in sigs):
        raise ValueError("signatures come from different universes")
    seen = np.zeros(universe, dtype=bool)
    for s in sigs:
        seen[s.ids] = True
    return int(seen.sum()) / universe


def save_signatures(path, sigs):
    if not sigs:
        raise ValueError("need at least one signature")
    universe = sigs[0].universe_size
    if any(s.universe_size != universe for s in sigs):
        raise ValueError("signatures come from different universes")
    with open(path, "wb") as fh:
        fh.write(SIGNATURE_MAGIC)
        fh.write(struct.pack("<II", universe, len(sigs)))
        for s in sigs:
            fh.write(struct.pack("<I", s.ids.size))
            fh.write(s.ids.astype("<u4").tobytes())


def load_signatures(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != SIGNATURE_MAGIC:
        raise FormatError(f"{path}: not a {SIGNATURE_MAGIC.decode()} signature file")
    universe, count = struct.unpack("<II", data[4:12])
    if universe < 1 or count < 1:
        raise FormatError(f"{path}: empty universe or test count")
    off = 12
    sigs = []
    for t in range(count):
        if off + 4 > len(data):
            raise FormatError(f"{path}: truncated at test {t}")
        (n,) = struct.unpack("<I", data[off:off + 4])
        off += 4
        end = off + 4 * n
        if end > len(data):
            raise FormatError(f"{path}: truncated ids at test {t}")
        ids = np.frombuffer(data[off:end], dtype="<u4").astype(np.uint32)
        off = end
        if n > 0:
            if np.any(np.diff(ids.astype(np.int64)) <= 0):
                raise FormatError(f"{path}: ids not strictly ascending at test {t}")
            if int(ids[-1]) >= universe:
                raise FormatError(f"{path}: id {ids[-1]} outside universe {universe} at test {t}")
        sigs.append(CoverageSignature(universe, _readonly(ids)))
    if off != len(data):
        raise FormatError(f"{path}: {len(data) - off} trailing bytes")
    return sigs
