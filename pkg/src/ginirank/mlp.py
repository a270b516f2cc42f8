"""Small dense-network runner and a synthetic teacher/subject experiment.

The runner exists so coverage and scoring can be exercised end to end without
a training framework: a model is a list of dense layers (weights, bias, relu
or identity), the last layer feeds a softmax. A forward pass returns the
softmax probabilities, the activation trace (every layer's post-activation
output concatenated, the final layer contributing the softmax probabilities),
and the layer map mirroring those boundaries.

Model file format (.json): {"layers": [{"weights": [[row-major d_out x d_in]],
"bias": [d_out], "activation": "relu"|"identity"}, ...]}.

All arithmetic is float64; softmax subtracts the row max before exponentiating.
"""

import json
from dataclasses import dataclass

import numpy as np

from .model import (
    ActivationTrace,
    FormatError,
    LabelVector,
    LayerMap,
    ProbabilityMatrix,
    _readonly,
)

ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray  # (d_out, d_in)
    bias: np.ndarray  # (d_out,)
    activation: str


@dataclass(frozen=True, eq=False)
class MlpModel:
    layers: tuple

    @classmethod
    def from_layers(cls, layers):
        layers = tuple(layers)
        if not layers:
            raise FormatError("model needs at least one layer")
        checked = []
        prev_out = None
        for li, layer in enumerate(layers):
            w = np.asarray(layer.weights, dtype=np.float64)
            b = np.asarray(layer.bias, dtype=np.float64)
            if w.ndim != 2 or b.ndim != 1 or b.size != w.shape[0]:
                raise FormatError(f"layer {li}: weights must be (d_out, d_in), bias (d_out,)")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise FormatError(f"layer {li}: non-finite parameter")
            if layer.activation not in ACTIVATIONS:
                raise FormatError(f"layer {li}: unknown activation {layer.activation!r}")
            if prev_out is not None and w.shape[1] != prev_out:
                raise FormatError(
                    f"layer {li}: expects {w.shape[1]} inputs, previous layer emits {prev_out}"
                )
            prev_out = w.shape[0]
            checked.append(Layer(_readonly(w), _readonly(b), layer.activation))
        return cls(tuple(checked))

    @property
    def input_dim(self):
        return self.layers[0].weights.shape[1]

    @property
    def n_classes(self):
        return self.layers[-1].weights.shape[0]

    @property
    def n_neurons(self):
        return sum(layer.weights.shape[0] for layer in self.layers)


def save_model(path, model):
    doc = {
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in model.layers
        ]
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "layers" not in doc:
        raise FormatError(f"{path}: expected an object with a 'layers' list")
    layers = []
    for li, spec_ in enumerate(doc["layers"]):
        try:
            layers.append(Layer(
                np.array(spec_["weights"], dtype=np.float64),
                np.array(spec_["bias"], dtype=np.float64),
                spec_["activation"],
            ))
        except (TypeError, KeyError, ValueError):
            raise FormatError(f"{path}: layer {li} needs weights/bias/activation") from None
    return MlpModel.from_layers(layers)


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(model, inputs):
    """Run a batch; returns (ProbabilityMatrix, ActivationTrace, LayerMap).

    inputs: (n_tests, input_dim) float array.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise FormatError(
            f"inputs must be (n, {model.input_dim}), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise FormatError("non-finite input value")
    h = x
    pieces = []
    for li, layer in enumerate(model.layers):
        h = h @ layer.weights.T + layer.bias
        if layer.activation == "relu":
            h = np.maximum(h, 0.0)
        if li == len(model.layers) - 1:
            h = _softmax(h)
        pieces.append(h)
    probs = ProbabilityMatrix.from_values(pieces[-1])
    # the trace's final block is the probability rows, bit for bit
    pieces[-1] = probs.values
    trace = ActivationTrace.from_values(np.concatenate(pieces, axis=1))
    bounds = np.cumsum([0] + [layer.weights.shape[0] for layer in model.layers])
    layer_map = LayerMap.from_lists(
        [np.arange(bounds[i], bounds[i + 1]) for i in range(len(model.layers))]
    )
    return probs, trace, layer_map


@dataclass(frozen=True, eq=False)
class SynthExperiment:
    """A teacher network, a noisy copy of it, and the batches to probe them with."""

    teacher: MlpModel
    subject: MlpModel
    inputs: np.ndarray
    train_inputs: np.ndarray
    labels: LabelVector


def synth_experiment(seed=7, n_tests=5000, dims=(16, 32, 32, 10), noise_scale=0.05,
                     n_train=2000):
    """Build a deterministic synthetic prioritization workload.

    A teacher MLP is drawn at random, the subject is the teacher with Gaussian
    noise added to every parameter, and labels are the teacher's argmax. The
    subject then misclassifies exactly where the noise flips its top class.

    Randomness comes from numpy's default_rng(seed) (PCG64); the draw order is
    part of the contract: per layer the teacher weights (standard normal times
    sqrt(2/d_in), bias zero), then per layer the subject's weight and bias
    noise (standard normal times noise_scale), then the test inputs, then the
    profiling inputs, all standard normal.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ValueError("dims needs an input width and at least one layer")
    if dims[-1] < 2:
        raise ValueError("need at least two classes")
    if n_tests < 1 or n_train < 1:
        raise ValueError("need at least one test and one profiling input")
    if noise_scale < 0:
        raise ValueError("noise_scale must be >= 0")
    rng = np.random.default_rng(seed)
    shapes = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
    teacher_layers = []
    for si, (d_out, d_in) in enumerate(shapes):
        w = rng.standard_normal((d_out, d_in)) * np.sqrt(2.0 / d_in)
        act = "identity" if si == len(shapes) - 1 else "relu"
        teacher_layers.append(Layer(w, np.zeros(d_out), act))
    subject_layers = []
    for layer in teacher_layers:
        d_out, d_in = layer.weights.shape
        w = layer.weights + rng.standard_normal((d_out, d_in)) * noise_scale
        b = layer.bias + rng.standard_normal(d_out) * noise_scale
        subject_layers.append(Layer(w, b, layer.activation))
    inputs = rng.standard_normal((n_tests, dims[0]))
    train_inputs = rng.standard_normal((n_train, dims[0]))
    teacher = MlpModel.from_layers(teacher_layers)
    subject = MlpModel.from_layers(subject_layers)
    teacher_probs, _, _ = forward(teacher, inputs)
    labels = LabelVector.from_values(np.argmax(teacher_probs.values, axis=1))
    return SynthExperiment(teacher, subject, _readonly(inputs), _readonly(train_inputs), labels)
