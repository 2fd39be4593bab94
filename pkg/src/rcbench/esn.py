"""Reference echo state network.

State update, for input ``u`` and optional fed-back output ``fb``::

    x <- (1 - leak) * x + leak * tanh(W x + W_u u + bias + W_fb fb)

Timing convention: row ``t`` of a harvested state matrix is the state
*after* consuming ``u(t)``, and the readout output ``v(t) = W_v x(t) + c``
is trained against ``target(t)``. So a one-step predictor is trained on
pairs ``(s(t), s(t+1))`` and the free-running loop feeds ``v(t)`` back as
``u(t+1)``. Every report records this convention.
"""

from __future__ import annotations

import base64
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .core import SeedSpec, TimeSeries, as_array
from .errors import (
    DimensionMismatch,
    InvalidParameter,
    LengthMismatch,
    NonFinite,
    SingularSystem,
    SpectralRadiusFailure,
)

TIMING_CONVENTION = "state(t) follows u(t); v(t) = W_v state(t) + intercept is scored against target(t)"
SERIAL_VERSION = 1
WASHOUT_POLICIES = ("initial_subsequence", "zero_settle", "repeat")

# dense eigensolver below this size, ARPACK above
_DENSE_EIG_LIMIT = 2000


@dataclass(frozen=True)
class EsnConfig:
    n_nodes: int = 100
    input_dim: int = 1
    output_dim: int = 1
    spectral_radius: float = 0.95
    input_scale: float = 0.1
    connectivity: float = 0.1
    leak_rate: float = 1.0
    bias_scale: float = 0.0
    feedback_scale: float = 0.0
    nonlinearity: str = "tanh"
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))

    def __post_init__(self):
        if self.n_nodes < 1 or self.input_dim < 1 or self.output_dim < 1:
            raise InvalidParameter("n_nodes, input_dim and output_dim must be positive")
        if not self.spectral_radius > 0:
            raise InvalidParameter("spectral_radius must be positive")
        if not self.input_scale > 0:
            raise InvalidParameter("input_scale must be positive")
        if not 0 < self.connectivity <= 1:
            raise InvalidParameter("connectivity must lie in (0, 1]")
        if not 0 < self.leak_rate <= 1:
            raise InvalidParameter("leak_rate must lie in (0, 1]")
        if self.bias_scale < 0 or self.feedback_scale < 0:
            raise InvalidParameter("bias_scale and feedback_scale must be nonnegative")
        if self.nonlinearity != "tanh":
            raise InvalidParameter("only the tanh nonlinearity is supported")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seed"] = self.seed.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EsnConfig":
        d = dict(d)
        if "seed" in d:
            d["seed"] = SeedSpec.from_value(d["seed"])
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidParameter(f"unknown reservoir field(s): {sorted(unknown)}")
        return cls(**d)


def spectral_radius(w: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    try:
        if w.shape[0] <= _DENSE_EIG_LIMIT:
            ev = np.linalg.eigvals(w)
        else:
            ev = scipy.sparse.linalg.eigs(
                scipy.sparse.csr_matrix(w), k=1, which="LM", tol=1e-10, maxiter=10000,
                return_eigenvectors=False,
            )
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackNoConvergence) as exc:
        raise SpectralRadiusFailure(f"eigenvalue computation failed: {exc}") from exc
    r = float(np.max(np.abs(ev)))
    if not np.isfinite(r):
        raise SpectralRadiusFailure("spectral radius is not finite")
    return r


class Esn:
    """Instantiated reservoir: weights plus a mutable state vector.

    Not safe to step from two threads at once; use ``copy()`` per worker.
    """

    def __init__(self, config: EsnConfig, w: np.ndarray, w_in: np.ndarray, bias: np.ndarray,
                 w_fb: np.ndarray | None = None, state: np.ndarray | None = None):
        n = config.n_nodes
        if w.shape != (n, n) or w_in.shape != (n, config.input_dim) or bias.shape != (n,):
            raise DimensionMismatch("weight shapes do not match the configuration")
        if w_fb is not None and w_fb.shape != (n, config.output_dim):
            raise DimensionMismatch("feedback matrix shape does not match the configuration")
        self.config = config
        self.W = w
        self.W_u = w_in
        self.bias = bias
        self.W_fb = w_fb
        self.state = np.zeros(n) if state is None else np.array(state, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return self.config.n_nodes

    def reset(self, state: np.ndarray | None = None) -> None:
        if state is None:
            self.state = np.zeros(self.n_nodes)
        else:
            state = np.asarray(state, dtype=np.float64)
            if state.shape != (self.n_nodes,):
                raise DimensionMismatch(f"state must have {self.n_nodes} entries")
            self.state = state.copy()

    def copy(self) -> "Esn":
        return Esn(self.config, self.W, self.W_u, self.bias, self.W_fb, self.state.copy())

    def step(self, u, fb=None) -> np.ndarray:
        return esn_step(self, u, fb)


def esn_new(config: EsnConfig) -> Esn:
    """Draw a reservoir from ``config.seed``.

    Exactly ``round(connectivity * N^2)`` recurrent weights (at least one)
    are nonzero, drawn uniform on [-1, 1], then the matrix is rescaled to
    the requested spectral radius. Each matrix comes from its own
    sub-stream, so e.g. changing ``input_scale`` leaves ``W`` untouched.
    """
    n = config.n_nodes
    seed = config.seed
    rng = seed.spawn("recurrent").generator()
    nnz = max(1, int(round(config.connectivity * n * n)))
    pos = rng.choice(n * n, size=nnz, replace=False)
    w = np.zeros(n * n)
    w[pos] = rng.uniform(-1.0, 1.0, nnz)
    w = w.reshape(n, n)
    radius = spectral_radius(w)
    if radius == 0.0:
        raise SpectralRadiusFailure("recurrent matrix is nilpotent (spectral radius 0); try another seed")
    w *= config.spectral_radius / radius

    w_in = seed.spawn("input").generator().uniform(-1.0, 1.0, (n, config.input_dim)) * config.input_scale
    bias = seed.spawn("bias").generator().uniform(-1.0, 1.0, n) * config.bias_scale
    w_fb = None
    if config.feedback_scale > 0:
        w_fb = seed.spawn("feedback").generator().uniform(-1.0, 1.0, (n, config.output_dim)) * config.feedback_scale
    return Esn(config, w, w_in, bias, w_fb)


def esn_step(esn: Esn, u, fb=None) -> np.ndarray:
    """Advance one step; returns (a view of) the new state."""
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if u.shape != (esn.config.input_dim,):
        raise DimensionMismatch(f"input has shape {u.shape}, expected ({esn.config.input_dim},)")
    pre = esn.W @ esn.state + esn.W_u @ u + esn.bias
    if esn.W_fb is not None and fb is not None:
        fb = np.atleast_1d(np.asarray(fb, dtype=np.float64))
        if fb.shape != (esn.config.output_dim,):
            raise DimensionMismatch(f"feedback has shape {fb.shape}, expected ({esn.config.output_dim},)")
        pre += esn.W_fb @ fb
    a = esn.config.leak_rate
    if a == 1.0:
        esn.state = np.tanh(pre)
    else:
        esn.state = (1.0 - a) * esn.state + a * np.tanh(pre)
    return esn.state


def _drive(esn: Esn, u: np.ndarray, teacher: np.ndarray | None) -> np.ndarray:
    """Step through every input row, returning all states."""
    n = esn.n_nodes
    out = np.empty((u.shape[0], n))
    w, w_in, b = esn.W, esn.W_u, esn.bias
    a = esn.config.leak_rate
    drive = u @ w_in.T + b
    if esn.W_fb is not None and teacher is not None:
        prev = np.vstack([np.zeros((1, teacher.shape[1])), teacher[:-1]])
        drive += prev @ esn.W_fb.T
    x = esn.state
    for t in range(u.shape[0]):
        if a == 1.0:
            x = np.tanh(w @ x + drive[t])
        else:
            x = (1.0 - a) * x + a * np.tanh(w @ x + drive[t])
        out[t] = x
    if not np.all(np.isfinite(out)):
        raise NonFinite(int(np.argwhere(~np.isfinite(out))[0, 0]))
    esn.state = x.copy()
    return out


def harvest_states(esn: Esn, inputs: TimeSeries, washout: int, teacher: TimeSeries | None = None) -> np.ndarray:
    """Drive ``esn`` from its current state; return rows after the washout.

    With output feedback, ``teacher`` supplies the true outputs and step
    ``t`` is fed ``teacher(t-1)`` (zero at ``t = 0``).
    """
    u = as_array(inputs)
    if u.shape[1] != esn.config.input_dim:
        raise DimensionMismatch(f"inputs have {u.shape[1]} channels, reservoir expects {esn.config.input_dim}")
    if washout < 0 or washout >= u.shape[0]:
        raise LengthMismatch(f"washout {washout} leaves nothing to harvest from {u.shape[0]} inputs")
    tf = None
    if teacher is not None:
        tf = as_array(teacher)
        if tf.shape[0] != u.shape[0]:
            raise LengthMismatch("teacher and inputs differ in length")
    return _drive(esn, u, tf)[washout:]


def settle(esn: Esn, inputs: TimeSeries, washout: int, policy: str = "initial_subsequence") -> int:
    """Wash out the initial state ahead of a non-stationary input.

    ``initial_subsequence`` consumes the first ``washout`` frames of the
    data itself; ``zero_settle`` feeds ``washout`` zero inputs;
    ``repeat`` feeds the opening ``washout`` frames, after which the data
    is presented again from its start. Returns the index from which the
    caller should keep driving and harvesting.
    """
    if policy not in WASHOUT_POLICIES:
        raise InvalidParameter(f"washout policy must be one of {WASHOUT_POLICIES}")
    u = as_array(inputs)
    if washout == 0:
        return 0
    if washout > u.shape[0]:
        raise LengthMismatch("washout longer than the input")
    if policy == "zero_settle":
        _drive(esn, np.zeros((washout, u.shape[1])), None)
        return 0
    _drive(esn, u[:washout], None)
    return washout if policy == "initial_subsequence" else 0


@dataclass
class Readout:
    """Linear map from reservoir state to output, with an unpenalised intercept."""

    W_v: np.ndarray  # (output_dim, n_nodes)
    intercept: np.ndarray  # (output_dim,)
    ridge_lambda: float

    @property
    def output_dim(self) -> int:
        return self.W_v.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.W_v.shape[1]

    def predict(self, states: np.ndarray) -> np.ndarray:
        states = np.atleast_2d(states)
        if states.shape[1] != self.n_nodes:
            raise DimensionMismatch(f"states have {states.shape[1]} columns, readout expects {self.n_nodes}")
        return states @ self.W_v.T + self.intercept

    def output(self, state: np.ndarray) -> np.ndarray:
        return self.W_v @ state + self.intercept


def train_readout(states: np.ndarray, targets, ridge_lambda: float = 1e-8, fit_intercept: bool = True) -> Readout:
    """Ridge regression of ``targets`` on ``states``.

    Solves ``(S^T S + lambda I) W^T = S^T T`` by Cholesky on centred data
    (the intercept is not penalised). With ``lambda = 0`` the least-squares
    problem is solved by SVD instead, and a rank-deficient state matrix is
    an error rather than a silently arbitrary solution.
    """
    s = np.asarray(states, dtype=np.float64)
    y = as_array(targets)
    if s.ndim != 2:
        raise DimensionMismatch("states must be a 2-D matrix")
    if s.shape[0] != y.shape[0]:
        raise LengthMismatch(f"{s.shape[0]} state rows but {y.shape[0]} targets")
    if ridge_lambda < 0:
        raise InvalidParameter("ridge_lambda must be nonnegative")
    if fit_intercept:
        s_mean = s.mean(axis=0)
        y_mean = y.mean(axis=0)
        sc, yc = s - s_mean, y - y_mean
    else:
        s_mean = np.zeros(s.shape[1])
        y_mean = np.zeros(y.shape[1])
        sc, yc = s, y

    n = s.shape[1]
    if ridge_lambda > 0:
        gram = sc.T @ sc
        gram[np.diag_indices(n)] += ridge_lambda
        try:
            coef = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram, lower=True), sc.T @ yc)
        except np.linalg.LinAlgError:
            # Gram matrix lost definiteness in floating point; solve the
            # equivalent augmented least-squares problem instead
            aug_s = np.vstack([sc, np.sqrt(ridge_lambda) * np.eye(n)])
            aug_y = np.vstack([yc, np.zeros((n, y.shape[1]))])
            coef = scipy.linalg.lstsq(aug_s, aug_y)[0]
    else:
        coef, _, rank, _ = scipy.linalg.lstsq(sc, yc)
        if rank < n:
            raise SingularSystem(f"state matrix has rank {rank} < {n} with ridge_lambda = 0")
    w_v = coef.T.copy()
    intercept = y_mean - w_v @ s_mean
    return Readout(w_v, intercept, float(ridge_lambda))


def run_driven(esn: Esn, readout: Readout, inputs: TimeSeries, washout: int = 0) -> TimeSeries:
    """Outputs while the reservoir is driven by the true input sequence.

    With output feedback the reservoir's own previous output is fed back.
    """
    u = as_array(inputs)
    if u.shape[1] != esn.config.input_dim:
        raise DimensionMismatch(f"inputs have {u.shape[1]} channels, reservoir expects {esn.config.input_dim}")
    if readout.n_nodes != esn.n_nodes:
        raise DimensionMismatch("readout was trained on a reservoir of different size")
    if washout > u.shape[0]:
        raise LengthMismatch("washout longer than the input")
    if esn.W_fb is None:
        states = _drive(esn, u, None)[washout:]
        return TimeSeries(readout.predict(states).reshape(-1, readout.output_dim))
    out = np.empty((u.shape[0], readout.output_dim))
    fb = np.zeros(readout.output_dim)
    for t in range(u.shape[0]):
        x = esn_step(esn, u[t], fb)
        fb = readout.output(x)
        out[t] = fb
    _check_finite(out)
    return TimeSeries(out[washout:])


def run_free(esn: Esn, readout: Readout, priming: TimeSeries, horizon: int) -> TimeSeries:
    """Prime on true values, then feed each output back as the next input.

    Output ``h`` is the prediction for the frame ``h + 1`` steps after the
    last priming frame.
    """
    p = as_array(priming)
    if readout.output_dim != esn.config.input_dim:
        raise DimensionMismatch("free running needs readout output_dim == reservoir input_dim")
    if p.shape[1] != esn.config.input_dim:
        raise DimensionMismatch("priming has the wrong number of channels")
    if horizon < 0:
        raise InvalidParameter("horizon must be nonnegative")
    if horizon == 0:
        return TimeSeries(np.empty((0, readout.output_dim)), allow_nonfinite=True)
    if p.shape[0] < 1:
        raise LengthMismatch("free running needs at least one priming frame")
    x = _drive(esn, p, None)[-1]
    out = np.empty((horizon, readout.output_dim))
    with np.errstate(over="ignore", invalid="ignore"):
        for h in range(horizon):
            v = readout.output(x)
            out[h] = v
            if h + 1 < horizon:
                x = esn_step(esn, v, v if esn.W_fb is not None else None)
    _check_finite(out)
    return TimeSeries(out)


def _check_finite(out: np.ndarray) -> None:
    if not np.all(np.isfinite(out)):
        raise NonFinite(int(np.argwhere(~np.isfinite(out))[0, 0]))


# -- serialisation --------------------------------------------------------


def _enc(a: np.ndarray, dtype: str = "<f8") -> str:
    return base64.b64encode(np.ascontiguousarray(a, dtype=dtype).tobytes()).decode("ascii")


def _dec(s: str, dtype: str = "<f8") -> np.ndarray:
    return np.frombuffer(base64.b64decode(s), dtype=dtype).astype(np.float64 if dtype == "<f8" else np.int64)


def _dense(a: np.ndarray) -> dict:
    return {"encoding": "dense", "shape": list(a.shape), "data": _enc(a)}


def _coo(a: np.ndarray) -> dict:
    r, c = np.nonzero(a)
    return {"encoding": "coo", "shape": list(a.shape), "row": _enc(r, "<i8"), "col": _enc(c, "<i8"), "data": _enc(a[r, c])}


def _load_matrix(d: dict) -> np.ndarray:
    shape = tuple(d["shape"])
    if d["encoding"] == "dense":
        return _dec(d["data"]).reshape(shape)
    if d["encoding"] == "coo":
        out = np.zeros(shape)
        out[_dec(d["row"], "<i8"), _dec(d["col"], "<i8")] = _dec(d["data"])
        return out
    raise InvalidParameter(f"unknown matrix encoding {d['encoding']!r}")


def esn_to_dict(esn: Esn) -> dict:
    return {
        "format": "rcbench-esn",
        "version": SERIAL_VERSION,
        "config": esn.config.to_dict(),
        "timing": TIMING_CONVENTION,
        "weights": {
            "W": _coo(esn.W),
            "W_u": _dense(esn.W_u),
            "bias": _dense(esn.bias),
            "W_fb": None if esn.W_fb is None else _dense(esn.W_fb),
        },
        "state": _dense(esn.state),
    }


def esn_from_dict(d: dict) -> Esn:
    """Rebuild an Esn; a document holding only ``config`` is re-drawn from its seed."""
    if d.get("format", "rcbench-esn") != "rcbench-esn":
        raise InvalidParameter(f"not a reservoir document: format {d.get('format')!r}")
    if d.get("version", SERIAL_VERSION) > SERIAL_VERSION:
        raise InvalidParameter(f"reservoir document version {d['version']} is newer than supported")
    config = EsnConfig.from_dict(d["config"])
    if "weights" not in d:
        return esn_new(config)
    w = d["weights"]
    return Esn(
        config,
        _load_matrix(w["W"]),
        _load_matrix(w["W_u"]),
        _load_matrix(w["bias"]),
        None if w.get("W_fb") is None else _load_matrix(w["W_fb"]),
        None if d.get("state") is None else _load_matrix(d["state"]),
    )


def readout_to_dict(readout: Readout) -> dict:
    return {
        "format": "rcbench-readout",
        "version": SERIAL_VERSION,
        "ridge_lambda": readout.ridge_lambda,
        "W_v": _dense(readout.W_v),
        "intercept": _dense(readout.intercept),
    }


def readout_from_dict(d: dict) -> Readout:
    if d.get("format") != "rcbench-readout":
        raise InvalidParameter("not a readout document")
    return Readout(_load_matrix(d["W_v"]), _load_matrix(d["intercept"]), float(d["ridge_lambda"]))


def save_json(obj: Esn | Readout, path: str | Path) -> None:
    doc = esn_to_dict(obj) if isinstance(obj, Esn) else readout_to_dict(obj)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_esn(path: str | Path) -> Esn:
    return esn_from_dict(json.loads(Path(path).read_text()))


def load_readout(path: str | Path) -> Readout:
    return readout_from_dict(json.loads(Path(path).read_text()))


def with_seed(config: EsnConfig, seed: SeedSpec) -> EsnConfig:
    return replace(config, seed=seed)
