"""Chaotic maps: fixed-point cipher generators and characterization tools.

Three maps feed the cipher and run in 32-bit fixed point so keystreams are
bit-identical everywhere: Logistic (Q2.29), Henon (Q4.27) and Lorenz
(Q10.21, forward Euler with dt = 1/128).  The ``*_step`` functions below
are the readable reference; ``MapGenerator`` runs the same arithmetic
compiled.

Tent and Chirikov, plus double-precision copies of the three cipher maps,
exist only for characterization: Lyapunov exponents, bifurcation scans and
throughput/correlation benchmarks.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from . import _kernels as K
from .errors import DivergentTrajectory, NumericalError
from .fxp import Q_HENON, Q_LOGISTIC, Q_LORENZ, Fx32, fx_add, fx_mul, fx_sub

WARMUP = 1024
LORENZ_DT = Fx32(K.DT_LORENZ, Q_LORENZ)

_ONE_LOGISTIC = Fx32(1 << 29, Q_LOGISTIC)
_ONE_HENON = Fx32(1 << 27, Q_HENON)


@dataclass(frozen=True)
class LogisticState:
    x: Fx32
    mu: Fx32


@dataclass(frozen=True)
class HenonState:
    x: Fx32
    y: Fx32
    a: Fx32
    b: Fx32


@dataclass(frozen=True)
class LorenzState:
    x: Fx32
    y: Fx32
    z: Fx32
    sigma: Fx32
    rho: Fx32
    beta: Fx32


def _guard(*words: Fx32) -> None:
    if any(w.saturated for w in words):
        raise DivergentTrajectory("fixed-point range exceeded")


def logistic_step(s: LogisticState) -> LogisticState:
    t = fx_mul(s.mu, s.x)
    u = fx_sub(_ONE_LOGISTIC, s.x)
    x = fx_mul(t, u)
    _guard(t, u, x)
    return replace(s, x=x)


def henon_step(s: HenonState) -> HenonState:
    xx = fx_mul(s.x, s.x)
    axx = fx_mul(s.a, xx)
    one_y = fx_add(_ONE_HENON, s.y)
    x = fx_sub(one_y, axx)
    y = fx_mul(s.b, s.x)
    _guard(xx, axx, one_y, x, y)
    return replace(s, x=x, y=y)


def lorenz_step(s: LorenzState) -> LorenzState:
    d = fx_sub(s.y, s.x)
    dx = fx_mul(s.sigma, d)
    r = fx_sub(s.rho, s.z)
    xr = fx_mul(s.x, r)
    dy = fx_sub(xr, s.y)
    xy = fx_mul(s.x, s.y)
    bz = fx_mul(s.beta, s.z)
    dz = fx_sub(xy, bz)
    x = fx_add(s.x, fx_mul(LORENZ_DT, dx))
    y = fx_add(s.y, fx_mul(LORENZ_DT, dy))
    z = fx_add(s.z, fx_mul(LORENZ_DT, dz))
    _guard(d, dx, r, xr, dy, xy, bz, dz, x, y, z)
    return replace(s, x=x, y=y, z=z)


_KINDS = {"logistic": K.LOGISTIC, "henon": K.HENON, "lorenz": K.LORENZ}
_QFORMAT = {"logistic": Q_LOGISTIC, "henon": Q_HENON, "lorenz": Q_LORENZ}
_DIMS = {"logistic": 1, "henon": 2, "lorenz": 3}


def _state_words(state) -> tuple[str, list[int]]:
    if isinstance(state, LogisticState):
        return "logistic", [state.x.raw, state.mu.raw]
    if isinstance(state, HenonState):
        return "henon", [state.x.raw, state.y.raw, state.a.raw, state.b.raw]
    if isinstance(state, LorenzState):
        return "lorenz", [state.x.raw, state.y.raw, state.z.raw,
                          state.sigma.raw, state.rho.raw, state.beta.raw]
    raise TypeError(f"not a cipher map state: {state!r}")


class MapGenerator:
    """Sequential keystream source for one fixed-point cipher map.

    Construction runs ``warmup`` iterations whose output is discarded.  Each
    emitted byte costs exactly one map iteration and is the low byte of the
    x word.  ``steps`` counts every iteration, ``emitted`` only keystream
    bytes.  Not safe to share between threads.
    """

    def __init__(self, state, warmup: int = WARMUP):
        self.kind, words = _state_words(state)
        self._kind = _KINDS[self.kind]
        self._state = np.array(words, dtype=np.int64)
        self.steps = 0
        self.emitted = 0
        if warmup:
            done = K.advance(self._state, self._kind, warmup)
            self.steps += done
            if done != warmup:
                raise DivergentTrajectory(f"{self.kind} map saturated during warm-up")

    def clone(self) -> "MapGenerator":
        twin = object.__new__(MapGenerator)
        twin.kind, twin._kind = self.kind, self._kind
        twin._state = self._state.copy()
        twin.steps, twin.emitted = self.steps, self.emitted
        return twin

    @property
    def state(self):
        q = _QFORMAT[self.kind]
        words = [Fx32(int(w), q) for w in self._state]
        return {"logistic": LogisticState, "henon": HenonState,
                "lorenz": LorenzState}[self.kind](*words)

    def next_byte(self) -> int:
        if not K.step(self._state, self._kind):
            raise DivergentTrajectory(f"{self.kind} map saturated")
        self.steps += 1
        self.emitted += 1
        return int(self._state[0] & 0xFF)

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint8)
        done = K.fill(self._state, self._kind, out)
        self.steps += done
        self.emitted += done
        if done != n:
            raise DivergentTrajectory(f"{self.kind} map saturated")
        return out

    def period(self, limit: int) -> int:
        """Cycle length of the orbit from the current state (0 if none within
        ``limit`` steps, -1 if it saturates)."""
        return int(K.cycle_period(self._state, self._kind, limit))

    # low-level access for the permutation and substitution stages
    def _raw(self) -> np.ndarray:
        return self._state

    def _account(self, n: int) -> None:
        self.steps += n
        self.emitted += n


def next_keystream_byte(g: MapGenerator) -> int:
    return g.next_byte()


# ---------------------------------------------------------------------------
# characterization (double precision)

CHAR_LOGISTIC, CHAR_TENT, CHAR_HENON, CHAR_LORENZ, CHAR_CHIRIKOV = range(5)
_CHAR_IDS = {"logistic": CHAR_LOGISTIC, "tent": CHAR_TENT, "henon": CHAR_HENON,
             "lorenz": CHAR_LORENZ, "chirikov": CHAR_CHIRIKOV}
_PARAM_ORDER = {
    "logistic": ("mu",),
    "tent": ("mu",),
    "henon": ("a", "b"),
    "lorenz": ("sigma", "rho", "beta", "dt"),
    "chirikov": ("k",),
}
# integer bits of the 32-bit word a double state is quantized to for byte
# extraction; chirikov's x is reduced mod 2*pi first
_CHAR_QFORMAT = {"logistic": 2, "tent": 2, "henon": 4, "lorenz": 10, "chirikov": 4}

# parameters the cipher design was selected with, and the exponents reported
# alongside them.  beta enters the z equation as "- beta * z"; the positive
# value is the one that keeps the Lorenz attractor bounded.
REFERENCE_MAPS = {
    "henon": ({"a": 1.4, "b": 0.3}, (0.1, 0.1), 0.61),
    "tent": ({"mu": 1.98}, (0.3,), 0.68),
    "logistic": ({"mu": 3.98}, (0.3,), 0.63),
    "lorenz": ({"sigma": 10.0, "rho": 28.0, "beta": 2.67, "dt": 1 / 128}, (1.0, 1.0, 1.0), 0.92),
    "chirikov": ({"k": 10.0}, (0.5, 0.5), 0.85),
}


@dataclass
class CharacterizationMap:
    name: str
    params: dict = field(default_factory=dict)
    initial: tuple = ()

    def __post_init__(self):
        if self.name not in _CHAR_IDS:
            raise ValueError(f"unknown map {self.name!r}")
        defaults, x0, _ = REFERENCE_MAPS[self.name]
        self.params = {**defaults, **self.params}
        if not self.initial:
            self.initial = x0
        if len(self.initial) != (1 if self.name in ("logistic", "tent") else
                                 3 if self.name == "lorenz" else 2):
            raise ValueError(f"{self.name} needs a different number of initial values")

    @classmethod
    def reference(cls, name: str) -> "CharacterizationMap":
        return cls(name)

    @property
    def primary_param(self) -> str:
        return {"lorenz": "rho"}.get(self.name, _PARAM_ORDER[self.name][0])

    def _arrays(self):
        p = np.array([self.params[k] for k in _PARAM_ORDER[self.name]], dtype=np.float64)
        s = np.array(self.initial, dtype=np.float64)
        return _CHAR_IDS[self.name], p, s


@njit(cache=True)
def _cstep(kind, p, s):
    if kind == CHAR_LOGISTIC:
        s[0] = p[0] * s[0] * (1.0 - s[0])
    elif kind == CHAR_TENT:
        if s[0] < 0.5:
            s[0] = p[0] * s[0]
        else:
            s[0] = p[0] * (1.0 - s[0])
    elif kind == CHAR_HENON:
        x = s[0]
        s[0] = 1.0 + s[1] - p[0] * x * x
        s[1] = p[1] * x
    elif kind == CHAR_LORENZ:
        x, y, z = s[0], s[1], s[2]
        dt = p[3]
        s[0] = x + dt * p[0] * (y - x)
        s[1] = y + dt * (x * (p[1] - z) - y)
        s[2] = z + dt * (x * y - p[2] * z)
    else:
        s[0] = (s[0] + p[0] * math.sin(s[1])) % (2.0 * math.pi)
        s[1] = (s[1] + s[0]) % (2.0 * math.pi)


@njit(cache=True)
def _tangent(kind, p, s, v):
    """Apply the Jacobian at ``s`` to ``v`` in place."""
    if kind == CHAR_HENON:
        a0 = -2.0 * p[0] * s[0] * v[0] + v[1]
        a1 = p[1] * v[0]
        v[0], v[1] = a0, a1
    elif kind == CHAR_LORENZ:
        x, y, z = s[0], s[1], s[2]
        dt = p[3]
        a0 = v[0] + dt * p[0] * (v[1] - v[0])
        a1 = v[1] + dt * ((p[1] - z) * v[0] - v[1] - x * v[2])
        a2 = v[2] + dt * (y * v[0] + x * v[1] - p[2] * v[2])
        v[0], v[1], v[2] = a0, a1, a2
    else:
        c = p[0] * math.cos(s[1])
        a0 = v[0] + c * v[1]
        a1 = v[0] + (1.0 + c) * v[1]
        v[0], v[1] = a0, a1


@njit(cache=True)
def _lyapunov(kind, p, s, n, transient):
    for _ in range(transient):
        _cstep(kind, p, s)
    acc = 0.0
    if kind == CHAR_LOGISTIC or kind == CHAR_TENT:
        for _ in range(n):
            x = s[0]
            if kind == CHAR_LOGISTIC:
                d = abs(p[0] * (1.0 - 2.0 * x))
            else:
                d = abs(p[0])
            if not (d > 0.0) or not math.isfinite(d):
                return math.nan
            acc += math.log(d)
            _cstep(kind, p, s)
        return acc / n
    v = np.zeros(s.shape[0])
    v[0] = 1.0
    for _ in range(n):
        _tangent(kind, p, s, v)
        _cstep(kind, p, s)
        norm = 0.0
        for j in range(v.shape[0]):
            norm += v[j] * v[j]
        norm = math.sqrt(norm)
        if not (norm > 0.0) or not math.isfinite(norm):
            return math.nan
        acc += math.log(norm)
        for j in range(v.shape[0]):
            v[j] /= norm
    return acc / n


@njit(cache=True)
def _orbit(kind, p, s, n, transient):
    for _ in range(transient):
        _cstep(kind, p, s)
    out = np.empty(n)
    for i in range(n):
        _cstep(kind, p, s)
        out[i] = s[0]
    return out


@njit(cache=True)
def _char_bytes(kind, p, s, n, scale):
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        _cstep(kind, p, s)
        out[i] = np.int64(math.floor(s[0] * scale)) & 0xFF
    return out


def tent_step(x: float, mu: float) -> float:
    return mu * x if x < 0.5 else mu * (1.0 - x)


def chirikov_step(x: float, y: float, k: float) -> tuple[float, float]:
    """One iterate of the standard map (no modular reduction)."""
    x = x + k * math.sin(y)
    return x, y + x


TRANSIENT = 1000


def lyapunov_exponent(m: CharacterizationMap, n: int = 200_000) -> float:
    """Largest Lyapunov exponent after a 10**3-iterate transient.

    One-dimensional maps average ln|f'(x)|; the others follow a tangent
    vector with renormalization every step.  Lorenz is reported per unit of
    time (per-step value divided by dt).
    """
    if n < 100_000:
        raise ValueError("need at least 1e5 iterations")
    kind, p, s = m._arrays()
    le = _lyapunov(kind, p, s, n, TRANSIENT)
    if not math.isfinite(le):
        raise NumericalError(f"non-finite derivative while estimating {m.name}")
    if m.name == "lorenz":
        le /= m.params["dt"]
    return float(le)


def bifurcation_scan(m: CharacterizationMap, param_lo: float, param_hi: float,
                     steps: int, samples: int, param: str | None = None):
    """Attractor samples of ``m`` over a parameter sweep.

    Returns a list of ``(value, samples array)``; each orbit restarts from
    the map's initial condition and drops a 10**3-iterate transient.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    param = param or m.primary_param
    result = []
    for value in np.linspace(param_lo, param_hi, steps):
        mm = CharacterizationMap(m.name, {**m.params, param: float(value)}, m.initial)
        kind, p, s = mm._arrays()
        result.append((float(value), _orbit(kind, p, s, samples, TRANSIENT)))
    return result


def count_attractor_points(values: Sequence[float], tol: float = 1e-6) -> int:
    """Number of clusters in ``values`` with single-linkage gap ``tol``."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        return 0
    return int(1 + np.count_nonzero(np.diff(v) > tol))


def characterization_keystream(m: CharacterizationMap, n: int) -> np.ndarray:
    kind, p, s = m._arrays()
    return _char_bytes(kind, p, s, n, float(1 << (31 - _CHAR_QFORMAT[m.name])))


def map_benchmark(m: CharacterizationMap, n: int, corpus: bytes | np.ndarray,
                  repeats: int = 3) -> tuple[float, float]:
    """Keystream throughput and corpus-vs-encrypted correlation for one map.

    Generates ``n`` keystream bytes (best of ``repeats`` timings), XORs them
    over the first ``n`` corpus bytes and returns ``(bytes_per_sec, cc)``.
    """
    from .analysis.stats import pearson_cc

    data = np.frombuffer(bytes(corpus), dtype=np.uint8)[:n]
    if data.size < n:
        raise ValueError("corpus shorter than n")
    characterization_keystream(m, 16)  # compile outside the timed region
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        ks = characterization_keystream(m, n)
        best = min(best, time.perf_counter() - t0)
    return n / best, pearson_cc(data, data ^ ks)


# ---------------------------------------------------------------------------
# CSV emitters

def _sink(out):
    return out if out is not None else io.StringIO()


def bifurcation_csv(scan, out=None):
    """Rows ``param,value``; one per recorded sample."""
    buf = _sink(out)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "value"])
    for value, samples in scan:
        for x in samples:
            w.writerow([repr(value), repr(float(x))])
    return buf


def metrics_csv(rows: Iterable[tuple[str, str, float]], out=None):
    """Rows ``map,metric,value``."""
    buf = _sink(out)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["map", "metric", "value"])
    for name, metric, value in rows:
        w.writerow([name, metric, repr(float(value))])
    return buf
