"""Two-component reaction-diffusion models and manufactured solutions.

A ReactionModel bundles the diffusion pair (d1, d2), the kinetics
f(u1, u2; x, y, t) -> (f1, f2) and initial data g0(x, y) -> (u1, u2).
Manufactured variants additionally carry a closed-form exact solution;
their kinetics include the forcing term

    f_hat(x, y, t) = u_t - D lap(u) - f(u(x, y, t))

so that the exact solution satisfies u_t - D lap(u) = f~(u) identically.
All callables accept numpy arrays and broadcast.

Kinetics implemented (u = (u1, u2)):

    brusselator       f = (b + u1^2 u2 - (a+1) u1,  a u1 - u1^2 u2)
    gray_scott        f = (feed (1-u1) - u1^2 u2,   u1^2 u2 - (feed+kill) u2)
    gierer_meinhardt  f = (u1^2/u2 - u1,            u1^2/(eps mu) - u2/mu)
    schnakenberg      f = (gamma (a - u1 + u1^2 u2), gamma (b - u1^2 u2))

The Gierer-Meinhardt kinetics exist in a second published form with eps
replaced by eps^2; both are available (square_eps flag / the *_eps2
registry name) and neither is treated as canonical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Rect",
    "ReactionModel",
    "KineticsError",
    "TrigExact",
    "brusselator",
    "gray_scott",
    "gierer_meinhardt",
    "schnakenberg",
    "manufactured",
    "uniform_initial",
    "ramp_initial",
    "peak_initial",
    "striped_steady_initial",
    "MODEL_REGISTRY",
    "build_model",
]

_GM_FLOOR = 1e-12


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle (x0, x1) x (y0, y1)."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("degenerate rectangle")


class KineticsError(ValueError):
    """Kinetics evaluation hit a singular state (division guard)."""


@dataclass(frozen=True, eq=False)
class TrigExact:
    """Separable exact solution a(t) cos(k pi x) cos(l pi y) per component.

    freq is the time frequency in a(t) = cos(freq * t); modes gives the
    integer pairs (k, l) of the two components.  Integer modes satisfy
    homogeneous Neumann conditions on any rectangle with integer or
    half-integer corner coordinates, in particular the unit square and
    (-1, 1)^2 used by the built-in studies.
    """

    freq: float = 1.0
    modes: tuple[tuple[int, int], tuple[int, int]] = ((2, 1), (1, 2))

    def _spatial(self, x, y):
        (k1, l1), (k2, l2) = self.modes
        pi = math.pi
        return (np.cos(k1 * pi * x) * np.cos(l1 * pi * y),
                np.cos(k2 * pi * x) * np.cos(l2 * pi * y))

    def value(self, x, y, t):
        a = math.cos(self.freq * t)
        s1, s2 = self._spatial(x, y)
        return a * s1, a * s2

    def dt(self, x, y, t):
        a = -self.freq * math.sin(self.freq * t)
        s1, s2 = self._spatial(x, y)
        return a * s1, a * s2

    def grad_x(self, x, y, t):
        (k1, l1), (k2, l2) = self.modes
        pi = math.pi
        a = math.cos(self.freq * t)
        return (-a * k1 * pi * np.sin(k1 * pi * x) * np.cos(l1 * pi * y),
                -a * k2 * pi * np.sin(k2 * pi * x) * np.cos(l2 * pi * y))

    def grad_y(self, x, y, t):
        (k1, l1), (k2, l2) = self.modes
        pi = math.pi
        a = math.cos(self.freq * t)
        return (-a * l1 * pi * np.cos(k1 * pi * x) * np.sin(l1 * pi * y),
                -a * l2 * pi * np.cos(k2 * pi * x) * np.sin(l2 * pi * y))

    def lap(self, x, y, t):
        (k1, l1), (k2, l2) = self.modes
        pi2 = math.pi ** 2
        v1, v2 = self.value(x, y, t)
        return -(k1 * k1 + l1 * l1) * pi2 * v1, -(k2 * k2 + l2 * l2) * pi2 * v2

    def value_dt_lap(self, x, y, t):
        """(value, dt, lap) with the spatial factors computed once."""
        (k1, l1), (k2, l2) = self.modes
        pi2 = math.pi ** 2
        s1, s2 = self._spatial(x, y)
        a = math.cos(self.freq * t)
        ad = -self.freq * math.sin(self.freq * t)
        v1, v2 = a * s1, a * s2
        return ((v1, v2), (ad * s1, ad * s2),
                (-(k1 * k1 + l1 * l1) * pi2 * v1, -(k2 * k2 + l2 * l2) * pi2 * v2))


@dataclass(frozen=True, eq=False)
class ReactionModel:
    name: str
    d1: float
    d2: float
    params: dict
    f: Callable          # f(u1, u2, x, y, t) -> (f1, f2)
    g0: Callable         # g0(x, y) -> (u1, u2)
    exact: Optional[TrigExact] = None

    def __post_init__(self):
        if self.d1 < 0.0 or self.d2 < 0.0:
            raise ValueError("diffusion coefficients must be >= 0")


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def uniform_initial(v1: float, v2: float):
    def g0(x, y):
        shape = np.broadcast(x, y).shape
        return np.full(shape, float(v1)), np.full(shape, float(v2))
    return g0


def ramp_initial():
    """Linear ramps [2 + 0.25 y, 1 + 0.8 x]."""
    def g0(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        return 2.0 + 0.25 * (y * one), 1.0 + 0.8 * (x * one)
    return g0


def peak_initial(eps: float, perturbation: float = 0.001):
    """Sharp activator peak at the origin with a cosine-seeded rim.

        u1 = 0.5 [1 + p * sum_{k=1}^{20} cos(k pi y / 2)] sech^2(rho / (2 eps))
        u2 = cosh(1 - rho) / (3 cosh 1),  rho = sqrt(x^2 + y^2)

    Setting perturbation = 0 makes u1 radially symmetric.
    """
    def g0(x, y):
        rho = np.sqrt(x * x + y * y)
        k = np.arange(1, 21).reshape((21 - 1,) + (1,) * np.ndim(y))
        seed = 1.0 + perturbation * np.cos(k * np.pi * y / 2.0).sum(axis=0)
        sech = 1.0 / np.cosh(rho / (2.0 * eps))
        u1 = 0.5 * seed * sech * sech
        u2 = np.cosh(1.0 - rho) / (3.0 * math.cosh(1.0))
        return u1 * np.ones_like(rho), u2
    return g0


def striped_steady_initial(a: float, b: float, n_modes: int = 8,
                           amplitude: float = 0.01, diag_amplitude: float = 0.0016,
                           decay: bool = False):
    """Kinetics fixed point (a+b, b/(a+b)^2) plus striped cosine seeds.

    decay=False adds diag_amplitude*cos(2 pi (x+y)) plus equal-amplitude
    stripes cos(2 pi j x), j = 1..n_modes; decay=True drops the diagonal
    term and weights stripe j by amplitude/j.
    """
    s1 = a + b
    s2 = b / (s1 * s1)

    def g0(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        j = np.arange(1, n_modes + 1).reshape((n_modes,) + (1,) * np.ndim(x))
        stripes = np.cos(2.0 * np.pi * j * x)
        if decay:
            pert = amplitude * (stripes / j).sum(axis=0) * one
        else:
            pert = amplitude * stripes.sum(axis=0) * one \
                + diag_amplitude * np.cos(2.0 * np.pi * (x + y)) * one
        return s1 + pert, s2 + pert
    return g0


# ---------------------------------------------------------------------------
# kinetics
# ---------------------------------------------------------------------------

def brusselator(a: float, b: float, d1: float, d2: float,
                g0: Optional[Callable] = None, name: str = "brusselator") -> ReactionModel:
    """Brusselator kinetics; (b, a/b) is a fixed point, attracting when
    1 - a + b^2 >= 0."""
    def f(u1, u2, x, y, t):
        q = u1 * u1 * u2
        return b + q - (a + 1.0) * u1, a * u1 - q

    if g0 is None:
        g0 = uniform_initial(b, a / b)
    return ReactionModel(name, d1, d2,
                         {"a": a, "b": b, "d1": d1, "d2": d2}, f, g0)


def gray_scott(feed: float, kill: float, d1: float, d2: float,
               g0: Optional[Callable] = None, name: str = "gray_scott") -> ReactionModel:
    def f(u1, u2, x, y, t):
        q = u1 * u1 * u2
        return feed * (1.0 - u1) - q, q - (feed + kill) * u2

    if g0 is None:
        g0 = uniform_initial(1.0, 0.0)
    return ReactionModel(name, d1, d2,
                         {"feed": feed, "kill": kill, "d1": d1, "d2": d2}, f, g0)


def gierer_meinhardt(eps: float, mu: float, d1: float, d2: float,
                     square_eps: bool = False, g0: Optional[Callable] = None,
                     name: Optional[str] = None) -> ReactionModel:
    """Gierer-Meinhardt activator-inhibitor kinetics.

    square_eps selects the published variant with eps replaced by eps^2
    in the inhibitor equation.  Division by the inhibitor is guarded: an
    inhibitor value below 1e-12 in magnitude raises KineticsError (the
    point is reported) rather than being clamped, since clamping would
    silently distort the pattern dynamics.
    """
    scale = eps * eps if square_eps else eps

    def f(u1, u2, x, y, t):
        au2 = np.abs(u2)
        if np.min(au2) < _GM_FLOOR:
            idx = np.unravel_index(int(np.argmin(au2)), np.shape(au2))
            xx = np.broadcast_to(x, np.shape(au2))[idx] if np.ndim(au2) else x
            yy = np.broadcast_to(y, np.shape(au2))[idx] if np.ndim(au2) else y
            raise KineticsError(
                f"inhibitor magnitude below {_GM_FLOOR:g} at point "
                f"({float(np.asarray(xx)):.6g}, {float(np.asarray(yy)):.6g})")
        q = u1 * u1
        return q / u2 - u1, q / (scale * mu) - u2 / mu

    if g0 is None:
        g0 = peak_initial(eps)
    if name is None:
        name = "gierer_meinhardt_eps2" if square_eps else "gierer_meinhardt"
    return ReactionModel(name, d1, d2,
                         {"eps": eps, "mu": mu, "d1": d1, "d2": d2}, f, g0)


def schnakenberg(gamma: float, a: float, b: float, d1: float, d2: float,
                 g0: Optional[Callable] = None, name: str = "schnakenberg") -> ReactionModel:
    """Schnakenberg kinetics; (a+b, b/(a+b)^2) is a fixed point."""
    def f(u1, u2, x, y, t):
        q = u1 * u1 * u2
        return gamma * (a - u1 + q), gamma * (b - q)

    if g0 is None:
        g0 = striped_steady_initial(a, b)
    return ReactionModel(name, d1, d2,
                         {"gamma": gamma, "a": a, "b": b, "d1": d1, "d2": d2}, f, g0)


def manufactured(base: ReactionModel, exact: TrigExact,
                 name: Optional[str] = None) -> ReactionModel:
    """Attach an exact solution to a model by adding the forcing
    u_t - D lap(u) - f(u) to its kinetics."""
    d1, d2 = base.d1, base.d2
    base_f = base.f
    bundle = getattr(exact, "value_dt_lap", None)

    def f(u1, u2, x, y, t):
        if bundle is not None:
            (e1, e2), (t1, t2), (p1, p2) = bundle(x, y, t)
        else:
            e1, e2 = exact.value(x, y, t)
            t1, t2 = exact.dt(x, y, t)
            p1, p2 = exact.lap(x, y, t)
        fb1, fb2 = base_f(e1, e2, x, y, t)
        w1, w2 = base_f(u1, u2, x, y, t)
        return (t1 - d1 * p1 - fb1) + w1, (t2 - d2 * p2 - fb2) + w2

    def g0(x, y):
        return exact.value(x, y, 0.0)

    return ReactionModel(name or base.name + "_manufactured",
                         d1, d2, dict(base.params), f, g0, exact)


# ---------------------------------------------------------------------------
# registry keyed by model name (consumed by the config layer and CLI)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelEntry:
    factory: Callable                  # factory(params, initial) -> ReactionModel
    defaults: dict
    domain: Rect
    t_end: float
    initial: Optional[str]             # default initial-data name; None = exact


_INITIAL_BUILDERS = {
    "uniform": lambda p, v: uniform_initial(*(v or (1.0, 0.0))),
    "ramp": lambda p, v: ramp_initial(),
    "peak": lambda p, v: peak_initial(p["eps"]),
    "stripes8": lambda p, v: striped_steady_initial(p["a"], p["b"], 8, 0.01, 0.0016),
    "stripes37": lambda p, v: striped_steady_initial(p["a"], p["b"], 37, 0.001,
                                                     decay=True),
    "steady": None,  # resolved per model below
}


def _initial_from_name(model_name: str, kind: str, params: dict, values):
    if kind == "steady":
        if model_name.startswith("brusselator"):
            return uniform_initial(params["b"], params["a"] / params["b"])
        if model_name.startswith("schnakenberg"):
            s = params["a"] + params["b"]
            return uniform_initial(s, params["b"] / (s * s))
        if model_name.startswith("gray_scott"):
            return uniform_initial(1.0, 0.0)
        raise KeyError(f"no closed-form steady state registered for {model_name}")
    try:
        builder = _INITIAL_BUILDERS[kind]
    except KeyError:
        raise KeyError(f"unknown initial-data kind {kind!r}") from None
    return builder(params, values)


def _make_gm(square_eps):
    def factory(params, initial):
        return gierer_meinhardt(params["eps"], params["mu"], params["d1"],
                                params["d2"], square_eps=square_eps, g0=initial)
    return factory


def _make_manufactured(plain_factory, freq):
    def factory(params, initial):
        base = plain_factory(params, None)
        return manufactured(base, TrigExact(freq=freq))
    return factory


def _bruss_factory(params, initial):
    return brusselator(params["a"], params["b"], params["d1"], params["d2"], g0=initial)


def _gs_factory(params, initial):
    return gray_scott(params["feed"], params["kill"], params["d1"], params["d2"],
                      g0=initial)


def _schnak_factory(params, initial):
    return schnakenberg(params["gamma"], params["a"], params["b"],
                        params["d1"], params["d2"], g0=initial)


MODEL_REGISTRY: dict[str, ModelEntry] = {
    "brusselator": ModelEntry(
        _bruss_factory,
        {"a": 1.0, "b": 2.0, "d1": 0.002, "d2": 0.002},
        Rect(0.0, 1.0, 0.0, 1.0), 5.0, "ramp"),
    "brusselator_manufactured": ModelEntry(
        _make_manufactured(_bruss_factory, 1.0),
        {"a": 1.0, "b": 0.5, "d1": 1.0, "d2": 1.0},
        Rect(0.0, 1.0, 0.0, 1.0), 1.0, None),
    "gray_scott": ModelEntry(
        _gs_factory,
        {"feed": 1.0, "kill": 0.0, "d1": 0.001, "d2": 0.001},
        Rect(-1.0, 1.0, -1.0, 1.0), 1.0, "uniform"),
    "gray_scott_manufactured": ModelEntry(
        _make_manufactured(_gs_factory, 2.0),
        {"feed": 1.0, "kill": 0.0, "d1": 0.001, "d2": 0.001},
        Rect(-1.0, 1.0, -1.0, 1.0), 1.0, None),
    "gierer_meinhardt": ModelEntry(
        _make_gm(False),
        {"eps": 0.04, "mu": 0.1, "d1": 0.0016, "d2": 0.128},
        Rect(-1.0, 1.0, -1.0, 1.0), 10.0, "peak"),
    "gierer_meinhardt_eps2": ModelEntry(
        _make_gm(True),
        {"eps": 0.04, "mu": 0.1, "d1": 0.0016, "d2": 0.128},
        Rect(-1.0, 1.0, -1.0, 1.0), 10.0, "peak"),
    "schnakenberg": ModelEntry(
        _schnak_factory,
        {"gamma": 1000.0, "a": 0.126779, "b": 0.792366, "d1": 1.0, "d2": 10.0},
        Rect(0.0, 1.0, 0.0, 1.0), 1.5, "stripes8"),
    "schnakenberg_manufactured": ModelEntry(
        _make_manufactured(_schnak_factory, 1.0),
        {"gamma": 10.0, "a": 0.1, "b": 0.9, "d1": 1.0, "d2": 10.0},
        Rect(0.0, 1.0, 0.0, 1.0), 1.0, None),
}

# manufactured entries: no Gierer-Meinhardt variant because the trig
# exact solution's inhibitor component crosses zero, which the 1/u2
# kinetics cannot tolerate


def build_model(name: str, params: Optional[dict] = None,
                initial: Optional[str] = None, initial_values=None) -> ReactionModel:
    """Instantiate a registered model, overriding defaults as requested."""
    try:
        entry = MODEL_REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {sorted(MODEL_REGISTRY)}") from None
    p = dict(entry.defaults)
    if params:
        unknown = set(params) - set(p)
        if unknown:
            raise KeyError(f"unknown parameter(s) for {name}: {sorted(unknown)}")
        p.update(params)
    if entry.initial is None:
        g0 = None          # manufactured: initial data comes from the exact solution
    else:
        kind = initial or entry.initial
        g0 = _initial_from_name(name, kind, p, initial_values)
    return entry.factory(p, g0)
