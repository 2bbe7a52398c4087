"""Operator convex functions on (0, inf).

Extended reals are ordinary floats in ``(-inf, inf]``; :func:`ext_mul` and
:func:`ext_dot` apply the convention ``0 * inf = 0``.

Every function exposes three things the divergence engines need: pointwise
evaluation on ``(0, inf)``, the endpoint pair ``(f(0+), f'(inf))`` and the
perspective weight ``k_f(t) = (1 - t) f(t / (1 - t))`` on ``[0, 1]``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, InputError, UnsupportedFormError

INF = math.inf
CLAMP_TOL = 1e-9


def ext_mul(w, x):
    """``w * x`` for ``w >= 0`` with ``0 * inf = 0``."""
    if w == 0:
        return 0.0
    return w * x


def ext_dot(weights, values):
    """``sum_k w_k x_k`` over extended values, ``w_k >= 0``, with ``0 * inf = 0``."""
    weights = np.asarray(weights, dtype=float)
    values = np.asarray(values, dtype=float)
    live = weights > 0
    if not np.any(live):
        return 0.0
    v = values[live]
    if np.any(np.isposinf(v)):
        return INF
    return float(np.dot(weights[live], v))


def _positive(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("operator convex functions are evaluated on (0, inf) only")
    return t


class OperatorConvexFunction:
    """Common interface; see :class:`Named` and :class:`Canonical`."""

    label: str

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        raise NotImplementedError

    def endpoints(self) -> Tuple[float, float]:
        raise NotImplementedError

    def _interior_perspective(self, t):
        u = 1.0 - t
        return u * self._raw(t / u)

    def perspective(self, t):
        """Vectorised ``k_f`` on ``[0, 1]`` (no clamping; see :func:`perspective_weight`)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        f0, finf = self.endpoints()
        out = np.empty(t.shape)
        lo = t <= 0.0
        hi = t >= 1.0
        mid = ~(lo | hi)
        out[lo] = f0
        out[hi] = finf
        if np.any(mid):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out[mid] = self._interior_perspective(t[mid])
        return float(out[0]) if scalar else out

    def _raw(self, t):
        return self.evaluate(t)


@dataclass(frozen=True, eq=False)
class Named(OperatorConvexFunction):
    """Closed-form function with exact endpoint values.

    ``persp`` optionally gives a numerically stable interior ``k_f``.
    """

    label: str
    func: Callable[[np.ndarray], np.ndarray]
    f_zero_plus: float
    f_prime_inf: float
    persp: Optional[Callable[[np.ndarray], np.ndarray]] = None
    spec: dict = field(default_factory=dict)

    def evaluate(self, t):
        t = _positive(t)
        out = self.func(t)
        return float(out) if np.ndim(out) == 0 else out

    def _raw(self, t):
        return self.func(t)

    def endpoints(self):
        return self.f_zero_plus, self.f_prime_inf

    def _interior_perspective(self, t):
        if self.persp is not None:
            return self.persp(t)
        return super()._interior_perspective(t)

    def __repr__(self):
        return f"Named({self.label!r})"


@dataclass(frozen=True, eq=False)
class Canonical(OperatorConvexFunction):
    """``a + b(t-1) + c(t-1)^2 + d(t-1)^2/t + sum_k w_k (t-1)^2/(t+s_k)``."""

    a: float
    b: float
    c: float = 0.0
    d: float = 0.0
    atoms: Tuple[Tuple[float, float], ...] = ()
    label: str = "canonical"

    def _arrays(self):
        if not self.atoms:
            return np.empty(0), np.empty(0)
        s, w = np.array(self.atoms, dtype=float).T
        return s, w

    def evaluate(self, t):
        t = _positive(t)
        out = self._raw(t)
        return float(out) if np.ndim(out) == 0 else out

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - 1.0) ** 2
        val = self.a + self.b * (t - 1.0) + self.c * x + self.d * x / t
        s, w = self._arrays()
        if s.size:
            val = val + x * np.sum(w / (t[..., None] + s), axis=-1)
        return val

    def endpoints(self):
        s, w = self._arrays()
        f0 = INF if self.d > 0 else self.a - self.b + self.c + float(np.sum(w / s))
        finf = INF if self.c > 0 else self.b + self.d + float(np.sum(w))
        return f0, finf

    def _interior_perspective(self, t):
        y = (2.0 * t - 1.0) ** 2
        u = 1.0 - t
        val = self.a * u + self.b * (2.0 * t - 1.0) + self.c * y / u + self.d * y / t
        s, w = self._arrays()
        if s.size:
            val = val + y * np.sum(w / (t[..., None] + s * u[..., None]), axis=-1)
        return val

    def __repr__(self):
        return f"Canonical(a={self.a}, b={self.b}, c={self.c}, d={self.d}, atoms={list(self.atoms)})"


def _xlogx(t):
    with np.errstate(divide="ignore", invalid="ignore"):
        return t * np.log(t)


def make_named(label, alpha=None, a=None, b=None):
    """Built-in functions.

    ``label`` is one of ``xlogx``, ``neglog``, ``power`` (``t^alpha``, alpha > 1),
    ``negpower`` (``-t^alpha``, 0 < alpha < 1), ``square``, ``affine``
    (``a + b t``) and ``chi2`` (``(t-1)^2``).
    """
    if label == "xlogx":
        return Named("xlogx", _xlogx, 0.0, INF,
                     persp=lambda t: t * (np.log(t) - np.log1p(-t)), spec={"name": "xlogx"})
    if label == "neglog":
        return Named("neglog", lambda t: -np.log(t), INF, 0.0,
                     persp=lambda t: (1.0 - t) * (np.log1p(-t) - np.log(t)), spec={"name": "neglog"})
    if label == "power":
        if alpha is None or not alpha > 1:
            raise DomainError("power(alpha) needs alpha > 1")
        alpha = float(alpha)
        return Named(f"power({alpha:g})", lambda t: t ** alpha, 0.0, INF,
                     persp=lambda t: t ** alpha * (1.0 - t) ** (1.0 - alpha),
                     spec={"name": "power", "alpha": alpha})
    if label == "negpower":
        if alpha is None or not 0 < alpha < 1:
            raise DomainError("negpower(alpha) needs 0 < alpha < 1")
        alpha = float(alpha)
        return Named(f"negpower({alpha:g})", lambda t: -(t ** alpha), 0.0, 0.0,
                     persp=lambda t: -(t ** alpha) * (1.0 - t) ** (1.0 - alpha),
                     spec={"name": "negpower", "alpha": alpha})
    if label == "square":
        return Named("square", lambda t: t * t, 0.0, INF,
                     persp=lambda t: t * t / (1.0 - t), spec={"name": "square"})
    if label == "affine":
        a = 0.0 if a is None else float(a)
        b = 0.0 if b is None else float(b)
        return Named(f"affine({a:g},{b:g})", lambda t: a + b * t, a, b,
                     persp=lambda t: a * (1.0 - t) + b * t, spec={"name": "affine", "a": a, "b": b})
    if label == "chi2":
        return Named("chi2", lambda t: (t - 1.0) ** 2, 1.0, INF,
                     persp=lambda t: (2.0 * t - 1.0) ** 2 / (1.0 - t), spec={"name": "chi2"})
    raise InputError(f"unknown function name {label!r}")


def make_canonical(a, b, c=0.0, d=0.0, atoms=()):
    if c < 0 or d < 0:
        raise DomainError("canonical form needs c >= 0 and d >= 0")
    clean = []
    for s, w in atoms:
        s, w = float(s), float(w)
        if not (s > 0 and w > 0):
            raise DomainError("canonical atoms need s > 0 and w > 0")
        clean.append((s, w))
    return Canonical(float(a), float(b), float(c), float(d), tuple(clean))


def ratio_sum(atoms):
    """``f(t) = sum_k nu_k t^2 / (t + s_k)`` in canonical form.

    These functions have ``f(0+) = 0`` and ``f'(inf) = sum nu_k``; they are the
    test family for which ``eps -> S(rho || sigma + eps rho)`` is monotone.
    """
    a = b = 0.0
    canon = []
    for s, nu in atoms:
        s, nu = float(s), float(nu)
        a += nu / (1 + s)
        b += nu * (1 + 2 * s) / (1 + s) ** 2
        canon.append((s, nu * s * s / (1 + s) ** 2))
    f = make_canonical(a, b, 0.0, 0.0, canon)
    return Canonical(f.a, f.b, 0.0, 0.0, f.atoms, label="ratio_sum")


def evaluate(f, t):
    return f.evaluate(t)


def endpoints(f):
    return f.endpoints()


def transpose(f):
    """``t f(1/t)``; endpoints are swapped."""
    f0, finf = f.endpoints()

    def func(t):
        return t * f._raw(1.0 / t)

    def persp(t):
        return f.perspective(1.0 - t)

    return Named(f"transpose({f.label})", func, finf, f0, persp=persp,
                 spec={"transpose": to_json(f)})


def cutoff_approximant(f, n):
    """Truncate the representing measure to ``[1/n, n]``.

    ``c`` becomes an atom at ``s = n`` of weight ``c n`` and ``d`` an atom at
    ``s = 1/n`` of weight ``d``; the result is again canonical with finite
    endpoints.
    """
    if not isinstance(f, Canonical):
        raise UnsupportedFormError("cutoff approximants need a canonical function")
    n = int(n)
    if n < 1:
        raise DomainError("cutoff index must be a positive integer")
    lo, hi = 1.0 / n, float(n)
    atoms = [(s, w) for s, w in f.atoms if lo <= s <= hi]
    if f.c > 0:
        atoms.append((hi, f.c * n))
    if f.d > 0:
        atoms.append((lo, f.d))
    return Canonical(f.a, f.b, 0.0, 0.0, tuple(atoms), label=f"{f.label}_cut{n}")


def perspective_weight(f, t):
    """``k_f(t)`` with ``k_f(0) = f(0+)`` and ``k_f(1) = f'(inf)``.

    Inputs up to ``CLAMP_TOL`` outside ``[0, 1]`` are clamped.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < -CLAMP_TOL) or np.any(t > 1.0 + CLAMP_TOL):
        raise DomainError("perspective weight needs t in [0, 1]")
    return f.perspective(np.clip(t, 0.0, 1.0))


def to_json(f):
    if isinstance(f, Canonical):
        return {"canonical": {"a": f.a, "b": f.b, "c": f.c, "d": f.d,
                              "atoms": [[s, w] for s, w in f.atoms]}}
    return dict(f.spec)


def from_json(obj):
    """Parse the JSON form of a function (see :func:`to_json`)."""
    if isinstance(obj, str):
        return make_named(obj)
    if not isinstance(obj, dict):
        raise InputError("function spec must be an object")
    if "canonical" in obj:
        if set(obj) != {"canonical"}:
            raise InputError(f"unknown keys in function spec: {sorted(set(obj) - {'canonical'})}")
        c = obj["canonical"]
        extra = set(c) - {"a", "b", "c", "d", "atoms"}
        if extra:
            raise InputError(f"unknown keys in canonical spec: {sorted(extra)}")
        return make_canonical(c.get("a", 0.0), c.get("b", 0.0), c.get("c", 0.0), c.get("d", 0.0),
                              [tuple(x) for x in c.get("atoms", [])])
    if "transpose" in obj:
        if set(obj) != {"transpose"}:
            raise InputError("unknown keys next to 'transpose'")
        return transpose(from_json(obj["transpose"]))
    if "name" not in obj:
        raise InputError("function spec needs 'name', 'canonical' or 'transpose'")
    extra = set(obj) - {"name", "alpha", "a", "b"}
    if extra:
        raise InputError(f"unknown keys in function spec: {sorted(extra)}")
    return make_named(obj["name"], alpha=obj.get("alpha"), a=obj.get("a"), b=obj.get("b"))


def parse_function(text):
    """CLI shorthand: ``xlogx``, ``power:1.5``, ``affine:a,b`` or a JSON object."""
    import json

    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad function JSON: {exc}") from None
        return from_json(obj)
    name, _, arg = text.partition(":")
    try:
        if name in ("power", "negpower"):
            return make_named(name, alpha=float(arg))
        if name == "affine":
            a, b = (float(x) for x in arg.split(","))
            return make_named("affine", a=a, b=b)
    except ValueError:
        raise InputError(f"bad function argument in {text!r}") from None
    return make_named(name)
