"""First-order jets (dual numbers with a gradient payload).

A :class:`Jet` carries a value and the gradient of that value with respect to
a fixed set of seed variables. Values may be batched: ``val`` has any shape
``S`` and ``grad`` has shape ``(n,) + S``. Jets take part in numpy ufuncs, so
formula code written with ``np.exp``/``np.arctan``/... works unchanged on
floats, arrays and jets.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("val", "grad")
    __array_priority__ = 1000

    def __init__(self, val, grad):
        self.val = np.asarray(val)
        self.grad = np.asarray(grad)

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r}, grad={self.grad!r})"

    # numpy integration -------------------------------------------------

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            return NotImplemented
        rule = _UNARY.get(ufunc)
        if rule is not None and len(inputs) == 1:
            return rule(inputs[0])
        rule = _BINARY.get(ufunc)
        if rule is not None and len(inputs) == 2:
            return rule(*inputs)
        return NotImplemented

    # operators ---------------------------------------------------------

    def __add__(self, o):
        return _add(self, o)

    def __radd__(self, o):
        return _add(o, self)

    def __sub__(self, o):
        return _sub(self, o)

    def __rsub__(self, o):
        return _sub(o, self)

    def __mul__(self, o):
        return _mul(self, o)

    def __rmul__(self, o):
        return _mul(o, self)

    def __truediv__(self, o):
        return _div(self, o)

    def __rtruediv__(self, o):
        return _div(o, self)

    def __pow__(self, o):
        return _pow(self, o)

    def __rpow__(self, o):
        return _pow(o, self)

    def __neg__(self):
        return Jet(-self.val, -self.grad)

    def __pos__(self):
        return self


def _lift(g: np.ndarray, vshape: tuple, shape: tuple) -> np.ndarray:
    """Align a gradient for a value of shape ``vshape`` to result ``shape``."""
    extra = len(shape) - len(vshape)
    return g.reshape(g.shape[:1] + (1,) * extra + g.shape[1:])


def _parts(a):
    if isinstance(a, Jet):
        return a.val, a.grad
    return np.asarray(a), None


def _combine(a, b, da, db):
    """Build a Jet from partials ``da = d(out)/d(a)``, ``db = d(out)/d(b)``."""
    av, ag = _parts(a)
    bv, bg = _parts(b)
    shape = np.broadcast_shapes(av.shape, bv.shape)
    grad = 0
    if ag is not None:
        grad = _lift(ag, av.shape, shape) * da
    if bg is not None:
        grad = grad + _lift(bg, bv.shape, shape) * db
    n = (ag if ag is not None else bg).shape[0]
    grad = np.broadcast_to(grad, (n,) + shape)
    return grad


def _add(a, b):
    av, _ = _parts(a)
    bv, _ = _parts(b)
    return Jet(av + bv, _combine(a, b, 1.0, 1.0))


def _sub(a, b):
    av, _ = _parts(a)
    bv, _ = _parts(b)
    return Jet(av - bv, _combine(a, b, 1.0, -1.0))


def _mul(a, b):
    av, _ = _parts(a)
    bv, _ = _parts(b)
    return Jet(av * bv, _combine(a, b, bv, av))


def _div(a, b):
    av, _ = _parts(a)
    bv, _ = _parts(b)
    q = av / bv
    return Jet(q, _combine(a, b, 1.0 / bv, -q / bv))


def _pow(a, b):
    av, _ = _parts(a)
    bv, bg = _parts(b)
    out = av**bv
    if bg is None:
        # constant exponent; keep x**n well defined at x == 0 for integer n
        da = bv * av ** (bv - 1)
        return Jet(out, _combine(a, b, da, 0.0))
    return Jet(out, _combine(a, b, bv * av ** (bv - 1), out * np.log(av)))


def _unary(f, df):
    def rule(a):
        v, g = _parts(a)
        return Jet(f(v), g * df(v))

    return rule


def _arctan2(a, b):
    av, _ = _parts(a)
    bv, _ = _parts(b)
    r2 = av * av + bv * bv
    if np.iscomplexobj(av) or np.iscomplexobj(bv):
        # only defined on the real axis; complex jets arise from complex Casimirs
        if np.any(np.imag(av) != 0) or np.any(np.imag(bv) != 0):
            raise ValueError("arctan2 of non-real arguments")
        ang = np.arctan2(np.real(av), np.real(bv)).astype(complex)
    else:
        ang = np.arctan2(av, bv)
    return Jet(ang, _combine(a, b, bv / r2, -av / r2))


def _square(a):
    return _mul(a, a)


_UNARY = {
    np.negative: lambda a: -a,
    np.positive: lambda a: a,
    np.square: _square,
    np.exp: _unary(np.exp, np.exp),
    np.log: _unary(np.log, lambda v: 1.0 / v),
    np.sqrt: _unary(np.sqrt, lambda v: 0.5 / np.sqrt(v)),
    np.sin: _unary(np.sin, np.cos),
    np.cos: _unary(np.cos, lambda v: -np.sin(v)),
    np.tan: _unary(np.tan, lambda v: 1.0 / np.cos(v) ** 2),
    np.arctan: _unary(np.arctan, lambda v: 1.0 / (1.0 + v * v)),
    np.arcsin: _unary(np.arcsin, lambda v: 1.0 / np.sqrt(1.0 - v * v)),
    np.arccos: _unary(np.arccos, lambda v: -1.0 / np.sqrt(1.0 - v * v)),
}

_BINARY = {
    np.add: _add,
    np.subtract: _sub,
    np.multiply: _mul,
    np.true_divide: _div,
    np.power: _pow,
    np.arctan2: _arctan2,
}


def seed(values, dtype=float) -> list[Jet]:
    """Independent jets for a list of (batched) values, one per variable."""
    vals = [np.asarray(v, dtype=dtype) for v in values]
    shape = np.broadcast_shapes(*(v.shape for v in vals))
    n = len(vals)
    out = []
    for i, v in enumerate(vals):
        g = np.zeros((n,) + shape, dtype=dtype)
        g[i] = 1.0
        out.append(Jet(np.broadcast_to(v, shape).copy(), g))
    return out


def value(x):
    return x.val if isinstance(x, Jet) else np.asarray(x)


def gradient(x, nvars: int, shape=()) -> np.ndarray:
    """Gradient of ``x``; zeros when ``x`` is a constant."""
    if isinstance(x, Jet):
        return np.broadcast_to(x.grad, (nvars,) + np.broadcast_shapes(x.val.shape, shape))
    return np.zeros((nvars,) + np.broadcast_shapes(np.shape(x), shape))
