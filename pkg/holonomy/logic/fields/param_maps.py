# holonomy/logic/fields/param_maps.py
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from holonomy.errors import EvalError


class ParamMap:
    """
    Smooth map [0,1]^k -> R^d, evaluated on batches of parameter points.

    evaluate:  (..., k) -> (..., d)
    jac:       (..., k) -> (..., d, k), analytic when the map provides it

    derivative_mode "analytic" uses jac; "fd" makes calculus.jacobian fall back
    to central differences even when an analytic form exists.
    """

    kind = "map"

    def __init__(self, arity: int, dim: int, derivative_mode: str = "analytic"):
        self.arity = int(arity)
        self.dim = int(dim)
        self.derivative_mode = derivative_mode

    # subclasses implement these two
    def _evaluate(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jac(self, u: np.ndarray) -> Optional[np.ndarray]:
        return None

    def evaluate(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.arity:
            raise EvalError(self.kind, f"expected {self.arity} parameters, got {u.shape[-1]}")
        try:
            x = self._evaluate(u)
        except EvalError:
            raise
        except Exception as e:
            raise EvalError(self.kind, f"{type(e).__name__}: {e}")
        if not np.all(np.isfinite(x)):
            raise EvalError(self.kind, "non-finite point")
        return x

    def analytic_jac(self, u) -> Optional[np.ndarray]:
        u = np.asarray(u, dtype=float)
        return self._jac(u)

    @property
    def has_analytic(self) -> bool:
        mid = np.full((self.arity,), 0.5)
        return self._jac(mid) is not None

    def __call__(self, u) -> np.ndarray:
        return self.evaluate(u)


# =========================================================
# Base maps
# =========================================================

class Affine(ParamMap):
    """u -> M u + c"""

    kind = "affine"

    def __init__(self, matrix, offset):
        m = np.asarray(matrix, dtype=float)
        super().__init__(m.shape[1], m.shape[0])
        self.matrix = m
        self.offset = np.asarray(offset, dtype=float)

    def _evaluate(self, u):
        return np.einsum("dk,...k->...d", self.matrix, u) + self.offset

    def _jac(self, u):
        return np.broadcast_to(self.matrix, u.shape[:-1] + self.matrix.shape).copy()


class Bigon(ParamMap):
    """
    Lens between two arcs with pinned ends:
        (s, t) -> p + length t e1 + height (2s - 1) sin(lobes pi t) e2
    Sigma(s, 0) = p and Sigma(s, 1) = p + length e1 for every s.
    """

    kind = "bigon"

    def __init__(self, origin, e1, e2, length: float = 1.0, height: float = 0.4, lobes: int = 1,
                 bulge: float = 0.0, e3=None):
        origin = np.asarray(origin, dtype=float)
        super().__init__(2, origin.shape[0])
        self.origin = origin
        self.e1 = np.asarray(e1, dtype=float)
        self.e2 = np.asarray(e2, dtype=float)
        self.e3 = np.zeros_like(origin) if e3 is None else np.asarray(e3, dtype=float)
        self.length = float(length)
        self.height = float(height)
        self.lobes = int(lobes)
        self.bulge = float(bulge)

    def _evaluate(self, u):
        s, t = u[..., 0:1], u[..., 1:2]
        w = np.sin(self.lobes * math.pi * t)
        return (self.origin + self.length * t * self.e1 + self.height * (2 * s - 1) * w * self.e2
                + self.bulge * np.sin(math.pi * s) * np.sin(math.pi * t) * self.e3)

    def _jac(self, u):
        s, t = u[..., 0:1], u[..., 1:2]
        k = self.lobes * math.pi
        w = np.sin(k * t)
        ds = 2 * self.height * w * self.e2 + self.bulge * math.pi * np.cos(math.pi * s) * np.sin(math.pi * t) * self.e3
        dt = (self.length * self.e1 + self.height * (2 * s - 1) * k * np.cos(k * t) * self.e2
              + self.bulge * math.pi * np.sin(math.pi * s) * np.cos(math.pi * t) * self.e3)
        return np.stack([ds, dt], axis=-1)


class Fan(ParamMap):
    """(s, t) -> p + t (v0 + s (v1 - v0)); the bottom edge t = 0 is pinned at p."""

    kind = "fan"

    def __init__(self, origin, v0, v1):
        origin = np.asarray(origin, dtype=float)
        super().__init__(2, origin.shape[0])
        self.origin = origin
        self.v0 = np.asarray(v0, dtype=float)
        self.v1 = np.asarray(v1, dtype=float)

    def _evaluate(self, u):
        s, t = u[..., 0:1], u[..., 1:2]
        return self.origin + t * (self.v0 + s * (self.v1 - self.v0))

    def _jac(self, u):
        s, t = u[..., 0:1], u[..., 1:2]
        ds = t * (self.v1 - self.v0)
        dt = self.v0 + s * (self.v1 - self.v0)
        return np.stack([ds, dt], axis=-1)


def _bump(u: np.ndarray, ms: int, mt: int):
    """b(s,t) = sin(ms pi s) sin(mt pi t) and its two partials."""
    s, t = u[..., 0:1], u[..., 1:2]
    a, b = ms * math.pi, mt * math.pi
    val = np.sin(a * s) * np.sin(b * t)
    ds = a * np.cos(a * s) * np.sin(b * t)
    dt = b * np.sin(a * s) * np.cos(b * t)
    return val, ds, dt


class BumpCube(ParamMap):
    """
    (r, s, t) -> Sigma(s, t) + r amp b(s, t) n with b vanishing on the boundary
    of the unit square, so every side face is thin.
    """

    kind = "bump-cube"

    def __init__(self, base: ParamMap, normal, amp: float = 0.3, ms: int = 1, mt: int = 1):
        super().__init__(3, base.dim)
        self.base = base
        self.normal = np.asarray(normal, dtype=float)
        self.amp = float(amp)
        self.ms = int(ms)
        self.mt = int(mt)

    def _evaluate(self, u):
        r = u[..., 0:1]
        val, _, _ = _bump(u[..., 1:], self.ms, self.mt)
        return self.base.evaluate(u[..., 1:]) + r * self.amp * val * self.normal

    def _jac(self, u):
        jb = self.base.analytic_jac(u[..., 1:])
        if jb is None:
            return None
        r = u[..., 0:1]
        val, ds, dt = _bump(u[..., 1:], self.ms, self.mt)
        n = self.normal
        dr = self.amp * val * n
        ds_ = jb[..., 0] + r * self.amp * ds * n
        dt_ = jb[..., 1] + r * self.amp * dt * n
        return np.stack([dr, ds_, dt_], axis=-1)


class BumpTesseract(ParamMap):
    """
    (q, r, s, t) -> Sigma(s, t) + r a1 b1(s, t) n1 + q sin(pi r) a2 b2(s, t) n2.

    The q-dependence vanishes on s, t in {0, 1} and on r in {0, 1}.
    """

    kind = "bump-tesseract"

    def __init__(self, base: ParamMap, n1, n2, amp1: float = 0.3, amp2: float = 0.3,
                 m1=(1, 1), m2=(1, 1)):
        super().__init__(4, base.dim)
        self.base = base
        self.n1 = np.asarray(n1, dtype=float)
        self.n2 = np.asarray(n2, dtype=float)
        self.amp1 = float(amp1)
        self.amp2 = float(amp2)
        self.m1 = tuple(int(m) for m in m1)
        self.m2 = tuple(int(m) for m in m2)

    def _evaluate(self, u):
        q, r = u[..., 0:1], u[..., 1:2]
        st = u[..., 2:]
        b1, _, _ = _bump(st, *self.m1)
        b2, _, _ = _bump(st, *self.m2)
        return (self.base.evaluate(st) + r * self.amp1 * b1 * self.n1
                + q * np.sin(math.pi * r) * self.amp2 * b2 * self.n2)

    def _jac(self, u):
        st = u[..., 2:]
        jb = self.base.analytic_jac(st)
        if jb is None:
            return None
        q, r = u[..., 0:1], u[..., 1:2]
        b1, b1s, b1t = _bump(st, *self.m1)
        b2, b2s, b2t = _bump(st, *self.m2)
        sr, cr = np.sin(math.pi * r), math.pi * np.cos(math.pi * r)
        dq = sr * self.amp2 * b2 * self.n2
        dr = self.amp1 * b1 * self.n1 + q * cr * self.amp2 * b2 * self.n2
        ds = jb[..., 0] + r * self.amp1 * b1s * self.n1 + q * sr * self.amp2 * b2s * self.n2
        dt = jb[..., 1] + r * self.amp1 * b1t * self.n1 + q * sr * self.amp2 * b2t * self.n2
        return np.stack([dq, dr, ds, dt], axis=-1)


# =========================================================
# Wrappers
# =========================================================

class Warp(ParamMap):
    """
    Image-space warp x -> x + amp w(x) applied after a base map.
    Points stay points, so pinned edges stay pinned.

    trig: w_i(x) = sin(k_i . x + phi_i)
    poly: w_i(x) = sum_jl q_ijl x_j x_l + l_i . x   (seeded coefficients)
    """

    kind = "warp"

    def __init__(self, base: ParamMap, style: str = "trig", amp: float = 0.1,
                 rng: Optional[np.random.Generator] = None):
        super().__init__(base.arity, base.dim)
        if style not in ("trig", "poly"):
            raise ValueError(f"unknown warp style {style!r}")
        self.base = base
        self.style = style
        self.amp = float(amp)
        rng = rng if rng is not None else np.random.default_rng(0)
        d = base.dim
        if style == "trig":
            self.k = rng.uniform(-2.0, 2.0, size=(d, d))
            self.phi = rng.uniform(0.0, 2 * math.pi, size=(d,))
        else:
            self.lin = rng.uniform(-1.0, 1.0, size=(d, d))
            self.quad = rng.uniform(-1.0, 1.0, size=(d, d, d))

    def _w(self, x):
        if self.style == "trig":
            return np.sin(np.einsum("ij,...j->...i", self.k, x) + self.phi)
        return np.einsum("ij,...j->...i", self.lin, x) + np.einsum("ijl,...j,...l->...i", self.quad, x, x)

    def _dw(self, x):
        if self.style == "trig":
            c = np.cos(np.einsum("ij,...j->...i", self.k, x) + self.phi)
            return c[..., :, None] * self.k
        q = self.quad + np.swapaxes(self.quad, 1, 2)
        return self.lin + np.einsum("ijl,...l->...ij", q, x)

    def _evaluate(self, u):
        x = self.base.evaluate(u)
        return x + self.amp * self._w(x)

    def _jac(self, u):
        jb = self.base.analytic_jac(u)
        if jb is None:
            return None
        x = self.base.evaluate(u)
        m = np.eye(self.dim) + self.amp * self._dw(x)
        return m @ jb


def reparam(u: np.ndarray, eps: float) -> np.ndarray:
    """phi(u) = u - eps sin(2 pi u) / (2 pi); monotone for |eps| < 1, fixes 0 and 1."""
    return u - eps * np.sin(2 * math.pi * u) / (2 * math.pi)


def reparam_prime(u: np.ndarray, eps: float) -> np.ndarray:
    return 1.0 - eps * np.cos(2 * math.pi * u)


class Reparam(ParamMap):
    """Sigma(phi_1(u_1), ..., phi_k(u_k)) with per-axis monotone warps."""

    kind = "reparam"

    def __init__(self, base: ParamMap, eps: Sequence[float]):
        super().__init__(base.arity, base.dim)
        eps = [float(e) for e in eps]
        if len(eps) != base.arity:
            raise ValueError("one reparametrization strength per axis")
        if any(abs(e) >= 1.0 for e in eps):
            raise ValueError("reparametrization strength must satisfy |eps| < 1")
        self.base = base
        self.eps = np.asarray(eps)

    def _phi(self, u):
        return reparam(u, self.eps)

    def _evaluate(self, u):
        return self.base.evaluate(self._phi(u))

    def _jac(self, u):
        jb = self.base.analytic_jac(self._phi(u))
        if jb is None:
            return None
        return jb * reparam_prime(u, self.eps)[..., None, :]


class Extrude(ParamMap):
    """
    Degenerate wrapper: a map of higher arity that ignores the parameter axes
    in `ignored` (e.g. a cube constant in r, or a square constant in s).
    """

    kind = "extrude"

    def __init__(self, base: ParamMap, arity: int, ignored: Sequence[int]):
        super().__init__(arity, base.dim)
        self.base = base
        self.ignored = tuple(sorted(int(i) for i in ignored))
        self.kept = tuple(i for i in range(arity) if i not in self.ignored)
        if len(self.kept) != base.arity:
            raise ValueError("kept axes must match the base arity")

    def _evaluate(self, u):
        return self.base.evaluate(u[..., list(self.kept)])

    def _jac(self, u):
        jb = self.base.analytic_jac(u[..., list(self.kept)])
        if jb is None:
            return None
        out = np.zeros(u.shape[:-1] + (self.dim, self.arity))
        out[..., :, list(self.kept)] = jb
        return out


class Sub(ParamMap):
    """Restriction to an axis-aligned box: u_j -> lo_j + (hi_j - lo_j) u_j."""

    kind = "sub"

    def __init__(self, base: ParamMap, lo: Sequence[float], hi: Sequence[float]):
        super().__init__(base.arity, base.dim)
        self.base = base
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def _inner(self, u):
        return self.lo + (self.hi - self.lo) * u

    def _evaluate(self, u):
        return self.base.evaluate(self._inner(u))

    def _jac(self, u):
        jb = self.base.analytic_jac(self._inner(u))
        if jb is None:
            return None
        return jb * (self.hi - self.lo)


class Concat(ParamMap):
    """
    Two maps glued along one axis at the midpoint:
    u_axis in [0, 1/2] runs through `first`, [1/2, 1] through `second`.
    """

    kind = "concat"

    def __init__(self, first: ParamMap, second: ParamMap, axis: int):
        super().__init__(first.arity, first.dim)
        if second.arity != first.arity or second.dim != first.dim:
            raise ValueError("concatenated maps must share arity and dimension")
        self.first = first
        self.second = second
        self.axis = int(axis)

    def _split(self, u):
        a = u[..., self.axis]
        lo = a <= 0.5
        u1 = u.copy()
        u2 = u.copy()
        u1[..., self.axis] = np.clip(2 * a, 0.0, 1.0)
        u2[..., self.axis] = np.clip(2 * a - 1.0, 0.0, 1.0)
        return lo, u1, u2

    def _evaluate(self, u):
        lo, u1, u2 = self._split(u)
        return np.where(lo[..., None], self.first.evaluate(u1), self.second.evaluate(u2))

    def _jac(self, u):
        lo, u1, u2 = self._split(u)
        j1 = self.first.analytic_jac(u1)
        j2 = self.second.analytic_jac(u2)
        if j1 is None or j2 is None:
            return None
        scale = np.ones(self.arity)
        scale[self.axis] = 2.0
        return np.where(lo[..., None, None], j1 * scale, j2 * scale)


class FunctionMap(ParamMap):
    """Wrap a plain function; derivatives come from finite differences."""

    kind = "function"

    def __init__(self, fn, arity: int, dim: int):
        super().__init__(arity, dim, derivative_mode="fd")
        self.fn = fn

    def _evaluate(self, u):
        return np.asarray(self.fn(u), dtype=float)


def path_of(square: ParamMap, fixed_axis: int, value: float) -> ParamMap:
    """Edge or interior line of a square as an arity-1 map."""
    lo = [0.0, 0.0]
    hi = [1.0, 1.0]
    lo[fixed_axis] = hi[fixed_axis] = float(value)
    free = 1 - fixed_axis
    sub = Sub(square, lo, hi)
    m = np.zeros((2, 1))
    m[free, 0] = 1.0
    off = np.zeros(2)
    return Compose(sub, Affine(m, off))


class Compose(ParamMap):
    """outer(inner(u)) where inner is an affine parameter change [0,1]^k -> [0,1]^m."""

    kind = "compose"

    def __init__(self, outer: ParamMap, inner: Affine):
        super().__init__(inner.arity, outer.dim)
        self.outer = outer
        self.inner = inner

    def _evaluate(self, u):
        return self.outer.evaluate(self.inner.evaluate(u))

    def _jac(self, u):
        jo = self.outer.analytic_jac(self.inner.evaluate(u))
        if jo is None:
            return None
        return jo @ self.inner.matrix
