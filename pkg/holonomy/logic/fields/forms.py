# holonomy/logic/fields/forms.py
from __future__ import annotations

import itertools
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from holonomy.errors import EvalError
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.tuning import TUNING

Combo = Tuple[int, ...]


def combos(dim: int, degree: int) -> List[Combo]:
    """Independent components of a degree-p form on R^d, in lexicographic order."""
    return list(itertools.combinations(range(dim), degree))


def combo_index(dim: int, degree: int) -> dict:
    return {c: i for i, c in enumerate(combos(dim, degree))}


def sort_sign(idx: Sequence[int]) -> Tuple[int, Combo]:
    """(sign of the sorting permutation, sorted tuple); sign 0 on repeated indices."""
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    arr = idx[:]
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


class Form:
    """
    Algebra-valued p-form on R^d, stored by its independent components.

    components(x):        (..., C(d,p), n, n)
    derivative(x):        (..., d, C(d,p), n, n), d/dx_l of every component
    second_derivative(x): (..., d, d, C(d,p), n, n) when available

    Antisymmetry is exact: only sorted index tuples exist, other orderings are
    read through `component` with the permutation sign.
    """

    has_second = False
    kind = "form"

    def __init__(self, degree: int, dim: int, group: MatrixGroup, h_fd: float = TUNING.h_fd):
        self.degree = int(degree)
        self.dim = int(dim)
        self.group = group
        self.h_fd = float(h_fd)

    @cached_property
    def combos(self) -> List[Combo]:
        return combos(self.dim, self.degree)

    @cached_property
    def index(self) -> dict:
        return {c: i for i, c in enumerate(self.combos)}

    @property
    def n(self) -> int:
        return self.group.size

    def _shape(self, x: np.ndarray, *extra: int) -> tuple:
        return x.shape[:-1] + tuple(extra) + (len(self.combos), self.n, self.n)

    # --- subclasses ------------------------------------------------------
    def _components(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, x: np.ndarray) -> np.ndarray:
        return self.fd_derivative(x)

    def _second_derivative(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # --- public ----------------------------------------------------------
    def components(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._checked("components", self._components, x)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._checked("derivative", self._derivative, x)

    def second_derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._checked("second derivative", self._second_derivative, x)

    def __call__(self, x) -> np.ndarray:
        return self.components(x)

    def _checked(self, what: str, fn: Callable, x: np.ndarray) -> np.ndarray:
        try:
            out = fn(x)
        except EvalError:
            raise
        except NotImplementedError:
            raise
        except Exception as e:
            raise EvalError(f"{self.kind} {what}", f"{type(e).__name__}: {e}")
        if not np.all(np.isfinite(out)):
            first = np.argwhere(~np.isfinite(out))[0]
            point = x[tuple(first[:x.ndim - 1])].tolist()
            raise EvalError(f"{self.kind} {what}", "non-finite value", point=point)
        return out

    def fd_derivative(self, x: np.ndarray) -> np.ndarray:
        """Central differences of the components, order 2 in h_fd."""
        h = self.h_fd
        out = []
        for l in range(self.dim):
            e = np.zeros(self.dim)
            e[l] = h
            out.append((self._components(x + e) - self._components(x - e)) / (2 * h))
        return np.stack(out, axis=-4)

    def component(self, values: np.ndarray, idx: Sequence[int]) -> np.ndarray:
        """omega_{idx} from stored components, any index order."""
        sign, key = sort_sign(idx)
        if sign == 0:
            return np.zeros(values.shape[:-3] + (self.n, self.n), dtype=complex)
        return sign * values[..., self.index[key], :, :]


# =========================================================
# Catalog forms
# =========================================================

class ZeroForm(Form):
    kind = "zero"
    has_second = True

    def _components(self, x):
        return np.zeros(self._shape(x), dtype=complex)

    def _derivative(self, x):
        return np.zeros(self._shape(x, self.dim), dtype=complex)

    def _second_derivative(self, x):
        return np.zeros(self._shape(x, self.dim, self.dim), dtype=complex)


class PolynomialForm(Form):
    """
    Every component is a polynomial of degree <= 2 with coefficients in the
    span of `basis` (defaults to the full algebra basis):

        c(x) = c0 + L x + x^T Q x
    """

    kind = "polynomial"
    has_second = True

    def __init__(self, degree: int, dim: int, group: MatrixGroup, const, lin, quad,
                 basis: Optional[np.ndarray] = None, h_fd: float = TUNING.h_fd):
        super().__init__(degree, dim, group, h_fd)
        self.basis = group.basis if basis is None else np.asarray(basis, dtype=complex)
        k = self.basis.shape[0]
        c = len(self.combos)
        self.const = np.broadcast_to(np.asarray(const, dtype=float), (c, k)).copy()
        self.lin = np.broadcast_to(np.asarray(lin, dtype=float), (c, dim, k)).copy()
        self.quad = np.broadcast_to(np.asarray(quad, dtype=float), (c, dim, dim, k)).copy()

    @classmethod
    def seeded(cls, degree: int, dim: int, group: MatrixGroup, rng: np.random.Generator,
               amplitude: float = 0.3, order: int = 2, basis: Optional[np.ndarray] = None,
               h_fd: float = TUNING.h_fd) -> "PolynomialForm":
        b = group.basis if basis is None else np.asarray(basis, dtype=complex)
        k = b.shape[0]
        c = len(combos(dim, degree))
        a = float(amplitude)
        const = rng.uniform(-a, a, size=(c, k))
        lin = rng.uniform(-a, a, size=(c, dim, k)) if order >= 1 else np.zeros((c, dim, k))
        quad = rng.uniform(-a, a, size=(c, dim, dim, k)) if order >= 2 else np.zeros((c, dim, dim, k))
        return cls(degree, dim, group, const, lin, quad, basis=b, h_fd=h_fd)

    @classmethod
    def constant(cls, degree: int, dim: int, group: MatrixGroup, coeffs,
                 basis: Optional[np.ndarray] = None) -> "PolynomialForm":
        b = group.basis if basis is None else np.asarray(basis, dtype=complex)
        c = len(combos(dim, degree))
        k = b.shape[0]
        return cls(degree, dim, group, coeffs, np.zeros((c, dim, k)), np.zeros((c, dim, dim, k)), basis=b)

    def _to_matrix(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("...k,kab->...ab", coeffs, self.basis)

    def _components(self, x):
        c = (self.const
             + np.einsum("cdk,...d->...ck", self.lin, x)
             + np.einsum("cdek,...d,...e->...ck", self.quad, x, x))
        return self._to_matrix(c)

    def _derivative(self, x):
        sym = self.quad + np.swapaxes(self.quad, 1, 2)  # (c, l, e, k)
        c = np.einsum("cdk->dck", self.lin) + np.einsum("clek,...e->...lck", sym, x)
        return self._to_matrix(np.broadcast_to(c, x.shape[:-1] + c.shape[-3:]))

    def _second_derivative(self, x):
        sym = self.quad + np.swapaxes(self.quad, 1, 2)  # (c, l, m, k)
        c = np.einsum("clmk->lmck", sym)
        return self._to_matrix(np.broadcast_to(c, x.shape[:-1] + c.shape))


class MappedForm(Form):
    """A linear map applied to every component (sections, projections, embeddings)."""

    kind = "mapped"

    def __init__(self, inner: Form, fn: Callable[[np.ndarray], np.ndarray], group: MatrixGroup):
        super().__init__(inner.degree, inner.dim, group, inner.h_fd)
        self.inner = inner
        self.fn = fn
        self.has_second = inner.has_second

    def _components(self, x):
        return self.fn(self.inner._components(x))

    def _derivative(self, x):
        return self.fn(self.inner._derivative(x))

    def _second_derivative(self, x):
        return self.fn(self.inner._second_derivative(x))


class SumForm(Form):
    kind = "sum"

    def __init__(self, *parts: Form):
        first = parts[0]
        super().__init__(first.degree, first.dim, first.group, first.h_fd)
        for p in parts[1:]:
            if (p.degree, p.dim, p.group.size) != (first.degree, first.dim, first.group.size):
                raise ValueError("summed forms must share degree, dimension and algebra")
        self.parts = parts
        self.has_second = all(p.has_second for p in parts)

    def _components(self, x):
        return sum(p._components(x) for p in self.parts)

    def _derivative(self, x):
        return sum(p._derivative(x) for p in self.parts)

    def _second_derivative(self, x):
        return sum(p._second_derivative(x) for p in self.parts)


# =========================================================
# Curvatures
# =========================================================

class CurvatureForm(Form):
    """F_ij = d_i A_j - d_j A_i + [A_i, A_j]"""

    kind = "curvature"

    def __init__(self, A: Form):
        if A.degree != 1:
            raise ValueError("a connection is a 1-form")
        super().__init__(2, A.dim, A.group, A.h_fd)
        self.A = A
        self.has_second = False

    def _components(self, x):
        a = self.A._components(x)  # (..., d, n, n)
        da = self.A._derivative(x)  # (..., d(l), d(comp), n, n)
        out = [da[..., i, j, :, :] - da[..., j, i, :, :] + lg.commutator(a[..., i, :, :], a[..., j, :, :])
               for (i, j) in self.combos]
        if not out:
            return np.zeros(self._shape(x), dtype=complex)
        return np.stack(out, axis=-3)

    def _derivative(self, x):
        if not self.A.has_second:
            return self.fd_derivative(x)
        a = self.A._components(x)
        da = self.A._derivative(x)
        d2a = self.A._second_derivative(x)  # (..., l, m, comp, n, n)
        rows = []
        for l in range(self.dim):
            comps = []
            for (i, j) in self.combos:
                v = (d2a[..., l, i, j, :, :] - d2a[..., l, j, i, :, :]
                     + lg.commutator(da[..., l, i, :, :], a[..., j, :, :])
                     + lg.commutator(a[..., i, :, :], da[..., l, j, :, :]))
                comps.append(v)
            rows.append(np.stack(comps, axis=-3))
        return np.stack(rows, axis=-4)


class TwoCurvatureForm(Form):
    """
    F_B = dB + A wedge_alpha B:
        (F_B)_ijk = d_i B_jk - d_j B_ik + d_k B_ij
                    + alpha(A_i, B_jk) - alpha(A_j, B_ik) + alpha(A_k, B_ij)
    """

    kind = "two-curvature"

    def __init__(self, A: Form, B: Form, dalpha: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        if B.degree != 2 or A.degree != 1:
            raise ValueError("expected a connection and a 2-form")
        super().__init__(3, B.dim, B.group, B.h_fd)
        self.A = A
        self.B = B
        self.dalpha = dalpha
        self.has_second = False

    def _triples(self, a, b, db):
        out = []
        for (i, j, k) in self.combos:
            bi = self.B.index
            v = (db[..., i, bi[(j, k)], :, :] - db[..., j, bi[(i, k)], :, :] + db[..., k, bi[(i, j)], :, :]
                 + self.dalpha(a[..., i, :, :], b[..., bi[(j, k)], :, :])
                 - self.dalpha(a[..., j, :, :], b[..., bi[(i, k)], :, :])
                 + self.dalpha(a[..., k, :, :], b[..., bi[(i, j)], :, :]))
            out.append(v)
        return out

    def _components(self, x):
        out = self._triples(self.A._components(x), self.B._components(x), self.B._derivative(x))
        if not out:
            return np.zeros(self._shape(x), dtype=complex)
        return np.stack(out, axis=-3)

    def _derivative(self, x):
        if not self.B.has_second:
            return self.fd_derivative(x)
        a = self.A._components(x)
        da = self.A._derivative(x)
        b = self.B._components(x)
        db = self.B._derivative(x)
        d2b = self.B._second_derivative(x)
        bi = self.B.index
        rows = []
        for l in range(self.dim):
            comps = []
            for (i, j, k) in self.combos:
                v = (d2b[..., l, i, bi[(j, k)], :, :] - d2b[..., l, j, bi[(i, k)], :, :]
                     + d2b[..., l, k, bi[(i, j)], :, :])
                for (p, pair, sgn) in ((i, (j, k), 1.0), (j, (i, k), -1.0), (k, (i, j), 1.0)):
                    v = v + sgn * (self.dalpha(da[..., l, p, :, :], b[..., bi[pair], :, :])
                                   + self.dalpha(a[..., p, :, :], db[..., l, bi[pair], :, :]))
                comps.append(v)
            if not comps:
                rows.append(np.zeros(self._shape(x), dtype=complex))
            else:
                rows.append(np.stack(comps, axis=-3))
        return np.stack(rows, axis=-4)


class ThreeCurvatureForm(Form):
    """
    dC + A wedge C, the part of the 3-curvature without the lifting term:
        d_i C_jkl - d_j C_ikl + d_k C_ijl - d_l C_ijk
        + A_i . C_jkl - A_j . C_ikl + A_k . C_ijl - A_l . C_ijk
    """

    kind = "three-curvature"

    def __init__(self, A: Form, C: Form, dact_L: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        if C.degree != 3 or A.degree != 1:
            raise ValueError("expected a connection and a 3-form")
        super().__init__(4, C.dim, C.group, C.h_fd)
        self.A = A
        self.C = C
        self.dact_L = dact_L

    def _components(self, x):
        a = self.A._components(x)
        c = self.C._components(x)
        dc = self.C._derivative(x)
        ci = self.C.index
        out = []
        for (i, j, k, l) in self.combos:
            terms = ((i, (j, k, l), 1.0), (j, (i, k, l), -1.0), (k, (i, j, l), 1.0), (l, (i, j, k), -1.0))
            v = 0
            for p, rest, sgn in terms:
                v = v + sgn * (dc[..., p, ci[rest], :, :] + self.dact_L(a[..., p, :, :], c[..., ci[rest], :, :]))
            out.append(v)
        if not out:
            return np.zeros(self._shape(x), dtype=complex)
        return np.stack(out, axis=-3)


class LiftingWedgeForm(Form):
    """{B wedge B}_ijkl = {B_ij, B_kl} - {B_ik, B_jl} + {B_il, B_jk}"""

    kind = "lifting-wedge"

    def __init__(self, B: Form, lift: Callable[[np.ndarray, np.ndarray], np.ndarray], group: MatrixGroup):
        super().__init__(4, B.dim, group, B.h_fd)
        self.B = B
        self.lift = lift

    def _components(self, x):
        b = self.B._components(x)
        bi = self.B.index
        out = []
        for (i, j, k, l) in self.combos:
            v = (self.lift(b[..., bi[(i, j)], :, :], b[..., bi[(k, l)], :, :])
                 - self.lift(b[..., bi[(i, k)], :, :], b[..., bi[(j, l)], :, :])
                 + self.lift(b[..., bi[(i, l)], :, :], b[..., bi[(j, k)], :, :]))
            out.append(v)
        if not out:
            return np.zeros(self._shape(x), dtype=complex)
        return np.stack(out, axis=-3)


class FunctionForm(Form):
    """Components from a plain callable x -> (..., C, n, n); derivatives by finite differences."""

    kind = "function"

    def __init__(self, degree: int, dim: int, group: MatrixGroup, fn: Callable[[np.ndarray], np.ndarray],
                 h_fd: float = TUNING.h_fd):
        super().__init__(degree, dim, group, h_fd)
        self.fn = fn

    def _components(self, x):
        return np.asarray(self.fn(x), dtype=complex)
