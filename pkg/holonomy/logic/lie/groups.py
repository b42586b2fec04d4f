# holonomy/logic/lie/groups.py
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np
import scipy.linalg

# su(2) basis e_k = -i sigma_k / 2, so [e_1, e_2] = e_3
_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SU2_BASIS = -0.5j * _SIGMA

# so(3) basis (L_k)_ij = -eps_kij, [L_1, L_2] = L_3
_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0
SO3_BASIS = (-_EPS).astype(complex)


@dataclass(frozen=True)
class Block:
    kind: str  # special-unitary | special-orthogonal | unitary | positive-real | trivial
    start: int
    size: int

    @property
    def sl(self) -> slice:
        return slice(self.start, self.start + self.size)


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    """
    Faithful matrix representation of a (product of) classical Lie group(s)
    together with a real basis of its Lie algebra.

    The algebra coordinates of a matrix are obtained with a precomputed
    pseudo-inverse of the flattened (real, imag) basis, so membership of an
    algebra element is a projection residual.
    """

    name: str
    tag: str
    size: int
    basis: np.ndarray  # (k, n, n) complex
    blocks: Tuple[Block, ...]
    _pinv: np.ndarray = field(init=False, repr=False)
    _flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = self.basis.shape[0]
        flat = _realify(self.basis.reshape(k, self.size * self.size)).T  # (2n^2, k)
        object.__setattr__(self, "_flat", flat)
        if k:
            object.__setattr__(self, "_pinv", np.linalg.pinv(flat))
        else:
            object.__setattr__(self, "_pinv", np.zeros((0, flat.shape[0])))

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def with_tag(self, tag: str) -> "MatrixGroup":
        return replace(self, tag=tag)

    def identity(self, shape: Tuple[int, ...] = ()) -> np.ndarray:
        eye = np.eye(self.size, dtype=complex)
        return np.broadcast_to(eye, tuple(shape) + eye.shape).copy()

    # ---------------------------------------------------------
    # algebra coordinates
    # ---------------------------------------------------------
    def coords(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        v = _realify(x.reshape(x.shape[:-2] + (-1,)))
        return np.einsum("kj,...j->...k", self._pinv, v)

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        return np.einsum("...k,kab->...ab", c, self.basis)

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.from_coords(self.coords(x))

    def algebra_residual(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.linalg.norm(x - self.project(x), axis=(-2, -1))

    def constraint_residual(self, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=complex)
        res = np.zeros(g.shape[:-2])
        mask = np.ones((self.size, self.size), dtype=bool)
        for b in self.blocks:
            m = g[..., b.sl, b.sl]
            mask[b.sl, b.sl] = False
            res = res + _block_residual(b.kind, m)
        off = np.where(mask, g, 0.0)
        return res + np.linalg.norm(off, axis=(-2, -1))


def _realify(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real, v.imag], axis=-1)


def _block_residual(kind: str, m: np.ndarray) -> np.ndarray:
    n = m.shape[-1]
    eye = np.eye(n)
    if kind == "trivial":
        return np.linalg.norm(m - eye, axis=(-2, -1))
    if kind == "positive-real":
        return np.abs(m[..., 0, 0].imag) + np.maximum(0.0, -m[..., 0, 0].real)
    unit = np.linalg.norm(m @ np.conj(np.swapaxes(m, -1, -2)) - eye, axis=(-2, -1))
    if kind == "unitary":
        return unit
    det = np.abs(np.linalg.det(m) - 1.0)
    if kind == "special-unitary":
        return unit + det
    if kind == "special-orthogonal":
        return unit + det + np.linalg.norm(m.imag, axis=(-2, -1))
    raise ValueError(f"unknown block kind {kind!r}")


# =========================================================
# Catalog of factor groups
# =========================================================

def su2(tag: str = "SU(2)") -> MatrixGroup:
    return MatrixGroup("SU(2)", tag, 2, SU2_BASIS.copy(), (Block("special-unitary", 0, 2),))


def so3(tag: str = "SO(3)") -> MatrixGroup:
    return MatrixGroup("SO(3)", tag, 3, SO3_BASIS.copy(), (Block("special-orthogonal", 0, 3),))


def u1(tag: str = "U(1)") -> MatrixGroup:
    return MatrixGroup("U(1)", tag, 1, np.array([[[1j]]]), (Block("unitary", 0, 1),))


def reals(tag: str = "R") -> MatrixGroup:
    # (R, +) as positive reals under multiplication
    return MatrixGroup("R", tag, 1, np.array([[[1.0 + 0j]]]), (Block("positive-real", 0, 1),))


def trivial(tag: str = "1") -> MatrixGroup:
    return MatrixGroup("1", tag, 1, np.zeros((0, 1, 1), dtype=complex), (Block("trivial", 0, 1),))


def product(*factors: MatrixGroup, tag: str = "") -> MatrixGroup:
    """Block-diagonal product; basis vectors of each factor embedded in its block."""
    n = sum(f.size for f in factors)
    basis = []
    blocks = []
    offset = 0
    for f in factors:
        for b in f.basis:
            e = np.zeros((n, n), dtype=complex)
            e[offset:offset + f.size, offset:offset + f.size] = b
            basis.append(e)
        blocks += [Block(b.kind, b.start + offset, b.size) for b in f.blocks]
        offset += f.size
    name = "×".join(f.name for f in factors)
    arr = np.array(basis) if basis else np.zeros((0, n, n), dtype=complex)
    return MatrixGroup(name, tag or name, n, arr, tuple(blocks))


def embed_block(x: np.ndarray, size: int, start: int = 0) -> np.ndarray:
    """Place (..., m, m) matrices into the diagonal block of (..., size, size) zeros."""
    x = np.asarray(x, dtype=complex)
    m = x.shape[-1]
    out = np.zeros(x.shape[:-2] + (size, size), dtype=complex)
    out[..., start:start + m, start:start + m] = x
    return out


# =========================================================
# Batched kernels (raw arrays, shape (..., n, n))
# =========================================================

def expm(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] == 1:
        return np.exp(x)
    return scipy.linalg.expm(x)


def inv(g: np.ndarray) -> np.ndarray:
    return np.linalg.inv(g)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def conj(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """g x g^-1"""
    return g @ x @ np.linalg.inv(g)


def distance(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    n = g1.shape[-1]
    return np.linalg.norm(g1 @ np.linalg.inv(g2) - np.eye(n), axis=(-2, -1))


def su2_pairing(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """<X, Y> = -2 tr(XY); e_k are orthonormal."""
    return (-2.0 * np.einsum("...ab,...ba->...", x, y)).real


def su2_coords(x: np.ndarray) -> np.ndarray:
    return np.stack([su2_pairing(SU2_BASIS[k], x) for k in range(3)], axis=-1)


def covering(h: np.ndarray) -> np.ndarray:
    """SU(2) -> SO(3), pi(h)_kj = <e_k, h e_j h^-1>."""
    h = np.asarray(h, dtype=complex)
    hinv = np.conj(np.swapaxes(h, -1, -2))
    rot = np.einsum("...ab,jbc,...cd->...jad", h, SU2_BASIS, hinv)
    out = np.empty(h.shape[:-2] + (3, 3))
    for j in range(3):
        out[..., :, j] = su2_coords(rot[..., j, :, :])
    return out.astype(complex)


def rotate_su2(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Act with an SO(3) matrix on the coefficient vector of x in su(2)."""
    c = su2_coords(x)
    rc = np.einsum("...kj,...j->...k", g.real, c)
    return np.einsum("...k,kab->...ab", rc, SU2_BASIS)


def rotate_su2_group(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Same action on SU(2) elements: h = a I + X, only the vector part X rotates."""
    a = 0.5 * np.trace(h, axis1=-2, axis2=-1).real
    x = 0.5 * (h - np.conj(np.swapaxes(h, -1, -2)))
    return a[..., None, None] * np.eye(2) + rotate_su2(g, x)
