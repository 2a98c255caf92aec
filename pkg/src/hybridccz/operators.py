"""Sparse operators on the composite space and their algebra.

Operators are immutable once built: every algebra call returns a new
instance. Hamiltonians stay sparse (CSR); density matrices are kept dense
elsewhere because they fill in under dissipative evolution.
"""

import numpy as np
import scipy.sparse as sp

from .spaces import (ATOM_DIM, CompositeSpace, InvalidDimensionError,
                     SpaceMismatchError, level_index)


class Operator:
    """A complex operator tied to a declared space.

    ``dims`` is the subsystem-dimension tuple: (d,) for a bare single-subsystem
    operator, (N1, N2, 4) for a composite one (then ``space`` is set).
    """

    __slots__ = ("dims", "space", "matrix")

    def __init__(self, dims, matrix, space: CompositeSpace | None = None):
        dims = tuple(int(d) for d in dims)
        total = int(np.prod(dims))
        matrix = sp.csr_matrix(matrix, dtype=np.complex128)
        if matrix.shape != (total, total):
            raise InvalidDimensionError(
                f"matrix shape {matrix.shape} does not match dims {dims}")
        if space is not None and space.dims != dims:
            raise SpaceMismatchError(f"space dims {space.dims} != operator dims {dims}")
        self.dims = dims
        self.space = space
        self.matrix = matrix

    # -- basics --------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def _check(self, other: "Operator"):
        if self.dims != other.dims:
            raise SpaceMismatchError(f"operator dims differ: {self.dims} vs {other.dims}")

    def _like(self, matrix) -> "Operator":
        return Operator(self.dims, matrix, self.space)

    # -- algebra -------------------------------------------------------
    def add(self, other: "Operator") -> "Operator":
        self._check(other)
        return self._like(self.matrix + other.matrix)

    def scale(self, factor: complex) -> "Operator":
        return self._like(self.matrix * factor)

    def multiply(self, other: "Operator") -> "Operator":
        self._check(other)
        return self._like(self.matrix @ other.matrix)

    def dagger(self) -> "Operator":
        return self._like(self.matrix.conjugate().transpose().tocsr())

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        self._check(other)
        return self._like(self.matrix - other.matrix)

    def __mul__(self, factor):
        return self.scale(factor)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self.multiply(other)

    def trace(self) -> complex:
        return complex(self.matrix.diagonal().sum())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        delta = self.matrix - self.matrix.conjugate().transpose()
        return abs(delta).max() <= tol if delta.nnz else True

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def identity(dims, space=None) -> Operator:
    total = int(np.prod(dims))
    return Operator(dims, sp.identity(total, dtype=np.complex128, format="csr"), space)


def annihilation(dim: int) -> Operator:
    """Single-mode annihilation operator: <n-1|a|n> = sqrt(n)."""
    if dim < 2:
        raise InvalidDimensionError("annihilation needs dim >= 2")
    data = np.sqrt(np.arange(1, dim))
    return Operator((dim,), sp.diags(data, offsets=1, format="csr"))


def creation(dim: int) -> Operator:
    return annihilation(dim).dagger()


def number(dim: int) -> Operator:
    return Operator((dim,), sp.diags(np.arange(dim, dtype=float), format="csr"))


def level_transition(from_level, to_level) -> Operator:
    """Atomic dyad |to><from| on the 4-level subsystem."""
    i = level_index(to_level)
    j = level_index(from_level)
    m = sp.csr_matrix(([1.0], ([i], [j])), shape=(ATOM_DIM, ATOM_DIM))
    return Operator((ATOM_DIM,), m)


def level_projector(level) -> Operator:
    i = level_index(level)
    m = sp.csr_matrix(([1.0], ([i], [i])), shape=(ATOM_DIM, ATOM_DIM))
    return Operator((ATOM_DIM,), m)


_SUBSYSTEM_ORDER = ("cavity1", "cavity2", "atom")


def lift(op: Operator, which: str, space: CompositeSpace) -> Operator:
    """Tensor a single-subsystem operator with identities on the other two.

    The Kronecker order matches the flat-index convention
    (cavity1 outermost, atom innermost).
    """
    if which not in _SUBSYSTEM_ORDER:
        raise InvalidDimensionError(f"unknown subsystem {which!r}")
    if len(op.dims) != 1 or op.dim != space.subsystem_dim(which):
        raise SpaceMismatchError(
            f"operator of dim {op.dims} does not fit subsystem {which} "
            f"of space {space.dims}")
    parts = []
    for name, d in zip(_SUBSYSTEM_ORDER, space.dims):
        parts.append(op.matrix if name == which else sp.identity(d, format="csr"))
    m = sp.kron(sp.kron(parts[0], parts[1], format="csr"), parts[2], format="csr")
    return Operator(space.dims, m, space)


def commutator(a: Operator, b: Operator) -> Operator:
    return a.multiply(b) - b.multiply(a)


def outer(ket: np.ndarray) -> np.ndarray:
    """|psi><psi| as a dense matrix."""
    v = np.asarray(ket, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def expectation(op: Operator, state) -> complex:
    """<op> for a state vector or a density matrix (dense ndarray or object
    with a .rho / .amplitudes attribute)."""
    mat = getattr(state, "rho", None)
    if mat is None:
        vec = getattr(state, "amplitudes", state)
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        if vec.ndim == 1 and vec.size == op.dim:
            return complex(np.vdot(vec, op.matrix @ vec))
        mat = np.asarray(state, dtype=np.complex128)
    if mat.shape != (op.dim, op.dim):
        raise SpaceMismatchError("state does not match operator dimension")
    return complex((op.matrix @ mat).diagonal().sum())
