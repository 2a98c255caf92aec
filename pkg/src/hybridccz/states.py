"""State containers: normalized kets and validated density matrices."""

import numpy as np

from .spaces import CompositeSpace, SpaceMismatchError, level_index

NORM_TOL = 1e-12


class StateValidationError(ValueError):
    pass


class StateVector:
    """Unit-norm ket on a composite space."""

    __slots__ = ("space", "amplitudes")

    def __init__(self, space: CompositeSpace, amplitudes, normalize: bool = False):
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel().copy()
        if amps.size != space.dim:
            raise SpaceMismatchError(
                f"amplitude length {amps.size} != space dim {space.dim}")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise StateValidationError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise StateValidationError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        self.space = space
        self.amplitudes = amps

    @classmethod
    def basis(cls, space: CompositeSpace, n1: int, n2: int, level) -> "StateVector":
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[space.index(n1, n2, level)] = 1.0
        return cls(space, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        if self.space.dims != other.space.dims:
            raise SpaceMismatchError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density_matrix(self) -> "DensityMatrix":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix(self.space, rho)


class DensityMatrix:
    """Dense, validated density matrix."""

    __slots__ = ("space", "rho")

    TRACE_TOL = 1e-6
    HERM_TOL = 1e-8
    EIG_FLOOR = -1e-6

    def __init__(self, space: CompositeSpace, rho, validate: bool = True):
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (space.dim, space.dim):
            raise SpaceMismatchError(f"rho shape {rho.shape} != ({space.dim}, {space.dim})")
        self.space = space
        self.rho = rho
        if validate:
            self.validate()

    def validate(self):
        tr = self.rho.trace()
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise StateValidationError(f"trace {tr} deviates from 1 beyond {self.TRACE_TOL}")
        herm = np.abs(self.rho - self.rho.conj().T).max()
        if herm > self.HERM_TOL:
            raise StateValidationError(f"Hermiticity deviation {herm} beyond {self.HERM_TOL}")
        lo = float(np.linalg.eigvalsh(self.rho)[0])
        if lo < self.EIG_FLOOR:
            raise StateValidationError(f"smallest eigenvalue {lo} below {self.EIG_FLOOR}")

    def trace(self) -> complex:
        return complex(self.rho.trace())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])


def _diag_probabilities(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return np.abs(state.amplitudes) ** 2
    if isinstance(state, DensityMatrix):
        return np.real(np.diag(state.rho))
    arr = np.asarray(state)
    if arr.ndim == 1:
        return np.abs(arr) ** 2
    return np.real(np.diag(arr))


def fock_population(state, space: CompositeSpace, which: str, n: int) -> float:
    """Population of Fock level n of the named cavity."""
    probs = _diag_probabilities(state).reshape(space.dims)
    if which == "cavity1":
        return float(probs[n, :, :].sum())
    if which == "cavity2":
        return float(probs[:, n, :].sum())
    raise ValueError(f"not a cavity subsystem: {which!r}")


def level_population(state, space: CompositeSpace, level) -> float:
    """Population of one ququart level."""
    probs = _diag_probabilities(state).reshape(space.dims)
    return float(probs[:, :, level_index(level)].sum())


def top_fock_leakage(state, space: CompositeSpace, levels: int = 2) -> float:
    """Total population in the top ``levels`` Fock states of either cavity.

    Monitors truncation adequacy: if this grows, the cutoff is too low.
    """
    probs = _diag_probabilities(state).reshape(space.dims)
    k1 = min(levels, space.cavity1_dim)
    k2 = min(levels, space.cavity2_dim)
    top1 = probs[space.cavity1_dim - k1:, :, :].sum()
    top2 = probs[:, space.cavity2_dim - k2:, :].sum()
    return float(top1 + top2)
