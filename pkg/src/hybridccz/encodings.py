"""Photonic logical qubits as photon-number-parity eigenstates.

A logical pair is (|phi_e>, |phi_o>): one even-parity and one odd-parity
normalized state of a single cavity mode. Fock pairs (|2m>, |2n+1>) and
even/odd cat pairs N(|alpha> +/- |-alpha>) are the built-in instantiations;
arbitrary coefficient lists are accepted and parity-validated.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .operators import Operator
from .spaces import InvalidDimensionError

PARITY_NORM_TOL = 1e-12
PARITY_EIG_TOL = 1e-10
CAT_TAIL_TOL = 1e-8


class ParityError(ValueError):
    """State is not a parity eigenstate (or has the wrong support)."""


def parity_operator(dim: int) -> Operator:
    """Diagonal operator with entries (-1)^n on the Fock basis."""
    if dim < 1:
        raise InvalidDimensionError("parity_operator needs dim >= 1")
    return Operator((dim,), sp.diags((-1.0) ** np.arange(dim), format="csr"))


@dataclass(frozen=True)
class ParityState:
    """Single-mode state with definite photon-number parity (+1 or -1)."""

    coefficients: np.ndarray
    parity: int

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128).copy()
        if self.parity not in (+1, -1):
            raise ParityError("parity must be +1 or -1")
        wrong = coeffs[(1 if self.parity == +1 else 0)::2]
        if wrong.size and np.any(wrong != 0):
            raise ParityError("coefficients on the opposite-parity Fock states must be exactly zero")
        norm = np.linalg.norm(coeffs)
        if abs(norm - 1.0) > PARITY_NORM_TOL:
            raise ParityError(f"norm {norm!r} deviates from 1 beyond {PARITY_NORM_TOL}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self) -> int:
        return self.coefficients.size


def _clean_to_parity(coeffs: np.ndarray, parity: int) -> ParityState:
    """Zero out the opposite-parity entries exactly and renormalize."""
    out = np.array(coeffs, dtype=np.complex128)
    out[(1 if parity == +1 else 0)::2] = 0.0
    out /= np.linalg.norm(out)
    return ParityState(out, parity)


def fock_pair(m: int, n: int, dim: int):
    """(|2m>, |2n+1>) as a logical pair on a dim-truncated mode."""
    if m < 0 or n < 0:
        raise InvalidDimensionError("Fock indices must be non-negative")
    if 2 * m >= dim or 2 * n + 1 >= dim:
        raise InvalidDimensionError(
            f"Fock pair (|{2*m}>, |{2*n+1}>) does not fit truncation dim={dim}")
    even = np.zeros(dim, dtype=np.complex128)
    even[2 * m] = 1.0
    odd = np.zeros(dim, dtype=np.complex128)
    odd[2 * n + 1] = 1.0
    return ParityState(even, +1), ParityState(odd, -1)


@dataclass(frozen=True)
class CatSpec:
    """Coherent amplitude, truncation and tail tolerance for a cat-state pair.

    The stock 6-level truncation at alpha = 0.5 leaves a 2.7e-7 coherent
    tail, so callers that standardize on that truncation must pass a
    tail_tol of 1e-6; the strict default rejects it.
    """

    alpha: float
    dim: int
    tail_tol: float = CAT_TAIL_TOL

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("cat amplitude alpha must be > 0")
        if self.dim < 2:
            raise InvalidDimensionError("cat states need dim >= 2")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")

    def normalization(self, parity: int) -> float:
        """N_even = [2(1+e^{-2 a^2})]^{-1/2}, N_odd = [2(1-e^{-2 a^2})]^{-1/2}."""
        sign = 1.0 if parity == +1 else -1.0
        return 1.0 / math.sqrt(2.0 * (1.0 + sign * math.exp(-2.0 * self.alpha ** 2)))


def coherent_coefficients(alpha: float, dim: int) -> np.ndarray:
    """Fock expansion e^{-a^2/2} a^n / sqrt(n!) of |alpha>, truncated."""
    n = np.arange(dim)
    log_terms = -0.5 * alpha ** 2 + n * math.log(alpha) - 0.5 * np.array(
        [math.lgamma(k + 1) for k in range(dim)])
    return np.exp(log_terms).astype(np.complex128)


def required_cat_dim(alpha: float, tail_tol: float = CAT_TAIL_TOL, max_dim: int = 512) -> int:
    """Smallest truncation whose coherent-state tail mass is below tail_tol."""
    coeffs = coherent_coefficients(alpha, max_dim)
    mass = np.cumsum(np.abs(coeffs) ** 2)
    ok = np.nonzero(1.0 - mass < tail_tol)[0]
    if ok.size == 0:
        raise InvalidDimensionError(f"no truncation below {max_dim} meets tail tolerance {tail_tol}")
    return int(ok[0] + 1)


def cat_pair(spec: CatSpec):
    """(even cat, odd cat) = N(|a> + |-a>), N(|a> - |-a>) on the truncated mode."""
    need = required_cat_dim(spec.alpha, spec.tail_tol)
    if spec.dim < need:
        raise InvalidDimensionError(
            f"truncation dim={spec.dim} too small for alpha={spec.alpha}: "
            f"tail mass exceeds {spec.tail_tol}, need dim >= {need}")
    coeffs = coherent_coefficients(spec.alpha, spec.dim)
    even = _clean_to_parity(coeffs, +1)
    odd = _clean_to_parity(coeffs, -1)
    return even, odd


def validate_parity(coefficients) -> int:
    """Return the parity eigenvalue of a normalized single-mode state.

    Raises ParityError unless ||P psi -/+ psi|| < 1e-10 for one sign.
    """
    psi = np.asarray(coefficients, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ParityError("validate_parity expects a normalized state")
    signs = (-1.0) ** np.arange(psi.size)
    ppsi = signs * psi
    if np.linalg.norm(ppsi - psi) < PARITY_EIG_TOL:
        return +1
    if np.linalg.norm(ppsi + psi) < PARITY_EIG_TOL:
        return -1
    raise ParityError("state is not a photon-number-parity eigenstate")
