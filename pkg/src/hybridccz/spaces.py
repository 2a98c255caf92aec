"""Composite Hilbert space for two truncated cavity modes and a four-level ququart.

Flat-index convention: a basis state |n1, n2, level> lives at index
((n1 * N2) + n2) * 4 + level, with the ququart levels ordered
|g'> = 0, |g> = 1, |e> = 2, |f> = 3.
"""

from dataclasses import dataclass

# Ququart level labels, in flat-index order.
LEVELS = ("g_prime", "g", "e", "f")
LEVEL_INDEX = {name: i for i, name in enumerate(LEVELS)}
# Accept a few common spellings for the ground level.
_LEVEL_ALIASES = {"g'": "g_prime", "gp": "g_prime", "g_prime": "g_prime",
                  "g": "g", "e": "e", "f": "f"}

ATOM_DIM = 4


class SpaceMismatchError(ValueError):
    """Raised when operators or states from different spaces are combined."""


class InvalidDimensionError(ValueError):
    """Raised for non-admissible subsystem dimensions."""


def level_index(level) -> int:
    """Resolve a level label (or an already-numeric index) to 0..3."""
    if isinstance(level, int):
        if not 0 <= level < ATOM_DIM:
            raise InvalidDimensionError(f"level index {level} outside 0..3")
        return level
    try:
        return LEVEL_INDEX[_LEVEL_ALIASES[level]]
    except KeyError:
        raise InvalidDimensionError(f"unknown ququart level {level!r}") from None


@dataclass(frozen=True)
class CompositeSpace:
    """cavity1 (N1 Fock levels) x cavity2 (N2 Fock levels) x ququart (4 levels)."""

    cavity1_dim: int
    cavity2_dim: int
    atom_dim: int = ATOM_DIM

    def __post_init__(self):
        if self.cavity1_dim < 1 or self.cavity2_dim < 1:
            raise InvalidDimensionError("cavity truncations must be >= 1")
        if self.atom_dim != ATOM_DIM:
            raise InvalidDimensionError("the ququart subsystem is fixed at 4 levels")

    @property
    def dim(self) -> int:
        return self.cavity1_dim * self.cavity2_dim * self.atom_dim

    @property
    def dims(self) -> tuple:
        return (self.cavity1_dim, self.cavity2_dim, self.atom_dim)

    def index(self, n1: int, n2: int, level) -> int:
        """Flat index of |n1, n2, level>."""
        lvl = level_index(level)
        if not (0 <= n1 < self.cavity1_dim and 0 <= n2 < self.cavity2_dim):
            raise InvalidDimensionError(
                f"Fock indices ({n1}, {n2}) outside truncation {self.dims[:2]}")
        return ((n1 * self.cavity2_dim) + n2) * self.atom_dim + lvl

    def unindex(self, flat: int) -> tuple:
        """Inverse of index(): flat -> (n1, n2, level)."""
        if not 0 <= flat < self.dim:
            raise InvalidDimensionError(f"flat index {flat} outside space of dim {self.dim}")
        lvl = flat % self.atom_dim
        rest = flat // self.atom_dim
        n2 = rest % self.cavity2_dim
        n1 = rest // self.cavity2_dim
        return n1, n2, lvl

    def subsystem_dim(self, which: str) -> int:
        return {"cavity1": self.cavity1_dim,
                "cavity2": self.cavity2_dim,
                "atom": self.atom_dim}[which]
