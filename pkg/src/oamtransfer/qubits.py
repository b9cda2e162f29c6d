"""Small-dimension qubit helpers shared by the protocol modules.

Qubit basis ordering is ``(+l0, -l0)`` for OAM and ``(H, V)`` for
polarization; the two are identified index-for-index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT1_2 = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Named single-qubit states. For OAM these are the projection bases of the
# SLM+SMF detector ("plus"/"minus" are the computational states).
POLE_VECTORS: dict[str, np.ndarray] = {
    "plus": np.array([1, 0], dtype=complex),
    "minus": np.array([0, 1], dtype=complex),
    "D": np.array([1, 1], dtype=complex) * SQRT1_2,
    "A": np.array([1, -1], dtype=complex) * SQRT1_2,
    "R": np.array([1, 1j], dtype=complex) * SQRT1_2,
    "L": np.array([1, -1j], dtype=complex) * SQRT1_2,
}
OAM_BASIS_LABELS = tuple(POLE_VECTORS)

# The input alphabet uses 0/1 for H/V.
POLE_ALIASES = {"0": "plus", "1": "minus", "H": "plus", "V": "minus", "+": "plus", "-": "minus"}
SIX_POLE_NAMES = ("0", "1", "D", "A", "R", "L")

MUB_PAIRS = (("plus", "minus"), ("D", "A"), ("R", "L"))


def pole_vector(name: str) -> np.ndarray:
    return POLE_VECTORS[POLE_ALIASES.get(name, name)].copy()


@dataclass(frozen=True)
class InputQubit:
    """Polarization input ``alpha|H> + beta|V>``."""

    alpha: complex
    beta: complex
    name: str = ""

    def __post_init__(self):
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1) > 1e-9:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm2}, expected 1")

    @classmethod
    def pole(cls, name: str) -> InputQubit:
        a, b = pole_vector(name)
        return cls(complex(a), complex(b), name)

    @classmethod
    def from_vector(cls, vec, name: str = "") -> InputQubit:
        vec = np.asarray(vec, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls(complex(vec[0]), complex(vec[1]), name)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def label(self) -> str:
        return self.name or f"({self.alpha:.4g}, {self.beta:.4g})"


SIX_POLES: tuple[InputQubit, ...] = tuple(InputQubit.pole(n) for n in SIX_POLE_NAMES)


def random_pure_state(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    """``(1-p) rho + p tr(rho) I/d``; keeps the trace of ``rho``."""
    d = rho.shape[0]
    return (1 - p) * rho + p * np.trace(rho) * np.eye(d) / d


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    n = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for i in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    d = math.prod(dims[i] for i in keep)
    return t.reshape(d, d)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def is_density_matrix(rho: np.ndarray, atol: float = 1e-9) -> bool:
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=atol):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() >= -atol)


def same_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    """True when two unit vectors differ by a global phase only."""
    return abs(abs(np.vdot(u, v)) - 1) <= atol
