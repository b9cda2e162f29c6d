"""Single-photon polarization-OAM Bell-state measurement.

The photon's two qubits are ordered ``(pol, oam)`` with index ``2*pol + oam``
(``H=0, V=1``; ``+l0=0, -l0=1``). The analyser has four stages:

1. A PBS Mach-Zehnder whose V arm carries one extra mirror, so the V
   component has its OAM negated relative to H, plus an arm phase; then a QWP
   at 45 degrees. This turns the four Bell states into product states.
2. A PBS splits H (transmitted) from V (reflected, OAM negated).
3. One OAM sorter per arm.
4. SPPs flatten each sorter output to ``l = 0`` for single-mode fibre coupling.

Both a closed-form 4x4 model and an element-by-element simulation on
:class:`~oamtransfer.fock.PhotonicState` are provided; they are checked
against each other in the test-suite.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import elements as el
from .fock import ModeLabel, PhotonicState, Polarization
from .qubits import SQRT1_2

# Phase of the V arm relative to the H arm. Fixed by requiring that
# omega+ leaves stage 1 as |H,+l0>.
MZ_PHASE = -math.pi / 2


class BellState(enum.Enum):
    OMEGA_PLUS = "omega+"
    OMEGA_MINUS = "omega-"
    XI_PLUS = "xi+"
    XI_MINUS = "xi-"

    @classmethod
    def parse(cls, value) -> BellState:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("ω", "omega").replace("ξ", "xi")
        for member in cls:
            if key in (member.value, member.name.lower().replace("_", ""),
                       member.value.replace("+", "plus").replace("-", "minus")):
                return member
        raise ValueError(f"unknown Bell state {value!r}")


BELL_ORDER = tuple(BellState)
PORTS = ("A", "B", "C", "D")
DEFAULT_PORTS: Mapping[BellState, str] = dict(zip(BELL_ORDER, PORTS))

_BELL_VECTORS = {
    BellState.OMEGA_PLUS: np.array([1, 0, 0, 1]) * SQRT1_2,
    BellState.OMEGA_MINUS: np.array([1, 0, 0, -1]) * SQRT1_2,
    BellState.XI_PLUS: np.array([0, 1, 1, 0]) * SQRT1_2,
    BellState.XI_MINUS: np.array([0, 1, -1, 0]) * SQRT1_2,
}

# Physical exits after stage 4, labelled by (arm, sorter output); the index
# is 2*arm + oam with arm 0 = transmitted (H) and 1 = reflected (V).
EXIT_PATHS = ("h+", "h-", "v+", "v-")


@dataclass(frozen=True)
class BellOutcome:
    state: BellState
    port: str


def bell_state(which) -> np.ndarray:
    return _BELL_VECTORS[BellState.parse(which)].astype(complex)


def bell_matrix() -> np.ndarray:
    """Rows are the Bell states, in :data:`BELL_ORDER`."""
    return np.array([bell_state(b) for b in BELL_ORDER])


def _pol_conditional_flip(phase: float) -> np.ndarray:
    """H components untouched; V components get OAM negated and ``exp(i phase)``."""
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = u[1, 1] = 1
    u[3, 2] = u[2, 3] = np.exp(1j * phase)
    return u


def stage1_matrix() -> np.ndarray:
    qwp = np.kron(el.jones("QWP", 45.0), np.eye(2))
    return qwp @ _pol_conditional_flip(MZ_PHASE)


def analyser_matrix() -> np.ndarray:
    """Closed-form map from the photon's ``(pol, oam)`` amplitudes to the
    four exit amplitudes :data:`EXIT_PATHS` (stages 1-4)."""
    split = _pol_conditional_flip(0.0)  # stage 2: reflected V has OAM negated
    # stages 3-4 only relabel (arm, oam) -> exit with unit amplitude
    return split @ stage1_matrix()


def disentangle_stage(vec: np.ndarray) -> np.ndarray:
    """Stage 1 on a single-photon ``(pol, oam)`` vector.

    Maps omega+, omega-, xi+, xi- to |H,+l0>, |V,+l0>, |H,-l0>, |V,-l0> (up
    to phase); the PBS of stage 2 then negates the OAM of the two V outputs.
    """
    return stage1_matrix() @ np.asarray(vec, dtype=complex)


def _bell_at_exit() -> dict[int, BellState]:
    amp = analyser_matrix() @ bell_matrix().T  # column k = image of Bell state k
    mapping = {}
    for k, b in enumerate(BELL_ORDER):
        exit_idx = int(np.argmax(np.abs(amp[:, k])))
        mapping[exit_idx] = b
    return mapping


BELL_AT_EXIT = _bell_at_exit()


def _check_ports(ports: Mapping[BellState, str]) -> Mapping[BellState, str]:
    ports = {BellState.parse(k): v for k, v in ports.items()}
    if set(ports) != set(BellState) or len(set(ports.values())) != 4:
        raise ValueError("port assignment must be a bijection from the four Bell states")
    return ports


def _as_density(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape == (4,):
        return np.outer(state, state.conj())
    if state.shape == (4, 4):
        return state
    raise ValueError("expected a 4-vector or a 4x4 density matrix")


def sort(state, ports: Mapping[BellState, str] = DEFAULT_PORTS) -> dict[str, float]:
    """Exact port probabilities for a pure ``(pol, oam)`` vector or a 4x4 density matrix."""
    ports = _check_ports(ports)
    rho = _as_density(state)
    u = analyser_matrix()
    exit_probs = np.real(np.diag(u @ rho @ u.conj().T))
    out = {ports[b]: 0.0 for b in BELL_ORDER}
    for idx, p in enumerate(exit_probs):
        out[ports[BELL_AT_EXIT[idx]]] += float(p)
    return dict(sorted(out.items()))


def port_vector(state, ports: Mapping[BellState, str] = DEFAULT_PORTS) -> np.ndarray:
    """Port probabilities ordered A-D."""
    probs = sort(state, ports)
    return np.array([probs[p] for p in PORTS])


def port_to_bell(ports: Mapping[BellState, str] = DEFAULT_PORTS) -> dict[str, BellState]:
    return {v: k for k, v in _check_ports(ports).items()}


def measure(state, rng_seed, ports: Mapping[BellState, str] = DEFAULT_PORTS) -> BellOutcome:
    """Draw one outcome from :func:`sort` with a seeded generator."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    probs = port_vector(state, ports)
    port = PORTS[int(rng.choice(4, p=probs / probs.sum()))]
    return BellOutcome(port_to_bell(ports)[port], port)


def verification_matrix(ports: Mapping[BellState, str] = DEFAULT_PORTS) -> np.ndarray:
    """Row k: port probabilities (A-D) for Bell input k; the identity when the
    default assignment is used."""
    return np.array([port_vector(bell_state(b), ports) for b in BELL_ORDER])


# -- element-level network -----------------------------------------------------

def build_network(ell0: int = 1) -> el.Network:
    net = el.Network()
    net.add("PBS", ("in", "in_dark"), ("mz_h", "mz_v"))
    net.add("Mirror", ("mz_v",))
    net.add("Phase", ("mz_v",), param=MZ_PHASE)
    net.add("PBS", ("mz_h", "mz_v"), ("mz_out", "mz_dark"))
    net.add("QWP", ("mz_out",), param=45.0)
    net.add("PBS", ("mz_out", "split_dark"), ("arm_h", "arm_v"))
    net.add("OamSorter", ("arm_h",), ("h+", "h-"), param=ell0)
    net.add("OamSorter", ("arm_v",), ("v+", "v-"), param=ell0)
    for path in ("h+", "v+"):
        net.add("SPP", (path,), param=-ell0)
    for path in ("h-", "v-"):
        net.add("SPP", (path,), param=ell0)
    return net


def photon_from_vector(vec: np.ndarray, path: str = "in", ell0: int = 1) -> PhotonicState:
    vec = np.asarray(vec, dtype=complex)
    terms = []
    for idx, amp in enumerate(vec):
        pol, oam = divmod(idx, 2)
        terms.append(((ModeLabel(path, Polarization(pol), ell0 if oam == 0 else -ell0),), amp))
    return PhotonicState(terms)


def network_amplitudes(vec: np.ndarray, ell0: int = 1) -> np.ndarray:
    """Run the element-level analyser and read the Gaussian-mode amplitude at
    each exit in :data:`EXIT_PATHS` order."""
    out = build_network(ell0).run(photon_from_vector(vec, "in", ell0))
    amps = np.zeros(4, dtype=complex)
    for basis, amp in out.items():
        (mode,) = basis.modes
        if mode.oam != 0:
            raise AssertionError(f"exit {mode!r} is not flattened to l=0")
        amps[EXIT_PATHS.index(mode.path)] += amp
    return amps


def network_sort(vec: np.ndarray, ports: Mapping[BellState, str] = DEFAULT_PORTS, ell0: int = 1) -> dict[str, float]:
    """Port probabilities from the element-level simulation."""
    ports = _check_ports(ports)
    amps = network_amplitudes(vec, ell0)
    out = {ports[BELL_AT_EXIT[idx]]: float(abs(a) ** 2) for idx, a in enumerate(amps)}
    return dict(sorted(out.items()))
