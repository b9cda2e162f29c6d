"""Polarization-to-OAM teleportation: composition, Bell measurement,
feed-forward, noise and fidelity bookkeeping.

Three-qubit states are ordered ``(pol_c, oam_a, oam_b)``. Bob's qubit uses
``+l0 <-> H`` and ``-l0 <-> V`` for comparison with the input.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bsm
from .bsm import BellState
from .hom import PHI_MINUS, DelayModel, entangled_source
from .qubits import (
    I2,
    MUB_PAIRS,
    SIX_POLES,
    X,
    Z,
    InputQubit,
    partial_trace,
    pole_vector,
)
from .seeding import blocks, stream

F_CLASSICAL = 2.0 / 3.0

CORRECTIONS = {
    BellState.OMEGA_PLUS: Z,
    BellState.OMEGA_MINUS: I2,
    BellState.XI_PLUS: Z @ X,
    BellState.XI_MINUS: X,
}


@dataclass(frozen=True)
class NoiseConfig:
    """Imperfections of the simulated experiment.

    ``depolarizing_p`` mixes the post-selected pair with white noise,
    ``source_delay_mm`` detunes the HOM stage, and ``feedforward_flip_prob``
    is the chance that Bob acts on a wrong (uniformly chosen other) outcome.
    """

    depolarizing_p: float = 0.0
    source_delay_mm: float = 0.0
    feedforward_flip_prob: float = 0.0

    def __post_init__(self):
        for name in ("depolarizing_p", "feedforward_flip_prob"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if not math.isfinite(self.source_delay_mm):
            raise ValueError("source_delay_mm must be finite")


IDEAL = NoiseConfig()


def channel_state(noise: NoiseConfig = IDEAL, delay: DelayModel | None = None, ell0: int = 1) -> np.ndarray:
    return entangled_source(noise.source_delay_mm, delay, noise.depolarizing_p, ell0).rho


def compose_full_state(inp: InputQubit, channel: np.ndarray) -> np.ndarray:
    """Embed ``psi_c`` next to the shared pair: an 8-vector for a pure
    channel (4-vector), otherwise an 8x8 density matrix."""
    channel = np.asarray(channel, dtype=complex)
    if channel.shape == (4,):
        return np.kron(inp.vector, channel)
    if channel.shape != (4, 4):
        raise ValueError("channel must be a 4-vector or a 4x4 density matrix")
    if abs(np.trace(channel) - 1) > 1e-9:
        raise ValueError("channel density matrix must have unit trace")
    psi = inp.vector
    return np.kron(np.outer(psi, psi.conj()), channel)


def bell_branch(inp: InputQubit, outcome) -> np.ndarray:
    """Bob's unnormalized conditional amplitudes for one Bell outcome of the
    ideal pure channel (norm 1/2)."""
    outcome = outcome.state if isinstance(outcome, bsm.BellOutcome) else BellState.parse(outcome)
    full = compose_full_state(inp, PHI_MINUS).reshape(4, 2)
    return bsm.bell_state(outcome).conj() @ full


def correction_unitary(outcome) -> np.ndarray:
    outcome = outcome.state if isinstance(outcome, bsm.BellOutcome) else BellState.parse(outcome)
    return CORRECTIONS[outcome].copy()


def conditional_states(rho_full: np.ndarray) -> dict[BellState, tuple[float, np.ndarray]]:
    """Probability and Bob's normalized state for each analyser exit.

    The exit POVM elements are pulled back through the analyser unitary, so
    the measurement is the physical four-port device rather than an
    idealized Bell projection.
    """
    u = bsm.analyser_matrix()
    out = {}
    for idx in range(4):
        row = u[idx]  # <exit| U
        effect = np.kron(np.outer(row.conj(), row), I2)
        unnorm = partial_trace(effect @ rho_full, (4, 2), (1,))
        prob = float(np.real(np.trace(unnorm)))
        state = unnorm / prob if prob > 0 else np.eye(2) / 2
        out[bsm.BELL_AT_EXIT[idx]] = (prob, state)
    return out


@dataclass
class InputResult:
    name: str
    vector: np.ndarray
    outcome_probs: dict[str, float]
    port_counts: dict[str, int] | None
    rho_out: np.ndarray
    fidelity: float


@dataclass
class TeleportResult:
    inputs: list[InputResult]
    shots: int | None
    noise: NoiseConfig
    mode: str = "apply"
    port_table: list[dict] = field(default_factory=list)

    @property
    def fidelities(self) -> list[float]:
        return [r.fidelity for r in self.inputs]

    @property
    def average_fidelity(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def port_counts(self) -> dict[str, int] | None:
        if self.shots is None:
            return None
        total = {p: 0 for p in bsm.PORTS}
        for r in self.inputs:
            for p, n in r.port_counts.items():
                total[p] += n
        return total


def _correct(state: np.ndarray, k: BellState) -> np.ndarray:
    u = CORRECTIONS[k]
    return u @ state @ u.conj().T


def _port_table(result_inputs: Sequence[InputResult], shots: int | None) -> list[dict]:
    theory = 100.0 / 4
    rows = []
    n_total = None if shots is None else shots * len(result_inputs)
    for port in bsm.PORTS:
        if shots is None:
            observed = 100.0 * float(np.mean([r.outcome_probs[port] for r in result_inputs]))
            stderr = 0.0
        else:
            count = sum(r.port_counts[port] for r in result_inputs)
            frac = count / n_total
            observed = 100.0 * frac
            stderr = 100.0 * math.sqrt(frac * (1 - frac) / n_total)
        rows.append({"port": port, "theory_pct": theory, "observed_pct": observed, "stderr_pct": stderr})
    return rows


def run_teleport(
    inputs: InputQubit | Iterable[InputQubit] = SIX_POLES,
    shots: int | None = None,
    noise: NoiseConfig = IDEAL,
    seed: int = 0,
    delay: DelayModel | None = None,
    ell0: int = 1,
    mode: str = "apply",
    ports=bsm.DEFAULT_PORTS,
) -> TeleportResult:
    """Teleport each input through the simulated set-up.

    ``shots=None`` evaluates the outcome ensemble exactly. Otherwise every
    shot draws a Bell outcome from the analyser and, with probability
    ``noise.feedforward_flip_prob``, a wrong reported outcome; Bob's state is
    the count-weighted mixture of the corrected conditional states.

    ``mode="verify"`` leaves Bob's qubit uncorrected and instead scores each
    branch against the input rotated by the inverse correction; the numbers
    agree with ``mode="apply"``.
    """
    if isinstance(inputs, InputQubit):
        inputs = [inputs]
    inputs = list(inputs)
    if shots is not None and shots < 1:
        raise ValueError("shots must be >= 1 (or None for exact mode)")
    if mode not in ("apply", "verify"):
        raise ValueError(f"unknown mode {mode!r}")
    channel = channel_state(noise, delay, ell0)
    q = noise.feedforward_flip_prob
    b2p = {bsm.BellState.parse(k): v for k, v in ports.items()}
    results = []
    for i, inp in enumerate(inputs):
        cond = conditional_states(compose_full_state(inp, channel))
        probs = np.array([cond[b][0] for b in bsm.BELL_ORDER])
        target = inp.vector
        if shots is None:
            weights = np.zeros((4, 4))
            for a, b in enumerate(bsm.BELL_ORDER):
                weights[a] = q / 3 * probs[a]
                weights[a, a] = (1 - q) * probs[a]
            port_counts = None
        else:
            weights = np.zeros((4, 4))
            pv = probs / probs.sum()
            for blk, size in blocks(shots):
                rng = stream(seed, i, blk)
                actual = rng.choice(4, size=size, p=pv)
                flip = rng.random(size) < q
                shift = rng.integers(1, 4, size=size)
                reported = np.where(flip, (actual + shift) % 4, actual)
                np.add.at(weights, (actual, reported), 1.0)
            port_counts = {b2p[b]: int(weights[a].sum()) for a, b in enumerate(bsm.BELL_ORDER)}
            weights /= shots
        rho_out = np.zeros((2, 2), dtype=complex)
        fid = 0.0
        for a, b in enumerate(bsm.BELL_ORDER):
            state = cond[b][1]
            for c, rep in enumerate(bsm.BELL_ORDER):
                w = weights[a, c]
                if w == 0:
                    continue
                rho_out += w * _correct(state, rep)
                if mode == "verify":
                    rotated = CORRECTIONS[rep].conj().T @ target
                    fid += w * float(np.real(rotated.conj() @ state @ rotated))
        if mode == "apply":
            fid = float(np.real(target.conj() @ rho_out @ target))
        results.append(InputResult(
            name=inp.label,
            vector=target,
            outcome_probs={b2p[b]: float(probs[a]) for a, b in enumerate(bsm.BELL_ORDER)},
            port_counts=port_counts,
            rho_out=rho_out,
            fidelity=fid,
        ))
    return TeleportResult(results, shots, noise, mode, _port_table(results, shots))


def average_fidelity(noise: NoiseConfig = IDEAL, delay: DelayModel | None = None,
                     inputs: Iterable[InputQubit] = SIX_POLES) -> float:
    """Exact-mode mean fidelity over an alphabet (equal weights)."""
    return run_teleport(inputs, None, noise, delay=delay).average_fidelity


# -- measure-and-prepare baseline ---------------------------------------------

def _resolve_basis(name: str) -> tuple[str, str]:
    target = pole_vector(name)
    for pair in MUB_PAIRS:
        if any(abs(abs(np.vdot(target, pole_vector(x))) - 1) < 1e-12 for x in pair):
            return pair
    raise ValueError(f"unknown basis {name!r}")


def _snap(x: float) -> Fraction:
    """``x`` as a fraction, with round-off removed near small denominators."""
    near = Fraction(x).limit_denominator(1 << 20)
    return near if abs(float(near) - x) < 1e-14 else Fraction(x)


def classical_baseline(
    alphabet: Sequence[InputQubit] = SIX_POLES,
    shots: int | None = None,
    seed: int = 0,
    basis: str | None = None,
) -> tuple[float, float]:
    """Average fidelity of measure-and-prepare without entanglement.

    Alice measures the input in one of the three mutually unbiased bases
    (uniformly random per shot, or always the basis containing ``basis``)
    and Bob prepares the eigenstate she reports. Returns ``(mean, standard
    error)``; the error is 0 in exact mode (``shots=None``).
    """
    pairs = MUB_PAIRS if basis is None else (_resolve_basis(basis),)
    bases = [np.array([pole_vector(x) for x in pair]) for pair in pairs]
    psis = np.array([a.vector for a in alphabet])
    # born[i, b, o]: probability of outcome o for input i in basis b, which is
    # also the fidelity of the state Bob prepares for that outcome
    born = np.array([[np.abs(B.conj() @ psi) ** 2 for B in bases] for psi in psis])
    if shots is None:
        # rational sum so an alphabet of poles lands on 2/3 exactly
        weights = [_snap(x) for x in born.ravel()]
        total = sum((w * w for w in weights), Fraction(0))
        return float(total / (len(psis) * len(bases))), 0.0
    chunks = []
    for blk, size in blocks(shots):
        rng = stream(seed, blk)
        i = rng.integers(0, len(psis), size=size)
        b = rng.integers(0, len(bases), size=size)
        o = (rng.random(size) >= born[i, b, 0]).astype(int)
        chunks.append(born[i, b, o])
    fids = np.concatenate(chunks)
    stderr = float(fids.std(ddof=1) / math.sqrt(shots)) if shots > 1 else 0.0
    return float(fids.mean()), stderr
