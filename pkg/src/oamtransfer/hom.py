"""OAM Hong-Ou-Mandel source with a tunable delay.

Partial distinguishability is modelled with wavepacket tags: photon ``a`` sits
in tag 0 and photon ``b`` in ``sqrt(g)|t0> + sqrt(1-g)|t1>``, where ``g`` is the
temporal overlap at stage offset ``dx``. Tags are traced out at detection, so
the interfering and distinguishable parts add incoherently while the
two-photon algebra itself stays exact.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .elements import apply_bs, apply_spp
from .fock import H, ModeLabel, PhotonicState, oam_index, post_select_coincidence
from .qubits import depolarize, pole_vector

HALF_WIDTH_MM = 0.194
DEFAULT_SIGMA_MM = HALF_WIDTH_MM / math.sqrt(math.log(2))
SCAN_RANGE_MM = (-0.6, 0.6)
SCAN_POINTS = 121

PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class DelayModel:
    """Gaussian temporal overlap ``g(dx) = exp(-(dx/sigma)^2)``, lengths in mm."""

    sigma_mm: float = DEFAULT_SIGMA_MM

    def __post_init__(self):
        if not self.sigma_mm > 0:
            raise ValueError("sigma_mm must be positive")

    @classmethod
    def from_half_width(cls, half_width_mm: float) -> DelayModel:
        return cls(half_width_mm / math.sqrt(math.log(2)))

    @property
    def half_width_mm(self) -> float:
        """Offset at which the overlap (and so the dip depth) is halved."""
        return self.sigma_mm * math.sqrt(math.log(2))

    def overlap(self, delta_x_mm: float) -> float:
        return math.exp(-((delta_x_mm / self.sigma_mm) ** 2))


def default_positions(start=SCAN_RANGE_MM[0], stop=SCAN_RANGE_MM[1], points=SCAN_POINTS) -> np.ndarray:
    return np.linspace(start, stop, points)


def interfere_pair(delay: DelayModel, delta_x_mm: float, ell0: int = 1) -> PhotonicState:
    """Two H photons, both raised to ``+l0`` by SPPs, meeting on a 50:50 BS.

    Output paths are ``a`` and ``b``. At ``dx = 0`` this is the four-term
    bunching/anti-bunching state of the OAM HOM effect.
    """
    g = delay.overlap(delta_x_mm)
    photon_a = ModeLabel("a", H, 0, 0)
    same = ModeLabel("b", H, 0, 0)
    late = ModeLabel("b", H, 0, 1)
    s = PhotonicState([((photon_a, same), math.sqrt(g)), ((photon_a, late), math.sqrt(1 - g))])
    s = apply_spp(apply_spp(s, "a", ell0), "b", ell0)
    return apply_bs(s, "a", "b", "a", "b")


def coincidence_density(s: PhotonicState, path_a: str = "a", path_b: str = "b", ell0: int = 1) -> np.ndarray:
    """Unnormalized 4x4 OAM density matrix of the coincidence terms.

    Ordering is ``(oam_a, oam_b)`` with ``+l0`` first. All other labels are
    traced out, so the trace equals the coincidence probability.
    """
    blocks: dict[tuple, np.ndarray] = {}
    total = s.norm() ** 2
    for basis, amp in s.items():
        ma, mb = basis.on_path(path_a), basis.on_path(path_b)
        if len(ma) != 1 or len(mb) != 1:
            continue
        (ma,), (mb,) = ma, mb
        key = (ma.pol, ma.wavepacket, mb.pol, mb.wavepacket)
        vec = blocks.setdefault(key, np.zeros(4, dtype=complex))
        vec[2 * oam_index(ma.oam, ell0) + oam_index(mb.oam, ell0)] += amp
    rho = np.zeros((4, 4), dtype=complex)
    for vec in blocks.values():
        rho += np.outer(vec, vec.conj())
    return rho / total


@dataclass(frozen=True)
class SourceResult:
    rho: np.ndarray  # 4x4 over (oam_a, oam_b)
    fidelity: float  # <phi-|rho|phi->
    probability: float  # coincidence post-selection probability


def entangled_source(
    delta_x_mm: float = 0.0,
    delay: DelayModel | None = None,
    depolarizing_p: float = 0.0,
    ell0: int = 1,
) -> SourceResult:
    """Post-selected OAM pair; depolarizing noise acts on the post-selected pair."""
    delay = delay or DelayModel()
    s = interfere_pair(delay, delta_x_mm, ell0)
    _, prob = post_select_coincidence(s, "a", "b")
    rho = coincidence_density(s, ell0=ell0) / prob
    rho = depolarize(rho, depolarizing_p)
    fid = float(np.real(PHI_MINUS.conj() @ rho @ PHI_MINUS))
    return SourceResult(rho, fid, prob)


def coincidence_probability(rho_unnorm: np.ndarray, basis_a: str, basis_b: str) -> float:
    e = np.kron(pole_vector(basis_a), pole_vector(basis_b))
    return float(np.real(e.conj() @ rho_unnorm @ e))


def coincidence_curve(
    basis_a: str,
    basis_b: str,
    positions: Iterable[float] | None = None,
    delay: DelayModel | None = None,
    depolarizing_p: float = 0.0,
    ell0: int = 1,
) -> list[tuple[float, float]]:
    """Probability of a coincidence with path ``a`` projected on ``basis_a``
    and path ``b`` on ``basis_b``, per stage position.

    Probabilities are per emitted pair, so summing a complete product basis
    gives the coincidence post-selection probability (1/2).
    """
    delay = delay or DelayModel()
    positions = default_positions() if positions is None else positions
    out = []
    for dx in positions:
        rho = coincidence_density(interfere_pair(delay, float(dx), ell0), ell0=ell0)
        rho = depolarize(rho, depolarizing_p)
        out.append((float(dx), coincidence_probability(rho, basis_a, basis_b)))
    return out


def dip_half_width(curve: Sequence[tuple[float, float]]) -> float:
    """Half width at half depth of a dip, read off a scanned curve.

    The baseline is taken from the curve end points and crossings are
    located by linear interpolation on each side of the minimum.
    """
    xs = np.array([c[0] for c in curve])
    ys = np.array([c[1] for c in curve])
    baseline = 0.5 * (ys[0] + ys[-1])
    i0 = int(np.argmin(ys))
    level = 0.5 * (baseline + ys[i0])

    def crossing(idx: Iterable[int]) -> float:
        prev = i0
        for i in idx:
            if ys[i] >= level:
                t = (level - ys[prev]) / (ys[i] - ys[prev])
                return xs[prev] + t * (xs[i] - xs[prev])
            prev = i
        raise ValueError("dip does not recover to half depth inside the scan")

    right = crossing(range(i0 + 1, len(xs)))
    left = crossing(range(i0 - 1, -1, -1))
    return 0.5 * (right - left)


def visibility(curve: Sequence[tuple[float, float]]) -> float:
    ys = np.array([c[1] for c in curve])
    baseline = 0.5 * (ys[0] + ys[-1])
    return float((baseline - ys.min()) / baseline)
