"""Sparse second-quantized states over labelled bosonic modes.

A mode is identified by ``(path, polarization, oam, wavepacket)``. A basis
ket is a multiset of modes (photon count per mode = multiplicity) and a
:class:`PhotonicState` is a sparse map from basis kets to complex amplitudes.

Amplitudes are always stored for *normalized* occupation kets, so that
``|2; m>`` has unit norm. The ``sqrt(n!)`` factors that appear when creation
operators are expanded are handled inside :func:`apply_mode_map`.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

PRUNE_TOL = 1e-12
NORM_TOL = 1e-9
MAX_PHOTONS = 3


class Polarization(enum.IntEnum):
    H = 0
    V = 1

    def __repr__(self) -> str:
        return self.name


H = Polarization.H
V = Polarization.V


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One bosonic mode. Field order doubles as the canonical sort key."""

    path: str
    pol: Polarization = H
    oam: int = 0
    wavepacket: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pol", Polarization(self.pol))
        object.__setattr__(self, "oam", int(self.oam))

    def __repr__(self) -> str:
        tag = f",t{self.wavepacket}" if self.wavepacket else ""
        return f"{self.path}[{self.pol.name},{self.oam:+d}{tag}]"


@dataclass(frozen=True)
class FockBasisState:
    """Multiset of occupied modes, stored sorted."""

    modes: tuple[ModeLabel, ...]

    def __init__(self, modes: Iterable[ModeLabel] = ()):
        object.__setattr__(self, "modes", tuple(sorted(modes)))

    @property
    def n_photons(self) -> int:
        return len(self.modes)

    @property
    def occupation(self) -> Counter:
        return Counter(self.modes)

    @property
    def paths(self) -> frozenset[str]:
        return frozenset(m.path for m in self.modes)

    def on_path(self, path: str) -> tuple[ModeLabel, ...]:
        return tuple(m for m in self.modes if m.path == path)

    def norm_factor(self) -> float:
        """``sqrt(prod n_m!)`` for this occupation."""
        return math.sqrt(math.prod(math.factorial(n) for n in self.occupation.values()))

    def __add__(self, other: FockBasisState) -> FockBasisState:
        return FockBasisState(self.modes + other.modes)

    def __repr__(self) -> str:
        parts = []
        for mode, n in sorted(self.occupation.items()):
            parts.append(f"|{n};{mode!r}>")
        return "".join(parts) or "|vac>"


def fock(*modes: ModeLabel) -> FockBasisState:
    return FockBasisState(modes)


class PhotonicState:
    """Immutable sparse superposition of Fock basis kets.

    All basis kets must carry the same total photon number. Entries with
    ``|amp| < PRUNE_TOL`` are dropped on construction. The constructor does
    not normalize; use :meth:`normalized`.
    """

    __slots__ = ("_amps", "_n")

    def __init__(self, amplitudes: Mapping[FockBasisState, complex] | Iterable = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        acc: dict[FockBasisState, complex] = {}
        for basis, amp in items:
            if not isinstance(basis, FockBasisState):
                basis = FockBasisState(basis)
            acc[basis] = acc.get(basis, 0j) + complex(amp)
        acc = {b: a for b, a in acc.items() if abs(a) >= PRUNE_TOL}
        counts = {b.n_photons for b in acc}
        if len(counts) > 1:
            raise ValueError(f"mixed photon numbers in one state: {sorted(counts)}")
        n = counts.pop() if counts else 0
        if n > MAX_PHOTONS:
            raise ValueError(f"{n} photons requested; at most {MAX_PHOTONS} are supported")
        self._amps = MappingProxyType(dict(sorted(acc.items(), key=lambda kv: kv[0].modes)))
        self._n = n

    @classmethod
    def from_modes(cls, *modes: ModeLabel, amplitude: complex = 1.0) -> PhotonicState:
        return cls({fock(*modes): amplitude})

    @property
    def amplitudes(self) -> Mapping[FockBasisState, complex]:
        return self._amps

    @property
    def n_photons(self) -> int:
        return self._n

    @property
    def paths(self) -> frozenset[str]:
        out: set[str] = set()
        for b in self._amps:
            out |= b.paths
        return frozenset(out)

    def amplitude(self, basis: FockBasisState | Iterable[ModeLabel]) -> complex:
        if not isinstance(basis, FockBasisState):
            basis = FockBasisState(basis)
        return self._amps.get(basis, 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def normalized(self) -> PhotonicState:
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        return PhotonicState({b: a / nrm for b, a in self._amps.items()})

    def scaled(self, factor: complex) -> PhotonicState:
        return PhotonicState({b: a * factor for b, a in self._amps.items()})

    def is_empty(self) -> bool:
        return not self._amps

    def items(self):
        return self._amps.items()

    def __iter__(self) -> Iterator[FockBasisState]:
        return iter(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def __add__(self, other: PhotonicState) -> PhotonicState:
        return PhotonicState(itertools.chain(self.items(), other.items()))

    def __repr__(self) -> str:
        terms = [f"({a.real:+.4g}{a.imag:+.4g}j){b!r}" for b, a in self.items()]
        return "PhotonicState(" + " ".join(terms) + ")"


def tensor(s1: PhotonicState, s2: PhotonicState) -> PhotonicState:
    """Product state of two states living on disjoint paths."""
    shared = s1.paths & s2.paths
    if shared:
        raise ValueError(f"tensor factors share paths {sorted(shared)}")
    out = PhotonicState((b1 + b2, a1 * a2) for b1, a1 in s1.items() for b2, a2 in s2.items())
    return out.normalized()


def inner_product(s1: PhotonicState, s2: PhotonicState) -> complex:
    """<s1|s2>; zero when the photon numbers differ."""
    if s1.n_photons != s2.n_photons:
        return 0j
    return sum((a.conjugate() * s2.amplitude(b) for b, a in s1.items()), 0j)


def overlap(s1: PhotonicState, s2: PhotonicState) -> float:
    """|<s1|s2>|, the global-phase-insensitive comparison used throughout."""
    return abs(inner_product(s1, s2))


ModeMap = Callable[[ModeLabel], Iterable[tuple[ModeLabel, complex]]]


def apply_mode_map(s: PhotonicState, fn: ModeMap, paths: Iterable[str] | None = None) -> PhotonicState:
    """Substitute every creation operator ``a_m^dag -> sum_k u_k a_{m_k}^dag``.

    ``fn`` is only called on modes whose path is in ``paths`` (all modes when
    ``paths`` is None); other modes pass through unchanged. The substitution
    is simultaneous, so output paths may reuse input names.
    """
    selected = None if paths is None else frozenset(paths)
    cache: dict[ModeLabel, tuple[tuple[ModeLabel, complex], ...]] = {}

    def image(m: ModeLabel):
        if selected is not None and m.path not in selected:
            return ((m, 1.0),)
        if m not in cache:
            cache[m] = tuple((mm, complex(u)) for mm, u in fn(m) if u != 0)
        return cache[m]

    acc: dict[FockBasisState, complex] = {}
    for basis, amp in s.items():
        coeff = amp / basis.norm_factor()
        for combo in itertools.product(*(image(m) for m in basis.modes)):
            out = FockBasisState(mm for mm, _ in combo)
            u = coeff * math.prod(c for _, c in combo)
            acc[out] = acc.get(out, 0j) + u * out.norm_factor()
    return PhotonicState(acc)


def post_select_coincidence(
    s: PhotonicState, path_a: str, path_b: str
) -> tuple[PhotonicState | None, float]:
    """Keep the terms with exactly one photon in each of two paths.

    Returns the renormalized surviving state and its probability mass, or
    ``(None, 0.0)`` when nothing survives.
    """
    if s.n_photons != 2:
        raise ValueError(f"coincidence post-selection needs 2 photons, got {s.n_photons}")
    total = s.norm() ** 2
    kept = PhotonicState(
        (b, a) for b, a in s.items() if len(b.on_path(path_a)) == 1 and len(b.on_path(path_b)) == 1
    )
    prob = kept.norm() ** 2 / total
    if kept.is_empty():
        return None, 0.0
    return kept.normalized(), prob


# -- 8-dim hybrid embedding (pol_c, oam_a, oam_b) -----------------------------

def oam_index(ell: int, ell0: int) -> int:
    if ell == ell0:
        return 0
    if ell == -ell0:
        return 1
    raise ValueError(f"OAM value {ell} outside the qubit subspace {{+{ell0}, -{ell0}}}")


def hybrid_index(pol: Polarization, oam_a: int, oam_b: int, ell0: int = 1) -> int:
    return 4 * int(pol) + 2 * oam_index(oam_a, ell0) + oam_index(oam_b, ell0)


def to_hybrid(
    s: PhotonicState, path_ca: str, path_b: str, ell0: int = 1, path_c: str | None = None
) -> np.ndarray:
    """Relabel a post-selected state as an 8-vector over ``pol_c x oam_a x oam_b``.

    The photon on ``path_ca`` carries the OAM qubit ``a`` and, unless
    ``path_c`` names a separate polarization photon, also the polarization
    qubit ``c``. Every other label (polarization of ``b``, wavepacket tags)
    must be the same in all terms, otherwise the state is not a pure state of
    the three qubits and is rejected.
    """
    expected = 3 if path_c is not None else 2
    if s.n_photons != expected:
        raise ValueError(f"expected {expected} photons, got {s.n_photons}")
    vec = np.zeros(8, dtype=complex)
    spectators = set()
    for basis, amp in s.items():
        ma, mb = basis.on_path(path_ca), basis.on_path(path_b)
        mc = basis.on_path(path_c) if path_c is not None else ma
        if len(ma) != 1 or len(mb) != 1 or len(mc) != 1 or len(basis.modes) != expected:
            raise ValueError(f"term {basis!r} is not one photon per qubit path")
        (ma,), (mb,), (mc,) = ma, mb, mc
        key = (mb.pol, ma.wavepacket, mb.wavepacket)
        if path_c is not None:
            key += (ma.pol, mc.oam, mc.wavepacket)
        spectators.add(key)
        vec[hybrid_index(mc.pol, ma.oam, mb.oam, ell0)] += amp
    if len(spectators) > 1:
        raise ValueError("spectator labels differ between terms; state is not an 8-dim pure state")
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1) > NORM_TOL:
        raise ValueError(f"hybrid vector has norm {nrm}, expected 1")
    return vec


def from_hybrid(
    vec: np.ndarray, path_ca: str, path_b: str, ell0: int = 1, pol_b: Polarization = H
) -> PhotonicState:
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (8,):
        raise ValueError("hybrid vector must have 8 entries")
    terms = []
    for idx, amp in enumerate(vec):
        pol, oa, ob = idx >> 2, (idx >> 1) & 1, idx & 1
        ell_a = ell0 if oa == 0 else -ell0
        ell_b = ell0 if ob == 0 else -ell0
        terms.append((fock(ModeLabel(path_ca, pol, ell_a), ModeLabel(path_b, pol_b, ell_b)), amp))
    return PhotonicState(terms)

