"""Linear-optical elements acting on :class:`~oamtransfer.fock.PhotonicState`.

Every element is a substitution of creation operators (see
:func:`~oamtransfer.fock.apply_mode_map`). Conventions:

* Reflection off a BS, PBS or mirror negates the OAM charge.
* 50:50 BS: ``in1 -> (out1 + out2)/sqrt2``, ``in2 -> (out2 - out1)/sqrt2``
  (real, with the minus sign on the reflection seen from ``in2``).
* PBS: H transmits (``in1 -> out1``, ``in2 -> out2``), V reflects with a +1
  phase.
* Wave plates: ``R(t) diag(1, -1) R(t)^dag`` (HWP) and
  ``R(t) diag(1, -i) R(t)^dag`` (QWP), fast axis at angle ``t`` from H.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .fock import H, ModeLabel, PhotonicState, V, apply_mode_map

SQRT1_2 = 1 / math.sqrt(2)


class ElementKind(enum.Enum):
    BS50 = "BS50"
    PBS = "PBS"
    HWP = "HWP"
    QWP = "QWP"
    SPP = "SPP"
    MIRROR = "Mirror"
    PHASE = "Phase"
    OAM_SORTER = "OamSorter"
    SMF = "SmfProjector"


@dataclass(frozen=True)
class ElementSpec:
    """Declarative description of one element placed in a network.

    ``param`` holds the element parameter: angle in degrees for wave plates
    (reduced mod 180), the charge step for an SPP, the phase in radians for
    a phase shifter, and ``l0`` for an OAM sorter.
    """

    kind: ElementKind
    inputs: tuple[str, ...]
    outputs: tuple[str, ...] = ()
    param: float = 0.0
    reflection_flips_oam: bool = True

    def __post_init__(self):
        kind = ElementKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (ElementKind.HWP, ElementKind.QWP):
            object.__setattr__(self, "param", float(self.param) % 180.0)
        if kind is ElementKind.SPP and (int(self.param) != self.param or self.param == 0):
            raise ValueError("SPP charge step must be a nonzero integer")

    def apply(self, s: PhotonicState):
        k = self.kind
        if k is ElementKind.BS50:
            return apply_bs(s, *self.inputs, *self.outputs, flip=self.reflection_flips_oam)
        if k is ElementKind.PBS:
            return apply_pbs(s, *self.inputs, *self.outputs, flip=self.reflection_flips_oam)
        if k in (ElementKind.HWP, ElementKind.QWP):
            return apply_waveplate(s, self.inputs[0], k.value, self.param)
        if k is ElementKind.SPP:
            return apply_spp(s, self.inputs[0], int(self.param))
        if k is ElementKind.MIRROR:
            return apply_mirror(s, self.inputs[0])
        if k is ElementKind.PHASE:
            return apply_phase(s, self.inputs[0], self.param)
        if k is ElementKind.OAM_SORTER:
            return apply_oam_sorter(s, self.inputs[0], *self.outputs, ell0=int(self.param) or 1)
        if k is ElementKind.SMF:
            return smf_project(s, self.inputs[0])
        raise AssertionError(k)


def _check_ports(s: PhotonicState, inputs, outputs):
    busy = (s.paths - set(inputs)) & set(outputs)
    if busy:
        raise ValueError(f"output ports {sorted(busy)} already carry photons not entering this element")


def _reflect(m: ModeLabel, path: str, flip: bool) -> ModeLabel:
    return replace(m, path=path, oam=-m.oam if flip else m.oam)


def apply_bs(s: PhotonicState, in1: str, in2: str, out1: str, out2: str, flip: bool = True) -> PhotonicState:
    """Balanced beam splitter; ``in_k`` transmits to ``out_k``."""
    if in1 == in2 or out1 == out2:
        raise ValueError("beam splitter needs two distinct input and output ports")
    _check_ports(s, (in1, in2), (out1, out2))

    def fn(m: ModeLabel):
        if m.path == in1:
            return [(replace(m, path=out1), SQRT1_2), (_reflect(m, out2, flip), SQRT1_2)]
        return [(replace(m, path=out2), SQRT1_2), (_reflect(m, out1, flip), -SQRT1_2)]

    return apply_mode_map(s, fn, (in1, in2))


def apply_pbs(s: PhotonicState, in1: str, in2: str, out1: str, out2: str, flip: bool = True) -> PhotonicState:
    """Polarizing beam splitter: H transmits, V reflects (OAM negated)."""
    if in1 == in2 or out1 == out2:
        raise ValueError("PBS needs two distinct input and output ports")
    _check_ports(s, (in1, in2), (out1, out2))
    straight = {in1: out1, in2: out2}
    crossed = {in1: out2, in2: out1}

    def fn(m: ModeLabel):
        if m.pol is H:
            return [(replace(m, path=straight[m.path]), 1.0)]
        return [(_reflect(m, crossed[m.path], flip), 1.0)]

    return apply_mode_map(s, fn, (in1, in2))


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def jones(kind: str, angle_deg: float) -> np.ndarray:
    """Jones matrix of a half- or quarter-wave plate, global phase dropped."""
    kind = kind.upper()
    if kind == "HWP":
        core = np.diag([1, -1]).astype(complex)
    elif kind == "QWP":
        core = np.diag([1, -1j])
    else:
        raise ValueError(f"unknown wave plate {kind!r}")
    r = _rot(math.radians(angle_deg % 180.0))
    return r @ core @ r.T


def apply_jones(s: PhotonicState, path: str, matrix: np.ndarray) -> PhotonicState:
    """Apply a 2x2 polarization matrix (columns = images of H, V) on one path."""
    matrix = np.asarray(matrix, dtype=complex)

    def fn(m: ModeLabel):
        col = matrix[:, int(m.pol)]
        return [(replace(m, pol=H), col[0]), (replace(m, pol=V), col[1])]

    return apply_mode_map(s, fn, (path,))


def apply_waveplate(s: PhotonicState, path: str, kind: str, angle_deg: float) -> PhotonicState:
    return apply_jones(s, path, jones(kind, angle_deg))


def apply_spp(s: PhotonicState, path: str, delta_ell: int) -> PhotonicState:
    """Spiral phase plate adding ``delta_ell`` to the OAM charge."""
    return apply_mode_map(s, lambda m: [(replace(m, oam=m.oam + delta_ell), 1.0)], (path,))


def apply_mirror(s: PhotonicState, path: str) -> PhotonicState:
    return apply_mode_map(s, lambda m: [(replace(m, oam=-m.oam), 1.0)], (path,))


def apply_phase(s: PhotonicState, path: str, phi: float) -> PhotonicState:
    """Path-length phase ``exp(i phi)`` per photon on ``path``."""
    ph = cmath.exp(1j * phi)
    return apply_mode_map(s, lambda m: [(m, ph)], (path,))


def apply_oam_sorter(
    s: PhotonicState, path_in: str, port_plus: str, port_minus: str, ell0: int = 1
) -> PhotonicState:
    """Ideal sorter routing ``+l0`` to ``port_plus`` and ``-l0`` to ``port_minus``."""
    _check_ports(s, (path_in,), (port_plus, port_minus))

    def fn(m: ModeLabel):
        if m.oam == ell0:
            return [(replace(m, path=port_plus), 1.0)]
        if m.oam == -ell0:
            return [(replace(m, path=port_minus), 1.0)]
        raise ValueError(f"sorter accepts OAM +/-{ell0} only, got {m.oam}")

    return apply_mode_map(s, fn, (path_in,))


def smf_project(s: PhotonicState, path: str) -> tuple[PhotonicState | None, float]:
    """Single-mode-fibre coupling: keep only terms where every photon on
    ``path`` is in the Gaussian (``l = 0``) mode."""
    total = s.norm() ** 2
    kept = PhotonicState(
        (b, a) for b, a in s.items() if all(m.oam == 0 for m in b.on_path(path))
    )
    if kept.is_empty():
        return None, 0.0
    return kept.normalized(), kept.norm() ** 2 / total


@dataclass
class Network:
    """Ordered list of elements applied in sequence."""

    elements: list[ElementSpec] = field(default_factory=list)

    def add(self, kind, inputs, outputs=(), param=0.0) -> Network:
        self.elements.append(ElementSpec(ElementKind(kind), tuple(inputs), tuple(outputs), param))
        return self

    def run(self, s: PhotonicState) -> PhotonicState:
        for el in self.elements:
            out = el.apply(s)
            s = out[0] if isinstance(out, tuple) else out
            if s is None:
                raise ValueError(f"{el.kind.value} on {el.inputs} removed every term")
        return s
