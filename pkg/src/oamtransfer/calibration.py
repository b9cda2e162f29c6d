"""Fit the noise model to target fidelities by bisection."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace

from .hom import DelayModel, entangled_source
from .teleport import F_CLASSICAL, IDEAL, NoiseConfig, average_fidelity

TOL = 1e-4


class CalibrationError(ValueError):
    pass


def _bisect_decreasing(f: Callable[[float], float], target: float, lo: float = 0.0, hi: float = 1.0,
                       tol: float = TOL) -> float:
    """Root of ``f(x) = target`` for ``f`` non-increasing on ``[lo, hi]``."""
    f_lo, f_hi = f(lo), f(hi)
    if abs(f_lo - target) <= 1e-12:
        return lo
    if not f_hi - 1e-12 <= target <= f_lo + 1e-12:
        raise CalibrationError(
            f"target {target} outside the reachable range [{f_hi:.6g}, {f_lo:.6g}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid - target) < 1e-12 or hi - lo < 1e-15:
            break
        if f_mid > target:
            lo = mid
        else:
            hi = mid
    if abs(f(mid) - target) > tol:
        raise CalibrationError(f"bisection stalled {abs(f(mid) - target):.3g} from target")
    return mid


def _check_target(name: str, value: float) -> None:
    if not F_CLASSICAL < value <= 1.0:
        raise CalibrationError(f"{name}={value} must lie in (2/3, 1]")


def source_fidelity(noise: NoiseConfig, delay: DelayModel | None = None) -> float:
    return entangled_source(noise.source_delay_mm, delay, noise.depolarizing_p).fidelity


def calibrate(
    target_source_fidelity: float | None = None,
    target_avg_fidelity: float | None = None,
    base: NoiseConfig = IDEAL,
    delay: DelayModel | None = None,
    tol: float = TOL,
) -> NoiseConfig:
    """Solve for the noise parameters that reproduce the given fidelities.

    * Source target only: ``depolarizing_p`` such that the post-selected pair
      has that fidelity with the ideal Bell pair.
    * Average target only: ``depolarizing_p`` such that the exact six-pole
      teleportation fidelity matches.
    * Both: ``depolarizing_p`` from the source target, then
      ``feedforward_flip_prob`` for the remaining loss of teleportation
      fidelity.
    """
    if target_source_fidelity is None and target_avg_fidelity is None:
        raise CalibrationError("give at least one target fidelity")
    noise = base
    if target_source_fidelity is not None:
        _check_target("target_source_fidelity", target_source_fidelity)
        p = _bisect_decreasing(
            lambda x: source_fidelity(replace(noise, depolarizing_p=x), delay),
            target_source_fidelity, tol=tol,
        )
        noise = replace(noise, depolarizing_p=p)
    if target_avg_fidelity is not None:
        _check_target("target_avg_fidelity", target_avg_fidelity)
        field = "feedforward_flip_prob" if target_source_fidelity is not None else "depolarizing_p"
        x = _bisect_decreasing(
            lambda v: average_fidelity(replace(noise, **{field: v}), delay),
            target_avg_fidelity, tol=tol,
        )
        noise = replace(noise, **{field: x})
    return noise
