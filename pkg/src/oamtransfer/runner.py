"""Dispatch a validated scenario to its experiment and wrap the result."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from . import __version__, bsm
from .calibration import calibrate, source_fidelity
from .config import ScenarioConfig
from .hom import coincidence_curve, default_positions, dip_half_width, entangled_source, visibility
from .qubits import SIX_POLES
from .results import ResultEnvelope, cplx, matrix, table, timestamp
from .teleport import F_CLASSICAL, average_fidelity, run_teleport
from .tomography import TomoConfig, tomo_report

HALF_WIDTH_MIN_VISIBILITY = 0.5


def _inputs(cfg: ScenarioConfig):
    return [cfg.input.build()] if cfg.input is not None else list(SIX_POLES)


def _ports(cfg: ScenarioConfig):
    return cfg.ports if cfg.ports is not None else bsm.DEFAULT_PORTS


def _hom_scan(cfg: ScenarioConfig) -> dict:
    delay = cfg.delay.build()
    s = cfg.hom_scan
    positions = default_positions(s.start_mm, s.stop_mm, s.points)
    rows, curves = [], []
    for a, b in s.bases:
        curve = coincidence_curve(a, b, positions, delay, cfg.noise.depolarizing_p, cfg.ell0)
        rows += [[dx, a, b, p] for dx, p in curve]
        vis = visibility(curve)
        width = None
        if vis > HALF_WIDTH_MIN_VISIBILITY:
            try:
                width = dip_half_width(curve)
            except ValueError:
                pass
        probs = [p for _, p in curve]
        curves.append({"basis_a": a, "basis_b": b, "min_probability": min(probs),
                       "max_probability": max(probs), "visibility": vis, "half_width_mm": width})
    return {
        "sigma_mm": delay.sigma_mm,
        "model_half_width_mm": delay.half_width_mm,
        "curves": curves,
        "table": table(("delta_x_mm", "basis_a", "basis_b", "probability"), rows),
    }


def _source_verify(cfg: ScenarioConfig) -> dict:
    src = entangled_source(cfg.noise.source_delay_mm, cfg.delay.build(),
                           cfg.noise.depolarizing_p, cfg.ell0)
    rows = [["fidelity", src.fidelity], ["post_selection_probability", src.probability]]
    return {
        "fidelity": src.fidelity,
        "post_selection_probability": src.probability,
        "target": "phi-",
        "rho": matrix(src.rho),
        "table": table(("quantity", "value"), rows),
    }


def _bsm_verify(cfg: ScenarioConfig) -> dict:
    ports = _ports(cfg)
    closed = bsm.verification_matrix(ports)
    network = np.array([
        [bsm.network_sort(bsm.bell_state(b), ports, cfg.ell0)[p] for p in bsm.PORTS]
        for b in bsm.BELL_ORDER
    ])
    rows = [[b.value, *closed[k].tolist()] for k, b in enumerate(bsm.BELL_ORDER)]
    return {
        "ports": {bsm.BellState.parse(k).value: v for k, v in ports.items()},
        "matrix": closed.tolist(),
        "network_matrix": network.tolist(),
        "max_deviation_from_identity": float(np.abs(closed - np.eye(4)).max()),
        "max_network_deviation": float(np.abs(closed - network).max()),
        "table": table(("bell_state", *bsm.PORTS), rows),
    }


def _teleport(cfg: ScenarioConfig) -> dict:
    res = run_teleport(_inputs(cfg), cfg.shots, cfg.noise.build(), cfg.seed, cfg.delay.build(),
                       cfg.ell0, cfg.mode, _ports(cfg))
    inputs = [{
        "name": r.name,
        "alpha": cplx(r.vector[0]),
        "beta": cplx(r.vector[1]),
        "fidelity": r.fidelity,
        "outcome_probs": r.outcome_probs,
        "port_counts": r.port_counts,
        "rho": matrix(r.rho_out),
    } for r in res.inputs]
    cols = ("port", "theory_pct", "observed_pct", "stderr_pct")
    return {
        "mode": res.mode,
        "shots": res.shots,
        "inputs": inputs,
        "average_fidelity": res.average_fidelity,
        "classical_bound": F_CLASSICAL,
        "port_counts": res.port_counts,
        "table": table(cols, [[row[c] for c in cols] for row in res.port_table]),
    }


def _tomo(cfg: ScenarioConfig) -> dict:
    t = cfg.tomo
    tc = TomoConfig(cfg.noise.build(), cfg.delay.build(), t.shots_per_basis, t.poisson,
                    t.teleport_shots, t.bootstrap, cfg.seed, cfg.ell0, t.max_iter)
    rep = tomo_report(_inputs(cfg), tc, strict=t.strict)
    rows = [{
        "state": r.name,
        "fidelity": r.fidelity,
        "stderr": r.stderr,
        "model_fidelity": r.model_fidelity,
        "rho": matrix(r.rho),
        "counts": r.counts.as_dict(),
        "iterations": r.iterations,
        "converged": r.converged,
    } for r in rep.rows]
    return {
        "source_fidelity": rep.source_fidelity,
        "mean_fidelity": rep.mean,
        "std_fidelity": rep.std,
        "classical_bound": F_CLASSICAL,
        "states": rows,
        "table": table(("state", "F", "stderr"), [[r.name, r.fidelity, r.stderr] for r in rep.rows]),
    }


def _calibrate(cfg: ScenarioConfig) -> dict:
    c = cfg.calibrate
    delay = cfg.delay.build()
    noise = calibrate(c.target_source_fidelity, c.target_avg_fidelity, cfg.noise.build(), delay)
    fitted = {
        "depolarizing_p": noise.depolarizing_p,
        "source_delay_mm": noise.source_delay_mm,
        "feedforward_flip_prob": noise.feedforward_flip_prob,
    }
    achieved_src = source_fidelity(noise, delay)
    achieved_avg = average_fidelity(noise, delay)
    rows = [[k, v] for k, v in fitted.items()]
    rows += [["source_fidelity", achieved_src], ["average_fidelity", achieved_avg]]
    return {
        "noise": fitted,
        "source_fidelity": achieved_src,
        "average_fidelity": achieved_avg,
        "targets": {"source_fidelity": c.target_source_fidelity,
                    "average_fidelity": c.target_avg_fidelity},
        "table": table(("parameter", "value"), rows),
    }


EXPERIMENTS: dict[str, Callable[[ScenarioConfig], dict]] = {
    "hom-scan": _hom_scan,
    "source-verify": _source_verify,
    "bsm-verify": _bsm_verify,
    "teleport": _teleport,
    "tomo": _tomo,
    "calibrate": _calibrate,
}


def run(cfg: ScenarioConfig) -> ResultEnvelope:
    payload = EXPERIMENTS[cfg.experiment](cfg)
    return ResultEnvelope(cfg.model_dump(mode="json"), __version__, cfg.seed, timestamp(), payload)
