"""Acceptance suite: one PASS/FAIL line per criterion.

Under pytest the lines are collected and printed in the terminal summary;
``python tests/test_acceptance.py`` prints them directly.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES, haar_states  # noqa: E402

from oamtransfer import bsm  # noqa: E402
from oamtransfer import elements as el  # noqa: E402
from oamtransfer.calibration import calibrate, source_fidelity  # noqa: E402
from oamtransfer.cli import main  # noqa: E402
from oamtransfer.fock import H, V, ModeLabel, PhotonicState  # noqa: E402
from oamtransfer.hom import (  # noqa: E402
    DelayModel,
    coincidence_curve,
    default_positions,
    dip_half_width,
    entangled_source,
)
from oamtransfer.qubits import SIX_POLES, InputQubit, is_density_matrix, pole_vector, projector, trace_distance  # noqa: E402
from oamtransfer.teleport import average_fidelity, classical_baseline, run_teleport  # noqa: E402
from oamtransfer.tomography import TomoConfig, exact_counts, fidelity, mle_reconstruct, simulate_counts, tomo_report  # noqa: E402

REFERENCE_PORTS = {"A": (23.8, 1.3), "B": (25.4, 1.2), "C": (24.6, 0.8), "D": (26.2, 1.1)}
TARGET_MEAN = 0.918
TARGET_SOURCE = 0.9255
MEAN_BAND = (0.905, 0.931)


def report(num, ok, detail):
    line = f"CRITERION {num:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[num] = line
    print(line)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# -- 1 ---------------------------------------------------------------------------

def _bs(*modes):
    return el.apply_bs(PhotonicState.from_modes(*modes), "a", "b", "a", "b")


def _coeffs(state, kets):
    vec = np.array([state.amplitude(k) for k in kets])
    leftover = 1.0 - float(np.vdot(vec, vec).real)
    return vec, leftover


def _matches(vec, leftover, reference):
    reference = np.asarray(reference, dtype=complex)
    k = int(np.argmax(np.abs(reference)))
    phase = vec[k] / reference[k] if reference[k] != 0 else 0
    return abs(leftover) < 1e-12 and abs(abs(phase) - 1) < 1e-12 and np.abs(vec - phase * reference).max() < 1e-12


def bs_cases():
    m = ModeLabel
    pos, neg = 1, -1
    two_pol = [[m("a", H), m("a", V)], [m("b", H), m("b", V)], [m("a", H), m("b", V)], [m("a", V), m("b", H)]]
    same_pol = [[m("a", H), m("a", H)], [m("b", H), m("b", H)]]
    oam = [[m("a", H, pos), m("a", H, neg)], [m("b", H, pos), m("b", H, neg)],
           [m("a", H, pos), m("b", H, pos)], [m("a", H, neg), m("b", H, neg)]]
    return {
        "distinguishable polarizations": (_bs(m("a", H), m("b", V)), two_pol, [0.5, 0.5, 0.5, -0.5]),
        "identical polarizations": (_bs(m("a", H), m("b", H)), same_pol, [1 / math.sqrt(2), -1 / math.sqrt(2)]),
        "OAM pair": (_bs(m("a", H, pos), m("b", H, pos)), oam, [0.5, 0.5, 0.5, -0.5]),
    }


def criterion_1():
    cases, dt = timed(bs_cases)
    bad = []
    for name, (state, kets, reference) in cases.items():
        vec, leftover = _coeffs(state, kets)
        if not _matches(vec, leftover, reference):
            bad.append(f"{name}: got {np.round(vec.real, 6).tolist()} vs reference {np.round(reference, 6).tolist()}")
    ok = not bad and dt < 1.0
    detail = "all three outputs match the reference coefficients" if not bad else "; ".join(bad)
    return report(1, ok, f"{detail} ({dt * 1e3:.1f} ms)")


# -- 2 ---------------------------------------------------------------------------

def criterion_2():
    src, dt = timed(lambda: entangled_source(0.0))
    ok = src.fidelity >= 1 - 1e-9 and abs(src.probability - 0.5) < 1e-15 and dt < 1.0
    return report(2, ok, f"fidelity {src.fidelity:.15f}, post-selection probability {src.probability!r} "
                         f"({dt * 1e3:.1f} ms)")


# -- 3 ---------------------------------------------------------------------------

def criterion_3():
    xs = default_positions()
    curve, dt = timed(lambda: coincidence_curve("D", "D", xs))
    ys = np.array([p for _, p in curve])
    delay = DelayModel()
    baseline = 1 / 8
    edge_expected = (1 - delay.overlap(xs[-1])) * baseline
    far = coincidence_curve("D", "D", [50.0])[0][1]
    mid = len(xs) // 2
    zero_ok = abs(ys[mid]) < 1e-12 and xs[mid] == 0.0
    rises = bool(np.all(np.diff(ys[mid:]) > 0)) and abs(ys[-1] - edge_expected) < 1e-12 and abs(far - baseline) < 1e-12
    symmetric = np.abs(ys - ys[::-1]).max() < 1e-15
    width = dip_half_width(curve)
    step = xs[1] - xs[0]
    width_ok = abs(width - 0.194) <= step + 1e-12
    ok = zero_ok and rises and symmetric and width_ok and dt < 5.0
    return report(3, ok, f"P(0)={ys[mid]:.1e}, P(far)={far:.6f}, symmetric={symmetric}, "
                         f"half width {width * 1e3:.1f} um (step {step * 1e3:.0f} um), "
                         f"{len(xs)} points in {dt:.3f} s")


# -- 4 ---------------------------------------------------------------------------

def criterion_4():
    ports, probs = [], []
    for b in bsm.BELL_ORDER:
        out = bsm.sort(bsm.bell_state(b))
        port = max(out, key=out.get)
        ports.append(port)
        probs.append(out[port])
    distinct = len(set(ports)) == 4
    worst = 0.0
    for v in haar_states(20, dim=4, seed=2024):
        a, b = bsm.network_sort(v), bsm.sort(v)
        worst = max(worst, max(abs(a[p] - b[p]) for p in bsm.PORTS))
    ok = distinct and min(probs) >= 1 - 1e-9 and worst < 1e-9
    return report(4, ok, f"ports {dict(zip([b.value for b in bsm.BELL_ORDER], ports))}, "
                         f"min probability {min(probs):.12f}, network vs closed form {worst:.1e}")


# -- 5 ---------------------------------------------------------------------------

def criterion_5():
    inputs = list(SIX_POLES) + [InputQubit.from_vector(v) for v in haar_states(20, seed=77)]
    res, dt = timed(lambda: run_teleport(inputs))
    fid_dev = max(abs(f - 1) for f in res.fidelities)
    prob_dev = max(abs(p - 0.25) for r in res.inputs for p in r.outcome_probs.values())
    ok = fid_dev < 1e-9 and prob_dev < 1e-12 and dt < 1.0
    return report(5, ok, f"{len(inputs)} inputs, max |F-1| {fid_dev:.1e}, max |p-1/4| {prob_dev:.1e} "
                         f"({dt * 1e3:.0f} ms)")


# -- 6 ---------------------------------------------------------------------------

def criterion_6():
    shots = 10**5
    ideal = run_teleport(SIX_POLES, shots=shots, seed=6)
    worst = max(abs(100 * n / shots - 25) for r in ideal.inputs for n in r.port_counts.values())
    noisy = run_teleport(SIX_POLES, shots=shots, noise=calibrate(TARGET_SOURCE, TARGET_MEAN), seed=6)
    sim = {row["port"]: row for row in noisy.port_table}
    z = {p: abs(obs - sim[p]["observed_pct"]) / math.hypot(err, sim[p]["stderr_pct"])
         for p, (obs, err) in REFERENCE_PORTS.items()}
    ok = worst <= 0.5 and max(z.values()) <= 3
    zs = ", ".join(f"{p} {v:.2f}" for p, v in z.items())
    return report(6, ok, f"max port deviation {worst:.3f}% over six poles at {shots} shots each; "
                         f"reference port row vs calibrated simulation, sigmas: {zs}")


# -- 7 ---------------------------------------------------------------------------

def criterion_7():
    exact = classical_baseline(shots=None)[0]
    mc, se = classical_baseline(shots=10**5, seed=7)
    ok = exact == 2 / 3 and abs(mc - 2 / 3) <= 0.01
    return report(7, ok, f"exact {exact!r}, Monte-Carlo {mc:.4f} +- {se:.4f}")


# -- 8 ---------------------------------------------------------------------------

def criterion_8():
    noise = calibrate(TARGET_SOURCE)
    rep, dt = timed(lambda: tomo_report(SIX_POLES, TomoConfig(noise=noise)))
    fids = [r.fidelity for r in rep.rows]
    in_band = MEAN_BAND[0] <= rep.mean <= MEAN_BAND[1]
    ok = in_band and min(fids) > 2 / 3 and dt < 60
    return report(8, ok, f"p={noise.depolarizing_p:.5f} (source {source_fidelity(noise):.4f}): mean "
                         f"{rep.mean:.4f} vs band [{MEAN_BAND[0]}, {MEAN_BAND[1]}], min {min(fids):.4f} "
                         f"({dt:.1f} s)")


def two_knob_info():
    noise = calibrate(TARGET_SOURCE, TARGET_MEAN)
    rep = tomo_report(SIX_POLES, TomoConfig(noise=noise))
    fids = [r.fidelity for r in rep.rows]
    return (f"INFO: with the feed-forward error fitted as well (p={noise.depolarizing_p:.5f}, "
            f"q={noise.feedforward_flip_prob:.5f}) the tomography mean is {rep.mean:.4f}, "
            f"min {min(fids):.4f}; exact-model average {average_fidelity(noise):.4f}"), rep, fids


# -- 9 ---------------------------------------------------------------------------

def criterion_9():
    rng = np.random.default_rng(9)
    truths = [projector(q.vector) for q in SIX_POLES]
    truths += [projector(v) for v in haar_states(20, seed=90)]
    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        truths.append(rho / np.trace(rho))
    truths += [(1 - w) * projector(v) + w * np.eye(2) / 2
               for w, v in zip((1e-9, 1e-6, 1e-3, 1e-1), haar_states(4, seed=91))]
    worst = max(trace_distance(mle_reconstruct(exact_counts(r, 10_000)).rho, r) for r in truths)
    psi = pole_vector("D")
    fids = [fidelity(mle_reconstruct(simulate_counts(projector(psi), 10_000, seed=s)).rho, psi) for s in range(100)]
    med = float(np.median(fids))
    physical = True
    for s in range(200):
        counts = rng.integers(0, 3000, 6).astype(float)
        counts[rng.random(6) < 0.3] = 0
        if counts.sum() == 0:
            counts[0] = 1
        physical &= is_density_matrix(mle_reconstruct(counts).rho)
    ok = worst < 1e-6 and med >= 0.99 and physical
    return report(9, ok, f"exact counts, {len(truths)} truths: worst trace distance {worst:.1e}; "
                         f"median fidelity over 100 seeds {med:.5f}; 200 random count sets physical={physical}")


# -- 10 --------------------------------------------------------------------------

def criterion_10(workdir: Path):
    runs = {
        "teleport": ["teleport", "--shots", "20000", "--depolarizing-p", "0.1", "--feedforward-flip-prob", "0.05"],
        "tomo": ["tomo", "--depolarizing-p", "0.0993", "--bootstrap", "20"],
        "hom-scan": ["hom-scan"],
    }
    same = {}
    for name, argv in runs.items():
        j, c = workdir / f"{name}.json", workdir / f"{name}.csv"
        blobs = []
        for _ in range(2):
            code = main([*argv, "--seed", "1234", "--json", str(j), "--csv", str(c)])
            blobs.append((code, j.read_bytes(), c.read_bytes()))
        same[name] = blobs[0] == blobs[1] and blobs[0][0] == 0
    ok = all(same.values())
    return report(10, ok, "byte-identical JSON and CSV on rerun: " + ", ".join(f"{k}={v}" for k, v in same.items()))


# -- pytest entry points ---------------------------------------------------------

@pytest.fixture
def pinned_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def test_criterion_01_beam_splitter_outputs():
    assert criterion_1()


def test_criterion_01_bunching_sign_constraint():
    # any photon-wise linear map a -> u a + v b', b -> w a' + z b gives
    # c_aa c_bb = c_ab c_ba; the reference +,+,+,- pattern would need 1/4 = -1/4
    rng = np.random.default_rng(1)
    for _ in range(50):
        u, v, w, z = rng.normal(size=4) + 1j * rng.normal(size=4)
        c_aa, c_bb, c_ab, c_ba = u * w, v * z, u * z, v * w
        assert c_aa * c_bb == pytest.approx(c_ab * c_ba)
    reference = [0.5, 0.5, 0.5, -0.5]
    assert reference[0] * reference[1] != reference[2] * reference[3]
    for _, (state, kets, _) in bs_cases().items():
        vec, _ = _coeffs(state, kets)
        if len(vec) == 4:
            assert vec[0] * vec[1] == pytest.approx(vec[2] * vec[3], abs=1e-12)


def test_criterion_02_source_generation():
    assert criterion_2()


def test_criterion_03_hom_curves():
    assert criterion_3()


def test_criterion_04_bsm_completeness():
    assert criterion_4()


def test_criterion_05_teleportation_identity():
    assert criterion_5()


def test_criterion_06_port_statistics():
    assert criterion_6()


def test_criterion_07_classical_bound():
    assert criterion_7()


def test_criterion_08_calibrated_reproduction():
    assert criterion_8()


def test_criterion_08_two_knob_model_info():
    line, rep, fids = two_knob_info()
    ACCEPTANCE_LINES[8.5] = line
    print(line)
    assert MEAN_BAND[0] <= rep.mean <= MEAN_BAND[1]
    assert min(fids) > 2 / 3


def test_criterion_09_tomography_estimator():
    assert criterion_9()


def test_criterion_10_reproducibility(tmp_path, pinned_clock):
    assert criterion_10(tmp_path)


if __name__ == "__main__":
    import os
    import tempfile

    os.environ["SOURCE_DATE_EPOCH"] = "1700000000"
    results = [criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(),
               criterion_6(), criterion_7(), criterion_8()]
    print(two_knob_info()[0])
    results.append(criterion_9())
    with tempfile.TemporaryDirectory() as tmp:
        results.append(criterion_10(Path(tmp)))
    sys.exit(0 if all(results) else 1)
