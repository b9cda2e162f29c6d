"""Six-projector tomography of a single OAM qubit.

Counts are simulated on the over-complete set ``plus, minus, D, A, R, L``
(three mutually unbiased bases) and inverted by a maximum-likelihood RrhoR
iteration. With the same number of trials per basis, the Poisson and
per-basis multinomial likelihoods share their maximiser, so a single kernel
serves both count models.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .hom import DelayModel, entangled_source
from .qubits import OAM_BASIS_LABELS, POLE_VECTORS, SIX_POLES, InputQubit, is_density_matrix
from .seeding import stream
from .teleport import IDEAL, NoiseConfig, run_teleport

PROJECTOR_LABELS = OAM_BASIS_LABELS
PROJECTOR_VECTORS = np.array([POLE_VECTORS[k] for k in PROJECTOR_LABELS])
TOL = 1e-10
MAX_ITER = 10_000


class NonConvergenceError(RuntimeError):
    def __init__(self, result: MLEResult):
        super().__init__(
            f"MLE did not converge in {result.iterations} iterations "
            f"(log-likelihood {result.log_likelihood:.6g})"
        )
        self.result = result


@dataclass(frozen=True)
class CountRecord:
    counts: np.ndarray  # one entry per projector, PROJECTOR_LABELS order
    shots_per_basis: int
    seed: int | None = None
    labels: tuple[str, ...] = PROJECTOR_LABELS

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape != (len(self.labels),) or (counts < 0).any():
            raise ValueError("counts must be one non-negative value per projector")
        object.__setattr__(self, "counts", counts)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.counts.tolist()))


@dataclass(frozen=True)
class MLEResult:
    rho: np.ndarray
    iterations: int
    log_likelihood: float
    converged: bool
    backend: str = field(default=_backend.BACKEND)


def expected_counts(rho: np.ndarray, shots_per_basis: int) -> np.ndarray:
    probs = np.real(np.einsum("ki,ij,kj->k", PROJECTOR_VECTORS.conj(), rho, PROJECTOR_VECTORS))
    return shots_per_basis * np.clip(probs, 0.0, None)


def simulate_counts(
    rho: np.ndarray,
    shots_per_basis: int,
    poisson: bool = True,
    seed: int | np.random.Generator | None = None,
) -> CountRecord:
    """Draw counts with mean ``shots * Tr(rho Pi)`` per projector.

    ``poisson=False`` draws a binomial split of exactly ``shots`` trials per
    basis instead.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mean = expected_counts(rho, shots_per_basis)
    if poisson:
        counts = rng.poisson(mean).astype(float)
    else:
        counts = np.empty(len(mean))
        for k in range(0, len(mean), 2):
            p = min(max(mean[k] / shots_per_basis, 0.0), 1.0)
            counts[k] = rng.binomial(shots_per_basis, p)
            counts[k + 1] = shots_per_basis - counts[k]
    return CountRecord(counts, shots_per_basis, seed if isinstance(seed, int) else None)


def exact_counts(rho: np.ndarray, shots_per_basis: int) -> CountRecord:
    """Noise-free counts (the expectation values, not rounded)."""
    return CountRecord(expected_counts(rho, shots_per_basis), shots_per_basis)


def mle_reconstruct(
    counts: CountRecord | np.ndarray,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    strict: bool = False,
    backend: str | None = None,
) -> MLEResult:
    """Maximum-likelihood density matrix from six-projector counts.

    Iterates RrhoR from the maximally mixed state until the log-likelihood
    gains less than ``tol`` per step or ``max_iter`` steps are taken. With
    ``strict=True`` a non-converged fit raises :class:`NonConvergenceError`
    (the last iterate is attached); otherwise ``converged`` is False.
    """
    n = counts.counts if isinstance(counts, CountRecord) else np.asarray(counts, dtype=float)
    kernel = _backend.BACKENDS[backend] if backend else _backend.rrho_mle
    rho, it, ll, ok = kernel(PROJECTOR_VECTORS, n, tol, max_iter)
    rho = np.array(rho, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    result = MLEResult(rho, it, ll, ok, backend or _backend.BACKEND)
    if strict and not ok:
        raise NonConvergenceError(result)
    return result


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """``<psi|rho|psi>`` for a normalized ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    val = psi.conj() @ rho @ psi
    if abs(val.imag) > 1e-9:
        raise ValueError(f"fidelity has imaginary part {val.imag}; rho is not Hermitian")
    return float(val.real)


def closed_form_diagonal(counts: CountRecord) -> np.ndarray:
    """ML estimate when the data carry no coherence information
    (``n_D = n_A`` and ``n_R = n_L``): populations from the plus/minus pair."""
    c = counts.as_dict()
    p = c["plus"] / (c["plus"] + c["minus"])
    return np.diag([p, 1 - p]).astype(complex)


def bootstrap_fidelity(
    rho_hat: np.ndarray,
    psi: np.ndarray,
    shots_per_basis: int,
    resamples: int = 200,
    poisson: bool = True,
    seed: int | np.random.Generator | None = None,
) -> tuple[float, float]:
    """Parametric bootstrap of the fidelity estimate: resample counts from
    ``rho_hat``, refit, and return ``(mean, std)`` of the refitted fidelities."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    fids = np.empty(resamples)
    for k in range(resamples):
        rec = simulate_counts(rho_hat, shots_per_basis, poisson, rng)
        fids[k] = fidelity(mle_reconstruct(rec).rho, psi)
    return float(fids.mean()), float(fids.std(ddof=1)) if resamples > 1 else 0.0


def check_physical(rho: np.ndarray) -> None:
    if not is_density_matrix(rho):
        raise ValueError("reconstruction is not a valid density matrix")


@dataclass(frozen=True)
class TomoConfig:
    noise: NoiseConfig = IDEAL
    delay: DelayModel | None = None
    shots_per_basis: int = 10_000
    poisson: bool = True
    teleport_shots: int | None = None
    bootstrap: int = 200
    seed: int = 0
    ell0: int = 1
    max_iter: int = MAX_ITER


@dataclass
class TomoRow:
    name: str
    rho: np.ndarray
    fidelity: float
    stderr: float
    model_fidelity: float
    counts: CountRecord
    iterations: int
    converged: bool


@dataclass
class TomoReport:
    rows: list[TomoRow]
    source_fidelity: float
    config: TomoConfig

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([r.fidelity for r in self.rows])

    @property
    def mean(self) -> float:
        return float(self.fidelities.mean())

    @property
    def std(self) -> float:
        return float(self.fidelities.std(ddof=1)) if len(self.rows) > 1 else 0.0


def tomo_report(inputs: Sequence[InputQubit] = SIX_POLES, config: TomoConfig = TomoConfig(),
                strict: bool = False) -> TomoReport:
    """Teleport each input, tomograph Bob's qubit and score the estimate.

    Counts for input ``i`` come from the stream ``(seed, 1, i)`` and its
    bootstrap from ``(seed, 2, i)``, so rows are independent of each other.
    """
    inputs = list(inputs)
    tele = run_teleport(inputs, config.teleport_shots, config.noise, config.seed,
                        config.delay, config.ell0)
    src = entangled_source(config.noise.source_delay_mm, config.delay,
                           config.noise.depolarizing_p, config.ell0)
    rows = []
    for i, res in enumerate(tele.inputs):
        rec = simulate_counts(res.rho_out, config.shots_per_basis, config.poisson,
                              stream(config.seed, 1, i))
        rec = CountRecord(rec.counts, rec.shots_per_basis, config.seed)
        fit = mle_reconstruct(rec, max_iter=config.max_iter, strict=strict)
        fid = fidelity(fit.rho, res.vector)
        stderr = 0.0
        if config.bootstrap > 1:
            _, stderr = bootstrap_fidelity(fit.rho, res.vector, config.shots_per_basis,
                                           config.bootstrap, config.poisson, stream(config.seed, 2, i))
        rows.append(TomoRow(res.name, fit.rho, fid, stderr, res.fidelity, rec,
                            fit.iterations, fit.converged))
    return TomoReport(rows, src.fidelity, config)
