"""SNR aggregation and outage probability.

The amplitude sum ``A = sum eta_n`` with ``eta_n = alpha_n beta_n`` is modelled
as gamma distributed with shape ``LAMBDA * N_eff`` and scale ``DELTA``.  These
constants are the moment fit of a product of two unit-scale Rayleigh
amplitudes (mean pi/2, variance (16 - pi^2)/4), which also fixes the fading
law used by the Monte Carlo check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import (
    DomainError,
    LogProbability,
    log_gamma,
    log_reg_lower_incomplete_gamma,
    make_rng,
    rayleigh_sample,
)

LAMBDA = math.pi ** 2 / (16.0 - math.pi ** 2)
DELTA = (16.0 - math.pi ** 2) / (2.0 * math.pi)

# Trials per independently-seeded Monte Carlo block.
MC_BLOCK = 1 << 18
MIN_TRIALS = 1000


def db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return db(p_w) + 30.0 if p_w > 0 else -math.inf


@dataclass(frozen=True)
class SnrResult:
    gamma_bar: float
    gamma_inst: float
    gamma_max: float

    @property
    def gamma_bar_db(self) -> float:
        return db(self.gamma_bar)

    @property
    def gamma_inst_db(self) -> float:
        return db(self.gamma_inst)

    @property
    def gamma_max_db(self) -> float:
        return db(self.gamma_max)


@dataclass(frozen=True)
class OutageResult:
    log_p: LogProbability
    shape: float
    argument: float

    @property
    def probability(self) -> float:
        return self.log_p.linear

    @property
    def log10(self) -> float:
        return self.log_p.log10


def average_snr(p_r: float, noise_power: float) -> float:
    if not noise_power > 0:
        raise DomainError(f"noise power must be positive, got {noise_power}")
    return p_r / noise_power


def instantaneous_snr(gamma_bar: float, amplitudes: Sequence[float],
                      phase_errors: Sequence[float], n_eff: int) -> float:
    """``gamma_bar * |sum eta_n exp(j psi_n)|^2`` over the first ``n_eff`` terms."""
    if n_eff > len(amplitudes) or n_eff > len(phase_errors):
        raise ValueError("amplitude/phase lists shorter than n_eff")
    eta = np.asarray(amplitudes[:n_eff], dtype=float)
    psi = np.asarray(phase_errors[:n_eff], dtype=float)
    if not psi.any():
        s = math.fsum(eta)
        return gamma_bar * (s * s)
    z = complex(np.sum(eta * np.exp(1j * psi)))
    return gamma_bar * (z.real * z.real + z.imag * z.imag)


def snr_result(gamma_bar: float, amplitudes: Sequence[float],
               phase_errors: Sequence[float], n_eff: int) -> SnrResult:
    a = math.fsum(amplitudes[:n_eff])
    return SnrResult(
        gamma_bar,
        instantaneous_snr(gamma_bar, amplitudes, phase_errors, n_eff),
        gamma_bar * (a * a),
    )


def _check(gamma_th: float, gamma_bar: float, n_eff: int) -> None:
    if not gamma_th > 0:
        raise DomainError(f"gamma_th must be positive, got {gamma_th}")
    if not gamma_bar > 0:
        raise DomainError(f"gamma_bar must be positive, got {gamma_bar}")
    if n_eff < 1:
        raise DomainError(f"n_eff must be >= 1, got {n_eff}")


def outage_probability(gamma_th: float, gamma_bar: float, n_eff: int) -> OutageResult:
    """Gamma-approximation CDF of the maximum SNR at ``gamma_th``."""
    _check(gamma_th, gamma_bar, n_eff)
    shape = LAMBDA * n_eff
    arg = math.sqrt(gamma_th / (DELTA * DELTA * gamma_bar))
    return OutageResult(log_reg_lower_incomplete_gamma(shape, arg), shape, arg)


def outage_asymptotic(gamma_th: float, gamma_bar: float, n_eff: int) -> OutageResult:
    """High-SNR scaling law ``((gamma_bar D / gamma_th) G(s)^(-2/s))^(-s/2)``.

    This captures the slope (diversity order ``s/2`` on log-log axes) rather
    than the absolute level, and is capped at probability 1.
    """
    _check(gamma_th, gamma_bar, n_eff)
    shape = LAMBDA * n_eff
    ln_p = 0.5 * shape * math.log(gamma_th / (gamma_bar * DELTA)) + log_gamma(shape)
    arg = math.sqrt(gamma_th / (DELTA * DELTA * gamma_bar))
    return OutageResult(LogProbability(min(ln_p, 0.0)), shape, arg)


def _amplitude_sums(seed: int, block: int, size: int, n_eff: int) -> np.ndarray:
    rng = make_rng(seed, block)
    total = np.zeros(size)
    for _ in range(n_eff):
        total += rayleigh_sample(1.0, rng, size) * rayleigh_sample(1.0, rng, size)
    return total


def outage_monte_carlo_many(gamma_th: Sequence[float], gamma_bar: float, n_eff: int,
                            trials: int, seed: int, workers: int = 1
                            ) -> list[tuple[float, float]]:
    """Monte Carlo outage estimates for several thresholds sharing one sample set.

    Trials are cut into fixed blocks of ``MC_BLOCK``; block ``k`` draws from the
    substream ``(seed, k)``.  The estimate therefore does not depend on
    ``workers``.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if n_eff < 1:
        raise DomainError("n_eff must be >= 1")
    # Compare on the amplitude scale: gamma_bar A^2 <= th  <=>  A <= sqrt(th / gamma_bar).
    limits = np.sqrt(np.asarray(gamma_th, dtype=float) / gamma_bar)
    blocks = [(k, min(MC_BLOCK, trials - k * MC_BLOCK))
              for k in range(-(-trials // MC_BLOCK))]

    def count(job):
        k, size = job
        a = np.sort(_amplitude_sums(seed, k, size, n_eff))
        return np.searchsorted(a, limits, side="right")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(count, blocks))
    else:
        counts = [count(b) for b in blocks]
    hits = np.sum(counts, axis=0)
    out = []
    for h in hits:
        p = h / trials
        out.append((float(p), math.sqrt(p * (1.0 - p) / trials)))
    return out


def outage_monte_carlo(gamma_th: float, gamma_bar: float, n_eff: int, trials: int,
                       seed: int, workers: int = 1) -> tuple[float, float]:
    """Empirical ``P(gamma_bar (sum alpha_n beta_n)^2 <= gamma_th)`` and its std. error."""
    return outage_monte_carlo_many([gamma_th], gamma_bar, n_eff, trials, seed, workers)[0]


def double_rayleigh_samples(n: int, seed: int) -> np.ndarray:
    """``n`` draws of eta = alpha * beta with alpha, beta ~ Rayleigh(1)."""
    rng = make_rng(seed)
    return rayleigh_sample(1.0, rng, n) * rayleigh_sample(1.0, rng, n)
