"""Synthetic data generation: confounded linear time-series instances.

The generative model is

    X = U 1' + eps_X          (the confounder enters every covariate column)
    Y = X beta + U + eta      (eta i.i.d. centred Gaussian)

where the confounder U is made exactly sparse in the chosen basis: a raw path
is sampled from the configured process, transformed, masked so that only the
coefficients on the confounded index set G survive, and mapped back to the
time domain.  eps_X is sampled independently per covariate column.

Randomness flows through a counter-based (Philox) generator so that replicate
streams can be split reproducibly; ``generate`` with the same config and seed
is bit-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .basis import BasisKind, BasisMatrix, build_basis, inverse_transform, transform
from .errors import ConfigurationError

@dataclass(frozen=True)
class OUProcess:
    """Mean-reverting Ornstein-Uhlenbeck process dV = drift * V dt + sigma dW."""

    sigma: float = 1.0
    drift: float = -0.8

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError(f"OU sigma must be positive, got {self.sigma}")
        if self.drift >= 0:
            raise ConfigurationError(
                f"OU drift must be negative (mean reversion), got {self.drift}"
            )


@dataclass(frozen=True)
class BandLimitedProcess:
    """Finite basis combination with i.i.d. Gaussian coefficients on ``support``.

    ``support=None`` means "the full band {1, ..., n}", bound when the sample
    count is known.  The covariate process must carry energy at every observed
    frequency (otherwise frequencies with an exactly-zero covariate make the
    robust step degenerate), so the default scales with n instead of pinning a
    fixed upper band edge.  An explicit support containing an index above n is
    rejected at generation time rather than silently clipped.
    """

    support: tuple[int, ...] | None = None
    coeff_std: float = 1.0

    def __post_init__(self):
        if self.coeff_std <= 0:
            raise ConfigurationError(
                f"coefficient std must be positive, got {self.coeff_std}"
            )
        if self.support is not None:
            sup = tuple(int(k) for k in self.support)
            if len(sup) == 0:
                raise ConfigurationError("band support must be non-empty")
            if min(sup) < 1:
                raise ConfigurationError("band support indices are 1-based")
            if len(set(sup)) != len(sup):
                raise ConfigurationError("band support indices must be distinct")
            object.__setattr__(self, "support", sup)


ProcessKind = Union[OUProcess, BandLimitedProcess]


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one synthetic instance.

    Defaults mirror the benchmark configuration used throughout: beta = 3,
    horizon 1, a quarter of the frequencies confounded, and full-band
    processes with unit-variance coefficients.
    """

    n: int
    d: int = 1
    beta: float | tuple[float, ...] = 3.0
    horizon: float = 1.0
    sigma_eta2: float = 1.0
    conf_prob: float = 0.25
    eps_process: ProcessKind = field(default_factory=BandLimitedProcess)
    u_process: ProcessKind = field(default_factory=BandLimitedProcess)
    basis_kind: BasisKind = BasisKind.COSINE
    dense_u_noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"n must be positive, got {self.n}")
        if self.d < 1:
            raise ConfigurationError(f"d must be positive, got {self.d}")
        if self.horizon <= 0:
            raise ConfigurationError(f"horizon must be positive, got {self.horizon}")
        if not 0.0 <= self.conf_prob <= 1.0:
            raise ConfigurationError(
                f"conf_prob must lie in [0, 1], got {self.conf_prob}"
            )
        if self.sigma_eta2 < 0:
            raise ConfigurationError(
                f"sigma_eta2 must be non-negative, got {self.sigma_eta2}"
            )
        if self.dense_u_noise_std < 0:
            raise ConfigurationError("dense_u_noise_std must be non-negative")
        object.__setattr__(self, "basis_kind", BasisKind(self.basis_kind))
        if not isinstance(self.beta, (int, float)):
            object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))

    def beta_vector(self) -> np.ndarray:
        if isinstance(self.beta, (int, float)):
            return np.full(self.d, float(self.beta))
        beta = np.asarray(self.beta, dtype=float)
        if beta.shape != (self.d,):
            raise ConfigurationError(
                f"beta must be a scalar or a length-{self.d} vector, got shape {beta.shape}"
            )
        return beta


@dataclass(frozen=True)
class GroundTruth:
    """Latent quantities of a generated instance, kept for scoring.

    When ``dense_u_noise_std`` was zero, the basis coefficients of ``u_time``
    vanish off ``g_set`` (exact sparsity by construction).
    """

    g_set: np.ndarray
    u_time: np.ndarray
    eps_x_time: np.ndarray
    eta_time: np.ndarray
    beta: np.ndarray


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; accepts an int seed or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_ou(
    n: int,
    horizon: float,
    sigma: float,
    drift: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact-discretization stationary OU path at spacing horizon / n.

    The first sample is drawn from the stationary law N(0, sigma^2 / (-2 drift))
    and the recursion is V_{k+1} = phi V_k + zeta_k with phi = exp(drift * dt)
    and Var(zeta) = sigma^2 (1 - phi^2) / (-2 drift), which matches the
    continuous process on the grid exactly (no Euler bias).
    """
    if n < 1:
        raise ConfigurationError(f"n must be positive, got {n}")
    if sigma <= 0 or drift >= 0:
        raise ConfigurationError("need sigma > 0 and drift < 0")
    dt = horizon / n
    phi = math.exp(drift * dt)
    stat_var = sigma * sigma / (-2.0 * drift)
    innov_sd = math.sqrt(stat_var * (1.0 - phi * phi))
    z = rng.normal(0.0, 1.0, n)
    z[0] *= math.sqrt(stat_var)
    z[1:] *= innov_sd
    return lfilter([1.0], [1.0, -phi], z)


def sample_band_limited(
    basis: BasisMatrix,
    support,
    coeff_std: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Random basis combination: coefficients ~ N(0, coeff_std^2) on ``support``.

    ``support`` holds 1-based frequency indices and must fit inside 1..n;
    out-of-range indices are an error, not clipped.
    """
    support = np.asarray(list(support), dtype=int).ravel()
    if support.size == 0:
        raise ValueError("support must be non-empty")
    if support.min() < 1 or support.max() > basis.n:
        raise ValueError(
            f"band support indices must lie in 1..{basis.n}, got range "
            f"[{support.min()}, {support.max()}]"
        )
    coeffs = np.zeros(basis.n)
    coeffs[support - 1] = rng.normal(0.0, coeff_std, support.size)
    return inverse_transform(coeffs, basis)


def _bind_support(process: BandLimitedProcess, n: int) -> np.ndarray:
    if process.support is None:
        return np.arange(1, n + 1)
    return np.asarray(process.support, dtype=int)


def _sample_process(
    process: ProcessKind,
    basis: BasisMatrix,
    horizon: float,
    rng: np.random.Generator,
) -> np.ndarray:
    if isinstance(process, OUProcess):
        return sample_ou(basis.n, horizon, process.sigma, process.drift, rng)
    if isinstance(process, BandLimitedProcess):
        return sample_band_limited(basis, _bind_support(process, basis.n), process.coeff_std, rng)
    raise ConfigurationError(f"unknown process kind: {process!r}")


def confounded_set_size(conf_prob: float, n: int) -> int:
    """Number of confounded frequencies: round(conf_prob * n), half away from zero."""
    return int(math.floor(conf_prob * n + 0.5))


def generate(
    config: SimConfig,
    rng: np.random.Generator | None = None,
    basis: BasisMatrix | None = None,
):
    """Draw one instance; returns ``(x, y, truth)``.

    ``x`` is (n, d), ``y`` is (n,).  The confounded set G is a uniformly
    random subset of the frequencies of size round(conf_prob * n), and the
    confounder is the raw ``u_process`` path projected onto the G-frequencies,
    so its basis coefficients vanish off G exactly.  With
    ``dense_u_noise_std > 0``, i.i.d. Gaussian noise is added to the
    confounder path after sparsification (deliberate model misspecification;
    it enters Y but not X).

    The draw order (G, confounder path, covariate noise columns, eta, dense
    confounder noise) is fixed, so outputs are reproducible bit-for-bit for a
    given seed.  Passing a prebuilt ``basis`` avoids rebuilding the matrix in
    replicate loops; it must match the configured kind and n.
    """
    if rng is None:
        rng = make_rng(config.seed)
    if basis is None:
        basis = build_basis(config.basis_kind, config.n, config.horizon)
    elif basis.kind is not BasisKind(config.basis_kind) or basis.n != config.n:
        raise ConfigurationError(
            f"prebuilt basis ({basis.kind.value}, n={basis.n}) does not match "
            f"config ({BasisKind(config.basis_kind).value}, n={config.n})"
        )
    n, d = config.n, config.d
    beta = config.beta_vector()

    g_size = confounded_set_size(config.conf_prob, n)
    if g_size > 0:
        g_set = np.sort(rng.choice(n, size=g_size, replace=False)) + 1
    else:
        g_set = np.empty(0, dtype=int)

    u_raw = _sample_process(config.u_process, basis, config.horizon, rng)
    coeffs = transform(u_raw, basis)
    mask = np.zeros(n)
    mask[g_set - 1] = 1.0
    u_time = inverse_transform(coeffs * mask, basis)

    eps = np.column_stack(
        [_sample_process(config.eps_process, basis, config.horizon, rng) for _ in range(d)]
    )
    x = u_time[:, None] + eps

    # sigma 0 still consumes n draws, so streams stay aligned across noise levels
    eta = rng.normal(0.0, math.sqrt(config.sigma_eta2), n)
    if config.dense_u_noise_std > 0:
        u_time = u_time + rng.normal(0.0, config.dense_u_noise_std, n)

    y = x @ beta + u_time + eta
    truth = GroundTruth(
        g_set=g_set,
        u_time=u_time,
        eps_x_time=eps,
        eta_time=eta,
        beta=beta,
    )
    return x, y, truth
