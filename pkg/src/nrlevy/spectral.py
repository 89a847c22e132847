"""Exact mixture sampler for reinforced symmetric-stable jump sums.

Group the atoms of the marked Poisson measure by the integer vector of mark
values on the output grid.  For a symmetric stable jump measure, the summed
jump sizes within one group form a symmetric alpha-stable variable whose
scale is the group probability times the measure scale, so the whole jump
part of the reinforced process on an m-point grid is

    sum over mark vectors v of  v * Z_v,   Z_v ~ SaS(P(v) * scale),

with independent Z_v.  The mixture is evaluated by enumerating mark vectors
exactly up to a bound, collapsing larger vectors radially (exact, by
stability) within narrow direction bins, and closing the far tail with its
limiting direction.  This avoids the epsilon-truncated series entirely: its
cost is independent of the small-jump activity, which makes indices close to
the critical one tractable.

Only grids with one or two positive times are supported; the generic series
sampler covers longer grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, gammaln

from .errors import DomainError, UnsupportedFamilyError
from .levy_model import IsotropicStable, symmetric_stable_std
from .noise_reinforced import NrlpConfig, nrbm_sample_many
from .rng import BLOCK_SIZE, RngStream, iter_blocks


def _ys_marginal_pmf(k: np.ndarray, rho: float, t: float) -> np.ndarray:
    """P(Y(t) = k) for k >= 1."""
    return t * np.exp(np.log(rho) + betaln(k.astype(float), rho + 1.0))


def _ys_tail_alpha_mass(alpha: float, rho: float, t: float, kmin: int, ksum: int = 10**6) -> float:
    """t * sum_{k > kmin} k^alpha * rho * B(k, rho+1), with an integral closer."""
    k = np.arange(kmin + 1, ksum + 1, dtype=float)
    head = float(np.sum(np.exp(alpha * np.log(k) + np.log(rho) + betaln(k, rho + 1.0))))
    tail = rho * math.gamma(rho + 1.0) * ksum ** (alpha - rho) / (rho - alpha)
    return t * (head + tail)


@dataclass(frozen=True)
class StableMarkMixture:
    """Precomputed direction/weight table for the reinforced stable jump part.

    ``directions`` has shape (bins, m) and ``weights`` the per-bin stable
    scales gamma_b; a sample of the jump part at the grid times is
    sum_b gamma_b^(1/alpha) * directions[b] * S_b with S_b independent
    standard symmetric alpha-stable draws.
    """

    alpha: float
    times: np.ndarray
    directions: np.ndarray
    weights: np.ndarray

    def sample(self, gen: np.random.Generator, replicas: int) -> np.ndarray:
        s = symmetric_stable_std(self.alpha, gen, (replicas, self.weights.size))
        return (s * self.weights ** (1.0 / self.alpha)) @ self.directions

    def exponent(self, thetas: np.ndarray) -> np.ndarray:
        """Jump-part exponent sum_b gamma_b |theta . w_b|^alpha, batched."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        dots = np.abs(thetas @ self.directions.T)
        return dots**self.alpha @ self.weights


def build_stable_mixture(
    alpha: float,
    scale_nu: float,
    rho: float,
    times,
    exact_max: int = 32,
    enum_max: int = 4000,
    dir_bins: int = 256,
) -> StableMarkMixture:
    """Tabulate the mark-vector mixture on a one- or two-point grid.

    Vectors with terminal value <= ``exact_max`` become singleton bins (their
    stable collapse is exact); terminal values up to ``enum_max`` are grouped
    into ``dir_bins`` direction bins with mass-weighted representative
    directions; beyond that the mixture is closed with the limiting direction
    profile, whose weight comes from the exact marginal tail.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(np.diff(times) <= 0) or times[-1] > 1:
        raise DomainError("grid times must be strictly increasing in (0, 1]")
    if not 0.0 < alpha < rho:
        raise DomainError("stable mixture needs alpha < rho (admissibility)")
    if times.size == 1:
        gamma_total = scale_nu * _ys_tail_alpha_mass(alpha, rho, float(times[0]), 0)
        return StableMarkMixture(
            alpha, times, np.ones((1, 1)), np.asarray([gamma_total])
        )
    if times.size != 2:
        raise UnsupportedFamilyError(
            "stable mixture sampling is tabulated for grids of one or two times; "
            "use the series sampler for longer grids"
        )
    t1, t2 = float(times[0]), float(times[1])
    q = (t1 / t2) ** (1.0 / rho)
    log_q, log_1mq = np.log(q), np.log1p(-q)

    dirs: list[np.ndarray] = []
    weights: list[float] = []
    bin_gamma = np.zeros(dir_bins)
    bin_dir = np.zeros((dir_bins, 2))

    k_all = np.arange(1, enum_max + 1)
    for j in range(0, enum_max + 1):
        if j == 0:
            k = k_all
            prob = _ys_marginal_pmf(k, rho, t2) * (
                1.0 - betainc(rho + 1.0, k.astype(float), q)
            )
        else:
            k = np.arange(j, enum_max + 1)
            nb = k - j
            log_nb = (
                gammaln(k.astype(float))
                - gammaln(float(j))
                - gammaln(nb.astype(float) + 1.0)
                + j * log_q
                + nb * log_1mq
            )
            prob = _ys_marginal_pmf(np.asarray([j]), rho, t1)[0] * np.exp(log_nb)
        norms = np.hypot(float(j), k.astype(float))
        gamma_cells = scale_nu * prob * norms**alpha
        u = np.stack([np.full(k.size, float(j)) / norms, k / norms], axis=1)
        exact = k <= exact_max
        for idx in np.flatnonzero(exact):
            dirs.append(u[idx])
            weights.append(float(gamma_cells[idx]))
        rest = ~exact
        if np.any(rest):
            phi = np.full(k.size, float(j)) / k  # ratio in [0, 1]
            bins = np.minimum((phi[rest] * dir_bins).astype(int), dir_bins - 1)
            np.add.at(bin_gamma, bins, gamma_cells[rest])
            np.add.at(bin_dir, bins, gamma_cells[rest, None] * u[rest])

    used = bin_gamma > 0
    bin_dirs = bin_dir[used] / bin_gamma[used, None]

    tail_gamma = scale_nu * (1.0 + q * q) ** (alpha / 2.0) * _ys_tail_alpha_mass(
        alpha, rho, t2, enum_max
    )
    tail_dir = np.asarray([q, 1.0]) / np.hypot(q, 1.0)

    directions = np.vstack([np.asarray(dirs), bin_dirs, tail_dir[None, :]])
    gamma = np.concatenate([np.asarray(weights), bin_gamma[used], [tail_gamma]])
    return StableMarkMixture(alpha, times, directions, gamma)


def stable_mixture_for(config: NrlpConfig, exact_max: int = 32, enum_max: int = 4000,
                       dir_bins: int = 256) -> StableMarkMixture:
    """Mixture table for the jump part of a stable-jump configuration."""
    jm = config.triplet.jump_measure
    if not isinstance(jm, IsotropicStable) or config.triplet.dim != 1:
        raise UnsupportedFamilyError(
            "the mixture sampler covers one-dimensional isotropic stable jumps"
        )
    pos = config.grid[config.grid > 0]
    scale_nu = (1.0 - config.p.p) * jm.scale
    return build_stable_mixture(
        jm.alpha, scale_nu, config.rho, pos, exact_max, enum_max, dir_bins
    )


def stable_nrlp_marginals(
    config: NrlpConfig,
    rng: RngStream,
    replicas: int,
    block_size: int = BLOCK_SIZE,
    mixture: StableMarkMixture | None = None,
) -> np.ndarray:
    """Marginals of the reinforced process via the mark mixture, (R, m, 1).

    Law-equivalent to :func:`nrlevy.noise_reinforced.nrlp_marginals` on the
    positive grid times with the truncation removed; cost per replica is the
    number of mixture bins.  Gaussian and drift components are added exactly
    as in the series sampler.  Block b draws from ``rng.generator(b)``.
    """
    if mixture is None:
        mixture = stable_mixture_for(config)
    grid = config.grid
    pos = grid > 0
    out = np.zeros((replicas, grid.size, 1))
    out += np.outer(grid, config.triplet.drift)[None, :, :]
    for b, start, count in iter_blocks(replicas, block_size):
        gen = rng.generator(b)
        if config.triplet.has_gaussian:
            bhat = nrbm_sample_many(config.p, grid, 1, gen, count)
            out[start : start + count] += np.einsum(
                "rgd,ed->rge", bhat, config.triplet.gaussian_factor
            )
        out[start : start + count, pos, 0] += mixture.sample(gen, count)
    return out
