"""Noise-reinforced Levy processes.

Construction on [0, 1]: a reinforced Brownian component (exact Gaussian
sampling from its covariance), plus a Poisson series of jumps marked with
independent Yule-Simon counting processes.  Jumps with norm below a
truncation level are dropped and the remaining small-jump sum is compensated
by its mean; the module also evaluates the multidimensional characteristic
function of the process by Monte Carlo over mark paths.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DomainError, InadmissibleError, NumericalError
from .levy_model import (
    FiniteAtomic,
    IsotropicStable,
    JumpMeasure,
    LevyTriplet,
    RadialDensity,
    ZeroJumps,
    bg_index,
    characteristic_exponent,
    is_admissible,
    stable_radial_constant,
    thin,
)
from .rng import BLOCK_SIZE, RngStream, iter_blocks
from .yule_simon import (
    CountingPath,
    MemoryParameter,
    ys_abs_moment,
    ys_joint_values,
    ys_process_sample,
)

# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkedAtom:
    """One atom of the marked Poisson measure: a jump and its usage path."""

    jump: np.ndarray
    mark: CountingPath

    def __post_init__(self) -> None:
        jump = np.atleast_1d(np.asarray(self.jump, dtype=float))
        if not jump.any():
            raise DomainError("atom jump must be nonzero")
        object.__setattr__(self, "jump", jump)


@dataclass(frozen=True)
class PathSample:
    """A d-dimensional path evaluated on a time grid in [0, 1]."""

    times: np.ndarray
    values: np.ndarray  # (len(times), d)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape[0] != times.size:
            raise DomainError("one value row per grid time required")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CfQuery:
    """A finite-dimensional cf query: angles theta_j attached to times t_j.

    ``thetas`` has shape (k,) in dimension 1 or (k, d); repeated times are
    allowed and are merged additively on the internal grid.
    """

    thetas: np.ndarray
    times: np.ndarray

    def __post_init__(self) -> None:
        thetas = np.asarray(self.thetas, dtype=float)
        times = np.asarray(self.times, dtype=float)
        if thetas.ndim == 1:
            thetas = thetas[:, None]
        if times.ndim != 1 or times.size != thetas.shape[0]:
            raise DomainError("one time per theta required")
        if np.any(times < 0) or np.any(times > 1):
            raise DomainError("query times must lie in [0, 1]")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "times", times)

    @property
    def dim(self) -> int:
        return self.thetas.shape[1]

    def on_grid(self, grid_times: np.ndarray) -> np.ndarray:
        """Thetas aligned to a sorted time grid, summing duplicates.

        Times with zero attached weight contribute nothing; t = 0 entries are
        dropped (the process vanishes there).
        """
        grid_times = np.asarray(grid_times, dtype=float)
        out = np.zeros((grid_times.size, self.dim))
        for theta, t in zip(self.thetas, self.times):
            if t == 0.0:
                continue
            idx = np.searchsorted(grid_times, t)
            if idx == grid_times.size or grid_times[idx] != t:
                raise DomainError(f"query time {t} missing from the sampling grid")
            out[idx] += theta
        return out


def query_grid_times(queries: Sequence[CfQuery]) -> np.ndarray:
    """Sorted union of positive query times."""
    times = np.unique(np.concatenate([q.times for q in queries]))
    return times[times > 0]


@dataclass(frozen=True)
class NrlpConfig:
    """A noise-reinforced Levy process ready for sampling.

    Admissibility (p * beta < 1) is enforced at construction; ``grid`` is the
    output time grid and ``truncation_eps`` the small-jump cutoff of the
    Poisson series.
    """

    triplet: LevyTriplet
    p: MemoryParameter
    truncation_eps: float = 1e-4
    grid: np.ndarray = field(default_factory=lambda: np.array([0.5, 1.0]))

    def __post_init__(self) -> None:
        p = self.p if isinstance(self.p, MemoryParameter) else MemoryParameter(float(self.p))
        object.__setattr__(self, "p", p)
        if not is_admissible(p, self.triplet):
            raise InadmissibleError(
                f"p * beta = {p.p * bg_index(self.triplet):.4g} >= 1: "
                "no noise-reinforced process exists for these characteristics"
            )
        if not (0.0 < self.truncation_eps < 1.0):
            raise ConfigError("truncation_eps must lie in (0, 1)")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("grid must be nonempty and strictly increasing")
        if grid[0] < 0 or grid[-1] > 1:
            raise ConfigError("grid must lie within [0, 1]")
        object.__setattr__(self, "grid", grid)

    @property
    def rho(self) -> float:
        return self.p.rho

    @property
    def thinned(self) -> JumpMeasure:
        return thin(self.triplet, self.p)


# ---------------------------------------------------------------------------
# Noise-reinforced Brownian motion
# ---------------------------------------------------------------------------


def nrbm_covariance(p: float, times: np.ndarray) -> np.ndarray:
    """Cov(s, t) = t^p s^(1-p) / (1 - 2p) for s <= t, on the given grid."""
    t = np.asarray(times, dtype=float)
    hi = np.maximum.outer(t, t)
    lo = np.minimum.outer(t, t)
    return hi**p * lo ** (1.0 - p) / (1.0 - 2.0 * p)


def _nrbm_factor(p: float, times: np.ndarray) -> np.ndarray:
    cov = nrbm_covariance(p, times)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * float(np.max(np.diag(cov)))
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "reinforced-Brownian covariance is not positive definite even "
                "after jitter; check the grid for duplicate times"
            ) from exc


def _check_nrbm_p(p: MemoryParameter | float) -> float:
    pv = p.p if isinstance(p, MemoryParameter) else float(p)
    if not 0.0 < pv < 0.5:
        raise InadmissibleError(f"reinforced Brownian motion requires p < 1/2, got {pv}")
    return pv


def nrbm_sample_many(
    p: MemoryParameter | float,
    grid,
    d: int,
    rng: RngStream | np.random.Generator,
    replicas: int,
) -> np.ndarray:
    """Exact draws of reinforced Brownian motion, shape (replicas, len(grid), d).

    Coordinates are independent; each is Gaussian on the grid with the
    reinforced covariance, sampled through a Cholesky factor of the grid
    covariance matrix.  A leading grid time 0 yields value 0.
    """
    pv = _check_nrbm_p(p)
    grid = np.asarray(grid, dtype=float)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    pos = grid > 0
    out = np.zeros((replicas, grid.size, d))
    if np.any(pos):
        factor = _nrbm_factor(pv, grid[pos])
        z = gen.standard_normal((replicas, int(pos.sum()), d))
        out[:, pos, :] = np.einsum("gh,rhd->rgd", factor, z)
    return out


def nrbm_sample(
    p: MemoryParameter | float,
    grid,
    d: int,
    rng: RngStream | np.random.Generator,
) -> PathSample:
    """One reinforced-Brownian path on the grid."""
    values = nrbm_sample_many(p, grid, d, rng, 1)[0]
    return PathSample(np.asarray(grid, dtype=float), values)


# ---------------------------------------------------------------------------
# Jump-measure tail helpers (on the thinned measure)
# ---------------------------------------------------------------------------


def _tail_mass(jm: JumpMeasure, eps: float, d: int) -> float:
    """nu({|x| >= eps}) for the structured families."""
    if isinstance(jm, ZeroJumps):
        return 0.0
    if isinstance(jm, IsotropicStable):
        return jm.scale * stable_radial_constant(jm.alpha, d) * eps**-jm.alpha / jm.alpha
    if isinstance(jm, FiniteAtomic):
        keep = np.linalg.norm(jm.positions, axis=1) >= eps
        return float(jm.masses[keep].sum())
    if isinstance(jm, RadialDensity):
        val, err = quad(jm._eval, eps, np.inf, limit=400)
        if not np.isfinite(val):
            raise ConfigError("radial tail mass is not finite")
        return val
    raise ConfigError(f"unknown jump measure {type(jm).__name__}")


def _uniform_sphere(gen: np.random.Generator, size: int, d: int) -> np.ndarray:
    if d == 1:
        return np.where(gen.random(size) < 0.5, -1.0, 1.0)[:, None]
    z = gen.standard_normal((size, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _sample_tail_jumps(
    jm: JumpMeasure, eps: float, d: int, gen: np.random.Generator, size: int
) -> np.ndarray:
    """Draws from the normalized restriction of nu to {|x| >= eps}."""
    if isinstance(jm, IsotropicStable):
        radii = eps * gen.random(size) ** (-1.0 / jm.alpha)
        return radii[:, None] * _uniform_sphere(gen, size, d)
    if isinstance(jm, FiniteAtomic):
        keep = np.linalg.norm(jm.positions, axis=1) >= eps
        pos, masses = jm.positions[keep], jm.masses[keep]
        idx = gen.choice(masses.size, size=size, p=masses / masses.sum())
        return pos[idx]
    if isinstance(jm, RadialDensity):
        radii = _radial_inverse_cdf(jm, eps, gen.random(size))
        return radii[:, None] * _uniform_sphere(gen, size, d)
    raise ConfigError(f"cannot sample jumps from {type(jm).__name__}")


def _radial_inverse_cdf(jm: RadialDensity, eps: float, u: np.ndarray) -> np.ndarray:
    """Numerical inverse of the normalized radial tail cdf on [eps, inf)."""
    hi = max(10.0 * eps, 1.0)
    total = _tail_mass(jm, eps, 1)
    while quad(jm._eval, hi, np.inf, limit=200)[0] > 1e-10 * total:
        hi *= 10.0
        if hi > 1e18:
            raise NumericalError("radial density tail decays too slowly to invert")
    grid = np.geomspace(eps, hi, 4096)
    dens = np.asarray([jm._eval(r) for r in grid], dtype=float)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    return np.interp(u, cdf, grid)


def _compensation_coefficient(triplet: LevyTriplet, eps: float) -> np.ndarray:
    """Drift coefficient of the compensated band: integral of x over
    {eps <= |x| < 1} against the unthinned measure (the 1/(1-p) mean of the
    mark cancels the thinning factor exactly)."""
    jm = triplet.jump_measure
    if isinstance(jm, (ZeroJumps, IsotropicStable, RadialDensity)):
        return np.zeros(triplet.dim)  # symmetric families: the band mean vanishes
    norms = np.linalg.norm(jm.positions, axis=1)
    band = (norms >= eps) & (norms < 1.0)
    return jm.masses[band] @ jm.positions[band]


# ---------------------------------------------------------------------------
# Sampling the marked Poisson measure and the process
# ---------------------------------------------------------------------------


def sample_atoms(config: NrlpConfig, rng: RngStream | np.random.Generator) -> list[MarkedAtom]:
    """Atoms of the marked Poisson measure with jump norm >= truncation_eps.

    The atom count is Poisson with mean nu({|x| >= eps}) for the thinned
    measure nu = (1 - p) Lambda; each atom carries an independent Yule-Simon
    mark with parameter 1/p.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    nu = config.thinned
    lam = _tail_mass(nu, config.truncation_eps, config.triplet.dim)
    count = int(gen.poisson(lam)) if lam > 0 else 0
    if count == 0:
        return []
    jumps = _sample_tail_jumps(nu, config.truncation_eps, config.triplet.dim, gen, count)
    return [
        MarkedAtom(jumps[i], ys_process_sample(config.rho, gen)) for i in range(count)
    ]


def nrlp_sample(config: NrlpConfig, rng: RngStream | np.random.Generator) -> PathSample:
    """One path of the noise-reinforced process on the configured grid.

    Value at t: M B-hat(t) + t a + sum over atoms of Y_j(t) x_j, with the
    compensation drift subtracted for the band eps <= |x| < 1.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    grid = config.grid
    d = config.triplet.dim
    values = np.outer(grid, config.triplet.drift)
    if config.triplet.has_gaussian:
        bhat = nrbm_sample_many(config.p, grid, d, gen, 1)[0]
        values += bhat @ config.triplet.gaussian_factor.T
    comp = _compensation_coefficient(config.triplet, config.truncation_eps)
    values -= np.outer(grid, comp)
    for atom in sample_atoms(config, gen):
        values += np.outer(atom.mark.value(grid), atom.jump)
    return PathSample(grid, values)


def nrlp_marginals(
    config: NrlpConfig,
    rng: RngStream,
    replicas: int,
    block_size: int = BLOCK_SIZE,
) -> np.ndarray:
    """Values of many independent paths on the grid, shape (replicas, m, d).

    Replicas are generated in fixed-size blocks; block b draws from
    ``rng.generator(b)`` in the order: reinforced-Brownian normals, atom
    counts, jump sizes, mark values.  Results are therefore independent of
    any parallel scheduling of the blocks.
    """
    grid = config.grid
    d = config.triplet.dim
    out = np.empty((replicas, grid.size, d))
    for b, start, count in iter_blocks(replicas, block_size):
        out[start : start + count] = _nrlp_block(config, rng.generator(b), count)
    return out


def _nrlp_block(config: NrlpConfig, gen: np.random.Generator, replicas: int) -> np.ndarray:
    triplet = config.triplet
    grid = config.grid
    d = triplet.dim
    pos = grid > 0
    pos_times = grid[pos]
    values = np.zeros((replicas, grid.size, d))
    values += np.outer(grid, triplet.drift)[None, :, :]
    if triplet.has_gaussian:
        bhat = nrbm_sample_many(config.p, grid, d, gen, replicas)
        values += np.einsum("rgd,ed->rge", bhat, triplet.gaussian_factor)
    comp = _compensation_coefficient(triplet, config.truncation_eps)
    values -= np.outer(grid, comp)[None, :, :]
    if isinstance(triplet.jump_measure, ZeroJumps) or not np.any(pos):
        return values
    nu = config.thinned
    lam = _tail_mass(nu, config.truncation_eps, d)
    counts = gen.poisson(lam, size=replicas)
    total = int(counts.sum())
    if total == 0:
        return values
    rep_ids = np.repeat(np.arange(replicas), counts)
    jumps = _sample_tail_jumps(nu, config.truncation_eps, d, gen, total)
    marks = ys_joint_values(config.rho, pos_times, gen, total)  # (total, m_pos)
    pos_idx = np.flatnonzero(pos)
    for g_local, g in enumerate(pos_idx):
        weights = marks[:, g_local].astype(float)
        for e in range(d):
            values[:, g, e] += np.bincount(
                rep_ids, weights=weights * jumps[:, e], minlength=replicas
            )
    return values


# ---------------------------------------------------------------------------
# Truncation error budget
# ---------------------------------------------------------------------------


def _small_ball_moment(jm: JumpMeasure, q: float, eps: float, d: int) -> float:
    """Integral of |x|^q over {|x| < eps} against the (thinned) measure."""
    if isinstance(jm, ZeroJumps):
        return 0.0
    if isinstance(jm, IsotropicStable):
        if q <= jm.alpha:
            return math.inf
        c = jm.scale * stable_radial_constant(jm.alpha, d)
        return c * eps ** (q - jm.alpha) / (q - jm.alpha)
    if isinstance(jm, FiniteAtomic):
        norms = np.linalg.norm(jm.positions, axis=1)
        small = norms < eps
        return float((jm.masses[small] * norms[small] ** q).sum())
    if isinstance(jm, RadialDensity):
        val, _ = quad(lambda r: r**q * jm._eval(r), 0.0, eps, limit=400)
        return val
    raise ConfigError(f"unknown jump measure {type(jm).__name__}")


def truncation_budget(config: NrlpConfig, q: float | None = None) -> float:
    """Certified q-th-moment bound on the dropped small-jump martingale tail.

    The bound is E[Y(1)^q] * integral of |x|^q over {|x| < eps} against the
    thinned measure, for q between the Blumenthal-Getoor index and rho.  When
    q is omitted the bound is minimized over a grid of admissible q.
    """
    jump_only = LevyTriplet(config.triplet.dim, None, None, config.triplet.jump_measure)
    beta = bg_index(jump_only)
    rho = config.rho
    lo = max(beta, 1.0)
    if q is not None:
        candidates = [q]
    elif lo + 1e-9 >= rho:
        raise DomainError("no admissible moment order: beta >= rho")
    else:
        candidates = list(np.linspace(lo + 0.02 * (rho - lo), rho - 0.02 * (rho - lo), 12))
    best = math.inf
    for qq in candidates:
        if not lo < qq < rho:
            raise DomainError(f"budget order must lie in ({lo}, {rho}), got {qq}")
        val = ys_abs_moment(qq, rho) * _small_ball_moment(
            config.thinned, qq, config.truncation_eps, config.triplet.dim
        )
        best = min(best, val)
    return best


def default_truncation(
    triplet: LevyTriplet,
    p: MemoryParameter | float,
    budget: float = 1e-3,
    floor: float = 1e-6,
) -> float:
    """Largest cutoff meeting the error budget, floored for tractability.

    For heavy small-jump activity (beta close to rho) the budget-satisfying
    cutoff can be astronomically small; the returned value is then the floor
    and the achievable budget should be read off ``truncation_budget``.
    """
    pv = p if isinstance(p, MemoryParameter) else MemoryParameter(float(p))
    jm = thin(triplet, pv)
    if isinstance(jm, (ZeroJumps, FiniteAtomic)):
        return 0.5
    beta = bg_index(LevyTriplet(triplet.dim, None, None, triplet.jump_measure))
    rho = pv.rho
    lo = max(beta, 1.0)
    if lo + 1e-9 >= rho:
        raise DomainError("no admissible moment order: beta >= rho")
    best = 0.0
    for qq in np.linspace(lo + 0.02 * (rho - lo), rho - 0.02 * (rho - lo), 12):
        moment = ys_abs_moment(qq, rho)
        if isinstance(jm, IsotropicStable):
            c = jm.scale * stable_radial_constant(jm.alpha, triplet.dim)
            eps = (budget * (qq - jm.alpha) / (moment * c)) ** (1.0 / (qq - jm.alpha))
        else:  # RadialDensity: bisect on the numerical small-ball moment
            eps = _bisect_eps(lambda e: moment * _small_ball_moment(jm, qq, e, triplet.dim), budget)
        best = max(best, eps)
    if best < floor:
        warnings.warn(
            f"budget {budget} requires cutoff {best:.3g} below the tractability "
            f"floor {floor}; using the floor",
            UserWarning,
            stacklevel=2,
        )
        return floor
    return min(best, 0.5)


def _bisect_eps(fn, budget: float) -> float:
    lo, hi = 1e-12, 0.5
    if fn(hi) <= budget:
        return hi
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if fn(mid) > budget:
            hi = mid
        else:
            lo = mid
    return lo


# ---------------------------------------------------------------------------
# Characteristic functions (Monte Carlo over mark paths)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CfEstimate:
    """Monte Carlo estimate of the reinforced cf at one query."""

    value: complex
    inner_mean: complex  # E[Psi(sum_j Y(t_j) theta_j)]
    inner_se: float
    value_se: float
    replicas: int
    diverged: bool


def reinforced_cf(
    triplet: LevyTriplet,
    p: MemoryParameter | float,
    query: CfQuery,
    mc_replicas: int,
    rng: RngStream | np.random.Generator,
) -> CfEstimate:
    """exp(-(1-p) E[Psi(sum_j Y(t_j) theta_j)]) by Monte Carlo over mark paths.

    The inner expectation is estimated from ``mc_replicas`` exact joint draws
    of the mark at the query times; a running-mean heuristic over doubling
    sample sizes flags divergence (the expected signal when p * beta'' > 1).
    """
    pv = p if isinstance(p, MemoryParameter) else MemoryParameter(float(p))
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    if query.dim != triplet.dim:
        raise DomainError("query dimension does not match the triplet")
    grid = query_grid_times([query])
    if grid.size == 0:
        return CfEstimate(1.0 + 0j, 0j, 0.0, 0.0, mc_replicas, False)
    thetas = query.on_grid(grid)  # (m, d)
    marks = ys_joint_values(pv.rho, grid, gen, mc_replicas)  # (R, m)
    w = marks.astype(float) @ thetas  # (R, d)
    psi = characteristic_exponent(triplet, w)
    mean = complex(psi.mean())
    se = math.sqrt((psi.real.var() + psi.imag.var()) / mc_replicas)
    keep = 1.0 - pv.p
    value = np.exp(-keep * mean)
    diverged = _running_mean_diverges(psi.real)
    return CfEstimate(
        value=complex(value),
        inner_mean=mean,
        inner_se=se,
        value_se=abs(value) * keep * se,
        replicas=mc_replicas,
        diverged=diverged,
    )


def theoretical_cf(
    config: NrlpConfig,
    query: CfQuery,
    mc_replicas: int,
    rng: RngStream | np.random.Generator,
) -> CfEstimate:
    """Reinforced cf of a configured process (untruncated characteristics)."""
    return reinforced_cf(config.triplet, config.p, query, mc_replicas, rng)


def reinforced_cf_exact(
    triplet: LevyTriplet,
    p: MemoryParameter | float,
    query: CfQuery,
) -> complex:
    """Closed-form reinforced cf where the mark moments are available.

    Covers Gaussian-plus-drift triplets in any dimension (the quadratic part
    reduces to first and second mark moments), and additionally isotropic
    stable jumps in dimension 1 when the query involves a single positive
    time, or same-signed angles with unit index.  Raises
    UnsupportedFamilyError outside this domain; the Monte Carlo estimator
    :func:`reinforced_cf` has no such restriction.
    """
    from .errors import UnsupportedFamilyError
    from .yule_simon import ys_cross_moment, ys_mean

    pv = p if isinstance(p, MemoryParameter) else MemoryParameter(float(p))
    rho = pv.rho
    if query.dim != triplet.dim:
        raise DomainError("query dimension does not match the triplet")
    grid = query_grid_times([query])
    if grid.size == 0:
        return 1.0 + 0j
    thetas = query.on_grid(grid)  # (m, d)
    total = 0j
    if triplet.has_gaussian:
        cov = triplet.gaussian_factor @ triplet.gaussian_factor.T
        quad_part = 0.0
        for g, tg in enumerate(grid):
            for h, th in enumerate(grid):
                quad_part += ys_cross_moment(tg, th, rho) * float(thetas[g] @ cov @ thetas[h])
        total += 0.5 * quad_part
    if triplet.drift.any():
        total -= 1j * sum(
            float(triplet.drift @ thetas[g]) * ys_mean(t, rho) for g, t in enumerate(grid)
        )
    jm = triplet.jump_measure
    if isinstance(jm, IsotropicStable):
        if triplet.dim != 1:
            raise UnsupportedFamilyError("exact stable cf restricted to dimension 1")
        th = thetas[:, 0]
        if grid.size == 1:
            total += jm.scale * abs(th[0]) ** jm.alpha * ys_abs_moment(jm.alpha, rho, grid[0])
        elif jm.alpha == 1.0 and (np.all(th >= 0) or np.all(th <= 0)):
            total += jm.scale * sum(abs(t) * ys_mean(tg, rho) for t, tg in zip(th, grid))
        else:
            raise UnsupportedFamilyError(
                "exact stable cf needs a single query time, or unit index with "
                "same-signed angles"
            )
    elif not isinstance(jm, ZeroJumps):
        raise UnsupportedFamilyError(
            f"no closed-form reinforced cf for {type(jm).__name__} jumps"
        )
    return complex(np.exp(-(1.0 - pv.p) * total))


def _running_mean_diverges(values: np.ndarray, ratio: float = 1.5) -> bool:
    """Infinite-mean alarm for the inner expectation.

    Two complementary signals, either of which trips the flag: running means
    over doubling sample sizes that keep growing by more than ``ratio``, and
    a Hill estimate of the tail index of the positive part whose two-sigma
    upper confidence bound falls at or below 1 (the mean exists iff the tail
    index exceeds 1).  The ratio rule alone misses divergent cases whose
    sample mean is dominated by one early huge draw.
    """
    n = values.size
    if n < 64:
        return False
    m1 = values[: n // 4].mean()
    m2 = values[: n // 2].mean()
    m3 = values.mean()
    if m1 > 0 and m2 > 0 and (m2 / m1 > ratio) and (m3 / m2 > ratio):
        return True
    positive = values[values > 0]
    k = max(20, int(math.sqrt(positive.size))) if positive.size else 0
    if k and positive.size > 2 * k:
        top = np.sort(positive)[-k:]
        hill = 1.0 / np.mean(np.log(top / top[0]))
        if hill * (1.0 + 2.0 / math.sqrt(k)) <= 1.0:
            return True
    return False


@dataclass(frozen=True)
class AdditivityReport:
    """Comparison of the summed-characteristics cf with the product of parts."""

    combined: CfEstimate
    parts: tuple[CfEstimate, CfEstimate]
    discrepancy: float
    pooled_se: float

    @property
    def within(self) -> float:
        """Discrepancy in units of the pooled standard error."""
        return self.discrepancy / self.pooled_se if self.pooled_se > 0 else math.inf


def check_additivity(
    triplet1: LevyTriplet,
    triplet2: LevyTriplet,
    p: MemoryParameter | float,
    query: CfQuery,
    rng: RngStream,
    mc_replicas: int = 10**6,
) -> AdditivityReport:
    """Independent-sum property: cf of summed characteristics vs cf product.

    The three cf estimates use independent Monte Carlo streams so the
    discrepancy is a genuine statistical comparison, not an identity.
    """
    from .levy_model import add_triplets

    pv = p if isinstance(p, MemoryParameter) else MemoryParameter(float(p))
    for t in (triplet1, triplet2):
        if not is_admissible(pv, t):
            raise InadmissibleError("both triplets must be admissible for p")
    combined = reinforced_cf(add_triplets(triplet1, triplet2), pv, query, mc_replicas, rng.generator(0))
    part1 = reinforced_cf(triplet1, pv, query, mc_replicas, rng.generator(1))
    part2 = reinforced_cf(triplet2, pv, query, mc_replicas, rng.generator(2))
    product = part1.value * part2.value
    disc = abs(combined.value - product)
    pooled = math.sqrt(
        combined.value_se**2
        + (abs(part2.value) * part1.value_se) ** 2
        + (abs(part1.value) * part2.value_se) ** 2
    )
    return AdditivityReport(combined, (part1, part2), disc, pooled)


@dataclass(frozen=True)
class StabilityReport:
    """Scaling check of the reinforced cf for a stable exponent."""

    scales: np.ndarray
    ratios: np.ndarray  # log|cf(c theta)| / log|cf(theta)|
    expected: np.ndarray  # c^alpha
    base: CfEstimate
    scaled: tuple[CfEstimate, ...]

    @property
    def max_relative_error(self) -> float:
        return float(np.max(np.abs(self.ratios / self.expected - 1.0)))


def check_stability(
    alpha: float,
    p: MemoryParameter | float,
    query: CfQuery,
    rng: RngStream,
    scales: Sequence[float] = (0.5, 2.0, 4.0),
    mc_replicas: int = 10**6,
) -> StabilityReport:
    """log-modulus scaling of the reinforced stable cf: ratio c^alpha.

    Both sides are independent Monte Carlo runs; requires alpha * p < 1.
    """
    pv = p if isinstance(p, MemoryParameter) else MemoryParameter(float(p))
    if alpha * pv.p >= 1.0:
        raise InadmissibleError(f"alpha * p = {alpha * pv.p:.4g} >= 1 is not admissible")
    triplet = LevyTriplet.stable(alpha) if alpha < 2.0 else LevyTriplet.brownian()
    base = reinforced_cf(triplet, pv, query, mc_replicas, rng.generator(0))
    scaled = []
    ratios = []
    for i, c in enumerate(scales):
        scaled_query = CfQuery(c * query.thetas, query.times)
        est = reinforced_cf(triplet, pv, scaled_query, mc_replicas, rng.generator(1 + i))
        scaled.append(est)
        ratios.append(math.log(abs(est.value)) / math.log(abs(base.value)))
    scales_arr = np.asarray(scales, dtype=float)
    return StabilityReport(
        scales_arr, np.asarray(ratios), scales_arr**alpha, base, tuple(scaled)
    )
