"""Yule-Simon distribution and the Yule-Simon counting process on [0, 1].

The distribution is the heavy-tailed law ``rho * B(k, rho + 1)`` on
{1, 2, ...}; the process is a time-inhomogeneous pure-birth counting process
whose value at time t is 0 with probability 1 - t and, conditionally on being
positive, Yule-Simon distributed.  Samplers are exact and event-based: a path
is represented by its jump times, so its value is known at every t in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln

from .errors import DomainError, NumericalError
from .rng import RngStream

MAX_JUMPS_PER_PATH = 10**7


@dataclass(frozen=True)
class MemoryParameter:
    """Reinforcement probability p in (0, 1); rho = 1/p drives the marked laws."""

    p: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"memory parameter must lie in (0, 1), got {self.p}")

    @property
    def rho(self) -> float:
        return 1.0 / self.p


@dataclass(frozen=True)
class CountingPath:
    """Nondecreasing integer-valued path on [0, 1], stored as its jump times.

    Jumps all have unit height; ``value(t)`` counts jump times <= t, so the
    path is right-continuous and starts at 0.
    """

    jump_times: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self) -> None:
        times = np.asarray(self.jump_times, dtype=float)
        if times.ndim != 1:
            raise DomainError("jump_times must be one-dimensional")
        if times.size and (np.any(np.diff(times) <= 0) or times[0] <= 0 or times[-1] > 1):
            raise DomainError("jump_times must be strictly increasing within (0, 1]")
        object.__setattr__(self, "jump_times", times)

    def value(self, t):
        """Number of jumps up to and including time t (vectorized in t)."""
        v = np.searchsorted(self.jump_times, np.asarray(t, dtype=float), side="right")
        return v if np.ndim(t) else int(v)

    @property
    def terminal(self) -> int:
        return self.jump_times.size

    def __len__(self) -> int:
        return self.jump_times.size


ZERO_PATH = CountingPath(np.empty(0))


def _check_rho(rho: float, minimum: float = 1.0) -> float:
    rho = float(rho)
    if not rho > minimum:
        raise DomainError(f"rho must exceed {minimum}, got {rho}")
    return rho


def ys_pmf(k, rho: float):
    """Probability of value k under the Yule-Simon law with parameter rho.

    Computed as exp(log rho + log B(k, rho + 1)) through log-gamma so that
    very large k does not overflow.  Vectorized in k.
    """
    if not float(rho) > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    k_arr = np.asarray(k)
    if not np.issubdtype(k_arr.dtype, np.integer):
        raise DomainError("k must be integer-valued")
    if np.any(k_arr < 1):
        raise DomainError("k must be >= 1")
    out = np.exp(np.log(rho) + betaln(k_arr.astype(float), rho + 1.0))
    return out if k_arr.ndim else float(out)


def ys_sample(rho: float, rng: RngStream | np.random.Generator, size=None):
    """Draw from the Yule-Simon law via its geometric-mixture representation.

    An exponential variable E with rate rho mixes a geometric variable with
    success probability exp(-E); the marginal is exactly the Yule-Simon law.
    """
    rho = _check_rho(rho)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    e = gen.exponential(scale=1.0 / rho, size=size)
    draws = gen.geometric(np.exp(-e))
    return draws if size is not None else int(draws)


def ys_mean(t: float, rho: float) -> float:
    """Expected process value at time t: rho * t / (rho - 1)."""
    rho = _check_rho(rho)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    return rho * t / (rho - 1.0)


def ys_cross_moment(s: float, t: float, rho: float) -> float:
    """E[Y(s) Y(t)] = rho^2 / ((rho-1)(rho-2)) * s * (t/s)^(1/rho) for s <= t.

    Arguments given out of order are swapped (the product is symmetric).
    Requires rho > 2; below that the second moment is infinite.
    """
    rho = _check_rho(rho, minimum=2.0)
    if s > t:
        s, t = t, s
    if not (0.0 <= s and t <= 1.0):
        raise DomainError("times must lie in [0, 1]")
    if s == 0.0:
        return 0.0
    c = rho * rho / ((rho - 1.0) * (rho - 2.0))
    # s * (t/s)^(1/rho) written as s^(1-1/rho) * t^(1/rho); exponent 1-1/rho > 0.
    return c * s ** (1.0 - 1.0 / rho) * t ** (1.0 / rho)


def ys_abs_moment(q: float, rho: float, t: float = 1.0, kmax: int = 10**6) -> float:
    """E[Y(t)^q] for 0 < q < rho, by series over the pmf plus an integral tail.

    The tail beyond ``kmax`` uses B(k, rho+1) ~ Gamma(rho+1) k^-(rho+1).
    """
    rho = _check_rho(rho, minimum=0.0)
    if not 0.0 < q < rho:
        raise DomainError(f"moment order must lie in (0, rho), got q={q}")
    k = np.arange(1, kmax + 1, dtype=float)
    head = float(np.sum(np.exp(q * np.log(k) + np.log(rho) + betaln(k, rho + 1.0))))
    tail = rho * math.gamma(rho + 1.0) * kmax ** (q - rho) / (rho - q)
    return t * (head + tail)


# ---------------------------------------------------------------------------
# Event-based process samplers
# ---------------------------------------------------------------------------


def ys_process_sample(rho: float, rng: RngStream | np.random.Generator) -> CountingPath:
    """Sample one Yule-Simon path exactly, as the list of its jump times.

    A uniform U places the first jump; thereafter a standard Yule process run
    in logarithmic time yields the m-th jump at U * exp(rho * tau_{m-1}) with
    tau_m = sum_{i<=m} E_i / i.  Jump times beyond 1 are discarded, and the
    time at exactly 1 is kept (the path lives on the closed interval).
    """
    rho = _check_rho(rho)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    t = gen.uniform()
    jumps = []
    m = 1
    while t <= 1.0:
        jumps.append(t)
        if m > MAX_JUMPS_PER_PATH:
            raise NumericalError("jump-count safety cap exceeded; suspect a bad RNG state")
        t *= math.exp(rho * gen.exponential() / m)
        m += 1
    return CountingPath(np.asarray(jumps))


def ys_process_values(
    rho: float,
    times,
    rng: RngStream | np.random.Generator,
    replicas: int,
) -> np.ndarray:
    """Values of ``replicas`` independent event-based paths at sorted grid times.

    Runs the same jump-time recursion as :func:`ys_process_sample`, vectorized
    across paths: iteration m advances every path that still has its m-th jump
    inside [0, 1].  Returns an int64 array of shape (replicas, len(times)).
    """
    rho = _check_rho(rho)
    times = _check_times(times)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    counts = np.zeros((replicas, times.size), dtype=np.int64)
    t = gen.uniform(size=replicas)
    idx = np.flatnonzero(t <= 1.0)  # all of them; kept for loop symmetry
    m = 1
    while idx.size:
        counts[idx] += t[idx, None] <= times[None, :]
        if m > MAX_JUMPS_PER_PATH:
            raise NumericalError("jump-count safety cap exceeded; suspect a bad RNG state")
        t[idx] *= np.exp(rho * gen.exponential(size=idx.size) / m)
        keep = t[idx] <= 1.0
        idx = idx[keep]
        m += 1
    return counts


def ys_joint_values(
    rho: float,
    times,
    rng: RngStream | np.random.Generator,
    replicas: int,
) -> np.ndarray:
    """Joint law of (Y(t_1), ..., Y(t_m)) sampled by Markov bridging.

    Equivalent in law to reading :func:`ys_process_values` at the grid, but
    O(len(times)) per path: the first positive value is geometric with success
    probability (U / t)^(1/rho), and between grid times the birth process
    branches, giving a negative-binomial increment.  This is the fast inner
    loop for Monte Carlo over marks; the event-based sampler above is its
    independent cross-check.
    """
    rho = _check_rho(rho)
    times = _check_times(times)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    u = gen.uniform(size=replicas)
    out = np.zeros((replicas, times.size), dtype=np.int64)
    state = np.zeros(replicas, dtype=np.int64)
    started = np.zeros(replicas, dtype=bool)
    t_prev = None
    for g, t in enumerate(times):
        fresh = ~started & (u <= t)
        if np.any(fresh):
            state[fresh] = gen.geometric((u[fresh] / t) ** (1.0 / rho))
        cont = started
        if t_prev is not None and np.any(cont):
            q = (t_prev / t) ** (1.0 / rho)
            state[cont] += gen.negative_binomial(state[cont], q)
        started |= fresh
        out[:, g] = np.where(started, state, 0)
        t_prev = t
    return out


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("times must be a nonempty 1-d array")
    if np.any(times <= 0) or np.any(times > 1) or np.any(np.diff(times) <= 0):
        raise DomainError("times must be strictly increasing within (0, 1]")
    return times
