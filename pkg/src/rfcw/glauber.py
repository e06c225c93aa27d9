"""Glauber (single-site heat-bath) sampler of the quenched Gibbs measure.

The chain resamples a uniformly chosen site i from its exact conditional law:
sigma_i becomes +1 with probability sigmoid(2*beta*(S_wo/n + h_i)), where
S_wo is the total magnetization excluding site i.  The Hamiltonian keeps its
i=j self-interaction terms; they are constant and cancel in the conditional,
so S_wo (not S_wo + sigma_i) is the correct local field.  Randomness comes
from the Philox counter-based generator: the chain for seed s consumes the
stream Philox(key=s).jumped(1 + chain_index), a block the field sampler
(which uses the unjumped stream) can never reach, so field disorder and
chain noise are independent and every run is reproducible bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fields import FieldRealization

__all__ = [
    "ChainConfig",
    "EmpiricalPMF",
    "ParityError",
    "run_glauber",
    "run_chains",
    "empirical_pmf",
    "conditional_up_probability",
    "tv_distance",
]

_CHUNK_UPDATES = 1 << 20


class ParityError(ValueError):
    """A magnetization sample is off the valid lattice for this n."""


@dataclass(frozen=True, eq=False)
class ChainConfig:
    """Run lengths are in sweeps (n single-site updates each); ``thin`` is in
    single-site updates, so the default thin = n records once per sweep."""

    n: int
    beta: float
    fields: FieldRealization
    sweeps: int
    burn_in: int
    thin: int
    seed: int

    def __post_init__(self):
        if self.n != self.fields.n:
            raise ValueError(f"n = {self.n} does not match fields.n = {self.fields.n}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.burn_in < 0 or self.sweeps <= self.burn_in:
            raise ValueError("need sweeps > burn_in >= 0")
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")

    @classmethod
    def with_defaults(
        cls,
        n: int,
        beta: float,
        fields: FieldRealization,
        seed: int,
        sweeps: int,
        burn_in: int | None = None,
        thin: int | None = None,
    ) -> "ChainConfig":
        # Mean-field mixing away from criticality is O(n log n) updates;
        # near-critical runs should raise burn_in explicitly.
        if burn_in is None:
            burn_in = 10 * n if sweeps > 10 * n else sweeps // 2
        return cls(
            n=n,
            beta=beta,
            fields=fields,
            sweeps=sweeps,
            burn_in=burn_in,
            thin=n if thin is None else thin,
            seed=seed,
        )


def conditional_up_probability(beta: float, n: int, s_without: int, h_i: float) -> float:
    """Heat-bath probability that a resampled site lands on +1."""
    arg = 2.0 * beta * (s_without / n + h_i)
    if arg >= 745.0:
        return 1.0
    if arg <= -745.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-arg))


def _chain_rng(seed: int, chain_index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(1 + chain_index))


def run_glauber(cfg: ChainConfig, chain_index: int = 0) -> np.ndarray:
    """Thinned post-burn-in series of S_n. Deterministic given (cfg, index)."""
    rng = _chain_rng(cfg.seed, chain_index)
    n = cfg.n
    spins = np.where(rng.random(n) < 0.5, np.int64(1), np.int64(-1))
    s_tot = int(spins.sum())
    bh2 = np.ascontiguousarray(2.0 * cfg.beta * cfg.fields.values)
    cbn = 2.0 * cfg.beta / n

    burn_updates = cfg.burn_in * n
    rec_updates = (cfg.sweeps - cfg.burn_in) * n
    n_keep = rec_updates // cfg.thin
    out = np.empty(n_keep, dtype=np.int64)
    kernel = _kernels.glauber_chunk

    def drive(total, thin, counter, out_arr, out_pos):
        nonlocal s_tot
        done = 0
        while done < total:
            c = min(_CHUNK_UPDATES, total - done)
            sites = rng.integers(0, n, size=c, dtype=np.int64)
            u = rng.random(c)
            s_tot, counter, out_pos = kernel(
                spins, s_tot, bh2, cbn, sites, u, thin, counter, out_arr, out_pos
            )
            done += c
        return counter, out_pos

    drive(burn_updates, burn_updates + 1, 0, np.empty(0, dtype=np.int64), 0)
    _, filled = drive(rec_updates, cfg.thin, 0, out, 0)
    return out[:filled]


def run_chains(cfg: ChainConfig, chains: int, max_workers: int = 1) -> list[np.ndarray]:
    """Independent chains (seed-split); results ordered by chain index, so the
    output is the same whatever the worker count."""
    if chains < 1:
        raise ValueError(f"chains must be >= 1, got {chains}")
    if max_workers <= 1 or chains == 1:
        return [run_glauber(cfg, i) for i in range(chains)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run_glauber, cfg, i) for i in range(chains)]
        return [f.result() for f in futures]


@dataclass(frozen=True, eq=False)
class EmpiricalPMF:
    """Relative frequencies on the magnetization lattice with Wilson-interval
    (z=1) standard errors; zero-count bins carry a log-probability upper
    bound instead of an estimate and are flagged."""

    n: int
    s: np.ndarray
    counts: np.ndarray
    p_hat: np.ndarray
    log_p: np.ndarray
    se: np.ndarray
    zero_bin: np.ndarray
    n_samples: int


def empirical_pmf(samples: np.ndarray, n: int) -> EmpiricalPMF:
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ValueError("samples must be non-empty")
    if np.any(np.abs(samples) > n) or np.any((samples + n) % 2 != 0):
        raise ParityError("sample off the lattice {-n, -n+2, ..., n}")
    s = np.arange(-n, n + 1, 2, dtype=np.int64)
    idx = (samples + n) // 2
    counts = np.bincount(idx, minlength=s.size).astype(np.int64)
    big_n = samples.size
    p_hat = counts / big_n
    denom = 1.0 + 1.0 / big_n
    se = np.sqrt(p_hat * (1.0 - p_hat) / big_n + 1.0 / (4.0 * big_n**2)) / denom
    zero = counts == 0
    with np.errstate(divide="ignore"):
        log_p = np.log(p_hat)
    log_p[zero] = -math.log(big_n + 1.0)  # Wilson z=1 upper bound
    return EmpiricalPMF(
        n=n,
        s=s,
        counts=counts,
        p_hat=p_hat,
        log_p=log_p,
        se=se,
        zero_bin=zero,
        n_samples=big_n,
    )


def tv_distance(emp: EmpiricalPMF, log_p_exact: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(emp.p_hat - np.exp(log_p_exact))))
