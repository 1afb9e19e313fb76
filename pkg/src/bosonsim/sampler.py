"""Metropolis sampling of output configurations under a truncated distribution.

The chain walks over non-collisional output occupations with a symmetric
proposal and the standard accept ratio min(1, target(s') / target(s)).  The
target weight of an output is its order-k truncated probability clamped at
zero: truncation can produce small negative values, and a Metropolis target
must be non-negative, so clamping is the policy here (the probability layer
reports truncated values unclamped).  The chain therefore samples the
clamped, implicitly normalized truncated distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .probability import ExperimentInstance, output_configurations, truncated_probability

__all__ = [
    "DegenerateTargetError",
    "ChainConfig",
    "metropolis_sample",
    "output_distribution",
]

_MAX_ZERO_STREAK = 10_000
_ENUMERATION_LIMIT = 100_000
_INDEPENDENCE_PROPOSAL_MAX_MODES = 64


class DegenerateTargetError(RuntimeError):
    """The chain kept proposing states of zero target weight."""


@dataclass
class ChainConfig:
    """Metropolis chain parameters.

    ``proposal`` is "uniform_noncollisional" (independence proposals,
    default for m <= 64) or "single_mode_swap" (move one photon to an empty
    mode, default above that); ``None`` picks by mode count.  ``thinning``
    keeps every thinning-th state after ``burn_in`` steps.
    """

    num_samples: int
    burn_in: int = 1000
    thinning: int = 10
    proposal: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")
        if self.proposal not in (None, "uniform_noncollisional", "single_mode_swap"):
            raise ValueError(f"unknown proposal {self.proposal!r}")

    def resolved_proposal(self, m: int) -> str:
        if self.proposal is not None:
            return self.proposal
        if m <= _INDEPENDENCE_PROPOSAL_MAX_MODES:
            return "uniform_noncollisional"
        return "single_mode_swap"


def _validate_input(unitary, input_occupation):
    m = np.asarray(unitary).shape[0]
    occ = tuple(int(c) for c in input_occupation)
    if any(c not in (0, 1) for c in occ):
        raise ValueError("sampler requires a non-collisional input")
    n = sum(occ)
    if n < 1:
        raise ValueError("need at least one photon")
    if n > m:
        raise ValueError("need at least as many modes as photons")
    return m, n, occ


def _occupation_from_modes(modes, m: int) -> tuple[int, ...]:
    occ = [0] * m
    for mode in modes:
        occ[mode] = 1
    return tuple(occ)


def _clamped_target(inst: ExperimentInstance, k: int, strategy: str) -> float:
    return max(truncated_probability(inst, k, strategy).total, 0.0)


def _metropolis_chain(target, propose, initial, rng, num_samples, burn_in, thinning):
    """Generic Metropolis walk for a symmetric proposal kernel.

    Accepts a move with probability min(1, target(s') / target(s));
    zero-weight proposals are rejected, and a run of more than 10^4 of them
    in a row (a chain stranded in a dead region) aborts.
    """
    current = initial
    current_weight = target(current)
    samples = []
    zero_streak = 0
    total_steps = burn_in + num_samples * thinning
    for step in range(total_steps):
        candidate = propose(current)
        weight = target(candidate)
        if weight <= 0.0:
            zero_streak += 1
            if zero_streak > _MAX_ZERO_STREAK:
                raise DegenerateTargetError(
                    f"{zero_streak} consecutive zero-weight proposals; target may be empty"
                )
        else:
            zero_streak = 0
            if current_weight <= 0.0 or rng.random() * current_weight < weight:
                current = candidate
                current_weight = weight
        if step >= burn_in and (step - burn_in + 1) % thinning == 0:
            samples.append(current)
    return samples


def metropolis_sample(unitary, input_occupation, model, k: int, config: ChainConfig,
                      strategy: str = "direct") -> list[tuple[int, ...]]:
    """Draw output occupations distributed as the clamped truncated probability.

    The proposal kernels are symmetric, so detailed balance holds for the
    clamped target; zero-weight states are never accepted (the chain can
    only emit one if it started there and stays during early steps).
    Identical (seed, config) pairs reproduce the exact sample sequence.
    """
    m, n, occ = _validate_input(unitary, input_occupation)
    rng = np.random.default_rng(config.seed)
    proposal = config.resolved_proposal(m)

    base = ExperimentInstance(
        unitary=unitary,
        input_occupation=occ,
        output_occupation=_occupation_from_modes(range(n), m),
        model=model,
    )
    targets: dict[tuple[int, ...], float] = {}

    def target(state: tuple[int, ...]) -> float:
        weight = targets.get(state)
        if weight is None:
            weight = _clamped_target(base.with_output(state), k, strategy)
            targets[state] = weight
        return weight

    def propose(state: tuple[int, ...]) -> tuple[int, ...]:
        if proposal == "uniform_noncollisional":
            return _occupation_from_modes(rng.choice(m, size=n, replace=False), m)
        occupied = [i for i, c in enumerate(state) if c]
        empty = [i for i, c in enumerate(state) if not c]
        nxt = list(state)
        nxt[occupied[rng.integers(len(occupied))]] = 0
        nxt[empty[rng.integers(len(empty))]] = 1
        return tuple(nxt)

    initial = _occupation_from_modes(rng.choice(m, size=n, replace=False), m)
    return _metropolis_chain(target, propose, initial, rng,
                             config.num_samples, config.burn_in, config.thinning)


def output_distribution(unitary, input_occupation, model, k: int,
                        strategy: str = "direct") -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Enumerate the normalized clamped truncated distribution over outputs.

    Returns the C(m, n) non-collisional occupations (lexicographic) and
    their probabilities; intended as the total-variation oracle for the
    chain.  Limited to C(m, n) <= 10^5 outputs.
    """
    m, n, occ = _validate_input(unitary, input_occupation)
    if math.comb(m, n) > _ENUMERATION_LIMIT:
        raise ValueError(f"too many outputs to enumerate: C({m}, {n}) > {_ENUMERATION_LIMIT}")
    base = ExperimentInstance(
        unitary=unitary,
        input_occupation=occ,
        output_occupation=_occupation_from_modes(range(n), m),
        model=model,
    )
    states = list(output_configurations(m, n, noncollisional=True))
    weights = np.array([_clamped_target(base.with_output(s), k, strategy) for s in states])
    mass = weights.sum()
    if mass <= 0.0:
        raise DegenerateTargetError("all truncated output weights are zero")
    return states, weights / mass
