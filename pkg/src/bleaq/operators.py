"""Evolutionary operators shared by both levels.

All functions take an explicit ``numpy.random.Generator`` so that independent runs
can own their random streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .problem import domination_key


@dataclass(frozen=True)
class EvoParams:
    """Operator settings.

    ``mutation_prob`` is the per-variable mutation rate.  ``omega_eta=None`` selects
    the scale-free ``dim / ||x_p - g||_1`` weight; the default constant keeps the
    inter-parent term proportional to the parents' spread.
    """

    mu: int = 3
    lam: int = 2
    r: int = 2
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    omega_xi: float = 0.1
    omega_eta: Optional[float] = 1.0
    eta_m: float = 20.0

    def __post_init__(self):
        if self.mu != 3:
            # the crossover mixes the index parent with exactly two others
            raise ValueError("mu must be 3")
        if self.lam < 1 or self.r < 1:
            raise ValueError("lam and r must be positive")
        for p in (self.crossover_prob, self.mutation_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


def constraint_compare(a: Sequence[float], b: Sequence[float]) -> bool:
    """True when ``a = (cv, obj)`` wins against ``b``; ties go to ``a``."""
    return domination_key(a[0], a[1]) <= domination_key(b[0], b[1])


class PoolTooSmallError(ValueError):
    pass


def sample_distinct(n: int, k: int, rng: np.random.Generator) -> list[int]:
    """``k`` distinct indices from ``range(n)`` by a partial Fisher-Yates shuffle."""
    idx = list(range(n))
    for i, u in enumerate(rng.random(k)):
        j = i + int(u * (n - i))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k]


def tournament_select(cv, obj, k: int, rng: np.random.Generator) -> list[int]:
    """Binary tournaments between ``2k`` distinct random members; returns ``k`` winner indices."""
    n = len(cv)
    if n < 2 * k:
        raise PoolTooSmallError(f"pool of {n} cannot host {k} tournaments")
    picks = sample_distinct(n, 2 * k, rng)
    winners = []
    for a, b in zip(picks[0::2], picks[1::2]):
        a, b = int(a), int(b)
        winners.append(a if constraint_compare((cv[a], obj[a]), (cv[b], obj[b])) else b)
    return winners


def pcx_crossover(
    index_parent: np.ndarray,
    others: Sequence[np.ndarray],
    rng: np.random.Generator,
    omega_xi: float = 0.1,
    omega_eta: Optional[float] = None,
    lo: Optional[np.ndarray] = None,
    hi: Optional[np.ndarray] = None,
    draws: Optional[tuple[float, float]] = None,
) -> np.ndarray:
    """Parent-centric offspring around ``index_parent``.

    ``c = x_p + omega_xi * xi * (x_p - g) + omega_eta * eta * (p2 - p1) / 2`` with
    ``xi, eta ~ N(0, 1)`` (or taken from ``draws``).  When ``omega_eta`` is None it is
    ``dim / ||x_p - g||_1``; the term is dropped for a collapsed parent set.
    """
    if len(others) != 2:
        raise ValueError("exactly two non-index parents are required")
    x_p = np.asarray(index_parent, dtype=float)
    p1 = np.asarray(others[0], dtype=float)
    p2 = np.asarray(others[1], dtype=float)
    xi, eta = draws if draws is not None else rng.standard_normal(2)
    g = (x_p + p1 + p2) / 3.0
    d = x_p - g
    child = x_p + (omega_xi * xi) * d
    spread = float(np.abs(d).sum())
    if omega_eta is None:
        if spread >= 1e-12:
            child = child + (len(x_p) / spread) * eta * (p2 - p1) / 2.0
    else:
        child = child + omega_eta * eta * (p2 - p1) / 2.0
    if lo is not None:
        child = np.minimum(np.maximum(child, lo), hi)
    return child


def polynomial_mutation(
    x: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    prob: float,
    eta_m: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Bounded polynomial mutation; each coordinate mutates with probability ``prob``."""
    x = np.asarray(x, dtype=float)
    hits = np.flatnonzero(rng.random(x.shape[0]) < prob)
    y = x.copy()
    if hits.size == 0:
        return y
    power = 1.0 / (eta_m + 1.0)
    for i, u in zip(hits.tolist(), rng.random(hits.size).tolist()):
        l, h, xi = float(lo[i]), float(hi[i]), float(y[i])
        width = h - l
        if u <= 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - (xi - l) / width) ** (eta_m + 1.0)
            deltaq = val ** power - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - (h - xi) / width) ** (eta_m + 1.0)
            deltaq = 1.0 - val ** power
        y[i] = min(max(xi + deltaq * width, l), h)
    return y


def replacement_plan(
    pop_keys: Sequence[tuple],
    off_keys: Sequence[tuple],
    r: int,
    rng: np.random.Generator,
    protected: Optional[int] = None,
) -> list[tuple[int, int]]:
    """Choose ``r`` random slots and decide who fills them.

    Returns ``(slot, source)`` pairs where ``source >= 0`` keeps/moves population member
    ``source`` and ``source < 0`` means offspring ``-source - 1``.  Survivors keep their
    own slots; incoming offsprings take the vacated ones.  A ``protected`` slot is
    never chosen.
    """
    n = len(pop_keys)
    eligible = n - (protected is not None)
    if eligible < r:
        raise ValueError("population smaller than r")
    slots = sample_distinct(eligible, r, rng)
    if protected is not None:
        slots = [s + (s >= protected) for s in slots]
    pool = [(pop_keys[s], s) for s in slots] + [(k, -i - 1) for i, k in enumerate(off_keys)]
    # stable: existing members win ties against offsprings
    order = sorted(range(len(pool)), key=lambda i: pool[i][0])
    best = [pool[i][1] for i in order[:r]]
    survivors = {s for s in best if s >= 0}
    vacated = [s for s in slots if s not in survivors]
    incoming = [s for s in best if s < 0]
    return [(s, s) for s in slots if s in survivors] + list(zip(vacated, incoming))


def population_update(
    population: list,
    offsprings: list,
    r: int,
    rng: np.random.Generator,
    key: Callable = lambda ind: ind.upper_key,
    protected: Optional[int] = None,
) -> list:
    """Return a new population where ``r`` random slots hold the best of slots + offsprings."""
    plan = replacement_plan([key(p) for p in population], [key(o) for o in offsprings], r, rng, protected)
    updated = list(population)
    for slot, source in plan:
        updated[slot] = population[source] if source >= 0 else offsprings[-source - 1]
    return updated


def make_offspring(
    index_parent: np.ndarray,
    others: Sequence[np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    params: EvoParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """One offspring: PCX with ``crossover_prob`` (clone otherwise), then per-variable mutation."""
    if rng.random() < params.crossover_prob:
        child = pcx_crossover(index_parent, others, rng, params.omega_xi, params.omega_eta, lo, hi)
    else:
        child = np.array(index_parent, dtype=float)
    return polynomial_mutation(child, lo, hi, params.mutation_prob, params.eta_m, rng)

