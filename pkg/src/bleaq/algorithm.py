"""Bilevel evolutionary search with quadratic approximation of the lower-level optimum.

A run keeps an upper-level population whose members carry a lower-level vector and a
tag: 1 when that vector came from a lower-level solve (or from a mapping model whose
training error is below ``e0``), 0 otherwise.  Offsprings get their lower-level
vectors either from the fitted mapping or from warm-started lower-level solves.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import psi
from .lower import LowerParams, LowerSolveResult, solve_lower, variance_ratio
from .operators import EvoParams, make_offspring, population_update, tournament_select
from .problem import BilevelProblem, EvalCounters, Individual, evaluate_lower, evaluate_upper

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BleaqConfig:
    pop_size: int = 50
    evo: EvoParams = field(default_factory=EvoParams)
    e0: float = 1e-3
    alpha_u_stop: float = 1e-5
    alpha_l_stop: float = 1e-5
    delta_min: float = 1e-4
    max_generations: int = 2000
    stagnation_window: int = 100
    stagnation_tol: float = 1e-8
    lower_pop_size: int = 50
    lower_max_generations: int = 1000
    qp_eta_m: float = 20.0  # mutation index for the lower-level QP model samples
    predict_with_poor_model: bool = False  # True: poor-model predictions enter tagged 0 instead of being solved
    snapshot_every: int = 0  # store a mapping snapshot every k generations (0: final model only)
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < self.evo.mu + 1:
            raise ValueError("pop_size must exceed mu")
        for name in ("e0", "alpha_u_stop", "alpha_l_stop", "delta_min", "stagnation_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_generations < 0 or self.stagnation_window < 1:
            raise ValueError("generation limits must be positive")

    def lower_params(self) -> LowerParams:
        return LowerParams(
            pop_size=self.lower_pop_size,
            alpha_stop=self.alpha_l_stop,
            max_generations=self.lower_max_generations,
            delta_min=self.delta_min,
            qp_eta_m=self.qp_eta_m,
            evo=self.evo,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BleaqConfig":
        data = dict(data)
        if isinstance(data.get("evo"), dict):
            data["evo"] = EvoParams(**data["evo"])
        return cls(**data)

    def with_overrides(self, **overrides) -> "BleaqConfig":
        evo_keys = set(EvoParams.__dataclass_fields__)
        evo_over = {k: v for k, v in overrides.items() if k in evo_keys}
        rest = {k: v for k, v in overrides.items() if k not in evo_keys}
        cfg = replace(self, **rest)
        return replace(cfg, evo=replace(cfg.evo, **evo_over)) if evo_over else cfg


@dataclass
class GenerationTrace:
    generation: int
    elite_F: float
    elite_f: float
    ul_fe: int
    ll_fe: int
    ll_calls: int
    psi_mse: Optional[float]
    alpha_u: float
    branch: str  # "init", "psi", "solve" or "mixed"
    new_tagged: int = 0  # tag-1 offsprings created this generation


@dataclass
class PsiState:
    model: Optional[psi.PsiModel] = None
    fitted_at: int = -1
    snapshots: list = field(default_factory=list)


@dataclass
class RunReport:
    algorithm: str
    problem: dict
    config: dict
    trace: list
    solution: dict
    counters: dict
    accuracy: Optional[dict]
    converged: bool
    termination: str
    generations: int
    psi_model: Optional[dict]
    psi_snapshots: list
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)

    def final_psi(self) -> Optional[psi.PsiModel]:
        return None if self.psi_model is None else psi.PsiModel.from_dict(self.psi_model)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _member(problem: BilevelProblem, x_u, x_l, tag: int, f: float, cv_lower: float,
            counters: EvalCounters, solved: bool) -> Individual:
    F, cv_upper = evaluate_upper(problem, x_u, x_l, counters)
    return Individual(np.asarray(x_u, dtype=float), np.asarray(x_l, dtype=float), tag, F, f, cv_upper,
                      cv_lower, solved)


def _from_solve(problem, x_u, res: LowerSolveResult, counters) -> Individual:
    feasible = res.feasible
    return _member(problem, x_u, res.x_l, int(feasible), res.f, res.cv, counters, solved=feasible)


def elite_index(population: list[Individual]) -> Optional[int]:
    """Index of the best tag-1 member under upper-level constraint domination."""
    best = None
    for i, ind in enumerate(population):
        if ind.tag == 1 and (best is None or ind.upper_key < population[best].upper_key):
            best = i
    return best


def initialize(problem: BilevelProblem, config: BleaqConfig, counters: EvalCounters,
               rng: np.random.Generator, use_qp: bool = True) -> list[Individual]:
    lo, hi = problem.upper_lo, problem.upper_hi
    params = config.lower_params()
    population = []
    for _ in range(config.pop_size):
        x_u = lo + rng.random(problem.n_upper) * (hi - lo)
        res = solve_lower(problem, x_u, None, params, counters, rng, use_qp=use_qp)
        population.append(_from_solve(problem, x_u, res, counters))
    return population


def select_parents(population: list[Individual], evo: EvoParams,
                   rng: np.random.Generator) -> tuple[int, list[int]]:
    """Elite (best tag-1) as index parent plus ``mu - 1`` tournament winners over the whole population."""
    index = elite_index(population)
    if index is None:
        # only reachable when every lower solve so far failed to find a feasible point
        index = min(range(len(population)), key=lambda i: population[i].upper_key)
    cv = [p.cv_upper for p in population]
    obj = [p.F for p in population]
    return index, tournament_select(cv, obj, evo.mu - 1, rng)


def closest_tagged(population: list[Individual], x_u: np.ndarray, widths: np.ndarray) -> Optional[Individual]:
    """Tag-1 member nearest to ``x_u`` in bound-normalised Euclidean distance."""
    tagged = [p for p in population if p.tag == 1]
    if not tagged:
        return None
    X = np.array([p.x_u for p in tagged])
    d = np.sum(((X - x_u) / widths) ** 2, axis=1)
    return tagged[int(np.argmin(d))]


@dataclass(frozen=True)
class _Mapping:
    model: psi.PsiModel
    lo: np.ndarray  # bounding box of the training x_u
    hi: np.ndarray

    def covers(self, x_u: np.ndarray) -> bool:
        return bool(np.all(x_u >= self.lo) and np.all(x_u <= self.hi))


def _fit_mapping(population: list[Individual], n_upper: int) -> Optional[_Mapping]:
    solved = [p for p in population if p.solved]
    if len(solved) < psi.required_points(n_upper):
        return None
    X = np.array([p.x_u for p in solved])
    return _Mapping(psi.fit(X, np.array([p.x_l for p in solved])), X.min(axis=0), X.max(axis=0))


def certify_elite(population: list[Individual], problem: BilevelProblem, config: BleaqConfig,
                  counters: EvalCounters, rng: np.random.Generator) -> None:
    """Re-solve the lower level (warm-started) while the elite's ``x_l`` is only a prediction."""
    params = config.lower_params()
    while True:
        e = elite_index(population)
        if e is None or population[e].solved:
            return
        ind = population[e]
        res = solve_lower(problem, ind.x_u, ind.x_l, params, counters, rng)
        population[e] = _from_solve(problem, ind.x_u, res, counters)


def generation_step(
    population: list[Individual],
    psi_state: PsiState,
    problem: BilevelProblem,
    config: BleaqConfig,
    counters: EvalCounters,
    rng: np.random.Generator,
    var0: np.ndarray,
    generation: int,
    nested: bool = False,
) -> tuple[list[Individual], PsiState, GenerationTrace]:
    lo, hi = problem.upper_lo, problem.upper_hi
    index, others = select_parents(population, config.evo, rng)
    parents = [population[i].x_u for i in others]
    children = [make_offspring(population[index].x_u, parents, lo, hi, config.evo, rng)
                for _ in range(config.evo.lam)]

    mapping = None if nested else _fit_mapping(population, problem.n_upper)
    model = None if mapping is None else mapping.model
    if model is not None:
        psi_state.model, psi_state.fitted_at = model, generation
    # an optimistic prediction from a poor model would push solved members out of the population
    good = model is not None and psi.is_good(model, config.e0)
    params = config.lower_params()
    widths = hi - lo
    offsprings = []
    predicted = 0
    for x_u in children:
        # the quadratic is a local fit, so only trust it inside the region it was trained on
        if mapping is not None and mapping.covers(x_u) and (good or config.predict_with_poor_model):
            tag = 1 if good else 0
            x_l = psi.predict(model, x_u, problem.lower_lo, problem.lower_hi)
            f, cv = evaluate_lower(problem, x_u, x_l, counters)
            offsprings.append(_member(problem, x_u, x_l, tag, f, cv, counters, solved=False))
            predicted += 1
        else:
            near = closest_tagged(population, x_u, widths)
            warm = None if near is None else near.x_l
            res = solve_lower(problem, x_u, warm, params, counters, rng, use_qp=not nested)
            offsprings.append(_from_solve(problem, x_u, res, counters))
    branch = "solve" if predicted == 0 else ("psi" if predicted == len(children) else "mixed")

    population = population_update(population, offsprings, config.evo.r, rng,
                                   protected=elite_index(population))
    if not nested:
        certify_elite(population, problem, config, counters, rng)
    if config.snapshot_every and model is not None and generation % config.snapshot_every == 0:
        psi_state.snapshots.append({"generation": generation, "model": model.to_dict()})
    trace = _trace(population, counters, var0, generation, branch, None if model is None else model.mse)
    trace.new_tagged = sum(o.tag for o in offsprings)
    return population, psi_state, trace


def _trace(population, counters, var0, generation, branch, mse) -> GenerationTrace:
    e = elite_index(population)
    elite = population[e] if e is not None else None
    X = np.array([p.x_u for p in population])
    return GenerationTrace(
        generation,
        elite.F if elite else math.inf,
        elite.f if elite else math.inf,
        counters.ul_fe,
        counters.ll_fe,
        counters.ll_calls,
        mse,
        variance_ratio(X.var(axis=0), var0),
        branch,
    )


def _evolve(problem: BilevelProblem, config: BleaqConfig, nested: bool) -> RunReport:
    rng = np.random.default_rng(config.seed)
    counters = EvalCounters()
    population = initialize(problem, config, counters, rng, use_qp=not nested)
    var0 = np.array([p.x_u for p in population]).var(axis=0)
    psi_state = PsiState()
    trace = [_trace(population, counters, var0, 0, "init", None)]

    termination = "max_generations"
    converged = False
    best_F = trace[0].elite_F
    stalled = 0
    generation = 0
    while generation < config.max_generations:
        generation += 1
        population, psi_state, row = generation_step(
            population, psi_state, problem, config, counters, rng, var0, generation, nested)
        trace.append(row)
        if row.alpha_u < config.alpha_u_stop:
            termination, converged = "alpha_u", True
            break
        # only generations that produced tag-1 offsprings could have moved the elite
        if row.new_tagged:
            if math.isfinite(best_F) and abs(row.elite_F - best_F) <= config.stagnation_tol * max(1.0, abs(best_F)):
                stalled += 1
            else:
                stalled = 0
        best_F = row.elite_F
        if stalled >= config.stagnation_window:
            termination, converged = "stagnation", True
            break

    e = elite_index(population)
    if e is None:
        e = min(range(len(population)), key=lambda i: population[i].upper_key)
    elite = population[e]
    if not nested:
        # re-certify: the elite's lower vector may come from the mapping model
        res = solve_lower(problem, elite.x_u, elite.x_l, config.lower_params(), counters, rng)
        elite = _from_solve(problem, elite.x_u, res, counters)

    opt = problem.known_optimum
    accuracy = None
    if opt is not None:
        accuracy = {"ul": abs(elite.F - opt.F), "ll": abs(elite.f - opt.f)}
    solution = {
        "x_u": elite.x_u.tolist(),
        "x_l": elite.x_l.tolist(),
        "F": elite.F,
        "f": elite.f,
        "cv_upper": elite.cv_upper,
        "cv_lower": elite.cv_lower,
        "tag": elite.tag,
    }
    return RunReport(
        algorithm="nested" if nested else "bleaq",
        problem=problem.describe(),
        config=config.to_dict(),
        trace=[asdict(t) for t in trace],
        solution=solution,
        counters=counters.as_dict(),
        accuracy=accuracy,
        converged=converged,
        termination=termination,
        generations=generation,
        psi_model=None if psi_state.model is None else psi_state.model.to_dict(),
        psi_snapshots=psi_state.snapshots,
    )


def run(problem: BilevelProblem, config: BleaqConfig = BleaqConfig()) -> RunReport:
    """Full BLEAQ run: initialise, evolve until the variance or stagnation test fires, re-certify the elite."""
    return _evolve(problem, config, nested=False)
