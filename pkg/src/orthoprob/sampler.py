"""Monte Carlo simulation of sequential yes/no measurement chains.

Each trial walks the test events in order, drawing a yes/no outcome with
the current state's probability and updating the state by conditioning on
the observed outcome (the complement on "no").  On the all-yes path a
final outcome for the target event is drawn.  States along the walk
depend only on the outcome prefix, so they are computed once per realized
prefix and trials are driven purely by uniform draws.

Randomness comes from one counter-based Philox stream keyed by the seed,
consumed in a fixed level-major order; a given (seed, trial, step) always
sees the same uniform, so reruns are bit-identical.  Single-threaded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import (EmptyChain, ImpossibleSequence, NotPredictable,
                     ValidationError, ZeroEvent, ZeroProbabilityCondition)
from .events import Event, complement
from .states import State, condition, predictability_seq, prob

# Branch probabilities inside (0, 1e-14) are counted to the complementary
# branch so no trial ever conditions on a numerically vanishing event.
DEGENERATE_BRANCH = 1e-14


@dataclass(frozen=True)
class SamplerConfig:
    """Trial count, RNG seed, and probability tolerance for chain runs."""

    seed: int = 42
    trials: int = 100_000
    tol: float = 1e-9

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.tol >= 0.0:
            raise ValidationError(f"tol must be nonnegative, got {self.tol!r}")


@dataclass(frozen=True)
class ChainResult:
    """Counts and summary statistics for one sampled chain.

    ``outcome_counts`` maps each observed yes/no bitstring (one character
    per test, '1' = yes, first test leftmost) to its frequency.
    ``empirical_p`` is the final-event yes fraction among all-yes trials
    (NaN when no trial survived the chain).
    """

    outcome_counts: dict[str, int]
    all_yes_count: int
    final_event_yes_count: int
    empirical_p: float
    std_error: float
    predicted_p: float | None
    trials: int
    seed: int

    def __post_init__(self):
        total = sum(self.outcome_counts.values())
        if total != self.trials:
            raise ValidationError(
                f"outcome counts sum to {total}, expected {self.trials}")
        if self.all_yes_count > 0:
            expected = self.final_event_yes_count / self.all_yes_count
            if self.empirical_p != expected:
                raise ValidationError("empirical_p inconsistent with counts")


def _effective_yes_probability(state: State, event: Event) -> float:
    p = prob(state, event)
    if p < DEGENERATE_BRANCH:
        return 0.0
    if p > 1.0 - DEGENERATE_BRANCH:
        return 1.0
    return p


def sample_chain(initial: State, tests: Sequence[Event], final: Event,
                 config: SamplerConfig = SamplerConfig()) -> ChainResult:
    """Sample ``config.trials`` runs of the measurement chain.

    Every trial performs all tests in order under conditioning on the
    drawn outcomes; the final event is drawn only on the all-yes path.
    ``predicted_p`` carries the certified sequential conditional
    probability when the chain is statistically predictable, else None.
    """
    if len(tests) == 0:
        raise EmptyChain("sample_chain needs at least one test event")
    prob(initial, final)  # validates that the final event fits the state
    n = len(tests)
    trials = config.trials
    rng = np.random.Generator(np.random.Philox(key=np.uint64(config.seed)))

    node_states: list[State] = [initial]
    node_ids = np.zeros(trials, dtype=np.int64)
    wide = n > 62  # bit-packed path codes overflow int64 beyond this
    codes = None if wide else np.zeros(trials, dtype=np.int64)
    bit_rows = np.empty((trials, n), dtype=bool) if wide else None
    all_yes = np.ones(trials, dtype=bool)

    for k, event in enumerate(tests):
        p_yes = np.array([_effective_yes_probability(s, event) for s in node_states])
        outcome = rng.random(trials) < p_yes[node_ids]
        if wide:
            bit_rows[:, k] = outcome
        else:
            codes = codes * 2 + outcome
        all_yes &= outcome
        combo = node_ids * 2 + outcome
        realized = np.unique(combo)
        remap = np.full(2 * len(node_states), -1, dtype=np.int64)
        next_states: list[State] = []
        comp = complement(event)
        for c in realized:
            parent, bit = divmod(int(c), 2)
            branch_event = event if bit else comp
            next_states.append(condition(node_states[parent], branch_event, tol=0.0))
            remap[c] = len(next_states) - 1
        node_ids = remap[combo]
        node_states = next_states

    final_draw = rng.random(trials)
    all_yes_count = int(all_yes.sum())
    if all_yes_count > 0:
        surviving = node_states[int(node_ids[int(np.argmax(all_yes))])]
        p_final = _effective_yes_probability(surviving, final)
        final_yes_count = int((all_yes & (final_draw < p_final)).sum())
    else:
        final_yes_count = 0

    if wide:
        rows, freq = np.unique(bit_rows, axis=0, return_counts=True)
        counts = {"".join("1" if b else "0" for b in row): int(c)
                  for row, c in zip(rows, freq)}
    else:
        values, freq = np.unique(codes, return_counts=True)
        counts = {format(int(v), f"0{n}b"): int(c)
                  for v, c in zip(values, freq)}

    if all_yes_count > 0:
        empirical = final_yes_count / all_yes_count
        std_error = math.sqrt(empirical * (1.0 - empirical) / all_yes_count)
    else:
        empirical = float("nan")
        std_error = float("nan")

    try:
        detection = predictability_seq(final, tests)
        predicted = detection.s if detection.predictable else None
    except (ImpossibleSequence, ZeroEvent):
        predicted = None

    return ChainResult(outcome_counts=counts, all_yes_count=all_yes_count,
                       final_event_yes_count=final_yes_count,
                       empirical_p=empirical, std_error=std_error,
                       predicted_p=predicted, trials=trials, seed=config.seed)


@dataclass(frozen=True)
class StateIndependenceReport:
    """Empirical check that a predictable chain ignores the initial state.

    ``passed`` means every run landed within four standard errors of the
    certified value (plus a 1e-12 absolute allowance so zero-variance
    chains are not failed over float roundoff in the certificate).
    """

    predicted_p: float
    results: tuple[ChainResult, ...]
    deviations: tuple[float, ...]
    passed: bool


def state_independence_check(target: Event, tests: Sequence[Event],
                             initial_states: Sequence[State],
                             config: SamplerConfig = SamplerConfig()
                             ) -> StateIndependenceReport:
    """Run the chain from several initial states and compare against the
    certified conditional probability.

    Raises NotPredictable when the chain has no state-independent value,
    and ZeroProbabilityCondition when some initial state cannot realize
    the all-yes path (analytic path probability <= config.tol).
    """
    if len(initial_states) == 0:
        raise ValidationError("state_independence_check needs at least one initial state")
    detection = predictability_seq(target, tests)
    if not detection.predictable:
        raise NotPredictable(
            f"chain is not statistically predictable (residual {detection.residual:.3e})")
    predicted = detection.s

    results = []
    for i, state in enumerate(initial_states):
        walking, path_p = state, 1.0
        for k, ev in enumerate(tests):
            path_p *= prob(walking, ev)
            if path_p <= config.tol:
                raise ZeroProbabilityCondition(
                    f"initial state {i} gives the all-yes path probability "
                    f"{path_p!r} <= {config.tol!r} by step {k}",
                    index=k, probability=path_p)
            walking = condition(walking, ev, tol=0.0)
        run_config = replace(config, seed=(config.seed + i) % 2 ** 64)
        results.append(sample_chain(state, tests, target, run_config))

    deviations = []
    passed = True
    for r in results:
        if r.all_yes_count == 0:
            passed = False
            deviations.append(float("inf"))
            continue
        err = abs(r.empirical_p - predicted)
        if err > 4.0 * r.std_error + 1e-12:
            passed = False
        deviations.append(err / r.std_error if r.std_error > 0.0 else
                          (0.0 if err <= 1e-12 else float("inf")))
    return StateIndependenceReport(predicted_p=predicted, results=tuple(results),
                                   deviations=tuple(deviations), passed=passed)
