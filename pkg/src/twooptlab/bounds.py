"""Counting bounds for 2-optimal tours and the estimators feeding them.

The per-tour 2-optimality probability is bounded by the product of
sqrt(pi / (2 k_e)) over participating edges of the chord-disjoint move set,
damped by the interaction factor: the half-normal expectation of
exp(-sum over removed-edge pairs of x_e x_f / sqrt(k_e k_f)).  Everything is
kept in natural-log space; the raw quantities underflow well before n = 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chords import ChordDisjointSet, build_chord_disjoint_set, log_product_bound
from .orthants import MCEstimate
from .polytopes import build_two_opt_polytope, estimate_volume_rejection
from .rng import split_budget, worker_streams

# sqrt(pi/2) * exp(-1/(9 pi)): base of the per-tour probability bound.
BOUND_CONSTANT = math.sqrt(math.pi / 2.0) * math.exp(-1.0 / (9.0 * math.pi))
EXPECTED_COUNT_BASE = 1.2098


def interaction_matrix(s: ChordDisjointSet) -> tuple[np.ndarray, list[int]]:
    """Symmetric pair-coupling matrix over edges with positive participation."""
    active = [p for p in range(s.n) if s.k_by_edge[p] > 0]
    slot = {p: idx for idx, p in enumerate(active)}
    a = np.zeros((len(active), len(active)))
    for move in s.moves:
        e, f = slot[move.i], slot[move.j]
        w = 1.0 / math.sqrt(s.k_by_edge[move.i] * s.k_by_edge[move.j])
        a[e, f] += w
        a[f, e] += w
    return a, active


def interaction_values(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """exp(-sum_pairs x_e x_f w_ef) per sample row; decreasing in every coupling."""
    quad = 0.5 * np.einsum("ij,ij->i", x @ a, x)
    return np.exp(-quad)


def estimate_interaction_factor(
    s: ChordDisjointSet, samples: int, seed: int, workers: int = 1, batch: int = 100_000
) -> MCEstimate:
    """Mean interaction weight over i.i.d. unit half-normal edge variables."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not s.moves:
        return MCEstimate(estimate=1.0, stderr=0.0, samples=samples)
    a, _ = interaction_matrix(s)
    total = 0.0
    total_sq = 0.0
    for stream, budget in zip(worker_streams(seed, f"interaction-factor:{s.n}", workers),
                              split_budget(samples, workers)):
        done = 0
        while done < budget:
            m = min(batch, budget - done)
            x = np.abs(stream.standard_normal((m, a.shape[0])))
            vals = interaction_values(a, x)
            total += float(vals.sum())
            total_sq += float((vals * vals).sum())
            done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return MCEstimate(estimate=mean, stderr=math.sqrt(var / samples), samples=samples)


@dataclass(frozen=True)
class BoundReport:
    """Log-space bound table for one construction size."""

    n: int
    log_per_tour_bound: float  # c^n / sqrt((n-2)!)
    log_expected_count_bound: float  # 1.2098^n * sqrt(n!)
    log_chain_bound: float  # interaction estimate * product factor
    log_chain_stderr: float
    log_sqrt_factorial: float  # conjectured expected-count reference
    log_product_factor: float
    interaction: MCEstimate
    verdicts: dict

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "log_per_tour_bound": self.log_per_tour_bound,
            "log_expected_count_bound": self.log_expected_count_bound,
            "log_chain_bound": self.log_chain_bound,
            "log_chain_stderr": self.log_chain_stderr,
            "log_sqrt_factorial": self.log_sqrt_factorial,
            "log_product_factor": self.log_product_factor,
            "interaction": self.interaction.to_json_dict(),
            "verdicts": self.verdicts,
        }


def log_per_tour_bound(n: int) -> float:
    return n * math.log(BOUND_CONSTANT) - 0.5 * math.lgamma(n - 1)


def log_expected_count_bound(n: int) -> float:
    return n * math.log(EXPECTED_COUNT_BASE) + 0.5 * math.lgamma(n + 1)


def counting_bounds(n: int, samples: int = 200_000, seed: int = 0, workers: int = 1) -> BoundReport:
    """Evaluate the full bound chain at n = 2^k + 1."""
    s = build_chord_disjoint_set(n)
    product = log_product_bound(s)
    interaction = estimate_interaction_factor(s, samples, seed, workers=workers)
    log_chain = math.log(interaction.estimate) + product
    # Relative MC error propagates additively in log space.
    log_stderr = interaction.stderr / interaction.estimate if interaction.estimate > 0 else float("inf")
    return BoundReport(
        n=n,
        log_per_tour_bound=log_per_tour_bound(n),
        log_expected_count_bound=log_expected_count_bound(n),
        log_chain_bound=log_chain,
        log_chain_stderr=log_stderr,
        log_sqrt_factorial=0.5 * math.lgamma(n + 1),
        log_product_factor=product,
        interaction=interaction,
        verdicts={
            "chain_at_most_product_factor": log_chain <= product,
            "interaction_in_unit_interval": 0.0 < interaction.estimate <= 1.0,
        },
    )


def interaction_slope(ns, samples: int, seed: int, workers: int = 1) -> dict:
    """Least-squares slope of log interaction estimates against n."""
    logs = []
    for n in ns:
        est = estimate_interaction_factor(
            build_chord_disjoint_set(n), samples, seed, workers=workers
        )
        logs.append((n, math.log(est.estimate), est))
    xs = np.array([row[0] for row in logs], dtype=float)
    ys = np.array([row[1] for row in logs])
    slope, intercept = np.polyfit(xs, ys, 1)
    return {
        "ns": list(ns),
        "log_estimates": [row[1] for row in logs],
        "stderrs": [row[2].stderr / row[2].estimate for row in logs],
        "slope": float(slope),
        "intercept": float(intercept),
    }


def figure_sweep(ns, samples: int, seed: int, workers: int = 1) -> list[dict]:
    """Volume-vs-reference rows for the decay plot of the fixed-tour probability."""
    rows = []
    for n in ns:
        est = estimate_volume_rejection(build_two_opt_polytope(n), samples, seed + n, workers=workers)
        rows.append(
            {
                "n": n,
                "estimate": est.estimate,
                "stderr": est.stderr,
                "log_bound_a": log_per_tour_bound(n),
                "log_bound_b": log_expected_count_bound(n),
                "log_ref_sqrt_factorial": -0.5 * math.lgamma(n + 1),
            }
        )
    return rows
