"""Sum degrees-of-freedom bounds: closed forms and Monte Carlo estimators.

The closed forms cover the amplifying-surface regime, where feasibility
of a nulling pattern is a pure counting question (enough elements for
the targeted links).  Constrained-amplitude regimes have no such
counting rule; their bounds are expectations over channel draws of a
per-sample reduction, estimated here by Monte Carlo:

* passive lower: best silenced-subset size whose min-norm nulling
  solution already obeys the unit cap,
* passive upper: most absent links any pattern can null with some
  unit-cap solution (the convex sup-norm event),
* eps-relaxed lower: probability that a square element subset nulls all
  cross links with magnitudes in [1 - eps, 1],
* rho-limited lower: probability that pure phase alignment lifts every
  user's quadrature SINRs past a power-law threshold.

All estimators draw channels from per-sample substreams, so curves over
Q or over eps computed from one seed are comparable sample by sample.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import SystemConfig, sample
from .errors import RankDeficientError, WeightSumError
from .irs import (
    eps_block_extremes,
    eps_relaxed_lambda,
    lossless_phase_align,
    pair_products,
    sinr_triplet,
)
from .montecarlo import EstimatorResult, estimate
from .numerics import linf_feasible_within
from .topology import NetworkMatrix, w_pattern_zeros

KIND_CLOSED = "ClosedForm"
KIND_MC = "MonteCarlo"


@dataclass(frozen=True)
class BoundCurvePoint:
    """One point of a bound-versus-Q (or versus-K) curve.

    Closed-form points carry a degenerate interval and zero seed/samples.
    """

    q: int
    value: float
    ci_low: float
    ci_high: float
    kind: str
    method_tag: str
    seed: int
    samples: int


def _closed_point(q: int, value: float, method_tag: str) -> BoundCurvePoint:
    return BoundCurvePoint(q=q, value=value, ci_low=value, ci_high=value,
                           kind=KIND_CLOSED, method_tag=method_tag,
                           seed=0, samples=0)


# ---------------------------------------------------------------------------
# closed forms


def region_contains(network: NetworkMatrix, point: Sequence[float],
                    tol: float = 1e-12) -> bool:
    """Is ``point`` inside the per-pair DoF region of the bare network?

    Constraints: 0 <= d_i <= 1 and, for every user pair,
    ``d_i + d_j <= 2 - max(link(i,j), link(j,i))``.
    """
    k = network.K
    d = np.asarray(point, dtype=float)
    if d.shape != (k,):
        raise ValueError(f"point must have length {k}, got {d.shape}")
    if np.any(d < -tol) or np.any(d > 1.0 + tol):
        return False
    bits = network.bits
    for i in range(k):
        for j in range(i + 1, k):
            cap = 2.0 - max(bits[i][j], bits[j][i])
            if d[i] + d[j] > cap + tol:
                return False
    return True


def timeshare_contains(network: NetworkMatrix, point: Sequence[float],
                       vertices: Sequence[Sequence[float]],
                       weights: Sequence[float],
                       tol: float = 1e-9) -> bool:
    """Is ``point`` the claimed convex combination of in-region vertices?

    Raises :class:`~irsdof.errors.WeightSumError` unless the weights are
    non-negative and sum to 1 within ``tol``.  Returns False if any
    vertex leaves the region or the combination misses the point.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(vertices) != w.shape[0]:
        raise ValueError("need one weight per vertex")
    if np.any(w < -tol) or abs(float(w.sum()) - 1.0) > tol:
        raise WeightSumError(
            f"weights must be a convex combination, got sum {float(w.sum())!r}"
        )
    verts = np.asarray(vertices, dtype=float)
    for v in verts:
        if not region_contains(network, v, tol=max(tol, 1e-12)):
            return False
    combo = w @ verts
    return bool(np.max(np.abs(combo - np.asarray(point, dtype=float))) <= tol)


def outer_pair_value(link_ij: int, link_ji: int) -> float:
    """Surface-assisted outer bound on d_i + d_j for one user pair."""
    for v in (link_ij, link_ji):
        if v not in (0, 1):
            raise ValueError(f"link indicators must be 0 or 1, got {v}")
    return 2.0 - (link_ij + link_ji) / 2.0


def silencing_cost(k: int, w: int) -> int:
    """Links an amplifying surface must null to silence w of k users."""
    if not 0 <= w <= k:
        raise ValueError(f"w must be in 0..{k}")
    return w * (k - 1) + w * (k - w)


def best_silenced_count(k: int, q: int) -> int:
    """Largest w with :func:`silencing_cost` within the element budget."""
    if k < 2:
        raise ValueError("need at least two users")
    if q < 0:
        raise ValueError("q must be >= 0")
    return max(w for w in range(k + 1) if silencing_cost(k, w) <= q)


def active_lower_sum(k: int, q: int) -> float:
    """Achievable sum DoF with an amplifying surface: (k + w*) / 2."""
    return (k + best_silenced_count(k, q)) / 2.0


def active_upper_sum(k: int, q: int) -> float:
    """Converse for the amplifying surface: min(k, k/2 + q / (2(k-1)))."""
    if k < 2:
        raise ValueError("need at least two users")
    if q < 0:
        raise ValueError("q must be >= 0")
    return min(float(k), k / 2.0 + q / (2.0 * (k - 1)))


# ---------------------------------------------------------------------------
# Monte Carlo estimators


def _min_norm_max_abs(a: np.ndarray, b: np.ndarray) -> float | None:
    """Sup-norm of the min-norm solution, or None when the Gram solve fails.

    Uses the same Cholesky route as the sup-norm feasibility check so the
    two estimators make bitwise-identical calls on shared patterns.
    """
    gram = a @ a.conj().T
    try:
        cho = cho_factor(gram, lower=True)
    except Exception:
        return None
    return float(np.max(np.abs(a.conj().T @ cho_solve(cho, b))))


def _silencing_index_cache(k: int, canonical_b: bool):
    """Per subset size w (descending): list of (ii, jj) row-index arrays."""
    cache: list[tuple[int, list[tuple[np.ndarray, np.ndarray]]]] = []
    for w in range(k, 0, -1):
        subsets = ([tuple(range(w))] if canonical_b
                   else list(itertools.combinations(range(k), w)))
        entries = []
        for b_set in subsets:
            zeros = w_pattern_zeros(k, b_set)
            ii = np.array([i for (i, _) in zeros])
            jj = np.array([j for (_, j) in zeros])
            entries.append((ii, jj))
        cache.append((w, entries))
    return cache


def passive_lower_sum_mc(cfg: SystemConfig, samples: int, seed: int,
                         workers: int = 1,
                         canonical_b: bool = False) -> BoundCurvePoint:
    """Monte Carlo lower bound on passive-surface sum DoF.

    Per sample: the largest silenced-subset size w whose nulling system
    has a min-norm solution within the unit cap scores (K + w) / 2;
    otherwise the interference-free half, K / 2.  With ``canonical_b``
    only the subset {0..w-1} is tried per size (cheaper, still a valid
    bound by symmetry of the channel law).
    """
    k, q = cfg.K, cfg.Q
    cache = _silencing_index_cache(k, canonical_b)

    def per_sample(stream) -> float:
        ch = sample(cfg, stream)
        prods = pair_products(ch)
        for w, entries in cache:
            if silencing_cost(k, w) > q:
                continue
            for ii, jj in entries:
                a = prods[ii, jj, :]
                b = -ch.direct[jj, ii]
                top = _min_norm_max_abs(a, b)
                if top is not None and top <= 1.0:
                    return (k + w) / 2.0
        return k / 2.0

    tag = f"passive-lower/pinv-w/{'canonical' if canonical_b else 'all'}"
    res = estimate(per_sample, samples, seed, workers=workers, method_tag=tag)
    return _mc_point(q, res)


def _zero_combo_cache(k: int, q: int):
    """Cross-link index combos per zero count, largest count first."""
    cross = [(i, j) for i in range(k) for j in range(k) if i != j]
    ii_all = np.array([i for (i, _) in cross])
    jj_all = np.array([j for (_, j) in cross])
    combos: list[tuple[int, list[np.ndarray]]] = []
    for count in range(min(q, len(cross)), 0, -1):
        idx = [np.array(c) for c in itertools.combinations(range(len(cross)), count)]
        combos.append((count, idx))
    return ii_all, jj_all, combos


def passive_upper_sum_mc(cfg: SystemConfig, samples: int, seed: int,
                         workers: int = 1) -> BoundCurvePoint:
    """Monte Carlo upper bound on passive-surface sum DoF.

    Per sample: the most absent cross links any pattern can null with
    some unit-cap solution (checked in decreasing count order) scores
    K / 2 + count / (2 (K - 1)).  Rows individually requiring a
    coefficient above the cap prune their supersets outright.
    """
    k, q = cfg.K, cfg.Q
    ii_all, jj_all, combos = _zero_combo_cache(k, q)
    denom = 2.0 * (k - 1)

    def per_sample(stream) -> float:
        ch = sample(cfg, stream)
        prods = pair_products(ch)
        rows = prods[ii_all, jj_all, :]
        rhs = -ch.direct[jj_all, ii_all]
        row_ok = np.abs(rhs) <= np.sum(np.abs(rows), axis=1)
        for count, idx_list in combos:
            for idx in idx_list:
                if not np.all(row_ok[idx]):
                    continue
                try:
                    if linf_feasible_within(rows[idx], rhs[idx], 1.0):
                        return k / 2.0 + count / denom
                except RankDeficientError:
                    continue
        return k / 2.0

    tag = "passive-upper/min-linf"
    res = estimate(per_sample, samples, seed, workers=workers, method_tag=tag)
    return _mc_point(q, res)


def eps_relaxed_lower_sum_mc(cfg: SystemConfig, epsilon: float, samples: int,
                             seed: int, workers: int = 1,
                             strategy: str = "disjoint_blocks") -> BoundCurvePoint:
    """Monte Carlo lower bound for the near-unit amplitude band.

    Estimates the probability that some K^2-element subset nulls every
    cross link with magnitudes in [1 - eps, 1] and maps it through
    K/2 + (K/2) p: full interference cancellation on the good event,
    quadrature halving otherwise.
    """
    k = cfg.K

    if strategy == "disjoint_blocks":
        def per_sample(stream) -> float:
            ch = sample(cfg, stream)
            for lo, hi in eps_block_extremes(ch):
                if lo >= 1.0 - epsilon - 1e-9 and hi <= 1.0 + 1e-9:
                    return 1.0
            return 0.0
    else:
        def per_sample(stream) -> float:
            ch = sample(cfg, stream)
            ok, _ = eps_relaxed_lambda(ch, epsilon, strategy=strategy)
            return 1.0 if ok else 0.0

    tag = f"eps-relaxed/{strategy}/eps={epsilon!r}"
    res = estimate(per_sample, samples, seed, workers=workers, method_tag=tag)
    return _mc_point(cfg.Q, res, scale=k / 2.0, offset=k / 2.0)


def rho_limited_lower_sum_mc(cfg: SystemConfig, eps_exponent: float,
                             samples: int, seed: int,
                             workers: int = 1) -> BoundCurvePoint:
    """Monte Carlo lower bound from phase alignment at finite power.

    Estimates the probability that both quadrature SINRs of every user
    clear ``snr_rho ** (1 - eps_exponent)`` under pure phase alignment
    and maps it through K (1 - eps_exponent) p.
    """
    if not 0.0 < eps_exponent < 1.0:
        raise ValueError(f"eps_exponent must be in (0, 1), got {eps_exponent}")
    k = cfg.K
    threshold = cfg.snr_rho ** (1.0 - eps_exponent)

    def per_sample(stream) -> float:
        ch = sample(cfg, stream)
        coeffs = lossless_phase_align(ch)
        s = sinr_triplet(ch, coeffs, cfg)
        worst = min(float(s.real_part.min()), float(s.imag_part.min()))
        return 1.0 if worst >= threshold else 0.0

    tag = f"rho-limited/phase-align/eps={eps_exponent!r}"
    res = estimate(per_sample, samples, seed, workers=workers, method_tag=tag)
    return _mc_point(cfg.Q, res, scale=k * (1.0 - eps_exponent), offset=0.0)


def _mc_point(q: int, res: EstimatorResult, scale: float = 1.0,
              offset: float = 0.0) -> BoundCurvePoint:
    """Wrap an estimate, mapping mean and interval through offset + scale*x."""
    return BoundCurvePoint(
        q=q,
        value=offset + scale * res.mean,
        ci_low=offset + scale * res.ci_low,
        ci_high=offset + scale * res.ci_high,
        kind=KIND_MC,
        method_tag=res.method_tag,
        seed=res.seed,
        samples=res.samples,
    )


def active_curve_points(k: int, q_grid: Sequence[int]) -> list[BoundCurvePoint]:
    """Closed-form lower/upper/no-surface rows for a Q sweep."""
    points = []
    for q in q_grid:
        points.append(_closed_point(q, active_lower_sum(k, q), "active-lower/closed-form"))
        points.append(_closed_point(q, active_upper_sum(k, q), "active-upper/closed-form"))
        points.append(_closed_point(q, k / 2.0, "no-surface/closed-form"))
    return points
