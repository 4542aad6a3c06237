"""Inverse solver: locate relays from exterior angle/capacity measurements.

Pipeline per relay: (1) keep the grid cells whose predicted arrival angles
quantize into the same resolution bins as the measured ones, intersected
over every observed node pair; (2) pick one candidate either by minimizing
the l2 capacity residual against the empirical outage estimates, or by a
multi-hypothesis sequential probability ratio test over the raw
instantaneous-capacity observations.

The angle constraint is realized as bin equality: with quantized
measurements, "zero angular residual" means landing in the same resolution
bin.  The capacity residual is reported for every result; thresholding on
it is optional and off by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, HopPair, capacity_log_pdf, outage_capacity
from .errors import DomainError, LocalizationError
from .geometry import CellGrid, Point, dist
from .measurement import MeasurementNetwork, MeasurementSet, quantize_angle

KIND_THRESHOLD = "threshold"
KIND_FORCED_MAP = "forced-map"
KIND_ARGMIN = "argmin"
KIND_UNLOCALIZED = "unlocalized"


@dataclass(frozen=True)
class TomographyConfig:
    """Solver settings: discretization, residual bounds, step-4 variant."""

    cell_side: float = 5.0
    epsilon_angle: float = 1e-9
    epsilon_capacity: float = math.inf
    mode: str = "msprt"
    apply_capacity_bound: bool = False

    def __post_init__(self) -> None:
        if self.cell_side <= 0.0:
            raise DomainError("cell side must be positive")
        if self.epsilon_angle < 0.0 or self.epsilon_capacity < 0.0:
            raise DomainError("residual tolerances must be non-negative")
        if self.mode not in ("argmin", "msprt"):
            raise DomainError(f"mode must be 'argmin' or 'msprt', got {self.mode!r}")


@dataclass(frozen=True)
class MsprtConfig:
    """Sequential-test settings.

    error is the tolerated probability of picking hypothesis k2 when k1 is
    true; a scalar broadcasts over every hypothesis pair, or pass a full
    (K, K) matrix.  priors maps cell index -> prior weight (renormalized
    over the candidate set); None means uniform.
    """

    error: float | np.ndarray = 0.01
    max_observations: int = 10
    priors: dict[int, float] | None = None

    def __post_init__(self) -> None:
        err = np.asarray(self.error, dtype=float)
        if np.any(err <= 0.0) or np.any(err >= 1.0):
            raise DomainError("pairwise error probabilities must lie in (0, 1)")
        if self.max_observations < 1:
            raise DomainError("need at least one observation")
        if self.priors is not None:
            if any(v < 0.0 for v in self.priors.values()):
                raise DomainError("priors must be non-negative")

    def threshold_matrix(self, k: int) -> np.ndarray:
        """log((1 - eps) / eps) per hypothesis pair, shape (k, k)."""
        err = np.asarray(self.error, dtype=float)
        if err.ndim == 0:
            err = np.full((k, k), float(err))
        elif err.shape != (k, k):
            raise DomainError(f"error matrix must have shape ({k}, {k}), got {err.shape}")
        return np.log((1.0 - err) / err)

    def log_priors(self, candidates: list[int]) -> np.ndarray:
        k = len(candidates)
        if self.priors is None:
            return np.full(k, -math.log(k))
        weights = np.array([self.priors.get(c, 0.0) for c in candidates], dtype=float)
        total = weights.sum()
        if total <= 0.0:
            raise DomainError("priors assign zero total weight to the candidate set")
        return np.log(weights / total)


@dataclass(frozen=True)
class LocalizationResult:
    """Outcome for one relay."""

    relay: int
    cell_index: int | None
    position: Point | None
    n_candidates: int
    kind: str
    e_angle: float
    e_capacity: float
    stopped_at: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.kind not in (KIND_THRESHOLD, KIND_FORCED_MAP, KIND_ARGMIN, KIND_UNLOCALIZED):
            raise DomainError(f"unknown decision kind {self.kind!r}")


def pair_hops(net: MeasurementNetwork, pair: tuple[int, int], p: Point) -> HopPair:
    """Hop lengths of the path via p for one ordered node pair."""
    q1, q2 = pair
    return HopPair(dist(net.nodes[q1], p), dist(p, net.nodes[q2]))


def feasible_cells(
    ms: MeasurementSet,
    relay: int,
    net: MeasurementNetwork,
    grid: CellGrid,
) -> list[int]:
    """Cells whose predicted arrival angles share every measured bin.

    Intersects, over all observed ordered pairs, the cell sets that quantize
    to the same resolution bin as the measurement.  Returns sorted cell
    indices; an empty list signals a grid too coarse or inconsistent data
    (the caller decides how to proceed).
    """
    pair_bins = []
    for p_idx, (q1, q2) in enumerate(ms.pairs):
        measured = ms.aoa[p_idx, relay]
        bin_index, _ = quantize_angle(float(measured), net.resolution)
        pair_bins.append((q2, bin_index))

    keep = []
    for w, cell in enumerate(grid.cells):
        ok = True
        for q2, bin_index in pair_bins:
            predicted = net.node_angle(q2, cell)
            if quantize_angle(predicted, net.resolution)[0] != bin_index:
                ok = False
                break
        if ok:
            keep.append(w)
    return keep


def _angle_residual(
    ms: MeasurementSet, relay: int, net: MeasurementNetwork, p: Point
) -> float:
    sq = 0.0
    for p_idx, (q1, q2) in enumerate(ms.pairs):
        sq += (float(ms.aoa[p_idx, relay]) - net.node_angle(q2, p)) ** 2
    return math.sqrt(sq)


def localize_argmin(
    candidates: list[int],
    cap_row: np.ndarray,
    net: MeasurementNetwork,
    grid: CellGrid,
    params: ChannelParams,
    ms: MeasurementSet | None = None,
    relay: int = -1,
) -> LocalizationResult:
    """Candidate minimizing the l2 norm of outage-capacity residuals."""
    if not candidates:
        raise LocalizationError("argmin localization needs a non-empty candidate set")
    pairs = net.ordered_pairs()
    best_w, best_err = None, math.inf
    for w in candidates:
        cell = grid.cells[w]
        sq = 0.0
        cache: dict[tuple[int, int], float] = {}
        for p_idx, pair in enumerate(pairs):
            key = (min(pair), max(pair))
            if key not in cache:
                cache[key] = outage_capacity(pair_hops(net, pair, cell), params)
            sq += (float(cap_row[p_idx]) - cache[key]) ** 2
        err = math.sqrt(sq)
        if err < best_err:
            best_w, best_err = w, err
    pos = grid.cells[best_w]
    e_angle = _angle_residual(ms, relay, net, pos) if ms is not None else 0.0
    return LocalizationResult(
        relay, best_w, pos, len(candidates), KIND_ARGMIN, e_angle, best_err, 0
    )


def msprt_localize(
    candidates: list[int],
    raw: np.ndarray,
    net: MeasurementNetwork,
    grid: CellGrid,
    params: ChannelParams,
    cfg: MsprtConfig,
    ms: MeasurementSet | None = None,
    relay: int = -1,
) -> LocalizationResult:
    """Multi-hypothesis sequential test over the raw capacity observations.

    Accumulates per-hypothesis log likelihoods (prior plus, per observation,
    the product over ordered pairs of the capacity density at the
    hypothesis cell's hop lengths).  Stops early once some hypothesis beats
    every rival by its pairwise log threshold; otherwise returns the MAP
    hypothesis after the final observation.  Ties break to the lowest cell
    index.
    """
    if not candidates:
        raise LocalizationError("sequential test needs a non-empty candidate set")
    k = len(candidates)
    pairs = net.ordered_pairs()
    n_obs = min(int(raw.shape[1]), cfg.max_observations)
    if raw.ndim != 2 or raw.shape[0] != len(pairs):
        raise LocalizationError(
            f"raw observations must have shape (n_pairs, n_obs), got {raw.shape}"
        )

    log_lik = cfg.log_priors(candidates).copy()
    if k == 1:
        # the pairwise stopping condition is vacuous with a single hypothesis
        return _finish(candidates, 0, KIND_THRESHOLD, 0, net, grid,
                       ms, relay, params, False)
    thresholds = cfg.threshold_matrix(k)

    hop_cache = [
        [pair_hops(net, pair, grid.cells[w]) for pair in pairs] for w in candidates
    ]
    degenerate = False
    for o in range(n_obs):
        step = np.zeros(k)
        for ki in range(k):
            total = 0.0
            for p_idx in range(len(pairs)):
                total += capacity_log_pdf(float(raw[p_idx, o]), hop_cache[ki][p_idx], params)
            step[ki] = total
        log_lik = log_lik + step
        if not np.any(np.isfinite(log_lik)):
            # observation impossible under every hypothesis: fall back to a
            # uniform-prior MAP (a tie, broken to the lowest cell index) and
            # flag the degeneracy
            return _finish(candidates, 0, KIND_FORCED_MAP, o + 1, net, grid,
                           ms, relay, params, True)
        log_lik -= log_lik.max()  # normalization guard; differences preserved
        satisfying = [
            ki for ki in range(k)
            if all(log_lik[ki] - log_lik[k2] > thresholds[ki, k2]
                   for k2 in range(k) if k2 != ki)
        ]
        if satisfying:
            # at most one winner for error rates < 1/2; otherwise prefer the
            # highest likelihood, ties to the lowest cell index
            best = max(satisfying, key=lambda ki: (log_lik[ki], -ki))
            return _finish(candidates, best, KIND_THRESHOLD, o + 1,
                           net, grid, ms, relay, params, degenerate)
    best = int(np.argmax(log_lik))
    return _finish(candidates, best, KIND_FORCED_MAP, n_obs, net,
                   grid, ms, relay, params, degenerate)


def _finish(
    candidates, best_pos, kind, stopped, net, grid, ms, relay, params,
    degenerate,
) -> LocalizationResult:
    w = candidates[best_pos]
    pos = grid.cells[w]
    e_angle = _angle_residual(ms, relay, net, pos) if ms is not None else 0.0
    e_cap = 0.0
    if ms is not None:
        pairs = net.ordered_pairs()
        cache: dict[tuple[int, int], float] = {}
        sq = 0.0
        for p_idx, pair in enumerate(pairs):
            key = (min(pair), max(pair))
            if key not in cache:
                cache[key] = outage_capacity(pair_hops(net, pair, pos), params)
            sq += (float(ms.cap_est[p_idx, relay]) - cache[key]) ** 2
        e_cap = math.sqrt(sq)
    return LocalizationResult(
        relay, w, pos, len(candidates), kind, e_angle, e_cap, stopped, degenerate
    )


def localize_all(
    ms: MeasurementSet,
    net: MeasurementNetwork,
    grid: CellGrid,
    params: ChannelParams,
    cfg: TomographyConfig,
    msprt_cfg: MsprtConfig | None = None,
) -> list[LocalizationResult]:
    """Run the full pipeline for every relay, in relay order.

    Relays whose candidate set comes back empty are reported unlocalized.
    """
    results = []
    for l in range(ms.n_relays):
        candidates = feasible_cells(ms, l, net, grid)
        if not candidates:
            results.append(LocalizationResult(
                l, None, None, 0, KIND_UNLOCALIZED, math.nan, math.nan, 0))
            continue
        if cfg.mode == "argmin":
            res = localize_argmin(candidates, ms.cap_est[:, l], net, grid,
                                  params, ms=ms, relay=l)
            if cfg.apply_capacity_bound and res.e_capacity > cfg.epsilon_capacity:
                res = LocalizationResult(
                    l, None, None, len(candidates), KIND_UNLOCALIZED,
                    res.e_angle, res.e_capacity, 0)
        else:
            mcfg = msprt_cfg if msprt_cfg is not None else MsprtConfig(
                max_observations=ms.n_observations)
            res = msprt_localize(candidates, ms.raw[:, l, :], net, grid,
                                 params, mcfg, ms=ms, relay=l)
        results.append(res)
    return results


# ---------------------------------------------------------------------------
# report serialization and scoring

REPORT_HEADER = "# relaytomo localization-report v1"


def write_report(results: list[LocalizationResult], path) -> None:
    """Line format: relay x y kind n_candidates e_capacity stopped_at."""
    lines = [REPORT_HEADER,
             "# columns: relay x y kind n_candidates e_capacity stopped_at"]
    for r in results:
        x = repr(r.position.x) if r.position is not None else "nan"
        y = repr(r.position.y) if r.position is not None else "nan"
        e_cap = repr(float(r.e_capacity)) if math.isfinite(r.e_capacity) else "nan"
        lines.append(f"{r.relay} {x} {y} {r.kind} {r.n_candidates} {e_cap} {r.stopped_at}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def score_results(
    results: list[LocalizationResult],
    truth: list[Point],
    cell_side: float,
) -> dict:
    """Fraction of relays localized within one cell side of their true spot."""
    n = len(truth)
    hits = 0
    errors = []
    for r in results:
        if r.position is None:
            continue
        err = dist(r.position, truth[r.relay])
        errors.append(err)
        if err <= cell_side:
            hits += 1
    return {
        "relays": n,
        "localized": len(errors),
        "within_one_cell": hits,
        "fraction_within_one_cell": hits / n if n else 0.0,
        "mean_error_m": float(np.mean(errors)) if errors else math.nan,
    }
