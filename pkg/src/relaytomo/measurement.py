"""Exterior probing network: simulated angle/capacity measurements.

Every ordered node pair (q1, q2) probes each relay path
N_q1 -> relay -> N_q2.  The receiving node measures the arrival angle,
quantized to its azimuthal resolution, and monitors the instantaneous
path capacity over an observation window.  Fading draws are shared
between the two orderings of a node pair, so the capacity estimates obey
channel reciprocity exactly.

Angles at a measuring node are signed offsets from that node's reference
ray, which points at the region center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, HopPair, sample_instant_capacity
from .errors import DomainError, GeometryError, MeasurementError
from .geometry import Point, RelayRegion, angular_span, dist, signed_angle
from .numerics import RngStream

FORMAT_HEADER = "# relaytomo measurement-set v1"
RELAY_HEADER = "# relaytomo relay-positions v1"


@dataclass(frozen=True)
class MeasurementNetwork:
    """Q measuring nodes placed outside the relay region."""

    nodes: tuple[Point, ...]
    resolution: float
    region: RelayRegion

    def __post_init__(self) -> None:
        if len(self.nodes) < 3:
            raise GeometryError(
                f"need at least 3 measuring nodes for unambiguous triangulation, got {len(self.nodes)}"
            )
        if self.resolution <= 0.0:
            raise DomainError(f"angular resolution must be positive, got {self.resolution}")
        for q, node in enumerate(self.nodes):
            if dist(node, self.region.center) <= self.region.radius:
                raise GeometryError(f"measuring node {q} lies inside the relay region")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def ordered_pairs(self) -> list[tuple[int, int]]:
        q = self.n_nodes
        return [(q1, q2) for q1 in range(q) for q2 in range(q) if q2 != q1]

    def node_angle(self, q: int, p: Point) -> float:
        """Signed angle of p from node q's reference ray (toward region center)."""
        node = self.nodes[q]
        ref = (self.region.center.x - node.x, self.region.center.y - node.y)
        return signed_angle(*_unit(ref), p.x - node.x, p.y - node.y)

    def scan_range(self, q: int) -> tuple[float, float]:
        node = self.nodes[q]
        ref = (self.region.center.x - node.x, self.region.center.y - node.y)
        return angular_span(self.region, node, ref)


def _unit(v: tuple[float, float]) -> tuple[float, float]:
    n = math.hypot(*v)
    return v[0] / n, v[1] / n


@dataclass(frozen=True)
class MeasurementSet:
    """Per (ordered pair, relay) measured angles, capacity estimates, raw draws.

    aoa[p, l]      quantized arrival angle at the receiving node of pair p
    cap_est[p, l]  empirical outage-capacity estimate from the raw draws
    raw[p, l, o]   instantaneous capacities over the observation window
    """

    pairs: tuple[tuple[int, int], ...]
    aoa: np.ndarray
    cap_est: np.ndarray
    raw: np.ndarray

    def __post_init__(self) -> None:
        p, l = self.aoa.shape
        if self.cap_est.shape != (p, l) or self.raw.shape[:2] != (p, l):
            raise MeasurementError("measurement matrices have inconsistent shapes")
        if len(self.pairs) != p:
            raise MeasurementError("pair list does not match matrix rows")
        if np.any(self.cap_est < 0.0) or np.any(self.raw < 0.0):
            raise MeasurementError("capacities must be non-negative")

    @property
    def n_relays(self) -> int:
        return self.aoa.shape[1]

    @property
    def n_observations(self) -> int:
        return self.raw.shape[2]

    def observation_vector(self, relay: int, o: int) -> np.ndarray:
        """Instantaneous capacities of observation o across all ordered pairs."""
        return self.raw[:, relay, o]


def quantize_angle(theta: float, d_theta: float) -> tuple[int, float]:
    """Nearest grid index and angle; ties round half away from zero."""
    if d_theta <= 0.0:
        raise DomainError(f"resolution must be positive, got {d_theta}")
    ratio = theta / d_theta
    index = math.floor(ratio + 0.5) if ratio >= 0.0 else math.ceil(ratio - 0.5)
    return index, index * d_theta


def estimate_outage_capacity(samples, p_out: float) -> float:
    """Empirical p_out-quantile: order statistic at ceil(p_out * n), clamped.

    A window too short to resolve the target quantile degrades to the sample
    minimum, which is exactly why the sequential test exists.
    """
    n = len(samples)
    if n == 0:
        raise MeasurementError("cannot estimate a quantile from zero samples")
    if not (0.0 < p_out < 1.0):
        raise DomainError(f"outage probability must be in (0,1), got {p_out}")
    ordered = np.sort(np.asarray(samples, dtype=float))
    index = min(max(math.ceil(p_out * n) - 1, 0), n - 1)
    return float(ordered[index])


def simulate_measurements(
    net: MeasurementNetwork,
    relays: list[Point],
    params: ChannelParams,
    observations: int,
    rng: RngStream,
) -> MeasurementSet:
    """Run the probing protocol over every ordered node pair and relay.

    Arrival angles are exact geometry quantized to the network resolution.
    For each unordered node pair one stream of per-link fading draws is
    shared by both orderings (channel reciprocity), and the capacity
    estimate is the empirical outage quantile of the window.
    """
    if observations < 1:
        raise DomainError(f"need at least one observation, got {observations}")
    pairs = net.ordered_pairs()
    n_pairs, n_relays = len(pairs), len(relays)
    aoa = np.zeros((n_pairs, n_relays))
    cap_est = np.zeros((n_pairs, n_relays))
    raw = np.zeros((n_pairs, n_relays, observations))

    # visibility: a path is recorded only if both endpoints see the relay
    # inside their scan ranges (always true for region-derived ranges)
    scans = [net.scan_range(q) for q in range(net.n_nodes)]

    caps_cache: dict[tuple[int, int, int], np.ndarray] = {}
    for p_idx, (q1, q2) in enumerate(pairs):
        lo, hi = min(q1, q2), max(q1, q2)
        for l, relay in enumerate(relays):
            angle = net.node_angle(q2, relay)
            tx_angle = net.node_angle(q1, relay)
            if not (scans[q2][0] - 1e-12 <= angle <= scans[q2][1] + 1e-12):
                continue
            if not (scans[q1][0] - 1e-12 <= tx_angle <= scans[q1][1] + 1e-12):
                continue
            _, aoa[p_idx, l] = quantize_angle(angle, net.resolution)
            key = (lo, hi, l)
            if key not in caps_cache:
                hops = HopPair(dist(net.nodes[lo], relay), dist(relay, net.nodes[hi]))
                stream = rng.child(lo * net.n_nodes + hi).child(l)
                caps_cache[key] = sample_instant_capacity(
                    hops, params, stream, size=observations
                )
            raw[p_idx, l, :] = caps_cache[key]
            cap_est[p_idx, l] = estimate_outage_capacity(
                caps_cache[key], params.outage_prob
            )
    return MeasurementSet(tuple(pairs), aoa, cap_est, raw)


# ---------------------------------------------------------------------------
# line-oriented serialization (documented in README.md)


def write_measurements(ms: MeasurementSet, path) -> None:
    """One record per (pair, relay): q1 q2 relay aoa_deg cap_est raw...

    Angles are written in degrees with 10 decimals (coarse enough to absorb
    the radians/degrees conversion wobble, so serialization is idempotent);
    capacities use shortest round-trip float repr.
    """
    lines = [FORMAT_HEADER,
             "# columns: q1 q2 relay aoa_deg cap_est obs_0..obs_{O-1}"]
    for p_idx, (q1, q2) in enumerate(ms.pairs):
        for l in range(ms.n_relays):
            fields = [str(q1), str(q2), str(l),
                      f"{math.degrees(ms.aoa[p_idx, l]):.10f}",
                      repr(float(ms.cap_est[p_idx, l]))]
            fields.extend(repr(float(v)) for v in ms.raw[p_idx, l])
            lines.append(" ".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_measurements(path) -> MeasurementSet:
    records = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise MeasurementError(f"cannot read measurement file {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tok = line.split()
            if len(tok) < 6:
                raise MeasurementError(f"malformed measurement record: {line!r}")
            records.append((int(tok[0]), int(tok[1]), int(tok[2]),
                            math.radians(float(tok[3])), float(tok[4]),
                            [float(v) for v in tok[5:]]))
    if not records:
        raise MeasurementError(f"no measurement records found in {path}")
    pairs = []
    for q1, q2, *_ in records:
        if (q1, q2) not in pairs:
            pairs.append((q1, q2))
    n_relays = max(r[2] for r in records) + 1
    n_obs = len(records[0][5])
    aoa = np.zeros((len(pairs), n_relays))
    cap_est = np.zeros((len(pairs), n_relays))
    raw = np.zeros((len(pairs), n_relays, n_obs))
    index = {pair: k for k, pair in enumerate(pairs)}
    for q1, q2, l, angle, cap, obs in records:
        if len(obs) != n_obs:
            raise MeasurementError("inconsistent observation counts across records")
        p_idx = index[(q1, q2)]
        aoa[p_idx, l] = angle
        cap_est[p_idx, l] = cap
        raw[p_idx, l, :] = obs
    return MeasurementSet(tuple(pairs), aoa, cap_est, raw)


def write_relays(relays: list[Point], path) -> None:
    lines = [RELAY_HEADER, "# columns: relay x y"]
    for l, p in enumerate(relays):
        lines.append(f"{l} {float(p.x)!r} {float(p.y)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_relays(path) -> list[Point]:
    relays = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise MeasurementError(f"cannot read relay file {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tok = line.split()
            if len(tok) != 3:
                raise MeasurementError(f"malformed relay record: {line!r}")
            relays.append((int(tok[0]), Point(float(tok[1]), float(tok[2]))))
    relays.sort(key=lambda r: r[0])
    return [p for _, p in relays]
