"""Domain model of the two-tier network: MEC sites, vehicular fogs, topology.

All rates are stored in raw packets/s (1 MPPS = 1e6), powers in watts,
distances in meters. Instances are immutable after construction and safe to
share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

SPEED_OF_LIGHT = 3.0e8  # m/s, used for inter-MEC propagation delay


def dbm_to_watts(dbm: float) -> float:
    """Convert a dBm power figure to watts (24 dBm -> 0.2512 W)."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class MecSite:
    """A single-server edge site processing packets FCFS."""

    id: int
    service_rate: float  # packets/s
    tx_power: float  # watts

    def __post_init__(self):
        if self.service_rate <= 0:
            raise ConfigError("service_rate", "must be positive")
        if self.tx_power <= 0:
            raise ConfigError("tx_power", "must be positive")


@dataclass(frozen=True)
class VehicularFog:
    """A pool of parked vehicles acting as a multi-server queue.

    Each vehicle is one server with rate ``per_vehicle_rate``; the pool's
    total capacity is ``vehicle_count * per_vehicle_rate``.
    """

    id: int
    owner_mec: int
    vehicle_count: int
    per_vehicle_rate: float  # packets/s per vehicle
    cpu_cycles_per_bit: float
    energy_per_cycle: float  # joules/cycle
    return_ratio: float  # fraction of processed traffic sent back upstream
    tx_power: float  # watts
    channel_gain: float = 1.0

    def __post_init__(self):
        if self.vehicle_count < 1:
            raise ConfigError("vehicle_count", "must be at least 1")
        if self.per_vehicle_rate <= 0:
            raise ConfigError("per_vehicle_rate", "must be positive")
        if not 0.0 <= self.return_ratio <= 1.0:
            raise ConfigError("return_ratio", "must lie in [0, 1]")

    @property
    def service_rate(self) -> float:
        """Total pool capacity in packets/s."""
        return self.vehicle_count * self.per_vehicle_rate


@dataclass(frozen=True)
class TrafficProfile:
    """A discrete set of mean arrival rates, with a label for reporting."""

    rates: tuple
    kind: str = "hotspot"

    def __post_init__(self):
        if len(self.rates) == 0:
            raise ConfigError("rates", "rate set must be non-empty")
        if any(r <= 0 for r in self.rates):
            raise ConfigError("rates", "all rates must be positive")


@dataclass(frozen=True)
class Topology:
    """The full two-tier network: N MEC sites, M fogs per site, link params."""

    mecs: tuple
    fogs: tuple  # fogs[i][k] is the k-th fog of MEC i
    distances: np.ndarray  # (N, N) meters, symmetric, zero diagonal
    bandwidth: float  # Hz
    noise_density: float  # W/Hz
    packet_bits: float
    h_neighbors: int
    q_fogs: int
    b_min: int
    b_max: int

    def __post_init__(self):
        n = len(self.mecs)
        d = np.asarray(self.distances, dtype=float)
        if d.shape != (n, n):
            raise ConfigError("distances", f"expected shape ({n}, {n}), got {d.shape}")
        if not np.allclose(d, d.T) or np.any(np.diag(d) != 0.0):
            raise ConfigError("distances", "must be symmetric with zero diagonal")
        if n >= 2 and not 1 <= self.h_neighbors <= n - 1:
            raise ConfigError("h_neighbors", f"must lie in [1, {n - 1}] for {n} MECs")
        if n == 1 and self.h_neighbors != 0:
            raise ConfigError("h_neighbors", "must be 0 for a single-MEC topology")
        m = len(self.fogs[0]) if self.fogs else 0
        if not 1 <= self.q_fogs <= m:
            raise ConfigError("q_fogs", f"must lie in [1, {m}]")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)

    @property
    def n_mecs(self) -> int:
        return len(self.mecs)

    @property
    def fogs_per_mec(self) -> int:
        return len(self.fogs[0]) if self.fogs else 0

    @cached_property
    def neighbor_sets(self) -> np.ndarray:
        """(N, h) indices of each MEC's offload targets, nearest first."""
        n, h = self.n_mecs, self.h_neighbors
        out = np.zeros((n, h), dtype=np.int64)
        for i in range(n):
            others = [j for j in range(n) if j != i]
            others.sort(key=lambda j: (self.distances[i, j], j))
            out[i] = others[:h]
        out.setflags(write=False)
        return out

    @cached_property
    def fog_sets(self) -> np.ndarray:
        """(N, q) indices of each MEC's offload fogs, largest capacity first."""
        n, q = self.n_mecs, self.q_fogs
        out = np.zeros((n, q), dtype=np.int64)
        for i in range(n):
            ranked = sorted(
                range(self.fogs_per_mec),
                key=lambda k: (-self.fogs[i][k].service_rate, k),
            )
            out[i] = ranked[:q]
        out.setflags(write=False)
        return out

    @cached_property
    def downlink_rates(self) -> np.ndarray:
        """(N, M) MEC->fog channel rates in bits/s (MEC transmit power)."""
        return self._link_rates(use_mec_power=True)

    @cached_property
    def uplink_rates(self) -> np.ndarray:
        """(N, M) fog->MEC channel rates in bits/s (fog transmit power)."""
        return self._link_rates(use_mec_power=False)

    def _link_rates(self, use_mec_power: bool) -> np.ndarray:
        n, m = self.n_mecs, self.fogs_per_mec
        out = np.zeros((n, m))
        for i in range(n):
            for k in range(m):
                fog = self.fogs[i][k]
                power = self.mecs[i].tx_power if use_mec_power else fog.tx_power
                snr = power * fog.channel_gain**2 / (self.noise_density * self.bandwidth)
                out[i, k] = self.bandwidth * math.log2(1.0 + snr)
        out.setflags(write=False)
        return out


def generate_topology(cfg, seed: int) -> Topology:
    """Sample a topology from a :class:`~mecvf.config.SimConfig`.

    Pairwise MEC distances are uniform in [dist_min, dist_max]; fog vehicle
    counts are uniform integers in [b_min, b_max]. Pure function of
    (cfg, seed).
    """
    _validate_topology_config(cfg)
    rng = np.random.default_rng(seed)
    n, m = cfg.n_mecs, cfg.fogs_per_mec

    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = rng.uniform(cfg.dist_min, cfg.dist_max)

    mecs = tuple(
        MecSite(id=i, service_rate=cfg.mec_capacity, tx_power=cfg.mec_tx_power)
        for i in range(n)
    )
    fogs = tuple(
        tuple(_make_fog(cfg, i, k, rng) for k in range(m)) for i in range(n)
    )
    h = cfg.h_neighbors if cfg.h_neighbors is not None else max(n - 1, 0)
    q = cfg.q_fogs if cfg.q_fogs is not None else m
    return Topology(
        mecs=mecs,
        fogs=fogs,
        distances=dist,
        bandwidth=cfg.bandwidth,
        noise_density=cfg.noise_density,
        packet_bits=cfg.packet_bits,
        h_neighbors=h,
        q_fogs=q,
        b_min=cfg.b_min,
        b_max=cfg.b_max,
    )


def _make_fog(cfg, owner: int, k: int, rng) -> VehicularFog:
    count = int(rng.integers(cfg.b_min, cfg.b_max + 1))
    return VehicularFog(
        id=k,
        owner_mec=owner,
        vehicle_count=count,
        per_vehicle_rate=cfg.per_vehicle_rate,
        cpu_cycles_per_bit=cfg.cycles_per_bit,
        energy_per_cycle=cfg.energy_per_cycle,
        return_ratio=cfg.return_ratio,
        tx_power=cfg.vf_tx_power,
        channel_gain=cfg.channel_gain,
    )


def _validate_topology_config(cfg):
    for name in ("mec_capacity", "per_vehicle_rate", "bandwidth", "noise_density",
                 "mec_tx_power", "vf_tx_power", "packet_bits"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(name, "must be positive")
    if cfg.n_mecs < 1:
        raise ConfigError("n_mecs", "must be at least 1")
    if cfg.fogs_per_mec < 1:
        raise ConfigError("fogs_per_mec", "must be at least 1")
    if cfg.b_min < 1 or cfg.b_min > cfg.b_max:
        raise ConfigError("b_min", "need 1 <= b_min <= b_max")
    if cfg.dist_min <= 0 or cfg.dist_min > cfg.dist_max:
        raise ConfigError("dist_min", "need 0 < dist_min <= dist_max")
    if cfg.h_neighbors is not None and not 0 <= cfg.h_neighbors <= cfg.n_mecs - 1:
        raise ConfigError("h_neighbors", f"must lie in [0, {cfg.n_mecs - 1}]")
    if cfg.h_neighbors == 0 and cfg.n_mecs > 1:
        raise ConfigError("h_neighbors", "must be >= 1 when there are neighbors")
    if cfg.q_fogs is not None and not 1 <= cfg.q_fogs <= cfg.fogs_per_mec:
        raise ConfigError("q_fogs", f"must lie in [1, {cfg.fogs_per_mec}]")


def sample_arrivals(profile: TrafficProfile, n_mecs: int, seed=None, rng=None) -> np.ndarray:
    """Draw each MEC's mean arrival rate uniformly from the profile's set.

    The draw is held constant for a whole episode (fluid traffic model).
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    rates = np.asarray(profile.rates, dtype=float)
    return rng.choice(rates, size=n_mecs)


def resample_vehicles(topology: Topology, seed=None, rng=None) -> Topology:
    """Redraw every fog's vehicle count uniformly in [b_min, b_max].

    Returns a new topology; the input is untouched. Pool capacities follow
    from the new counts.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    counts = rng.integers(topology.b_min, topology.b_max + 1,
                          size=(topology.n_mecs, topology.fogs_per_mec))
    fogs = tuple(
        tuple(
            _with_count(topology.fogs[i][k], int(counts[i, k]))
            for k in range(topology.fogs_per_mec)
        )
        for i in range(topology.n_mecs)
    )
    return Topology(
        mecs=topology.mecs,
        fogs=fogs,
        distances=topology.distances,
        bandwidth=topology.bandwidth,
        noise_density=topology.noise_density,
        packet_bits=topology.packet_bits,
        h_neighbors=topology.h_neighbors,
        q_fogs=topology.q_fogs,
        b_min=topology.b_min,
        b_max=topology.b_max,
    )


def _with_count(fog: VehicularFog, count: int) -> VehicularFog:
    return VehicularFog(
        id=fog.id,
        owner_mec=fog.owner_mec,
        vehicle_count=count,
        per_vehicle_rate=fog.per_vehicle_rate,
        cpu_cycles_per_bit=fog.cpu_cycles_per_bit,
        energy_per_cycle=fog.energy_per_cycle,
        return_ratio=fog.return_ratio,
        tx_power=fog.tx_power,
        channel_gain=fog.channel_gain,
    )
