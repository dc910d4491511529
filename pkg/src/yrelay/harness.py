"""Seeded sweep orchestration, slope fitting, and report emission.

A sweep runs `trials` independent rounds at every power point. Channel
realizations are shared across power points of the same trial (common random
numbers), while symbols and noise are redrawn per (point, trial). All
sub-seeds derive from the master seed with a splitmix64 chain, so a report is
a pure function of (config, seed): repeated runs emit identical bytes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

from .alignment import DofVector, build_stream_plan
from .channel import SystemConfig, sample_channels
from .errors import Underdetermined
from .transceiver import GENIE, RAW, run_round

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

SUBSEED_CHANNEL = 0xC4
SUBSEED_ROUND = 0x0E


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, *ids: int) -> int:
    """Deterministic sub-seed from a master seed and an id path."""
    x = master & _MASK64
    for i in ids:
        x = _splitmix64(x ^ ((i + 1) * _GOLDEN & _MASK64))
    return x


def db_to_linear(p_db: float) -> float:
    return 10.0 ** (p_db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; `system.P` is overridden per sweep point."""

    system: SystemConfig
    dof: DofVector
    sweep_db: tuple
    trials: int
    seed: int
    mode: str = GENIE
    noise: bool = True

    def __post_init__(self):
        if len(self.sweep_db) == 0:
            raise ValueError("sweep needs at least one power point")
        if any(b <= a for a, b in zip(self.sweep_db, self.sweep_db[1:])):
            raise ValueError("sweep points must be strictly increasing")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        if self.mode not in (GENIE, RAW):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "k": self.system.K,
            "m": self.system.M,
            "n": self.system.N,
            "dof": self.dof.to_dict(),
            "sweep_db": list(self.sweep_db),
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
            "noise": self.noise,
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepRow:
    p_db: float
    mean_stream_snr: float
    mean_rate_proxy: float
    sum_rate_proxy: float
    err_mean: float
    err_max: float


@dataclass(frozen=True)
class SweepReport:
    """Per-point aggregates, the fitted slope (when >= 3 points), and
    self-describing provenance."""

    rows: tuple
    slope: float | None
    intercept: float | None
    residual: float | None
    config: dict
    config_hash: str
    seed: int
    version: str

    def to_dict(self) -> dict:
        return {
            "provenance": {
                "config": self.config,
                "config_hash": self.config_hash,
                "seed": self.seed,
                "version": self.version,
            },
            "rows": [dataclasses.asdict(r) for r in self.rows],
            "fit": None
            if self.slope is None
            else {"slope": self.slope, "intercept": self.intercept, "residual": self.residual},
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n").encode()

    def to_csv_bytes(self) -> bytes:
        lines = [
            f"# yrelay sweep v1 config={self.config_hash} seed={self.seed} version={self.version}"
        ]
        lines.append("p_db,mean_stream_snr,mean_rate_proxy,sum_rate_proxy,err_mean,err_max")
        for r in self.rows:
            lines.append(
                f"{r.p_db!r},{r.mean_stream_snr!r},{r.mean_rate_proxy!r},"
                f"{r.sum_rate_proxy!r},{r.err_mean!r},{r.err_max!r}"
            )
        if self.slope is not None:
            lines.append(f"# fit slope={self.slope!r} intercept={self.intercept!r} residual={self.residual!r}")
        return ("\n".join(lines) + "\n").encode()


def fit_slope(points):
    """Ordinary least squares for y = slope*x + intercept.

    Returns (slope, intercept, rms residual). Needs >= 2 points with
    distinct x values.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise Underdetermined(f"slope fit needs >= 2 points, got {len(pts)}")
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    if sxx == 0:
        raise Underdetermined("slope fit needs distinct x values")
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    slope = sxy / sxx
    intercept = my - slope * mx
    rss = sum((y - slope * x - intercept) ** 2 for x, y in pts)
    return slope, intercept, math.sqrt(rss / n)


def run_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Run the full power sweep; deterministic given (cfg, seed)."""
    build_stream_plan(cfg.dof, cfg.system.N)  # raise Infeasible before any work
    channels = [
        sample_channels(cfg.system, derive_seed(cfg.seed, SUBSEED_CHANNEL, t))
        for t in range(cfg.trials)
    ]

    rows = []
    for pi, p_db in enumerate(cfg.sweep_db):
        system = dataclasses.replace(cfg.system, P=db_to_linear(p_db))
        snr_sum = rate_sum = sum_rate_sum = err_sum = 0.0
        err_max = 0.0
        for t in range(cfg.trials):
            res = run_round(
                system,
                channels[t],
                cfg.dof,
                seed=derive_seed(cfg.seed, SUBSEED_ROUND, pi, t),
                mode=cfg.mode,
                noise=cfg.noise,
            )
            streams = res.snr.streams
            if streams:
                snr_sum += sum(s.effective for s in streams.values()) / len(streams)
                rate_sum += res.snr.rate_proxy / len(streams)
            sum_rate_sum += res.snr.rate_proxy
            errs = [e for e in res.rel_errors.values()]
            if errs:
                err_sum += sum(errs) / len(errs)
                err_max = max(err_max, max(errs))
        rows.append(
            SweepRow(
                p_db=float(p_db),
                mean_stream_snr=snr_sum / cfg.trials,
                mean_rate_proxy=rate_sum / cfg.trials,
                sum_rate_proxy=sum_rate_sum / cfg.trials,
                err_mean=err_sum / cfg.trials,
                err_max=err_max,
            )
        )

    slope = intercept = residual = None
    if len(rows) >= 3:
        slope, intercept, residual = fit_slope(
            [(math.log2(db_to_linear(r.p_db)), r.sum_rate_proxy) for r in rows]
        )

    from . import __version__

    return SweepReport(
        rows=tuple(rows),
        slope=slope,
        intercept=intercept,
        residual=residual,
        config=cfg.to_dict(),
        config_hash=cfg.digest(),
        seed=cfg.seed,
        version=__version__,
    )
