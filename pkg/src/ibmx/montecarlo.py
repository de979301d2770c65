"""Euler path simulation of Brownian exit times and iterated-Brownian survival estimators.

Brownian motion is standard (generator Delta/2): each coordinate gets an ``N(0, h)``
increment per step. Path ``i`` of a run draws only from its own counter-based stream
``(seed, family, i)``; within it, step ``k`` uses counters ``k*(dim+1) + j`` for the normal
coordinates and ``k*(dim+1) + dim`` for the bridge-crossing uniform. Paths are processed
in fixed-size blocks and concatenated in path order, so no output depends on how many
threads ran the blocks, nor on ``SimConfig.streams``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import interval
from .domains import Domain, TwistedDomain
from .rng import CounterRNG, LaneStreams

__all__ = [
    "SimConfig",
    "SurvivalCurve",
    "ibm_survival_conditional",
    "ibm_survival_direct",
    "sample_bm_exit",
    "simulate_exit_times",
    "survival_curve_bm",
    "worker_count",
]

BLOCK = 4096
_OUTER = "outer"
_INNER = "inner"
_INNER_BRIDGE = "inner-bridge"


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    With ``adaptive`` the step is ``step * clamp(d**2, min_fraction, 1)`` where ``d`` is
    the distance bound at the current point; otherwise every step is ``step``.
    """

    step: float = 1e-3
    horizon: float = 1e4
    samples: int = 10_000
    seed: int = 0
    streams: int = 1
    bridge_correction: bool = True
    adaptive: bool = False
    min_fraction: float = 1e-2

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValueError(f"step must be positive, got {self.step}")
        if not (math.isfinite(self.horizon) and self.horizon >= self.step):
            raise ValueError(f"horizon must be finite and >= step, got {self.horizon}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples}")
        if int(self.streams) != self.streams or self.streams < 1:
            raise ValueError(f"streams must be a positive integer, got {self.streams}")
        if not 0 < self.min_fraction <= 1:
            raise ValueError("min_fraction must lie in (0, 1]")


@dataclass
class SurvivalCurve:
    t: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    n: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.estimate = np.asarray(self.estimate, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        self.n = np.asarray(self.n, dtype=np.int64)
        if self.t.ndim != 1 or np.any(np.diff(self.t) <= 0):
            raise ValueError("survival curve times must be strictly increasing")

    def __len__(self):
        return self.t.size

    def rows(self):
        for i in range(self.t.size):
            yield float(self.t[i]), float(self.estimate[i]), float(self.stderr[i]), int(self.n[i])


def worker_count(cfg: SimConfig | None = None) -> int:
    env = os.environ.get("IBMX_THREADS", "").strip()
    n = int(env) if env else (os.cpu_count() or 1)
    n = max(1, n)
    if cfg is not None:
        n = min(n, cfg.streams)
    return n


def _grid(ts):
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    return ts


def _start(domain: Domain, z):
    pts, _ = domain._points(z)
    if pts.shape[0] != 1:
        raise ValueError("start point must be a single point")
    if not domain._contains(pts)[0]:
        raise ValueError("start point must lie inside the domain")
    return pts[0]


def _run_paths(n, dim, start, inside, dist, rng, family, lanes, step, horizon,
               bridge, adaptive=False, min_fraction=1e-2, coarsen=1, bridge_family=None):
    """Core Euler loop for ``n`` paths; returns (tau, censored).

    ``inside(pts, idx)`` / ``dist(pts, idx)`` evaluate the domain for paths ``idx``.
    With ``coarsen = m`` each step of length ``step`` is made of ``m`` unit normals,
    summed and scaled, so a run with ``step/m`` and ``coarsen=1`` is path-coupled to it.
    """
    streams = LaneStreams(rng, family, lanes)
    bstreams = LaneStreams(rng, bridge_family, lanes) if bridge_family else streams
    draws = dim * coarsen + (0 if bridge_family else 1)
    pos = np.broadcast_to(start, (n, dim)).copy() if np.ndim(start) == 1 else np.array(start, dtype=float)
    tau = np.full(n, float(horizon))
    censored = np.ones(n, dtype=bool)
    alive = np.arange(n)
    t = np.zeros(n)
    need_d = bridge or adaptive
    d1 = dist(pos, alive) if need_d else None
    n_fixed = max(1, int(math.ceil(horizon / step - 1e-9)))
    k = 0
    while alive.size:
        if adaptive:
            h = step * np.clip(d1 * d1, min_fraction, 1.0)
            h = np.minimum(h, horizon - t)
            t_new = t + h
            t_new[h >= horizon - t - 1e-12 * horizon] = horizon
        else:
            t_now = k * step
            t_next = horizon if k + 1 >= n_fixed else (k + 1) * step
            h = np.full(alive.size, t_next - t_now)
            t_new = np.full(alive.size, t_next)
        base = k * draws
        inc = np.empty((alive.size, dim))
        for j in range(dim):
            if coarsen == 1:
                inc[:, j] = streams.normal(base + j, alive)
            else:
                acc = streams.normal(base + j * coarsen, alive)
                for m in range(1, coarsen):
                    acc += streams.normal(base + j * coarsen + m, alive)
                inc[:, j] = acc / math.sqrt(coarsen)
        new = pos + np.sqrt(h)[:, None] * inc
        stay = inside(new, alive)
        d2 = None
        if need_d:
            d2 = np.zeros(alive.size)
            if stay.any():
                d2[stay] = dist(new[stay], alive[stay])
        if bridge:
            ucount = k if bridge_family else base + dim
            u = bstreams.uniform(ucount, alive)
            with np.errstate(over="ignore"):
                p_cross = np.exp(-2.0 * d1 * d2 / h)
            stay &= ~(u < p_cross)
        gone = ~stay
        if gone.any():
            tau[alive[gone]] = t_new[gone]
            censored[alive[gone]] = False
        keep = stay & (t_new < horizon)
        alive = alive[keep]
        pos = new[keep]
        t = t_new[keep]
        if need_d:
            d1 = d2[keep]
        k += 1
    return tau, censored


def _domain_fns(domain: Domain):
    return (lambda pts, idx: domain._contains(pts)), (lambda pts, idx: np.maximum(domain._distance(pts), 0.0))


def _blocks(n):
    return [(lo, min(n, lo + BLOCK)) for lo in range(0, n, BLOCK)]


def _map_blocks(fn, n, workers):
    blocks = _blocks(n)
    if workers <= 1 or len(blocks) == 1:
        parts = [fn(lo, hi) for lo, hi in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda b: fn(*b), blocks))
    return [np.concatenate(p) for p in zip(*parts)]


def simulate_exit_times(domain: Domain, z, cfg: SimConfig, n: int | None = None,
                        horizon: float | None = None, first_path: int = 0):
    """Exit times of paths ``first_path .. first_path+n-1``; returns (tau, censored)."""
    z = _start(domain, z)
    n = cfg.samples if n is None else int(n)
    horizon = cfg.horizon if horizon is None else float(horizon)
    if isinstance(domain, TwistedDomain):
        # grow the geometry up front so threads only ever read it
        domain.ensure_radius(float(np.hypot(*z)) + 12.0 * math.sqrt(horizon))
    inside, dist = _domain_fns(domain)
    rng = CounterRNG(cfg.seed)
    step = min(cfg.step, horizon)

    def block(lo, hi):
        lanes = np.arange(first_path + lo, first_path + hi, dtype=np.uint64)
        return _run_paths(hi - lo, domain.dim, z, inside, dist, rng, _OUTER, lanes, step, horizon,
                          cfg.bridge_correction, cfg.adaptive, cfg.min_fraction)

    return _map_blocks(block, n, worker_count(cfg))


def sample_bm_exit(domain: Domain, z, cfg: SimConfig, lane: int, draw: int = 0):
    """The ``draw``-th exit time of stream ``lane``; returns (tau, censored).

    Stream ``lane`` owns paths ``lane, lane + streams, lane + 2*streams, ...`` of a run,
    so this reproduces exactly the corresponding path of :func:`survival_curve_bm`.
    """
    if not 0 <= lane < cfg.streams:
        raise ValueError(f"lane must lie in [0, {cfg.streams}), got {lane}")
    path = int(draw) * cfg.streams + int(lane)
    tau, cens = simulate_exit_times(domain, z, cfg, n=1, first_path=path)
    return float(tau[0]), bool(cens[0])


def _binomial_curve(ts, alive_counts, n, meta):
    est = alive_counts / n
    se = np.sqrt(est * (1.0 - est) / n)
    return SurvivalCurve(ts, est, se, np.full(ts.size, n), meta)


def survival_curve_bm(domain: Domain, z, ts, cfg: SimConfig) -> SurvivalCurve:
    """Empirical ``P[tau > t]`` over ``cfg.samples`` paths with binomial standard errors.

    Paths are only followed up to ``max(ts)``: beyond it their indicator is fixed.
    """
    ts = _grid(ts)
    if cfg.horizon < ts[-1]:
        raise ValueError(f"horizon {cfg.horizon} is below the largest grid time {ts[-1]}")
    t_stop = ts[-1] if ts[-1] > 0 else cfg.step
    tau, cens = simulate_exit_times(domain, z, cfg, horizon=t_stop)
    n = tau.size
    alive = np.array([np.count_nonzero(cens | (tau > t)) for t in ts], dtype=float)
    exits = int(np.count_nonzero(~cens))
    meta = {"estimator": "bm-mc", "exits": exits, "survivors": n - exits, "followed_to": float(t_stop),
            "censored": int(np.count_nonzero(cens)) if t_stop >= cfg.horizon else 0}
    return _binomial_curve(ts, alive, n, meta)


def _exit_pairs(domain, z, cfg):
    tau, cens = simulate_exit_times(domain, z, cfg, n=2 * cfg.samples)
    return tau[0::2], tau[1::2], cens[0::2] | cens[1::2]


def _pair_meta(estimator, cens, cfg):
    n_cens = int(np.count_nonzero(cens))
    return {"estimator": estimator, "pairs": cfg.samples, "censored_pairs": n_cens,
            "upper_bias": n_cens > 0, "horizon": cfg.horizon}


def _mean_curve(ts, values, meta):
    n = values.shape[0]
    est = values.mean(axis=0)
    se = values.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(ts.size)
    return SurvivalCurve(ts, est, se, np.full(ts.size, n), meta)


def ibm_survival_conditional(domain: Domain, z, ts, cfg: SimConfig) -> SurvivalCurve:
    """Average of the exact inner survival ``P[eta(-tau-, tau+) > t]`` over simulated pairs.

    Pair ``i`` uses paths ``2i`` (negative half) and ``2i+1`` (positive half). Censored
    exit times shorten the inner interval, so any censoring biases the estimate upward;
    the curve metadata records it.
    """
    ts = _grid(ts)
    tm, tp, cens = _exit_pairs(domain, z, cfg)
    vals = interval.survival_uv(tm[:, None], tp[:, None], ts[None, :])
    return _mean_curve(ts, np.asarray(vals), _pair_meta("ibm-mc-conditional", cens, cfg))


def ibm_survival_direct(domain: Domain, z, ts, cfg: SimConfig, inner_step: float | None = None,
                        coarsen: int = 1) -> SurvivalCurve:
    """Indicator estimator: an Euler inner path ``Y`` must stay in ``(-tau-, tau+)`` up to t.

    The exit pairs are those of :func:`ibm_survival_conditional` with the same config.
    The inner step is ``inner_step * coarsen`` (``inner_step`` defaults to ``cfg.step``),
    built from ``coarsen`` unit draws, so ``coarsen=4`` and ``coarsen=1`` give coupled
    paths at a 4x step ratio.
    """
    ts = _grid(ts)
    tm, tp, cens = _exit_pairs(domain, z, cfg)
    n = tm.size
    fine = cfg.step if inner_step is None else float(inner_step)
    if not fine > 0 or int(coarsen) != coarsen or coarsen < 1:
        raise ValueError("inner_step must be positive and coarsen a positive integer")
    t_stop = ts[-1]
    if t_stop > 0:
        rng = CounterRNG(cfg.seed)

        def block(lo, hi):
            a, b = -tm[lo:hi], tp[lo:hi]
            inside = lambda pts, idx: (pts[:, 0] > a[idx]) & (pts[:, 0] < b[idx])  # noqa: E731
            dist = lambda pts, idx: np.maximum(np.minimum(pts[:, 0] - a[idx], b[idx] - pts[:, 0]), 0.0)  # noqa: E731
            lanes = np.arange(lo, hi, dtype=np.uint64)
            return _run_paths(hi - lo, 1, np.zeros(1), inside, dist, rng, _INNER, lanes,
                              min(fine * coarsen, t_stop), t_stop, cfg.bridge_correction,
                              coarsen=int(coarsen), bridge_family=_INNER_BRIDGE)

        eta, eta_cens = _map_blocks(block, n, worker_count(cfg))
    else:
        eta, eta_cens = np.zeros(n), np.ones(n, dtype=bool)
    vals = (eta_cens[:, None] | (eta[:, None] > ts[None, :])).astype(float)
    meta = _pair_meta("ibm-mc-direct", cens, cfg)
    meta["inner_step"] = fine * coarsen
    return _mean_curve(ts, vals, meta)
