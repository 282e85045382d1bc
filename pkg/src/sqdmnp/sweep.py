"""Trajectory metrics and parameter-grid sweeps of the maximum / final EoF."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import default_horizon, integrate
from .errors import OutOfRangeError, SqdMnpError, SweepError
from .model import couplings_for, resonant_delta_energy, with_detuning

__all__ = [
    "AxisSpec",
    "SweepSpec",
    "SweepGrid",
    "max_eof",
    "final_eof",
    "apply_axis",
    "run_sweep",
    "AXIS_NAMES",
    "METRICS",
]

log = logging.getLogger(__name__)

AXIS_NAMES = ("E0", "alpha", "mu", "detuning", "R")
METRICS = ("max_eof", "final_eof")


def max_eof(traj):
    """``(t_star, value)`` of the largest sampled EoF; the earliest sample wins ties."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    k = int(np.argmax(traj.eof))
    return float(traj.times[k]), float(traj.eof[k])


def final_eof(traj, t_eval):
    """EoF at ``t_eval`` (ps), linearly interpolated between neighbouring samples."""
    lo, hi = float(traj.times[0]), float(traj.times[-1])
    if not lo <= t_eval <= hi:
        raise OutOfRangeError(f"t_eval = {t_eval} ps outside trajectory range [{lo}, {hi}]")
    return float(np.interp(t_eval, traj.times, traj.eof))


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis. ``unit`` only matters for detuning: 'ev' or 'delta' (multiples of |delta|)."""

    name: str
    min: float
    max: float
    steps: int
    scale: str = "linear"
    unit: str = "ev"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError("an axis needs at least 2 steps")
        if not self.min < self.max:
            raise ValueError("axis min must be < max")
        if self.scale not in ("linear", "log"):
            raise ValueError("axis scale must be 'linear' or 'log'")
        if self.scale == "log" and self.min <= 0:
            raise ValueError("a log-scaled axis needs min > 0")
        if self.unit not in ("ev", "delta"):
            raise ValueError("axis unit must be 'ev' or 'delta'")
        if self.unit == "delta" and self.name != "detuning":
            raise ValueError("unit 'delta' only applies to the detuning axis")

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.min, self.max, int(self.steps))
        return np.linspace(self.min, self.max, int(self.steps))


@dataclass(frozen=True, eq=False)
class SweepSpec:
    base: object
    axes: tuple
    metric: str = "max_eof"
    final_time: float | None = None
    horizon: float | None = None
    sample_dt: float = 0.05
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    backend: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep has one or two axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ValueError("sweep axes must be distinct")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        if not self.sample_dt > 0:
            raise ValueError("sample_dt must be > 0")

    @property
    def shape(self):
        return tuple(int(a.steps) for a in self.axes)

    def eval_time(self, drive):
        """Time at which ``final_eof`` is read: ``2 t0`` for pulses, the horizon for cw."""
        if self.final_time is not None:
            return self.final_time
        if drive.mode == "sech":
            return 2 * drive.t0
        return self.horizon_for(drive)

    def horizon_for(self, drive):
        h = self.horizon if self.horizon is not None else default_horizon(drive)
        if self.metric == "final_eof" and self.final_time is not None:
            h = max(h, self.final_time)
        return h


@dataclass(frozen=True, eq=False)
class SweepGrid:
    axes: tuple  # ((name, values), ...)
    metric: str
    values: np.ndarray
    t_star: np.ndarray
    trace_error: np.ndarray
    n_steps: np.ndarray
    status: np.ndarray
    messages: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.values.shape

    @property
    def failed(self):
        return self.status != "ok"

    def cells(self):
        """Iterate ``(index, axis_values, metric, t_star, status)`` in C order."""
        for idx in np.ndindex(self.shape):
            coords = tuple(float(vals[i]) for (_, vals), i in zip(self.axes, idx))
            yield idx, coords, float(self.values[idx]), float(self.t_star[idx]), str(self.status[idx])


def apply_axis(params, name, value, delta_unit=None):
    """Copy of ``params`` with one swept quantity set to ``value``."""
    if name == "E0":
        return replace(params, drive=replace(params.drive, E0=float(value)))
    if name == "alpha":
        return replace(params, alpha=float(value))
    if name == "mu":
        return replace(params, mu1=float(value), mu2=float(value))
    if name == "R":
        return replace(params, R1=float(value), R2=float(value))
    if name == "detuning":
        scale = 1.0 if delta_unit is None else delta_unit
        return with_detuning(params, float(value) * scale)
    raise ValueError(f"unknown sweep axis {name!r}")


def _cell_params(spec, coords):
    params = spec.base
    for axis, value in zip(spec.axes, coords):
        unit = resonant_delta_energy(spec.base) if axis.unit == "delta" else None
        params = apply_axis(params, axis.name, value, unit)
    return params


def _evaluate_cell(job):
    spec, table, coords = job
    try:
        params = _cell_params(spec, coords)
        c = couplings_for(params, table)
        horizon = spec.horizon_for(params.drive)
        traj = integrate(
            params,
            c,
            (0.0, horizon),
            sample_dt=spec.sample_dt,
            rel_tol=spec.rel_tol,
            abs_tol=spec.abs_tol,
            backend=spec.backend,
        )
        if spec.metric == "max_eof":
            t_star, value = max_eof(traj)
        else:
            t_star = spec.eval_time(params.drive)
            value = final_eof(traj, t_star)
        return value, t_star, float(traj.trace_error.max()), traj.n_steps, "ok", ""
    except (SqdMnpError, ValueError) as exc:
        return np.nan, np.nan, np.nan, 0, "failed", f"{type(exc).__name__}: {exc}"


def run_sweep(spec, dielectric, workers=1):
    """Evaluate the metric on every grid cell.

    Cells are independent; with ``workers > 1`` they run in a process pool.
    The result does not depend on the worker count.
    """
    if int(workers) < 1:
        raise ValueError("workers must be >= 1")
    axis_values = [a.values() for a in spec.axes]
    index = list(np.ndindex(spec.shape))
    jobs = [(spec, dielectric, tuple(axis_values[d][i] for d, i in enumerate(idx))) for idx in index]

    if workers == 1 or len(jobs) == 1:
        results = [_evaluate_cell(job) for job in jobs]
    else:
        chunk = max(1, len(jobs) // (4 * int(workers)))
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(_evaluate_cell, jobs, chunksize=chunk))

    values = np.full(spec.shape, np.nan)
    t_star = np.full(spec.shape, np.nan)
    trace_err = np.full(spec.shape, np.nan)
    steps = np.zeros(spec.shape, dtype=np.int64)
    status = np.empty(spec.shape, dtype=object)
    messages = {}
    for idx, (v, ts, te, ns, st, msg) in zip(index, results):
        values[idx], t_star[idx], trace_err[idx], steps[idx], status[idx] = v, ts, te, ns, st
        if msg:
            messages[idx] = msg
            log.warning("sweep cell %s failed: %s", idx, msg)

    n_failed = len(messages)
    if n_failed * 2 > len(jobs):
        raise SweepError(f"{n_failed} of {len(jobs)} sweep cells failed; first: {next(iter(messages.values()))}")

    return SweepGrid(
        axes=tuple((a.name, v) for a, v in zip(spec.axes, axis_values)),
        metric=spec.metric,
        values=values,
        t_star=t_star,
        trace_error=trace_err,
        n_steps=steps,
        status=status,
        messages=messages,
    )
