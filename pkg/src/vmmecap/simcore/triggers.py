"""Scenario generator: per-device procedure triggers over a finite horizon.

UEs run the session/AAP state machine (service request on activity start
while idle, release when the inactivity timer fires, handover at every cell
crossing while holding signaling state); MTCDs replay their MMPP packet
stream against the same timer logic, without mobility. Each device owns an
independent random stream derived from the master seed, so traces are
reproducible and insensitive to device ordering.

Devices are warmed up over a lead-in interval before time zero; triggers
from the lead-in are dropped, as are any release/handover triggers that
would precede a device's first in-horizon service request, keeping the
trace causally consistent (SRR/HR only after a matching SR).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .. import dists
from ..dists import Dist
from ..errors import ParameterError
from ..mmpp import MmppParams, mmpp_packet_stream
from ..workload import (
    AppProfile,
    CallModel,
    CellGeometry,
    TrafficMix,
    VideoModel,
    WebModel,
    app_session_moments,
)

PROC_SR, PROC_SRR, PROC_HR = 0, 1, 2
KIND_UE, KIND_MTCD = 0, 1
PROC_NAMES = ("SR", "SRR", "HR")
KIND_NAMES = ("UE", "MTCD")


@dataclass(frozen=True)
class TriggerTrace:
    """Column-oriented trigger trace, sorted by time."""

    time_s: np.ndarray
    device_id: np.ndarray
    device_kind: np.ndarray  # 0 = UE, 1 = MTCD
    procedure: np.ndarray  # 0 = SR, 1 = SRR, 2 = HR
    horizon_s: float
    n_u: int
    n_d: int

    def __len__(self) -> int:
        return len(self.time_s)

    def counts(self) -> dict:
        """Per (device kind, procedure) trigger counts."""
        out = {}
        for kind, kname in enumerate(KIND_NAMES):
            sel = self.device_kind == kind
            for proc, pname in enumerate(PROC_NAMES):
                out[f"{kname}_{pname}"] = int(np.sum(sel & (self.procedure == proc)))
        return out

    @property
    def n_messages(self) -> int:
        per_proc = np.array([3, 3, 2])
        return int(per_proc[self.procedure].sum())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "device_id", "device_kind", "procedure"])
            for t, d, k, p in zip(self.time_s, self.device_id,
                                  self.device_kind, self.procedure):
                w.writerow([f"{t:.9f}", int(d), KIND_NAMES[k], PROC_NAMES[p]])

    @staticmethod
    def from_csv(path, horizon_s: float, n_u: int, n_d: int) -> "TriggerTrace":
        kinds = {n: i for i, n in enumerate(KIND_NAMES)}
        procs = {n: i for i, n in enumerate(PROC_NAMES)}
        t, d, k, p = [], [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                t.append(float(row["time_s"]))
                d.append(int(row["device_id"]))
                k.append(kinds[row["device_kind"]])
                p.append(procs[row["procedure"]])
        return TriggerTrace(
            np.asarray(t), np.asarray(d, dtype=np.int64),
            np.asarray(k, dtype=np.uint8), np.asarray(p, dtype=np.uint8),
            horizon_s, n_u, n_d,
        )


def device_rng(seed: int, device_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, device_index])


# ---------------------------------------------------------------------------
# per-AAP duration sampling (simulation-side counterpart of the analytic means)
# ---------------------------------------------------------------------------

def sample_aap_duration(model, link_rate_bps: float, rng: np.random.Generator) -> float:
    if isinstance(model, WebModel):
        main = dists.sample(model.main_obj_bytes, rng)
        k = int(round(dists.sample(model.n_embedded, rng)))
        total = main + (dists.sample(model.embedded_obj_bytes, rng, size=k).sum() if k else 0.0)
        parse = dists.sample(model.parsing_time_s, rng)
        if model.parsing_per_object:
            parse *= 1 + k
        return total * 8.0 / link_rate_bps + parse
    if isinstance(model, VideoModel):
        enc = dists.sample(model.encoding_rate_choices[rng.integers(len(model.encoding_rate_choices))], rng)
        dur = dists.sample(model.duration_s, rng)
        burst = min(dur, model.burst_media_s)
        return burst * enc / link_rate_bps + max(dur - model.burst_media_s, 0.0) / model.throttle_factor
    if isinstance(model, CallModel):
        return dists.sample(model.holding_time_s, rng)
    raise ParameterError(f"unknown AAP model {type(model).__name__}")


# ---------------------------------------------------------------------------
# mobility: cell-crossing times of reflected straight-line motion
# ---------------------------------------------------------------------------

def _axis_crossings(x0, v, span, lines, t_a, t_b):
    """Times in (t_a, t_b] when the reflected coordinate hits any of `lines`.

    Reflection in [0, span] unfolds to straight motion with period 2*span:
    the device is at line g whenever x0 + v*t = +-g (mod 2*span).
    """
    if v == 0.0 or not lines:
        return []
    period = 2.0 * span
    out = []
    for g in lines:
        for target in (g, -g):
            # x0 + v t = target + period*k  <=>  k = (x0 + v t - target)/period
            k1 = (x0 + v * t_a - target) / period
            k2 = (x0 + v * t_b - target) / period
            k_lo, k_hi = min(k1, k2), max(k1, k2)
            for k in range(math.ceil(k_lo - 1e-12), math.floor(k_hi + 1e-12) + 1):
                t = (target + period * k - x0) / v
                if t_a < t <= t_b:
                    out.append(t)
    return out


def _crossing_times(windows, x0, y0, vx, vy, geom: CellGeometry):
    """Cell-boundary crossing times within the active windows.

    Only interior grid lines count: bouncing at the outer edge keeps the
    device in its cell, so no handover is generated there.
    """
    w, h = geom.cell_width_m, geom.cell_height_m
    span_x = geom.grid_cols * w
    span_y = geom.grid_rows * h
    v_lines = [i * w for i in range(1, geom.grid_cols)]
    h_lines = [j * h for j in range(1, geom.grid_rows)]
    out = []
    for t_a, t_b in windows:
        out.extend(_axis_crossings(x0, vx, span_x, v_lines, t_a, t_b))
        out.extend(_axis_crossings(y0, vy, span_y, h_lines, t_a, t_b))
    return out


# ---------------------------------------------------------------------------
# per-device generators
# ---------------------------------------------------------------------------

def _ue_events(rng, mix: TrafficMix, geom: CellGeometry, speed_dist: Dist,
               t_i: float, horizon_s: float, settle_s: float):
    """(times, procs) for one UE, lead-in included and later clipped."""
    p_apps = np.array([a.p_app for a in mix.apps])
    cum = np.cumsum(p_apps)
    mean_sst = []
    for app in mix.apps:
        mom = app_session_moments(app, mix.link_rate_bps)
        mean_sst.append(mix.mean_iast_s - mom.mean_t_sd_s)
        if mean_sst[-1] <= 0:
            raise ParameterError(
                f"app {app.name!r}: session duration exceeds the IAST budget"
            )

    span_x = geom.grid_cols * geom.cell_width_m
    span_y = geom.grid_rows * geom.cell_height_m
    x0 = rng.uniform(0.0, span_x)
    y0 = rng.uniform(0.0, span_y)
    speed = dists.sample(speed_dist, rng)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    vx, vy = speed * math.cos(heading), speed * math.sin(heading)

    times, procs = [], []
    windows = []  # connected intervals, for handover generation
    t_end = -settle_s  # a session "just ended"; device starts disconnected
    connected = False
    win_start = None

    def close_window(at):
        nonlocal connected, win_start
        times.append(at)
        procs.append(PROC_SRR)
        windows.append((win_start, at))
        connected = False
        win_start = None

    while t_end < horizon_s:
        ai = int(np.searchsorted(cum, rng.random(), side="right"))
        ai = min(ai, len(mix.apps) - 1)
        app: AppProfile = mix.apps[ai]
        t_sst = rng.exponential(mean_sst[ai])
        if connected and t_sst > t_i:
            close_window(t_end + t_i)
        t_start = t_end + t_sst
        if t_start >= horizon_s:
            break
        n = max(1, int(round(dists.sample(app.n_aap, rng))))
        t_cur = t_start
        for j in range(n):
            if not connected:
                times.append(t_cur)
                procs.append(PROC_SR)
                connected = True
                win_start = t_cur
            t_cur += sample_aap_duration(app.model, mix.link_rate_bps, rng)
            if j < n - 1:
                d = dists.sample(app.reading_time_s, rng)
                if d > t_i:
                    close_window(t_cur + t_i)
                t_cur += d
        t_end = t_cur
    if connected:
        # timer pending past the horizon: the window runs to the horizon
        windows.append((win_start, min(t_end + t_i, horizon_s)))

    for t in _crossing_times(windows, x0, y0, vx, vy, geom):
        times.append(t)
        procs.append(PROC_HR)
    return np.asarray(times), np.asarray(procs, dtype=np.uint8)


def _mtcd_events(rng, mmpp: MmppParams, t_i: float, horizon_s: float, settle_s: float):
    pk = mmpp_packet_stream(mmpp, settle_s + horizon_s, rng) - settle_s
    if len(pk) == 0:
        return np.empty(0), np.empty(0, dtype=np.uint8)
    gaps = np.diff(pk)
    sr_mask = np.concatenate(([True], gaps > t_i))  # first packet finds it idle
    sr_times = pk[sr_mask]
    srr_after = np.concatenate((gaps > t_i, [True]))  # timer runs out after these
    srr_times = pk[srr_after] + t_i
    srr_times = srr_times[srr_times < horizon_s]
    times = np.concatenate((sr_times, srr_times))
    procs = np.concatenate((
        np.zeros(len(sr_times), dtype=np.uint8),
        np.full(len(srr_times), PROC_SRR, dtype=np.uint8),
    ))
    return times, procs


def _clip_device(times, procs, horizon_s):
    """Drop lead-in triggers and any SRR/HR preceding the first kept SR."""
    if len(times) == 0:
        return times, procs
    order = np.argsort(times, kind="stable")
    times, procs = times[order], procs[order]
    keep = (times >= 0.0) & (times < horizon_s)
    times, procs = times[keep], procs[keep]
    sr_pos = np.flatnonzero(procs == PROC_SR)
    if len(sr_pos) == 0:
        return times[:0], procs[:0]
    return times[sr_pos[0]:], procs[sr_pos[0]:]


def generate_triggers(
    mix: TrafficMix,
    geom: CellGeometry,
    mmpp: MmppParams | None,
    n_u: int,
    n_d: int,
    t_i: float,
    horizon_s: float,
    seed: int,
    speed_dist: Dist | None = None,
    settle_s: float = 3000.0,
) -> TriggerTrace:
    """Generate the full scenario trace, sorted by time."""
    if horizon_s <= 0:
        raise ParameterError(f"horizon must be > 0, got {horizon_s}")
    if n_u < 0 or n_d < 0:
        raise ParameterError("device counts must be >= 0")
    if n_d > 0 and mmpp is None:
        raise ParameterError("MTCDs requested but no MMPP parameters given")
    if speed_dist is None:
        speed_dist = dists.uniform(0.0, 2.0 * geom.mean_speed_mps) \
            if geom.mean_speed_mps > 0 else dists.constant(0.0)

    all_t, all_p, all_d, all_k = [], [], [], []
    for dev in range(n_u):
        rng = device_rng(seed, dev)
        t, p = _ue_events(rng, mix, geom, speed_dist, t_i, horizon_s, settle_s)
        t, p = _clip_device(t, p, horizon_s)
        all_t.append(t)
        all_p.append(p)
        all_d.append(np.full(len(t), dev, dtype=np.int64))
        all_k.append(np.zeros(len(t), dtype=np.uint8))
    for i in range(n_d):
        dev = n_u + i
        rng = device_rng(seed, dev)
        t, p = _mtcd_events(rng, mmpp, t_i, horizon_s, settle_s)
        t, p = _clip_device(t, p, horizon_s)
        all_t.append(t)
        all_p.append(p)
        all_d.append(np.full(len(t), dev, dtype=np.int64))
        all_k.append(np.full(len(t), KIND_MTCD, dtype=np.uint8))

    if all_t:
        time_s = np.concatenate(all_t)
        proc = np.concatenate(all_p)
        dev_id = np.concatenate(all_d)
        kind = np.concatenate(all_k)
    else:
        time_s = np.empty(0)
        proc = np.empty(0, dtype=np.uint8)
        dev_id = np.empty(0, dtype=np.int64)
        kind = np.empty(0, dtype=np.uint8)
    order = np.lexsort((dev_id, time_s))
    return TriggerTrace(time_s[order], dev_id[order], kind[order], proc[order],
                        horizon_s, n_u, n_d)


def poisson_triggers(
    lam_sr: float,
    lam_srr: float,
    lam_hr: float,
    horizon_s: float,
    seed: int,
) -> TriggerTrace:
    """Memoryless trigger streams at given aggregate procedure rates.

    Used for queueing-chain validation where the analytic model's Poisson
    arrival assumption should hold by construction.
    """
    if horizon_s <= 0:
        raise ParameterError(f"horizon must be > 0, got {horizon_s}")
    rng = np.random.default_rng(seed)
    parts, procs = [], []
    for lam, code in ((lam_sr, PROC_SR), (lam_srr, PROC_SRR), (lam_hr, PROC_HR)):
        if lam < 0:
            raise ParameterError("rates must be >= 0")
        n = rng.poisson(lam * horizon_s)
        t = np.sort(rng.uniform(0.0, horizon_s, n))
        parts.append(t)
        procs.append(np.full(n, code, dtype=np.uint8))
    time_s = np.concatenate(parts)
    proc = np.concatenate(procs)
    order = np.argsort(time_s, kind="stable")
    n_tot = len(time_s)
    return TriggerTrace(time_s[order], np.zeros(n_tot, dtype=np.int64),
                        np.zeros(n_tot, dtype=np.uint8), proc[order],
                        horizon_s, 0, 0)
