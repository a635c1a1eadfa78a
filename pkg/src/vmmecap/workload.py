"""Analytic signaling-procedure arrival rates.

Per-UE rates come from the session/activity model (service requests when an
application activity period starts while the device is idle, releases when
the inactivity timer fires, handovers at cell crossings while active);
per-MTCD rates come from the MMPP packet process. Everything here is a pure
function of the traffic mix, the cell geometry, and the inactivity timer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dists
from .dists import Dist
from .errors import InfeasibleError, ParameterError
from .mmpp import MmppParams, mmpp_packet_stream, mmpp_stationary


# ---------------------------------------------------------------------------
# traffic-mix types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WebModel:
    """Page download: main object, then embedded objects, sequentially at link rate.

    Parsing is charged once per page by default; set `parsing_per_object`
    to charge it once per object (main + each embedded) instead.
    """

    main_obj_bytes: Dist
    embedded_obj_bytes: Dist
    n_embedded: Dist
    parsing_time_s: Dist
    parsing_per_object: bool = False


@dataclass(frozen=True)
class VideoModel:
    """Two-phase streaming: initial burst at link rate, then throttled delivery."""

    duration_s: Dist
    encoding_rate_choices: tuple[Dist, ...]  # bit/s, picked uniformly per AAP
    burst_media_s: float = 40.0
    throttle_factor: float = 1.25

    def __post_init__(self):
        if not self.encoding_rate_choices:
            raise ParameterError("video model needs at least one encoding-rate choice")
        if not self.burst_media_s >= 0:
            raise ParameterError(f"burst_media_s must be >= 0, got {self.burst_media_s}")
        if not self.throttle_factor > 0:
            raise ParameterError(f"throttle_factor must be > 0, got {self.throttle_factor}")


@dataclass(frozen=True)
class CallModel:
    """Conversational app: the AAP lasts the call holding time."""

    holding_time_s: Dist


@dataclass(frozen=True)
class AppProfile:
    name: str
    p_app: float
    n_aap: Dist  # AAPs per session (count >= 1)
    reading_time_s: Dist | None  # gap between consecutive AAPs; None iff mean n_aap == 1
    model: WebModel | VideoModel | CallModel

    def __post_init__(self):
        if not (0 <= self.p_app <= 1):
            raise ParameterError(f"p_app must be in [0,1], got {self.p_app} for {self.name!r}")
        if self.reading_time_s is None and dists.mean(self.n_aap) > 1 + 1e-9:
            raise ParameterError(
                f"app {self.name!r} has mean n_aap > 1 but no reading-time distribution"
            )


@dataclass(frozen=True)
class TrafficMix:
    apps: tuple[AppProfile, ...]
    mean_iast_s: float  # mean inter-arrival session time
    link_rate_bps: float

    def __post_init__(self):
        if not self.apps:
            raise ParameterError("traffic mix is empty")
        total = sum(a.p_app for a in self.apps)
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"app probabilities must sum to 1, got {total}")
        if not self.mean_iast_s > 0:
            raise ParameterError(f"mean IAST must be > 0, got {self.mean_iast_s}")
        if not self.link_rate_bps > 0:
            raise ParameterError(f"link rate must be > 0, got {self.link_rate_bps}")

    @property
    def session_rate(self) -> float:
        """Session arrivals per device per second."""
        return 1.0 / self.mean_iast_s


@dataclass(frozen=True)
class CellGeometry:
    cell_width_m: float
    cell_height_m: float
    grid_cols: int = 1
    grid_rows: int = 1
    mean_speed_mps: float = 0.0

    def __post_init__(self):
        if self.cell_width_m <= 0 or self.cell_height_m <= 0:
            raise ParameterError("cell dimensions must be positive")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ParameterError("grid dimensions must be >= 1")
        if self.mean_speed_mps < 0:
            raise ParameterError("mean speed must be >= 0")

    @property
    def perimeter_m(self) -> float:
        return 2.0 * (self.cell_width_m + self.cell_height_m)

    @property
    def area_m2(self) -> float:
        return self.cell_width_m * self.cell_height_m


@dataclass(frozen=True)
class ProcedureRates:
    """Per-device and aggregate procedure/message rates."""

    lam_u_sr: float
    lam_u_srr: float
    lam_u_hr: float
    lam_s_sr: float
    lam_s_srr: float
    lam_sr: float
    lam_srr: float
    lam_hr: float
    lam_total_msgs: float
    n_u: float
    n_d: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# session moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SessionMoments:
    mean_n: float  # AAPs per session
    mean_t_on_s: float  # one AAP duration
    mean_d_s: float  # one reading gap
    mean_t_sd_s: float  # whole session duration


def mean_encoding_rate(model: VideoModel) -> float:
    return float(np.mean([dists.mean(d) for d in model.encoding_rate_choices]))


def mean_aap_duration(model, link_rate_bps: float) -> float:
    """Mean duration of one application activity period, in seconds."""
    if isinstance(model, WebModel):
        n_emb = dists.mean(model.n_embedded)
        xfer_bytes = dists.mean(model.main_obj_bytes) + n_emb * dists.mean(model.embedded_obj_bytes)
        parse = dists.mean(model.parsing_time_s)
        n_parse = (1.0 + n_emb) if model.parsing_per_object else 1.0
        return xfer_bytes * 8.0 / link_rate_bps + parse * n_parse
    if isinstance(model, VideoModel):
        enc = mean_encoding_rate(model)
        dur = dists.mean(model.duration_s)
        burst_dl = model.burst_media_s * enc / link_rate_bps
        served_in_burst = dists.expected_truncated(model.duration_s, model.burst_media_s)
        return burst_dl + (dur - served_in_burst) / model.throttle_factor
    if isinstance(model, CallModel):
        return dists.mean(model.holding_time_s)
    raise ParameterError(f"unknown AAP model {type(model).__name__}")


def app_session_moments(app: AppProfile, link_rate_bps: float) -> SessionMoments:
    mean_n = dists.mean(app.n_aap)
    mean_t_on = mean_aap_duration(app.model, link_rate_bps)
    mean_d = dists.mean(app.reading_time_s) if app.reading_time_s is not None else 0.0
    mean_t_sd = mean_n * mean_t_on + (mean_n - 1.0) * mean_d
    return SessionMoments(mean_n, mean_t_on, mean_d, mean_t_sd)


# ---------------------------------------------------------------------------
# per-UE rates
# ---------------------------------------------------------------------------

def cell_crossing_rate(geom: CellGeometry) -> float:
    """Fluid-flow crossing rate: v * perimeter / (pi * area), crossings/s."""
    return geom.mean_speed_mps * geom.perimeter_m / (math.pi * geom.area_m2)


def _standby_dist(mix: TrafficMix, app: AppProfile, moments: SessionMoments) -> Dist:
    mean_sst = mix.mean_iast_s - moments.mean_t_sd_s
    if mean_sst <= 0:
        raise InfeasibleError(
            f"app {app.name!r}: mean session duration {moments.mean_t_sd_s:.3g} s "
            f">= mean IAST {mix.mean_iast_s:.3g} s, standby time would be negative"
        )
    return dists.exponential(mean_sst)


def user_active_time_fraction(mix: TrafficMix, t_i: float) -> float:
    """Fraction of time a UE holds signaling state (connected), in [0, 1].

    Active time per session is the on-air time plus the parts of each gap
    (readings, standby) the inactivity timer keeps the connection open for.
    """
    lam_sess = mix.session_rate
    p_ua = 0.0
    for app in mix.apps:
        mom = app_session_moments(app, mix.link_rate_bps)
        sst = _standby_dist(mix, app, mom)
        active = mom.mean_n * mom.mean_t_on_s
        if app.reading_time_s is not None:
            active += (mom.mean_n - 1.0) * dists.expected_truncated(app.reading_time_s, t_i)
        active += dists.expected_truncated(sst, t_i)
        p_ua += app.p_app * lam_sess * active
    return min(p_ua, 1.0)


def htc_rates(mix: TrafficMix, geom: CellGeometry, t_i: float) -> tuple[float, float, float]:
    """(lam_u_sr, lam_u_srr, lam_u_hr) per UE, procedures/s.

    An SR fires when an AAP starts after a gap the timer released (a reading
    longer than t_i, or the standby gap); the matching release makes the SRR
    rate identical. Handovers occur at cell crossings while connected.
    """
    if t_i < 0:
        raise ParameterError(f"inactivity timer must be >= 0, got {t_i}")
    lam_sess = mix.session_rate
    lam_sr = 0.0
    for app in mix.apps:
        mom = app_session_moments(app, mix.link_rate_bps)
        sst = _standby_dist(mix, app, mom)
        term = dists.tail_prob(sst, t_i)
        if app.reading_time_s is not None:
            term += (mom.mean_n - 1.0) * dists.tail_prob(app.reading_time_s, t_i)
        lam_sr += app.p_app * lam_sess * term
    lam_hr = cell_crossing_rate(geom) * user_active_time_fraction(mix, t_i)
    return lam_sr, lam_sr, lam_hr


# ---------------------------------------------------------------------------
# per-MTCD rates
# ---------------------------------------------------------------------------

def mtc_rates(
    params: MmppParams,
    t_i: float,
    method: str = "approx",
    rng: np.random.Generator | None = None,
    horizon_s: float = 2e6,
) -> tuple[float, float]:
    """(lam_s_sr, lam_s_srr) per MTCD, procedures/s.

    A packet triggers an SR iff the preceding inter-packet gap exceeded the
    inactivity timer. `approx` uses the packet-share-weighted mixture of
    per-state exponential tails (valid when dwell times are much longer than
    t_i); `monte_carlo` measures the gap tail on a generated stream.
    """
    if t_i < 0:
        raise ParameterError(f"inactivity timer must be >= 0, got {t_i}")
    _, _, mean_rate = mmpp_stationary(params)
    if mean_rate == 0:
        return 0.0, 0.0
    if method == "approx":
        pi1, pi2, _ = mmpp_stationary(params)
        w1 = params.lambda1 * pi1 / mean_rate
        w2 = params.lambda2 * pi2 / mean_rate
        p_gap = w1 * math.exp(-params.lambda1 * t_i) + w2 * math.exp(-params.lambda2 * t_i)
    elif method == "monte_carlo":
        if rng is None:
            rng = np.random.default_rng(0)
        times = mmpp_packet_stream(params, horizon_s, rng)
        if len(times) < 2:
            raise InfeasibleError(
                f"MMPP stream too sparse over {horizon_s:g} s to estimate the gap tail"
            )
        gaps = np.diff(times)
        p_gap = float(np.mean(gaps > t_i))
    else:
        raise ParameterError(f"unknown mtc_rates method {method!r}")
    lam = p_gap * mean_rate
    return lam, lam


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def aggregate_rates(
    per_ue: tuple[float, float, float],
    per_mtcd: tuple[float, float],
    n_u: float,
    n_d: float,
) -> ProcedureRates:
    """Scale per-device rates to fleet totals; MTCDs are stationary (no HR)."""
    if n_u < 0 or n_d < 0:
        raise ParameterError("device counts must be >= 0")
    lam_u_sr, lam_u_srr, lam_u_hr = per_ue
    lam_s_sr, lam_s_srr = per_mtcd
    lam_sr = n_u * lam_u_sr + n_d * lam_s_sr
    lam_srr = n_u * lam_u_srr + n_d * lam_s_srr
    lam_hr = n_u * lam_u_hr
    return ProcedureRates(
        lam_u_sr=lam_u_sr,
        lam_u_srr=lam_u_srr,
        lam_u_hr=lam_u_hr,
        lam_s_sr=lam_s_sr,
        lam_s_srr=lam_s_srr,
        lam_sr=lam_sr,
        lam_srr=lam_srr,
        lam_hr=lam_hr,
        lam_total_msgs=3.0 * lam_sr + 3.0 * lam_srr + 2.0 * lam_hr,
        n_u=n_u,
        n_d=n_d,
    )
