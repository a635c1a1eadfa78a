"""Open Jackson-network response-time model of the vMME chain.

Four stages in series: front-end (M/M/1), service-logic pool (M/M/m with a
message-mix-weighted service time), state database (M/M/1), and output
interface (M/M/1). Mean response time is the sum of the per-stage means;
propagation delay and the inter-message round trip shape arrival timing
only and are excluded from the processing-time budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import InfeasibleError, InstabilityError, ParameterError
from .mmpp import MmppParams
from .workload import (
    CellGeometry,
    ProcedureRates,
    TrafficMix,
    aggregate_rates,
    htc_rates,
    mtc_rates,
)


@dataclass(frozen=True)
class SlServiceTimes:
    """Per-message service-logic processing times, seconds."""

    t_sr1: float
    t_sr2: float
    t_sr3: float
    t_srr1: float
    t_srr2: float
    t_srr3: float
    t_hr1: float
    t_hr2: float

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if not v > 0:
                raise ParameterError(f"service time {name} must be > 0, got {v}")

    @property
    def sr_total(self) -> float:
        return self.t_sr1 + self.t_sr2 + self.t_sr3

    @property
    def srr_total(self) -> float:
        return self.t_srr1 + self.t_srr2 + self.t_srr3

    @property
    def hr_total(self) -> float:
        return self.t_hr1 + self.t_hr2


@dataclass(frozen=True)
class QueueParams:
    """Service rates and timing constants of the vMME chain."""

    mu_fe: float = 120_000.0  # front-end, jobs/s
    mu_sdb: float = 100_000.0  # state database, jobs/s
    mu_oi: float | None = 5_000_000.0  # output interface, jobs/s; None -> o_bw/o_size
    sl_times: SlServiceTimes = SlServiceTimes(
        t_sr1=127.4e-6, t_sr2=94.0e-6, t_sr3=94.0e-6,
        t_srr1=94.0e-6, t_srr2=94.0e-6, t_srr3=93.2e-6,
        t_hr1=94.0e-6, t_hr2=94.0e-6,
    )
    m: int = 1  # service-logic instances
    o_bw: float | None = None  # output link, bit/s
    o_size_bytes: float = 200.0  # mean outbound message size
    t_im: float = 15e-3  # round trip to the next inbound message, s
    prop_delay: float = 7.5e-3  # one-way eNB <-> vMME, s
    t_max: float = 1e-3  # processing-delay budget, s

    def __post_init__(self):
        if self.mu_fe <= 0 or self.mu_sdb <= 0:
            raise ParameterError("stage service rates must be > 0")
        if self.mu_oi is None and (self.o_bw is None or self.o_bw <= 0):
            raise ParameterError("either mu_oi or a positive o_bw must be given")
        if self.mu_oi is not None and self.mu_oi <= 0:
            raise ParameterError(f"mu_oi must be > 0, got {self.mu_oi}")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ParameterError(f"instance count m must be an integer >= 1, got {self.m}")
        if self.t_im < 0 or self.prop_delay < 0 or self.t_max <= 0:
            raise ParameterError("timing constants out of range")

    @property
    def mu_oi_effective(self) -> float:
        if self.mu_oi is not None:
            return self.mu_oi
        return self.o_bw / (8.0 * self.o_size_bytes)


def mm1_response(lam: float, mu: float, stage: str = "M/M/1") -> float:
    """Mean response time (wait + service) of an M/M/1 queue, seconds."""
    if lam < 0 or mu <= 0:
        raise ParameterError(f"need lam >= 0 and mu > 0, got lam={lam}, mu={mu}")
    if lam >= mu:
        raise InstabilityError(stage, lam, mu)
    return (1.0 / mu) / (1.0 - lam / mu)


def erlang_c(m: int, a: float) -> float:
    """Probability of waiting in an M/M/m queue with offered load a = lam/mu.

    Uses the Erlang-B recurrence, which is stable for large m (no factorials).
    """
    if not (isinstance(m, int) and m >= 1):
        raise ParameterError(f"m must be an integer >= 1, got {m}")
    if a < 0:
        raise ParameterError(f"offered load must be >= 0, got {a}")
    if a == 0:
        return 0.0
    if a >= m:
        raise InstabilityError("SL", a, float(m))
    b = 1.0
    for k in range(1, m + 1):
        b = a * b / (k + a * b)
    return m * b / (m - a * (1.0 - b))


def weighted_sl_service_time(rates: ProcedureRates, times: SlServiceTimes) -> float:
    """Mean per-message SL processing time under the current procedure mix, s."""
    lam = rates.lam_total_msgs
    if lam <= 0:
        raise ParameterError("total message rate is zero: service-time mix undefined")
    return (
        rates.lam_sr * times.sr_total
        + rates.lam_srr * times.srr_total
        + rates.lam_hr * times.hr_total
    ) / lam


def mmm_response(lam: float, mu_sl: float, m: int) -> float:
    """Mean response time of an M/M/m queue, seconds."""
    if mu_sl <= 0:
        raise ParameterError(f"mu_sl must be > 0, got {mu_sl}")
    a = lam / mu_sl
    if a >= m:
        raise InstabilityError("SL", lam, m * mu_sl)
    return 1.0 / mu_sl + erlang_c(m, a) / (m * mu_sl - lam)


def response_at(lam: float, t_sl: float, params: QueueParams, m: int | None = None):
    """(total response s, per-stage breakdown) at message rate `lam` with mean
    SL service time `t_sl` already fixed."""
    m = params.m if m is None else m
    mu_oi = params.mu_oi_effective
    t_fe = mm1_response(lam, params.mu_fe, "FE")
    t_sl_stage = mmm_response(lam, 1.0 / t_sl, m)
    t_db = mm1_response(lam, params.mu_sdb, "SDB")
    t_oi = mm1_response(lam, mu_oi, "OI")
    total = t_fe + t_sl_stage + t_db + t_oi
    return total, {"fe_s": t_fe, "sl_s": t_sl_stage, "db_s": t_db, "oi_s": t_oi,
                   "t_sl_bar_s": t_sl, "m": m}


def system_response(rates: ProcedureRates, params: QueueParams):
    """(total mean response s, per-stage breakdown) for the whole chain."""
    t_sl = weighted_sl_service_time(rates, params.sl_times)
    return response_at(rates.lam_total_msgs, t_sl, params)


def _min_floor_response(lam: float, t_sl: float, params: QueueParams) -> tuple[float, str]:
    """Best achievable response (m -> inf) and the dominating stage name."""
    parts = {
        "FE": mm1_response(lam, params.mu_fe, "FE"),
        "SL": t_sl,
        "SDB": mm1_response(lam, params.mu_sdb, "SDB"),
        "OI": mm1_response(lam, params.mu_oi_effective, "OI"),
    }
    total = sum(parts.values())
    return total, max(parts, key=parts.get)


def dimension(rates: ProcedureRates, params: QueueParams, t_max: float | None = None) -> int:
    """Smallest SL instance count whose total response meets the budget."""
    t_max = params.t_max if t_max is None else t_max
    lam = rates.lam_total_msgs
    if lam == 0:
        return 1
    for mu, stage in ((params.mu_fe, "FE"), (params.mu_sdb, "SDB"),
                      (params.mu_oi_effective, "OI")):
        if lam >= mu:
            raise InfeasibleError(
                f"message rate {lam:g}/s saturates the {stage} stage "
                f"(capacity {mu:g}/s); no instance count helps", stage=stage)
    t_sl = weighted_sl_service_time(rates, params.sl_times)
    floor, binding = _min_floor_response(lam, t_sl, params)
    if floor > t_max:
        raise InfeasibleError(
            f"even with unlimited instances the response floor is "
            f"{floor*1e6:.1f} us > budget {t_max*1e6:.1f} us ({binding}-bound)",
            stage=binding)
    m = max(1, math.ceil(lam * t_sl))
    while True:
        try:
            total, _ = response_at(lam, t_sl, params, m)
        except InstabilityError:
            m += 1
            continue
        if total <= t_max:
            return m
        m += 1


@dataclass(frozen=True)
class CapacityResult:
    n_u_max: int
    n_d: int
    m: int
    lam_msgs: float  # messages/s at capacity
    procedures_per_s: float
    t_mean_s: float
    rates: ProcedureRates


def capacity(
    m: int,
    params: QueueParams,
    mix: TrafficMix,
    geom: CellGeometry,
    mmpp: MmppParams | None,
    t_i: float,
    mtcd_per_ue: float = 1.0,
    t_max: float | None = None,
) -> CapacityResult:
    """Largest UE count (with N_D = ratio * N_U) whose response meets the budget.

    The message rate is linear in N_U and the response monotone in the rate,
    so the boundary is found by root-finding on the rate, then floored to a
    whole device count.
    """
    if not (isinstance(m, int) and m >= 1):
        raise ParameterError(f"m must be an integer >= 1, got {m}")
    if mtcd_per_ue < 0:
        raise ParameterError(f"mtcd_per_ue must be >= 0, got {mtcd_per_ue}")
    t_max = params.t_max if t_max is None else t_max
    per_ue = htc_rates(mix, geom, t_i)
    per_mtcd = mtc_rates(mmpp, t_i) if mmpp is not None and mtcd_per_ue > 0 else (0.0, 0.0)

    unit = aggregate_rates(per_ue, per_mtcd, 1.0, mtcd_per_ue)
    msgs_per_ue = unit.lam_total_msgs
    if msgs_per_ue == 0:
        raise InfeasibleError("the configured mix generates no signaling at all")
    procs_per_ue = unit.lam_sr + unit.lam_srr + unit.lam_hr
    t_sl = weighted_sl_service_time(unit, params.sl_times)  # mix-invariant in n_u

    lam_hi = min(params.mu_fe, params.mu_sdb, params.mu_oi_effective, m / t_sl)
    lam_hi *= 1.0 - 1e-9

    def excess(lam):
        return response_at(lam, t_sl, params, m)[0] - t_max

    if excess(lam_hi) < 0:  # budget never binds before instability (not with defaults)
        lam_star = lam_hi
    else:
        lam_star = brentq(excess, 1e-9, lam_hi, xtol=1e-6)
    n_u = int(lam_star / msgs_per_ue)
    while n_u > 0:
        r = aggregate_rates(per_ue, per_mtcd, n_u, mtcd_per_ue * n_u)
        total, _ = response_at(r.lam_total_msgs, t_sl, params, m)
        if total <= t_max:
            break
        n_u -= 1
    r = aggregate_rates(per_ue, per_mtcd, n_u, mtcd_per_ue * n_u)
    t_mean = response_at(r.lam_total_msgs, t_sl, params, m)[0] if n_u > 0 else 0.0
    return CapacityResult(
        n_u_max=n_u,
        n_d=int(round(mtcd_per_ue * n_u)),
        m=m,
        lam_msgs=r.lam_total_msgs,
        procedures_per_s=n_u * procs_per_ue,
        t_mean_s=t_mean,
        rates=r,
    )
