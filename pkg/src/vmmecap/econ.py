"""Running-cost model and the scalability metric.

Costs follow a public-cloud billing schedule (hourly instance fees, storage,
tiered egress, per-transaction database charges, load-balancer fees), all
normalized to dollars per second. Productivity is delay-discounted
throughput per dollar; the scalability index is its ratio to the
single-instance reference, with the usual gamma = 0.8 cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError

SECONDS_PER_MONTH = 2_628_000.0
GB = 1e9  # billing gigabyte (decimal)


@dataclass(frozen=True)
class CostSchedule:
    """Billing constants; defaults mirror a typical on-demand schedule."""

    ci_type_usd_per_h: float = 0.266  # one SL/FE compute instance
    ci_storage_gb: float = 10.0
    ci_storage_usd_per_gb_month: float = 0.10
    ci_optimized_access_usd_per_h: float = 0.025
    egress_tiers_gb_usd: tuple[tuple[float, float], ...] = (
        (1.0, 0.0),  # first GB each month is free
        (10.0 * 1024 - 1.0, 0.090),  # up to 10 TB cumulative
        (40.0 * 1024, 0.085),  # up to 50 TB
        (100.0 * 1024, 0.070),  # up to 150 TB
        (350.0 * 1024, 0.050),  # up to 500 TB
    )  # (bracket width in GB, $/GB)
    db_type_usd_per_h: float = 4.64
    db_storage_usd_per_gb_month: float = 0.1
    db_usd_per_million_tx: float = 0.2
    lb_fee_usd_per_month: float = 0.025
    lb_usd_per_gb: float = 0.008
    i_size_bytes: float = 200.0  # mean inbound message
    o_size_bytes: float = 200.0  # mean outbound message
    per_user_state_bytes: float = 1024.0
    seconds_per_month: float = SECONDS_PER_MONTH
    egress_per_instance: bool = True  # bill egress on each instance's own meter

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if name in ("egress_tiers_gb_usd", "egress_per_instance"):
                continue
            if v < 0:
                raise ParameterError(f"cost field {name} must be >= 0, got {v}")
        widths = [w for w, _ in self.egress_tiers_gb_usd]
        if any(w <= 0 for w in widths):
            raise ParameterError("egress bracket widths must be positive")


def tiered_egress_cost(monthly_gb: float, sched: CostSchedule) -> float:
    """Dollars per month for a given egress volume, walking the brackets.

    Volume beyond the last bracket is billed at the last bracket's rate.
    """
    if monthly_gb < 0:
        raise ParameterError(f"egress volume must be >= 0, got {monthly_gb}")
    rem = monthly_gb
    cost = 0.0
    rate = 0.0
    for width, rate in sched.egress_tiers_gb_usd:
        take = min(rem, width)
        cost += take * rate
        rem -= take
        if rem <= 0:
            break
    if rem > 0:
        cost += rem * rate
    return cost


def tiered_egress_rate(monthly_gb: float, sched: CostSchedule | None = None) -> float:
    """Volume-weighted blended $/GB across the brackets."""
    sched = sched or CostSchedule()
    if monthly_gb <= 0:
        return 0.0
    return tiered_egress_cost(monthly_gb, sched) / monthly_gb


def cost_per_second(
    m: int,
    lam_msgs: float,
    n_u: float,
    sched: CostSchedule | None = None,
) -> tuple[float, dict]:
    """Total running cost in $/s and its itemized breakdown.

    Total = balancer + m * per-compute-instance + database. Egress is metered
    per compute instance by default (each serves the full outbound stream in
    turn through the shared address, so each meter sees lam/m... the billing
    units do not pool across meters, making the per-instance reading the
    conservative one); set `egress_per_instance=False` to pool the volume on
    one meter instead.
    """
    sched = sched or CostSchedule()
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    if lam_msgs < 0 or n_u < 0:
        raise ParameterError("lam_msgs and n_u must be >= 0")
    spm = sched.seconds_per_month

    out_gb_month = lam_msgs * sched.o_size_bytes * spm / GB
    in_gb_month = lam_msgs * sched.i_size_bytes * spm / GB

    ci_fixed = (
        sched.ci_type_usd_per_h / 3600.0
        + sched.ci_optimized_access_usd_per_h / 3600.0
        + sched.ci_storage_gb * sched.ci_storage_usd_per_gb_month / spm
    )
    if sched.egress_per_instance:
        egress = m * tiered_egress_cost(out_gb_month, sched) / spm
    else:
        egress = tiered_egress_cost(out_gb_month, sched) / spm

    db = (
        sched.db_type_usd_per_h / 3600.0
        + sched.db_storage_usd_per_gb_month * (n_u * sched.per_user_state_bytes / GB) / spm
        + sched.db_usd_per_million_tx * lam_msgs / 1e6
    )
    lb = sched.lb_fee_usd_per_month / spm + sched.lb_usd_per_gb * in_gb_month / spm

    breakdown = {
        "lb_usd_per_s": lb,
        "ci_fixed_usd_per_s": m * ci_fixed,
        "ci_egress_usd_per_s": egress,
        "db_usd_per_s": db,
    }
    total = sum(breakdown.values())
    return total, breakdown


@dataclass(frozen=True)
class ScalabilityPoint:
    k: int
    n_u: int
    lam_msgs: float
    t_mean_s: float
    cost_usd_per_s: float
    f: float
    productivity: float
    psi: float
    classification: str


def classify(psi: float, gamma: float = 0.8) -> str:
    if psi < 0:
        raise ParameterError(f"psi must be >= 0, got {psi}")
    if psi >= 1.0:
        return "positive"
    if psi >= gamma:
        return "sub-perfect"
    return "not-scalable"


def productivity(lam_msgs: float, t_mean_s: float, cost_usd_per_s: float,
                 t_hat_s: float) -> tuple[float, float]:
    """(f, F): delay discount f = 1/(1 + T/T_hat) and throughput-per-dollar F."""
    if cost_usd_per_s <= 0:
        raise ParameterError("cost must be > 0")
    if t_hat_s <= 0:
        raise ParameterError("t_hat must be > 0")
    f = 1.0 / (1.0 + t_mean_s / t_hat_s)
    return f, lam_msgs * f / cost_usd_per_s


def scalability_table(
    points: list[tuple[int, int, float, float]],
    sched: CostSchedule | None = None,
    t_hat_s: float = 1e-3,
    gamma: float = 0.8,
) -> list[ScalabilityPoint]:
    """Build the psi(k) table from (k, n_u, lam_msgs, t_mean_s) operating points.

    Each point should be the system dimensioned at scale k and loaded to its
    delay-budget capacity; k=1 (or the smallest k given) is the reference.
    """
    sched = sched or CostSchedule()
    out = []
    f_ref = None
    for k, n_u, lam, t_mean in points:
        cost, _ = cost_per_second(k, lam, n_u, sched)
        f, big_f = productivity(lam, t_mean, cost, t_hat_s)
        if f_ref is None:
            f_ref = big_f
        psi = big_f / f_ref
        out.append(ScalabilityPoint(
            k=k, n_u=n_u, lam_msgs=lam, t_mean_s=t_mean,
            cost_usd_per_s=cost, f=f, productivity=big_f, psi=psi,
            classification=classify(psi, gamma),
        ))
    return out
