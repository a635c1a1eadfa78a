"""Event-driven simulation of the FE -> SL pool -> SDB -> OI chain.

Each trigger spawns its procedure's message sequence. The first message
reaches the front end one propagation delay after the trigger; each later
message arrives one inter-message round trip after the previous message
finishes vMME processing (closed loop). All four stages are FCFS; the SL
pool shares one queue across its m servers. Because arrivals at every
stage are processed in global time order, waiting times follow from the
Lindley recursion (track when each server frees up), so no separate
departure events are needed.

Response time per message covers the four stages only — the propagation
delay and inter-message gap shape arrival timing but are not vMME
processing time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..queueing import QueueParams
from .triggers import PROC_HR, PROC_SR, PROC_SRR, TriggerTrace
from .stats import batch_means

_STAGES = ("fe", "sl", "db", "oi")


@dataclass(frozen=True)
class SimStats:
    mean_response_s: float
    ci_halfwidth_s: float
    n_messages: int
    n_triggers: int
    utilization: dict  # stage -> busy fraction over the measured span
    empirical_lam_msgs: float
    per_procedure_counts: dict
    max_backlog: int
    n_batches: int
    warmup_fraction: float
    seed: int
    valid: bool  # False when the trace was too small for batch statistics


def run_queue_sim(
    trace: TriggerTrace,
    params: QueueParams,
    service_law: str = "deterministic",
    seed: int = 0,
    warmup_fraction: float = 0.10,
    min_batches: int = 20,
) -> SimStats:
    """Replay a trigger trace through the queueing chain and measure delays."""
    if service_law not in ("deterministic", "exponential"):
        raise ParameterError(f"service_law must be deterministic or exponential, "
                             f"got {service_law!r}")
    if not (0 <= warmup_fraction < 1):
        raise ParameterError(f"warmup_fraction must be in [0,1), got {warmup_fraction}")
    st = params.sl_times
    sl_seq = {
        PROC_SR: (st.t_sr1, st.t_sr2, st.t_sr3),
        PROC_SRR: (st.t_srr1, st.t_srr2, st.t_srr3),
        PROC_HR: (st.t_hr1, st.t_hr2),
    }
    t_fe = 1.0 / params.mu_fe
    t_db = 1.0 / params.mu_sdb
    t_oi = 1.0 / params.mu_oi_effective
    m = params.m
    rng = np.random.default_rng(seed)
    exp = service_law == "exponential"

    def svc(mean: float) -> float:
        return rng.exponential(mean) if exp else mean

    # event: (time, seq, stage_idx, proc, msg_idx, fe_arrival)
    events: list = []
    seq = 0
    for t, proc in zip(trace.time_s, trace.procedure):
        heapq.heappush(events, (t + params.prop_delay, seq, 0, int(proc), 0, 0.0))
        seq += 1

    free_fe = free_db = free_oi = -np.inf
    sl_free = [-np.inf] * m  # heap of server-free times
    responses: list[float] = []
    busy = dict.fromkeys(_STAGES, 0.0)
    t_first = np.inf
    t_last = -np.inf
    backlog = max_backlog = 0  # messages inside the chain

    while events:
        t, sq, stage, proc, msg_idx, fe_arr = heapq.heappop(events)
        if stage == 0:  # front end
            backlog += 1
            max_backlog = max(max_backlog, backlog)
            t_first = min(t_first, t)
            s = svc(t_fe)
            start = max(t, free_fe)
            free_fe = start + s
            busy["fe"] += s
            heapq.heappush(events, (free_fe, sq, 1, proc, msg_idx, t))
        elif stage == 1:  # service-logic pool
            s = svc(sl_seq[proc][msg_idx])
            start = max(t, sl_free[0])
            heapq.heapreplace(sl_free, start + s)
            busy["sl"] += s
            heapq.heappush(events, (start + s, sq, 2, proc, msg_idx, fe_arr))
        elif stage == 2:  # state database
            s = svc(t_db)
            start = max(t, free_db)
            free_db = start + s
            busy["db"] += s
            heapq.heappush(events, (free_db, sq, 3, proc, msg_idx, fe_arr))
        else:  # output interface
            s = svc(t_oi)
            start = max(t, free_oi)
            free_oi = start + s
            busy["oi"] += s
            done = free_oi
            responses.append(done - fe_arr)
            t_last = max(t_last, done)
            backlog -= 1
            if msg_idx + 1 < len(sl_seq[proc]):
                seq += 1
                heapq.heappush(events, (done + params.t_im, seq, 0, proc,
                                        msg_idx + 1, 0.0))

    n_msgs = len(responses)
    counts = {
        "SR": int(np.sum(trace.procedure == PROC_SR)),
        "SRR": int(np.sum(trace.procedure == PROC_SRR)),
        "HR": int(np.sum(trace.procedure == PROC_HR)),
    }
    span = max(t_last - t_first, 0.0)
    util = {s: (busy[s] / span if span > 0 else 0.0) for s in _STAGES}
    util["sl"] = util["sl"] / m

    resp = np.asarray(responses)
    kept = resp[int(len(resp) * warmup_fraction):]
    if len(kept) >= 2 * min_batches:
        mean, half, n_b = batch_means(kept, min_batches)
        valid = True
    else:
        mean = float(kept.mean()) if len(kept) else float("nan")
        half = float("nan")
        n_b = 0
        valid = False
    return SimStats(
        mean_response_s=mean,
        ci_halfwidth_s=half,
        n_messages=n_msgs,
        n_triggers=len(trace),
        utilization=util,
        empirical_lam_msgs=(n_msgs / span if span > 0 else 0.0),
        per_procedure_counts=counts,
        max_backlog=max_backlog,
        n_batches=n_b,
        warmup_fraction=warmup_fraction,
        seed=seed,
        valid=valid,
    )
