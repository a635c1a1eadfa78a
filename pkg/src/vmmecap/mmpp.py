"""Two-state slotted Markov-modulated Poisson process for MTC traffic.

State 1 is the low-rate state, state 2 the high-rate one. The chain moves
once per slot of length `delta_t`; within a slot packets arrive Poisson at
the state's rate and are placed uniformly over the slot. Dwell times are
geometric in slots, so the stream is generated segment-by-segment instead
of slot-by-slot (same law, far fewer random draws).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChainError, ParameterError


@dataclass(frozen=True)
class MmppParams:
    """2-state MMPP: per-slot switch probabilities and per-state packet rates."""

    p: float  # per-slot transition probability state 1 -> 2
    q: float  # per-slot transition probability state 2 -> 1
    lambda1: float  # packets/s in state 1
    lambda2: float  # packets/s in state 2
    delta_t: float = 1.0  # slot length, s
    packet_size_bytes: float = 100.0

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ParameterError(f"transition probabilities must be in [0,1]: p={self.p}, q={self.q}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ParameterError("packet rates must be >= 0")
        if not self.delta_t > 0:
            raise ParameterError(f"slot length must be > 0, got {self.delta_t}")


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Stationary row vector of a row-stochastic transition matrix.

    Solves pi (P - I) = 0 with the normalization constraint appended;
    works for any number of states, not just two.
    """
    P = np.asarray(transition, dtype=float)
    n = P.shape[0]
    if P.shape != (n, n):
        raise ParameterError(f"transition matrix must be square, got {P.shape}")
    if np.any(P < -1e-12) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9):
        raise ParameterError("rows of the transition matrix must be probabilities summing to 1")
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.any(pi < -1e-9):
        raise DegenerateChainError("no non-negative stationary distribution")
    pi = np.clip(pi, 0.0, None)
    s = pi.sum()
    if not np.isfinite(s) or s <= 0:
        raise DegenerateChainError("stationary solve failed")
    return pi / s


def mmpp_stationary(params: MmppParams) -> tuple[float, float, float]:
    """(pi1, pi2, mean packet rate in packets/s) of the modulating chain."""
    p, q = params.p, params.q
    if p + q == 0:
        raise DegenerateChainError(
            "p = q = 0: the chain never moves, stationary split is undefined"
        )
    pi1 = q / (p + q)
    pi2 = p / (p + q)
    return pi1, pi2, pi1 * params.lambda1 + pi2 * params.lambda2


def mmpp_packet_stream(
    params: MmppParams,
    horizon_s: float,
    rng: np.random.Generator,
    start_state: int | None = None,
) -> np.ndarray:
    """Packet arrival times in [0, horizon), strictly increasing, as float64.

    `start_state` is 1 or 2; by default it is drawn from the stationary
    distribution so the stream starts in steady state.
    """
    if not horizon_s > 0:
        raise ParameterError(f"horizon must be > 0, got {horizon_s}")
    p, q = params.p, params.q
    rates = {1: params.lambda1, 2: params.lambda2}
    switch = {1: p, 2: q}
    if start_state is None:
        if p + q == 0:
            state = 1
        else:
            pi1, _, _ = mmpp_stationary(params)
            state = 1 if rng.random() < pi1 else 2
    else:
        if start_state not in (1, 2):
            raise ParameterError(f"start_state must be 1 or 2, got {start_state}")
        state = start_state

    n_slots_total = int(np.ceil(horizon_s / params.delta_t))
    chunks = []
    t_slot = 0  # current position, in whole slots
    while t_slot < n_slots_total:
        pr = switch[state]
        # dwell in the current state, in slots (geometric, support >= 1)
        dwell = int(rng.geometric(pr)) if pr > 0 else n_slots_total - t_slot
        dwell = min(dwell, n_slots_total - t_slot)
        lam = rates[state]
        seg_len = dwell * params.delta_t
        if lam > 0:
            n_pkt = rng.poisson(lam * seg_len)
            if n_pkt:
                times = t_slot * params.delta_t + np.sort(rng.random(n_pkt)) * seg_len
                chunks.append(times)
        t_slot += dwell
        state = 2 if state == 1 else 1

    if not chunks:
        return np.empty(0)
    out = np.concatenate(chunks)
    out = out[out < horizon_s]
    # enforce strictly increasing times (float ties are astronomically rare,
    # but downstream event ordering assumes strictness)
    for i in np.flatnonzero(np.diff(out) <= 0):
        out[i + 1] = np.nextafter(out[i], np.inf)
    return out
