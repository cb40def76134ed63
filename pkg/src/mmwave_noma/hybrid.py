"""Hybrid SDMA + NOMA evaluation across several RF chains.

Mode 1 runs an independent NOMA group per chain and measures the leakage
between the analog beams. Mode 2 adds a digital layer that mixes chains
(identity, or a zero-forcing baseline built from one representative user per
chain) so all chains jointly serve all users.
"""

from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, Awv, beam_gain, steering_vector
from .beam_design import BeamTarget, steer_single, subarray_multibeam
from .errors import DegenerateChannelError
from .rates import GroupMember, NomaGroup, RateReport, mui_rates, noma_rates

PRECODERS = ("identity", "zero_forcing")


@dataclass(frozen=True)
class RfChainPlan:
    """One RF chain: its analog weights, its NOMA group, and its power."""

    chain_id: int
    awv: Awv
    group: NomaGroup
    chain_power: float

    def __post_init__(self):
        if self.chain_power < 0:
            raise ValueError("chain power must be nonnegative")


@dataclass(frozen=True)
class HybridConfig:
    mode: int
    chains: tuple
    digital_precoder: str = "identity"
    k_max: int = 2

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(self.chains))
        if self.mode not in (1, 2):
            raise ValueError("mode must be 1 or 2")
        if not self.chains:
            raise ValueError("need at least one RF chain")
        if self.digital_precoder not in PRECODERS:
            raise ValueError(f"digital precoder must be one of {PRECODERS}")
        seen = set()
        for chain in self.chains:
            members = chain.group.user_ids()
            if len(members) > self.k_max:
                raise ValueError(
                    f"chain {chain.chain_id} serves {len(members)} users, cap is {self.k_max}")
            for uid in members:
                if uid in seen:
                    raise ValueError(f"user {uid} served by more than one chain")
                seen.add(uid)
        if len(seen) > len(self.chains) * self.k_max:
            raise ValueError("user count exceeds chains * users-per-chain")
        if self.mode == 2 and len(seen) < len(self.chains):
            raise ValueError("mode 2 needs at least one served user per chain")

    def user_ids(self):
        return [uid for chain in self.chains for uid in chain.group.user_ids()]


def design_chain(geom: ArrayGeometry, chain_id: int, members, channels,
                 chain_power: float, noise_power: float = 1.0,
                 power_split=(0.25, 0.75), designer=None) -> RfChainPlan:
    """Point one chain's analog beams at its users and split its power.

    Each member gets an equal gain target N/K; the quarter / three-quarter
    rule (strong user first) splits the chain power for a two-user group.
    """
    members = list(members)
    if not members:
        raise ValueError("chain needs at least one user")
    N = geom.n_antennas
    if len(members) == 1:
        awv = steer_single(geom, channels[members[0]].direction)
    else:
        targets = [BeamTarget(channels[u].direction, N / len(members)) for u in members]
        design = (designer or subarray_multibeam)(geom, targets)
        awv = design.awv
    gammas = [channels[u].power * beam_gain(awv, channels[u].direction) / noise_power
              for u in members]
    if len(members) == 1:
        powers = [chain_power]
    else:
        order = sorted(range(2), key=lambda i: (gammas[i], members[i]))
        weak, strong = order[0], order[1]
        powers = [0.0, 0.0]
        powers[strong] = power_split[0] * chain_power
        powers[weak] = power_split[1] * chain_power
    group = NomaGroup(tuple(zip(members, gammas, powers)), chain_power)
    return RfChainPlan(chain_id, awv, group, chain_power)


def mode1_evaluate(config: HybridConfig, channels, noise_power: float,
                   ignore_mui: bool = False) -> RateReport:
    """Independent per-chain NOMA; the other chains' beams leak in as noise."""
    if config.mode != 1:
        raise ValueError("config is not mode 1")
    groups = [(c.group, c.awv, c.chain_power) for c in config.chains]
    return mui_rates(groups, channels, noise_power, ignore_mui=ignore_mui)


def mode1_interference(config: HybridConfig, channels) -> dict:
    """Leakage power each user receives from the chains not serving it."""
    out = {}
    for m, chain in enumerate(config.chains):
        for uid in chain.group.user_ids():
            chan = channels[uid]
            leak = 0.0
            for mp, other in enumerate(config.chains):
                if mp == m:
                    continue
                leak += other.chain_power * chan.power * beam_gain(other.awv, chan.direction)
            out[uid] = leak
    return out


def _effective_matrix(config, channels):
    """H_eff[u, m] = g_u * (w_m^H a(phi_u)) with rows in ascending user id."""
    uids = sorted(config.user_ids())
    geoms = {len(c.awv) for c in config.chains}
    if len(geoms) != 1:
        raise ValueError("all chains must share the array")
    geom = ArrayGeometry(geoms.pop())
    H = np.zeros((len(uids), len(config.chains)), dtype=np.complex128)
    for r, uid in enumerate(uids):
        chan = channels[uid]
        a = steering_vector(geom, chan.direction)
        for m, chain in enumerate(config.chains):
            H[r, m] = chan.gain * np.vdot(chain.awv.weights, a)
    return uids, geom, H


def mode2_precoder(config: HybridConfig, channels):
    """Digital mixing matrix and the unit-power effective transmit columns.

    Zero forcing inverts the effective channel restricted to one
    representative user per chain (the strongest member); each mixed column
    is scaled so the radiated power per stream stays at the chain power.
    Returns (user_ids, H_eff, D, F).
    """
    uids, geom, H = _effective_matrix(config, channels)
    M = len(config.chains)
    if config.digital_precoder == "identity":
        D = np.eye(M, dtype=np.complex128)
    else:
        rep_rows = []
        for m, chain in enumerate(config.chains):
            members = chain.group.user_ids()
            rows = [uids.index(u) for u in members]
            r = max(rows, key=lambda rr: (np.abs(H[rr, m]) ** 2, -uids[rr]))
            rep_rows.append(r)
        H_rep = H[rep_rows, :]
        if np.linalg.matrix_rank(H_rep, tol=1e-10) < M:
            raise DegenerateChannelError(
                "representative effective channels are rank deficient; zero forcing undefined")
        D = np.linalg.pinv(H_rep)

    A = np.column_stack([c.awv.weights for c in config.chains])
    F = A @ D.conj()
    norms = np.linalg.norm(F, axis=0)
    if np.any(norms < 1e-12):
        raise DegenerateChannelError("a mixed transmit column has vanishing power")
    D = D / norms[None, :]
    F = F / norms[None, :]
    return uids, H, D, F


def _mode2_couplings(config, channels):
    uids, H, D, _ = mode2_precoder(config, channels)
    T = H @ D   # coupling of stream m to user u
    return uids, T


def mode2_interference(config: HybridConfig, channels) -> dict:
    """Residual inter-stream power at each user after the digital layer."""
    uids, T = _mode2_couplings(config, channels)
    serving = {u: m for m, c in enumerate(config.chains) for u in c.group.user_ids()}
    out = {}
    for r, uid in enumerate(uids):
        m = serving[uid]
        leak = sum(config.chains[mp].chain_power * float(np.abs(T[r, mp]) ** 2)
                   for mp in range(len(config.chains)) if mp != m)
        out[uid] = leak
    return out


def mode2_evaluate(config: HybridConfig, channels, noise_power: float) -> RateReport:
    """All chains jointly serve all users through the digital layer.

    Per-user SINR keeps the residual inter-stream interference as extra
    noise; the NOMA superposition inside each stream is unchanged.
    """
    if config.mode != 2:
        raise ValueError("config is not mode 2")
    uids, T = _mode2_couplings(config, channels)
    row = {uid: r for r, uid in enumerate(uids)}
    per_user = []
    for m, chain in enumerate(config.chains):
        members = []
        for member in chain.group.members:
            r = row[member.user_id]
            signal = float(np.abs(T[r, m]) ** 2)
            interference = sum(
                config.chains[mp].chain_power * float(np.abs(T[r, mp]) ** 2)
                for mp in range(len(config.chains)) if mp != m)
            gamma = signal / (noise_power + interference)
            members.append(GroupMember(member.user_id, gamma, member.power))
        report = noma_rates(NomaGroup(tuple(members), chain.chain_power))
        per_user.extend(report.per_user)
    return RateReport.from_rates(per_user)
