"""Artificial-noise-alignment beamforming plans.

Three constructions are provided:

``build_mx2_ana``
    Two receivers, ``M``-slot extension. Transmitter 1 only sends one
    artificial-noise stream; every other transmitter sends one message to
    each receiver, beamformed so that at the unintended receiver it lands
    exactly on top of the noise direction.
``build_asymptotic_ana``
    ``K`` receivers (plus an optional external eavesdropper), ``mu_n``-slot
    extension. Transmitter 1 sends ``K`` noise blocks; message beamformers
    are monomials in the cross-channel ratios so that every message for
    receiver ``j`` falls inside the span of noise block ``j`` wherever it is
    unintended.
``build_blind_ana``
    Two-receiver broadcast with reconfigurable receive antennas. Beamformers
    are fixed 0/1 matrices; alignment comes from the antenna switching pattern.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .network import (
    EVE,
    STREAM_BEAMFORMER,
    Variant,
    blind_alpha,
    blind_beta,
    blind_switch_pattern,
    bounded_complex,
    rng_for,
)

MU_N_CAP = 4096


class Scheme(str, enum.Enum):
    MX2 = "mx2"
    ASYMPTOTIC = "asymptotic"
    BLIND = "blind"


class StreamKind(str, enum.Enum):
    MESSAGE = "message"
    NOISE = "noise"


@dataclass
class StreamGroup:
    """Streams sharing one beamformer.

    ``power_share`` is the per-stream power as a multiple of ``P``. For noise
    groups ``intended_rx`` names the receiver whose messages the block covers
    (``None`` when the block is not tied to one receiver).
    """

    name: str
    owner_tx: int
    intended_rx: int | None
    kind: StreamKind
    beamformer: np.ndarray
    power_share: float = 1.0

    @property
    def n_streams(self):
        return self.beamformer.shape[1]

    @property
    def is_message(self):
        return self.kind is StreamKind.MESSAGE

    def to_dict(self):
        return {
            "name": self.name,
            "owner": self.owner_tx,
            "intended": self.intended_rx,
            "kind": self.kind.value,
            "power_share": self.power_share,
            "matrix": {"re": self.beamformer.real.tolist(), "im": self.beamformer.imag.tolist()},
        }

    @classmethod
    def from_dict(cls, d):
        m = np.asarray(d["matrix"]["re"], dtype=float) + 1j * np.asarray(d["matrix"]["im"], dtype=float)
        return cls(d["name"], int(d["owner"]), d["intended"], StreamKind(d["kind"]), m, float(d["power_share"]))


@dataclass
class BeamformingPlan:
    scheme: Scheme
    groups: list[StreamGroup]
    dims: dict
    aux: dict = field(default_factory=dict)

    def group(self, name):
        for g in self.groups:
            if g.name == name:
                return g
        raise KeyError(name)

    def messages_for(self, rx):
        return [g for g in self.groups if g.is_message and g.intended_rx == rx]

    @property
    def message_groups(self):
        return [g for g in self.groups if g.is_message]

    def to_dict(self):
        aux = {}
        for key, val in self.aux.items():
            if isinstance(val, np.ndarray):
                aux[key] = val.real.tolist()
            elif isinstance(val, dict):
                aux[key] = {str(k): np.asarray(v).real.tolist() for k, v in val.items()}
            else:
                aux[key] = val
        return {
            "scheme": self.scheme.value,
            "dims": self.dims,
            "groups": [g.to_dict() for g in self.groups],
            "aux": aux,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            Scheme(d["scheme"]),
            [StreamGroup.from_dict(g) for g in d["groups"]],
            dict(d["dims"]),
            dict(d.get("aux", {})),
        )


def _check_varying(channels, M, K):
    if channels.variant is Variant.BCC_BLIND:
        raise ValueError("varying-channel scheme given blind switching channels")
    if channels.M != M or channels.K != K:
        raise ValueError(f"channels are {channels.M}x{channels.K}, plan asked for {M}x{K}")


def build_mx2_ana(channels, M, seed=0):
    """Artificial-noise alignment for the ``M x 2`` network over ``M`` slots.

    Transmitter 1 sends one noise stream along a random ``Phi1``. Transmitter
    ``j >= 2`` sends message ``(k, j)`` along ``H_ij^{-1} H_i1 Phi1`` where ``i``
    is the other receiver, so it coincides with the noise at receiver ``i``.
    """
    if channels.K != 2:
        raise ValueError(f"the M x 2 scheme needs K = 2, got K = {channels.K}")
    _check_varying(channels, M, 2)
    if channels.L != M:
        raise ValueError(f"the M x 2 scheme needs an M-slot extension, got L={channels.L}, M={M}")

    phi1 = bounded_complex(rng_for(seed, STREAM_BEAMFORMER, 0), (M, 1))
    groups = [StreamGroup("Phi[1]", 1, None, StreamKind.NOISE, phi1)]
    for j in range(2, M + 1):
        for k in (1, 2):
            i = 3 - k
            phi = (channels.diag(i, 1) / channels.diag(i, j))[:, None] * phi1
            groups.append(StreamGroup(f"Phi[{k},{j}]", j, k, StreamKind.MESSAGE, phi))
    dims = {"L": M, "M": M, "K": 2, "streams_per_rx": M - 1}
    return BeamformingPlan(Scheme.MX2, groups, dims)


def asymptotic_dims(M, K, n, include_eve=True):
    """``(Gamma, mu_n)`` for the asymptotic construction."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gamma = (K - 1 + int(include_eve)) * (M - 1)
    mu_n = K * (n + 1) ** gamma + (M - 1) * n**gamma
    return gamma, mu_n


def t_order(j, K, M, include_eve):
    """Observer/transmitter pairs whose ratio matrices shape block ``j``.

    Sorted by receiver (eavesdropper last), then transmitter.
    """
    observers = [k for k in range(1, K + 1) if k != j]
    if include_eve:
        observers.append(EVE)
    return [(k, m) for k in observers for m in range(2, M + 1)]


def _monomial_columns(T, w, exponents):
    # T: Gamma x L ratios, w: L; one column per exponent tuple
    cols = np.empty((T.shape[1], len(exponents)), dtype=complex)
    for c, alpha in enumerate(exponents):
        cols[:, c] = np.prod(T ** np.asarray(alpha)[:, None], axis=0) * w
    return cols


def build_asymptotic_ana(channels, M, K, n, include_eve=True, seed=0):
    """Asymptotic alignment scheme over a ``mu_n``-slot extension.

    For each receiver ``j`` a random vector ``w_j`` seeds two monomial families
    in the ratio matrices ``T_km = H_k1^{-1} H_km``: exponents in ``1..n+1``
    span noise block ``j`` (sent by transmitter 1), exponents in ``1..n`` span
    the shared message beamformer used by transmitters ``2..M``.
    """
    _check_varying(channels, M, K)
    gamma, mu_n = asymptotic_dims(M, K, n, include_eve)
    if mu_n > MU_N_CAP:
        raise ValueError(f"mu_n = {mu_n} exceeds the cap of {MU_N_CAP}")
    if channels.L != mu_n:
        raise ValueError(f"extension length {channels.L} does not match mu_n = {mu_n}")
    if include_eve and not channels.has_eve:
        raise ValueError("include_eve requested but channels have no eavesdropper row")

    noise_exp = list(itertools.product(range(1, n + 2), repeat=gamma))
    msg_exp = list(itertools.product(range(1, n + 1), repeat=gamma))
    noise_share = 1.0 / (n + 1) ** gamma

    noise_groups, msg_groups, orders = [], [], {}
    for j in range(1, K + 1):
        pairs = t_order(j, K, M, include_eve)
        orders[j] = [[k, m] for k, m in pairs]
        T = np.array([channels.diag(k, m) / channels.diag(k, 1) for k, m in pairs])
        w = bounded_complex(rng_for(seed, STREAM_BEAMFORMER, j), mu_n)
        phi_noise = _monomial_columns(T, w, noise_exp)
        phi_msg = _monomial_columns(T, w, msg_exp)
        noise_groups.append(StreamGroup(f"Phi[{j},1]", 1, j, StreamKind.NOISE, phi_noise, noise_share))
        for m in range(2, M + 1):
            msg_groups.append(StreamGroup(f"Phi[{j},{m}]", m, j, StreamKind.MESSAGE, phi_msg.copy()))

    dims = {
        "L": mu_n,
        "M": M,
        "K": K,
        "n": n,
        "gamma": gamma,
        "mu_n": mu_n,
        "include_eve": include_eve,
        "noise_cols": (n + 1) ** gamma,
        "message_cols": n**gamma,
    }
    return BeamformingPlan(Scheme.ASYMPTOTIC, noise_groups + msg_groups, dims, {"t_order": orders})


# Message-stream rows of V for M = 3, as laid out in the published elementary matrix.
_V_MESSAGE_ROWS_M3 = (4, 1, 2, 5)


def blind_beamformers(M, K=2):
    """0/1 beamformers ``Phi[1], Phi[2]`` (each ``M*beta x M*alpha``) and ``V``.

    Stream block ``b`` of ``Phi[1]`` occupies slots ``b*M .. b*M + M - 1``;
    block ``b`` of ``Phi[2]`` occupies every slot where receiver 1 sits in mode
    ``b + 1``. ``V`` puts the noise on the first stream of each block.
    """
    if K != 2:
        raise NotImplementedError(f"blind beamformers are only available for K=2, got K={K}")
    alpha, beta = blind_alpha(M, K), blind_beta(M, K)
    eye = np.eye(M)
    phi1 = np.zeros((M * beta, M * alpha))
    phi2 = np.zeros((M * beta, M * alpha))
    for b in range(alpha):
        for s in range(M):
            t = b * M + s
            phi1[t * M : (t + 1) * M, b * M : (b + 1) * M] = eye
        for t in range(b, beta, M):
            phi2[t * M : (t + 1) * M, b * M : (b + 1) * M] = eye

    noise_rows = [b * M for b in range(alpha)]
    if M == 3:
        msg_rows = list(_V_MESSAGE_ROWS_M3)
    else:
        msg_rows = [r for r in range(M * alpha) if r not in noise_rows]
    V = np.zeros((M * alpha, M * alpha))
    for c, r in enumerate(msg_rows + noise_rows):
        V[r, c] = 1.0
    return {1: phi1, 2: phi2}, V


def build_blind_ana(channels, M, K, experimental=False):
    """Blind artificial-noise alignment for the two-receiver broadcast channel.

    Each receiver gets ``(M-1)*alpha`` message streams and ``alpha`` noise
    streams over a ``beta``-slot supersymbol. ``M > 3`` uses the generalized
    block rule and is only accepted with ``experimental=True`` after the rank
    conditions are confirmed on ``channels``.
    """
    if K != 2:
        raise NotImplementedError(f"blind scheme is only available for K=2, got K={K}")
    if M > 3 and not experimental:
        raise ValueError(f"blind scheme for M={M} is experimental; pass experimental=True")
    if channels.variant is not Variant.BCC_BLIND or channels.pattern is None:
        raise ValueError("blind scheme needs channels from build_switching_channels")
    if channels.M != M or channels.K != K:
        raise ValueError(f"channels are {channels.M}x{channels.K}, plan asked for {M}x{K}")
    alpha, beta = blind_alpha(M, K), blind_beta(M, K)
    expected = blind_switch_pattern(M, K)
    if channels.L != beta or any(
        not np.array_equal(channels.pattern.modes[k], expected.modes[k]) for k in (1, 2)
    ):
        raise ValueError("switching pattern / channel layout does not match the blind scheme")

    phis, V = blind_beamformers(M, K)
    n_msg = (M - 1) * alpha
    V_mu, V_nu = V[:, :n_msg], V[:, n_msg:]
    groups = []
    for k in (1, 2):
        groups.append(StreamGroup(f"mu[{k}]", 1, k, StreamKind.MESSAGE, (phis[k] @ V_mu).astype(complex)))
        groups.append(StreamGroup(f"nu[{k}]", 1, k, StreamKind.NOISE, (phis[k] @ V_nu).astype(complex)))
    dims = {"L": beta, "M": M, "K": K, "alpha": alpha, "beta": beta, "message_cols": n_msg, "noise_cols": alpha}
    plan = BeamformingPlan(Scheme.BLIND, groups, dims, {"Phi": phis, "V": V})

    if M > 3:
        eff = effective_channels(plan, channels)
        for k in (1, 2):
            j = 3 - k
            G = eff.composite(k)
            ranks = (
                linalg.numeric_rank(G) == M * alpha,
                linalg.numeric_rank(np.hstack([eff[k][f"mu[{j}]"], eff[k][f"nu[{j}]"]])) == alpha,
                linalg.numeric_rank(eff[k][f"nu[{j}]"]) == alpha,
            )
            if not all(ranks):
                raise ValueError(f"generalized blind layout fails rank conditions at receiver {k}")
    return plan


@dataclass
class EffectiveChannelSet:
    """Per observer, the composed matrices ``H_{obs,owner} @ Phi_group``.

    Indexing ``eff[obs][group_name]`` returns one block; ``composite(k)`` stacks
    the full-rank layout of receiver ``k`` (signal blocks first, then the
    scheme's noise/interference blocks).
    """

    plan: BeamformingPlan
    L: int
    blocks: dict

    def __getitem__(self, obs):
        return self.blocks[obs]

    @property
    def observers(self):
        return list(self.blocks)

    def signal_names(self, obs):
        return [g.name for g in self.plan.groups if g.is_message and g.intended_rx == obs]

    def interference_names(self, obs):
        sig = set(self.signal_names(obs))
        return [g.name for g in self.plan.groups if g.name not in sig]

    def composite(self, k):
        plan, b = self.plan, self.blocks[k]
        if plan.scheme is Scheme.MX2:
            names = [f"Phi[{k},{j}]" for j in range(2, plan.dims["M"] + 1)] + ["Phi[1]"]
        elif plan.scheme is Scheme.ASYMPTOTIC:
            M, K = plan.dims["M"], plan.dims["K"]
            names = [f"Phi[{k},1]"] + [f"Phi[{k},{m}]" for m in range(2, M + 1)]
            names += [f"Phi[{j},1]" for j in range(1, K + 1) if j != k]
        elif plan.scheme is Scheme.BLIND:
            names = [f"mu[{k}]", f"nu[{k}]"]
        else:
            raise ValueError(f"unknown scheme {plan.scheme}")
        return np.hstack([b[name] for name in names])


def effective_channels(plan, channels):
    """Compose every stream group with the channel to every observer."""
    blocks = {}
    for obs in channels.observers:
        if plan.scheme is Scheme.BLIND:
            H = channels.block_channel(obs)
            per = {}
            for g in plan.groups:
                if g.beamformer.shape[0] != H.shape[1]:
                    raise ValueError(f"group {g.name}: {g.beamformer.shape[0]} rows vs channel {H.shape}")
                per[g.name] = H @ g.beamformer
        else:
            per = {}
            for g in plan.groups:
                h = channels.diag(obs, g.owner_tx)
                if g.beamformer.shape[0] != h.shape[0]:
                    raise ValueError(f"group {g.name}: {g.beamformer.shape[0]} rows vs extension {h.shape[0]}")
                per[g.name] = h[:, None] * g.beamformer
        blocks[obs] = per
    return EffectiveChannelSet(plan, channels.L, blocks)
