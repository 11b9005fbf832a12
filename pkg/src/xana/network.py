"""Network scenarios and channel generation.

Two channel regimes are supported:

* time/frequency varying channels, where every slot of a symbol extension
  carries an independent coefficient per (receiver, transmitter) pair, and
* coherence-structured channels for the blind broadcast setting, where a
  reconfigurable receive antenna switches among ``M`` modes following a fixed
  pattern and the channel in each slot is the row vector of the active mode.

Receivers are indexed ``1..K``; the external eavesdropper is the key ``"eve"``.
Transmitters are indexed ``1..M`` (for the blind setting these are the ``M``
antennas of the single broadcast transmitter).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

EVE = "eve"

C_MIN = 0.5
C_MAX = 2.0

# Per-purpose stream indices for seed derivation. Never renumber.
STREAM_CHANNEL = 0
STREAM_EVE = 1
STREAM_MODES = 2
STREAM_BEAMFORMER = 3


class Variant(str, enum.Enum):
    XNCM_VARYING = "xncm"
    XNCM_EXTERNAL_EVE = "xncm-ee"
    BCC_BLIND = "bcc-blind"


def blind_alpha(M, K):
    return (M - 1) ** (K - 1)


def blind_beta(M, K):
    return (K + M - 1) * blind_alpha(M, K)


@dataclass(frozen=True)
class NetworkSpec:
    M: int
    K: int
    variant: Variant = Variant.XNCM_VARYING
    L: int = 1
    noise_power: float = 1.0

    def __post_init__(self):
        if self.M < 2 or self.K < 2:
            raise ValueError(f"need M >= 2 and K >= 2, got M={self.M}, K={self.K}")
        if self.L <= 0:
            raise ValueError(f"extension length must be positive, got L={self.L}")
        if self.noise_power != 1.0:
            raise ValueError("noise power is fixed at 1.0")
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def has_eve(self):
        return self.variant is Variant.XNCM_EXTERNAL_EVE

    @property
    def observers(self):
        rx = list(range(1, self.K + 1))
        return rx + [EVE] if self.has_eve else rx


def rng_for(seed, *key):
    """Independent generator for ``(seed, key)``.

    Each distinct key addresses its own stream, so adding a new kind of draw
    never shifts the values produced for an existing key.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def bounded_complex(rng, shape, c_min=C_MIN, c_max=C_MAX):
    """Complex entries with magnitude uniform on ``[c_min, c_max]`` and uniform phase."""
    if not 0 < c_min <= c_max < np.inf:
        raise ValueError(f"invalid magnitude bounds [{c_min}, {c_max}]")
    mag = rng.uniform(c_min, c_max, size=shape)
    phase = rng.uniform(0.0, 2 * np.pi, size=shape)
    return mag * np.exp(1j * phase)


def _rx_code(rx):
    return 0 if rx == EVE else int(rx)


@dataclass
class SwitchPattern:
    """Antenna-mode sequence per receiver, modes numbered ``1..M``."""

    M: int
    modes: dict[int, np.ndarray]

    def __post_init__(self):
        self.modes = {int(k): np.asarray(v, dtype=int) for k, v in self.modes.items()}
        lengths = {len(v) for v in self.modes.values()}
        if len(lengths) != 1:
            raise ValueError(f"pattern lengths differ across receivers: {sorted(lengths)}")
        for k, v in self.modes.items():
            if v.size and (v.min() < 1 or v.max() > self.M):
                raise ValueError(f"receiver {k}: mode index outside 1..{self.M}")

    @property
    def length(self):
        return len(next(iter(self.modes.values())))

    def to_dict(self):
        return {str(k): v.tolist() for k, v in sorted(self.modes.items())}


@dataclass
class ExtendedChannelSet:
    """Diagonal extended channels ``H_{km}`` stored as length-``L`` vectors.

    For the blind setting ``entries[(k, m)][t]`` is the coefficient of antenna
    ``m`` in mode vector ``H_k(pattern_k(t))``; ``mode_vectors[k]`` is the
    ``M x M`` array whose row ``m - 1`` is ``H_k(m)``.
    """

    M: int
    K: int
    L: int
    entries: dict[tuple, np.ndarray]
    variant: Variant = Variant.XNCM_VARYING
    mode_vectors: dict[int, np.ndarray] | None = None
    pattern: SwitchPattern | None = None
    meta: dict = field(default_factory=dict)

    @property
    def has_eve(self):
        return any(rx == EVE for rx, _ in self.entries)

    @property
    def observers(self):
        rx = list(range(1, self.K + 1))
        return rx + [EVE] if self.has_eve else rx

    def diag(self, rx, tx):
        return self.entries[(rx, tx)]

    def matrix(self, rx, tx):
        """The ``L x L`` diagonal channel matrix from ``tx`` to ``rx``."""
        return np.diag(self.entries[(rx, tx)])

    def block_channel(self, rx):
        """``L x M*L`` block-diagonal channel of the blind broadcast setting.

        Row ``t`` holds the active mode vector in columns ``t*M .. t*M + M - 1``,
        matching a transmit vector that stacks the ``M`` antennas slot by slot.
        """
        H = np.zeros((self.L, self.M * self.L), dtype=complex)
        for t in range(self.L):
            for m in range(1, self.M + 1):
                H[t, t * self.M + m - 1] = self.entries[(rx, m)][t]
        return H

    def coefficients(self):
        return np.concatenate([v for _, v in sorted(self.entries.items(), key=_entry_key)])

    def to_dict(self):
        doc = {
            "M": self.M,
            "K": self.K,
            "L": self.L,
            "variant": self.variant.value,
            "entries": [
                {"rx": rx, "tx": tx, "re": v.real.tolist(), "im": v.imag.tolist()}
                for (rx, tx), v in sorted(self.entries.items(), key=_entry_key)
            ],
        }
        if self.mode_vectors is not None:
            doc["mode_vectors"] = {
                str(k): {"re": v.real.tolist(), "im": v.imag.tolist()}
                for k, v in sorted(self.mode_vectors.items())
            }
        if self.pattern is not None:
            doc["switch_pattern"] = self.pattern.to_dict()
        return doc

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc):
        entries = {}
        for e in doc["entries"]:
            rx = e["rx"] if e["rx"] == EVE else int(e["rx"])
            entries[(rx, int(e["tx"]))] = np.asarray(e["re"]) + 1j * np.asarray(e["im"])
        modes = pattern = None
        if "mode_vectors" in doc:
            modes = {
                int(k): np.asarray(v["re"]) + 1j * np.asarray(v["im"])
                for k, v in doc["mode_vectors"].items()
            }
        if "switch_pattern" in doc:
            pattern = SwitchPattern(doc["M"], {int(k): v for k, v in doc["switch_pattern"].items()})
        return cls(
            M=int(doc["M"]),
            K=int(doc["K"]),
            L=int(doc["L"]),
            entries=entries,
            variant=Variant(doc.get("variant", Variant.XNCM_VARYING.value)),
            mode_vectors=modes,
            pattern=pattern,
        )


def _entry_key(item):
    (rx, tx), _ = item
    return (rx == EVE, 0 if rx == EVE else rx, tx)


def draw_varying_channels(spec, seed, c_min=C_MIN, c_max=C_MAX):
    """Draw i.i.d. extended channels for the varying-channel variants.

    Every (receiver, transmitter) pair gets its own generator stream, so the
    receiver rows are identical with and without an eavesdropper.
    """
    if spec.variant is Variant.BCC_BLIND:
        raise ValueError("blind channels come from build_switching_channels")
    if spec.L <= 0:
        raise ValueError(f"extension length must be positive, got {spec.L}")
    entries = {}
    for rx in spec.observers:
        stream = STREAM_EVE if rx == EVE else STREAM_CHANNEL
        for tx in range(1, spec.M + 1):
            rng = rng_for(seed, stream, _rx_code(rx), tx)
            entries[(rx, tx)] = bounded_complex(rng, spec.L, c_min, c_max)
    return ExtendedChannelSet(spec.M, spec.K, spec.L, entries, variant=spec.variant)


def blind_switch_pattern(M, K):
    """Antenna switching pattern for the two-receiver blind scheme.

    Receiver 1 cycles through modes ``1..M``; receiver 2 holds each mode for
    ``M`` consecutive slots, with the last block cut short to ``M**2 - 1``
    slots in total.
    """
    if K != 2:
        raise NotImplementedError(f"blind switching patterns are only available for K=2, got K={K}")
    if M < 2:
        raise ValueError(f"need M >= 2, got {M}")
    beta = blind_beta(M, K)
    t = np.arange(beta)
    return SwitchPattern(M, {1: t % M + 1, 2: t // M + 1})


def build_switching_channels(M, K, pattern, seed, c_min=C_MIN, c_max=C_MAX):
    """Materialize the coherence-structured channels induced by ``pattern``."""
    if pattern.M != M:
        raise ValueError(f"pattern built for M={pattern.M}, not M={M}")
    if sorted(pattern.modes) != list(range(1, K + 1)):
        raise ValueError(f"pattern must cover receivers 1..{K}")
    for k, seq in pattern.modes.items():
        if seq.min() < 1 or seq.max() > M:
            raise ValueError(f"receiver {k}: mode index outside 1..{M}")
    L = pattern.length
    modes = {}
    entries = {}
    for k in range(1, K + 1):
        rng = rng_for(seed, STREAM_MODES, k)
        modes[k] = bounded_complex(rng, (M, M), c_min, c_max)
        rows = modes[k][pattern.modes[k] - 1]  # L x M
        for m in range(1, M + 1):
            entries[(k, m)] = rows[:, m - 1].copy()
    return ExtendedChannelSet(
        M, K, L, entries, variant=Variant.BCC_BLIND, mode_vectors=modes, pattern=pattern
    )
