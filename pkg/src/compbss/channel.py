"""Path loss, antenna pattern, shadowing, SINR, MCS lookup, and link rates.

All SINR math is done in linear units; dB appears only at the interfaces.
Channels are frequency flat: one gain per (user, sector) link serves every
subchannel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import NetworkLayout, UserDrop, link_geometry, wrap_angle_deg


@dataclass(frozen=True)
class ChannelParams:
    """3GPP-style urban macro parameters (uniform power, reuse factor 1)."""

    p_bs_dbm: float = 46.0
    num_subchannels: int = 99
    noise_w: float = 2.2661e-15          # per subchannel
    penetration_loss_db: float = 20.0
    user_antenna_gain_dbi: float = 0.0
    shadowing_stddev_db: float = 8.0
    pl_intercept_db: float = 136.8245
    pl_slope_db: float = 39.086
    sc_per_subchannel: int = 12
    sym_per_subcarrier: int = 14
    subframe_s: float = 1e-3

    def __post_init__(self):
        if self.num_subchannels < 1:
            raise ValueError("num_subchannels must be >= 1")
        for name in ("noise_w", "subframe_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def rate_per_bits_symbol(self) -> float:
        """Link rate in bits/s obtained per bits/symbol of MCS efficiency."""
        return (self.sc_per_subchannel * self.sym_per_subcarrier
                * self.num_subchannels / self.subframe_s)


def path_loss_db(d_m, intercept_db: float = 136.8245, slope_db: float = 39.086):
    """Distance-to-path-loss in dB; valid for d >= 1 m (clamp upstream)."""
    return intercept_db + slope_db * (np.log10(d_m) - 3.0)


def directivity_gain_db(offset_deg):
    """Sector antenna gain: 25 - min{12*(phi/70)^2, 20} dB."""
    phi = np.asarray(offset_deg, dtype=float)
    return 25.0 - np.minimum(12.0 * (phi / 70.0) ** 2, 20.0)


def channel_gain(pl_db, sector_gain_db, user_gain_dbi, penetration_db, shadow_db):
    """Linear channel gain 10^((-PL + G_s + G_u - penetration - shadow)/10)."""
    exponent = (-np.asarray(pl_db, dtype=float) + sector_gain_db + user_gain_dbi
                - penetration_db - shadow_db) / 10.0
    return 10.0 ** exponent


def per_subchannel_power_w(params: ChannelParams) -> float:
    """Transmit power per sector per subchannel: P_BS / (3 M), in watts."""
    p_bs_w = 10.0 ** ((params.p_bs_dbm - 30.0) / 10.0)
    return p_bs_w / (3.0 * params.num_subchannels)


def link_rate_bps(bits_per_symbol, params: ChannelParams):
    """Rate over all M subchannels from the MCS efficiency."""
    return np.asarray(bits_per_symbol, dtype=float) * params.rate_per_bits_symbol


@dataclass(frozen=True, eq=False)
class McsTable:
    """Adaptive modulation and coding lookup (step function, left closed)."""

    thresholds_db: np.ndarray
    bits_per_symbol: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds_db, dtype=float)
        e = np.asarray(self.bits_per_symbol, dtype=float)
        if t.shape != e.shape or t.ndim != 1 or t.size == 0:
            raise ValueError("thresholds and efficiencies must be equal-length vectors")
        if not (np.all(np.diff(t) > 0) and np.all(np.diff(e) > 0)):
            raise ValueError("thresholds and efficiencies must be strictly increasing")
        object.__setattr__(self, "thresholds_db", t)
        object.__setattr__(self, "bits_per_symbol", e)

    @classmethod
    def default(cls) -> "McsTable":
        return cls(
            thresholds_db=np.array([-6.5, -4.0, -2.6, -1.0, 1.0, 3.0, 6.6, 10.0,
                                    11.4, 11.8, 13.0, 13.8, 15.6, 16.8, 17.6]),
            bits_per_symbol=np.array([0.15, 0.23, 0.38, 0.60, 0.88, 1.18, 1.48, 1.91,
                                      2.41, 2.73, 3.32, 3.90, 4.52, 5.12, 5.55]),
        )

    @classmethod
    def from_csv(cls, path) -> "McsTable":
        """Load rows of (threshold_db, bits_per_symbol); header optional."""
        thr, eff = [], []
        with open(path, newline="") as f:
            for row in csv.reader(f):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    t, e = float(row[0]), float(row[1])
                except ValueError:
                    continue  # header line
                thr.append(t)
                eff.append(e)
        return cls(np.asarray(thr), np.asarray(eff))

    def efficiency(self, snr_db):
        """bits/symbol for the given SINR(s); 0 below the first threshold."""
        snr = np.asarray(snr_db, dtype=float)
        idx = np.searchsorted(self.thresholds_db, snr, side="right") - 1
        out = np.where(idx >= 0, self.bits_per_symbol[np.maximum(idx, 0)], 0.0)
        return out if snr.ndim else float(out)

    @property
    def outage_threshold_db(self) -> float:
        return float(self.thresholds_db[0])


def mcs_efficiency(snr_db, table: McsTable | None = None):
    table = table or McsTable.default()
    return table.efficiency(snr_db)


@dataclass(frozen=True, eq=False)
class GainMatrix:
    """Per-realization linear channel gains h[user, sector]."""

    h: np.ndarray           # (U, S) linear
    shadow_db: np.ndarray   # (U, S)
    seed: object

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_sectors(self) -> int:
        return self.h.shape[1]


def build_gain_matrix(layout: NetworkLayout, drop: UserDrop,
                      params: ChannelParams, seed) -> GainMatrix:
    """Draw shadowing and assemble linear gains for every (user, sector) link.

    Shadowing is an i.i.d. lognormal term per link, redrawn per realization;
    the same seed reproduces the matrix exactly.
    """
    dist, az = link_geometry(layout, drop.positions)      # (N, B)
    pl = path_loss_db(dist, params.pl_intercept_db, params.pl_slope_db)
    offsets = wrap_angle_deg(az[:, layout.sector_bs] - layout.sector_boresight_deg[None, :])
    g_sec = directivity_gain_db(offsets)                   # (N, S)

    rng = np.random.default_rng(seed)
    shadow = rng.normal(0.0, params.shadowing_stddev_db, size=g_sec.shape)
    h = channel_gain(pl[:, layout.sector_bs], g_sec, params.user_antenna_gain_dbi,
                     params.penetration_loss_db, shadow)
    return GainMatrix(h=h, shadow_db=shadow, seed=seed)


def received_power_w(gains: GainMatrix, params: ChannelParams) -> np.ndarray:
    """Per-subchannel received power P_s * h for every link, in watts."""
    return per_subchannel_power_w(params) * gains.h


def sinr_matrix(rx_w: np.ndarray, active_sector: np.ndarray, noise_w: float) -> np.ndarray:
    """Linear SINR of every (user, sector) link under an on/off sector mask.

    Interference sums over all other active sectors in the field.  Columns of
    inactive sectors are set to -inf so that they never win an argmax.
    """
    act = np.asarray(active_sector, dtype=bool)
    total = rx_w[:, act].sum(axis=1)
    denom = total[:, None] - rx_w + noise_w
    gamma = rx_w / denom
    gamma = np.where(act[None, :], gamma, -np.inf)
    return gamma


def sinr_single(rx_w: np.ndarray, active_sector: np.ndarray, noise_w: float,
                user: int, sector_idx: int) -> float:
    """Single-sector linear SINR; raises if the sector is switched off."""
    act = np.asarray(active_sector, dtype=bool)
    if not act[sector_idx]:
        raise ValueError(f"sector index {sector_idx} is switched off")
    total = float(rx_w[user, act].sum())
    w = float(rx_w[user, sector_idx])
    return w / (total - w + noise_w)


def sinr_comp(rx_w: np.ndarray, active_sector: np.ndarray, noise_w: float,
              user: int, member_idx) -> float:
    """Joint-transmission linear SINR from a virtual cluster's active members.

    Received powers of the active member sectors add; interference comes from
    every active sector outside the virtual cluster.
    """
    act = np.asarray(active_sector, dtype=bool)
    members = np.asarray(member_idx, dtype=int)
    live = members[act[members]]
    if live.size == 0:
        raise ValueError("all sectors of the virtual cluster are switched off")
    total = float(rx_w[user, act].sum())
    num = float(rx_w[user, live].sum())
    return num / (total - num + noise_w)


def to_db(linear):
    return 10.0 * np.log10(linear)


def from_db(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
