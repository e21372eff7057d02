"""Behavioral device models consumed by the transient simulator.

Square-law MOS with channel-length modulation, a tanh MOS-varactor curve,
a 2-bit switched-capacitor tuning array, the signed coupled-inductor stamp
built from an extracted transformer model, and the output buffer parameter
block.  Everything here is an immutable parameter set plus pure evaluation
functions; the simulator owns all state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidModelError
from .transformer import TransformerModel

# tuning-array switch model; ideal switches would make the MNA matrix singular
SWITCH_ON_OHM = 50.0
SWITCH_OFF_OHM = 10e6

BOLTZMANN_J_K = 1.380649e-23


@dataclass(frozen=True)
class MosParams:
    """Square-law transistor: i_d = f(v_gs, v_ds) with polarity-signed V_th.

    k_factor is the full transconductance factor (A/V^2), threshold is
    positive for "n" and negative for "p", lam is the channel-length
    modulation (1/V).
    """

    polarity: str
    k_factor: float
    v_th: float
    lam: float = 0.0

    def validate(self) -> None:
        if self.polarity not in ("n", "p"):
            raise InvalidModelError(f"polarity must be 'n' or 'p', got {self.polarity!r}")
        if self.k_factor <= 0:
            raise InvalidModelError("k_factor must be positive")
        if self.lam < 0:
            raise InvalidModelError("lam must be non-negative")
        if self.polarity == "n" and self.v_th <= 0:
            raise InvalidModelError("n-channel threshold must be positive")
        if self.polarity == "p" and self.v_th >= 0:
            raise InvalidModelError("p-channel threshold must be negative")


class SmallSignal(NamedTuple):
    g_m: float
    g_ds: float
    region: str


def _nmos_current(k: float, v_ov: float, v_ds: float, lam: float) -> float:
    # v_ds >= 0 here; callers handle polarity and source/drain reversal.
    if v_ov <= 0.0:
        return 0.0
    if v_ds >= v_ov:
        return 0.5 * k * v_ov * v_ov * (1.0 + lam * v_ds)
    # The (1 + lam v_ds) factor is kept in triode so the two regions meet
    # exactly at v_ds = v_ov instead of jumping by the modulation term.
    return k * (v_ov * v_ds - 0.5 * v_ds * v_ds) * (1.0 + lam * v_ds)


def _nmos_derivs(k: float, v_ov: float, v_ds: float, lam: float) -> SmallSignal:
    if v_ov <= 0.0:
        return SmallSignal(0.0, 0.0, "cutoff")
    if v_ds >= v_ov:
        return SmallSignal(k * v_ov * (1.0 + lam * v_ds),
                           0.5 * k * v_ov * v_ov * lam,
                           "saturation")
    mod = 1.0 + lam * v_ds
    g_m = k * v_ds * mod
    g_ds = k * (v_ov - v_ds) * mod + k * (v_ov * v_ds - 0.5 * v_ds * v_ds) * lam
    return SmallSignal(g_m, g_ds, "triode")


def _fold(p: MosParams, v_gs: float, v_ds: float) -> tuple[float, float, float]:
    """Map any bias onto the v_ds >= 0 n-channel quarter-plane.

    Returns (v_ov, v_ds, sign) such that i_d = sign * _nmos_current(...).
    The channel is symmetric, so a reversed v_ds swaps the source and drain
    roles; polarity mirrors both voltages.
    """
    if p.polarity == "p":
        v_gs, v_ds = -v_gs, -v_ds
        v_th = -p.v_th
        sign = -1.0
    else:
        v_th = p.v_th
        sign = 1.0
    if v_ds < 0.0:
        # swapped terminals: the gate-source voltage becomes gate-drain
        return v_gs - v_ds - v_th, -v_ds, -sign
    return v_gs - v_th, v_ds, sign


def mos_current(p: MosParams, v_gs: float, v_ds: float) -> float:
    """Drain current (A) into the drain; negative for a conducting p-channel."""
    v_ov, v_ds_f, sign = _fold(p, v_gs, v_ds)
    return sign * _nmos_current(p.k_factor, v_ov, v_ds_f, p.lam)


def mos_small_signal(p: MosParams, v_gs: float, v_ds: float) -> SmallSignal:
    """Analytic (d i/d v_gs, d i/d v_ds) of mos_current, region-tagged.

    True signed partial derivatives with respect to the terminal voltages
    as passed in, so they drop straight into a Newton Jacobian for either
    polarity and either channel direction.
    """
    v_ov, v_ds_f, sign = _fold(p, v_gs, v_ds)
    ss = _nmos_derivs(p.k_factor, v_ov, v_ds_f, p.lam)
    reversed_channel = (v_ds > 0.0) if p.polarity == "p" else (v_ds < 0.0)
    if reversed_channel:
        # chain rule through the source/drain swap: v_ov picks up -v_ds
        return SmallSignal(-ss.g_m, ss.g_m + ss.g_ds, ss.region)
    return SmallSignal(ss.g_m, ss.g_ds, ss.region)


@dataclass(frozen=True)
class VaractorModel:
    """Accumulation-mode varactor: tanh curve, endpoint-exact and monotone.

    C(v) runs from c_min at v_lo to c_max at v_hi, odd-symmetric about the
    control midpoint; shape sets the steepness of the transition.  Voltages
    outside the control range clamp to the endpoint capacitances.
    """

    c_min: float
    c_max: float
    v_lo: float
    v_hi: float
    shape: float = 2.0

    def validate(self) -> None:
        if not 0 < self.c_min < self.c_max:
            raise InvalidModelError("varactor needs 0 < c_min < c_max")
        if not self.v_lo < self.v_hi:
            raise InvalidModelError("varactor needs v_lo < v_hi")
        if self.shape <= 0:
            raise InvalidModelError("varactor shape must be positive")


def varactor_capacitance(m: VaractorModel, v_c: float) -> float:
    """Capacitance (F) at control voltage v_c."""
    if v_c <= m.v_lo:
        return m.c_min
    if v_c >= m.v_hi:
        return m.c_max
    mid = 0.5 * (m.v_lo + m.v_hi)
    half = 0.5 * (m.v_hi - m.v_lo)
    x = (v_c - mid) / half
    return (0.5 * (m.c_min + m.c_max)
            + 0.5 * (m.c_max - m.c_min) * math.tanh(m.shape * x) / math.tanh(m.shape))


def varactor_capacitance_slope(m: VaractorModel, v_c: float) -> float:
    """dC/dV (F/V); zero outside the control range where C is clamped."""
    if v_c <= m.v_lo or v_c >= m.v_hi:
        return 0.0
    mid = 0.5 * (m.v_lo + m.v_hi)
    half = 0.5 * (m.v_hi - m.v_lo)
    x = (v_c - mid) / half
    sech2 = 1.0 / math.cosh(m.shape * x) ** 2
    return 0.5 * (m.c_max - m.c_min) * m.shape * sech2 / (math.tanh(m.shape) * half)


_CODE_WEIGHT = {"00": 0.0, "01": 0.5, "10": 0.5, "11": 1.0}


@dataclass(frozen=True)
class TuningArray:
    """2-bit binary-weighted switched-capacitor bank, c_unit is full scale."""

    c_unit: float
    code: str = "00"

    def validate(self) -> None:
        if self.c_unit <= 0:
            raise InvalidModelError("tuning array c_unit must be positive")
        if self.code not in _CODE_WEIGHT:
            raise InvalidModelError(f"tuning array code must be one of "
                                    f"{sorted(_CODE_WEIGHT)}, got {self.code!r}")


def tuning_array_capacitance(a: TuningArray) -> float:
    """Equivalent capacitance at the set code: 0, c/2 or c, exact."""
    a.validate()
    return _CODE_WEIGHT[a.code] * a.c_unit


# Dot convention for the 3-coil sets: the secondaries are wound so that
# coupling into the second secondary is inverted, which is what turns the
# cross-core source injection into positive feedback once the cores are
# wired output->far-core-source.  Tests flip this to verify lock failure.
DEFAULT_DOT_SIGNS = ((1, 1, -1),
                     (1, 1, -1),
                     (-1, -1, 1))


@dataclass(frozen=True)
class CoupledInductorSet:
    """Signed 3x3 inductance matrix plus per-coil series resistance."""

    matrix: tuple[tuple[float, float, float], ...]
    series_r: tuple[float, float, float]
    dot_signs: tuple[tuple[int, int, int], ...] = DEFAULT_DOT_SIGNS

    def validate(self) -> None:
        m = self.matrix
        if len(m) != 3 or any(len(row) != 3 for row in m):
            raise InvalidModelError("coupled set needs a 3x3 matrix")
        scale = max(abs(m[i][i]) for i in range(3))
        for i in range(3):
            for j in range(3):
                if abs(m[i][j] - m[j][i]) > 1e-12 * scale:
                    raise InvalidModelError("inductance matrix must be symmetric")
        if any(m[i][i] <= 0 for i in range(3)):
            raise InvalidModelError("self inductances must be positive")
        if any(r < 0 for r in self.series_r):
            raise InvalidModelError("series resistances must be non-negative")
        if float(np.linalg.eigvalsh(np.array(m)).min()) <= 0:
            raise InvalidModelError(
                "inductance matrix is not positive definite (over-coupled)")


def coupled_inductor_matrix(x: TransformerModel,
                            dot_signs=DEFAULT_DOT_SIGNS) -> CoupledInductorSet:
    """Signed coupled-inductor stamp for one extracted transformer."""
    x.validate()
    l = (x.l_p, x.l_s1, x.l_s2)
    k = ((1.0, x.k_ps1, x.k_ps2),
         (x.k_ps1, 1.0, x.k_ss),
         (x.k_ps2, x.k_ss, 1.0))
    matrix = tuple(
        tuple(dot_signs[i][j] * k[i][j] * math.sqrt(l[i] * l[j]) for j in range(3))
        for i in range(3))
    series = (x.r_pac, x.r_sac, x.r_sac)
    out = CoupledInductorSet(matrix=matrix, series_r=series, dot_signs=dot_signs)
    out.validate()
    return out


@dataclass(frozen=True)
class BufferParams:
    """AC-coupled self-biased inverter output buffer.

    The pull-up is stronger than the pull-down (p_to_n_ratio scales the
    PMOS k_factor) and the feedback resistor self-biases the input near
    the inverter trip point.
    """

    c_couple: float = 1e-12
    r_feedback: float = 100e3
    p_to_n_ratio: float = 2.0
    nmos: MosParams = field(default_factory=lambda: MosParams(
        polarity="n", k_factor=2e-3, v_th=0.25, lam=0.05))

    def pmos(self) -> MosParams:
        return MosParams(polarity="p",
                         k_factor=self.p_to_n_ratio * self.nmos.k_factor,
                         v_th=-abs(self.nmos.v_th), lam=self.nmos.lam)

    def validate(self) -> None:
        if self.c_couple <= 0 or self.r_feedback <= 0:
            raise InvalidModelError("buffer coupling C and feedback R must be positive")
        if self.p_to_n_ratio <= 1.0:
            raise InvalidModelError("buffer pull-up must be stronger than pull-down")
        self.nmos.validate()
