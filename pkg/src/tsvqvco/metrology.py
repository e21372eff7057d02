"""Waveform metrology and the Leeson phase-noise estimate.

Everything here post-processes a finished transient: oscillation
detection, fundamental frequency, per-output swing and phase, startup
time, and supply power.  Frequency comes from a Hann-windowed Fourier
magnitude peak refined by parabolic interpolation; phases come from the
fundamental's complex angle over an integer number of cycles so spectral
leakage cancels between outputs.

Thermal noise is never simulated; phase noise is estimated from tank
parameters with Leeson's formula at a fixed 290 K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import TankParams, tank_resonance_and_q
from .devices import BOLTZMANN_J_K
from .engine import Waveforms
from .errors import InvalidModelError

LEESON_TEMP_K = 290.0
DEFAULT_OUTPUTS = ("V_o1", "V_o2", "V_o3", "V_o4")
# Swings below this are treated as numerical residue, not oscillation.
MIN_SWING_V = 0.02
STEADY_CYCLES = 5
STEADY_REL_TOL = 1e-3
ENVELOPE_FRAC = 0.9


@dataclass
class SimMetrics:
    """Steady-state measurements for one transient run.

    amplitudes_vpp is keyed by output node; phases_deg holds every output
    after the first, in degrees relative to the first, wrapped to
    [0, 360).  Power is split into the core supply and the buffer supply;
    either is None when the corresponding source is absent.  When
    oscillating is False only the amplitudes are meaningful.
    """

    oscillating: bool
    f_osc_hz: float | None = None
    amplitudes_vpp: dict[str, float] = field(default_factory=dict)
    delta_v_out_v: float | None = None
    phases_deg: dict[str, float] = field(default_factory=dict)
    startup_s: float | None = None
    power_core_mw: float | None = None
    power_buffer_mw: float | None = None
    steady: bool = False

    def validate(self) -> None:
        if self.oscillating:
            if self.f_osc_hz is None or self.f_osc_hz <= 0:
                raise InvalidModelError(
                    "oscillating metrics need a positive frequency")
            if self.delta_v_out_v is not None and self.delta_v_out_v < 0:
                raise InvalidModelError("amplitude imbalance cannot be negative")


def estimate_frequency(time_s: np.ndarray, x: np.ndarray) -> float | None:
    """Fundamental of a uniformly sampled trace, or None when the
    spectrum has no usable off-DC peak."""
    n = len(x)
    if n < 16:
        return None
    dt = float(time_s[1] - time_s[0])
    sig = x - float(np.mean(x))
    if float(np.max(np.abs(sig))) == 0.0:
        return None
    win = np.hanning(n)
    mag = np.abs(np.fft.rfft(sig * win))
    if len(mag) < 4:
        return None
    k = int(np.argmax(mag[1:-1])) + 1
    if mag[k] <= 0.0 or k < 1:
        return None
    # Parabolic refinement on log magnitude; guard the flat-spectrum case.
    lm, l0, lp = (math.log(max(m, 1e-300)) for m in mag[k - 1:k + 2])
    den = lm - 2.0 * l0 + lp
    delta = 0.0 if den == 0.0 else 0.5 * (lm - lp) / den
    delta = min(max(delta, -0.5), 0.5)
    return (k + delta) / (n * dt)


def _fundamental_phasor(time_s: np.ndarray, x: np.ndarray,
                        f_hz: float) -> complex:
    """Complex fundamental over the largest integer number of cycles that
    fits, taken from the end of the trace."""
    dt = float(time_s[1] - time_s[0])
    span = float(time_s[-1] - time_s[0])
    n_cyc = math.floor(span * f_hz)
    if n_cyc < 1:
        raise InvalidModelError("trace shorter than one oscillation cycle")
    n_pts = int(round(n_cyc / (f_hz * dt)))
    seg = x[-n_pts:] - float(np.mean(x[-n_pts:]))
    t = time_s[-n_pts:]
    return complex(np.sum(seg * np.exp(-2j * np.pi * f_hz * t)))


def _peak_to_peak(x: np.ndarray) -> float:
    return float(np.max(x) - np.min(x))


def _refined_extremum(x: np.ndarray, idx: int) -> float:
    """Parabolic value refinement at a sampled extremum.

    Outputs at different phases sample their true peaks at different
    sub-sample offsets; without refinement that beat shows up as a fake
    swing imbalance of order (pi/points_per_period)^2.
    """
    if idx <= 0 or idx >= len(x) - 1:
        return float(x[idx])
    y0, y1, y2 = float(x[idx - 1]), float(x[idx]), float(x[idx + 1])
    den = y0 - 2.0 * y1 + y2
    if den == 0.0:
        return y1
    d = 0.5 * (y0 - y2) / den
    if abs(d) > 1.0:
        return y1
    return y1 - 0.25 * (y0 - y2) * d


def _refined_p2p(x: np.ndarray) -> float:
    hi = _refined_extremum(x, int(np.argmax(x)))
    lo = _refined_extremum(x, int(np.argmin(x)))
    return hi - lo


def _cycle_envelope(time_s: np.ndarray, x: np.ndarray,
                    f_hz: float) -> tuple[np.ndarray, np.ndarray]:
    """Peak-to-peak swing per oscillation period; returns (end times, swings)."""
    dt = float(time_s[1] - time_s[0])
    per_pts = max(int(round(1.0 / (f_hz * dt))), 2)
    n_win = len(x) // per_pts
    ends = np.empty(n_win)
    p2p = np.empty(n_win)
    for m in range(n_win):
        seg = x[m * per_pts:(m + 1) * per_pts]
        p2p[m] = seg.max() - seg.min()
        ends[m] = time_s[min((m + 1) * per_pts, len(x) - 1)]
    return ends, p2p


def _supply_power_mw(w: Waveforms, label: str, v_dd: float,
                     f_hz: float | None) -> float | None:
    key = f"I({label})"
    if key not in w.currents:
        return None
    i = w.currents[key]
    if f_hz is not None:
        span = float(w.time_s[-1] - w.time_s[0])
        n_cyc = math.floor(0.5 * span * f_hz)
        if n_cyc >= 1:
            dt = float(w.time_s[1] - w.time_s[0])
            n_pts = int(round(n_cyc / (f_hz * dt)))
            i = i[-n_pts:]
        else:
            i = i[len(i) // 2:]
    else:
        i = i[len(i) // 2:]
    # Branch current flows into the source's positive terminal, so the
    # power delivered to the circuit is v * (-i).
    return v_dd * float(np.mean(-i)) * 1e3


def measure_metrics(w: Waveforms, v_dd: float,
                    outputs: tuple[str, ...] | None = None,
                    core_source: str = "vdd_core",
                    buffer_source: str = "vdd_buf",
                    min_swing_v: float = MIN_SWING_V) -> SimMetrics:
    """Extract oscillation metrics from a transient run.

    outputs defaults to whichever of V_o1..V_o4 exist, in that order.
    Frequency and phases use the second half of the run, swings the final
    few cycles; startup search uses the whole run.  A swing below
    min_swing_v over the final tenth of the run, or an unusable spectrum,
    reports a not-oscillating result rather than raising.
    """
    w.validate()
    if v_dd <= 0:
        raise InvalidModelError("supply voltage must be positive")
    if outputs is None:
        outputs = tuple(n for n in DEFAULT_OUTPUTS if n in w.voltages)
    if not outputs:
        raise InvalidModelError("no output nodes to measure")
    missing = [n for n in outputs if n not in w.voltages]
    if missing:
        raise InvalidModelError(f"output nodes not in waveforms: {missing}")

    n = len(w.time_s)
    tail = slice(n // 2, n)
    late = slice(max(n - max(n // 10, 64), 0), n)
    amplitudes = {name: _peak_to_peak(w.voltages[name][tail])
                  for name in outputs}

    first = w.voltages[outputs[0]]
    f_osc = estimate_frequency(w.time_s[tail], first[tail])
    alive = _peak_to_peak(first[late]) >= min_swing_v
    if not alive or f_osc is None:
        return SimMetrics(
            oscillating=False, amplitudes_vpp=amplitudes,
            power_core_mw=_supply_power_mw(w, core_source, v_dd, None),
            power_buffer_mw=_supply_power_mw(w, buffer_source, v_dd, None))

    ref = _fundamental_phasor(w.time_s, first, f_osc)
    phases: dict[str, float] = {}
    for name in outputs[1:]:
        c = _fundamental_phasor(w.time_s, w.voltages[name], f_osc)
        rel = math.degrees(math.atan2((c / ref).imag, (c / ref).real))
        phases[name] = rel % 360.0

    # Settled swings: refined extrema over the final integer-cycle window.
    dt = float(w.time_s[1] - w.time_s[0])
    n_settled = int(round(STEADY_CYCLES / (f_osc * dt)))
    if 2 <= n_settled <= n:
        amplitudes = {name: _refined_p2p(w.voltages[name][-n_settled:])
                      for name in outputs}

    ends, env = _cycle_envelope(w.time_s, first, f_osc)
    startup = None
    steady = False
    if len(env) >= STEADY_CYCLES:
        steady_amp = float(np.median(env[-STEADY_CYCLES:]))
        last = env[-STEADY_CYCLES:]
        steady = bool(last.min() > 0.0 and
                      (last.max() - last.min()) / steady_amp < STEADY_REL_TOL)
        # Search backwards so the supply turn-on transient, which can
        # swing a full period's window on its own, cannot claim startup.
        below = np.where(env < ENVELOPE_FRAC * steady_amp)[0]
        if len(below) == 0:
            startup = float(ends[0])
        elif below[-1] + 1 < len(ends):
            startup = float(ends[below[-1] + 1])

    delta = (max(amplitudes.values()) - min(amplitudes.values())
             if len(outputs) >= 2 else None)
    m = SimMetrics(
        oscillating=True, f_osc_hz=f_osc, amplitudes_vpp=amplitudes,
        delta_v_out_v=delta, phases_deg=phases, startup_s=startup,
        power_core_mw=_supply_power_mw(w, core_source, v_dd, f_osc),
        power_buffer_mw=_supply_power_mw(w, buffer_source, v_dd, f_osc),
        steady=steady)
    m.validate()
    return m


def phase_noise_leeson(t: TankParams, p_sig_mw: float, offset_hz: float,
                       f_excess_db: float = 0.0) -> float:
    """Leeson estimate in dBc/Hz at the given offset from the carrier.

    L = 10 log10( F kT / (2 P_sig) * (f0 / (2 Q df))^2 ) with the noise
    factor F taken from f_excess_db and T fixed at 290 K.  Only the
    1/f^2 region is modeled; flicker corner and noise floor are out of
    scope.
    """
    t.validate()
    if p_sig_mw <= 0:
        raise InvalidModelError("signal power must be positive")
    if offset_hz <= 0:
        raise InvalidModelError("offset frequency must be positive")
    omega0, q = tank_resonance_and_q(t)
    f0 = omega0 / (2.0 * math.pi)
    noise_factor = 10.0 ** (f_excess_db / 10.0)
    ratio = f0 / (2.0 * q * offset_hz)
    return 10.0 * math.log10(
        noise_factor * BOLTZMANN_J_K * LEESON_TEMP_K
        / (2.0 * p_sig_mw * 1e-3) * ratio * ratio)
