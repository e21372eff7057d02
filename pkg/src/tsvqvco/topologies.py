"""Built-in oscillator netlists.

Four topologies share one parameter block:

- "lc-vco":  NMOS cross-coupled pair, two drain inductors to the supply,
  differential RC tank.
- "tf-vco":  the same pair with per-side two-coil transformers; the
  drain coil is the primary and the source sits on the secondary.
- "cr-vco":  one stacked PMOS/NMOS pair with the tank between the two
  drains, gates cross-coupled; supply current is shared by both devices.
- "tc-qvco": two cr-vco cores whose tank inductors are the primaries of
  two three-coil transformers; each transformer's secondaries sit in the
  source paths of the *other* core, so the cores injection-lock in
  quadrature.  Outputs V_o1/V_o2 belong to core A, V_o3/V_o4 to core B,
  each optionally buffered by an AC-coupled self-biased inverter on its
  own supply.

Tank capacitance in every topology is the sum of an optional varactor,
an optional switched 2-bit array and a fixed parasitic.  All supplies
ramp from zero so the first Newton steps see a soft turn-on; startup is
seeded by the engine's initial-condition perturbation on V_o1.

build_quadrature_bench is different in kind: it is the linearized
small-signal model of the coupled cores (controlled sources instead of
transistors), used to check growth thresholds and the oscillation
frequency against the closed-form tank analysis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .analysis import TankParams, min_transconductance
from .devices import (
    DEFAULT_DOT_SIGNS,
    BufferParams,
    MosParams,
    TuningArray,
    VaractorModel,
    coupled_inductor_matrix,
)
from .engine import SimConfig
from .errors import InvalidModelError
from .netlist import Netlist
from .transformer import TransformerModel

TOPOLOGIES = ("lc-vco", "tf-vco", "cr-vco", "tc-qvco")


@dataclass
class TopologyParams:
    """Device, tank and bias block consumed by build_netlist.

    Per-topology requirements are checked by the builders: the
    transformer-based topologies need `transformer`, the plain-tank ones
    need l_tank_h / c_tank_f / r_tank_ohm.  pmos defaults to a mirror of
    nmos so the cr cores are symmetric unless deliberately skewed.
    k_mismatch_frac scales the NMOS k_factor only, modeling an N-to-P
    strength imbalance.
    """

    # low-threshold devices: at 0.7 V supply the cores must stay in the
    # soft-switching regime or the quadrature amplitudes walk apart
    v_dd_v: float = 0.7
    nmos: MosParams = field(default_factory=lambda: MosParams(
        polarity="n", k_factor=0.026, v_th=0.09, lam=0.05))
    pmos: MosParams | None = None
    transformer: TransformerModel | None = None
    dot_signs: tuple = DEFAULT_DOT_SIGNS
    flip_dots: bool = False
    l_tank_h: float | None = None
    c_tank_f: float | None = None
    r_tank_ohm: float | None = None
    varactor: VaractorModel | None = None
    v_ctrl_v: float = 0.0
    array: TuningArray | None = None
    c_parasitic_f: float = 0.0
    buffers: BufferParams | None = None
    c_load_f: float = 20e-15
    include_pair: bool = True
    k_mismatch_frac: float = 0.0
    source_ramp_s: float = 1e-9

    def validate(self) -> None:
        if self.v_dd_v <= 0:
            raise InvalidModelError("supply voltage must be positive")
        self.nmos.validate()
        if self.pmos is not None:
            self.pmos.validate()
        if self.c_parasitic_f < 0:
            raise InvalidModelError("parasitic capacitance cannot be negative")
        if self.c_load_f < 0:
            raise InvalidModelError("buffer load cannot be negative")
        if self.k_mismatch_frac <= -1.0:
            raise InvalidModelError("mismatch would make the NMOS k negative")
        if self.source_ramp_s < 0:
            raise InvalidModelError("source ramp must be non-negative")
        if self.varactor is not None:
            self.varactor.validate()
        if self.array is not None:
            self.array.validate()
        if self.buffers is not None:
            self.buffers.validate()

    def core_nmos(self) -> MosParams:
        k = self.nmos.k_factor * (1.0 + self.k_mismatch_frac)
        return MosParams(polarity="n", k_factor=k, v_th=self.nmos.v_th,
                         lam=self.nmos.lam)

    def core_pmos(self) -> MosParams:
        if self.pmos is not None:
            return self.pmos
        return MosParams(polarity="p", k_factor=self.nmos.k_factor,
                         v_th=-abs(self.nmos.v_th), lam=self.nmos.lam)


def flip_ps_signs(dot_signs) -> tuple:
    """Reverse both primary dots: negates primary-secondary coupling and
    keeps the secondary-secondary term (congruence, so definiteness is
    untouched)."""
    d = (1, -1, -1)
    return tuple(tuple(d[i] * dot_signs[i][j] * d[j] for j in range(3))
                 for i in range(3))


def _require(p: TopologyParams, names: tuple[str, ...], topo: str) -> None:
    missing = [n for n in names if getattr(p, n) is None]
    if missing:
        raise InvalidModelError(f"{topo} needs {', '.join(missing)}")


def _add_tank_caps(net: Netlist, p: TopologyParams, a: str, b: str,
                   tag: str) -> None:
    """Capacitive side of one differential tank: varactor and switched
    array between nodes a and b, parasitic junction caps to ground."""
    if p.varactor is not None:
        net.add_varactor(a, b, "v_ctrl", "gnd", p.varactor,
                         label=f"cvar_{tag}")
    if p.c_parasitic_f > 0:
        # drain parasitics land on the substrate, not across the tank;
        # grounding them also pins each end's common mode, which the
        # cross-coupled devices alone leave nearly free
        net.add_capacitor(a, "gnd", p.c_parasitic_f, label=f"cpar_{tag}1")
        net.add_capacitor(b, "gnd", p.c_parasitic_f, label=f"cpar_{tag}2")
    if p.array is not None:
        # one series C-switch-C branch per bit; each branch contributes
        # c_unit/2 differentially when closed, matching the array model
        for bit, state in enumerate(p.array.code):
            m1 = f"{tag}_b{bit}p"
            m2 = f"{tag}_b{bit}n"
            net.add_capacitor(a, m1, p.array.c_unit, label=f"ca_{tag}{bit}")
            net.add_switch(m1, m2, state == "1", label=f"sw_{tag}{bit}")
            net.add_capacitor(m2, b, p.array.c_unit, label=f"cb_{tag}{bit}")


def _add_buffer(net: Netlist, p: TopologyParams, src: str, tag: str) -> None:
    buf = p.buffers
    gate = f"buf_{tag}_in"
    out = f"buf_{tag}_out"
    net.add_capacitor(src, gate, buf.c_couple, label=f"cc_{tag}")
    net.add_resistor(gate, out, buf.r_feedback, label=f"rf_{tag}")
    net.add_mos(out, gate, "vdd_buf", buf.pmos(), label=f"mpb_{tag}")
    net.add_mos(out, gate, "gnd", buf.nmos, label=f"mnb_{tag}")
    if p.c_load_f > 0:
        net.add_capacitor(out, "gnd", p.c_load_f, label=f"cl_{tag}")


def _add_sources(net: Netlist, p: TopologyParams, buffered: bool) -> None:
    net.add_vsource("vdd", "gnd", p.v_dd_v, label="vdd_core",
                    ramp_s=p.source_ramp_s)
    if buffered:
        net.add_vsource("vdd_buf", "gnd", p.v_dd_v, label="vdd_buf",
                        ramp_s=p.source_ramp_s)
    if p.varactor is not None:
        net.add_vsource("v_ctrl", "gnd", p.v_ctrl_v, label="v_c",
                        ramp_s=p.source_ramp_s)


def _build_lc_vco(p: TopologyParams) -> Netlist:
    _require(p, ("l_tank_h", "c_tank_f", "r_tank_ohm"), "lc-vco")
    net = Netlist()
    _add_sources(net, p, buffered=p.buffers is not None)
    net.add_inductor("vdd", "V_o1", p.l_tank_h, label="l_1")
    net.add_inductor("vdd", "V_o2", p.l_tank_h, label="l_2")
    net.add_resistor("V_o1", "V_o2", p.r_tank_ohm, label="r_tank")
    net.add_capacitor("V_o1", "V_o2", p.c_tank_f, label="c_tank")
    _add_tank_caps(net, p, "V_o1", "V_o2", "a")
    if p.include_pair:
        net.add_mos("V_o1", "V_o2", "gnd", p.core_nmos(), label="mn_1")
        net.add_mos("V_o2", "V_o1", "gnd", p.core_nmos(), label="mn_2")
    if p.buffers is not None:
        for tag, src in (("1", "V_o1"), ("2", "V_o2")):
            _add_buffer(net, p, src, tag)
    return net


def _two_coil_matrix(x: TransformerModel, sign: int):
    m = sign * x.k_ps1 * math.sqrt(x.l_p * x.l_s1)
    return ((x.l_p, m), (m, x.l_s1))


def _build_tf_vco(p: TopologyParams) -> Netlist:
    _require(p, ("transformer", "c_tank_f"), "tf-vco")
    x = p.transformer
    net = Netlist()
    _add_sources(net, p, buffered=p.buffers is not None)
    # drain coil is the primary, source rides the secondary; the inverted
    # dot makes the source swing opposite the drain (feedback boost)
    m = _two_coil_matrix(x, -1)
    series = (x.r_pac, x.r_sac)
    net.add_coupled_inductors([("vdd", "V_o1"), ("src_1", "gnd")], m, series,
                              label="xfmr_1")
    net.add_coupled_inductors([("vdd", "V_o2"), ("src_2", "gnd")], m, series,
                              label="xfmr_2")
    net.add_capacitor("V_o1", "V_o2", p.c_tank_f, label="c_tank")
    if p.r_tank_ohm is not None:
        net.add_resistor("V_o1", "V_o2", p.r_tank_ohm, label="r_tank")
    _add_tank_caps(net, p, "V_o1", "V_o2", "a")
    net.add_mos("V_o1", "V_o2", "src_1", p.core_nmos(), label="mn_1")
    net.add_mos("V_o2", "V_o1", "src_2", p.core_nmos(), label="mn_2")
    if p.buffers is not None:
        for tag, src in (("1", "V_o1"), ("2", "V_o2")):
            _add_buffer(net, p, src, tag)
    return net


def _build_cr_vco(p: TopologyParams) -> Netlist:
    _require(p, ("l_tank_h", "c_tank_f", "r_tank_ohm"), "cr-vco")
    net = Netlist()
    _add_sources(net, p, buffered=p.buffers is not None)
    net.add_mos("V_o1", "V_o2", "vdd", p.core_pmos(), label="mp_1")
    net.add_mos("V_o2", "V_o1", "gnd", p.core_nmos(), label="mn_1")
    net.add_inductor("V_o1", "V_o2", p.l_tank_h, label="l_tank")
    net.add_resistor("V_o1", "V_o2", p.r_tank_ohm, label="r_tank")
    net.add_capacitor("V_o1", "V_o2", p.c_tank_f, label="c_tank")
    _add_tank_caps(net, p, "V_o1", "V_o2", "a")
    if p.buffers is not None:
        for tag, src in (("1", "V_o1"), ("2", "V_o2")):
            _add_buffer(net, p, src, tag)
    return net


def _build_tc_qvco(p: TopologyParams) -> Netlist:
    _require(p, ("transformer",), "tc-qvco")
    coup_a = coupled_inductor_matrix(p.transformer, p.dot_signs)
    # flipping one transformer's primary dots turns the antisymmetric
    # round trip into a symmetric one, which locks the cores at 0/180
    # instead of quadrature; flipping both would just relabel the modes
    signs_b = flip_ps_signs(p.dot_signs) if p.flip_dots else p.dot_signs
    coup_b = coupled_inductor_matrix(p.transformer, signs_b)

    net = Netlist()
    _add_sources(net, p, buffered=p.buffers is not None)

    # Transformer A: primary is core A's tank, secondaries feed core B's
    # sources.  Transformer B mirrors this back with the secondary
    # connections reversed, which is what makes the round-trip coupling
    # antisymmetric and locks the cores 90 degrees apart.
    # Winding order encodes the polarity: with the s2 dot inverted, these
    # orientations make each injection differential (the two sources of
    # the receiving core move apart), and reversing both of transformer
    # B's secondaries makes the round trip antisymmetric.
    net.add_coupled_inductors(
        [("V_o1", "V_o2"), ("vdd", "src_p_b"), ("gnd", "src_n_b")],
        coup_a.matrix, coup_a.series_r, label="xfmr_a")
    net.add_coupled_inductors(
        [("V_o3", "V_o4"), ("src_p_a", "vdd"), ("src_n_a", "gnd")],
        coup_b.matrix, coup_b.series_r, label="xfmr_b")

    for core, (op, on) in (("a", ("V_o1", "V_o2")), ("b", ("V_o3", "V_o4"))):
        net.add_mos(op, on, f"src_p_{core}", p.core_pmos(), label=f"mp_{core}")
        net.add_mos(on, op, f"src_n_{core}", p.core_nmos(), label=f"mn_{core}")
        if p.r_tank_ohm is not None:
            net.add_resistor(op, on, p.r_tank_ohm, label=f"r_tank_{core}")
        _add_tank_caps(net, p, op, on, core)

    if p.buffers is not None:
        for tag, src in (("1", "V_o1"), ("2", "V_o2"),
                         ("3", "V_o3"), ("4", "V_o4")):
            _add_buffer(net, p, src, tag)
    return net


_BUILDERS = {
    "lc-vco": _build_lc_vco,
    "tf-vco": _build_tf_vco,
    "cr-vco": _build_cr_vco,
    "tc-qvco": _build_tc_qvco,
}


def build_netlist(topology: str, params: TopologyParams) -> Netlist:
    """Construct one of the built-in oscillators; see module docstring."""
    if topology not in _BUILDERS:
        raise InvalidModelError(
            f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    params.validate()
    net = _BUILDERS[topology](params)
    net.validate()
    return net


def build_quadrature_bench(t: TankParams, g_m_margin: float) -> Netlist:
    """Linearized two-core quadrature model: per core one parallel RLC to
    ground (L is the reflected k^2 L_p) plus controlled sources carrying
    the small-signal core action.

    The self term g_m (1/2 - 1/kn^2) turns into exactly 1/R at margin 1,
    so the envelope grows above margin 1 and decays below it; the cross
    term 1.5 g_m / kn is antisymmetric between the cores, which selects
    the +-90 degree modes.  Node names reuse V_o1/V_o3 so the engine's
    startup perturbation applies.
    """
    t.validate()
    if g_m_margin <= 0:
        raise InvalidModelError("transconductance margin must be positive")
    g_m = g_m_margin * min_transconductance(t)
    g_self = g_m * (0.5 - 1.0 / (t.kn * t.kn))
    g_cross = 1.5 * g_m / t.kn

    net = Netlist()
    for node in ("V_o1", "V_o3"):
        net.add_resistor(node, "gnd", t.r_parallel, label=f"r_{node}")
        net.add_inductor(node, "gnd", t.l_eq, label=f"l_{node}")
        net.add_capacitor(node, "gnd", t.c_tank, label=f"c_{node}")
    net.add_vccs("V_o1", "gnd", "V_o1", "gnd", -g_self, label="g_self_1")
    net.add_vccs("V_o3", "gnd", "V_o3", "gnd", -g_self, label="g_self_3")
    net.add_vccs("V_o1", "gnd", "V_o3", "gnd", -g_cross, label="g_cross_13")
    net.add_vccs("V_o3", "gnd", "V_o1", "gnd", g_cross, label="g_cross_31")
    net.validate()
    return net


def default_sim_config(f_est_hz: float, n_periods: int = 400,
                       points_per_period: int = 200,
                       perturbation_v: float = 1e-3) -> SimConfig:
    """Step and span sized from an expected oscillation frequency."""
    if f_est_hz <= 0:
        raise InvalidModelError("frequency estimate must be positive")
    if n_periods < 2 or points_per_period < 20:
        raise InvalidModelError("simulation span or resolution too small")
    cfg = SimConfig(dt_s=1.0 / (points_per_period * f_est_hz),
                    t_stop_s=n_periods / f_est_hz,
                    perturbation_v=perturbation_v)
    cfg.validate()
    return cfg
