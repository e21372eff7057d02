"""Circuit netlists for the transient engine.

Nodes are referenced by name; "0" and "gnd" are the ground node.  Elements
are added through the add_* methods, which resolve names to indices at
insertion time so a finished netlist is a flat, ordered element list.  The
element order and the node registration order together fix the MNA unknown
ordering, which is what makes repeated runs bit-identical.

Branch-current unknowns exist for inductors, every winding of a coupled
set, and voltage sources; everything else is stamped as a conductance or
a nonlinear current.

The debug dump format is one line per element:

    <kind> <label> <node> <node> [...] <param>=<value> [...]

with nodes in the element's terminal order and parameters in SI units.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .devices import (
    SWITCH_OFF_OHM,
    SWITCH_ON_OHM,
    MosParams,
    VaractorModel,
)
from .errors import InvalidModelError

GROUND_NAMES = ("0", "gnd")
GROUND = -1


@dataclass(frozen=True)
class Resistor:
    a: int
    b: int
    ohms: float
    label: str


@dataclass(frozen=True)
class Capacitor:
    a: int
    b: int
    farads: float
    label: str


@dataclass(frozen=True)
class Inductor:
    a: int
    b: int
    henries: float
    label: str
    i_initial_a: float = 0.0


@dataclass(frozen=True)
class CoupledInductors:
    """N windings with a full, signed inductance matrix and series loss.

    pairs[w] = (a, b) is winding w from node a to node b; the branch
    current flows a -> b inside the winding.
    """

    pairs: tuple[tuple[int, int], ...]
    matrix: tuple[tuple[float, ...], ...]
    series_r: tuple[float, ...]
    label: str
    i_initial_a: tuple[float, ...] = ()


@dataclass(frozen=True)
class Mos:
    d: int
    g: int
    s: int
    params: MosParams
    label: str


@dataclass(frozen=True)
class Varactor:
    """Voltage-controlled capacitor between a and b.

    The control pair (cp, cn) only senses a voltage; no current flows
    through it.  Charge is q = C(v_ctrl) * v_ab.
    """

    a: int
    b: int
    cp: int
    cn: int
    model: VaractorModel
    label: str


@dataclass(frozen=True)
class Switch:
    a: int
    b: int
    closed: bool
    label: str

    @property
    def ohms(self) -> float:
        return SWITCH_ON_OHM if self.closed else SWITCH_OFF_OHM


@dataclass(frozen=True)
class VSource:
    """Voltage source p -> n; value ramps linearly from 0 over ramp_s."""

    p: int
    n: int
    volts: float
    label: str
    ramp_s: float = 0.0

    def value_at(self, t: float) -> float:
        if self.ramp_s <= 0.0 or t >= self.ramp_s:
            return self.volts
        return self.volts * (t / self.ramp_s)


@dataclass(frozen=True)
class ISource:
    """Current source pushing amps out of p into n through the element."""

    p: int
    n: int
    amps: float
    label: str
    ramp_s: float = 0.0

    def value_at(self, t: float) -> float:
        if self.ramp_s <= 0.0 or t >= self.ramp_s:
            return self.amps
        return self.amps * (t / self.ramp_s)


@dataclass(frozen=True)
class Vccs:
    """Current gm * (v_cp - v_cn) flowing from p through the element to n.

    Not part of any built topology; exists so linearized benches can be
    wired from the same netlist machinery.  Gain may be negative.
    """

    p: int
    n: int
    cp: int
    cn: int
    gm: float
    label: str


Element = (Resistor | Capacitor | Inductor | CoupledInductors | Mos
           | Varactor | Switch | VSource | ISource | Vccs)


@dataclass
class Netlist:
    node_names: list[str] = field(default_factory=list)
    elements: list[Element] = field(default_factory=list)
    initial_voltages: dict[str, float] = field(default_factory=dict)

    def node(self, name: str) -> int:
        """Index for a named node, creating it on first use."""
        if not isinstance(name, str) or not name:
            raise InvalidModelError("node names must be non-empty strings")
        if name in GROUND_NAMES:
            return GROUND
        try:
            return self.node_names.index(name)
        except ValueError:
            self.node_names.append(name)
            return len(self.node_names) - 1

    def node_name(self, index: int) -> str:
        return "gnd" if index == GROUND else self.node_names[index]

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    def _label(self, label: str | None, kind: str) -> str:
        out = label if label is not None else f"{kind}{len(self.elements)}"
        if any(e.label == out for e in self.elements):
            raise InvalidModelError(f"duplicate element label {out!r}")
        return out

    def add_resistor(self, a: str, b: str, ohms: float,
                     label: str | None = None) -> None:
        if ohms <= 0:
            raise InvalidModelError("resistance must be positive")
        self.elements.append(Resistor(self.node(a), self.node(b), ohms,
                                      self._label(label, "r")))

    def add_capacitor(self, a: str, b: str, farads: float,
                      label: str | None = None) -> None:
        if farads <= 0:
            raise InvalidModelError("capacitance must be positive")
        self.elements.append(Capacitor(self.node(a), self.node(b), farads,
                                       self._label(label, "c")))

    def add_inductor(self, a: str, b: str, henries: float,
                     label: str | None = None,
                     i_initial_a: float = 0.0) -> None:
        if henries <= 0:
            raise InvalidModelError("inductance must be positive")
        self.elements.append(Inductor(self.node(a), self.node(b), henries,
                                      self._label(label, "l"), i_initial_a))

    def add_coupled_inductors(self, pairs, matrix, series_r,
                              label: str | None = None,
                              i_initial_a=None) -> None:
        n = len(pairs)
        m = np.asarray(matrix, dtype=float)
        if n < 2:
            raise InvalidModelError("coupled set needs at least two windings")
        if m.shape != (n, n):
            raise InvalidModelError(
                f"coupled set with {n} windings needs a {n}x{n} matrix")
        scale = float(np.abs(np.diag(m)).max())
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise InvalidModelError("inductance matrix must be symmetric")
        if float(np.linalg.eigvalsh(m).min()) <= 0.0:
            raise InvalidModelError(
                "inductance matrix is not positive definite (over-coupled)")
        if len(series_r) != n or any(r < 0 for r in series_r):
            raise InvalidModelError(
                "coupled set needs one non-negative series R per winding")
        ic = tuple(i_initial_a) if i_initial_a is not None else (0.0,) * n
        if len(ic) != n:
            raise InvalidModelError("initial currents must match winding count")
        self.elements.append(CoupledInductors(
            pairs=tuple((self.node(a), self.node(b)) for a, b in pairs),
            matrix=tuple(tuple(float(v) for v in row) for row in m),
            series_r=tuple(float(r) for r in series_r),
            label=self._label(label, "k"), i_initial_a=ic))

    def add_mos(self, d: str, g: str, s: str, params: MosParams,
                label: str | None = None) -> None:
        params.validate()
        self.elements.append(Mos(self.node(d), self.node(g), self.node(s),
                                 params, self._label(label, "m")))

    def add_varactor(self, a: str, b: str, cp: str, cn: str,
                     model: VaractorModel, label: str | None = None) -> None:
        model.validate()
        self.elements.append(Varactor(self.node(a), self.node(b),
                                      self.node(cp), self.node(cn), model,
                                      self._label(label, "cv")))

    def add_switch(self, a: str, b: str, closed: bool,
                   label: str | None = None) -> None:
        self.elements.append(Switch(self.node(a), self.node(b), bool(closed),
                                    self._label(label, "s")))

    def add_vsource(self, p: str, n: str, volts: float,
                    label: str | None = None, ramp_s: float = 0.0) -> None:
        if ramp_s < 0:
            raise InvalidModelError("source ramp must be non-negative")
        self.elements.append(VSource(self.node(p), self.node(n), volts,
                                     self._label(label, "v"), ramp_s))

    def add_isource(self, p: str, n: str, amps: float,
                    label: str | None = None, ramp_s: float = 0.0) -> None:
        if ramp_s < 0:
            raise InvalidModelError("source ramp must be non-negative")
        self.elements.append(ISource(self.node(p), self.node(n), amps,
                                     self._label(label, "i"), ramp_s))

    def add_vccs(self, p: str, n: str, cp: str, cn: str, gm: float,
                 label: str | None = None) -> None:
        if not np.isfinite(gm):
            raise InvalidModelError("vccs gain must be finite")
        self.elements.append(Vccs(self.node(p), self.node(n), self.node(cp),
                                  self.node(cn), gm, self._label(label, "g")))

    def set_initial_voltage(self, node: str, volts: float) -> None:
        if node in GROUND_NAMES:
            raise InvalidModelError("ground is fixed at 0 V")
        self.node(node)
        self.initial_voltages[node] = volts

    def with_source_ramp(self, ramp_s: float) -> "Netlist":
        """Copy with every faster source slowed to ramp over ramp_s; used
        to rescue a first Newton step that fails on a hard turn-on."""
        out = Netlist(node_names=list(self.node_names),
                      elements=list(self.elements),
                      initial_voltages=dict(self.initial_voltages))
        for i, e in enumerate(out.elements):
            if isinstance(e, (VSource, ISource)) and e.ramp_s < ramp_s:
                out.elements[i] = replace(e, ramp_s=ramp_s)
        return out

    def _terminal_nodes(self, e: Element) -> tuple[int, ...]:
        if isinstance(e, CoupledInductors):
            return tuple(n for pair in e.pairs for n in pair)
        if isinstance(e, Mos):
            return (e.d, e.g, e.s)
        if isinstance(e, (Varactor, Vccs)):
            return (e.a, e.b, e.cp, e.cn) if isinstance(e, Varactor) \
                else (e.p, e.n, e.cp, e.cn)
        if isinstance(e, (VSource, ISource)):
            return (e.p, e.n)
        return (e.a, e.b)

    def validate(self) -> None:
        if not self.elements:
            raise InvalidModelError("netlist has no elements")
        touched: set[int] = set()
        grounded = False
        for e in self.elements:
            for n in self._terminal_nodes(e):
                if n == GROUND:
                    grounded = True
                elif not 0 <= n < self.n_nodes:
                    raise InvalidModelError(
                        f"element {e.label} references unknown node {n}")
                else:
                    touched.add(n)
        if not grounded:
            raise InvalidModelError("no element is connected to ground")
        floating = set(range(self.n_nodes)) - touched
        if floating:
            names = sorted(self.node_names[i] for i in floating)
            raise InvalidModelError(f"nodes used by no element: {names}")
        for name in self.initial_voltages:
            if name not in self.node_names:
                raise InvalidModelError(
                    f"initial condition on unknown node {name!r}")

    def dump(self) -> str:
        """Human-readable line-per-element text form for debugging."""
        lines = [f"nodes {' '.join(self.node_names)}"]
        for e in self.elements:
            nodes = " ".join(self.node_name(n) for n in self._terminal_nodes(e))
            if isinstance(e, Resistor):
                params = f"ohms={e.ohms:g}"
            elif isinstance(e, Capacitor):
                params = f"farads={e.farads:g}"
            elif isinstance(e, Inductor):
                params = f"henries={e.henries:g} i0={e.i_initial_a:g}"
            elif isinstance(e, CoupledInductors):
                diag = " ".join(f"{e.matrix[i][i]:g}" for i in range(len(e.pairs)))
                params = f"self=[{diag}] r=[{' '.join(f'{r:g}' for r in e.series_r)}]"
            elif isinstance(e, Mos):
                p = e.params
                params = (f"polarity={p.polarity} k={p.k_factor:g} "
                          f"vth={p.v_th:g} lam={p.lam:g}")
            elif isinstance(e, Varactor):
                m = e.model
                params = (f"c_min={m.c_min:g} c_max={m.c_max:g} "
                          f"v_lo={m.v_lo:g} v_hi={m.v_hi:g}")
            elif isinstance(e, Switch):
                params = f"closed={int(e.closed)} ohms={e.ohms:g}"
            elif isinstance(e, VSource):
                params = f"volts={e.volts:g} ramp_s={e.ramp_s:g}"
            elif isinstance(e, ISource):
                params = f"amps={e.amps:g} ramp_s={e.ramp_s:g}"
            else:
                params = f"gm={e.gm:g}"
            kind = type(e).__name__.lower()
            lines.append(f"{kind} {e.label} {nodes} {params}")
        return "\n".join(lines) + "\n"
