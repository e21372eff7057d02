"""Transient MNA engine: trapezoidal integration, Newton per step.

Unknown ordering is node voltages (registration order) followed by branch
currents (element order); branches exist for inductors, coupled-set
windings and voltage sources.  The linear stamps are assembled once per
run; per step only the right-hand side moves, and only transistor and
varactor stamps are re-evaluated inside the Newton loop.  Circuits with
no nonlinear elements skip Newton entirely and reuse one LU
factorization for every step.

The first step is backward Euler: it needs no capacitor-current history,
so a discontinuous turn-on (step sources, charged capacitors) does not
poison the trapezoidal rule with an inconsistent initial derivative.
Every later step is trapezoidal.

All arithmetic is straight float64 numpy with a fixed evaluation order,
so repeated runs of the same netlist are bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .devices import varactor_capacitance, varactor_capacitance_slope
from .errors import InvalidModelError, NumericFailure
from .netlist import (
    GROUND,
    Capacitor,
    CoupledInductors,
    Inductor,
    ISource,
    Mos,
    Netlist,
    Resistor,
    Switch,
    Varactor,
    Vccs,
    VSource,
)

PERTURB_NODE = "V_o1"


@dataclass
class SimConfig:
    """Fixed-step transient settings; the perturbation seeds startup by
    biasing the initial voltage of V_o1 (when that node exists)."""

    dt_s: float
    t_stop_s: float
    newton_rel: float = 1e-9
    newton_abs: float = 1e-12
    max_newton: int = 50
    perturbation_v: float = 1e-3
    source_ramp_s: float = 1e-9
    method: str = "trapezoidal"
    kcl_abs_a: float = 1e-9
    # Leak conductance (siemens) from every transistor drain and source
    # terminal to ground.  Without it a circuit region whose transistors
    # are all cut off has no defined common-mode voltage and the matrix
    # is singular.  1 nS is nine decades below the operating
    # conductances here, so it never shows in the waveforms.
    gmin: float = 1e-9

    def validate(self) -> None:
        if self.dt_s <= 0:
            raise InvalidModelError("time step must be positive")
        if self.t_stop_s <= self.dt_s:
            raise InvalidModelError("stop time must exceed the time step")
        if self.newton_rel <= 0 or self.newton_abs <= 0 or self.kcl_abs_a <= 0:
            raise InvalidModelError("Newton tolerances must be positive")
        if self.gmin < 0:
            raise InvalidModelError("gmin cannot be negative")
        if self.max_newton < 1:
            raise InvalidModelError("max_newton must be at least 1")
        if self.source_ramp_s < 0:
            raise InvalidModelError("source ramp must be non-negative")
        if self.method != "trapezoidal":
            raise InvalidModelError(
                f"unsupported integration method {self.method!r}")


@dataclass
class Waveforms:
    """Uniform-grid simulation output."""

    time_s: np.ndarray
    voltages: dict[str, np.ndarray]
    currents: dict[str, np.ndarray]
    kcl_max_a: float = 0.0

    def validate(self) -> None:
        if np.any(np.diff(self.time_s) <= 0):
            raise InvalidModelError("time grid must be strictly increasing")
        n = len(self.time_s)
        for name, trace in list(self.voltages.items()) + list(self.currents.items()):
            if len(trace) != n:
                raise InvalidModelError(f"trace {name} length mismatch")


@dataclass
class _MosBank:
    """Vectorized transistor arrays; indices are extended-system slots."""

    d: np.ndarray
    g: np.ndarray
    s: np.ndarray
    k: np.ndarray
    v_th: np.ndarray
    lam: np.ndarray
    sign_p: np.ndarray  # +1 for n-channel, -1 for p-channel
    f_rows: np.ndarray = None
    j_rows: np.ndarray = None
    j_cols: np.ndarray = None

    def evaluate(self, v_ext: np.ndarray):
        """Currents and signed partials for every device at once.

        Mirrors devices.mos_current / mos_small_signal: fold onto the
        v_ds >= 0 n-channel quarter-plane, then undo the fold's sign in
        the partial derivatives.
        """
        v_gs = (v_ext[self.g] - v_ext[self.s]) * self.sign_p
        v_ds = (v_ext[self.d] - v_ext[self.s]) * self.sign_p
        rev = v_ds < 0.0
        v_ov = np.where(rev, v_gs - v_ds, v_gs) - self.v_th * self.sign_p
        v_dsf = np.abs(v_ds)
        sign = np.where(rev, -self.sign_p, self.sign_p)

        cut = v_ov <= 0.0
        sat = ~cut & (v_dsf >= v_ov)
        tri = ~cut & ~sat
        mod = 1.0 + self.lam * v_dsf

        i_f = np.where(sat, 0.5 * self.k * v_ov * v_ov * mod, 0.0)
        i_f = np.where(tri, self.k * (v_ov * v_dsf - 0.5 * v_dsf * v_dsf) * mod,
                       i_f)
        f_vov = np.where(sat, self.k * v_ov * mod, 0.0)
        f_vov = np.where(tri, self.k * v_dsf * mod, f_vov)
        f_vds = np.where(sat, 0.5 * self.k * v_ov * v_ov * self.lam, 0.0)
        f_vds = np.where(
            tri,
            self.k * (v_ov - v_dsf) * mod
            + self.k * (v_ov * v_dsf - 0.5 * v_dsf * v_dsf) * self.lam,
            f_vds)

        i_d = sign * i_f
        g_m = np.where(rev, -f_vov, f_vov)
        g_ds = np.where(rev, f_vov + f_vds, f_vds)
        return i_d, g_m, g_ds


class _System:
    """Assembled MNA stamps for one netlist at one step size.

    The reactive part scales linearly with the integrator coefficient
    (2/h trapezoidal, 1/h backward Euler), so one static matrix and one
    reactive matrix cover both methods.
    """

    def __init__(self, net: Netlist, cfg: SimConfig):
        self.net = net
        self.cfg = cfg
        self.h = cfg.dt_s
        self.n = net.n_nodes

        self.branch_labels: list[str] = []
        self.branch_of: dict[int, int] = {}
        for idx, e in enumerate(net.elements):
            if isinstance(e, Inductor):
                self.branch_of[idx] = self.n + len(self.branch_labels)
                self.branch_labels.append(e.label)
            elif isinstance(e, CoupledInductors):
                self.branch_of[idx] = self.n + len(self.branch_labels)
                for w in range(len(e.pairs)):
                    self.branch_labels.append(f"{e.label}.w{w}")
            elif isinstance(e, VSource):
                self.branch_of[idx] = self.n + len(self.branch_labels)
                self.branch_labels.append(e.label)
        self.m = len(self.branch_labels)
        self.size = self.n + self.m
        self.gslot = self.size  # extended slot absorbing ground stamps

        self._build_linear()
        self._build_nonlinear()
        self.var_q = np.zeros(len(self.varactors))
        self.var_i = np.zeros(len(self.varactors))

    def _ext(self, node: int) -> int:
        return self.gslot if node == GROUND else node

    def _build_linear(self) -> None:
        net = self.net
        dim = self.size + 1
        a_static = np.zeros((dim, dim))
        a_react = np.zeros((dim, dim))

        def conductance(a, na, nb, g):
            i, j = self._ext(na), self._ext(nb)
            a[i, i] += g
            a[j, j] += g
            a[i, j] -= g
            a[j, i] -= g

        # per-step RHS sources; arrays are built after the scan
        caps: list[tuple[int, int, float]] = []
        self.inductors: list[tuple[int, int, int, float]] = []
        self.coupled: list[tuple[int, np.ndarray, np.ndarray, list]] = []
        self.vsources: list[tuple[int, VSource]] = []
        self.isources: list[ISource] = []

        for idx, e in enumerate(net.elements):
            if isinstance(e, (Resistor, Switch)):
                conductance(a_static, e.a, e.b, 1.0 / e.ohms)
            elif isinstance(e, Capacitor):
                conductance(a_react, e.a, e.b, e.farads)
                caps.append((self._ext(e.a), self._ext(e.b), e.farads))
            elif isinstance(e, Vccs):
                p, n = self._ext(e.p), self._ext(e.n)
                cp, cn = self._ext(e.cp), self._ext(e.cn)
                a_static[p, cp] += e.gm
                a_static[p, cn] -= e.gm
                a_static[n, cp] -= e.gm
                a_static[n, cn] += e.gm
            elif isinstance(e, Inductor):
                row = self.branch_of[idx]
                na, nb = self._ext(e.a), self._ext(e.b)
                a_static[na, row] += 1.0
                a_static[nb, row] -= 1.0
                a_static[row, na] += 1.0
                a_static[row, nb] -= 1.0
                a_react[row, row] -= e.henries
                self.inductors.append((row, na, nb, e.henries))
            elif isinstance(e, CoupledInductors):
                row0 = self.branch_of[idx]
                nw = len(e.pairs)
                m = np.asarray(e.matrix)
                pairs_ext = [(self._ext(pa), self._ext(pb)) for pa, pb in e.pairs]
                for w, (na, nb) in enumerate(pairs_ext):
                    row = row0 + w
                    a_static[na, row] += 1.0
                    a_static[nb, row] -= 1.0
                    a_static[row, na] += 1.0
                    a_static[row, nb] -= 1.0
                    a_static[row, row] -= e.series_r[w]
                    for k in range(nw):
                        a_react[row, row0 + k] -= m[w, k]
                self.coupled.append((row0, m, np.asarray(e.series_r), pairs_ext))
            elif isinstance(e, VSource):
                row = self.branch_of[idx]
                p, n = self._ext(e.p), self._ext(e.n)
                a_static[p, row] += 1.0
                a_static[n, row] -= 1.0
                a_static[row, p] += 1.0
                a_static[row, n] -= 1.0
                self.vsources.append((row, e))
            elif isinstance(e, ISource):
                self.isources.append(e)
            elif isinstance(e, Mos) and self.cfg.gmin > 0:
                # the nonlinear part is stamped per Newton iteration;
                # the leak keeps cut-off regions non-singular
                conductance(a_static, e.d, GROUND, self.cfg.gmin)
                conductance(a_static, e.s, GROUND, self.cfg.gmin)

        self.a_static = a_static
        self.a_react = a_react
        self.cap_a = np.array([c[0] for c in caps], dtype=int)
        self.cap_b = np.array([c[1] for c in caps], dtype=int)
        self.cap_c = np.array([c[2] for c in caps])

    def _build_nonlinear(self) -> None:
        mos = [e for e in self.net.elements if isinstance(e, Mos)]
        self.varactors = [e for e in self.net.elements
                          if isinstance(e, Varactor)]
        self.linear_only = not mos and not self.varactors
        if not mos:
            self.mos_bank = None
            return
        d = np.array([self._ext(e.d) for e in mos])
        g = np.array([self._ext(e.g) for e in mos])
        s = np.array([self._ext(e.s) for e in mos])
        bank = _MosBank(
            d=d, g=g, s=s,
            k=np.array([e.params.k_factor for e in mos]),
            v_th=np.array([e.params.v_th for e in mos]),
            lam=np.array([e.params.lam for e in mos]),
            sign_p=np.array([1.0 if e.params.polarity == "n" else -1.0
                             for e in mos]))
        bank.f_rows = np.concatenate([d, s])
        bank.j_rows = np.concatenate([d, d, d, s, s, s])
        bank.j_cols = np.concatenate([g, d, s, g, d, s])
        self.mos_bank = bank


@dataclass
class _StepState:
    """Reactive-element history carried between steps."""

    cap_v: np.ndarray
    cap_i: np.ndarray
    x: np.ndarray


def _initial_state(net: Netlist, cfg: SimConfig, sys: _System) -> np.ndarray:
    x = np.zeros(sys.size + 1)
    ics = dict(net.initial_voltages)
    if cfg.perturbation_v != 0.0 and PERTURB_NODE in net.node_names:
        ics[PERTURB_NODE] = ics.get(PERTURB_NODE, 0.0) + cfg.perturbation_v
    for name, v in ics.items():
        x[net.node_names.index(name)] = v
    for idx, e in enumerate(net.elements):
        if isinstance(e, Inductor):
            x[sys.branch_of[idx]] = e.i_initial_a
        elif isinstance(e, CoupledInductors):
            for w, i0 in enumerate(e.i_initial_a):
                x[sys.branch_of[idx] + w] = i0
    return x


def _singular_diagnostic(sys: _System, a: np.ndarray) -> str:
    scale = np.abs(a[:sys.size, :sys.size])
    dead = np.where((scale.max(axis=1) == 0.0) | (scale.max(axis=0) == 0.0))[0]
    if len(dead):
        i = int(dead[0])
        name = (sys.net.node_names[i] if i < sys.n
                else f"branch {sys.branch_labels[i - sys.n]}")
        return f"MNA matrix is singular: no finite stamp at {name}"
    return "MNA matrix is singular (structurally ill-posed netlist)"


def _rhs(sys: _System, st: _StepState, t: float, coef: float,
         history: bool) -> np.ndarray:
    """Right-hand side for one step; coef is 2/h (trapezoidal, with
    history currents) or 1/h (backward Euler, without)."""
    b = np.zeros(sys.size + 1)
    x = st.x
    if len(sys.cap_c):
        ieq = coef * sys.cap_c * st.cap_v + (st.cap_i if history else 0.0)
        np.add.at(b, sys.cap_a, ieq)
        np.add.at(b, sys.cap_b, -ieq)
    for row, na, nb, henries in sys.inductors:
        b[row] = -coef * henries * x[row] - ((x[na] - x[nb]) if history else 0.0)
    for row0, m, series_r, pairs_ext in sys.coupled:
        i_prev = x[row0:row0 + len(series_r)]
        rhs = -coef * (m @ i_prev)
        if history:
            v_prev = np.array([x[na] - x[nb] for na, nb in pairs_ext])
            rhs += -v_prev + series_r * i_prev
        b[row0:row0 + len(series_r)] = rhs
    for row, e in sys.vsources:
        b[row] = e.value_at(t)
    for e in sys.isources:
        val = e.value_at(t)
        b[sys._ext(e.p)] -= val
        b[sys._ext(e.n)] += val
    b[sys.gslot] = 0.0
    return b


def _nonlinear_stamps(sys: _System, x: np.ndarray, coef: float, history: bool,
                      f: np.ndarray, j: np.ndarray | None) -> None:
    """Add transistor and varactor contributions to the residual (and the
    Jacobian when j is given)."""
    bank = sys.mos_bank
    if bank is not None:
        i_d, g_m, g_ds = bank.evaluate(x)
        np.add.at(f, bank.f_rows, np.concatenate([i_d, -i_d]))
        if j is not None:
            gsum = -(g_m + g_ds)
            np.add.at(j, (bank.j_rows, bank.j_cols), np.concatenate(
                [g_m, g_ds, gsum, -g_m, -g_ds, -gsum]))
    for vi, e in enumerate(sys.varactors):
        na, nb = sys._ext(e.a), sys._ext(e.b)
        cp, cn = sys._ext(e.cp), sys._ext(e.cn)
        v_sig = x[na] - x[nb]
        v_ctl = x[cp] - x[cn]
        c = varactor_capacitance(e.model, v_ctl)
        i_now = (coef * (c * v_sig - sys.var_q[vi])
                 - (sys.var_i[vi] if history else 0.0))
        f[na] += i_now
        f[nb] -= i_now
        if j is not None:
            dc = varactor_capacitance_slope(e.model, v_ctl)
            gv = coef * c
            gc = coef * v_sig * dc
            j[na, na] += gv
            j[na, nb] -= gv
            j[nb, na] -= gv
            j[nb, nb] += gv
            j[na, cp] += gc
            j[na, cn] -= gc
            j[nb, cp] -= gc
            j[nb, cn] += gc


def _row_scale(a: np.ndarray) -> np.ndarray:
    """Equilibration factors; branch rows mix +-1 voltage entries with
    L/h terms in the hundreds, which would otherwise eat the pivots."""
    m = np.abs(a).max(axis=1)
    m[m == 0.0] = 1.0
    return 1.0 / m


def _newton_step(sys: _System, a0: np.ndarray, x_prev: np.ndarray,
                 b: np.ndarray, t: float, coef: float, history: bool):
    cfg = sys.cfg
    x = x_prev.copy()
    size, gslot = sys.size, sys.gslot

    for it in range(cfg.max_newton):
        f = a0 @ x - b
        j = a0.copy()
        _nonlinear_stamps(sys, x, coef, history, f, j)
        f[gslot] = 0.0
        if it > 0:
            # Residual acceptance: each row balances to within tolerance
            # relative to the magnitudes summed in that row, and node rows
            # additionally clear the per-step KCL gate with margin.
            # Update-only tests stall at the linear-solve noise floor on
            # stiff systems.
            f_ref = (np.abs(a0[:size, :size]) @ np.abs(x[:size])
                     + np.abs(b[:size]))
            if (np.all(np.abs(f[:size]) <= cfg.newton_abs
                       + cfg.newton_rel * f_ref)
                    and float(np.abs(f[:sys.n]).max())
                    <= 0.1 * cfg.kcl_abs_a):
                return x, f[:size]
        try:
            jj = j[:size, :size]
            scale = _row_scale(jj)
            dx = np.linalg.solve(jj * scale[:, None], -f[:size] * scale)
        except np.linalg.LinAlgError:
            raise NumericFailure(_singular_diagnostic(sys, j))
        x[:size] += dx
        x[gslot] = 0.0
        tol = cfg.newton_abs + cfg.newton_rel * float(np.abs(x[:size]).max())
        if float(np.abs(dx).max()) <= tol:
            f = a0 @ x - b
            _nonlinear_stamps(sys, x, coef, history, f, None)
            f[gslot] = 0.0
            return x, f[:size]
    raise NumericFailure(
        f"Newton did not converge at t = {t:.6e} s after "
        f"{cfg.max_newton} iterations; last update {float(np.abs(dx).max()):.3e}")


def transient(net: Netlist, cfg: SimConfig,
              _allow_ramp: bool = True) -> Waveforms:
    """Run one fixed-step transient; see module docstring for method."""
    net.validate()
    cfg.validate()
    sys = _System(net, cfg)
    h = cfg.dt_s
    n_steps = int(round(cfg.t_stop_s / h))
    if n_steps < 2:
        raise InvalidModelError("stop time must cover at least two steps")
    times = h * np.arange(n_steps + 1)

    x = _initial_state(net, cfg, sys)
    out = np.empty((n_steps + 1, sys.size))
    out[0] = x[:sys.size]

    st = _StepState(
        cap_v=(x[sys.cap_a] - x[sys.cap_b]) if len(sys.cap_c) else np.zeros(0),
        cap_i=np.zeros(len(sys.cap_c)),
        x=x)
    sys.var_q = np.array([
        varactor_capacitance(e.model, x[sys._ext(e.cp)] - x[sys._ext(e.cn)])
        * (x[sys._ext(e.a)] - x[sys._ext(e.b)]) for e in sys.varactors])
    sys.var_i = np.zeros(len(sys.varactors))

    coef_tr, coef_be = 2.0 / h, 1.0 / h
    a_tr = sys.a_static + coef_tr * sys.a_react
    a_be = sys.a_static + coef_be * sys.a_react
    lu_tr = lu_be = None
    if sys.linear_only:
        sc_tr = _row_scale(a_tr[:sys.size, :sys.size])
        sc_be = _row_scale(a_be[:sys.size, :sys.size])
        try:
            lu_tr = lu_factor(a_tr[:sys.size, :sys.size] * sc_tr[:, None])
            lu_be = lu_factor(a_be[:sys.size, :sys.size] * sc_be[:, None])
        except Exception:
            raise NumericFailure(_singular_diagnostic(sys, a_tr))

    kcl_max = 0.0
    for step in range(1, n_steps + 1):
        t = times[step]
        first = step == 1
        coef = coef_be if first else coef_tr
        a0 = a_be if first else a_tr
        b = _rhs(sys, st, t, coef, history=not first)

        if sys.linear_only:
            x_new = np.empty(sys.size + 1)
            sc = sc_be if first else sc_tr
            x_new[:sys.size] = lu_solve(lu_be if first else lu_tr,
                                        b[:sys.size] * sc)
            x_new[sys.gslot] = 0.0
            resid = a0[:sys.size, :sys.size] @ x_new[:sys.size] - b[:sys.size]
            x = x_new
        else:
            try:
                x, resid = _newton_step(sys, a0, st.x, b, t, coef,
                                        history=not first)
            except NumericFailure:
                # hard turn-on rescue: ramp the sources and start over
                if not (first and _allow_ramp and cfg.source_ramp_s > 0):
                    raise
                ramped = net.with_source_ramp(cfg.source_ramp_s)
                if ramped.elements == net.elements:
                    raise
                return transient(ramped, cfg, _allow_ramp=False)

        step_kcl = float(np.abs(resid[:sys.n]).max())
        if step_kcl > cfg.kcl_abs_a:
            raise NumericFailure(
                f"KCL residual {step_kcl:.3e} A exceeds {cfg.kcl_abs_a:.1e} A "
                f"at t = {t:.6e} s")
        kcl_max = max(kcl_max, step_kcl)
        out[step] = x[:sys.size]

        # advance histories
        if len(sys.cap_c):
            v_now = x[sys.cap_a] - x[sys.cap_b]
            st.cap_i = (coef * sys.cap_c * (v_now - st.cap_v)
                        - (st.cap_i if not first else 0.0))
            st.cap_v = v_now
        for vi, e in enumerate(sys.varactors):
            v_sig = x[sys._ext(e.a)] - x[sys._ext(e.b)]
            v_ctl = x[sys._ext(e.cp)] - x[sys._ext(e.cn)]
            q_now = varactor_capacitance(e.model, v_ctl) * v_sig
            sys.var_i[vi] = (coef * (q_now - sys.var_q[vi])
                             - (sys.var_i[vi] if not first else 0.0))
            sys.var_q[vi] = q_now
        st.x = x

    voltages = {name: out[:, i].copy()
                for i, name in enumerate(net.node_names)}
    currents = {f"I({lbl})": out[:, sys.n + j].copy()
                for j, lbl in enumerate(sys.branch_labels)}
    wave = Waveforms(time_s=times, voltages=voltages, currents=currents,
                     kcl_max_a=kcl_max)
    wave.validate()
    return wave
