"""Partial-inductance and conductor-resistance formulas.

Self terms use the closed forms of Rosa (round wire) and Grover
(rectangular bar).  Mutual terms use the filament approximation: each
conductor is collapsed onto its axis and the exact two-filament Neumann
integral is evaluated analytically.  Mutual terms between collinear pieces
of a straight wire are the d -> 0 limit of the same kernel, which keeps
partial-inductance additivity exact under re-segmentation.
"""
from __future__ import annotations

import math

from .errors import InvalidGeometryError, InvalidModelError
from .geometry import CoilGeometry, Segment

MU0 = 4e-7 * math.pi

# Direction cosines below this magnitude count as perpendicular (exact zero).
_PERP_TOL = 1e-12
# Perpendicular line separations below this count as collinear, in meters.
_COLLINEAR_TOL = 1e-12


def skin_depth(freq_hz: float, resistivity_ohm_m: float) -> float:
    """Skin depth sqrt(rho / (pi f mu0)) in meters.

    Parameters
    ----------
    freq_hz : float
        Frequency, must be positive.
    resistivity_ohm_m : float
        Conductor resistivity.
    """
    if freq_hz <= 0:
        raise InvalidGeometryError("skin depth needs a positive frequency")
    if resistivity_ohm_m <= 0:
        raise InvalidGeometryError("resistivity must be positive")
    return math.sqrt(resistivity_ohm_m / (math.pi * freq_hz * MU0))


def partial_self_inductance(seg: Segment) -> float:
    """Partial self inductance of one straight segment, in henries.

    Round wire (Rosa):     (mu0 l / 2 pi) (ln(2 l / r) - 3/4)
    Rectangular (Grover):  (mu0 l / 2 pi) (ln(2 l / (w + t)) + 0.5 + 0.2235 (w + t) / l)

    Both closed forms assume the segment is long compared with its cross
    section; lengths below 2x the largest cross-section dimension are
    rejected rather than extrapolated.
    """
    l = seg.length_m
    # The 1e-9 relative slack keeps exactly-at-the-bound lengths from
    # tripping on floating-point rounding of coordinate differences.
    if l < 2.0 * seg.max_cross_dimension_m * (1.0 - 1e-9):
        raise InvalidGeometryError(
            f"segment length {l:.3e} m below 2x cross-section dimension "
            f"{seg.max_cross_dimension_m:.3e} m, closed form invalid")
    if seg.shape == "round":
        value = MU0 * l / (2 * math.pi) * (math.log(2 * l / seg.radius_m) - 0.75)
    else:
        wt = seg.width_m + seg.thickness_m
        value = MU0 * l / (2 * math.pi) * (
            math.log(2 * l / wt) + 0.5 + 0.2235 * wt / l)
    if value <= 0:
        raise InvalidGeometryError("self inductance came out non-positive")
    return value


def _f_antideriv(u: float, d: float) -> float:
    # Antiderivative of asinh(u/d) appearing in the two-filament integral.
    if d < _COLLINEAR_TOL:
        # d -> 0 limit: u asinh(u/d) - sqrt(u^2 + d^2) -> u ln|2u/d| - |u|,
        # and the ln(d) parts cancel across the four-term combination, so
        # only the finite piece is kept here.
        if u == 0.0:
            return 0.0
        return u * math.log(2.0 * abs(u)) - abs(u)
    return u * math.asinh(u / d) - math.hypot(u, d)


def _filament_mutual(a1: float, b1: float, a2: float, b2: float, d: float) -> float:
    """Neumann integral for parallel filaments spanning [a1,b1] and [a2,b2]
    on lines a distance d apart, both oriented toward +axis."""
    return 1e-7 * (_f_antideriv(b1 - a2, d) - _f_antideriv(a1 - a2, d)
                   - _f_antideriv(b1 - b2, d) + _f_antideriv(a1 - b2, d))


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _projected_mutual(seg_a: Segment, seg_b: Segment) -> float:
    """Mutual with seg_b projected onto seg_a's axis (signed)."""
    ua = seg_a.direction
    t1 = _dot(_sub(seg_b.start, seg_a.start), ua)
    t2 = _dot(_sub(seg_b.end, seg_a.start), ua)
    if t1 == t2:
        return 0.0
    mid = tuple(0.5 * (s + e) for s, e in zip(seg_b.start, seg_b.end))
    rel = _sub(mid, seg_a.start)
    t_mid = _dot(rel, ua)
    perp = tuple(r - t_mid * u for r, u in zip(rel, ua))
    d = math.sqrt(_dot(perp, perp))
    sign = 1.0 if t2 > t1 else -1.0
    lo, hi = min(t1, t2), max(t1, t2)
    _check_overlap(seg_a, seg_b, lo, hi, perp)
    return sign * _filament_mutual(0.0, seg_a.length_m, lo, hi, d)


def _cross_half_extents(seg: Segment) -> tuple[float, float]:
    """Body half extents (horizontal, vertical) across the segment axis.

    Rectangular traces lie flat: width spans horizontally, thickness
    vertically.  A vertical rect (not produced by the winding generators)
    falls back to an isotropic bound.
    """
    if seg.shape == "round":
        return seg.radius_m, seg.radius_m
    if abs(seg.direction[2]) > 0.5:
        half = 0.5 * seg.max_cross_dimension_m
        return half, half
    return 0.5 * seg.width_m, 0.5 * seg.thickness_m


def _check_overlap(seg_a: Segment, seg_b: Segment, lo: float, hi: float,
                   perp: tuple[float, float, float]) -> None:
    # Conductors whose bodies intersect have no meaningful filament mutual.
    # Touching exactly at the clearance distance is allowed.
    axial_overlap = min(hi, seg_a.length_m) - max(lo, 0.0)
    margin = 1e-12
    if axial_overlap <= margin:
        return
    d = math.sqrt(_dot(perp, perp))
    if d < _COLLINEAR_TOL:
        raise InvalidGeometryError("collinear segments overlap")
    gap_h = math.hypot(perp[0], perp[1])
    gap_v = abs(perp[2])
    ha, va = _cross_half_extents(seg_a)
    hb, vb = _cross_half_extents(seg_b)
    if gap_h < ha + hb - margin and gap_v < va + vb - margin:
        raise InvalidGeometryError(
            f"segment bodies overlap: horizontal gap {gap_h:.3e} m within "
            f"{ha + hb:.3e} m and vertical gap {gap_v:.3e} m within {va + vb:.3e} m")


def mutual_partial_inductance(seg_a: Segment, seg_b: Segment) -> float:
    """Signed mutual partial inductance between two segments, in henries.

    Perpendicular pairs return exactly 0.  Skew pairs are handled by
    projecting each segment onto the other's axis and averaging, which is
    exact for parallel pairs and keeps the result symmetric in its
    arguments; the decomposition error only matters for oblique pairs,
    which the Manhattan winding generators never produce.
    """
    cosang = _dot(seg_a.direction, seg_b.direction)
    if abs(cosang) < _PERP_TOL:
        return 0.0
    return 0.5 * (_projected_mutual(seg_a, seg_b) + _projected_mutual(seg_b, seg_a))


def loop_inductance(coil: CoilGeometry) -> float:
    """Total inductance of one winding: sum of self and signed mutual terms."""
    coil.validate()
    segs = coil.segments
    total = sum(partial_self_inductance(s) for s in segs)
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            total += 2.0 * mutual_partial_inductance(segs[i], segs[j])
    if total <= 0:
        raise InvalidModelError(f"coil {coil.name!r} inductance came out non-positive")
    return total


def mutual_loop_inductance(coil_a: CoilGeometry, coil_b: CoilGeometry) -> float:
    """Signed mutual inductance between two windings, in henries."""
    coil_a.validate()
    coil_b.validate()
    total = 0.0
    for sa in coil_a.segments:
        for sb in coil_b.segments:
            total += mutual_partial_inductance(sa, sb)
    return total


def coupling_coefficient(l_a: float, l_b: float, m: float) -> float:
    """k = M / sqrt(L_a L_b), checked against the physical bound |k| <= 1."""
    if l_a <= 0 or l_b <= 0:
        raise InvalidModelError("coupling needs positive self inductances")
    k = m / math.sqrt(l_a * l_b)
    if abs(k) > 1.0 + 1e-9:
        raise InvalidModelError(f"coupling coefficient {k:.6f} outside [-1, 1]")
    return max(-1.0, min(1.0, k))


def segment_resistance(seg: Segment, freq_hz: float, resistivity_ohm_m: float) -> float:
    """Series resistance of one segment at the given frequency, in ohms.

    freq_hz = 0 gives the DC value rho l / A.  Above DC, conduction is
    restricted to a one-skin-depth shell of the cross section (annulus for
    round, perimeter shell for rect).  The shell model stays within ~10% of
    the exact Bessel solution for r > 3 skin depths and reduces to the DC
    value once the skin depth covers the whole section.
    """
    if freq_hz < 0:
        raise InvalidGeometryError("frequency must be non-negative")
    if resistivity_ohm_m <= 0:
        raise InvalidGeometryError("resistivity must be positive")
    area = seg.cross_section_m2
    if freq_hz > 0:
        delta = skin_depth(freq_hz, resistivity_ohm_m)
        if seg.shape == "round":
            core = max(seg.radius_m - delta, 0.0)
            area = math.pi * (seg.radius_m**2 - core**2)
        else:
            core_w = max(seg.width_m - 2 * delta, 0.0)
            core_t = max(seg.thickness_m - 2 * delta, 0.0)
            area = seg.width_m * seg.thickness_m - core_w * core_t
    return resistivity_ohm_m * seg.length_m / area


def coil_resistance(coil: CoilGeometry, freq_hz: float,
                    resistivity_ohm_m: float) -> tuple[float, float]:
    """Series resistance of a winding as (R_dc, R_ac at freq_hz), in ohms."""
    coil.validate()
    r_dc = sum(segment_resistance(s, 0.0, resistivity_ohm_m) for s in coil.segments)
    r_ac = sum(segment_resistance(s, freq_hz, resistivity_ohm_m) for s in coil.segments)
    return r_dc, r_ac
