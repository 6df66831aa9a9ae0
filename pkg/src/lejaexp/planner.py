"""Selection of point type, degree m_*, scaling s_*, and interval [-c_*, c_*].

Two selection routes are provided: the norm/theta-table route (algorithm
'circle') and the rectangle/ellipse-family route (algorithm 'ellipse'), plus
an auto mode taking the cheaper plan and a hump-reduction pass driven by the
d_p sequence.

Selection is lexicographic: the scaling count s is minimized first, then the
degree m (and then the interval index).  The published benchmark scaling
counts (e.g. the advection-diffusion rows) are reproduced only by this rule;
a plain cost argmin m*ceil(norm/theta_m) occasionally prefers a marginally
cheaper plan with more scaling steps, which the reference results exclude.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ParameterError
from .spectral import SpectralBox

M_MAX = 100


@dataclass(frozen=True)
class Plan:
    """Runtime decision record for one exp(tA)v evaluation."""

    algorithm: str            # 'circle' (norm/theta) or 'ellipse' (rectangle/family)
    kind: str                 # 'real' or 'conjugate'
    m_star: int
    s_star: int
    c_star: float             # interval halfwidth, 0 for the Taylor limit
    c_index: int              # registry index of c_star (0 = Taylor)
    shift: complex
    norm_used: str
    hump_reduced: bool = False
    warnings: tuple = ()

    @property
    def predicted_cost(self) -> int:
        return self.m_star * self.s_star


def select_point_type(box: SpectralBox) -> str:
    """Conjugate points iff the rectangle is taller than wide; ties go real."""
    return "conjugate" if box.height > box.width else "real"


def _ceil_div(x, y):
    s = math.ceil(x / y - 1e-15)  # guard against FP noise at exact multiples
    return max(s, 0)


def plan_circle(norm_of_shifted, theta_table, shift=0.0 + 0.0j, norm_tag="1") -> Plan:
    """Norm/theta-table selection: minimize s, then m; c_* = theta_{m_*}."""
    if norm_of_shifted < 0 or not math.isfinite(norm_of_shifted):
        raise ParameterError("norm of the shifted operator must be finite and nonnegative")
    best = None  # (s, m)
    for m in sorted(theta_table.values):
        if m > M_MAX:
            continue
        s = _ceil_div(norm_of_shifted, theta_table.values[m])
        if best is None or s < best[0]:
            best = (s, m)
    if best is None:
        raise ParameterError("theta table is empty")
    s, m = best
    s = max(s, 1)
    assert norm_of_shifted <= s * theta_table.values[m] * (1 + 1e-12)
    return Plan(algorithm="circle", kind=theta_table.kind, m_star=m, s_star=s,
                c_star=theta_table.values[m], c_index=m, shift=shift,
                norm_used=str(norm_tag))


def _containment_steps(half_w, half_h, record, kind, epsilon):
    """S such that the eps-extended shifted box scaled by 1/S touches the ellipse.

    For real-kind families the semi-major axis lies along the real axis; for
    conjugate kind along the imaginary axis, so the roles of the box extents
    swap.  Degenerate records (semi-minor 0) fall back to the 1-D containment
    test along the focal axis.
    """
    u = half_w + epsilon  # real-axis reach of the extended box
    v = half_h + epsilon  # imaginary-axis reach
    along, across = (u, v) if kind == "real" else (v, u)
    a, b = record.semi_major, record.semi_minor
    if b <= 0.0:
        if across > 0.0:
            return None
        return along / a
    return math.hypot(along / a, across / b)


def plan_ellipse(box: SpectralBox, families, epsilon=0.02, shift=0.0 + 0.0j,
                 norm_tag="1", theta_fallback=None) -> Plan:
    """Rectangle/ellipse-family selection: minimize s, then m, then focal index.

    The box must already be centered (shift applied).  If no stored ellipse
    can contain the extended box for any m, falls back to the circle plan
    (requires theta_fallback) with a warning.
    """
    half_w = max(box.width / 2.0, 0.0)
    half_h = max(box.height / 2.0, 0.0)
    best = None  # (s, m, j, record)
    for m in sorted(families.families):
        if m > M_MAX:
            continue
        for rec in families.families[m]:
            S = _containment_steps(half_w, half_h, rec, families.kind, epsilon)
            if S is None:
                continue
            s = max(_ceil_div(S, 1.0), 1)
            key = (s, m, rec.j)
            if best is None or key < best[:3]:
                best = (s, m, rec.j, rec)
    if best is None:
        if theta_fallback is None:
            raise ParameterError("no feasible stored ellipse and no fallback table")
        plan = plan_circle(max(half_w, half_h) * 2.0, theta_fallback,
                           shift=shift, norm_tag=norm_tag)
        return replace(plan, warnings=plan.warnings + (
            "ellipse families cannot contain the spectral box; fell back to circle plan",))
    s, m, j, rec = best
    return Plan(algorithm="ellipse", kind=families.kind, m_star=m, s_star=s,
                c_star=rec.focal, c_index=j, shift=shift, norm_used=str(norm_tag))


def _circle_restricted_plan(box: SpectralBox, families, epsilon, shift, norm_tag):
    """Re-plan on the stored circles (hump handling for ellipse plans)."""
    half_w = max(box.width / 2.0, 0.0)
    half_h = max(box.height / 2.0, 0.0)
    corner = math.hypot(half_w + epsilon, half_h + epsilon)
    best = None  # (s, m)
    for m in sorted(families.circles):
        if m > M_MAX:
            continue
        k, radius = families.circles[m]
        s = max(_ceil_div(corner, radius), 1)
        if best is None or (s, m) < best[:2]:
            best = (s, m, k, radius)
    if best is None:
        return None
    s, m, k, radius = best
    return Plan(algorithm="ellipse", kind=families.kind, m_star=m, s_star=s,
                c_star=radius, c_index=k, shift=shift, norm_used=str(norm_tag),
                warnings=("scaling estimate restricted to stored circles",))


def hump_reduce(plan: Plan, dps, theta_registry, families=None, box=None,
                epsilon=0.02) -> Plan:
    """Shrink the interpolation interval when the d_p sequence indicates a hump.

    Triggered when min(d_p) has decayed by at least 10% below both d_1 and the
    current interval.  The interval is replaced by the smallest stored theta_k
    that still covers min(d_p)/s (never enlarged, s and m unchanged); ellipse
    plans are first re-planned on the stored circles.  A drastic decay below
    the smallest stored interval switches to the Taylor limit c = 0.
    """
    if not dps or plan.c_star == 0.0:
        return plan
    dmin = min(dps)
    if not (dmin < 0.9 * plan.c_star and dmin < 0.9 * dps[0]):
        return plan
    if plan.algorithm == "ellipse" and families is not None and box is not None:
        circ = _circle_restricted_plan(box, families, epsilon, plan.shift, plan.norm_used)
        if circ is not None:
            plan = circ
    target = dmin / plan.s_star
    thetas = sorted(theta_registry.items())  # (index, halfwidth), ascending
    if target < thetas[0][1]:
        new_index, new_c = 0, 0.0
    else:
        new_index, new_c = None, None
        for idx, th in thetas:
            if th >= target:
                new_index, new_c = idx, th
                break
        if new_c is None or new_c >= plan.c_star:
            return replace(plan, hump_reduced=plan.hump_reduced)
    if new_c >= plan.c_star:
        return plan
    return replace(plan, c_star=new_c, c_index=new_index, hump_reduced=True)


def plan_auto(circle_plan: Plan, ellipse_plan: Plan) -> Plan:
    """Cheaper of the two plans; ties prefer the norm-independent ellipse plan."""
    if circle_plan.predicted_cost < ellipse_plan.predicted_cost:
        return circle_plan
    return ellipse_plan
