"""Leja interpolation points on the reference interval [-2,2] (real) and i[-2,2] (conjugate).

Points are generated once on the reference interval by greedy maximization of
the distance product over a dense candidate mesh, then scaled to the working
interval [-c,c] at use time.  Real sequences start -2, 2, 0; conjugate
(symmetrized) sequences start at 0 and continue in pairs (iy, -iy), which keeps
polynomials of even degree and allows real arithmetic for real operands.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

MAX_POINTS = 120          # public cap on sequence length
DEFAULT_MESH = 10_000_000  # uniform candidate points on the reference interval
_REFINE_POINTS = 1001      # local submesh around the coarse argmax
_TIE_REL = 1e-9            # candidates this close to the max are treated as tied


@dataclass(frozen=True)
class LejaSequence:
    """Ordered Leja points on the reference interval, with scaling metadata.

    kind 'real': points in [-2,2] (stored with zero imaginary part).
    kind 'conjugate': points in i[-2,2]; index 0 is 0, then pairs (iy,-iy).
    """

    kind: str
    reference_points: np.ndarray
    reference_halfwidth: float = 2.0

    @property
    def length(self) -> int:
        return len(self.reference_points)

    def __len__(self) -> int:
        return len(self.reference_points)


def _check_mesh(mesh_size):
    if mesh_size < 2 or 4.0 / (mesh_size - 1) >= 1e-5:
        raise ParameterError(
            f"mesh_size {mesh_size} too coarse: adjacent spacing must be < 1e-5")


def _refine(xs_window, previous, fold=None):
    """Exact distance product on a local submesh; returns (best_x, best_value).

    fold: for conjugate generation the product is |y| * prod |y^2 - y_j^2| over
    stored pair ordinates y_j; previous then holds the positive ordinates.
    """
    if fold is None:
        prod = np.ones_like(xs_window)
        for p in previous:
            prod *= np.abs(xs_window - p)
    else:
        prod = np.abs(xs_window)
        for y in previous:
            prod *= np.abs(xs_window * xs_window - y * y)
    i = int(np.argmax(prod[::-1]))
    i = len(prod) - 1 - i  # tie -> largest coordinate
    return float(xs_window[i]), float(prod[i])


def _argmax_refined(xs, prod, previous, fold=None):
    """Coarse argmax with near-tie clustering and one local refinement pass."""
    pmax = float(prod.max())
    if not np.isfinite(pmax):
        raise ParameterError("distance product overflowed during generation")
    spacing = xs[1] - xs[0]
    near = np.flatnonzero(prod >= pmax * (1.0 - _TIE_REL))
    # cluster contiguous indices, refine each cluster around its local argmax
    clusters = np.split(near, np.flatnonzero(np.diff(near) > 1) + 1)
    candidates = []
    for cl in clusters:
        i0 = cl[int(np.argmax(prod[cl]))]
        lo = max(xs[0], xs[i0] - spacing)
        hi = min(xs[-1], xs[i0] + spacing)
        window = np.linspace(lo, hi, _REFINE_POINTS)
        candidates.append(_refine(window, previous, fold))
    best_val = max(v for _, v in candidates)
    tied = [x for x, v in candidates if v >= best_val * (1.0 - 1e-10)]
    return max(tied)  # tie -> largest coordinate


def _real_sequence(count, mesh_size):
    """Greedy real Leja points on [-2,2], no cap check (internal)."""
    _check_mesh(mesh_size)
    pts = [-2.0, 2.0, 0.0][:count]
    if count <= 3:
        return np.asarray(pts)
    xs = np.linspace(-2.0, 2.0, mesh_size)
    prod = np.abs(xs + 2.0) * np.abs(xs - 2.0) * np.abs(xs)
    while len(pts) < count:
        x = _argmax_refined(xs, prod, pts)
        pts.append(x)
        prod *= np.abs(xs - x)
    return np.asarray(pts)


def _conjugate_ordinates(pairs, mesh_size):
    """Positive ordinates y_1..y_pairs of the conjugate sequence (internal)."""
    _check_mesh(mesh_size)
    half = mesh_size // 2 + 1
    ys = np.linspace(0.0, 2.0, half)
    prod = ys.copy()  # |y - 0|
    ords = []
    while len(ords) < pairs:
        y = _argmax_refined(ys, prod, ords, fold=True)
        ords.append(y)
        prod *= np.abs(ys - y) * np.abs(ys + y)
    return ords


def _conjugate_sequence(count, mesh_size):
    if count == 1:
        return np.zeros(1, dtype=complex)
    pairs = (count - 1 + 1) // 2  # enough pairs to cover count points
    ords = _conjugate_ordinates(pairs, mesh_size)
    pts = [0.0j]
    for y in ords:
        pts.extend([1j * y, -1j * y])
    return np.asarray(pts[:count], dtype=complex)


def generate_real_leja(count, mesh_size=DEFAULT_MESH) -> LejaSequence:
    """Real Leja sequence of `count` points on [-2,2], starting -2, 2, 0.

    Greedy argmax of prod |x - x_j| over a uniform mesh with one local
    refinement; near-ties are resolved toward the largest coordinate (this is
    the convention the published theta tables are based on).
    """
    if count < 3:
        raise ParameterError("count must be >= 3 for real Leja sequences")
    if count > MAX_POINTS:
        raise ParameterError(f"count {count} exceeds the implementation cap {MAX_POINTS}")
    pts = _real_sequence(count, mesh_size)
    return LejaSequence(kind="real", reference_points=pts)


def generate_conjugate_leja(count, mesh_size=DEFAULT_MESH) -> LejaSequence:
    """Conjugate (symmetrized) Leja sequence on i[-2,2]: 0, then pairs (iy,-iy).

    An odd count ends on a completed pair; an even count is honored by
    truncating after the positive member of the final pair.
    """
    if count < 1:
        raise ParameterError("count must be >= 1")
    if count > MAX_POINTS:
        raise ParameterError(f"count {count} exceeds the implementation cap {MAX_POINTS}")
    pts = _conjugate_sequence(count, mesh_size)
    return LejaSequence(kind="conjugate", reference_points=pts)


def scale(seq: LejaSequence, c) -> np.ndarray:
    """Map reference points to the interval of halfwidth c (multiply by c/2).

    c=0 collapses every point to 0, the confluent (truncated Taylor) limit.
    """
    if c < 0:
        raise ParameterError("interval halfwidth must be nonnegative")
    factor = c / seq.reference_halfwidth
    out = seq.reference_points * factor
    if seq.kind == "real":
        return np.real(out).astype(float)
    return out


def dumps(seq: LejaSequence) -> str:
    """Text dump: header 'leja <kind> <count>' then one 're im' pair per line."""
    lines = [f"leja {seq.kind} {seq.length}"]
    for p in seq.reference_points:
        z = complex(p)
        lines.append(f"{z.real:.17g} {z.imag:.17g}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> LejaSequence:
    """Parse the dumps() format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "leja" or head[1] not in ("real", "conjugate"):
        raise ParameterError(f"bad leja dump header: {lines[0]!r}")
    count = int(head[2])
    vals = []
    for ln in lines[1:count + 1]:
        re_s, im_s = ln.split()
        vals.append(complex(float(re_s), float(im_s)))
    if len(vals) != count:
        raise ParameterError("leja dump truncated")
    pts = np.asarray(vals)
    if head[1] == "real":
        pts = np.real(pts).astype(float)
    return LejaSequence(kind=head[1], reference_points=pts)
