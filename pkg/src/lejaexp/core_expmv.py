"""Newton-form evaluation of exp(tA)v at Leja points, with scaling steps.

The product [e^{mu/s} L_{m,c}(s^-1(A - mu I))]^s v is evaluated via the two
term recurrence of the Newton form.  Conjugate point pairs are fused into a
real quadratic factor so real operands never leave real arithmetic.  An a
posteriori criterion (sum of the last two increment norms against tol/s)
terminates each step early once the interpolation has converged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .divided_differences import DividedDiffTable
from .errors import NumericError, ParameterError, TableError
from .planner import Plan, plan_auto, plan_circle, plan_ellipse, hump_reduce, select_point_type
from .spectral import d_p_sequence, gershgorin_box, matrix_norm, shift_of

TOL_NAMES = {"half": 2.0 ** -10, "single": 2.0 ** -24, "double": 2.0 ** -53}


@dataclass
class EvalReport:
    """Cost and convergence record of one expmv call."""

    s_used: int
    m_star: int
    m_used: list = field(default_factory=list)
    matvec_count: int = 0
    early_terminated: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    plan: Plan | None = None


class _CountingMatvec:
    """Wraps y = M @ x, counting column applications."""

    def __init__(self, apply, n):
        self.apply = apply
        self.n = n
        self.count = 0

    def __call__(self, x):
        self.count += 1 if x.ndim == 1 else x.shape[1]
        return self.apply(x)


def _vector_norm(norm_tag):
    if norm_tag in ("1", "inf"):
        return lambda x: float(np.max(np.abs(x))) if x.size else 0.0
    return lambda x: float(np.linalg.norm(x))


def _col_norms(norm_tag):
    if norm_tag in ("1", "inf"):
        return lambda X: np.max(np.abs(X), axis=0) if X.size else np.zeros(X.shape[1])
    return lambda X: np.linalg.norm(X, axis=0)


def newton_step(apply_A, v, plan: Plan, dd: DividedDiffTable, tol,
                early_term=True, record_partials=None):
    """One scaling step: evaluate L_{m,c}(B)v with B = apply_A.

    apply_A must already include the 1/s scaling and the shift.  Returns
    (result, m_used).  Early termination stops at the first k where the last
    two increment norms sum below (tol/s)*||p_k||; conjugate pairs are only
    tested after completed pairs.  record_partials, when a list is passed,
    receives (k, p.copy()) snapshots for diagnostics.
    """
    if dd.kind != plan.kind:
        raise ParameterError(f"table kind {dd.kind!r} does not match plan kind {plan.kind!r}")
    m_star = plan.m_star
    if m_star > dd.degree:
        raise ParameterError(f"plan degree {m_star} exceeds table degree {dd.degree}")
    multi = v.ndim == 2
    norms = _col_norms(plan.norm_used) if multi else _vector_norm(plan.norm_used)
    tau = tol / plan.s_star
    coeff = dd.coefficients
    pts = dd.points

    def _check_finite(x, k):
        if not np.all(np.isfinite(x)):
            raise NumericError(f"nonfinite intermediate at node index {k}; "
                               "try more scaling or keep the shift enabled")

    if plan.kind == "real":
        p = coeff[0].real * np.array(v, copy=True)
        w = v
        prev = None
        m_used = 0
        if record_partials is not None:
            record_partials.append((0, p.copy()))
        for k in range(1, m_star + 1):
            w = apply_A(w) - pts[k - 1].real * w
            inc = coeff[k].real * w
            p = p + inc
            _check_finite(p, k)
            m_used = k
            if record_partials is not None:
                record_partials.append((k, p.copy()))
            e = norms(inc)
            if early_term and prev is not None:
                bound = tau * norms(p)
                if multi:
                    if np.all(e + prev <= bound):
                        return p, m_used
                elif e + prev <= bound:
                    return p, m_used
            prev = e
        return p, m_used

    # conjugate kind: fused pairs keep real operands real
    if m_star % 2 != 0:
        raise ParameterError("conjugate plans require an even degree")
    p = coeff[0].real * np.array(v, copy=True)
    if record_partials is not None:
        record_partials.append((0, p.copy()))
    r = None
    u = None
    y_prev = 0.0
    prev = None
    m_used = 0
    for t in range(1, m_star // 2 + 1):
        j = 2 * t - 1
        r = apply_A(v) if t == 1 else apply_A(u) + (y_prev * y_prev) * r
        u = apply_A(r)
        y = pts[j].imag
        inc = coeff[j].real * r + coeff[j + 1].real * u
        p = p + inc
        _check_finite(p, j + 1)
        m_used = 2 * t
        if record_partials is not None:
            record_partials.append((m_used, p.copy()))
        e = norms(inc)
        if early_term and prev is not None:
            bound = tau * norms(p)
            if multi:
                if np.all(e + prev <= bound):
                    return p, m_used
            elif e + prev <= bound:
                return p, m_used
        prev = e
        y_prev = y
    return p, m_used


def _tol_value(tol):
    if isinstance(tol, str):
        if tol not in TOL_NAMES:
            raise ParameterError(f"unknown tolerance name {tol!r}")
        return TOL_NAMES[tol]
    tol = float(tol)
    if not 0.0 < tol <= 2.0 ** -10:
        raise ParameterError("custom tolerance must lie in (0, 2^-10]")
    return tol


def _as_operator(A):
    if sp.issparse(A):
        return A.tocsr()
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParameterError("A must be a square matrix")
    return M


def expmv(A, v, t=1.0, tol="double", *, alg="auto", norm="1", points="auto",
          shift=True, early_term=True, hump_test=True, tables=None, seed=0):
    """Compute exp(tA) v with automatic parameter selection.

    A is a square dense or sparse matrix; v a vector (or column block).  tol
    is 'half', 'single', 'double' or a float in (0, 2^-10].  alg selects the
    norm route ('1'), the spectral-rectangle route ('2'), or 'auto' for the
    cheaper plan.  Returns (vector, EvalReport).
    """
    from .tables_io import load_default_tables  # deferred: heavy file parse

    A = _as_operator(A)
    v = np.asarray(v)
    if v.shape[0] != A.shape[0]:
        raise ParameterError(f"vector length {v.shape[0]} does not match operator {A.shape}")
    multi = v.ndim == 2
    tol_value = _tol_value(tol)
    if not np.isfinite(t):
        raise ParameterError("t must be finite")
    report = EvalReport(s_used=1, m_star=0)
    if t == 0.0:
        report.m_used = [0]
        report.early_terminated = [True]
        return np.array(v, copy=True), report

    tA = A * t
    box = gershgorin_box(tA)
    mu = shift_of(box) if shift else 0.0 + 0.0j
    if mu.imag != 0 and not np.iscomplexobj(tA.data if sp.issparse(tA) else tA):
        mu = complex(mu.real, 0.0)
    box_sh = box.shifted(mu)

    kind = points if points != "auto" else select_point_type(box_sh)
    store = tables if tables is not None else load_default_tables()
    bundle = store.get(kind, tol)
    if bundle is None:
        raise TableError(f"no parameter table for kind={kind!r} at tolerance {tol!r}")

    n = A.shape[0]
    if mu != 0:
        ident = sp.identity(n, format="csr", dtype=complex if mu.imag else float) \
            if sp.issparse(tA) else np.eye(n)
        S = tA - mu * ident
    else:
        S = tA
    nrm = matrix_norm(S, which=norm, seed=seed)

    norm_tag = str(norm)
    if alg in (1, "1", "circle"):
        plan = plan_circle(nrm, bundle.theta, shift=mu, norm_tag=norm_tag)
    elif alg in (2, "2", "ellipse"):
        plan = plan_ellipse(box_sh, bundle.ellipses, shift=mu, norm_tag=norm_tag,
                            theta_fallback=bundle.theta)
    elif alg == "auto":
        pc = plan_circle(nrm, bundle.theta, shift=mu, norm_tag=norm_tag)
        pe = plan_ellipse(box_sh, bundle.ellipses, shift=mu, norm_tag=norm_tag,
                          theta_fallback=bundle.theta)
        plan = plan_auto(pc, pe)
    else:
        raise ParameterError(f"unknown algorithm {alg!r}")

    if hump_test:
        dps = d_p_sequence(S, pmax=5, which=norm, seed=seed)
        plan = hump_reduce(plan, dps, bundle.registry, families=bundle.ellipses,
                           box=box_sh)

    dd = bundle.dd.get(plan.c_index)
    if dd is None:
        raise TableError(f"no divided-difference table for interval index {plan.c_index}")

    s = plan.s_star
    scale = 1.0 / s
    matvec = _CountingMatvec(lambda x: (S @ x) * scale, n)
    factor = np.exp(mu / s)
    if factor.imag == 0:
        factor = factor.real
    out = np.array(v, dtype=complex if (np.iscomplexobj(v) or np.iscomplexobj(factor)
                                        or (sp.issparse(S) and np.iscomplexobj(S.data))
                                        or (not sp.issparse(S) and np.iscomplexobj(S)))
                   else float, copy=True)
    report = EvalReport(s_used=s, m_star=plan.m_star, plan=plan)
    report.warnings.extend(plan.warnings)
    for _ in range(s):
        out, m_used = newton_step(matvec, out, plan, dd, tol_value,
                                  early_term=early_term)
        out = out * factor
        report.m_used.append(m_used)
        report.early_terminated.append(m_used < plan.m_star)
    report.matvec_count = matvec.count
    return out, report


def expmv_multi(A, V, t=1.0, tol="double", **options):
    """exp(tA) applied to a block of column vectors under one shared plan."""
    V = np.asarray(V)
    if V.ndim != 2:
        raise ParameterError("V must be a 2-D block of column vectors")
    return expmv(A, V, t=t, tol=tol, **options)


def phi1(A, w, t=1.0, tol="double", **options):
    """phi_1(tA) w = (tA)^{-1} (exp(tA) - I) w via the augmented operator.

    Builds the (n+1)x(n+1) operator [[tA, w],[0, 0]] and returns the first n
    entries of its exponential action on the last unit vector.
    """
    A = _as_operator(A)
    w = np.asarray(w)
    n = A.shape[0]
    if w.shape != (n,):
        raise ParameterError("w must be a vector matching A")
    if sp.issparse(A):
        col = sp.csr_matrix(w.reshape(-1, 1))
        aug = sp.bmat([[A * t, col], [None, sp.csr_matrix((1, 1))]], format="csr")
    else:
        aug = np.zeros((n + 1, n + 1), dtype=np.result_type(A, w, float))
        aug[:n, :n] = A * t
        aug[:n, n] = w
    e = np.zeros(n + 1, dtype=w.dtype if np.iscomplexobj(w) else float)
    e[n] = 1.0
    out, _ = expmv(aug, e, t=1.0, tol=tol, **options)
    return out[:n]
