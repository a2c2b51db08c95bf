"""Self-consistent collisional integrals beyond the perturbative expansion.

The 36 two-body correlator equations split into 10 P rows (carrying the
diagonal interaction term k * P_m) and 26 Q rows. Eliminating Q by a Schur
complement gives k P = M P + Rtilde(V), where the reduced source Rtilde is
a quadratic polynomial in the four feedback integrals V13, V31, V23, V32
(the single-atom averages are themselves affine in V). Projecting on the
eigenrows of M^T turns the radial integral of each eigencomponent into the
closed form F(lambda), leaving a 4-dimensional complex fixed-point problem

    V = select( U^-1 [F(lambda_m) * (U Rtilde(V))_m] )

solved by damped iteration with probe-amplitude continuation and a Newton
fallback.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .blochgen import (
    PAIR_INDEX,
    PAIR_LABELS,
    V_LABELS,
    canonical_pair,
    classify_PQ,
    generate_pair_equations,
)
from .noninteracting import SingleAtomState, solve_single_system
from .params import AtomParams, InteractionParams, SingularParameterError
from .perturbative import BranchAmbiguityError, _principal_sqrt
from .quadrature import vdw_k_integral

__all__ = [
    "PQSystem",
    "SpectralSystem",
    "CollisionalIntegrals",
    "ConvergenceError",
    "assemble_PQ",
    "schur_reduce",
    "spectral_decompose",
    "F_lambda",
    "F_lambda_quadrature",
    "solve_collisional_integrals",
    "reconstruct_averages",
    "solve_interacting",
    "solve_pair_at_k",
]

_COND_C_MAX = 1e12
_COND_U_MAX = 1e10
_EIG_RESID = 1e-10


class ConvergenceError(RuntimeError):
    """The nonlinear solve for the collisional integrals did not converge."""


@dataclass(frozen=True)
class PQSystem:
    """Row-partitioned pair system at a fixed probe amplitude.

    P rows are rescaled so they read k P_m = a P + b Q + R_m; Q rows read
    0 = c Q + d P + Rn. The source builder returns (R, Rn) for given V.
    ``feedback_cols`` maps (V13, V31, V23, V32) onto P positions.
    """

    params: AtomParams
    p_labels: tuple
    q_labels: tuple
    a: np.ndarray  # 10 x 10
    b: np.ndarray  # 10 x 26
    c: np.ndarray  # 26 x 26
    d: np.ndarray  # 26 x 10
    feedback_cols: tuple
    p_rowscale: np.ndarray
    _pair_system: object
    _p_idx: np.ndarray
    _q_idx: np.ndarray

    def single_state(self, v4) -> SingleAtomState:
        return solve_single_system(self.params, v4=v4)

    def sources(self, v4) -> tuple[np.ndarray, np.ndarray]:
        """(R, Rn) source vectors; quadratic in the four components of v4."""
        v4 = np.asarray(v4, dtype=complex)
        sigma = self.single_state(v4).values
        ps = self._pair_system
        full = ps.single_source_matrix(self.params.omega_p) @ sigma
        full = full + ps.ladder_source(v4, sigma)
        return self.p_rowscale * full[self._p_idx], full[self._q_idx]


# At gamma33 = 0 the Q block is exactly singular: the {33,33} correlator
# equation degenerates to the source-free constraint ss_{23,33} = ss_{32,33}
# (the Rydberg pair state neither decays nor couples to the probe), and the
# degeneracy cascades through the doubly-excited sector. A tiny Rydberg
# decay restores invertibility; the induced relative error on observables
# is of the same order.
GAMMA33_REGULARIZATION = 1e-6


def regularize(params: AtomParams) -> AtomParams:
    """Replace an exactly zero gamma33 by the tiny regularizing value."""
    if params.gamma33 != 0.0:
        return params
    return replace(params, gamma33=GAMMA33_REGULARIZATION)


def assemble_PQ(params: AtomParams) -> PQSystem:
    """Partition the generated 36-row system into the P/Q block form."""
    ps = generate_pair_equations(params)
    p_labels, q_labels = classify_PQ(ps)
    p_idx = np.array([PAIR_INDEX[lab] for lab in p_labels])
    q_idx = np.array([PAIR_INDEX[lab] for lab in q_labels])
    amat = ps.matrix(params.omega_p)
    # P row m reads 0 = (A ss)_m + kdiag_m k ss_m + src_m; divide by
    # -kdiag_m to isolate k ss_m on the left.
    rowscale = -1.0 / ps.kdiag[p_idx]
    fb_cols = tuple(
        p_labels.index(canonical_pair(lab, (3, 3))) for lab in V_LABELS
    )
    return PQSystem(
        params=params,
        p_labels=p_labels,
        q_labels=q_labels,
        a=rowscale[:, None] * amat[np.ix_(p_idx, p_idx)],
        b=rowscale[:, None] * amat[np.ix_(p_idx, q_idx)],
        c=amat[np.ix_(q_idx, q_idx)],
        d=amat[np.ix_(q_idx, p_idx)],
        feedback_cols=fb_cols,
        p_rowscale=rowscale,
        _pair_system=ps,
        _p_idx=p_idx,
        _q_idx=q_idx,
    )


@dataclass(frozen=True)
class ReducedSystem:
    """k P = M P + Rtilde(V) with Q eliminated."""

    pq: PQSystem
    m: np.ndarray        # 10 x 10 Schur complement a - b c^-1 d
    alpha: np.ndarray    # -b c^-1

    def rtilde(self, v4) -> np.ndarray:
        r_p, r_q = self.pq.sources(v4)
        return r_p + self.alpha @ r_q


def schur_reduce(pq: PQSystem) -> ReducedSystem:
    """Eliminate the Q block: M = a - b c^-1 d."""
    cond = np.linalg.cond(pq.c)
    if not np.isfinite(cond) or cond > _COND_C_MAX:
        raise SingularParameterError(
            f"Q block ill-conditioned (cond={cond:.3g}) at omega_c="
            f"{pq.params.omega_c}, delta2={pq.params.delta2}, "
            f"delta3={pq.params.delta3}"
        )
    alpha = -np.linalg.solve(pq.c.T, pq.b.T).T
    return ReducedSystem(pq=pq, m=pq.a + alpha @ pq.d, alpha=alpha)


@dataclass(frozen=True)
class SpectralSystem:
    """Eigenrows of M^T and per-eigenvalue radial integrals."""

    reduced: ReducedSystem
    eigenvalues: np.ndarray  # 10
    u: np.ndarray            # 10 x 10, rows are eigenvectors of M^T
    cond_u: float

    def feedback_map(self, interaction: InteractionParams):
        """Return G with G(v4) the spectral prediction for the feedback V."""
        f = np.array(
            [F_lambda(lam, interaction) for lam in self.eigenvalues]
        )
        sel = np.array(self.reduced.pq.feedback_cols)
        u = self.u
        lu = np.linalg.inv(u)[sel, :]

        def g(v4):
            return lu @ (f * (u @ self.reduced.rtilde(v4)))

        return g

    def all_integrals(self, interaction: InteractionParams, v4) -> dict:
        """All ten V components at a given feedback solution (diagnostics)."""
        f = np.array(
            [F_lambda(lam, interaction) for lam in self.eigenvalues]
        )
        v10 = np.linalg.solve(self.u, f * (self.u @ self.reduced.rtilde(v4)))
        return dict(zip(self.reduced.pq.p_labels, v10))


def spectral_decompose(reduced: ReducedSystem) -> SpectralSystem:
    m = reduced.m
    w, vecs = np.linalg.eig(m.T)
    u = vecs.T
    # residual of M^T v = lambda v per eigenpair, scaled by ||M||
    resid = np.max(
        np.abs(m.T @ vecs - vecs * w[None, :])
    ) / max(np.linalg.norm(m), 1e-300)
    if resid > _EIG_RESID:
        raise SingularParameterError(
            f"eigendecomposition residual {resid:.3g} exceeds {_EIG_RESID}"
        )
    cond_u = np.linalg.cond(u)
    if not np.isfinite(cond_u) or cond_u > _COND_U_MAX:
        raise SingularParameterError(
            f"eigenvector matrix near-defective (cond={cond_u:.3g}); "
            "perturb detunings or decay rates slightly"
        )
    return SpectralSystem(
        reduced=reduced, eigenvalues=w, u=u, cond_u=float(cond_u)
    )


def F_lambda(lam: complex, interaction: InteractionParams) -> complex:
    """Radial resolvent integral eta Int d^3R k/(k - lambda), closed form
    (2 pi^2 eta / 3) sqrt(C6/lambda) for k = -C6/R^6, principal branch."""
    if interaction.c6 == 0.0:
        return 0.0
    root = _principal_sqrt(interaction.c6 / lam, "C6/lambda")
    return 2.0 * np.pi**2 * interaction.eta / 3.0 * root


def F_lambda_quadrature(lam: complex, interaction: InteractionParams,
                        rel_tol: float = 1e-9) -> complex:
    """Same integral by direct radial quadrature (validation path)."""
    res = vdw_k_integral(
        lambda k: 1.0 / (k - lam), interaction.c6, interaction.eta,
        abs(lam), rel_tol=rel_tol,
    )
    return res.value


@dataclass(frozen=True)
class CollisionalIntegrals:
    """The four feedback integrals and solve diagnostics."""

    v13: complex
    v31: complex
    v23: complex
    v32: complex
    iterations: int
    residual: float
    continuation_steps: int
    used_newton: bool

    @property
    def v4(self) -> np.ndarray:
        return np.array([self.v13, self.v31, self.v23, self.v32])


def _damped_iterate(g, v0, damping, max_iter, tol):
    """Damped fixed-point iteration; returns (v, iters, resid, converged)."""
    v = np.asarray(v0, dtype=complex)
    prev_resid = np.inf
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            gv = g(v)
        if not np.all(np.isfinite(gv)):
            return v, it, np.inf, False
        resid = np.max(np.abs(gv - v)) / max(np.max(np.abs(gv)), 1e-300)
        if resid < tol:
            return gv, it, resid, True
        if resid > 10.0 * prev_resid:
            return v, it, resid, False  # diverging, caller escalates
        prev_resid = min(prev_resid, resid)
        v = (1.0 - damping) * v + damping * gv
    return v, max_iter, prev_resid, False


def _newton(g, v0, max_iter, tol):
    """Guarded Newton on the 8 real unknowns of V - G(V) = 0, FD Jacobian.

    Steps are backtracked until the residual norm decreases, which keeps
    the iteration on the root branch it was warm-started on instead of
    jumping to a distant (unphysical) solution of the polynomial system.
    """

    def to_real(v):
        return np.concatenate([v.real, v.imag])

    def to_complex(x):
        return x[:4] + 1j * x[4:]

    def res(x):
        v = to_complex(x)
        with np.errstate(over="ignore", invalid="ignore"):
            out = to_real(v - g(v))
        return np.where(np.isfinite(out), out, 1e300)

    x = to_real(np.asarray(v0, dtype=complex))
    r = res(x)
    for it in range(1, max_iter + 1):
        scale = max(np.max(np.abs(x)), 1.0)
        rnorm = np.linalg.norm(r)
        if np.max(np.abs(r)) < tol * scale:
            return to_complex(x), it, float(np.max(np.abs(r)) / scale), True
        jac = np.empty((8, 8))
        for j in range(8):
            h = 1e-7 * max(abs(x[j]), 1e-3)
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (res(xp) - r) / h
        try:
            dx = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return to_complex(x), it, float(np.max(np.abs(r)) / scale), False
        alpha = 1.0
        while alpha > 1e-4:
            xn = x + alpha * dx
            rn = res(xn)
            if np.linalg.norm(rn) < (1.0 - 0.25 * alpha) * rnorm:
                break
            alpha *= 0.5
        else:
            return to_complex(x), it, float(np.max(np.abs(r)) / scale), False
        x, r = xn, rn
    scale = max(np.max(np.abs(x)), 1.0)
    return to_complex(x), max_iter, float(np.max(np.abs(r)) / scale), False


def solve_collisional_integrals(
    params: AtomParams,
    interaction: InteractionParams,
    tol: float = 1e-10,
    damping: float = 0.5,
    max_continuation_steps: int = 50,
    max_iter_per_step: int = 500,
) -> CollisionalIntegrals:
    """Solve the nonlinear self-consistency for V13, V31, V23, V32.

    Starts from V = 0 (the non-interacting root) with damped fixed-point
    iteration; if that diverges or stalls, the probe intensity is continued
    from 0 toward its target in up to ``max_continuation_steps`` stages,
    each warm-started from the previous stage; a finite-difference Newton
    iteration is the final fallback. The continuation pins the physical
    root connected to the non-interacting solution.
    """
    wp = params.omega_p
    if interaction.c6 == 0.0 or wp == 0:
        return CollisionalIntegrals(0j, 0j, 0j, 0j, 0, 0.0, 0, False)
    params = regularize(params)

    def feedback_at(x):
        # x is the intensity fraction; amplitudes scale as sqrt(x)
        p = params.with_omega_p(wp * np.sqrt(x))
        spec = spectral_decompose(schur_reduce(assemble_PQ(p)))
        return spec.feedback_map(interaction), p

    def root_ok(v, p):
        # the physical branch is conjugation-symmetric: V31 = conj(V13),
        # V32 = conj(V23); spurious polynomial roots are not, and they
        # typically reconstruct unphysical populations
        scale = max(np.max(np.abs(v)), 1e-300)
        dev = max(abs(v[1] - np.conj(v[0])), abs(v[3] - np.conj(v[2])))
        if dev > max(1e-3 * scale, 1e-13):
            return False
        try:
            solve_single_system(p, v4=v).check_physical(tol=1e-6)
        except ValueError:
            return False
        return True

    total_iters = 0
    used_newton = False
    steps = 0
    v = np.zeros(4, dtype=complex)
    history = [(0.0, v)]  # solved (x, V) pairs for secant prediction
    x = 0.0
    dx = 0.25
    dx_min = 1.0 / (8.0 * max_continuation_steps * max_continuation_steps)
    while x < 1.0:
        if steps > 16 * max_continuation_steps:
            break
        x_try = min(1.0, x + dx)
        # secant warm start from the last two accepted points
        if len(history) >= 2:
            (x0, v0), (x1, v1) = history[-2], history[-1]
            v_pred = v1 + (v1 - v0) * (x_try - x1) / (x1 - x0)
        else:
            v_pred = history[-1][1]
        g, p_try = feedback_at(x_try)
        v_new, it, resid, conv = _damped_iterate(
            g, v_pred, damping, min(100, max_iter_per_step), tol)
        total_iters += it
        if not conv:
            v_new, it, resid, conv = _newton(g, v_pred, max_iter=50, tol=tol)
            total_iters += it
            used_newton = True
        steps += 1
        if conv and root_ok(v_new, p_try):
            x = x_try
            v = v_new
            history.append((x, v))
            if it <= 12:
                dx = min(2.0 * dx, 0.25)
        else:
            dx *= 0.5
            if dx < dx_min:
                raise ConvergenceError(
                    f"collisional solve stalled at intensity fraction {x:.4g} "
                    f"(step {dx:.2g}) after {total_iters} iterations; "
                    f"last residual {resid:.3g}"
                )
    if x < 1.0:
        raise ConvergenceError(
            f"collisional solve failed after {total_iters} iterations; "
            f"reached intensity fraction {x:.4g}, last residual {resid:.3g}"
        )
    return CollisionalIntegrals(
        v13=complex(v[0]), v31=complex(v[1]),
        v23=complex(v[2]), v32=complex(v[3]),
        iterations=total_iters, residual=float(resid),
        continuation_steps=steps, used_newton=used_newton,
    )


def reconstruct_averages(params: AtomParams, v: CollisionalIntegrals) -> SingleAtomState:
    """Single-atom averages with the solved collisional integral sources."""
    return solve_single_system(params, v4=v.v4)


def solve_interacting(
    params: AtomParams, interaction: InteractionParams, tol: float = 1e-10
) -> tuple[SingleAtomState, CollisionalIntegrals]:
    """High-level entry: solve V self-consistently, then the averages."""
    v = solve_collisional_integrals(params, interaction, tol=tol)
    return reconstruct_averages(params, v), v


def solve_pair_at_k(params: AtomParams, k: float, v4=None) -> dict:
    """Direct 36x36 solve of the pair system at fixed interaction k.

    Validation path for the Schur/spectral machinery; returns all 36
    correlators. ``v4`` supplies the ladder feedback integrals (default 0).
    """
    ps = generate_pair_equations(params)
    v4 = np.zeros(4, dtype=complex) if v4 is None else np.asarray(v4, complex)
    sigma = solve_single_system(params, v4=v4).values
    mat = ps.matrix(params.omega_p) + k * np.diag(ps.kdiag)
    rhs = ps.single_source_matrix(params.omega_p) @ sigma
    rhs = rhs + ps.ladder_source(v4, sigma)
    try:
        sol = np.linalg.solve(mat, -rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularParameterError(f"singular pair system at k={k}") from exc
    return dict(zip(PAIR_LABELS, sol))
