"""Built-in validation suites (fast structural checks, full physics checks).

Each check returns (name, passed, detail); the CLI prints one line per
check. The fast suite runs in a few seconds; the full suite adds the exact
two-atom master-equation comparisons and reference quadratures.
"""
from __future__ import annotations

import io

import numpy as np

from .blochgen import (
    PAIR_LABELS,
    canonical_pair,
    classify_PQ,
    flip_pair,
    generate_pair_equations,
)
from .collisional import (
    F_lambda,
    F_lambda_quadrature,
    assemble_PQ,
    schur_reduce,
    solve_interacting,
    solve_pair_at_k,
    spectral_decompose,
)
from .noninteracting import (
    perturbative_coefficients,
    steady_state_three_level,
    steady_state_two_level,
)
from .observables import s_real, susceptibility
from .oracle import order_extract, two_atom_steady_state
from .params import (
    AtomParams,
    InteractionParams,
    StatePreset,
    blockade_radius,
    effective_T,
    relaxation_constants,
    vdw_potential,
)
from .perturbative import (
    collisional_integral_V13_order3,
    ib_quadrature,
    nb_closed_form,
    pair_correlators_order2,
    pair_correlators_order3,
)
from .scan import ScanConfig, run_scan, write_csv

__all__ = ["run_suite", "FAST_CHECKS", "FULL_CHECKS"]

_P50 = StatePreset(50)


def _params(wp=0.0, **kw):
    return AtomParams(omega_p=wp, omega_c=_P50.omega_c, **kw)


def check_first_order_closed_forms():
    p = _params()
    rc = relaxation_constants(p)
    pc = perturbative_coefficients(p)
    den = rc.Gamma12 * rc.Gamma13 + p.omega_c**2
    err = max(
        abs(pc.s12_1 - (-1j * rc.Gamma13 / den)),
        abs(pc.s13_1 - (-p.omega_c / den)),
    )
    return err < 1e-14, f"max deviation {err:.2e}"


def check_pair_conjugation_closure():
    p = _params(wp=0.4 + 0.1j)
    ps = generate_pair_equations(p)
    amat = ps.matrix(p.omega_p)
    worst = 0.0
    idx = {lab: i for i, lab in enumerate(PAIR_LABELS)}
    for r, lab in enumerate(PAIR_LABELS):
        fr = idx[flip_pair(lab)]
        for c, lab2 in enumerate(PAIR_LABELS):
            fc = idx[flip_pair(lab2)]
            worst = max(worst, abs(amat[r, c] - np.conj(amat[fr, fc])))
    return worst < 1e-12, f"max |A - conj(flip(A))| = {worst:.2e}"


def check_pq_partition():
    ps = generate_pair_equations(_params())
    p_labels, q_labels = classify_PQ(ps)
    ok = len(p_labels) == 10 and len(q_labels) == 26
    return ok, f"{len(p_labels)} P rows, {len(q_labels)} Q rows"


def check_noninteracting_s_identity():
    worst = 0.0
    for wp2 in (0.1, 0.5):
        p = _params(wp=np.sqrt(wp2))
        st, _ = solve_interacting(p, InteractionParams(c6=0.0))
        chi = susceptibility(st.sigma12, p.omega_p)
        chi3 = susceptibility(steady_state_three_level(p).sigma12, p.omega_p)
        chi2 = susceptibility(steady_state_two_level(p).sigma12, p.omega_p)
        worst = max(worst, abs(s_real(chi, chi3, chi2) - 1.0))
    return worst < 1e-9, f"max |S - 1| = {worst:.2e} at C6 = 0"


def check_nb_closed_form_vs_quadrature():
    p = _params()
    inter = InteractionParams(c6=_P50.c6)
    nb = nb_closed_form(p, inter)
    ib = ib_quadrature(p, inter).value
    rel = abs(nb - ib) / abs(nb)
    return rel < 1e-6, f"|n_b - I_b|/|n_b| = {rel:.2e}"


def check_f_lambda_closed_form():
    inter = InteractionParams(c6=_P50.c6)
    worst = 0.0
    for lam in (1.0 + 2.0j, -3.0 + 0.5j, 0.2 - 4.0j, 1000.0 + 1.0j):
        closed = F_lambda(lam, inter)
        quad = F_lambda_quadrature(lam, inter)
        worst = max(worst, abs(closed - quad) / abs(closed))
    return worst < 1e-6, f"max relative deviation {worst:.2e}"


def check_schur_vs_direct():
    # nonzero gamma33 so the Q block is regular without regularization
    p = _params(wp=0.3, gamma33=0.05)
    spec = spectral_decompose(schur_reduce(assemble_PQ(p)))
    v4 = np.zeros(4, dtype=complex)
    lhs = spec.feedback_map(InteractionParams(c6=_P50.c6))(v4)
    from .quadrature import vdw_k_integral

    t_scale = abs(effective_T(p))
    labels = (((1, 3), (3, 3)), ((3, 1), (3, 3)), ((2, 3), (3, 3)), ((3, 2), (3, 3)))
    worst = 0.0
    for want, lab in zip(lhs, labels):
        res = vdw_k_integral(
            lambda k, lab=lab: solve_pair_at_k(p, k, v4=v4)[lab],
            _P50.c6, 0.04, t_scale,
        )
        worst = max(worst, abs(want - res.value) / max(abs(res.value), 1e-300))
    return worst < 1e-6, f"spectral vs direct 36x36 quadrature: {worst:.2e}"


def check_solved_v_conjugation():
    p = _params(wp=np.sqrt(0.3))
    _, v = solve_interacting(p, InteractionParams(c6=_P50.c6))
    scale = max(abs(v.v13), 1e-300)
    dev = max(abs(v.v31 - np.conj(v.v13)), abs(v.v32 - np.conj(v.v23))) / scale
    return dev < 1e-6, f"relative conjugation deviation {dev:.2e}"


def check_scan_determinism():
    csvs = []
    for threads in (1, 4):
        cfg = ScanConfig(state=50, omega_p2_start=0.0, omega_p2_stop=0.4,
                         omega_p2_count=4, threads=threads)
        buf = io.StringIO()
        write_csv(run_scan(cfg), cfg.metadata_dict(), buf)
        csvs.append(buf.getvalue())
    ok = csvs[0] == csvs[1]
    return ok, "byte-identical CSV across 1 and 4 threads" if ok else "MISMATCH"


def check_oracle_factorization():
    p = _params(wp=0.35)
    st = two_atom_steady_state(p, k=0.0)
    single = steady_state_three_level(p)
    worst = 0.0
    for l1 in ((1, 2), (3, 3), (2, 3)):
        for l2 in ((2, 1), (2, 2), (1, 3)):
            pa = st.pair_average(l1, l2)
            worst = max(worst, abs(pa - single[l1] * single[l2]))
    return worst < 1e-10, f"max |<ab><mn> - <ab,mn>| = {worst:.2e} at k = 0"


def check_oracle_vs_cascade():
    p = _params()
    rb = blockade_radius(p, _P50.c6)
    worst = 0.0
    for rfac in (0.5, 1.5):
        r = rfac * rb
        k = vdw_potential(r, _P50.c6)
        o2 = pair_correlators_order2(p, k)
        o3 = pair_correlators_order3(p, k)

        def f2(x, k=k):
            st = two_atom_steady_state(p.with_omega_p(x), k=k)
            return st.pair_average((1, 3), (3, 1))

        def f3(x, k=k):
            st = two_atom_steady_state(p.with_omega_p(x), k=k)
            return st.pair_average((1, 3), (3, 3))

        c2, _ = order_extract(f2, order=2)
        c3, _ = order_extract(f3, order=3)
        lab2 = canonical_pair((1, 3), (3, 1))
        lab3 = canonical_pair((1, 3), (3, 3))
        worst = max(
            worst,
            abs(c2 - o2[lab2]) / abs(c2),
            abs(c3 - o3[lab3]) / abs(c3),
        )
    return worst < 1e-3, f"max relative deviation {worst:.2e}"


def check_weak_probe_v13():
    p = _params()
    inter = InteractionParams(c6=_P50.c6)
    v13_3, _ = collisional_integral_V13_order3(p, inter)

    def f(x):
        _, v = solve_interacting(p.with_omega_p(x), inter)
        return v.v13

    est, _ = order_extract(f, order=3, base=np.sqrt(1e-4), rtol=1e-4)
    rel = abs(est - v13_3) / abs(v13_3)
    return rel < 1e-3, f"extracted weak-probe V13 vs third-order: {rel:.2e}"


def check_quadrature_reference():
    from .oracle import quadrature_reference
    from .quadrature import vdw_k_integral

    t = effective_T(_params())

    def fn(k):
        return 1j / (t + 1j * k)

    a = vdw_k_integral(fn, _P50.c6, 0.04, abs(t)).value
    b = quadrature_reference(fn, _P50.c6, 0.04, abs(t)).value
    rel = abs(a - b) / abs(a)
    return rel < 1e-8, f"adaptive vs tanh-sinh quadrature: {rel:.2e}"


FAST_CHECKS = (
    ("first-order closed forms", check_first_order_closed_forms),
    ("pair-equation conjugation closure", check_pair_conjugation_closure),
    ("P/Q partition 10/26", check_pq_partition),
    ("non-interacting S identity", check_noninteracting_s_identity),
    ("n_b closed form vs quadrature", check_nb_closed_form_vs_quadrature),
    ("resolvent integral closed form", check_f_lambda_closed_form),
    ("spectral solver vs direct pair solve", check_schur_vs_direct),
    ("solved integrals conjugation symmetry", check_solved_v_conjugation),
    ("scan determinism across threads", check_scan_determinism),
)

FULL_CHECKS = FAST_CHECKS + (
    ("two-atom oracle factorization at k=0", check_oracle_factorization),
    ("two-atom oracle vs pair cascade", check_oracle_vs_cascade),
    ("weak-probe V13 vs third-order integral", check_weak_probe_v13),
    ("quadrature vs independent reference", check_quadrature_reference),
)


def run_suite(suite: str):
    """Run a named suite; yields (name, passed, detail) tuples."""
    checks = {"fast": FAST_CHECKS, "full": FULL_CHECKS}.get(suite)
    if checks is None:
        raise ValueError(f"unknown suite {suite!r}; use 'fast' or 'full'")
    results = []
    for name, fn in checks:
        try:
            passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, bool(passed), detail))
    return results
