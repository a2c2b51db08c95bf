"""Generator for the single-atom and two-atom steady-state equation systems.

Everything is derived from the commutator algebra of the driven three-level
Hamiltonian (rotating frame, Omega_c real) plus phenomenological relaxation:

    d<A>/dt = i<[H, A]> + <R'(A)>,

where R' is the adjoint relaxation map reproducing the standard Bloch decay
structure (coherence ab decays at gamma_ab, populations 2 and 3 decay at
gamma22 and gamma33 into the ground state).

For two atoms the generator additionally applies, in this order:

1. the exact diagonal interaction commutator k [n_i n_j, .] (n = |3><3|),
2. the ladder closure for interaction sums over third atoms, which turns
   three-body averages into V_{a3} (or V_{3a}) times a single-atom average,
3. the trace substitution ss_{11,mn} = s_mn - ss_{22,mn} - ss_{33,mn}.

Probe-field dependence is kept formal: the Hamiltonian is linear in
(Omega_p, Omega_p*), so every generated coefficient is affine in the pair
and is stored as a matrix triple (c0, cp, cm) with

    coefficient(Omega_p) = c0 + Omega_p * cp + conj(Omega_p) * cm.

The same generated system therefore serves the order-by-order perturbative
cascade and the full nonlinear collisional-integral solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import AtomParams

__all__ = [
    "SINGLE_LABELS",
    "SINGLE_INDEX",
    "PAIR_LABELS",
    "PAIR_INDEX",
    "V_LABELS",
    "V_INDEX",
    "SingleAtomSystem",
    "PairSystem",
    "GeneratorError",
    "generate_single_atom_equations",
    "generate_pair_equations",
    "classify_PQ",
    "grade_order",
    "flip_label",
    "flip_pair",
    "canonical_pair",
    "dump_equations",
]

# Canonical single-atom unknown basis after eliminating sigma_11:
# coherences first (probe, Rydberg, Raman pairs), then populations.
SINGLE_LABELS: tuple = ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2), (2, 2), (3, 3))
SINGLE_INDEX = {lab: i for i, lab in enumerate(SINGLE_LABELS)}

# The four collisional integrals that feed back into the equations.
V_LABELS: tuple = ((1, 3), (3, 1), (2, 3), (3, 2))
V_INDEX = {lab: i for i, lab in enumerate(V_LABELS)}


def canonical_pair(l1, l2):
    """Fixed canonical order for the symmetric correlator ss_{l1,l2}."""
    if SINGLE_INDEX[l1] <= SINGLE_INDEX[l2]:
        return (l1, l2)
    return (l2, l1)


def _build_pair_labels():
    labs = []
    for i, l1 in enumerate(SINGLE_LABELS):
        for l2 in SINGLE_LABELS[i:]:
            labs.append((l1, l2))
    return tuple(labs)


PAIR_LABELS: tuple = _build_pair_labels()
PAIR_INDEX = {lab: i for i, lab in enumerate(PAIR_LABELS)}
assert len(PAIR_LABELS) == 36

_ALL9 = tuple((a, b) for a in (1, 2, 3) for b in (1, 2, 3))


class GeneratorError(RuntimeError):
    """A structural invariant of the generated system failed."""


def flip_label(lab):
    a, b = lab
    return (b, a)


def flip_pair(pair):
    l1, l2 = pair
    return canonical_pair(flip_label(l1), flip_label(l2))


def grade_order(label):
    """(net probe-photon number, leading power of |Omega_p|) of a label.

    Accepts a single label (a, b) or a pair of labels. Coherences touching
    the ground state are first order and carry net +/-1; everything else is
    second order and photon-neutral. Pair grades add.
    """
    if label and isinstance(label[0], tuple):
        n1, o1 = grade_order(label[0])
        n2, o2 = grade_order(label[1])
        return (n1 + n2, o1 + o2)
    a, b = label
    if a == 1 and b != 1:
        return (+1, 1)
    if b == 1 and a != 1:
        return (-1, 1)
    return (0, 2)


def _unit(a, b):
    e = np.zeros((3, 3), dtype=complex)
    e[a - 1, b - 1] = 1.0
    return e


def _hamiltonian(wp, wpc, p: AtomParams):
    h = -p.delta2 * _unit(2, 2) - p.delta3 * _unit(3, 3)
    h = h + wpc * _unit(1, 2) + wp * _unit(2, 1)
    h = h + p.omega_c * (_unit(2, 3) + _unit(3, 2))
    return h


def _relax_adjoint(a_op, p: AtomParams):
    """Adjoint relaxation map on an operator expanded in the |a><b| basis."""
    out = np.zeros((3, 3), dtype=complex)
    for (a, b) in _ALL9:
        if a != b:
            out[a - 1, b - 1] += -p.gamma(a, b) * a_op[a - 1, b - 1]
    out[1, 1] += -p.gamma22 * a_op[1, 1]
    out[2, 2] += -p.gamma33 * a_op[2, 2]
    # populations decay into the ground state (no gamma33 feed into level 2,
    # matching the Bloch structure where sigma22 has no gamma33 source);
    # adjoint picture: the sigma11 observable gains what the populations lose
    out[1, 1] += p.gamma22 * a_op[0, 0]
    out[2, 2] += p.gamma33 * a_op[0, 0]
    return out


def _drift(label, wp, wpc, p: AtomParams):
    """i[H, E_ab] + R'(E_ab), expanded in the |a><b| basis (3x3 array of
    coefficients: entry (c, d) multiplies sigma_cd)."""
    e = _unit(*label)
    h = _hamiltonian(wp, wpc, p)
    return 1j * (h @ e - e @ h) + _relax_adjoint(e, p)


# ---------------------------------------------------------------------------
# single-atom system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingleAtomSystem:
    """Steady-state structure 0 = C(wp) sigma + S(wp) + B V for the 8 averages.

    C(wp) = c0 + wp*cp + conj(wp)*cm, likewise S; B couples the four
    collisional integrals (V13, V31, V23, V32) into the coherence equations.
    """

    labels: tuple
    c0: np.ndarray
    cp: np.ndarray
    cm: np.ndarray
    s0: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    v_coupling: np.ndarray

    def matrix(self, omega_p: complex) -> np.ndarray:
        return self.c0 + omega_p * self.cp + np.conj(omega_p) * self.cm

    def source(self, omega_p: complex) -> np.ndarray:
        return self.s0 + omega_p * self.sp + np.conj(omega_p) * self.sm


def _single_matrices(wp, wpc, p: AtomParams):
    c = np.zeros((8, 8), dtype=complex)
    s = np.zeros(8, dtype=complex)
    for r, lab in enumerate(SINGLE_LABELS):
        d = _drift(lab, wp, wpc, p)
        for (a, b) in _ALL9:
            coeff = d[a - 1, b - 1]
            if coeff == 0:
                continue
            if (a, b) == (1, 1):
                # sigma_11 = 1 - sigma_22 - sigma_33
                s[r] += coeff
                c[r, SINGLE_INDEX[(2, 2)]] -= coeff
                c[r, SINGLE_INDEX[(3, 3)]] -= coeff
            else:
                c[r, SINGLE_INDEX[(a, b)]] += coeff
    return c, s


@lru_cache(maxsize=64)
def _generate_single_cached(key):
    p = AtomParams(
        omega_p=0.0,
        omega_c=key[0],
        delta2=key[1],
        delta3=key[2],
        gamma13=key[4],
        gamma23=key[5],
        gamma33=key[7],
        gamma12=key[3],
        gamma22=key[6],
    )
    c00, s00 = _single_matrices(0.0, 0.0, p)
    c10, s10 = _single_matrices(1.0, 0.0, p)
    c01, s01 = _single_matrices(0.0, 1.0, p)
    v = np.zeros((8, 4), dtype=complex)
    for r, (a, b) in enumerate(SINGLE_LABELS):
        if a == 3 and b == 3:
            continue
        if a == 3:
            v[r, V_INDEX[(3, b)]] += 1j
        if b == 3:
            v[r, V_INDEX[(a, 3)]] += -1j
    if np.any(s00 != 0):
        raise GeneratorError("constant source without a probe factor")
    return SingleAtomSystem(
        labels=SINGLE_LABELS,
        c0=c00, cp=c10 - c00, cm=c01 - c00,
        s0=s00, sp=s10 - s00, sm=s01 - s00,
        v_coupling=v,
    )


def generate_single_atom_equations(params: AtomParams) -> SingleAtomSystem:
    """Generate the 8 steady-state Bloch equations (sigma_11 eliminated)."""
    return _generate_single_cached(params.generation_key())


# ---------------------------------------------------------------------------
# two-atom correlator system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairSystem:
    """Steady-state structure of the 36 two-body correlator equations:

        0 = [A(wp) + k * diag(kdiag)] ss + Ssrc(wp) sigma + ladder(V, sigma)

    ``ladder`` rows are (row, v_index, single_index, coeff): the ladder
    closure source coeff * V[v_index] * sigma[single_index]. When the
    subtracted ladder variant is selected, ``variant_kterms`` holds the
    additional k-weighted couplings (row, pair_index, single_index, coeff)
    meaning coeff * k * ss[pair_index] * sigma[single_index].
    """

    pair_labels: tuple
    a0: np.ndarray
    ap: np.ndarray
    am: np.ndarray
    src0: np.ndarray
    srcp: np.ndarray
    srcm: np.ndarray
    kdiag: np.ndarray
    ladder: tuple
    variant_kterms: tuple
    ladder_variant: str

    def matrix(self, omega_p: complex) -> np.ndarray:
        return self.a0 + omega_p * self.ap + np.conj(omega_p) * self.am

    def single_source_matrix(self, omega_p: complex) -> np.ndarray:
        return self.src0 + omega_p * self.srcp + np.conj(omega_p) * self.srcm

    def ladder_source(self, v4: np.ndarray, sigma8: np.ndarray) -> np.ndarray:
        out = np.zeros(36, dtype=complex)
        for row, vi, si, coeff in self.ladder:
            out[row] += coeff * v4[vi] * sigma8[si]
        return out


def _pair_matrices(wp, wpc, p: AtomParams):
    a = np.zeros((36, 36), dtype=complex)
    s = np.zeros((36, 8), dtype=complex)
    for r, (l1, l2) in enumerate(PAIR_LABELS):
        for lab, other in ((l1, l2), (l2, l1)):
            d = _drift(lab, wp, wpc, p)
            for (c, dd) in _ALL9:
                coeff = d[c - 1, dd - 1]
                if coeff == 0:
                    continue
                if (c, dd) == (1, 1):
                    s[r, SINGLE_INDEX[other]] += coeff
                    a[r, PAIR_INDEX[canonical_pair((2, 2), other)]] -= coeff
                    a[r, PAIR_INDEX[canonical_pair((3, 3), other)]] -= coeff
                else:
                    a[r, PAIR_INDEX[canonical_pair((c, dd), other)]] += coeff
    return a, s


def _pair_interaction_structure(variant: str):
    kdiag = np.zeros(36, dtype=complex)
    ladder = []
    variant_kterms = []
    for r, ((a, b), (m, n)) in enumerate(PAIR_LABELS):
        kdiag[r] = 1j * (int(a == 3 and m == 3) - int(b == 3 and n == 3))
        for lab, other in (((a, b), (m, n)), ((m, n), (a, b))):
            la, lb = lab
            if la == 3 and lb == 3:
                continue  # the two ladder terms cancel for sigma_33
            if la == 3:
                ladder.append((r, V_INDEX[(3, lb)], SINGLE_INDEX[other], +1j))
                if variant == "subtracted":
                    variant_kterms.append(
                        (r, PAIR_INDEX[canonical_pair((3, lb), (3, 3))],
                         SINGLE_INDEX[other], -1j)
                    )
            if lb == 3:
                ladder.append((r, V_INDEX[(la, 3)], SINGLE_INDEX[other], -1j))
                if variant == "subtracted":
                    variant_kterms.append(
                        (r, PAIR_INDEX[canonical_pair((la, 3), (3, 3))],
                         SINGLE_INDEX[other], +1j)
                    )
    return kdiag, tuple(ladder), tuple(variant_kterms)


@lru_cache(maxsize=64)
def _generate_pair_cached(key, variant):
    p = AtomParams(
        omega_p=0.0,
        omega_c=key[0],
        delta2=key[1],
        delta3=key[2],
        gamma13=key[4],
        gamma23=key[5],
        gamma33=key[7],
        gamma12=key[3],
        gamma22=key[6],
    )
    a00, s00 = _pair_matrices(0.0, 0.0, p)
    a10, s10 = _pair_matrices(1.0, 0.0, p)
    a01, s01 = _pair_matrices(0.0, 1.0, p)
    if np.any(s00 != 0):
        raise GeneratorError("pair source without a probe factor")
    kdiag, ladder, vterms = _pair_interaction_structure(variant)
    return PairSystem(
        pair_labels=PAIR_LABELS,
        a0=a00, ap=a10 - a00, am=a01 - a00,
        src0=s00, srcp=s10 - s00, srcm=s01 - s00,
        kdiag=kdiag, ladder=ladder, variant_kterms=vterms,
        ladder_variant=variant,
    )


def generate_pair_equations(params: AtomParams, ladder_variant: str = "integral") -> PairSystem:
    """Generate the 36 two-body correlator equations.

    ladder_variant:
        "integral"   - ladder source V_{a3} * sigma_mn (default),
        "subtracted" - (V_{a3} - k ss_{a3,33}) * sigma_mn, for sensitivity
                       checks; not supported by the spectral solver.
    """
    if ladder_variant not in ("integral", "subtracted"):
        raise ValueError(f"unknown ladder variant {ladder_variant!r}")
    return _generate_pair_cached(params.generation_key(), ladder_variant)


def classify_PQ(system: PairSystem):
    """Split the pair basis into P (diagonal k term present) and Q labels."""
    p_labels = tuple(
        lab for lab, kd in zip(system.pair_labels, system.kdiag) if kd != 0
    )
    q_labels = tuple(
        lab for lab, kd in zip(system.pair_labels, system.kdiag) if kd == 0
    )
    if len(p_labels) != 10 or len(q_labels) != 26:
        raise GeneratorError(
            f"P/Q classification broke: |P|={len(p_labels)}, |Q|={len(q_labels)}"
        )
    return p_labels, q_labels


# ---------------------------------------------------------------------------
# human-readable dump (audit surface)
# ---------------------------------------------------------------------------

def _fmt_label(lab):
    if lab and isinstance(lab[0], tuple):
        return "ss[%d%d,%d%d]" % (*lab[0], *lab[1])
    return "s[%d%d]" % lab


def _fmt_coeff(c0, cp, cm):
    parts = []
    if c0 != 0:
        parts.append(f"({c0:.6g})")
    if cp != 0:
        parts.append(f"({cp:.6g})*Wp")
    if cm != 0:
        parts.append(f"({cm:.6g})*Wp'")
    return " + ".join(parts)


def dump_equations(params: AtomParams, which: str = "pair") -> str:
    """Render the generated equations as text (Wp = Omega_p, Wp' = conj)."""
    lines = []
    if which in ("single", "both"):
        ss = generate_single_atom_equations(params)
        lines.append("# single-atom steady-state equations (d/dt = 0)")
        for r, lab in enumerate(ss.labels):
            terms = []
            for c, col in enumerate(ss.labels):
                f = _fmt_coeff(ss.c0[r, c], ss.cp[r, c], ss.cm[r, c])
                if f:
                    terms.append(f"{f}*{_fmt_label(col)}")
            f = _fmt_coeff(ss.s0[r], ss.sp[r], ss.sm[r])
            if f:
                terms.append(f)
            for vi, vlab in enumerate(V_LABELS):
                if ss.v_coupling[r, vi] != 0:
                    terms.append(f"({ss.v_coupling[r, vi]:.6g})*V[%d%d]" % vlab)
            lines.append(f"0 = d{_fmt_label(lab)}/dt = " + " + ".join(terms))
    if which in ("pair", "both"):
        ps = generate_pair_equations(params)
        lines.append("# two-body correlator steady-state equations (d/dt = 0)")
        for r, lab in enumerate(ps.pair_labels):
            terms = []
            if ps.kdiag[r] != 0:
                terms.append(f"({ps.kdiag[r]:.6g})*k*{_fmt_label(lab)}")
            for c, col in enumerate(ps.pair_labels):
                f = _fmt_coeff(ps.a0[r, c], ps.ap[r, c], ps.am[r, c])
                if f:
                    terms.append(f"{f}*{_fmt_label(col)}")
            for c, col in enumerate(SINGLE_LABELS):
                f = _fmt_coeff(ps.src0[r, c], ps.srcp[r, c], ps.srcm[r, c])
                if f:
                    terms.append(f"{f}*{_fmt_label(col)}")
            for row, vi, si, coeff in ps.ladder:
                if row == r:
                    terms.append(
                        f"({coeff:.6g})*V[%d%d]*{_fmt_label(SINGLE_LABELS[si])}"
                        % V_LABELS[vi]
                    )
            lines.append(f"0 = d{_fmt_label(lab)}/dt = " + " + ".join(terms))
    return "\n".join(lines) + "\n"
