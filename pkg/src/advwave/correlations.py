"""Two-time, two-point field correlation tensors of a decaying dipole.

Each function returns a 3x3 complex tensor over field components i (first
event) and j (second event), for field kinds X, Y in {E, B}.  Writing
t_r = t - |x| and t_a = t + |x| for the retarded/advanced source times of each
event and Xc(x), Yc(x') for the spatial coefficient vectors
(:mod:`advwave.fieldcoeffs`), the implemented pieces are

  glauber_tensor          G_ij  = 2 Xc_i Yc*_j th(t_r) th(t_r') <s+(t_r) s-(t_r')>
  delta_expect_tensor     D_ij  = (-1)^aX Xc_i Yc_j  th(t_r'-t_a) th(t_r') th(t_a)  <[s-(t_a), s+(t_r')]>
                                + (-1)^aY Xc*_i Yc*_j th(t_r-t_a') th(t_r) th(t_a') <[s-(t_r), s+(t_a')]>
  c_tensor                C_ij  = G_ij + D_ij
  source_source_commutator       Xc*_i Yc_j th(t_r) th(t_r') <[s-(t_r), s+(t_r')]>
  vac_source_commutator_expect   the vacuum-source cross commutators; their
                                 retarded parts cancel the source-source term
                                 and their advanced parts build D_ij.

th is the unit step with th(0) := 1, so all support boundaries are inclusive.
With that convention the cancellation identity

  source_source + vac_source + source_vac == delta_expect

holds exactly except on the measure-zero coincidence surface t_r == t_r'
(where the step weights add to -1 instead of 0); the identity is exercised on
random off-surface inputs in the tests.

Commutator expectations with reversed time order are obtained from hermiticity,
<[s-(u), s+(v)]> = conj(<[s-(v), s+(u)]>), which is an operator identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import atomdyn, fieldcoeffs
from .core import DipoleParams, Event, FieldKind

__all__ = [
    "CorrLabel",
    "CorrTensor",
    "glauber_tensor",
    "delta_expect_tensor",
    "c_tensor",
    "source_source_commutator",
    "vac_source_commutator_expect",
    "vacuum_wightman_trace",
]


class CorrLabel(Enum):
    GLAUBER = "G"
    DELTA_EXPECT = "DeltaExpect"
    C_FULL = "C"
    SOURCE_SOURCE = "SourceSource"
    VAC_SOURCE = "VacSource"
    SOURCE_VAC = "SourceVac"


@dataclass(frozen=True)
class CorrTensor:
    """A labelled 3x3 correlation tensor between two field observations."""

    label: CorrLabel
    kind_x: FieldKind
    kind_y: FieldKind
    ev_x: Event
    ev_y: Event
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=complex)
        if arr.shape != (3, 3):
            raise ValueError("values must be a 3x3 tensor")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.values))


def _coeff(kind: FieldKind, ev: Event, p: DipoleParams, part: str) -> np.ndarray:
    cs = fieldcoeffs.coeffs_two_level(ev.x, p)
    if part == "full":
        return cs.e_coeff if kind is FieldKind.ELECTRIC else cs.b_coeff
    if part == "rad":
        return cs.e_rad if kind is FieldKind.ELECTRIC else cs.b_rad
    raise ValueError(f"part must be 'full' or 'rad', got {part!r}")


def _comm_any(u: float, v: float, p: DipoleParams) -> complex:
    """<[s-(u), s+(v)]> for either ordering (hermitian reflection for u > v)."""
    if u <= v:
        return complex(atomdyn._comm_raw(u, v, p))
    return complex(np.conj(atomdyn._comm_raw(v, u, p)))


def glauber_tensor(kind_x: FieldKind, kind_y: FieldKind, ev_x: Event, ev_y: Event,
                   params: DipoleParams, part: str = "full") -> CorrTensor:
    """Normal-ordered (Glauber) source correlation tensor G."""
    tr, tr2 = ev_x.t_ret, ev_y.t_ret
    vals = np.zeros((3, 3), dtype=complex)
    if tr >= 0.0 and tr2 >= 0.0:
        xc = _coeff(kind_x, ev_x, params, part)
        yc = _coeff(kind_y, ev_y, params, part)
        vals = 2.0 * np.outer(xc, np.conj(yc)) * atomdyn._pm_raw(tr, tr2, params)
    return CorrTensor(CorrLabel.GLAUBER, kind_x, kind_y, ev_x, ev_y, vals)


def delta_expect_tensor(kind_x: FieldKind, kind_y: FieldKind, ev_x: Event, ev_y: Event,
                        params: DipoleParams, part: str = "full") -> CorrTensor:
    """Expectation of the advanced-wave correction Delta = C - G.

    Nonzero only when one event's *advanced* source time falls inside the other
    event's retarded past; at equal observation times it vanishes identically.
    """
    tr, ta = ev_x.t_ret, ev_x.t_adv
    tr2, ta2 = ev_y.t_ret, ev_y.t_adv
    vals = np.zeros((3, 3), dtype=complex)
    if ta >= 0.0 and tr2 >= ta:
        xc = _coeff(kind_x, ev_x, params, part)
        yc = _coeff(kind_y, ev_y, params, part)
        vals = vals + kind_x.advanced_sign * np.outer(xc, yc) * atomdyn._comm_raw(ta, tr2, params)
    if ta2 >= 0.0 and tr >= ta2:
        xc = _coeff(kind_x, ev_x, params, part)
        yc = _coeff(kind_y, ev_y, params, part)
        vals = vals + kind_y.advanced_sign * np.outer(np.conj(xc), np.conj(yc)) * np.conj(
            atomdyn._comm_raw(ta2, tr, params)
        )
    return CorrTensor(CorrLabel.DELTA_EXPECT, kind_x, kind_y, ev_x, ev_y, vals)


def c_tensor(kind_x: FieldKind, kind_y: FieldKind, ev_x: Event, ev_y: Event,
             params: DipoleParams, part: str = "full") -> CorrTensor:
    """Full detector-ordered correlation C = G + <Delta>."""
    g = glauber_tensor(kind_x, kind_y, ev_x, ev_y, params, part)
    d = delta_expect_tensor(kind_x, kind_y, ev_x, ev_y, params, part)
    return CorrTensor(CorrLabel.C_FULL, kind_x, kind_y, ev_x, ev_y, g.values + d.values)


def source_source_commutator(kind_x: FieldKind, kind_y: FieldKind, ev_x: Event, ev_y: Event,
                             params: DipoleParams, part: str = "full") -> CorrTensor:
    """<[X_s^(+), Y_s^(-)]> between the two source-field parts."""
    tr, tr2 = ev_x.t_ret, ev_y.t_ret
    vals = np.zeros((3, 3), dtype=complex)
    if tr >= 0.0 and tr2 >= 0.0:
        xc = _coeff(kind_x, ev_x, params, part)
        yc = _coeff(kind_y, ev_y, params, part)
        vals = np.outer(np.conj(xc), yc) * _comm_any(tr, tr2, params)
    return CorrTensor(CorrLabel.SOURCE_SOURCE, kind_x, kind_y, ev_x, ev_y, vals)


def vac_source_commutator_expect(direction: CorrLabel, kind_x: FieldKind, kind_y: FieldKind,
                                 ev_x: Event, ev_y: Event, params: DipoleParams,
                                 part: str = "full") -> CorrTensor:
    """Vacuum-source cross commutators <[X0^(+), Ys^(-)]> / <[Xs^(+), Y0^(-)]>.

    ``direction=CorrLabel.VAC_SOURCE`` takes the vacuum part at the first
    event; ``CorrLabel.SOURCE_VAC`` at the second.  Each splits into a retarded
    term (which cancels against ``source_source_commutator``) and an
    advanced-wave term (which survives into ``delta_expect_tensor``).
    """
    if direction not in (CorrLabel.VAC_SOURCE, CorrLabel.SOURCE_VAC):
        raise ValueError("direction must be CorrLabel.VAC_SOURCE or CorrLabel.SOURCE_VAC")
    tr, ta = ev_x.t_ret, ev_x.t_adv
    tr2, ta2 = ev_y.t_ret, ev_y.t_adv
    xc = _coeff(kind_x, ev_x, params, part)
    yc = _coeff(kind_y, ev_y, params, part)
    vals = np.zeros((3, 3), dtype=complex)
    if direction is CorrLabel.VAC_SOURCE:
        if tr >= 0.0 and tr2 >= tr:
            vals = vals - np.outer(np.conj(xc), yc) * atomdyn._comm_raw(tr, tr2, params)
        if ta >= 0.0 and tr2 >= ta:
            vals = vals + kind_x.advanced_sign * np.outer(xc, yc) * atomdyn._comm_raw(ta, tr2, params)
    else:
        if tr2 >= 0.0 and tr >= tr2:
            vals = vals - np.outer(np.conj(xc), yc) * np.conj(atomdyn._comm_raw(tr2, tr, params))
        if ta2 >= 0.0 and tr >= ta2:
            vals = vals + kind_y.advanced_sign * np.outer(np.conj(xc), np.conj(yc)) * np.conj(
                atomdyn._comm_raw(ta2, tr, params)
            )
    return CorrTensor(direction, kind_x, kind_y, ev_x, ev_y, vals)


def vacuum_wightman_trace(ev_x: Event, ev_y: Event, cutoff: float) -> complex:
    """Trace of the free-vacuum electric two-point function, soft cutoff.

    Sum over i of <0| E_i(t, x) E_i(t', x') |0> with each mode damped by
    exp(-omega / cutoff).  Evaluates the regularized closed form

        (1 / (2 pi^2 r)) (1 / i) [1 / a^3 - 1 / b^3],
        a = 1/cutoff + i (dt - r),  b = 1/cutoff + i (dt + r),

    where dt = t - t', r = |x - x'|.  At r = 0 this tends to
    3 / (pi^2 (1/cutoff + i dt)^4); a two-term series is substituted for
    r << |1/cutoff + i dt| to avoid cancellation.  For the cutoff-free limit
    pass ``cutoff=numpy.inf`` (singular exactly on the light cone).
    """
    if not cutoff > 0.0:
        raise ValueError("cutoff must be positive (may be numpy.inf)")
    dt = ev_x.t - ev_y.t
    r = float(np.linalg.norm(ev_x.x - ev_y.x))
    eps = 0.0 if np.isinf(cutoff) else 1.0 / cutoff
    base = eps + 1j * dt
    if r <= 1e-4 * abs(base):
        if base == 0.0:
            raise ValueError("coincident events need a finite cutoff")
        return complex(3.0 / (np.pi**2 * base**4) - 10.0 * r**2 / (np.pi**2 * base**6))
    a = base - 1j * r
    b = base + 1j * r
    if a == 0.0 or b == 0.0:
        raise ValueError("events on the light cone need a finite cutoff")
    return complex((1.0 / (2.0 * np.pi**2 * r)) * (1.0 / 1j) * (1.0 / a**3 - 1.0 / b**3))
