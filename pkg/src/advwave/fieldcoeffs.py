"""Spatial coefficient vectors of the source fields of an oscillating dipole.

For a dipole d at the origin oscillating at frequency w, the positive-frequency
source fields at x factorize into a spatial coefficient times the lowered atom
operator evaluated at the retarded time.  The electric coefficient is

    E(x) = (i w / 4 pi x^2 + 1 / 4 pi x^3) (3 xhat (xhat . d) - d)
         + (w^2 / 4 pi x) (d - xhat (xhat . d))

and the magnetic coefficient is

    B(x) = (w^2 / 4 pi x - i w / 4 pi x^2) (xhat x d),

with x = |x|.  The three inverse powers of x (radiation 1/x, intermediate
1/x^2, near 1/x^3) are kept separate because several consumers (momentum
diffusion, detection at radiation-zone distances) contract against the 1/x
part alone.

``tau_kernel`` is the transverse angular average
(1 / 4 pi) Int dOmega_k (delta_ij - khat_i khat_j) exp(i w khat . x),
shared by the vacuum-commutator reductions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DipoleParams, _vec3

__all__ = ["CoeffSet", "LevelScheme", "coeffs_two_level", "coeffs_multilevel", "tau_kernel"]


@dataclass(frozen=True)
class CoeffSet:
    """Zone-resolved source-field coefficient vectors at one position.

    ``e_rad``/``e_mid``/``e_near`` scale as 1/x, 1/x^2, 1/x^3; ``b_rad``/
    ``b_mid`` as 1/x, 1/x^2.  ``levels`` tags the transition pair (n, m) for
    multilevel schemes and is None for a plain two-level emitter.
    """

    position: np.ndarray
    omega: float
    dvec: np.ndarray
    e_rad: np.ndarray
    e_mid: np.ndarray
    e_near: np.ndarray
    b_rad: np.ndarray
    b_mid: np.ndarray
    levels: tuple[int, int] | None = None

    def __post_init__(self):
        for name in ("position", "dvec"):
            object.__setattr__(self, name, _vec3(getattr(self, name), name))
        for name in ("e_rad", "e_mid", "e_near", "b_rad", "b_mid"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (3,):
                raise ValueError(f"{name} must be a complex 3-vector")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def e_coeff(self) -> np.ndarray:
        """Full electric coefficient vector (all zones)."""
        return self.e_rad + self.e_mid + self.e_near

    @property
    def b_coeff(self) -> np.ndarray:
        """Full magnetic coefficient vector (all zones)."""
        return self.b_rad + self.b_mid


def _structures(x, omega: float, dvec) -> CoeffSet:
    pos = _vec3(x, "x")
    d = _vec3(dvec, "dvec")
    r = float(np.linalg.norm(pos))
    if r == 0.0:
        raise ValueError("source-field coefficients are singular at the dipole position")
    xhat = pos / r
    longit = 3.0 * xhat * float(xhat @ d) - d          # near/intermediate structure
    transv = d - xhat * float(xhat @ d)                # radiation structure
    cross = np.cross(xhat, d)
    pre_rad = omega**2 / (4.0 * np.pi * r)
    pre_mid = omega / (4.0 * np.pi * r**2)
    pre_near = 1.0 / (4.0 * np.pi * r**3)
    return CoeffSet(
        position=pos,
        omega=float(omega),
        dvec=d,
        e_rad=pre_rad * transv + 0j,
        e_mid=1j * pre_mid * longit,
        e_near=pre_near * longit + 0j,
        b_rad=pre_rad * cross + 0j,
        b_mid=-1j * pre_mid * cross,
    )


def coeffs_two_level(x, params: DipoleParams) -> CoeffSet:
    """Coefficient set of a two-level dipole at observation point ``x``."""
    return _structures(x, params.omega0, params.dvec)


@dataclass(frozen=True)
class LevelScheme:
    """Multilevel emitter: ascending energies and a real symmetric dipole matrix.

    ``dipoles`` has shape (n, n, 3) with d[n, m] = d[m, n] and zero diagonal
    (permanent moments are not supported; they do not radiate in this model).
    """

    energies: np.ndarray
    dipoles: np.ndarray

    def __post_init__(self):
        en = np.asarray(self.energies, dtype=float)
        if en.ndim != 1 or en.size < 2:
            raise ValueError("need at least two levels")
        if np.any(np.diff(en) <= 0.0):
            raise ValueError("energies must be strictly ascending")
        dp = np.asarray(self.dipoles, dtype=float)
        if dp.shape != (en.size, en.size, 3):
            raise ValueError(f"dipoles must have shape ({en.size}, {en.size}, 3)")
        if not np.allclose(dp, np.swapaxes(dp, 0, 1), rtol=0.0, atol=0.0):
            raise ValueError("dipole matrix must be exactly symmetric")
        if np.any(dp[np.arange(en.size), np.arange(en.size)] != 0.0):
            raise ValueError("diagonal (permanent) dipole moments are not supported")
        en, dp = en.copy(), dp.copy()
        en.flags.writeable = False
        dp.flags.writeable = False
        object.__setattr__(self, "energies", en)
        object.__setattr__(self, "dipoles", dp)

    @property
    def n_levels(self) -> int:
        return int(self.energies.size)

    def omega(self, upper: int, lower: int) -> float:
        """Signed transition frequency E[upper] - E[lower]."""
        return float(self.energies[upper] - self.energies[lower])

    def pairs(self):
        """All (n, m) with n < m, ascending."""
        n = self.n_levels
        return [(i, j) for i in range(n) for j in range(i + 1, n)]

    @classmethod
    def two_level(cls, params: DipoleParams) -> "LevelScheme":
        """The scheme {0, omega0} with the given transition dipole."""
        dip = np.zeros((2, 2, 3))
        dip[0, 1] = dip[1, 0] = params.dvec
        return cls(energies=np.array([0.0, params.omega0]), dipoles=dip)


def coeffs_multilevel(scheme: LevelScheme, x) -> tuple[CoeffSet, ...]:
    """One coefficient set per level pair (n < m), at the pair frequency.

    Each pair enters with its positive frequency E[m] - E[n] and dipole
    d[n, m]; a two-level scheme therefore reproduces ``coeffs_two_level``
    exactly.
    """
    out = []
    for n, m in scheme.pairs():
        cs = _structures(x, scheme.omega(m, n), scheme.dipoles[n, m])
        out.append(
            CoeffSet(
                position=cs.position, omega=cs.omega, dvec=cs.dvec,
                e_rad=cs.e_rad, e_mid=cs.e_mid, e_near=cs.e_near,
                b_rad=cs.b_rad, b_mid=cs.b_mid, levels=(n, m),
            )
        )
    return tuple(out)


_TAU_SERIES_CUT = 1e-3


def tau_kernel(z: float, xhat) -> np.ndarray:
    """Transverse angular kernel tau_ij(z) for direction ``xhat``.

    tau_ij(z) = (delta_ij - xi xj) sin(z)/z
              + (delta_ij - 3 xi xj) (cos(z)/z^2 - sin(z)/z^3)

    with tau_ij(0) = (2/3) delta_ij.  Below |z| = 1e-3 the two radial
    functions switch to their Taylor series to avoid catastrophic
    cancellation; the series are kept to z^6 (relative error < 1e-24 at the
    switch point, far below double precision).
    """
    n = _vec3(xhat, "xhat")
    norm = np.linalg.norm(n)
    if not np.isclose(norm, 1.0, rtol=0.0, atol=1e-12):
        if norm == 0.0:
            raise ValueError("xhat must be a unit vector")
        n = n / norm
    z = float(z)
    if z < 0.0:
        raise ValueError("z = omega * |x| must be >= 0")
    if z < _TAU_SERIES_CUT:
        z2 = z * z
        j0 = 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
        h = -1.0 / 3.0 + z2 / 30.0 - z2 * z2 / 840.0 + z2 * z2 * z2 / 45360.0
    else:
        j0 = np.sin(z) / z
        h = np.cos(z) / z**2 - np.sin(z) / z**3
    eye = np.eye(3)
    proj = np.outer(n, n)
    return (eye - proj) * j0 + (eye - 3.0 * proj) * h
