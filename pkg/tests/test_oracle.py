"""Discretized-continuum oracle: mode grids, propagation, kernel checks.

The slow pieces (count = 400 grids, long two-time propagations) live in the
acceptance suite; here the grids are small and every run is a few seconds.
"""
import numpy as np
import pytest

from advwave.atomdyn import (
    AtomCorrKind,
    commutator_expect,
    corr_minus_plus,
    corr_plus_minus,
    sigma_z_expect,
)
from advwave.core import DipoleParams
from advwave.oracle import (
    ModeGrid,
    SectorState,
    angular_reduction_check,
    build_grid,
    markov_kernel_check,
    oracle_sigma_z,
    oracle_two_time,
    propagate,
)

P30 = DipoleParams.from_rates(omega0=30.0, gamma=1.0)
P100 = DipoleParams.from_rates(omega0=100.0, gamma=1.0)
CONST = lambda w: np.ones_like(w)  # noqa: E731


# --- grid construction -------------------------------------------------------

def test_build_grid_spacing_and_couplings():
    g = build_grid(P30, count=400, span_gammas=50.0)
    assert g.count == 400
    assert g.spacing == 0.125           # 50 gamma / 400 modes
    assert g.span == 50.0
    # flat density: g_k^2 / dw = gamma / 2 pi for every mode
    assert np.max(np.abs(g.couplings**2 / g.spacing - P30.gamma / (2.0 * np.pi))) < 1e-15
    assert np.allclose(g.detunings, g.omegas - P30.omega0)
    assert abs(g.detunings[0] + g.detunings[-1]) < 1e-12  # symmetric comb


def test_build_grid_density_options():
    flat = build_grid(P30, count=200, span_gammas=25.0, enforce=False)
    cubic = build_grid(P30, count=200, span_gammas=25.0, density="cubic", enforce=False)
    assert np.ptp(flat.couplings) < 1e-15
    assert np.all(np.diff(cubic.couplings) > 0.0)  # coupling grows with omega^3 weight
    with pytest.raises(ValueError, match="density"):
        build_grid(P30, density="quartic")


def test_build_grid_enforcement():
    with pytest.raises(ValueError, match="under-resolves"):
        build_grid(P30, count=100)
    with pytest.raises(ValueError, match="too narrow"):
        build_grid(P30, count=400, span_gammas=20.0)
    build_grid(P30, count=100, span_gammas=20.0, enforce=False)  # opt-out works
    with pytest.raises(ValueError, match="cross zero"):
        build_grid(P30, count=400, span_gammas=80.0, enforce=False)
    with pytest.raises(ValueError, match="count"):
        build_grid(P30, count=1, enforce=False)
    with pytest.raises(ValueError, match="n2_window"):
        build_grid(P30, n2_window_gammas=-1.0)


def test_pair_window_restricts_second_sector():
    g = build_grid(P30, count=200, span_gammas=25.0, enforce=False, n2_window_gammas=5.0)
    assert 0 < g.pair_modes.size < g.count
    near = np.abs(g.omegas[g.pair_modes] - P30.omega0)
    assert np.max(near) <= 5.0 + g.spacing
    wide = build_grid(P30, count=200, span_gammas=25.0, enforce=False, n2_window_gammas=1e6)
    assert wide.pair_modes.size == wide.count


def test_mode_grid_validation():
    with pytest.raises(ValueError):
        ModeGrid(omegas=np.array([1.0, 2.0]), couplings=np.array([0.1]), omega0=1.0, gamma=0.1)
    single = ModeGrid(omegas=np.array([5.0]), couplings=np.array([0.1]), omega0=5.0, gamma=0.1)
    assert single.spacing == 0.0


# --- propagation -------------------------------------------------------------

def test_single_mode_rabi():
    g_c = 0.05
    grid = ModeGrid(omegas=np.array([P30.omega0]), couplings=np.array([g_c]),
                    omega0=P30.omega0, gamma=P30.gamma)
    ts = np.array([3.0, 7.0])
    sz = oracle_sigma_z(ts, grid, P30, dt=1e-3)
    assert np.allclose(sz, np.cos(2.0 * g_c * ts), atol=1e-6)


def test_zero_couplings_freeze_the_state():
    grid = ModeGrid(omegas=np.array([29.0, 31.0]), couplings=np.zeros(2),
                    omega0=P30.omega0, gamma=P30.gamma)
    out = propagate(SectorState.excited(grid), grid, P30, 2.0, dt=1e-3)
    assert out.amp_e0 == 1.0 + 0.0j
    assert out.norm == pytest.approx(1.0, abs=1e-12)


def test_propagate_guards():
    grid = build_grid(P30, count=200, span_gammas=25.0, enforce=False)
    state = SectorState.excited(grid)
    with pytest.raises(ValueError, match="forward"):
        propagate(propagate(state, grid, P30, 1.0), grid, P30, 0.5)
    with pytest.raises(ValueError, match="dt"):
        propagate(state, grid, P30, 1.0, dt=1.0)
    other = DipoleParams.from_rates(omega0=31.0, gamma=1.0)
    with pytest.raises(ValueError, match="different dipole"):
        propagate(state, grid, other, 1.0)


def test_propagate_norm_drift_guard():
    # absurdly strong coupling + coarse step: RK4 loses unitarity and must say so
    grid = ModeGrid(omegas=np.array([30.0]), couplings=np.array([5.0]),
                    omega0=30.0, gamma=1.0)
    with pytest.raises(RuntimeError, match="norm drift"):
        propagate(SectorState.excited(grid), grid, P30, 10.0, dt=0.4)


def test_sigma_z_start_and_decay():
    grid = build_grid(P30, count=400, span_gammas=50.0)
    ts = np.array([0.0, 1.0])
    sz = oracle_sigma_z(ts, grid, P30)
    assert sz[0] == 1.0
    assert abs(sz[1] - sigma_z_expect(1.0, P30)) < 0.03
    with pytest.raises(ValueError, match="ascending"):
        oracle_sigma_z(np.array([1.0, 0.5]), grid, P30)


def test_sigma_z_error_halves_with_span():
    # fixed spacing gamma/8: doubling the mode count doubles the covered span
    # and halves the short-time truncation error
    errs = []
    for count, span in ((200, 25.0), (400, 50.0), (800, 100.0)):
        g = build_grid(P100, count=count, span_gammas=span, enforce=False)
        sz = oracle_sigma_z(np.array([0.1]), g, P100)[0]
        errs.append(abs(sz - sigma_z_expect(0.1, P100)))
    assert errs[1] < 0.65 * errs[0]
    assert errs[2] < 0.65 * errs[1]


# --- two-time correlators ----------------------------------------------------

@pytest.fixture(scope="module")
def grid120():
    return build_grid(P30, count=120, span_gammas=50.0, enforce=False)


def test_two_time_against_closed_forms(grid120):
    u, v = 1.0, 2.0
    cases = (
        (AtomCorrKind.MINUS_PLUS, corr_minus_plus(u, v, P30)),
        (AtomCorrKind.PLUS_MINUS, corr_plus_minus(u, v, P30)),
        (AtomCorrKind.COMMUTATOR, commutator_expect(u, v, P30)),
    )
    for kind, ref in cases:
        val = oracle_two_time(kind, u, v, grid120, P30)
        assert abs(val - ref) / abs(ref) < 0.05, kind


def test_plus_minus_any_order(grid120):
    val = oracle_two_time(AtomCorrKind.PLUS_MINUS, 2.0, 1.0, grid120, P30)
    ref = corr_plus_minus(2.0, 1.0, P30)
    assert abs(val - ref) / abs(ref) < 0.05


def test_minus_plus_zero_at_origin(grid120):
    assert oracle_two_time(AtomCorrKind.MINUS_PLUS, 0.0, 1.0, grid120, P30) == 0.0


def test_two_time_guards(grid120):
    with pytest.raises(ValueError, match="u <= v"):
        oracle_two_time(AtomCorrKind.MINUS_PLUS, 2.0, 1.0, grid120, P30)
    with pytest.raises(ValueError, match="oracle_sigma_z"):
        oracle_two_time(AtomCorrKind.POPULATION_Z, 0.5, 1.0, grid120, P30)


# --- Markov kernel checks ----------------------------------------------------

def test_markov_constant_kernel():
    rep = markov_kernel_check(CONST, t_r=1.5, t_a=4.5, params=P30, per_period=16)
    assert rep.max_rel_err < 1e-2
    assert rep.mass_rel_err < 1e-2
    assert rep.weight_retarded == 1.0
    assert rep.weight_advanced == 1.0
    assert rep.max_rel_err == max(rep.rel_err_retarded, rep.rel_err_advanced)


def test_markov_boundary_packet_half_weight():
    # window ending exactly at t_a: half the wave packet is cut off.  The
    # dissipative projection of the action drops to pi (from 2 pi at full
    # weight); the remaining quadrature (principal-value) part is not halved.
    sigma = 10.0 / P30.omega0
    rep = markov_kernel_check(CONST, t_r=1.5, t_a=4.5, params=P30, per_period=16,
                              window=(1.5 - 12.0 * sigma, 4.5))
    assert rep.weight_advanced == 0.5
    full = np.real(np.exp(1j * P30.omega0 * 1.5) * rep.action_retarded)
    half = np.real(np.exp(1j * P30.omega0 * 4.5) * rep.action_advanced)
    assert full == pytest.approx(2.0 * np.pi, rel=0.01)
    assert half == pytest.approx(np.pi, rel=0.02)


def test_markov_absent_packet():
    sigma = 10.0 / P30.omega0
    rep = markov_kernel_check(CONST, t_r=1.5, t_a=40.0, params=P30, per_period=16,
                              window=(1.5 - 12.0 * sigma, 8.0))
    assert rep.weight_advanced == 0.0
    assert rep.action_advanced == 0.0


def test_markov_width_tracks_cutoff():
    # the delta-comparison only sharpens with the frequency cutoff
    kw = dict(t_r=1.5, t_a=50.0, params=P30, per_period=8, window=(0.5, 2.5))
    r1 = markov_kernel_check(CONST, cutoff=10.0 * P30.omega0, **kw)
    r2 = markov_kernel_check(CONST, cutoff=20.0 * P30.omega0, **kw)
    assert r2.width / r1.width == pytest.approx(0.5, abs=0.03)


def test_markov_banded_mass():
    sigma = 25.0 / P100.omega0
    kw = dict(t_r=2.0 * sigma, t_a=22.0 * sigma, params=P100, sigma=sigma)
    wide = markov_kernel_check(CONST, band=(P100.omega0 - 25.0, P100.omega0 + 25.0), **kw)
    narrow = markov_kernel_check(CONST, band=(P100.omega0 - 5.0, P100.omega0 + 5.0), **kw)
    assert wide.mass_rel_err < 1e-6
    assert narrow.mass_rel_err > 0.1   # band too narrow for the packet: mass leaks
    cubic = markov_kernel_check(lambda w: (w / P100.omega0) ** 3,
                                band=(P100.omega0 - 25.0, P100.omega0 + 25.0), **kw)
    assert cubic.mass_rel_err < 0.02


def test_markov_validation():
    with pytest.raises(ValueError, match="sign"):
        markov_kernel_check(CONST, t_r=1.0, t_a=2.0, params=P30, sign=2)
    with pytest.raises(ValueError, match="cutoff"):
        markov_kernel_check(CONST, t_r=1.0, t_a=2.0, params=P30, cutoff=P30.omega0)
    with pytest.raises(ValueError, match="band"):
        markov_kernel_check(CONST, t_r=1.0, t_a=2.0, params=P30, band=(5.0, 3.0))
    with pytest.raises(ValueError, match="window"):
        markov_kernel_check(CONST, t_r=1.0, t_a=2.0, params=P30, window=(3.0, 3.0))


def test_angular_reduction():
    assert angular_reduction_check() < 1e-10
