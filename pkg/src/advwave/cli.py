"""Command line front end.

Commands
--------
figure 1|2|3   momentum-diffusion curve data (CSV + SVG)
power          emitted-power table, perturbative or two-level
corr           correlation-function traces on a (t, t') grid
detect         photo-detection rates with and without vacuum interference
validate       self-check suite; exit code 2 if any check fails

Exit codes: 0 success, 1 usage/configuration error, 2 numerical-validation
failure, 3 I/O failure.  ``ADVWAVE_THREADS`` caps BLAS/OpenMP parallelism and
is applied before the numeric stack is first imported, which is why all numpy
imports in this module are local to the command functions.

Configuration precedence: per-command defaults < ``--config`` file < flags.
The config file holds ``key = value`` lines (``#`` comments allowed) with keys
gamma, omega0_ratio, r0_gamma, tmax_gamma, points, out.  All output tables are
deterministic: 17-significant-digit CSV with a ``# key = value`` header block
recording the fully resolved configuration.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits bad usage with status 2; remap it to our usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _apply_thread_env():
    raw = os.environ.get("ADVWAVE_THREADS", "").strip()
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise _UsageError(f"ADVWAVE_THREADS must be a positive integer, got {raw!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(n))


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by every command.

    gamma is in inverse seconds; omega0_over_gamma, r0_gamma and tmax_gamma
    are the dimensionless ratios omega0/gamma, r0*gamma and tmax*gamma.
    ``points`` of None means "choose automatically".
    """

    gamma: float = 1e8
    omega0_over_gamma: float = 100.0
    r0_gamma: float = 1.0 / 3.0
    tmax_gamma: float = 20.0
    points: int | None = None
    out: str = "."

    def __post_init__(self):
        for name in ("gamma", "omega0_over_gamma", "r0_gamma", "tmax_gamma"):
            v = getattr(self, name)
            if not (v > 0.0 and v < float("inf")):
                raise _UsageError(f"{name} must be positive and finite, got {v}")
        if self.points is not None and self.points < 2:
            raise _UsageError(f"points must be >= 2, got {self.points}")

    @property
    def omega0(self) -> float:
        return self.omega0_over_gamma * self.gamma

    @property
    def r0(self) -> float:
        return self.r0_gamma / self.gamma

    def meta(self) -> dict:
        from . import __version__

        return {
            "advwave_version": __version__,
            "gamma": "%.17g" % self.gamma,
            "omega0_over_gamma": "%.17g" % self.omega0_over_gamma,
            "r0_gamma": "%.17g" % self.r0_gamma,
            "tmax_gamma": "%.17g" % self.tmax_gamma,
            "points": "auto" if self.points is None else str(self.points),
            "out": self.out,
        }


_CONFIG_KEYS = {
    "gamma": ("gamma", float),
    "omega0_ratio": ("omega0_over_gamma", float),
    "r0_gamma": ("r0_gamma", float),
    "tmax_gamma": ("tmax_gamma", float),
    "points": ("points", int),
    "out": ("out", str),
}


def _read_config(path):
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise _UsageError(f"{path}:{lineno}: unknown key {key!r}")
        field, cast = _CONFIG_KEYS[key]
        try:
            values[field] = cast(val)
        except ValueError:
            raise _UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return values


def _resolve_config(ns, **command_defaults) -> RunConfig:
    values = dict(command_defaults)
    if getattr(ns, "config", None):
        values.update(_read_config(ns.config))
    for flag, field in (("gamma", "gamma"), ("omega0_ratio", "omega0_over_gamma"),
                        ("r0_gamma", "r0_gamma"), ("tmax_gamma", "tmax_gamma"),
                        ("points", "points"), ("out", "out")):
        v = getattr(ns, flag, None)
        if v is not None:
            values[field] = v
    return RunConfig(**values)


def _outpath(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _dipole_geometry(cfg: RunConfig):
    """Standard geometry: dipole along z, observation point on the x axis."""
    from .core import DipoleParams

    params = DipoleParams.from_rates(cfg.omega0, cfg.gamma)
    position = (cfg.r0, 0.0, 0.0)
    return params, position


def _auto_points(cfg: RunConfig, per_period: int = 64) -> int:
    import math

    tmax = cfg.tmax_gamma / cfg.gamma
    return max(2, int(math.ceil(per_period * cfg.omega0 * tmax / (2.0 * math.pi))) + 1)


def cmd_figure(cfg: RunConfig, which: int) -> int:
    """Write figN.csv / figN.svg: scaled momentum-diffusion curves vs t*gamma."""
    import numpy as np

    from ._report import write_csv, write_svg
    from .kinetics import ChargeParams, dispersion_change, longtime_fit

    if cfg.tmax_gamma < 2.0 * cfg.r0_gamma:
        raise _UsageError("tmax_gamma must be >= 2*r0_gamma so the vacuum-source "
                          "onset lies inside the window")
    params, position = _dipole_geometry(cfg)
    charge = ChargeParams(q=1.0, m=1.0, r0=position)
    n = cfg.points if cfg.points is not None else _auto_points(cfg)
    t = np.linspace(0.0, cfg.tmax_gamma / cfg.gamma, n)
    curve = dispersion_change(t, params, charge)

    meta = cfg.meta()
    meta.update(figure=str(which),
                columns="t_gamma, N-scaled momentum changes (source, vac-source, total)")
    columns = {
        "t_gamma": t * cfg.gamma,
        "n_dps": curve.cum_source,
        "n_dpvacs": curve.cum_vacsource,
        "n_dptotal": curve.cum_total,
    }
    csv_path = _outpath(cfg, f"fig{which}.csv")
    write_csv(csv_path, meta, columns)
    if which == 3:
        window = (cfg.tmax_gamma / 2.0 / cfg.gamma, cfg.tmax_gamma / cfg.gamma)
        slope, intercept = longtime_fit(curve, window, which="total")
        with open(csv_path, "a") as fh:
            fh.write("# fit_window_gamma = [%.17g, %.17g]\n"
                     % (window[0] * cfg.gamma, window[1] * cfg.gamma))
            fh.write("# fit_slope_over_gamma = %.17g\n" % (slope / cfg.gamma))
            fh.write("# fit_intercept = %.17g\n" % intercept)
    write_svg(_outpath(cfg, f"fig{which}.svg"), columns["t_gamma"],
              {k: columns[k] for k in ("n_dps", "n_dpvacs", "n_dptotal")},
              title=f"Scaled momentum diffusion (figure {which})",
              xlabel="t * gamma", ylabel="N * dp")
    return EXIT_OK


def cmd_power(cfg: RunConfig, model: str) -> int:
    """Write power.csv: emitted-power split into the four bookkeeping curves."""
    import numpy as np

    from ._report import write_csv
    from .core import DipoleParams
    from .fieldcoeffs import LevelScheme
    from .radiometry import pert_power_breakdown, power_curves_2lvl

    params = DipoleParams.from_rates(cfg.omega0, cfg.gamma)
    meta = cfg.meta()
    meta.update(model=model, units="natural (hbar = c = 1); power in omega0*gamma scale")
    if model == "pert":
        scheme = LevelScheme.two_level(params)
        pb = pert_power_breakdown(scheme, emitter=1)
        columns = {
            "p_g": [pb.glauber], "p_s": [pb.source],
            "p_vacs": [pb.vacsource], "p_total": [pb.total],
        }
    else:
        n = cfg.points if cfg.points is not None else 201
        t_ret = np.linspace(0.0, cfg.tmax_gamma / cfg.gamma, n)
        pb = power_curves_2lvl(t_ret, params)
        columns = {
            "t_gamma": t_ret * cfg.gamma,
            "p_g": pb.glauber, "p_s": pb.source,
            "p_vacs": pb.vacsource, "p_total": pb.total,
        }
    write_csv(_outpath(cfg, "power.csv"), meta, columns)
    return EXIT_OK


def cmd_corr(cfg: RunConfig, geometry=None) -> int:
    """Write corr.csv: G, interference and total traces on a (t, t') grid.

    ``geometry`` overrides the two observation points; the default puts both
    at the standard position r0 on the x axis.
    """
    import numpy as np

    from ._report import write_csv
    from .core import Event, FieldKind
    from .correlations import c_tensor, delta_expect_tensor, glauber_tensor

    params, position = _dipole_geometry(cfg)
    x_a, x_b = (position, position) if geometry is None else geometry
    n = cfg.points if cfg.points is not None else 41
    ts = np.linspace(0.0, cfg.tmax_gamma / cfg.gamma, n)

    cols = {k: [] for k in ("t_gamma", "tp_gamma", "re_g", "im_g",
                            "re_delta", "im_delta", "re_c", "im_c")}
    kind = FieldKind.ELECTRIC
    for t in ts:
        ev_a = Event(t, x_a)
        for tp in ts:
            ev_b = Event(tp, x_b)
            g = glauber_tensor(kind, kind, ev_a, ev_b, params).trace
            d = delta_expect_tensor(kind, kind, ev_a, ev_b, params).trace
            c = c_tensor(kind, kind, ev_a, ev_b, params).trace
            cols["t_gamma"].append(t * cfg.gamma)
            cols["tp_gamma"].append(tp * cfg.gamma)
            cols["re_g"].append(g.real)
            cols["im_g"].append(g.imag)
            cols["re_delta"].append(d.real)
            cols["im_delta"].append(d.imag)
            cols["re_c"].append(c.real)
            cols["im_c"].append(c.imag)

    meta = cfg.meta()
    meta.update(field="E", trace="sum over field components",
                gate_tp_minus_t_gamma="%.17g" % (2.0 * cfg.r0_gamma),
                note="interference trace vanishes on the t = t' diagonal and "
                     "switches on across |t' - t| = 2*r0")
    write_csv(_outpath(cfg, "corr.csv"), meta, cols)
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    """Write detect.csv: detection rates from G alone and from the full C."""
    import numpy as np

    from ._report import write_csv, write_svg
    from .photodetect import DetectorConfig, suppression_report

    params, position = _dipole_geometry(cfg)
    det = DetectorConfig(position=position, source=params)
    n = cfg.points if cfg.points is not None else 120
    x = det.r
    t = np.linspace(x, 2.0 * x + cfg.tmax_gamma / cfg.gamma, n)
    rep = suppression_report(det, t)

    meta = cfg.meta()
    meta.update(onset_t_gamma="%.17g" % (2.0 * x * cfg.gamma),
                max_interference_ratio="%.17g" % rep.max_ratio)
    columns = {
        "t_gamma": t * cfg.gamma,
        "rate_g": rep.rate_g,
        "rate_c": rep.rate_c,
        "diff": rep.diff,
    }
    write_csv(_outpath(cfg, "detect.csv"), meta, columns)
    write_svg(_outpath(cfg, "detect.svg"), columns["t_gamma"],
              {"rate_g": rep.rate_g, "rate_c": rep.rate_c},
              title="Photo-detection rate", xlabel="t * gamma", ylabel="rate")
    return EXIT_OK


def _run_checks(cfg: RunConfig, count: int, span: float, full: bool):
    """Yield (name, tolerance, measured, passed, note) validation rows."""
    import numpy as np

    from .atomdyn import (AtomCorrKind, commutator_expect, corr_minus_plus,
                          sigma_z_expect)
    from .core import DipoleParams, Event, FieldKind
    from .correlations import (CorrLabel, c_tensor, delta_expect_tensor,
                               source_source_commutator,
                               vac_source_commutator_expect)
    from .kinetics import ChargeParams, momdiff_source, momdiff_vacsource
    from .oracle import (angular_reduction_check, build_grid,
                         markov_kernel_check, oracle_sigma_z, oracle_two_time)
    from .radiometry import power_curves_2lvl, sphere_integrate

    rng = np.random.default_rng(20260814)

    # 1. power sum rules on random two-level working points
    err = 0.0
    for _ in range(100):
        p = DipoleParams.from_rates(rng.uniform(10.0, 1000.0), 1.0)
        pb = power_curves_2lvl(float(rng.uniform(0.0, 10.0)), p)
        err = max(err,
                  abs(pb.source + pb.vacsource - pb.total) / pb.total if pb.total else 0.0,
                  abs(pb.total - 2.0 * pb.glauber) / pb.total if pb.total else 0.0)
    yield ("power-sum-rules", 1e-12, err, err <= 1e-12, "")

    # 2. transverse sphere quadrature
    err = 0.0
    for _ in range(3):
        d = rng.normal(size=3)

        def f(xhat, d=d):
            tr = d - xhat * (xhat @ d)
            return float(tr @ tr)

        val = sphere_integrate(f, 1.0, order=16)
        ref = 8.0 * np.pi / 3.0 * float(d @ d)
        err = max(err, abs(val - ref) / ref)
    yield ("sphere-quadrature", 1e-12, err, err <= 1e-12, "")

    # 3. light-cone gating: exact zeros before signal arrival
    p = DipoleParams.from_rates(cfg.omega0_over_gamma, 1.0)
    charge = ChargeParams(q=1.0, m=1.0, r0=(cfg.r0_gamma, 0.0, 0.0))
    worst = 0.0
    for t in np.linspace(0.0, cfg.r0_gamma, 7, endpoint=False):
        worst = max(worst, abs(momdiff_source(float(t), p, charge)))
    for t in np.linspace(0.0, 2.0 * cfg.r0_gamma, 7, endpoint=False):
        worst = max(worst, abs(momdiff_vacsource(float(t), p, charge)))
    kinds = (FieldKind.ELECTRIC, FieldKind.MAGNETIC)
    for _ in range(200):
        t = float(rng.uniform(0.0, 10.0))
        xa = rng.uniform(-2.0, 2.0, size=3)
        xb = rng.uniform(-2.0, 2.0, size=3)
        if np.linalg.norm(xa) < 1e-3 or np.linalg.norm(xb) < 1e-3:
            continue
        dt = delta_expect_tensor(kinds[rng.integers(2)], kinds[rng.integers(2)],
                                 Event(t, xa), Event(t, xb), p)
        worst = max(worst, float(np.max(np.abs(dt.values))))
    yield ("light-cone-gating", 0.0, worst, worst == 0.0, "exact zeros required")

    # 4. commutator reconstruction from the three partitions
    err = 0.0
    for _ in range(200):
        ta, tb = sorted(rng.uniform(0.0, 8.0, size=2))
        xa = rng.uniform(-2.0, 2.0, size=3)
        xb = rng.uniform(-2.0, 2.0, size=3)
        if np.linalg.norm(xa) < 1e-3 or np.linalg.norm(xb) < 1e-3:
            continue
        ka, kb = kinds[rng.integers(2)], kinds[rng.integers(2)]
        ea, eb = Event(float(ta), xa), Event(float(tb), xb)
        total = (source_source_commutator(ka, kb, ea, eb, p).values
                 + vac_source_commutator_expect(CorrLabel.VAC_SOURCE, ka, kb, ea, eb, p).values
                 + vac_source_commutator_expect(CorrLabel.SOURCE_VAC, ka, kb, ea, eb, p).values)
        ref = delta_expect_tensor(ka, kb, ea, eb, p).values
        scale = max(float(np.max(np.abs(ref))), float(np.max(np.abs(total))), 1e-30)
        err = max(err, float(np.max(np.abs(total - ref))) / scale)
    yield ("commutator-reconstruction", 1e-12, err, err <= 1e-12, "")

    # 5. equal-time commutator against the population difference
    err = 0.0
    for t in rng.uniform(0.0, 10.0, size=100):
        err = max(err, abs(commutator_expect(float(t), float(t), p)
                           + sigma_z_expect(float(t), p)))
    yield ("commutator-diagonal", 1e-12, err, err <= 1e-12, "")

    # 6. discretized-field oracle for the population decay
    try:
        grid = build_grid(p, count=count, span_gammas=span, enforce=False)
        times = np.arange(0.5, 6.51, 0.5)
        vals = oracle_sigma_z(times, grid, p)
        err = float(np.max(np.abs(vals - sigma_z_expect(times, p))))
        yield ("oracle-sigma-z", 0.03, err, err <= 0.03,
               f"count={count} span={span:g}, grid t in [0.5, 6.5]/gamma")
    except (ValueError, RuntimeError, MemoryError) as exc:
        yield ("oracle-sigma-z", 0.03, float("nan"), False, f"failed: {exc}")

    # 7. resonance-kernel mass carried by the comb bandwidth
    try:
        w0 = p.omega0
        sigma = 25.0 / w0
        rep = markov_kernel_check(lambda w: np.ones_like(w), t_r=2.0 * sigma,
                                  t_a=22.0 * sigma, params=p, sigma=sigma,
                                  band=(w0 - span / 2.0, w0 + span / 2.0))
        err = rep.mass_rel_err
        yield ("markov-mass", 0.01, err, err <= 0.01,
               f"band=omega0+-{span / 2.0:g}*gamma")
    except (ValueError, RuntimeError, MemoryError) as exc:
        yield ("markov-mass", 0.01, float("nan"), False, f"failed: {exc}")

    # 8. transverse angular reduction
    err = angular_reduction_check(z_values=(5.0,), n_dirs=2, order=24)
    yield ("angular-reduction", 1e-10, err, err <= 1e-10, "")

    if full:
        # 9. two-excitation-sector oracle for the anti-normal correlator
        try:
            grid = build_grid(p, count=count, span_gammas=span, enforce=False)
            u, v = 1.0, 2.0
            num = oracle_two_time(AtomCorrKind.MINUS_PLUS, u, v, grid, p)
            ref = corr_minus_plus(u, v, p)
            err = abs(num - ref) / abs(ref)
            yield ("oracle-minus-plus", 0.05, err, err <= 0.05,
                   f"count={count} span={span:g}")
        except (ValueError, RuntimeError, MemoryError) as exc:
            yield ("oracle-minus-plus", 0.05, float("nan"), False, f"failed: {exc}")


def cmd_validate(cfg: RunConfig, count: int, span: float, full: bool) -> int:
    """Run the self-check table; exit 2 when any check fails."""
    rows = list(_run_checks(cfg, count, span, full))
    width = max(len(r[0]) for r in rows)
    lines = [f"{'check':<{width}}  {'tolerance':>11}  {'measured':>12}  result",
             "-" * (width + 48)]
    for name, tol, measured, ok, note in rows:
        status = "PASS" if ok else "FAIL"
        suffix = f"  ({note})" if note else ""
        lines.append(f"{name:<{width}}  {tol:>11.3g}  {measured:>12.4g}  {status}{suffix}")
    n_fail = sum(1 for r in rows if not r[3])
    lines.append(f"{n_fail} of {len(rows)} checks failed" if n_fail
                 else f"all {len(rows)} checks passed")
    report = "\n".join(lines)
    print(report)
    with open(_outpath(cfg, "validate.txt"), "w") as fh:
        fh.write(report + "\n")
    return EXIT_VALIDATION if n_fail else EXIT_OK


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--gamma", type=float, help="decay rate in 1/s")
    common.add_argument("--omega0-ratio", type=float, dest="omega0_ratio",
                        help="transition frequency over gamma")
    common.add_argument("--r0-gamma", type=float, dest="r0_gamma",
                        help="observation distance times gamma")
    common.add_argument("--tmax-gamma", type=float, dest="tmax_gamma",
                        help="time-grid extent times gamma")
    common.add_argument("--points", type=int, help="number of grid points")

    parser = _Parser(
        prog="advwave", parents=[common],
        description="Vacuum-source interference toolkit: figures, power tables, "
                    "correlation maps, detection sweeps, and self-validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", parents=[common],
                           help="momentum-diffusion figure data")
    p_fig.add_argument("which", type=int, choices=(1, 2, 3))

    p_pow = sub.add_parser("power", parents=[common], help="emitted-power table")
    p_pow.add_argument("model", choices=("pert", "nonpert"))

    sub.add_parser("corr", parents=[common], help="correlation traces on a (t, t') grid")
    sub.add_parser("detect", parents=[common], help="photo-detection rate sweep")

    p_val = sub.add_parser("validate", parents=[common], help="run the self-check table")
    p_val.add_argument("--count", type=int, default=400, help="oracle mode count")
    p_val.add_argument("--span", type=float, default=50.0,
                       help="oracle comb span in units of gamma")
    p_val.add_argument("--full", action="store_true",
                       help="include the slow two-excitation oracle check")

    return parser


_FIGURE_DEFAULTS = {
    1: dict(omega0_over_gamma=10.0, tmax_gamma=6.0),
    2: dict(omega0_over_gamma=100.0, tmax_gamma=6.0),
    3: dict(omega0_over_gamma=100.0, tmax_gamma=20.0),
}


def main(argv=None) -> int:
    try:
        _apply_thread_env()
        ns = _build_parser().parse_args(argv)
        if ns.command == "figure":
            cfg = _resolve_config(ns, **_FIGURE_DEFAULTS[ns.which])
            return cmd_figure(cfg, ns.which)
        if ns.command == "power":
            cfg = _resolve_config(ns, tmax_gamma=6.0)
            return cmd_power(cfg, ns.model)
        if ns.command == "corr":
            cfg = _resolve_config(ns, tmax_gamma=4.0)
            return cmd_corr(cfg)
        if ns.command == "detect":
            cfg = _resolve_config(ns, tmax_gamma=10.0)
            return cmd_detect(cfg)
        cfg = _resolve_config(ns)
        return cmd_validate(cfg, ns.count, ns.span, ns.full)
    except _UsageError as exc:
        print(f"advwave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"advwave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"advwave: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
