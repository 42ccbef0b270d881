"""Command-line front end.

Subcommands cover the whole signal chain: spectrum synthesis, dispersion
estimation and compensation design, finite-gain correction and gain sizing,
pump-sweep calibration, loss-chain arithmetic, the phase-lock simulation, and
the composite ``replicate-paper`` reference table.

Every run prints a reproducible ``key = value`` report: the inputs are echoed
in full precision, so feeding them back reproduces the outputs exactly.
Summary lines show dB values to one decimal; files and report keys keep full
precision.  Exit codes: 0 success, 1 domain or validation error, 2 I/O
error.  Failures print a single machine-readable line on stderr of the form
``error: <ErrorType>: <message>``.
"""

import argparse
import math
import os
import sys

from . import __version__
from .calibration import LossChain, chain_efficiency, fit
from .config import ScenarioConfig, read_config
from .dispersion import (
    DispersionModel,
    FiberSegment,
    degradation_phase_dev,
    design_dcf,
    estimate_dispersion,
    frequency_thz,
    make_grid,
    phase_maintained_band,
    segment_dispersion,
    spectrum,
    wavelength_nm,
)
from .errors import DomainError, OpaChainError
from .lockloop import LockLoopConfig, run_lock
from .measurement import MeasuredLevels, OpaGain, effective_phase_deviation, \
    required_gain, true_from_measured
from .replicate import run_all
from .sideband import QuadLevels, SqueezerParams, true_levels
from .traceio import read_sweep, read_trace, write_trace

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

ENV_SEED = "OPACHAIN_SEED"


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _emit(key, value):
    print(f"{key} = {_fmt(value)}")


def _emit_header(command, seed=None):
    _emit("tool.version", __version__)
    _emit("command", command)
    if seed is not None:
        _emit("run.seed", seed)


def _load_config(args):
    if getattr(args, "config", None):
        return read_config(args.config)
    return ScenarioConfig({})


def _seed_for(args, cfg):
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    if getattr(args, "seed", None) is not None:
        return args.seed
    return cfg.seed(0)


def _output_path(args, cfg, default_name):
    if getattr(args, "output", None):
        return args.output
    out_dir = getattr(args, "output_dir", None) or cfg.get("output", "dir", ".")
    return os.path.join(out_dir, default_name)


def _resolve_levels(args, cfg, echo=True):
    """Levels from --r-minus-db/--r-plus-db, source flags, or the config."""
    has_db = args.r_minus_db is not None or args.r_plus_db is not None
    has_src = any(getattr(args, name, None) is not None
                  for name in ("a_per_w", "loss", "pump_w"))
    if has_db:
        if args.r_minus_db is None or args.r_plus_db is None:
            raise DomainError("give both --r-minus-db and --r-plus-db")
        levels = QuadLevels.from_db(args.r_minus_db, args.r_plus_db)
    elif has_src:
        if None in (args.a_per_w, args.loss, args.pump_w):
            raise DomainError("give all of --a-per-w, --loss and --pump-w")
        params = SqueezerParams(args.a_per_w, args.loss, args.pump_w)
        if echo:
            _emit("input.squeezer.a_per_w", params.a_per_w)
            _emit("input.squeezer.loss", params.loss)
            _emit("input.squeezer.pump_w", params.pump_w)
        levels = true_levels(params)
    else:
        params = cfg.squeezer()
        if echo:
            _emit("input.squeezer.a_per_w", params.a_per_w)
            _emit("input.squeezer.loss", params.loss)
            _emit("input.squeezer.pump_w", params.pump_w)
        levels = true_levels(params)
    if echo:
        _emit("input.r_minus", levels.r_minus)
        _emit("input.r_plus", levels.r_plus)
    return levels


def _resolve_gain(args, cfg):
    if args.gain is not None and args.gain_db is not None:
        raise DomainError("give --gain or --gain-db, not both")
    if args.gain is not None:
        return OpaGain(args.gain)
    if args.gain_db is not None:
        return OpaGain.from_db(args.gain_db)
    return cfg.gain()


def _resolve_dispersion(args, cfg):
    flags = (args.d_ps_per_nm, args.f0_thz)
    if any(v is not None for v in flags):
        if None in flags:
            raise DomainError("give both --d-ps-per-nm and --f0-thz")
        return DispersionModel(args.d_ps_per_nm, args.f0_thz,
                               args.phi0_rad if args.phi0_rad is not None else 0.0)
    model = cfg.dispersion()
    if args.phi0_rad is not None:
        model = DispersionModel(model.d_ps_per_nm, model.f0_thz, args.phi0_rad)
    return model


def _resolve_grid(args, cfg):
    flags = (args.start_nm, args.stop_nm, args.step_nm)
    if any(v is not None for v in flags):
        if None in flags:
            raise DomainError("give all of --start-nm, --stop-nm and --step-nm")
        return make_grid(args.start_nm, args.stop_nm, args.step_nm)
    return cfg.grid()


def _add_levels_flags(parser):
    parser.add_argument("--r-minus-db", type=float, help="squeezing level, dB")
    parser.add_argument("--r-plus-db", type=float, help="anti-squeezing level, dB")
    parser.add_argument("--a-per-w", type=float, help="nonlinear efficiency, 1/W")
    parser.add_argument("--loss", type=float, help="total optical loss fraction")
    parser.add_argument("--pump-w", type=float, help="pump power, W")


def _add_dispersion_flags(parser):
    parser.add_argument("--d-ps-per-nm", type=float, help="total dispersion, ps/nm")
    parser.add_argument("--f0-thz", type=float, help="center frequency, THz")
    parser.add_argument("--phi0-rad", type=float, help="lock-point phase, rad")


def _add_gain_flags(parser):
    parser.add_argument("--gain", type=float, help="linear power gain")
    parser.add_argument("--gain-db", type=float, help="power gain in dB")


def _add_common(parser):
    parser.add_argument("--config", help="scenario config file (section.key = value)")
    parser.add_argument("--output-dir", help="directory for output artifacts")


# ---------------------------------------------------------------- handlers

def cmd_simulate_spectrum(args):
    cfg = _load_config(args)
    _emit_header("simulate-spectrum")
    levels = _resolve_levels(args, cfg)
    model = _resolve_dispersion(args, cfg)
    grid = _resolve_grid(args, cfg)
    _emit("input.dispersion.d_ps_per_nm", model.d_ps_per_nm)
    _emit("input.dispersion.f0_thz", model.f0_thz)
    _emit("input.dispersion.phi0_rad", model.phi0_rad)
    _emit("input.grid.points", int(grid.size))
    trace = spectrum(model, levels, grid, unit=args.unit)
    path = _output_path(args, cfg, "spectrum.csv")
    write_trace(trace, path)
    _emit("output.trace", path)
    ratios = trace.in_ratio()
    _emit("output.min_ratio", float(ratios.min()))
    _emit("output.max_ratio", float(ratios.max()))
    print(f"summary: {grid.size} points, floor {10 * math.log10(ratios.min()):.1f} dB, "
          f"ceiling {10 * math.log10(ratios.max()):.1f} dB -> {path}")
    return EXIT_OK


def cmd_estimate_dispersion(args):
    cfg = _load_config(args)
    _emit_header("estimate-dispersion")
    f0 = args.f0_thz if args.f0_thz is not None else cfg.dispersion().f0_thz
    trace = read_trace(args.input)
    _emit("input.trace", args.input)
    _emit("input.f0_thz", f0)
    _emit("input.smoothing_nm", args.smoothing_nm)
    d_est = estimate_dispersion(trace, f0, smoothing_nm=args.smoothing_nm)
    _emit("output.d_ps_per_nm", d_est)
    print(f"summary: estimated |D| = {d_est:.4g} ps/nm")
    return EXIT_OK


def _parse_segment(text):
    try:
        length_text, rate_text = text.split(":")
        return FiberSegment(float(length_text), float(rate_text))
    except (ValueError, TypeError):
        raise DomainError(
            f"segment must be LENGTH_M:D_PS_NM_PER_M, got {text!r}") from None


def cmd_design_dcf(args):
    _emit_header("design-dcf")
    segments = [_parse_segment(s) for s in args.segment]
    for i, seg in enumerate(segments):
        _emit(f"input.segment.{i}.length_m", seg.length_m)
        _emit(f"input.segment.{i}.d_ps_per_nm_per_m", seg.d_ps_per_nm_per_m)
    _emit("input.dcf_rate_ps_per_nm_per_m", args.dcf_rate)
    _emit("input.target_residual_ps_per_nm", args.target_residual)
    net = segment_dispersion(segments)
    length = design_dcf(segments, args.dcf_rate, args.target_residual)
    _emit("output.net_dispersion_ps_per_nm", net)
    _emit("output.dcf_length_m", length)
    print(f"summary: {length:.3f} m of compensating fiber cancels "
          f"{net:.4g} ps/nm down to {args.target_residual:.4g} ps/nm")
    return EXIT_OK


def cmd_band(args):
    cfg = _load_config(args)
    _emit_header("band")
    model = _resolve_dispersion(args, cfg)
    _emit("input.dispersion.d_ps_per_nm", model.d_ps_per_nm)
    _emit("input.dispersion.f0_thz", model.f0_thz)
    _emit("input.lock_nm", args.lock_nm)
    f_lock = float(frequency_thz(args.lock_nm))
    if args.max_dev_rad is not None:
        budget = args.max_dev_rad
    else:
        levels = _resolve_levels(args, cfg)
        budget = degradation_phase_dev(levels, degrade_db=args.degrade_db)
        _emit("input.degrade_db", args.degrade_db)
    _emit("input.max_dev_rad", budget)
    window = (float(frequency_thz(args.window_stop_nm)),
              float(frequency_thz(args.window_start_nm)))
    f_lo, f_hi = phase_maintained_band(model, f_lock, budget, f_window_thz=window)
    _emit("output.f_lo_thz", f_lo)
    _emit("output.f_hi_thz", f_hi)
    _emit("output.width_thz", f_hi - f_lo)
    _emit("output.extent_up_thz", f_hi - f_lock)
    _emit("output.extent_down_thz", f_lock - f_lo)
    _emit("output.wavelength_lo_nm", float(wavelength_nm(f_hi)))
    _emit("output.wavelength_hi_nm", float(wavelength_nm(f_lo)))
    print(f"summary: phase held within {budget:.3f} rad over {f_hi - f_lo:.3f} THz "
          f"({float(wavelength_nm(f_hi)):.1f} nm to {float(wavelength_nm(f_lo)):.1f} nm)")
    return EXIT_OK


def cmd_correct_squeezing(args):
    cfg = _load_config(args)
    _emit_header("correct-squeezing")
    gain = _resolve_gain(args, cfg)
    meas = MeasuredLevels(10 ** (args.r_minus_meas_db / 10.0),
                          10 ** (args.r_plus_meas_db / 10.0))
    _emit("input.gain", gain.g)
    _emit("input.r_minus_meas_db", args.r_minus_meas_db)
    _emit("input.r_plus_meas_db", args.r_plus_meas_db)
    levels = true_from_measured(meas, gain)
    _emit("output.r_minus", levels.r_minus)
    _emit("output.r_plus", levels.r_plus)
    _emit("output.r_minus_db", levels.r_minus_db)
    _emit("output.r_plus_db", levels.r_plus_db)
    print(f"summary: corrected squeezing {levels.r_minus_db:.1f} dB, "
          f"anti-squeezing {levels.r_plus_db:.1f} dB at gain {gain.db:.1f} dB")
    return EXIT_OK


def cmd_theta_eff(args):
    cfg = _load_config(args)
    _emit_header("theta-eff")
    gain = _resolve_gain(args, cfg)
    _emit("input.gain", gain.g)
    _emit("input.gain_db", gain.db)
    theta = effective_phase_deviation(gain)
    deg = math.degrees(theta)
    _emit("output.theta_eff_rad", theta)
    _emit("output.theta_eff_deg", deg)
    print(f"summary: effective phase deviation {deg:.1f} deg "
          f"({deg:.3f} deg, {theta:.6f} rad)")
    return EXIT_OK


def cmd_required_gain(args):
    cfg = _load_config(args)
    _emit_header("required-gain")
    levels = _resolve_levels(args, cfg)
    _emit("input.tolerance_db", args.tolerance_db)
    db_step = None if args.continuous else args.db_step
    gain = required_gain(levels, digit_tolerance_db=args.tolerance_db,
                         db_step=db_step)
    _emit("output.gain", gain.g)
    _emit("output.gain_db", gain.db)
    print(f"summary: gain of {gain.db:.1f} dB (G = {gain.g:.1f}) reads the "
          f"squeezing within {args.tolerance_db} dB")
    return EXIT_OK


def cmd_fit_calibration(args):
    cfg = _load_config(args)
    _emit_header("fit-calibration")
    points = read_sweep(args.input)
    _emit("input.sweep", args.input)
    _emit("input.points", len(points))
    max_iter = args.max_iter if args.max_iter is not None else cfg.get("fit", "max_iter", 500)
    step_tol = args.step_tol if args.step_tol is not None else cfg.get("fit", "step_tol", 1e-10)
    result = fit(points, max_iter=max_iter, step_tol=step_tol)
    _emit("output.a_per_w", result.a_per_w)
    _emit("output.loss", result.loss)
    _emit("output.residual_rms_db", result.residual_rms_db)
    _emit("output.iterations", result.iterations)
    for i in range(2):
        for j in range(2):
            _emit(f"output.covariance.{i}{j}", float(result.covariance[i][j]))
    print(f"summary: a = {result.a_per_w:.3g} /W, loss = {100 * result.loss:.1f}%, "
          f"residual {result.residual_rms_db:.2f} dB rms")
    return EXIT_OK


def _parse_element(text):
    label, sep, value = text.rpartition(":")
    if not sep or not label:
        raise DomainError(f"element must be LABEL:TRANSMISSION, got {text!r}")
    try:
        return label, float(value)
    except ValueError:
        raise DomainError(f"transmission must be a number, got {value!r}") from None


def cmd_chain(args):
    _emit_header("chain")
    chain = LossChain(tuple(_parse_element(e) for e in args.element))
    for i, (label, t) in enumerate(chain.elements):
        _emit(f"input.element.{i}", f"{label}:{_fmt(t)}")
    eta = chain_efficiency(chain)
    _emit("output.efficiency", eta)
    _emit("output.loss", 1.0 - eta)
    print(f"summary: chain transmission {100 * eta:.0f}% "
          f"(loss {100 * (1 - eta):.1f}%)")
    return EXIT_OK


def cmd_simulate_lock(args):
    cfg = _load_config(args)
    seed = _seed_for(args, cfg)
    _emit_header("simulate-lock", seed=seed)
    levels = _resolve_levels(args, cfg)
    model = _resolve_dispersion(args, cfg)

    base = cfg.lockloop() if cfg.has("lockloop", "ki") else None
    def pick(flag, key, default):
        if flag is not None:
            return flag
        if base is not None:
            return getattr(base, key)
        return default
    if args.ki is None and base is None:
        raise DomainError("give --ki or a config with a [lockloop] section")
    loop = LockLoopConfig(
        ki=pick(args.ki, "ki", None),
        dt_s=pick(args.dt_s, "dt_s", 1e-5),
        target=pick(args.target, "target",
                    0.5 * (levels.r_minus + levels.r_plus)),
        lock_nm=pick(args.lock_nm, "lock_nm", 1545.0),
        noise_rms=pick(args.noise_rms, "noise_rms", 0.0),
        drift_rate=pick(args.drift_rate, "drift_rate", 0.0),
        max_steps=pick(args.max_steps, "max_steps", 2000),
        tolerance=pick(args.tolerance, "tolerance", None),
    )
    initial_phase = args.initial_phase if args.initial_phase is not None \
        else cfg.get("lockloop", "initial_phase", 0.0)
    for key in ("ki", "dt_s", "target", "lock_nm", "noise_rms", "drift_rate",
                "max_steps"):
        _emit(f"input.lockloop.{key}", getattr(loop, key))
    _emit("input.lockloop.initial_phase", initial_phase)
    result = run_lock(loop, model, levels, seed=seed, initial_phase=initial_phase)
    path = _output_path(args, cfg, "lock_trace.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("step,time_s,pd3,error,phi_actuated,phi_drift\n")
        for s in result.trace:
            fh.write(f"{s.step},{s.step * loop.dt_s:.12g},{s.pd3:.12g},"
                     f"{loop.target - s.pd3:.12g},{s.phi_actuated:.12g},"
                     f"{s.phi_drift:.12g}\n")
    _emit("output.trace", path)
    _emit("output.locked", result.locked)
    _emit("output.diverged", result.diverged)
    if result.settle_step is not None:
        _emit("output.settle_step", result.settle_step)
    _emit("output.steady_state_rms_error", result.steady_state_rms_error)
    _emit("output.tolerance", result.tolerance)
    if result.stability_factor is not None:
        _emit("output.stability_factor", result.stability_factor)
    state = "locked" if result.locked else ("diverged" if result.diverged else "not locked")
    print(f"summary: {state}, steady-state rms error "
          f"{result.steady_state_rms_error:.3g} over {len(result.trace) - 1} steps")
    return EXIT_OK


def cmd_replicate_paper(args):
    results = run_all()
    width = max(len(r.name) for r in results)
    print(f"tool.version = {__version__}")
    print("check  result  name")
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{r.check_id:>5}  {flag:6}  {r.name:<{width}}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"summary: {len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_DOMAIN


# ----------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="opachain",
        description="Phase-sensitive detection of broadband squeezed light "
                    "through cascaded parametric amplifiers: simulate, "
                    "correct, calibrate, and lock.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-spectrum",
                       help="synthesize a rippled spectrum trace CSV")
    _add_common(p)
    _add_levels_flags(p)
    _add_dispersion_flags(p)
    p.add_argument("--start-nm", type=float)
    p.add_argument("--stop-nm", type=float)
    p.add_argument("--step-nm", type=float)
    p.add_argument("--unit", choices=("ratio", "db"), default="ratio")
    p.add_argument("--output", help="trace CSV path")
    p.set_defaults(handler=cmd_simulate_spectrum)

    p = sub.add_parser("estimate-dispersion",
                       help="estimate |D| from a trace's ripple positions")
    _add_common(p)
    p.add_argument("--input", required=True, help="trace CSV path")
    p.add_argument("--f0-thz", type=float, help="center frequency, THz")
    p.add_argument("--smoothing-nm", type=float, default=0.1)
    p.set_defaults(handler=cmd_estimate_dispersion)

    p = sub.add_parser("design-dcf",
                       help="length of compensating fiber for a segment chain")
    p.add_argument("--segment", action="append", required=True,
                   metavar="LENGTH_M:D_PS_NM_PER_M",
                   help="fiber segment (repeatable)")
    p.add_argument("--dcf-rate", type=float, required=True,
                   help="compensating-fiber dispersion rate, ps/nm/m")
    p.add_argument("--target-residual", type=float, default=0.0,
                   help="residual dispersion to leave, ps/nm")
    p.set_defaults(handler=cmd_design_dcf)

    p = sub.add_parser("band",
                       help="frequency band where the phase stays in budget")
    _add_common(p)
    _add_dispersion_flags(p)
    _add_levels_flags(p)
    p.add_argument("--lock-nm", type=float, required=True)
    p.add_argument("--max-dev-rad", type=float,
                   help="phase budget; default: 1 dB degradation point")
    p.add_argument("--degrade-db", type=float, default=1.0)
    p.add_argument("--window-start-nm", type=float, default=1500.0)
    p.add_argument("--window-stop-nm", type=float, default=1590.0)
    p.set_defaults(handler=cmd_band)

    p = sub.add_parser("correct-squeezing",
                       help="invert a finite-gain squeezing measurement")
    _add_common(p)
    _add_gain_flags(p)
    p.add_argument("--r-minus-meas-db", type=float, required=True)
    p.add_argument("--r-plus-meas-db", type=float, required=True)
    p.set_defaults(handler=cmd_correct_squeezing)

    p = sub.add_parser("theta-eff",
                       help="effective phase deviation of a finite-gain readout")
    _add_common(p)
    _add_gain_flags(p)
    p.set_defaults(handler=cmd_theta_eff)

    p = sub.add_parser("required-gain",
                       help="smallest readout gain for a correct reading")
    _add_common(p)
    _add_levels_flags(p)
    p.add_argument("--tolerance-db", type=float, default=0.05)
    p.add_argument("--db-step", type=float, default=1.0,
                   help="gain quantization step in dB")
    p.add_argument("--continuous", action="store_true",
                   help="report the unquantized bisection bound")
    p.set_defaults(handler=cmd_required_gain)

    p = sub.add_parser("fit-calibration",
                       help="fit (a, L) to a pump-sweep CSV")
    _add_common(p)
    p.add_argument("--input", required=True,
                   help="CSV with header pump_w,r_minus_db,r_plus_db")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--step-tol", type=float)
    p.set_defaults(handler=cmd_fit_calibration)

    p = sub.add_parser("chain", help="total transmission of a loss chain")
    p.add_argument("--element", action="append", required=True,
                   metavar="LABEL:TRANSMISSION", help="chain element (repeatable)")
    p.set_defaults(handler=cmd_chain)

    p = sub.add_parser("simulate-lock",
                       help="run the integral phase-lock simulation")
    _add_common(p)
    _add_levels_flags(p)
    _add_dispersion_flags(p)
    p.add_argument("--ki", type=float, help="integrator gain magnitude")
    p.add_argument("--dt-s", type=float)
    p.add_argument("--target", type=float)
    p.add_argument("--lock-nm", type=float)
    p.add_argument("--noise-rms", type=float)
    p.add_argument("--drift-rate", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--initial-phase", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="lock trace CSV path")
    p.set_defaults(handler=cmd_simulate_lock)

    p = sub.add_parser("replicate-paper",
                       help="run the full reference scenario pass/fail table")
    p.set_defaults(handler=cmd_replicate_paper)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except OpaChainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
