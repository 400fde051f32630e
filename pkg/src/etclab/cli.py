"""Command-line front end: config parsing, subcommands, artifact emission.

Subcommands:

    masp      print the dwell-time ceiling for gains (--gamma, --L)
    design    run the constructive LTI design, emit a certificate JSON
    check     sampled certificate verification; exit 0 iff it passes
    simulate  one closed-loop run; states/events/R-monitor/plot CSVs
    batch     seeded batch of runs; summary JSON + events CSV

Exit codes: 0 success, 1 domain or validation error, 2 divergence.
Configs are JSON documents (schema documented in the README); the
environment variable ETC_LAB_SEED overrides the config seed.  Display
output rounds to 4 decimal digits; files carry full precision.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DivergenceError, DomainError, EtcLabError
from .hybrid import HybridSolution, SimSettings, r_monitor, simulate
from .lti import LmiCertificate, LtiController, LtiPlant, assemble, design_certificate, extract_assumption
from .model import HybridState
from .montecarlo import BatchSpec, emit_report, run_batch, sample_initial
from .systems import (
    TABUADA_A,
    TABUADA_B,
    TABUADA_K,
    builtin_loop,
    check_assumption_sampled,
    lti_loop_from_matrices,
)
from .trigger import TriggerConfig, ZetaParams, masp, zeta_time

SEED_ENV_VAR = "ETC_LAB_SEED"

_EXIT_OK = 0
_EXIT_INVALID = 1
_EXIT_DIVERGED = 2


def _fmt(v):
    return f"{v:.17g}"


def _display(v):
    return f"{v:.4f}"


@dataclass
class RunConfig:
    """Parsed configuration for simulate/batch/check/design."""

    system: dict
    certificate: object = "auto"
    trigger: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    batch: dict = field(default_factory=dict)
    initial: Optional[dict] = None
    zeta: Optional[dict] = None
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "system" not in d:
            raise ConfigError("config field 'system' is required")
        if "certificate" in d and not (
            d["certificate"] == "auto" or isinstance(d["certificate"], dict)
        ):
            raise ConfigError("config field 'certificate' must be \"auto\" or an object")
        return cls(**d)

    def to_dict(self):
        d = asdict(self)
        if d["initial"] is None:
            d.pop("initial")
        if d["zeta"] is None:
            d.pop("zeta")
        return d


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top-level config must be a JSON object")
    return RunConfig.from_dict(raw)


def emit_config(cfg: RunConfig, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
        fh.write("\n")


def _build_loop(cfg: RunConfig):
    """Resolve (system, certificate) from a config."""
    spec = cfg.system
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("config.system must be an object with a 'name' field")
    name = spec["name"]
    if name in ("lorenz", "lti-sf-tabuada"):
        if cfg.certificate != "auto":
            raise ConfigError(
                f"built-in system {name!r} carries its own certificate; "
                "set certificate to \"auto\""
            )
        return builtin_loop(name, **spec.get("params", {}))
    if name == "lti-custom":
        try:
            plant = LtiPlant(**spec["plant"])
            c = spec["controller"]
            if "A" in c:
                ctrl = LtiController(**c)
            else:
                ctrl = LtiController.static(c["D"])
        except KeyError as exc:
            raise ConfigError(f"config.system: missing field {exc}") from None
        clm = assemble(plant, ctrl)
        if cfg.certificate == "auto":
            eps = spec.get("design", {})
            cand = design_certificate(
                clm, eps1=eps.get("eps1", 1e-2), eps2=eps.get("eps2", 1e-2)
            )
        else:
            c = dict(cfg.certificate)
            try:
                cand = LmiCertificate(
                    P=np.asarray(c["P"], dtype=float),
                    eps1=float(c["eps1"]),
                    eps2=float(c["eps2"]),
                    mu=float(c["mu"]),
                )
            except KeyError as exc:
                raise ConfigError(f"config.certificate: missing field {exc}") from None
        cert = extract_assumption(clm, cand)
        return lti_loop_from_matrices(clm, name="lti-custom"), cert
    raise ConfigError(f"unknown system name {name!r}")


def _trigger_from(cfg: RunConfig) -> TriggerConfig:
    t = dict(cfg.trigger)
    if "mode" not in t:
        raise ConfigError("config.trigger: missing field 'mode'")
    mode = t.pop("mode")
    T = float(t.pop("T", 0.0))
    sigma = t.pop("sigma", None)
    if t:
        raise ConfigError(f"config.trigger: unknown fields {sorted(t)}")
    return TriggerConfig(mode=mode, T=T, sigma=sigma)


def _sim_from(cfg: RunConfig) -> SimSettings:
    known = {"step", "horizon_t", "max_jumps", "event_tol", "blowup_norm"}
    unknown = set(cfg.sim) - known
    if unknown:
        raise ConfigError(f"config.sim: unknown fields {sorted(unknown)}")
    return SimSettings(**cfg.sim)


def _seed_from(cfg: RunConfig) -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return int(cfg.batch.get("seed", 0))


def _batch_from(cfg: RunConfig, trigger, sim) -> BatchSpec:
    b = dict(cfg.batch)
    b.pop("seed", None)
    known = {"n_runs", "radius", "horizon_t"}
    unknown = set(b) - known
    if unknown:
        raise ConfigError(f"config.batch: unknown fields {sorted(unknown)}")
    return BatchSpec(
        n_runs=int(b.get("n_runs", 100)),
        radius=float(b.get("radius", 25.0)),
        horizon_t=float(b.get("horizon_t", sim.horizon_t)),
        seed=_seed_from(cfg),
        trigger=trigger,
        sim=sim,
    )


def emit_plot_data(sol: HybridSolution, path, t_ref) -> str:
    """Write stem-plot data: one row per gap, with the reference dwell time.

    Columns: event_index, t_j, gap, T_ref.  A solution without events
    produces a header-only file.
    """
    jump_times = sol.jump_times
    gaps = sol.inter_event_gaps
    offset = len(jump_times) - len(gaps)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_index", "t_j", "gap", "T_ref"])
        for i, gap in enumerate(gaps):
            writer.writerow(
                [i + 1, _fmt(jump_times[i + offset]), _fmt(gap), _fmt(t_ref)]
            )
    return path


def _write_states_csv(sol: HybridSolution, path, n_x, n_e):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t", "j"]
            + [f"x{i}" for i in range(n_x)]
            + [f"e{i}" for i in range(n_e)]
            + ["tau"]
        )
        for seg in sol.segments:
            for i in range(seg.t.size):
                writer.writerow(
                    [_fmt(seg.t[i]), seg.j]
                    + [_fmt(v) for v in seg.x[i]]
                    + [_fmt(v) for v in seg.e[i]]
                    + [_fmt(seg.tau[i])]
                )


def _write_rmon_csv(samples, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "j", "R"])
        for t, j, r in samples:
            writer.writerow([_fmt(t), j, _fmt(r)])


def _cmd_masp(args):
    value = masp(args.gamma, args.L)
    print("inf" if value == float("inf") else _display(value))
    return _EXIT_OK


def _cmd_design(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig(system={"name": args.system or "lti-sf-tabuada"})
    sysname = cfg.system.get("name", "lti-sf-tabuada")
    if sysname == "lti-custom":
        plant = LtiPlant(**cfg.system["plant"])
        c = cfg.system["controller"]
        ctrl = LtiController(**c) if "A" in c else LtiController.static(c["D"])
    elif sysname == "lti-sf-tabuada":
        plant = LtiPlant(A=TABUADA_A, B=TABUADA_B, C=np.eye(2))
        ctrl = LtiController.static(TABUADA_K)
    else:
        raise ConfigError(f"design expects an LTI system, got {sysname!r}")
    clm = assemble(plant, ctrl)
    cand = design_certificate(clm, eps1=args.eps1, eps2=args.eps2)
    cert = extract_assumption(clm, cand)
    doc = {
        "P": [[float(v) for v in row] for row in cand.P],
        "eps1": cand.eps1,
        "eps2": cand.eps2,
        "mu": cand.mu,
        "gamma": cert.gamma,
        "L": cert.L,
        "T_max": masp(cert.gamma, cert.L),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(
        f"gamma = {_display(cert.gamma)}, L = {_display(cert.L)}, "
        f"T_max = {_display(doc['T_max'])}",
        file=sys.stderr,
    )
    return _EXIT_OK


def _cmd_check(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig(system={"name": args.system})
    loop, cert = _build_loop(cfg)
    report = check_assumption_sampled(
        loop, cert, n_samples=args.samples, radius=args.radius, seed=args.seed
    )
    print(report.summary())
    print("PASS" if report.passed else "FAIL")
    return _EXIT_OK if report.passed else _EXIT_INVALID


def _resolve_initial(cfg: RunConfig, loop, batch_spec):
    if cfg.initial is not None:
        try:
            x = np.asarray(cfg.initial["x"], dtype=float)
            e = np.asarray(cfg.initial["e"], dtype=float)
        except KeyError as exc:
            raise ConfigError(f"config.initial: missing field {exc}") from None
        return HybridState(x, e, 0.0)
    return sample_initial(batch_spec, 0, loop.n_x, loop.n_e)


def _cmd_simulate(args):
    if args.config:
        cfg = load_config(args.config)
    elif args.system:
        cfg = RunConfig(system={"name": args.system})
    else:
        raise ConfigError("simulate requires --config or --system")
    if args.T is not None:
        cfg.trigger = {**cfg.trigger, "T": args.T}
    if args.mode is not None:
        cfg.trigger = {**cfg.trigger, "mode": args.mode}
    if args.sigma is not None:
        cfg.trigger = {**cfg.trigger, "sigma": args.sigma}
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir

    loop, cert = _build_loop(cfg)
    trigger = _trigger_from(cfg)
    trigger.validate_against(cert)  # fail before any integration
    sim = _sim_from(cfg)
    batch_spec = _batch_from(cfg, trigger, sim)
    q0 = _resolve_initial(cfg, loop, batch_spec)

    sol = simulate(loop, cert, trigger, q0, sim)

    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    _write_states_csv(sol, os.path.join(outdir, "states.csv"), loop.n_x, loop.n_e)
    with open(os.path.join(outdir, "events.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "j", "t_j", "gap"])
        offset = len(sol.jump_times) - len(sol.inter_event_gaps)
        for i, gap in enumerate(sol.inter_event_gaps):
            writer.writerow([0, i + 1 + offset, _fmt(sol.jump_times[i + offset]), _fmt(gap)])
    emit_plot_data(sol, os.path.join(outdir, "plot.csv"), trigger.T)

    zeta = cfg.zeta or {"theta": 0.01, "eta": 0.01}
    zp = ZetaParams(theta=float(zeta["theta"]), eta=float(zeta["eta"]))
    rmon_path = os.path.join(outdir, "rmonitor.csv")
    if trigger.T < zeta_time(cert.gamma, cert.L, zp):
        _write_rmon_csv(r_monitor(sol, cert, zp), rmon_path)
    else:
        _write_rmon_csv([], rmon_path)
        print(
            "warning: dwell time is not below the zeta transit time; "
            "R-monitor output is empty",
            file=sys.stderr,
        )

    gaps = sol.inter_event_gaps
    print(f"jumps: {sol.n_jumps}, terminated: {sol.terminated}")
    if gaps:
        print(
            f"gap min/avg/max: {_display(min(gaps))}/"
            f"{_display(float(np.mean(gaps)))}/{_display(max(gaps))}"
        )
    return _EXIT_OK


def _cmd_batch(args):
    cfg = load_config(args.config)
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.runs is not None:
        cfg.batch = {**cfg.batch, "n_runs": args.runs}
    loop, cert = _build_loop(cfg)
    trigger = _trigger_from(cfg)
    trigger.validate_against(cert)
    sim = _sim_from(cfg)
    spec = _batch_from(cfg, trigger, sim)
    report = run_batch(loop, cert, spec, n_workers=args.workers)
    summary_path, events_path = emit_report(report, cfg.output_dir)
    tau_min = "n/a" if report.tau_min is None else _display(report.tau_min)
    tau_avg = "n/a" if report.tau_avg is None else _display(report.tau_avg)
    print(
        f"runs: {report.n_runs}, events: {report.n_events_total}, "
        f"tau_min: {tau_min}, tau_avg: {tau_avg}, failures: {len(report.failures)}"
    )
    print(f"wrote {summary_path} and {events_path}")
    return _EXIT_DIVERGED if report.failures else _EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="etclab",
        description="Event-triggered control with an enforced minimum "
        "inter-transmission time: design, certification, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("masp", help="print the dwell-time ceiling for (gamma, L)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.set_defaults(func=_cmd_masp)

    p = sub.add_parser("design", help="constructive LTI certificate design")
    p.add_argument("--config")
    p.add_argument("--system", default="lti-sf-tabuada")
    p.add_argument("--eps1", type=float, default=1e-2)
    p.add_argument("--eps2", type=float, default=1e-2)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("check", help="sampled certificate verification")
    p.add_argument("--config")
    p.add_argument("--system", default="lti-sf-tabuada")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--radius", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="simulate one closed-loop run")
    p.add_argument("--config")
    p.add_argument("--system")
    p.add_argument("--T", type=float)
    p.add_argument("--mode")
    p.add_argument("--sigma", type=float)
    p.add_argument("--output-dir")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("batch", help="run a seeded batch and emit its report")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.add_argument("--runs", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_batch)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return _EXIT_INVALID if exc.code else _EXIT_OK
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return _EXIT_DIVERGED
    except (ConfigError, DomainError, EtcLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INVALID


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
