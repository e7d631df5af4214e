"""Experiment front-end: config files, power fairness, sweeps and validation.

Run ``python -m risnoma --help`` (or the ``risnoma`` console script).

Config files are INI-style with the sections ``topology``, ``power_alloc``,
``hardware``, ``sic``, ``ris``, ``link``, ``power_model`` and ``sweep``; see
``configs/default_scenario.ini`` for an annotated example. Physical quantities
carry their unit in the key name (``_m``, ``_db``, ``_mw``, ``_dbm``).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import analysis, montecarlo
from .channel import (
    FULL_PRECISION,
    HardwareProfile,
    LinkBudget,
    PowerAllocation,
    RisConfig,
    RisMode,
    SicModel,
    SystemConfig,
    Topology,
    lambda_q_of_bits,
    path_gain,
)
from .numerics import NumericalError, gauss_laguerre

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2

REGIMES = ("ARIS-ipSIC", "ARIS-pSIC", "PRIS-ipSIC", "PRIS-pSIC")
AXES = ("snr_db", "m", "bits", "beta")
SWEEP_COLUMNS = (
    "axis_value",
    "user",
    "regime",
    "op_analytic",
    "op_asymptotic",
    "op_mc",
    "mc_std_err",
    "throughput",
)
VALIDATE_COLUMNS = ("user", "regime", "op_analytic", "op_mc", "mc_std_err", "rel_error", "verdict")

# MC-vs-analytic tolerance policy
REL_TOL = 0.15
REL_WINDOW = (1e-3, 0.5)
ABS_SIGMAS = 3.0


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def sig10(x: float) -> float:
    """Round to the 10 significant digits written to CSV."""
    return float(f"{x:.10g}")


# ---------------------------------------------------------------------------
# total-power fairness


@dataclass(frozen=True)
class PowerModel:
    """Power accounting for the equal-total-power comparison (all in mW)."""

    p_sw_mw: float = 0.1
    p_dc_mw: float = 0.316
    p_total_mw: float = 1000.0
    n0_mw: float = 1.0

    def __post_init__(self):
        for name in ("p_sw_mw", "p_dc_mw", "p_total_mw"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not self.n0_mw > 0:
            raise ConfigError("n0_mw must be > 0")


def fair_transmit_powers(
    p_total: float, m: int, beta: float, gain_sr: float, n_r: float, p_sw: float, p_dc: float
) -> tuple[float, float]:
    """BS transmit powers ``(P_s_act, P_s_pas)`` that spend the same total ``p_total``.

    The ARIS output power is modeled as ``(beta^2 - 1) M (gain_sr P_s + n_r)``,
    i.e. the power the amplifiers add to the incident signal and noise.
    """
    p_pas = p_total - m * p_sw
    if not p_pas > 0:
        raise ConfigError(f"budget {p_total} mW does not cover PRIS switching power M*P_SW = {m * p_sw} mW")
    amp = (beta**2 - 1.0) * m
    p_act = (p_total - amp * n_r - m * (p_sw + p_dc)) / (1.0 + amp * gain_sr)
    if not p_act > 0:
        raise ConfigError(
            f"budget {p_total} mW does not cover ARIS overhead "
            f"M*(P_SW+P_DC) + (beta^2-1)*M*N_r = {m * (p_sw + p_dc) + amp * n_r} mW"
        )
    return p_act, p_pas


def solve_power_fairness(power_model: PowerModel, config: SystemConfig, beta: float | None = None):
    """Transmit powers in mW for ARIS and PRIS under equal total consumption.

    ``beta`` defaults to the config's amplification factor; ``N_r`` is taken
    from the config (in ``N0`` units) and converted with ``power_model.n0_mw``.
    """
    beta = config.ris.beta if beta is None else beta
    return fair_transmit_powers(
        power_model.p_total_mw,
        config.ris.m_elements,
        beta,
        path_gain(config.topology.d_sr, config.topology.alpha),
        config.ris.n_r * power_model.n0_mw,
        power_model.p_sw_mw,
        power_model.p_dc_mw,
    )


# ---------------------------------------------------------------------------
# config files


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    base: SystemConfig
    active_ris: RisConfig
    regimes: tuple[str, ...] = REGIMES
    mc_trials: int = 0
    seed: int = 1
    quadrature_order: int = analysis.DEFAULT_ORDER
    equal_power: bool = False
    power_model: PowerModel = field(default_factory=PowerModel)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; choose from {AXES}")
        if not self.values:
            raise ConfigError("sweep needs at least one axis value")
        bad = [r for r in self.regimes if r not in REGIMES]
        if bad:
            raise ConfigError(f"unknown regimes {bad}; choose from {REGIMES}")
        if self.mc_trials < 0:
            raise ConfigError("mc_trials must be >= 0")
        for v in self.values:
            if self.axis == "m" and (v != int(v) or v < 1):
                raise ConfigError(f"M values must be positive integers, got {v}")
            if self.axis == "bits" and v != FULL_PRECISION and (v != int(v) or v < 1):
                raise ConfigError(f"bit values must be positive integers or 'full', got {v}")
            if self.axis == "beta" and v < 1:
                raise ConfigError(f"beta values must be >= 1, got {v}")


@dataclass(frozen=True)
class Experiment:
    system: SystemConfig
    active_ris: RisConfig
    power_model: PowerModel
    equal_power: bool
    sweep: SweepSpec | None


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _points(text: str) -> tuple[tuple[float, float], ...]:
    pts = []
    for chunk in text.split(";"):
        xy = _floats(chunk)
        if len(xy) != 2:
            raise ConfigError(f"expected 'x y' coordinate pairs separated by ';', got {chunk!r}")
        pts.append(xy)
    return tuple(pts)


def _bits(text: str):
    text = text.strip().lower()
    if text in ("full", "inf", "full_precision"):
        return FULL_PRECISION
    return int(text)


def _values(text: str, axis: str) -> tuple[float, ...]:
    """``start:stop:step`` (inclusive stop) or an explicit list."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ConfigError("range step must be > 0")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(sig10(start + i * step) for i in range(n))
    if axis == "bits":
        return tuple(_bits(x) for x in text.replace(",", " ").split())
    return _floats(text)


def parse_config(text: str) -> Experiment:
    """Build an :class:`Experiment` from INI text."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
        top = cp["topology"]
        topology = Topology(
            bs_pos=_floats(top["bs_pos_m"]),
            ris_pos=_floats(top["ris_pos_m"]),
            user_pos=_points(top["user_pos_m"]),
            alpha=top.getfloat("path_loss_exponent", 2.2),
        )
        k = topology.n_users
        power_alloc = PowerAllocation(_floats(cp["power_alloc"]["a"]))
        hw = cp["hardware"]
        kappa_r = _floats(hw.get("kappa_r", "0"))
        if len(kappa_r) == 1:
            kappa_r = kappa_r * k
        hardware = HardwareProfile(
            kappa_t_bs=hw.getfloat("kappa_t_bs", 0.0),
            kappa_r=kappa_r,
            adc_bits=_bits(hw.get("adc_bits", "full")),
        )
        sic_s = cp["sic"]
        sic = SicModel(epsilon=sic_s.getfloat("epsilon", 0.0), omega_i=sic_s.getfloat("omega_i", 1.0))
        ris_s = cp["ris"]
        m = ris_s.getint("m_elements", 10)
        active_ris = RisConfig(RisMode.ACTIVE, m, ris_s.getfloat("beta", 7.0), ris_s.getfloat("n_r_n0", 1.0))
        mode = RisMode(ris_s.get("mode", "active").strip().lower())
        ris = active_ris if mode is RisMode.ACTIVE else RisConfig.passive(m)
        link_s = cp["link"]
        rates = _floats(link_s.get("rates_bpcu", "0.15"))
        if len(rates) == 1:
            rates = rates * k
        link = LinkBudget.from_db(link_s.getfloat("snr_db", 30.0), rates)
        system = SystemConfig(topology, power_alloc, hardware, sic, ris, link)

        pm_s = cp["power_model"] if cp.has_section("power_model") else {}
        power_model = PowerModel(
            p_sw_mw=float(pm_s.get("p_sw_mw", 0.1)),
            p_dc_mw=float(pm_s.get("p_dc_mw", 0.316)),
            n0_mw=10.0 ** (float(pm_s.get("n0_dbm", 0.0)) / 10.0),
        )
        comparison = str(pm_s.get("comparison", "equal_snr")).strip().lower()
        if comparison not in ("equal_snr", "equal_power"):
            raise ConfigError(f"power_model.comparison must be equal_snr or equal_power, got {comparison!r}")
        equal_power = comparison == "equal_power"

        sweep = None
        if cp.has_section("sweep"):
            sw = cp["sweep"]
            axis = sw.get("axis", "snr_db").strip().lower()
            regimes = tuple(r.strip() for r in sw.get("regimes", ",".join(REGIMES)).split(",") if r.strip())
            sweep = SweepSpec(
                axis=axis,
                values=_values(sw["values"], axis),
                base=system,
                active_ris=active_ris,
                regimes=regimes,
                mc_trials=sw.getint("mc_trials", 0),
                seed=sw.getint("seed", 1),
                quadrature_order=sw.getint("quadrature_order", analysis.DEFAULT_ORDER),
                equal_power=equal_power,
                power_model=power_model,
            )
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError, configparser.Error) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return Experiment(system, active_ris, power_model, equal_power, sweep)


def load_config(path: str) -> Experiment:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# regimes, sweeps and validation


def regime_config(
    base: SystemConfig,
    regime: str,
    active_ris: RisConfig,
    epsilon: float | None = None,
    equal_power: PowerModel | None = None,
) -> SystemConfig:
    """Specialize ``base`` to one of :data:`REGIMES`.

    ``ipSIC`` keeps ``epsilon`` (or the base value); ``pSIC`` sets it to 0.
    With ``equal_power`` the base SNR is read as the total budget
    ``P_T / N0`` and each surface gets its own fair transmit SNR.
    """
    system, sic = regime.split("-")
    eps = base.sic.epsilon if epsilon is None else epsilon
    cfg = base.with_epsilon(eps if sic == "ipSIC" else 0.0)
    m = base.ris.m_elements
    if system == "ARIS":
        cfg = cfg.replace(ris=replace(active_ris, m_elements=m))
    else:
        cfg = cfg.as_passive()
    if equal_power is not None:
        pm = replace(equal_power, p_total_mw=base.link.rho_s * equal_power.n0_mw)
        ref = base.replace(ris=replace(active_ris, m_elements=m))
        p_act, p_pas = solve_power_fairness(pm, ref)
        p_s = p_act if system == "ARIS" else p_pas
        cfg = cfg.replace(link=replace(cfg.link, rho_s=p_s / pm.n0_mw))
    return cfg


def _apply_axis(spec: SweepSpec, value) -> tuple[SystemConfig, RisConfig]:
    base, active = spec.base, spec.active_ris
    if spec.axis == "snr_db":
        base = base.with_snr_db(value)
    elif spec.axis == "m":
        base = base.with_elements(int(value))
        active = replace(active, m_elements=int(value))
    elif spec.axis == "bits":
        base = base.with_bits(value if value == FULL_PRECISION else int(value))
    elif spec.axis == "beta":
        active = replace(active, beta=float(value))
        if base.ris.mode is RisMode.ACTIVE:
            base = base.replace(ris=active)
    return base, active


def _fmt_axis(value) -> str:
    return "full" if value == FULL_PRECISION else f"{value:.10g}"


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """One row per (axis value, user, regime), in that order."""
    rule = gauss_laguerre(spec.quadrature_order)
    rows = []
    for value in spec.values:
        try:
            base, active = _apply_axis(spec, value)
            cfgs = [
                regime_config(base, r, active, equal_power=spec.power_model if spec.equal_power else None)
                for r in spec.regimes
            ]
            mc = (
                montecarlo.estimate_op_many(cfgs, spec.mc_trials, spec.seed, workers)
                if spec.mc_trials
                else [None] * len(cfgs)
            )
            for k in range(1, base.n_users + 1):
                for regime, cfg, est in zip(spec.regimes, cfgs, mc):
                    a = analysis.op_analytic(cfg, k, rule).op
                    asym = analysis.op_asymptotic(cfg, k, rule).op
                    rows.append(
                        {
                            "axis_value": _fmt_axis(value),
                            "user": k,
                            "regime": regime,
                            "op_analytic": sig10(a),
                            "op_asymptotic": sig10(asym),
                            "op_mc": None if est is None else sig10(est.op_hat[k - 1]),
                            "mc_std_err": None if est is None else sig10(est.std_err[k - 1]),
                            "throughput": sig10(analysis.throughput(a, cfg.link.rates[k - 1])),
                        }
                    )
        except (ValueError, ArithmeticError, NumericalError) as exc:
            raise ConfigError(f"sweep aborted at {spec.axis}={_fmt_axis(value)}: {exc}") from exc
    return rows


def judge(op_analytic: float, op_mc: float, std_err: float, trials: int) -> tuple[float | None, bool]:
    """Apply the tolerance policy; returns ``(relative error, passed)``.

    Inside ``[1e-3, 0.5]`` the relative error must be <= 15 %. Elsewhere the
    absolute gap must be within 3 binomial standard errors, using the larger
    of the empirical and the analytic-implied standard error.
    """
    rel = (op_mc - op_analytic) / op_analytic if op_analytic > 0 else None
    lo, hi = REL_WINDOW
    if lo <= op_analytic <= hi:
        return rel, abs(rel) <= REL_TOL
    se = max(std_err, math.sqrt(op_analytic * (1.0 - op_analytic) / trials))
    return rel, abs(op_mc - op_analytic) <= ABS_SIGMAS * se


def validate(
    config: SystemConfig,
    trials: int,
    seed: int = 1,
    active_ris: RisConfig | None = None,
    workers: int = 1,
    rule=None,
) -> tuple[list[dict], bool]:
    """Cross-check closed forms against simulation for every user and regime.

    ipSIC rows use the config's ``epsilon`` and are skipped when it is 0.
    """
    if active_ris is None:
        if config.ris.mode is not RisMode.ACTIVE:
            raise ConfigError("a passive base config needs explicit ARIS parameters")
        active_ris = config.ris
    regimes = [r for r in REGIMES if config.sic.epsilon > 0 or r.endswith("-pSIC")]
    cfgs = [regime_config(config, r, active_ris) for r in regimes]
    ests = montecarlo.estimate_op_many(cfgs, trials, seed, workers)
    rows, ok = [], True
    for k in range(1, config.n_users + 1):
        for regime, cfg, est in zip(regimes, cfgs, ests):
            a = analysis.op_analytic(cfg, k, rule).op
            rel, passed = judge(a, est.op_hat[k - 1], est.std_err[k - 1], trials)
            ok &= passed
            rows.append(
                {
                    "user": k,
                    "regime": regime,
                    "op_analytic": sig10(a),
                    "op_mc": sig10(est.op_hat[k - 1]),
                    "mc_std_err": sig10(est.std_err[k - 1]),
                    "rel_error": None if rel is None else sig10(rel),
                    "verdict": "PASS" if passed else "FAIL",
                }
            )
    return rows, ok


# ---------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def from_csv(text: str) -> list[dict]:
    """Inverse of :func:`to_csv` (numbers parsed back to int/float)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for rec in reader:
        row = {c: _parse_cell(v) for c, v in zip(header, rec)}
        # axis values like "30" stay strings in memory
        if "axis_value" in row:
            row["axis_value"] = rec[header.index("axis_value")]
        rows.append(row)
    return rows


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risnoma", description="Quantized ARIS/PRIS-NOMA outage analysis")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--config", required=True, help="INI experiment file")
    mc.add_argument("--seed", type=int)
    mc.add_argument("--trials", type=int)
    mc.add_argument("--workers", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common, mc], help="evaluate OP/throughput along one axis")
    sub.add_parser("validate", parents=[common, mc], help="Monte Carlo vs closed-form cross-check")
    glq = sub.add_parser("glq-table", parents=[common], help="dump a Gauss-Laguerre rule")
    glq.add_argument("--order", type=int, default=analysis.DEFAULT_ORDER)
    lq = sub.add_parser("lambda-q", parents=[common], help="dump ADC distortion factors")
    lq.add_argument("--max-bits", type=int, default=12)
    return p


def _cmd_sweep(args) -> int:
    exp = load_config(args.config)
    if exp.sweep is None:
        raise ConfigError("config has no [sweep] section")
    spec = exp.sweep
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.trials is not None:
        spec = replace(spec, mc_trials=args.trials)
    rows = run_sweep(spec, workers=args.workers)
    if args.format == "csv":
        _emit(to_csv(rows, SWEEP_COLUMNS), args.out)
    else:
        _emit(to_json({"axis": spec.axis, "seed": spec.seed, "mc_trials": spec.mc_trials, "rows": rows}), args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    exp = load_config(args.config)
    seed = 1 if args.seed is None else args.seed
    trials = args.trials or 1_000_000
    rows, ok = validate(exp.system, trials, seed, exp.active_ris, args.workers)
    if args.format == "csv":
        _emit(to_csv(rows, VALIDATE_COLUMNS), args.out)
    else:
        _emit(to_json({"seed": seed, "trials": trials, "passed": ok, "rows": rows}), args.out)
    for row in rows:
        if row["verdict"] == "FAIL":
            log.warning("FAIL user %s %s: analytic %s vs mc %s", row["user"], row["regime"], row["op_analytic"], row["op_mc"])
    return EXIT_OK if ok else EXIT_VALIDATION_FAILED


def _cmd_glq(args) -> int:
    rule = gauss_laguerre(args.order)
    rows = [{"p": i + 1, "node": x, "weight": w} for i, (x, w) in enumerate(zip(rule.nodes, rule.weights))]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("p", "node", "weight"))
        for r in rows:
            w.writerow((r["p"], repr(r["node"]), repr(r["weight"])))
        _emit(buf.getvalue(), args.out)
    else:
        _emit(to_json({"order": rule.order, "rows": rows}), args.out)
    return EXIT_OK


def _cmd_lambda_q(args) -> int:
    bits: list = list(range(1, args.max_bits + 1)) + [FULL_PRECISION]
    rows = [{"bits": _fmt_axis(b), "lambda_q": sig10(lambda_q_of_bits(b))} for b in bits]
    if args.format == "csv":
        _emit(to_csv(rows, ("bits", "lambda_q")), args.out)
    else:
        _emit(to_json({"rows": rows}), args.out)
    return EXIT_OK


def main(argv: Iterable[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    args = _build_parser().parse_args(None if argv is None else list(argv))
    handlers = {"sweep": _cmd_sweep, "validate": _cmd_validate, "glq-table": _cmd_glq, "lambda-q": _cmd_lambda_q}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG_ERROR
