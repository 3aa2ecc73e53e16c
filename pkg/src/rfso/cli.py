"""
Command-line front end: ``rfso sweep | select | validate``.

Configuration files are INI-style with dotted section names::

    [scenario]      p_a_dBW, gamma_th_dB, relay_antennas, pu_antennas,
                    quadrature_fallback
    [ostbc]         tx_antennas, rate, block_symbols, noise_power
    [users.K]       max_power_dBW, m_sr, var_sr, m_sp, var_sp   (K = 1, 2, ...)
    [fso]           detection (imdd | heterodyne), avg_snr_dB
    [fso.malaga]    kind (malaga | gamma_gamma | k_distribution), alpha, beta,
                    then xi, omega_prime[, rho]  or  b0, rho, omega[, phase_diff]
    [fso.pointing]  zeta, and a0  or  aperture_radius, beam_waist
    [sweep]         variable, start, stop, step, trials, format, output
    [mc]            seed, workers
    [variants.NAME] per-user overrides as comma lists, e.g. var_sr = 1, 2, 1

Unknown sections or keys are rejected. Powers are in dBW and SNRs in dB
here; everything past :func:`parse_config` is linear.
"""

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from typing import NamedTuple

import numpy as np

from . import fso as fsomod
from .errors import ConfigError, NumericalError, RfsoError
from .montecarlo import (
    RngConfig,
    draw,
    sample_fso_snr,
    sample_malaga,
    sample_metrics,
    sample_relay_snr,
    sample_rf_gain,
    simulate_outage,
    simulate_selection,
)
from .outage import (
    ScenarioConfig,
    end_to_end_outage,
    floor_pa_infinity,
    floor_rd_infinity,
)
from .rflink import (
    OstbcParams,
    RfLinkParams,
    SuTxProfile,
    beta_star_cdf,
    gain_cdf,
    snr_star_cdf,
    zeta_cdf,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PRESETS = ("fig2a", "fig2b", "fig2c")
SWEEP_VARIABLES = ("p_a_dBW", "avg_snr_dB", "gamma_th_dB")
CSV_COLUMNS = ("swept_value_dB", "analytic_outage", "mc_outage", "mc_stderr",
               "floor_rd_inf", "floor_pa_inf", "error")
DETECTION = {"heterodyne": 1, "imdd": 2}


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _float(v):
    return float(Fraction(v.strip())) if "/" in v else float(v)


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _bool(v):
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{v!r} is not a boolean")


def _floats(v):
    return [_float(x) for x in v.split(",")]


USER_KEYS = {"max_power_dBW": _float, "m_sr": _float, "var_sr": _float,
             "m_sp": _float, "var_sp": _float}

SCHEMA = {
    "scenario": {"p_a_dBW": _float, "gamma_th_dB": _float, "relay_antennas": _int,
                 "pu_antennas": _int, "quadrature_fallback": _bool},
    "ostbc": {"tx_antennas": _int, "rate": _float, "block_symbols": _int,
              "noise_power": _float},
    "fso": {"detection": str, "avg_snr_dB": _float},
    "fso.malaga": {"kind": str, "alpha": _float, "beta": _int, "xi": _float,
                   "omega_prime": _float, "rho": _float, "b0": _float,
                   "omega": _float, "phase_diff": _float},
    "fso.pointing": {"zeta": _float, "a0": _float, "aperture_radius": _float,
                     "beam_waist": _float},
    "sweep": {"variable": str, "start": _float, "stop": _float, "step": _float,
              "trials": _int, "format": str, "output": str},
    "mc": {"seed": _int, "workers": _int},
}

DEFAULTS = {
    "scenario": {"quadrature_fallback": False},
    "ostbc": {"block_symbols": 1, "noise_power": 1.0},
    "fso": {"detection": "imdd"},
    "fso.malaga": {"kind": "malaga"},
    "sweep": {"variable": "p_a_dBW", "start": 0.0, "stop": 30.0, "step": 5.0,
              "trials": 0, "format": "csv"},
    "mc": {"seed": 0, "workers": 1},
}

REQUIRED = {
    "scenario": ("p_a_dBW", "gamma_th_dB", "relay_antennas", "pu_antennas"),
    "ostbc": ("tx_antennas", "rate"),
    "fso": ("avg_snr_dB",),
    "fso.malaga": ("alpha", "beta"),
    "fso.pointing": ("zeta",),
}


@dataclass(frozen=True)
class SweepSpec:
    """Grid of one swept quantity in dB, MC trials per point and output."""

    variable: str = "p_a_dBW"
    start: float = 0.0
    stop: float = 30.0
    step: float = 5.0
    trials: int = 0
    output: str = None
    format: str = "csv"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError("sweep.variable", f"must be one of {SWEEP_VARIABLES}")
        if not self.start <= self.stop:
            raise ConfigError("sweep.start", "start must not exceed stop")
        if not self.step > 0:
            raise ConfigError("sweep.step", "step must be positive")
        if self.trials < 0:
            raise ConfigError("sweep.trials", "trials must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError("sweep.format", "must be csv or json")

    def grid(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(n)]


class ParsedConfig(NamedTuple):
    scenario: ScenarioConfig
    sweep: SweepSpec
    seed: int
    workers: int
    variants: dict
    resolved: dict


def _section_schema(name):
    if name in SCHEMA:
        return SCHEMA[name]
    if re.fullmatch(r"users\.\d+", name):
        return USER_KEYS
    if re.fullmatch(r"variants\.[A-Za-z0-9_\-]+", name):
        return {k: _floats for k in USER_KEYS}
    return None


def _read_sections(text):
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", f"malformed file: {exc}") from None
    out = {}
    for name in parser.sections():
        schema = _section_schema(name)
        if schema is None:
            raise ConfigError(name, "unknown section")
        values = dict(DEFAULTS.get(name, {}))
        for key, raw in parser.items(name):
            if key not in schema:
                raise ConfigError(f"{name}.{key}", "unknown key")
            try:
                values[key] = schema[key](raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"{name}.{key}", f"invalid value {raw!r} ({exc})") from None
        out[name] = values
    for name, keys in REQUIRED.items():
        if name not in out:
            raise ConfigError(name, "missing section")
        for key in keys:
            if key not in out[name]:
                raise ConfigError(f"{name}.{key}", "missing key")
    for name in ("sweep", "mc"):
        out.setdefault(name, dict(DEFAULTS[name]))
    return out


def _build_malaga(sec):
    kind = sec["kind"]
    alpha, beta = sec["alpha"], sec["beta"]
    if kind in ("gamma_gamma", "k_distribution"):
        return fsomod.special_case_params(kind, alpha, beta, sec.get("xi"))
    if kind != "malaga":
        raise ConfigError("fso.malaga.kind", f"unknown kind {kind!r}")
    if "xi" in sec or "omega_prime" in sec:
        for key in ("xi", "omega_prime"):
            if key not in sec:
                raise ConfigError(f"fso.malaga.{key}", "missing key")
        if "rho" in sec and not 0 <= sec["rho"] <= 1:
            raise ConfigError("fso.malaga.rho", f"must lie in [0, 1], got {sec['rho']}")
        return fsomod.MalagaParams(alpha, beta, sec["xi"], sec["omega_prime"], rho=sec.get("rho"))
    for key in ("b0", "rho", "omega"):
        if key not in sec:
            raise ConfigError(f"fso.malaga.{key}", "missing key (give xi and omega_prime, "
                              "or b0, rho and omega)")
    if not 0 <= sec["rho"] <= 1:
        raise ConfigError("fso.malaga.rho", f"must lie in [0, 1], got {sec['rho']}")
    return fsomod.derive_malaga_constants(alpha, beta, sec["b0"], sec["rho"], sec["omega"],
                                          sec.get("phase_diff", 0.0))


def _build_pointing(sec):
    if "aperture_radius" in sec or "beam_waist" in sec:
        if "a0" in sec:
            raise ConfigError("fso.pointing.a0", "give a0 or the aperture geometry, not both")
        return fsomod.PointingParams.from_geometry(
            sec["zeta"], sec.get("aperture_radius", 0.0), sec.get("beam_waist", 0.0))
    return fsomod.PointingParams(sec["zeta"], sec.get("a0", 1.0))


def _build_user(u, scen, ns):
    return SuTxProfile(
        RfLinkParams(u["m_sr"], u["var_sr"], ns, scen["relay_antennas"]),
        RfLinkParams(u["m_sp"], u["var_sp"], ns, scen["pu_antennas"]),
        db_to_linear(u["max_power_dBW"]),
    )


# scenario-level validation fields and the config keys they come from
_SCENARIO_FIELDS = {"p_a": "scenario.p_a_dBW", "gamma_th": "scenario.gamma_th_dB"}


def _wrap(field_prefix, fn, *args):
    try:
        return fn(*args)
    except ConfigError as exc:
        if exc.field.startswith((field_prefix, "users.")):
            raise
        name = _SCENARIO_FIELDS.get(exc.field, f"{field_prefix}.{exc.field}")
        raise ConfigError(name, str(exc).split(": ", 1)[1]) from None


def scenario_from_sections(sec):
    """Build the scenario, sweep and variants from parsed section dicts."""
    scen, ost = sec["scenario"], sec["ostbc"]
    ns = ost["tx_antennas"]
    user_names = sorted((n for n in sec if n.startswith("users.")),
                        key=lambda n: int(n.split(".")[1]))
    if not user_names:
        raise ConfigError("users", "at least one [users.K] section is required")
    if [int(n.split(".")[1]) for n in user_names] != list(range(1, len(user_names) + 1)):
        raise ConfigError("users", "user sections must be numbered 1..K")
    profiles = []
    for name in user_names:
        missing = [k for k in USER_KEYS if k not in sec[name]]
        if missing:
            raise ConfigError(f"{name}.{missing[0]}", "missing key")
        profiles.append(_wrap(name, _build_user, sec[name], scen, ns))

    ostbc = _wrap("ostbc", OstbcParams, ost["rate"], ost["block_symbols"], ost["noise_power"])
    det = sec["fso"]["detection"]
    if det not in DETECTION:
        raise ConfigError("fso.detection", "must be imdd or heterodyne")
    malaga = _wrap("fso.malaga", _build_malaga, sec["fso.malaga"])
    pointing = _wrap("fso.pointing", _build_pointing, sec["fso.pointing"])
    fso = _wrap("fso", fsomod.FsoLinkParams, malaga, pointing, DETECTION[det],
                db_to_linear(sec["fso"]["avg_snr_dB"]))
    scenario = _wrap("scenario", ScenarioConfig, tuple(profiles),
                     db_to_linear(scen["p_a_dBW"]), ostbc, fso,
                     db_to_linear(scen["gamma_th_dB"]), scen["quadrature_fallback"])
    sw = sec["sweep"]
    sweep = SweepSpec(sw["variable"], sw["start"], sw["stop"], sw["step"], sw["trials"],
                      sw.get("output"), sw["format"])
    variants = {}
    for name in sorted(n for n in sec if n.startswith("variants.")):
        for key, vals in sec[name].items():
            if len(vals) != len(profiles):
                raise ConfigError(f"{name}.{key}", f"needs {len(profiles)} values")
        variants[name.split(".", 1)[1]] = sec[name]
    return scenario, sweep, variants


def _resolved(sec):
    return {name: dict(sorted(vals.items())) for name, vals in sorted(sec.items())}


def config_hash(resolved):
    """Stable digest of the semantically meaningful configuration.

    Output location, output format, worker count and seed are excluded; the
    seed is reported alongside the hash.
    """
    data = {k: dict(v) for k, v in resolved.items()}
    data.get("sweep", {}).pop("output", None)
    data.get("sweep", {}).pop("format", None)
    data.pop("mc", None)
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def parse_config_text(text):
    sec = _read_sections(text)
    scenario, sweep, variants = scenario_from_sections(sec)
    if sec["mc"]["workers"] < 1:
        raise ConfigError("mc.workers", "must be >= 1")
    return ParsedConfig(scenario, sweep, sec["mc"]["seed"], sec["mc"]["workers"],
                        variants, _resolved(sec))


def parse_config(path):
    """
    Read and validate a configuration file.

    Returns
    -------
    ParsedConfig
        Scenario (linear units), sweep, seed, worker count, selection
        variants and the resolved section dict used for hashing.

    Raises
    ------
    ConfigError
        Naming the offending ``section.key``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    return parse_config_text(text)


def preset_text(name):
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}")
    return resources.files("rfso.presets").joinpath(f"{name}.cfg").read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class ResultRecord:
    swept_value_dB: float
    analytic_outage: float = None
    mc_outage: float = None
    mc_stderr: float = None
    floor_rd_inf: float = None
    floor_pa_inf: float = None
    error: str = None
    config_hash: str = field(default="", repr=False)
    seed: int = field(default=0, repr=False)

    def row(self):
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def apply_sweep_value(scenario, variable, value_db):
    lin = db_to_linear(value_db)
    if variable == "p_a_dBW":
        return scenario.replace(p_a=lin)
    if variable == "avg_snr_dB":
        return scenario.replace(avg_snr=lin)
    if variable == "gamma_th_dB":
        return scenario.replace(gamma_th=lin)
    raise ConfigError("sweep.variable", f"unknown variable {variable!r}")


def run_outage_sweep(scenario, sweep, seed=0, workers=1, chash=""):
    """
    Evaluate analytic outage, both floors and (optionally) MC at every grid
    point. Failures are recorded per point and the sweep continues.
    """
    grid = sweep.grid()

    def point(i):
        v = grid[i]
        rec = ResultRecord(v, config_hash=chash, seed=seed)
        try:
            s = apply_sweep_value(scenario, sweep.variable, v)
            rec.analytic_outage = end_to_end_outage(s)
            rec.floor_rd_inf = floor_rd_infinity(s)
            rec.floor_pa_inf = floor_pa_infinity(s)
            if sweep.trials > 0:
                est = simulate_outage(s, sweep.trials, RngConfig(seed, stream=(i,)))
                rec.mc_outage, rec.mc_stderr = est
        except RfsoError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        return rec

    if workers <= 1:
        return [point(i) for i in range(len(grid))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, range(len(grid))))


def _csv_value(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_csv_value(r.row()[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def records_to_json(records, chash, seed):
    doc = {"config_hash": chash, "seed": seed, "records": [r.row() for r in records]}
    return json.dumps(doc, indent=2) + "\n"


def read_records(text, fmt):
    """Parse CSV or JSON sweep output back into row dicts (floats or None)."""
    if fmt == "json":
        return json.loads(text)["records"]
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({c: (None if row[c] == "" else (row[c] if c == "error" else float(row[c])))
                     for c in CSV_COLUMNS})
    return rows


def write_output(text, output, sidecar):
    """Write ``text`` to ``output`` (stdout when None) plus a JSON sidecar."""
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(output + ".run.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# selection study
# ---------------------------------------------------------------------------

def builtin_variants(num_users):
    """The four placement scenarios for the second user (relative variances)."""
    if num_users < 2:
        return {"all_equal": {}}
    one = [1.0] * num_users
    two = list(one)
    two[1] = 2.0
    return {
        "all_equal": {},
        "sr2_doubled": {"var_sr": two},
        "sp2_doubled": {"var_sp": two},
        "sr2_sp2_doubled": {"var_sr": two, "var_sp": two},
    }


def apply_variant(scenario, overrides, relative=False):
    profiles = list(scenario.profiles)
    for key, vals in overrides.items():
        for k, v in enumerate(vals):
            p = profiles[k]
            if key == "max_power_dBW":
                profiles[k] = replace(p, max_power=db_to_linear(v))
                continue
            link, attr = ("sr" if key.endswith("_sr") else "sp"), key.split("_")[0]
            cur = getattr(p, link)
            new = getattr(cur, attr) * v if relative else v
            profiles[k] = replace(p, **{link: replace(cur, **{attr: new})})
    return scenario.replace(profiles=tuple(profiles))


def run_selection_study(scenario, variants=None, trials=100000, seed=0, workers=1):
    """
    Selection frequencies for the built-in placement variants (second user's
    variances doubled relative to the base scenario) plus user variants.

    Returns a list of ``(name, SelectionStats)``.
    """
    table = []
    jobs = [(n, apply_variant(scenario, o, relative=True))
            for n, o in builtin_variants(scenario.num_users).items()]
    jobs += [(n, apply_variant(scenario, o)) for n, o in (variants or {}).items()]
    for i, (name, s) in enumerate(jobs):
        stats = simulate_selection(s.profiles, s.p_a, trials, RngConfig(seed, stream=(i,)),
                                   workers)
        table.append((name, stats))
    return table


def selection_to_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("variant", "user", "frequency", "stderr", "count", "trials"))
    for name, st in table:
        for k, (f, se, c) in enumerate(zip(st.frequencies, st.stderr, st.counts), start=1):
            w.writerow((name, k, repr(float(f)), repr(float(se)), c, st.trials))
    return buf.getvalue()


def selection_to_json(table, chash, seed):
    doc = {"config_hash": chash, "seed": seed, "variants": [
        {"name": name, "trials": st.trials, "counts": list(st.counts),
         "frequencies": [float(f) for f in st.frequencies],
         "stderr": [float(s) for s in st.stderr]} for name, st in table]}
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# validation harness
# ---------------------------------------------------------------------------

KS_FLOOR = 0.005
Z_MAX = 3.0


def ks_threshold(trials):
    """KS acceptance bound: 0.005, widened to the 0.1% critical value for small runs."""
    return max(KS_FLOOR, 1.95 / math.sqrt(trials))


def grid_ks(samples, cdf, npoints=199):
    """Largest CDF gap over a grid of empirical quantiles (both one-sided limits)."""
    xs = np.sort(samples)
    n = xs.size
    qs = np.quantile(xs, np.linspace(0.005, 0.995, npoints))
    qs = np.unique(qs[qs > 0])
    f = np.asarray(cdf(qs), dtype=float)
    lo = np.searchsorted(xs, qs, side="left") / n
    hi = np.searchsorted(xs, qs, side="right") / n
    return float(max(np.max(np.abs(f - lo)), np.max(np.abs(f - hi))))


@dataclass
class Check:
    name: str
    kind: str
    statistic: float
    threshold: float

    @property
    def passed(self):
        if self.kind == "ks":
            return self.statistic <= self.threshold
        return abs(self.statistic) <= self.threshold


@dataclass
class ValidationReport:
    trials: int
    seed: int
    config_hash: str
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def text(self):
        lines = [f"validate trials={self.trials} seed={self.seed} config={self.config_hash}"]
        for c in self.checks:
            label = "KS" if c.kind == "ks" else "z "
            lines.append(f"{c.name:<22} {label}={c.statistic:+.6f}  limit={c.threshold:.6f}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
        lines.append("RESULT " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _z(emp, p, n):
    se = math.sqrt(p * (1.0 - p) / n)
    if se == 0:
        return 0.0 if emp == p else math.inf
    return (emp - p) / se


def run_validate(scenario, trials, seed=0, workers=1, corrupt=False, chash=""):
    """
    Cross-check every closed form against Monte Carlo draws of the same
    scenario.

    With ``corrupt=True`` the analytic side uses a doubled S->R Nakagami
    severity (doubled gain shape) as a negative control; the checks must then
    fail.
    """
    if trials < 10_000:
        raise ConfigError("trials", "validate needs at least 10^4 trials")
    s_mc = scenario
    s_an = scenario
    if corrupt:
        s_an = scenario.replace(profiles=tuple(
            replace(p, sr=replace(p.sr, m=2 * p.sr.m)) for p in scenario.profiles))
    p_a, prof_mc, prof_an = s_mc.p_a, s_mc.profiles[0], s_an.profiles[0]
    aq = s_an.allow_quadrature

    def rng(i):
        return RngConfig(seed, stream=(i,))

    thr = ks_threshold(trials)
    checks = []

    g = draw(lambda gen, n: sample_rf_gain(prof_mc.sr, gen, n), trials, rng(0), workers)
    checks.append(Check("gain_cdf", "ks", grid_ks(g, lambda x: gain_cdf(x, prof_an.sr)), thr))

    z = draw(lambda gen, n: sample_metrics((prof_mc,), p_a, gen, n)[:, 0], trials, rng(1), workers)
    checks.append(Check("zeta_cdf", "ks",
                        grid_ks(z, lambda x: zeta_cdf(x, prof_an, p_a, aq)), thr))

    b = draw(lambda gen, n: sample_metrics(s_mc.profiles, p_a, gen, n).max(axis=1),
             trials, rng(2), workers)
    checks.append(Check("beta_star_cdf", "ks",
                        grid_ks(b, lambda x: beta_star_cdf(x, s_an.profiles, p_a, aq)), thr))

    h = draw(lambda gen, n: sample_malaga(s_mc.fso.malaga, gen, n), trials, rng(3), workers)
    checks.append(Check("malaga_cdf", "ks", grid_ks(
        h, lambda x: fsomod.turbulence_cdf(x, s_an.fso.malaga), npoints=99), thr))

    y = draw(lambda gen, n: sample_fso_snr(s_mc.fso, gen, n), trials, rng(4), workers)
    checks.append(Check("fso_snr_cdf", "ks", grid_ks(
        y, lambda x: fsomod.snr_cdf(x, s_an.fso), npoints=99), thr))

    relay = draw(lambda gen, n: sample_relay_snr(s_mc.profiles, p_a, s_mc.ostbc, gen, n)[0],
                 trials, rng(5), workers)
    p_rf = snr_star_cdf(s_an.gamma_th, s_an.profiles, p_a, s_an.ostbc, aq)
    emp = float(np.mean(relay <= s_mc.gamma_th))
    checks.append(Check("relay_snr_outage", "z", _z(emp, p_rf, trials), Z_MAX))

    est, _ = simulate_outage(s_mc, trials, rng(6), workers)
    p_e2e = end_to_end_outage(s_an)
    checks.append(Check("end_to_end_outage", "z", _z(est, p_e2e, trials), Z_MAX))
    return ValidationReport(trials, seed, chash, checks)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="configuration file")
    src.add_argument("--preset", choices=PRESETS, help="bundled figure configuration")
    common.add_argument("--trials", type=int, help="Monte Carlo trials (per point)")
    common.add_argument("--seed", type=int, help="base RNG seed")
    common.add_argument("--workers", type=int, help="worker threads")
    common.add_argument("--detection", choices=sorted(DETECTION), help="FSO detection type")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--output", metavar="PATH", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="rfso", description=(
        "Outage and SU-TX selection analysis of underlay cognitive MIMO-RF/FSO links."))
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="outage sweep (analytic, floors, MC)")
    sub.add_parser("select", parents=[common], help="SU-TX selection frequencies")
    v = sub.add_parser("validate", parents=[common], help="analytic-vs-MC self check")
    v.add_argument("--negative-control", action="store_true",
                   help="corrupt the analytic S->R shape; validation must fail")
    return p


def _load(args):
    if args.preset:
        cfg = parse_config_text(preset_text(args.preset))
    else:
        cfg = parse_config(args.config)
    resolved = cfg.resolved
    scenario, sweep = cfg.scenario, cfg.sweep
    if args.detection:
        scenario = scenario.replace(detection=DETECTION[args.detection])
        resolved = {**resolved, "fso": {**resolved["fso"], "detection": args.detection}}
    if args.trials is not None:
        if args.trials < 0:
            raise ConfigError("trials", "must be >= 0")
        sweep = replace(sweep, trials=args.trials)
        resolved = {**resolved, "sweep": {**resolved["sweep"], "trials": args.trials}}
    if args.format:
        sweep = replace(sweep, format=args.format)
    if args.output:
        sweep = replace(sweep, output=args.output)
    seed = cfg.seed if args.seed is None else args.seed
    workers = cfg.workers if args.workers is None else args.workers
    if workers < 1:
        raise ConfigError("workers", "must be >= 1")
    return scenario, sweep, seed, workers, cfg.variants, resolved


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        scenario, sweep, seed, workers, variants, resolved = _load(args)
        chash = config_hash(resolved)
        sidecar = {"config_hash": chash, "seed": seed, "command": args.command,
                   "config": resolved}
        if args.command == "sweep":
            records = run_outage_sweep(scenario, sweep, seed, workers, chash)
            text = (records_to_json(records, chash, seed) if sweep.format == "json"
                    else records_to_csv(records))
            write_output(text, sweep.output, sidecar)
            return EXIT_NUMERICAL if any(r.error for r in records) else EXIT_OK
        if args.command == "select":
            trials = sweep.trials or 100_000
            table = run_selection_study(scenario, variants, trials, seed, workers)
            text = (selection_to_json(table, chash, seed) if sweep.format == "json"
                    else selection_to_csv(table))
            write_output(text, sweep.output, sidecar)
            return EXIT_OK
        trials = sweep.trials or 1_000_000
        report = run_validate(scenario, trials, seed, workers, args.negative_control, chash)
        write_output(report.text(), sweep.output, sidecar)
        return EXIT_OK if report.passed else EXIT_VALIDATION
    except ConfigError as exc:
        print(f"rfso: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, RfsoError, ArithmeticError) as exc:
        print(f"rfso: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
