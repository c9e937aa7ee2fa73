"""Command-line front end: ``ma-ris-sim <experiment> --config FILE --output STEM``.

The config file is flat ``key = value`` text with ``#`` comments.  Every key is
optional; missing keys take the reference defaults.  Values are in human units
(dBm, dB, degrees, meters, GHz) and are converted to SI once, here.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from . import __version__
from . import performance as perf
from . import scenario as sc
from .geometry import Vec3
from .numerics import PRNG_ALGORITHM

EXPERIMENTS = ("sweep-power", "sweep-elements", "sweep-position", "sweep-snr",
               "compare", "outage-check")


class ConfigError(ValueError):
    pass


def _float(v: str) -> float:
    return float(v)


def _int(v: str) -> int:
    return int(v, 10)


def _num_list(conv: Callable[[str], float]):
    def parse(v: str):
        v = v.strip()
        if ":" in v:
            parts = [conv(p) for p in v.split(":")]
            if len(parts) == 2:
                parts.append(conv("1"))
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError("range must be start:stop[:step] with step > 0")
            start, stop, step = parts
            out, k = [], 0
            while start + k * step <= stop + 1e-9 * abs(step):
                out.append(start + k * step)
                k += 1
            return tuple(out)
        return tuple(conv(p) for p in v.split(",") if p.strip())
    return parse


# key -> (parser, validator message or None, check)
_KEYS: dict[str, tuple[Callable, Callable[[object], bool] | None, str]] = {
    "tx_x_m": (_float, None, ""),
    "tx_y_m": (_float, None, ""),
    "tx_z_m": (_float, None, ""),
    "rx_x_m": (_float, None, ""),
    "rx_y_m": (_float, None, ""),
    "rx_z_m": (_float, None, ""),
    "panel_x_m": (_float, None, ""),
    "panel_z_m": (_float, None, ""),
    "y_s_m": (_float, lambda v: v > 0, "must be > 0"),
    "panel_length_m": (_float, lambda v: v > 0, "must be > 0"),
    "n_elements": (_int, lambda v: v >= 1, "must be >= 1"),
    "n_x": (_int, lambda v: v >= 1, "must be >= 1"),
    "n_y": (_int, lambda v: v >= 1, "must be >= 1"),
    "element_dx_m": (_float, lambda v: v > 0, "must be > 0"),
    "element_dy_m": (_float, lambda v: v > 0, "must be > 0"),
    "hpbw_deg": (_float, lambda v: 0 < v < 90, "must be in (0, 90)"),
    "carrier_freq_ghz": (_float, lambda v: v > 0, "must be > 0"),
    "noise_power_dbm": (_float, math.isfinite, "must be finite"),
    "tx_power_dbm": (_float, math.isfinite, "must be finite"),
    "gamma_th_db": (_float, math.isfinite, "must be finite"),
    "speed_mps": (_float, lambda v: v >= 0, "must be >= 0"),
    "duration_s": (_int, lambda v: v >= 1, "must be >= 1"),
    "mc_trials": (_int, lambda v: v >= perf.MIN_TRIALS, f"must be >= {perf.MIN_TRIALS}"),
    "seed": (_int, lambda v: 0 <= v < 2 ** 64, "must be a 64-bit unsigned integer"),
    "target_log10_outage": (_float, lambda v: v < 0, "must be < 0"),
    "pt_range_dbm": (_num_list(_float), lambda v: len(v) > 0, "must be non-empty"),
    "n_range": (_num_list(_int), lambda v: len(v) > 0 and min(v) >= 1,
                "must be non-empty with every n >= 1"),
    "ys_range_m": (_num_list(_float), lambda v: len(v) > 0 and min(v) > 0,
                   "must be non-empty with every y_s > 0"),
}


def parse_config_text(text: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        conv, check, msg = _KEYS[key]
        try:
            parsed = conv(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse {key} = {value!r}") from None
        if check is not None and not check(parsed):
            raise ConfigError(f"{key} {msg}")
        values[key] = parsed
    return values


def config_from_values(values: dict[str, object]) -> sc.ScenarioConfig:
    d = sc.ScenarioConfig()
    g = values.get
    dx, dy = g("element_dx_m"), g("element_dy_m")
    if (dx is None) != (dy is None):
        raise ConfigError("element_dx_m and element_dy_m must be given together")
    n = g("n_elements", d.n_elements)
    n_x, n_y = g("n_x"), g("n_y")
    if n_x is None and n_y is None:
        n_x, n_y = (d.n_x, d.n_y) if n == d.n_elements else sc.geo.grid_shape(n)
    elif n_x is None or n_y is None or n_x * n_y != n:
        raise ConfigError("n_x and n_y must both be given with n_x * n_y == n_elements")
    try:
        return sc.ScenarioConfig(
            tx=Vec3(g("tx_x_m", d.tx.x), g("tx_y_m", d.tx.y), g("tx_z_m", d.tx.z)),
            rx=Vec3(g("rx_x_m", d.rx.x), g("rx_y_m", d.rx.y), g("rx_z_m", d.rx.z)),
            panel_x=g("panel_x_m", d.panel_x),
            panel_z=g("panel_z_m", d.panel_z),
            y_s=g("y_s_m", d.y_s),
            panel_length=g("panel_length_m", d.panel_length),
            n_elements=n,
            n_x=n_x,
            n_y=n_y,
            element_size=None if dx is None else (dx, dy),
            hpbw=math.radians(g("hpbw_deg", 13.8)),
            carrier_freq=g("carrier_freq_ghz", d.carrier_freq / 1e9) * 1e9,
            noise_power=perf.dbm_to_watts(g("noise_power_dbm", -45.0)),
            tx_power=perf.dbm_to_watts(g("tx_power_dbm", -20.0)),
            gamma_th=perf.from_db(g("gamma_th_db", 20.0)),
            speed=g("speed_mps", d.speed),
            duration=g("duration_s", d.duration),
            mc_trials=g("mc_trials", d.mc_trials),
            seed=g("seed", d.seed),
            target_log10_outage=g("target_log10_outage", d.target_log10_outage),
            pt_range_dbm=g("pt_range_dbm", d.pt_range_dbm),
            n_range=g("n_range", d.n_range),
            ys_range=g("ys_range_m", d.ys_range),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path | None) -> sc.ScenarioConfig:
    """Read a ``key = value`` config file; ``None`` gives the defaults."""
    if path is None:
        return sc.ScenarioConfig()
    return config_from_values(parse_config_text(Path(path).read_text(encoding="utf-8")))


# -- output ---------------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v + 0.0)  # shortest round-trip, folds -0.0
    return str(v)


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _sweep_table(rows: list[sc.SweepRow], col: str) -> tuple[list[str], list[list]]:
    header = [col, "variant", "n_eff", "p_r_dbm", "gamma_db", "log10_p_out"]
    body = [[r.value, r.variant, r.n_eff, r.p_r_dbm, r.gamma_db, r.log10_p_out] for r in rows]
    return header, body


def experiment_table(name: str, cfg: sc.ScenarioConfig, trials: int, seed: int,
                     workers: int = 1) -> tuple[list[str], list[list], list[str]]:
    """Return (header, rows, summary lines) for one experiment."""
    notes: list[str] = []
    if name == "sweep-power":
        h, b = _sweep_table(sc.sweep_power(cfg), "p_t_dbm")
    elif name == "sweep-snr":
        rows = sc.sweep_snr(cfg)
        h, b = _sweep_table(rows, "p_t_dbm")
        for lay in ("1D", "2D"):
            ma = [r.gamma_db for r in rows if r.variant == f"MA-{lay}"]
            fpa = [r.gamma_db for r in rows if r.variant == f"FPA-{lay}"]
            notes.append(f"MA-FPA SNR gap {lay}: {ma[0] - fpa[0]:+.4f} dB")
    elif name == "sweep-elements":
        rows = sc.sweep_elements(cfg)
        h, b = _sweep_table(rows, "n")
        for lay in ("1D", "2D"):
            n_ma = sc.elements_for_target(rows, f"MA-{lay}", cfg.target_log10_outage)
            n_fpa = sc.elements_for_target(rows, f"FPA-{lay}", cfg.target_log10_outage)
            notes.append(f"elements for log10 P_out <= {cfg.target_log10_outage}: "
                         f"MA-{lay}={n_ma} FPA-{lay}={n_fpa}")
    elif name == "sweep-position":
        rows = sc.sweep_position(cfg)
        h, b = _sweep_table(rows, "y_s_m")
        for v, (y, g) in sc.argmax_snr(rows).items():
            notes.append(f"{v}: max gamma {g:.3f} dB at y_s={y:g} m")
    elif name == "compare":
        c = sc.compare_ma_fpa(cfg)
        h = ["metric", "value", "reference_value", "unit"]
        b = [list(r) for r in c.records()]
        b += [["elements_ma_2d", c.elements_ma, None, "count"],
              ["elements_fpa_2d", c.elements_fpa, None, "count"]]
        notes += [f"{m}: {fmt(v)} (reference {p:g}) {u}" for m, v, p, u in c.records()]
    elif name == "outage-check":
        h = ["n_eff", "gamma_bar_db", "gamma_th_db", "p_analytic", "log10_p_analytic",
             "p_monte_carlo", "std_error", "trials", "agree"]
        b = []
        for c in sc.outage_check(cfg, trials=trials, seed=seed, workers=workers):
            b.append([c.n_eff, perf.db(c.gamma_bar), perf.db(c.gamma_th), c.analytic,
                      c.log10_analytic, c.estimate, c.std_error, c.trials, c.agree])
        notes.append(f"{sum(r[-1] for r in b)}/{len(b)} points agree")
    else:
        raise ValueError(f"unknown experiment {name!r}")
    return h, b, notes


def _stem(output: str) -> Path:
    p = Path(output)
    return p.with_suffix("") if p.suffix == ".csv" else p


def write_outputs(stem: Path, csv_text: str, manifest: dict[str, object]) -> tuple[Path, Path]:
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.parent / (stem.name + ".csv")
    man_path = stem.parent / (stem.name + ".manifest")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    with open(man_path, "w", encoding="utf-8", newline="") as fh:
        for k, v in manifest.items():
            fh.write(f"{k} = {fmt(v)}\n")
    return csv_path, man_path


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ma-ris-sim",
        description="Movable-element RIS link simulator: sweeps, comparison and outage check.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="key = value config file (defaults if omitted)")
    p.add_argument("--output", required=True, help="output stem; writes STEM.csv and STEM.manifest")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--trials", type=int, help="override mc_trials")
    p.add_argument("--workers", type=int, default=1, help="Monte Carlo worker threads")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = Path(args.config).read_bytes() if args.config else b""
        cfg = config_from_values(parse_config_text(raw.decode("utf-8")))
    except (OSError, UnicodeDecodeError, ConfigError) as exc:
        print(f"ma-ris-sim: config error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            parser.error("--seed must be a 64-bit unsigned integer")
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        if args.trials < perf.MIN_TRIALS:
            parser.error(f"--trials must be >= {perf.MIN_TRIALS}")
        cfg = replace(cfg, mc_trials=args.trials)
    if args.workers < 1:
        parser.error("--workers must be >= 1")

    try:
        header, rows, notes = experiment_table(args.experiment, cfg, cfg.mc_trials,
                                               cfg.seed, args.workers)
    except ValueError as exc:
        print(f"ma-ris-sim: {args.experiment} failed: {exc}", file=sys.stderr)
        return 1

    manifest = {
        "tool_version": __version__,
        "experiment": args.experiment,
        "config_path": args.config or "",
        "config_digest": "sha256:" + hashlib.sha256(raw).hexdigest(),
        "seed": cfg.seed,
        "trials": cfg.mc_trials,
        "prng": PRNG_ALGORITHM,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        csv_path, _ = write_outputs(_stem(args.output), to_csv(header, rows), manifest)
    except OSError as exc:
        print(f"ma-ris-sim: cannot write output: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"wrote {csv_path} ({len(rows)} rows)")
        for line in notes:
            print("  " + line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
