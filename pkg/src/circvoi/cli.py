"""Command-line front end.

Exit codes: 0 success, 1 invalid configuration, 2 verification failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .engine import default_beta_grid, voi_curve
from .measure import BASES, load_cost_csv, load_prior_csv, to_base
from .models import (
    CIRCLE_FAMILIES,
    ModelSpec,
    build_problem,
    circle_gamma_prime_limit,
    hartley_table,
    limit_Z_unit_linear,
    maxent_cost,
    maxent_limit,
    resolve_family,
)
from .plotting import Series, render_svg
from .verify import default_specs, report, run_checks

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3
CURVE_COLUMNS = ("beta", "Z", "Gamma", "expected_cost", "info_nats", "info_base", "value", "base")


class ConfigError(ValueError):
    pass


def fmt(x):
    """12 significant digits, no negative zero."""
    if isinstance(x, str):
        return x
    x = float(x) + 0.0
    return format(x, ".12g")


@dataclass
class RunConfig:
    subcommand: str
    model: str | None = None
    n: list = field(default_factory=list)
    prior: str | None = None
    cost: str | None = None
    beta_min: float = 1e-3
    beta_max: float = 50.0
    beta_count: int = 200
    beta_scale: str = "geometric"
    include_zero: bool = True
    beta: list = field(default_factory=list)
    base: str = "bits"
    out: str | None = None
    tol: float | None = None
    hartley: bool = False
    inputs: list = field(default_factory=list)

    def validate(self):
        if self.base not in BASES:
            raise ConfigError(f"--base: must be one of {BASES}, got {self.base!r}")
        if self.model is not None:
            try:
                self.model = resolve_family(self.model)
            except ValueError as exc:
                raise ConfigError(f"--model: {exc}") from None
        if self.model is None and self.cost is not None:
            self.model = "custom"
        if self.model == "custom" and self.cost is None:
            raise ConfigError("--cost: required with --model custom")
        if self.cost is not None and self.model not in (None, "custom"):
            raise ConfigError("--cost: only valid with --model custom")
        for n in self.n:
            if n < 2 or n % 2:
                raise ConfigError(f"--n: must be an even integer >= 2, got {n}")
        if self.beta_count < 1:
            raise ConfigError(f"--beta-count: must be >= 1, got {self.beta_count}")
        if self.beta_scale not in ("geometric", "linear"):
            raise ConfigError(f"--beta-scale: must be geometric or linear, got {self.beta_scale!r}")
        if self.beta_min < 0 or self.beta_max < self.beta_min:
            raise ConfigError(f"--beta-min/--beta-max: need 0 <= min <= max, got {self.beta_min}, {self.beta_max}")
        if self.beta_scale == "geometric" and self.beta_min <= 0:
            raise ConfigError("--beta-min: must be > 0 for a geometric grid")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"--tol: must be positive, got {self.tol}")
        for b in self.beta:
            if not b > 0:
                raise ConfigError(f"--beta: must be positive, got {b}")
        return self

    def grid(self):
        return default_beta_grid(self.beta_min, self.beta_max, self.beta_count, self.beta_scale, self.include_zero)

    def specs(self, default_family="circle_circumference_n_linear"):
        family = self.model or default_family
        prior = None
        if family == "custom":
            cost, prior = load_cost_csv(self.cost)
            if self.prior is not None:
                prior = load_prior_csv(self.prior, cost.n)
            return [ModelSpec("custom", cost.n, prior=prior, cost=cost)]
        ns = self.n or [8]
        out = []
        for n in ns:
            p = load_prior_csv(self.prior, n) if self.prior is not None else None
            out.append(ModelSpec(family, n, prior=p))
        return out


def atomic_write(path, text):
    """Write to a temporary file next to ``path`` and rename it into place."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def curve_csv(spec, grid, base):
    curve = voi_curve(build_problem(spec), grid, base=base)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for p in curve.points:
        w.writerow([fmt(v) for v in (p.beta, p.z, p.gamma, p.expected_cost, p.info_nats, p.info, p.value)] + [base])
    return buf.getvalue()


def cmd_curve(cfg):
    specs = cfg.specs()
    if len(specs) != 1:
        raise ConfigError("--n: curve takes a single n")
    atomic_write(cfg.out, curve_csv(specs[0], cfg.grid(), cfg.base))
    return EXIT_OK


def cmd_hartley(cfg):
    specs = cfg.specs()
    if len(specs) != 1:
        raise ConfigError("--n: hartley takes a single n")
    spec = specs[0]
    if spec.family not in CIRCLE_FAMILIES:
        raise ConfigError(f"--model: {spec.family} has no Hartley semantics (circle families only)")
    rows = hartley_table(spec)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("bits", "info", "value"))
    for pt in rows:
        w.writerow((pt.bits, fmt(to_base(pt.info_nats, cfg.base)), fmt(pt.value)))
    atomic_write(cfg.out, buf.getvalue())
    return EXIT_OK


def cmd_maxent(cfg):
    lines = []
    for spec in cfg.specs():
        line = f"{spec.label} maxent_cost={fmt(maxent_cost(spec))}"
        lim = maxent_limit(spec.family) if spec.family != "custom" else None
        if lim is not None:
            line += f" limit_n_to_infinity={fmt(lim)}"
        lines.append(line)
    atomic_write(cfg.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_limit(cfg):
    betas = cfg.beta or [b for b in cfg.grid() if b > 0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("beta", "limit_Z_unit_linear", "limit_gamma_prime_circle"))
    for b in betas:
        w.writerow((fmt(b), fmt(limit_Z_unit_linear(b)), fmt(circle_gamma_prime_limit(b))))
    atomic_write(cfg.out, buf.getvalue())
    return EXIT_OK


def cmd_verify(cfg):
    if cfg.model is None and cfg.cost is None:
        specs = default_specs()
    else:
        if cfg.cost is not None:
            cfg.model = "custom"
        specs = cfg.specs()
    text, ok = report(run_checks(specs, cfg.grid(), tol=cfg.tol))
    atomic_write(cfg.out, text + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def read_curve_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{path}: no curve rows")
    missing = {"info_base", "value", "base"} - set(rows[0])
    if missing:
        raise ConfigError(f"{path}: missing columns {sorted(missing)}")
    bases = {r["base"] for r in rows}
    if len(bases) != 1:
        raise ConfigError(f"{path}: mixed information bases")
    return bases.pop(), [float(r["info_base"]) for r in rows], [float(r["value"]) for r in rows]


def cmd_plot(cfg):
    curves, dots, bases = [], [], set()
    for path in cfg.inputs:
        base, x, y = read_curve_csv(path)
        bases.add(base)
        curves.append(Series(Path(path).stem, tuple(x), tuple(y)))
    if cfg.model is not None:
        grid = cfg.grid()
        for spec in cfg.specs():
            curve = voi_curve(build_problem(spec), grid, base=cfg.base)
            bases.add(cfg.base)
            curves.append(Series(f"n={spec.n}", tuple(curve.info), tuple(curve.values)))
            if cfg.hartley:
                if spec.family not in CIRCLE_FAMILIES:
                    raise ConfigError(f"--hartley: {spec.family} has no Hartley semantics")
                pts = hartley_table(spec)
                dots.append(
                    Series(
                        f"Hartley n={spec.n}",
                        tuple(to_base(p.info_nats, cfg.base) for p in pts),
                        tuple(p.value for p in pts),
                    )
                )
    if not curves:
        raise ConfigError("plot: empty input (give curve CSV files or --model)")
    if len(bases) > 1:
        raise ConfigError("plot: mixed information bases")
    base = bases.pop()
    svg = render_svg(curves, dots, xlabel=f"information ({base})", ylabel="value of information")
    atomic_write(cfg.out, svg)
    return EXIT_OK


COMMANDS = {
    "curve": cmd_curve,
    "hartley": cmd_hartley,
    "maxent": cmd_maxent,
    "verify": cmd_verify,
    "plot": cmd_plot,
    "limit": cmd_limit,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model family, e.g. circle-linear, unit-circle-log, custom")
    common.add_argument("--n", type=int, action="append", default=[], help="number of points (repeatable for plot/maxent)")
    common.add_argument("--prior", help="CSV of prior weights")
    common.add_argument("--cost", help="CSV cost matrix for --model custom")
    common.add_argument("--beta-min", type=float, default=1e-3)
    common.add_argument("--beta-max", type=float, default=50.0)
    common.add_argument("--beta-count", type=int, default=200)
    common.add_argument("--beta-scale", default="geometric", choices=("geometric", "linear"))
    common.add_argument("--no-zero", dest="include_zero", action="store_false", help="do not prepend beta=0")
    common.add_argument("--base", default="bits", choices=BASES)
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--tol", type=float, help="override every verification tolerance")

    parser = argparse.ArgumentParser(prog="circvoi", description="Value-of-information curves for circular settings")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("curve", parents=[common], help="write a VoI curve as CSV")
    sub.add_parser("hartley", parents=[common], help="write Hartley VoI points as CSV")
    sub.add_parser("maxent", parents=[common], help="print the MaxEnt cost and its large-n limit")
    sub.add_parser("verify", parents=[common], help="run the invariant batteries")
    p_plot = sub.add_parser("plot", parents=[common], help="render curves as SVG")
    p_plot.add_argument("inputs", nargs="*", help="curve CSV files")
    p_plot.add_argument("--hartley", action="store_true", help="overlay Hartley dots for --model curves")
    p_limit = sub.add_parser("limit", parents=[common], help="print large-n limits of Z and Gamma'")
    p_limit.add_argument("--beta", type=float, action="append", default=[])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        cfg.validate()
        return COMMANDS[cfg.subcommand](cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
