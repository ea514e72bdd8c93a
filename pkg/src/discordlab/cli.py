"""Command line front end: ``discordlab <command> ...``.

Commands
--------
correlations   entropies, J, discord (both directions), concurrence
protocol       coherent vs decohered resource report for one protocol
sweep          CSV over a one-parameter family
random-scan    CSV over seeded random states, checking min-loss = discord

States and channels are JSON files, or built-ins such as ``bell``,
``werner:0.5``, ``dephasing:1.0``, ``depolarizing:0.3``,
``amplitude_damping:0.4`` and ``measure:Z``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import channels, correlations, measure, protocols, states
from .optimize import OptimizerOptions
from .qmat import DimensionError, InvariantError

DEFAULT_SEED = 42

SWEEP_FAMILIES = {
    "werner": "p",
    "depolarizing": "p",
    "dephasing": "p",
    "amplitude_damping": "gamma",
}
SWEEP_QUANTITIES = (
    "discord",
    "discord_a",
    "classical_correlation",
    "concurrence",
    "mutual_information",
    "conditional_entropy",
    "loss",
    "min_loss",
)


class UsageError(ValueError):
    pass


# -- input resolution -------------------------------------------------------


def _load_json(path: str, parser):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return parser(obj)
    except InvariantError as exc:
        raise InvariantError(exc.invariant, f"in {path}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _split_spec(spec: str) -> tuple[str, str | None]:
    name, _, arg = spec.partition(":")
    return name.lower(), (arg or None)


def _float_arg(spec: str, arg: str | None) -> float:
    if arg is None:
        raise UsageError(f"{spec}: missing parameter, e.g. {spec}:0.5")
    try:
        return float(arg)
    except ValueError:
        raise UsageError(f"{spec}: parameter {arg!r} is not a number") from None


def resolve_state(spec: str) -> states.DensityOperator:
    if os.path.exists(spec):
        return _load_json(spec, states.state_from_json)
    name, arg = _split_spec(spec)
    if name == "bell":
        return states.bell_state(int(arg or 0)).density()
    if name == "werner":
        return states.werner(_float_arg(spec, arg))
    raise UsageError(f"{spec}: no such file, and not a built-in state (bell, werner:P)")


def resolve_povm(spec: str) -> measure.Povm:
    if os.path.exists(spec):
        return _load_json(spec, measure.povm_from_json)
    name, arg = _split_spec(spec)
    if name == "trine":
        return measure.trine()
    if name in ("x", "y", "z"):
        return measure.Povm.projective(measure.pauli_basis(name))
    raise UsageError(f"{spec}: no such file, and not a built-in POVM (X, Y, Z, trine)")


def resolve_channel(spec: str, dim: int) -> channels.KrausChannel:
    if os.path.exists(spec):
        return _load_json(spec, channels.channel_from_json)
    name, arg = _split_spec(spec)
    if name == "identity":
        return channels.identity_channel(dim)
    if name == "depolarizing":
        return channels.depolarizing(dim, _float_arg(spec, arg))
    if name == "dephasing":
        return channels.dephasing(_float_arg(spec, arg))
    if name == "amplitude_damping":
        return channels.amplitude_damping(_float_arg(spec, arg))
    if name == "measure":
        return channels.measurement_channel(resolve_povm(arg or "Z"))
    raise UsageError(
        f"{spec}: no such file, and not a built-in channel "
        "(identity, depolarizing:P, dephasing:P, amplitude_damping:G, measure:BASIS)"
    )


def _options(args) -> OptimizerOptions:
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    return OptimizerOptions(restarts=args.restarts, seed=args.seed, povm_mode=args.povm_mode)


# -- output helpers ---------------------------------------------------------


def _table(rows: list[tuple[str, float | str]]) -> str:
    width = max(len(k) for k, _ in rows)
    lines = []
    for key, value in rows:
        if isinstance(value, float) and abs(value) < 5e-7:
            value = 0.0  # avoid printing -0.000000
        text = f"{value:.6f}" if isinstance(value, float) else str(value)
        lines.append(f"{key:<{width}}  {text}")
    return "\n".join(lines) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn_unconverged(result, label: str):
    if not result.converged:
        print(f"warning: optimizer did not converge for {label}; best value reported", file=sys.stderr)


# -- commands ---------------------------------------------------------------


def cmd_correlations(args) -> int:
    if not args.state:
        raise UsageError("correlations needs --state")
    rho = resolve_state(args.state)
    states.require_bipartite(rho)
    opts = _options(args)
    s_a = correlations.von_neumann_entropy(rho.partial_trace([0]))
    s_b = correlations.von_neumann_entropy(rho.partial_trace([1]))
    s_ab = correlations.von_neumann_entropy(rho)
    d_b = correlations.discord(rho, "B", opts)
    d_a = correlations.discord(rho, "A", opts)
    _warn_unconverged(d_b, "D(A:B)")
    _warn_unconverged(d_a, "D(B:A)")
    result = {
        "S(A)": s_a,
        "S(B)": s_b,
        "S(AB)": s_ab,
        "I(A:B)": s_a + s_b - s_ab,
        "S(A|B)": s_ab - s_b,
        "J(A:B)": d_b.classical_correlation,
        "D(A:B)": d_b.value,
        "J(B:A)": d_a.classical_correlation,
        "D(B:A)": d_a.value,
    }
    if rho.dims == (2, 2):
        result["C"] = correlations.concurrence_2q(rho)
    if args.povm:
        povm = resolve_povm(args.povm)
        result["Zurek D(A:B)"] = correlations.zurek_discord(rho, povm, "B")
    if opts.povm_mode:
        result["POVM gap (B)"] = d_b.povm_gap
    if args.json:
        doc = {
            "dims": list(rho.dims),
            "quantities": result,
            "optimal_measurement_B": measure.povm_to_json(d_b.optimal_measurement),
            "optimal_measurement_A": measure.povm_to_json(d_a.optimal_measurement),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit(_table(list(result.items())), args.out)
    return 0


def cmd_protocol(args) -> int:
    if not args.state:
        raise UsageError("protocol needs --state")
    if args.name not in protocols.PROTOCOLS:
        raise UsageError(f"unknown protocol {args.name!r}; valid: {', '.join(protocols.PROTOCOLS)}")
    rho = resolve_state(args.state)
    states.require_bipartite(rho)
    if args.channel and args.povm:
        raise UsageError("give either --channel or --povm, not both")
    if args.channel:
        ch = resolve_channel(args.channel, rho.dims[1])
    elif args.povm:
        ch = channels.measurement_channel(resolve_povm(args.povm))
    else:
        raise UsageError("protocol needs --channel or --povm")
    report = protocols.protocol_report(args.name, rho, ch)
    extra = {}
    if args.verify_discord:
        opts = _options(args)
        min_loss = protocols.min_loss_search(rho, opts)
        disc = correlations.discord(rho, "B", opts)
        _warn_unconverged(min_loss, "min-loss")
        _warn_unconverged(disc, "D(A:B)")
        extra = {
            "min_loss": min_loss.value,
            "discord": disc.value,
            "gap": abs(min_loss.value - disc.value),
        }
    if args.json:
        doc = report.as_dict()
        if extra:
            doc["verify_discord"] = extra
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return 0
    rows: list[tuple[str, float | str]] = [("protocol", report.protocol)]
    for label, vec in (
        ("coherent cost", report.coherent_cost),
        ("coherent yield", report.coherent_yield),
        ("decohered cost", report.decohered_cost),
        ("decohered yield", report.decohered_yield),
    ):
        for field, value in vec.as_dict().items():
            rows.append((f"{label} {field}", value))
    rows += [
        ("net gain", report.net_gain),
        ("net gain decohered", report.net_gain_decohered),
        ("loss", report.loss),
    ]
    rows += [(k.replace("_", " "), v) for k, v in extra.items()]
    _emit(_table(rows), args.out)
    return 0


def sweep_grid(start: float, stop: float, step: float, values: str | None = None) -> list[float]:
    if values:
        try:
            grid = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--values: cannot parse {values!r}") from None
        if not grid:
            raise UsageError("empty grid")
        return grid
    if not step > 0 or step > stop - start:
        raise UsageError("empty grid")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _sweep_point(family: str, x: float, base: states.DensityOperator, quantities, opts):
    if family == "werner":
        rho, ch = states.werner(x), None
    else:
        ch = resolve_channel(f"{family}:{x!r}", base.dims[1])
        rho = channels.apply(ch, base, 1)
    row = []
    cache = {}

    def disc(side):
        if side not in cache:
            cache[side] = correlations.discord(rho, side, opts)
        return cache[side]

    for q in quantities:
        if q == "discord":
            row.append(disc("B").value)
        elif q == "discord_a":
            row.append(disc("A").value)
        elif q == "classical_correlation":
            row.append(disc("B").classical_correlation)
        elif q == "concurrence":
            row.append(correlations.concurrence_2q(rho) if rho.dims == (2, 2) else None)
        elif q == "mutual_information":
            row.append(correlations.mutual_information(rho))
        elif q == "conditional_entropy":
            row.append(correlations.conditional_entropy(rho))
        elif q == "loss":
            row.append(0.0 if ch is None else protocols.decohered_fqsw_report(base, ch).loss)
        elif q == "min_loss":
            row.append(protocols.min_loss_over_measurements(rho, opts))
    return row


def cmd_sweep(args) -> int:
    family = args.family
    if family not in SWEEP_FAMILIES:
        raise UsageError(f"unknown family {family!r}; valid: {', '.join(SWEEP_FAMILIES)}")
    quantities = [q.strip() for q in args.quantities.split(",") if q.strip()]
    bad = [q for q in quantities if q not in SWEEP_QUANTITIES]
    if bad or not quantities:
        raise UsageError(f"unknown quantities {bad}; valid: {', '.join(SWEEP_QUANTITIES)}")
    grid = sweep_grid(args.start, args.stop, args.step, args.values)
    base = resolve_state(args.state or "bell")
    opts = _options(args)
    rows = [[x] + _sweep_point(family, x, base, quantities, opts) for x in grid]
    _emit(_csv([SWEEP_FAMILIES[family]] + quantities, rows), args.out)
    return 0


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(d) for d in text.replace("x", ",").split(","))
    except ValueError:
        raise UsageError(f"--dims: cannot parse {text!r}") from None
    if len(dims) != 2 or any(d < 1 for d in dims):
        raise UsageError("--dims must name two positive dimensions, e.g. 2,2")
    return dims


def cmd_random_scan(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    dims = _parse_dims(args.dims)
    total = dims[0] * dims[1]
    rank = args.rank if args.rank is not None else total
    if not 1 <= rank <= total:
        raise UsageError(f"--rank must lie in [1, {total}]")
    opts = _options(args)
    rows = []
    max_gap = 0.0
    for i in range(args.n):
        seed = args.seed + i
        rho = states.random_density(dims, rank=rank, seed=seed)
        d_b = correlations.discord(rho, "B", opts)
        d_a = correlations.discord(rho, "A", opts)
        loss = protocols.min_loss_over_measurements(rho, opts)
        gap = abs(loss - d_b.value)
        max_gap = max(max_gap, gap)
        conc = correlations.concurrence_2q(rho) if dims == (2, 2) else None
        s_a = correlations.von_neumann_entropy(rho.partial_trace([0]))
        rows.append([i, seed, d_b.value, d_a.value, conc, s_a, loss, gap])
    header = ["index", "seed", "discord_b", "discord_a", "concurrence", "entropy_a", "min_loss", "gap"]
    _emit(_csv(header, rows), args.out)
    print(f"summary: n={args.n} max_gap={max_gap!r}", file=sys.stderr)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="state JSON file or built-in (bell, werner:P)")
    common.add_argument("--channel", help="channel JSON file or built-in")
    common.add_argument("--povm", help="POVM JSON file or built-in (X, Y, Z, trine)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--restarts", type=int, default=16)
    common.add_argument("--povm-mode", action="store_true", help="optimize over 2d-outcome rank-1 POVMs")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verify-discord", action="store_true")

    parser = argparse.ArgumentParser(prog="discordlab", description="Quantum discord and protocol yield accounting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlations", parents=[common], help="correlation quantities of a bipartite state")
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("protocol", parents=[common], help="coherent vs decohered protocol report")
    p.add_argument("name", help=", ".join(protocols.PROTOCOLS))
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("sweep", parents=[common], help="CSV over a one-parameter family")
    p.add_argument("--family", default="werner", help=", ".join(SWEEP_FAMILIES))
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--values", help="explicit comma-separated grid (overrides start/stop/step)")
    p.add_argument("--quantities", default="discord,concurrence", help=", ".join(SWEEP_QUANTITIES))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("random-scan", parents=[common], help="seeded random states, min-loss vs discord")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--dims", default="2,2")
    p.add_argument("--rank", type=int)
    p.set_defaults(func=cmd_random_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
