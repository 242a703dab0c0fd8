"""Command-line front end: ``homrates <command> [options]``.

Commands write CSV (``#`` metadata lines, then a header row) to ``--out``
or stdout, or an SVG rendering of the same data with ``--format svg``.
Any option may also come from a JSON config file given by ``--config``;
flags on the command line win.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from . import __version__, closed_forms
from .beamsplitter import BsConvention, expand_output
from .classical import DEFAULT_RUNS, INTENSITY_LAWS, ClassicalEnsemble, classical_visibility
from .correlations import c_q, g_q, lossless_record
from .errors import CapacityError, HomRatesError, UndefinedVisibilityError
from .loss import DetectionModel, visibility_eta
from .source import DEFAULT_TAIL, SourceParams, choose_truncation
from .validation import GAMMA_GRID, run_all

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
UNDEFINED = "undefined"
CLI_NMAX_CAP = 400
# options that do not change results and are left out of the config echo
_NOT_ECHOED = {"out", "workers", "config", "func"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "pass" if x else "fail"
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


def parse_range(spec: str, what: str) -> list[float]:
    """``start:stop:step`` (stop inclusive), a comma list, or a single number."""
    spec = str(spec).strip()
    try:
        if ":" in spec:
            start, stop, step = (float(x) for x in spec.split(":"))
            if step <= 0:
                raise UsageError(f"{what}: step must be > 0 in {spec!r}")
            if stop < start:
                raise UsageError(f"{what}: empty range {spec!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        values = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"{what}: cannot parse {spec!r}") from exc
    if not values:
        raise UsageError(f"{what}: empty list")
    return values


def parse_gammas(spec: str) -> list[float]:
    values = parse_range(spec, "--gamma")
    if any(not (g >= 0 and math.isfinite(g)) for g in values):
        raise UsageError("--gamma: gains must be finite and >= 0")
    return values


def parse_etas(spec: str) -> list[float]:
    values = parse_range(spec, "--eta")
    if any(not 0 < e <= 1 for e in values):
        raise UsageError("--eta: efficiencies must lie in (0, 1]")
    return values


def parse_alphas(spec: str) -> list[float]:
    values = parse_range(spec, "--alpha")
    if any(not 0 <= a <= 90 for a in values):
        raise UsageError("--alpha: angles must lie in [0, 90] degrees")
    return values


def parse_nmax(value) -> int | None:
    if str(value).strip().lower() == "auto":
        return None
    try:
        n = int(value)
    except ValueError as exc:
        raise UsageError(f"--nmax: expected an integer or 'auto', got {value!r}") from exc
    if n < 0:
        raise UsageError("--nmax must be >= 0")
    return n


def truncation(gamma: float, args) -> int:
    n = parse_nmax(args.nmax)
    return choose_truncation(gamma, args.tail, max_order=args.nmax_cap) if n is None else n


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    """Ordered map; results land at their input index regardless of completion order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*items)))


# --- row producers (module level so worker processes can pickle them) ---


def _fock_visibility_row(gamma: float, n_max: int):
    if gamma == 0:
        return [gamma, UNDEFINED, UNDEFINED, 0.0, 0.0, UNDEFINED, UNDEFINED, "fock"]
    rec = lossless_record(gamma, n_max)
    return [gamma, rec.g_at_0, rec.g_at_pi2, rec.c_at_0, rec.c_at_pi2, rec.v_g, rec.v_c, "fock"]


def _closed_visibility_row(gamma: float):
    ref = closed_forms.eval_closed(gamma)
    return [gamma, ref.g0, ref.gpi2, ref.c0, ref.cpi2, ref.vg, ref.vc, "closed"]


def _lossy_row(gamma: float, eta: float, n_max: int):
    if gamma == 0:
        return [gamma, eta, UNDEFINED, UNDEFINED]
    rec = visibility_eta(gamma, DetectionModel(eta), n_max)
    return [gamma, eta, rec.v_g, rec.v_c]


def _dip_row(gamma: float, alpha_deg: float, n_max: int):
    state = expand_output(SourceParams(gamma, math.radians(alpha_deg), n_max))
    if gamma == 0:
        # vacuum: both correlators reported as 0 rather than 0/0
        return [gamma, alpha_deg, 0.0, c_q(state)]
    return [gamma, alpha_deg, g_q(state)[2], c_q(state)]


# --- commands ---


def cmd_visibility(args):
    gammas = parse_gammas(args.gamma)
    if args.eta is not None and parse_etas(args.eta) != [1.0]:
        raise UsageError("visibility assumes perfect detection; use the 'lossy' command for eta < 1")
    methods = ["fock", "closed"] if args.method == "both" else [args.method]
    nmax = {g: truncation(g, args) for g in gammas} if "fock" in methods else {}
    fock = dict(zip(gammas, _map(_fock_visibility_row, [(g, nmax[g]) for g in gammas], args.workers))) if nmax else {}
    rows = []
    for g in gammas:
        if "fock" in methods:
            rows.append(fock[g])
        if "closed" in methods:
            rows.append(_closed_visibility_row(g))
    meta = [_nmax_line(nmax)] if nmax else []
    if 0.0 in gammas and "closed" in methods:
        meta.append("gamma=0: closed-form visibilities are the analytic limit 1")
    header = ["gamma", "G_alpha0", "G_alphapi2", "C_alpha0", "C_alphapi2", "V_G", "V_C", "method"]
    return header, rows, meta


def cmd_lossy(args):
    gammas = parse_gammas(args.gamma)
    etas = parse_etas(args.eta if args.eta is not None else "1,0.75,0.5,0.25,0.1")
    nmax = {g: truncation(g, args) for g in gammas}
    items = [(g, e, nmax[g]) for g in gammas for e in etas]
    rows = _map(_lossy_row, items, args.workers)
    return ["gamma", "eta", "V_G_eta", "V_C_eta"], rows, [_nmax_line(nmax)]


def cmd_dip(args):
    gammas = parse_gammas(args.gamma)
    alphas = parse_alphas(args.alpha)
    nmax = {g: truncation(g, args) for g in gammas}
    items = [(g, a, nmax[g]) for g in gammas for a in alphas]
    rows = _map(_dip_row, items, args.workers)
    return ["gamma", "alpha_deg", "G_Q", "C_Q"], rows, [_nmax_line(nmax)]


def cmd_classical(args):
    laws = INTENSITY_LAWS if args.law == "all" else (args.law,)
    overlaps = parse_range(args.overlap, "--overlap")
    if any(not 0 <= x <= 1 for x in overlaps):
        raise UsageError("--overlap values must lie in [0, 1]")
    rows = []
    for law in laws:
        for overlap in overlaps:
            v = classical_visibility(
                ClassicalEnsemble(args.runs, overlap, law, args.seed),
                ClassicalEnsemble(args.runs, 0.0, law, args.seed + 1),
                workers=args.workers,
            )
            bound = v.v_g <= 0.5 + 3 * v.v_g_stderr and v.v_c <= 0.5 + 3 * v.v_c_stderr
            rows.append([law, overlap, args.runs, args.seed, v.v_g, v.v_g_stderr, v.v_c, v.v_c_stderr, bound])
    header = ["law", "overlap", "runs", "seed", "v_g", "v_g_stderr", "v_c", "v_c_stderr", "bound"]
    return header, rows, ["bound: v <= 0.5 + 3 stderr for both correlators"]


def cmd_validate(args):
    gammas = parse_gammas(args.gamma) if args.gamma is not None else list(GAMMA_GRID)
    convention = BsConvention(mode2_b_sign=+1) if args.perturb_convention else BsConvention()
    results = run_all(gammas, runs=args.runs, seed=args.seed, tail=args.tail, convention=convention)
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  time(s)  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.2f}  {r.detail}")
    ok = all(r.passed for r in results)
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", ok


COMMANDS = {
    "visibility": cmd_visibility,
    "lossy": cmd_lossy,
    "dip": cmd_dip,
    "classical": cmd_classical,
}


def _nmax_line(nmax: dict) -> str:
    return "n_max: " + " ".join(f"{g!r}={n}" for g, n in nmax.items())


def render_csv(args, header, rows, meta) -> str:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}
    buf = io.StringIO()
    buf.write(f"# homrates {__version__}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    for line in meta:
        buf.write(f"# {line}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


def render_svg(command, header, rows) -> str:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "homrates"
    fig, ax = plt.subplots(figsize=(6, 4))
    num = lambda x: float("nan") if isinstance(x, str) else x  # noqa: E731
    if command == "visibility":
        for method, style in (("fock", "o"), ("closed", "-")):
            sel = [r for r in rows if r[-1] == method]
            if sel:
                g = [r[0] for r in sel]
                ax.plot(g, [num(r[5]) for r in sel], style, label=f"V_G ({method})")
                ax.plot(g, [num(r[6]) for r in sel], style, label=f"V_C ({method})")
        ax.axhline(0.5, color="gray", lw=0.8, ls=":")
        ax.set_xlabel("gain")
        ax.set_ylabel("visibility")
    elif command == "lossy":
        for eta in sorted({r[1] for r in rows}, reverse=True):
            sel = [r for r in rows if r[1] == eta]
            ax.plot([r[0] for r in sel], [num(r[3]) for r in sel], label=f"V_C, eta={eta:g}")
        sel = [r for r in rows if r[1] == max(r[1] for r in rows)]
        ax.plot([r[0] for r in sel], [num(r[2]) for r in sel], "k--", label="V_G")
        ax.axhline(0.5, color="gray", lw=0.8, ls=":")
        ax.set_xlabel("gain")
        ax.set_ylabel("visibility")
    elif command == "dip":
        for gamma in sorted({r[0] for r in rows}):
            sel = [r for r in rows if r[0] == gamma]
            ax.plot([r[1] for r in sel], [r[2] for r in sel], "-", label=f"G_Q, gain={gamma:g}")
            ax.plot([r[1] for r in sel], [r[3] for r in sel], "--", label=f"C_Q, gain={gamma:g}")
        ax.set_xlabel("alpha (deg)")
        ax.set_ylabel("correlation")
    else:
        labels = [f"{r[0]} ov={r[1]:g}" for r in rows]
        x = range(len(rows))
        ax.errorbar(x, [r[4] for r in rows], yerr=[3 * r[5] for r in rows], fmt="o", label="v_g")
        ax.errorbar(x, [r[6] for r in rows], yerr=[3 * r[7] for r in rows], fmt="s", label="v_c")
        ax.axhline(0.5, color="gray", lw=0.8, ls=":")
        ax.set_xticks(list(x), labels, rotation=20)
        ax.set_ylabel("visibility")
    ax.legend(fontsize=7)
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying any option; flags override it")
    common.add_argument("--gamma", help="gains: start:stop:step, comma list or single value")
    common.add_argument("--eta", help="detection efficiencies, comma list")
    common.add_argument("--alpha", default="0:90:5", help="angles in degrees (dip only)")
    common.add_argument("--nmax", default="auto", help="pair cutoff, integer or 'auto'")
    common.add_argument("--tail", type=float, default=DEFAULT_TAIL, help="tail weight for --nmax auto")
    common.add_argument("--nmax-cap", type=int, default=CLI_NMAX_CAP, help="largest cutoff 'auto' may pick")
    common.add_argument("--method", choices=["fock", "closed", "both"], default="both")
    common.add_argument("--runs", type=int, default=DEFAULT_RUNS, help="Monte Carlo runs per ensemble")
    common.add_argument("--seed", type=int, default=2024)
    common.add_argument("--law", choices=[*INTENSITY_LAWS, "all"], default="all", help="classical intensity law")
    common.add_argument("--overlap", default="1", help="pulse overlaps for the classical dip")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "svg"], default="csv")
    common.add_argument("--perturb-convention", action="store_true", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="homrates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"homrates {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = {
        "visibility": {"gamma": "0.1:1.5:0.1"},
        "lossy": {"gamma": "0.1:1.0:0.1"},
        "dip": {"gamma": "0.5"},
        "classical": {},
        "validate": {"gamma": None},
    }
    parser.subcommands = {}
    for name, extra in defaults.items():
        p = sub.add_parser(name, parents=[common])
        p.set_defaults(**extra)
        parser.subcommands[name] = p
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            parser.error(f"config {args.config} is not valid JSON: {exc}")
        if not isinstance(config, dict):
            parser.error("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
        unknown = set(config) - set(vars(args)) - {"command"}
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        config.pop("command", None)
        parser.subcommands[args.command].set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        if args.command == "validate":
            text, ok = cmd_validate(args)
            _emit(text, args.out)
            return EXIT_OK if ok else EXIT_VALIDATION
        header, rows, meta = COMMANDS[args.command](args)
        if args.format == "svg":
            if args.out is None:
                raise UsageError("--format svg needs --out")
            text = render_svg(args.command, header, rows)
        else:
            text = render_csv(args, header, rows, meta)
        _emit(text, args.out)
    except UsageError as exc:
        print(f"homrates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, UndefinedVisibilityError, ValueError) as exc:
        print(f"homrates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"homrates: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HomRatesError as exc:
        print(f"homrates: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
