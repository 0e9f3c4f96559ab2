"""Command-line front end: parameter sweeps written as CSV.

Subcommands
-----------
planewave     Carlitz-Willey plane-wave channels over a frequency grid.
packet        Wave-packet channels over a (j, n) grid for cw or darcx mirrors.
optimize-eps  Bin width that maximizes tau for a Carlitz-Willey packet.
selftest      Built-in oracle checks.

Settings are resolved in the order defaults < ``--preset`` < ``--config``
< explicit flags.  A config file holds ``key = value`` lines whose keys are
flag names without the leading dashes (``omega-min`` or ``omega_min``);
``#`` starts a comment.

Exit status: 0 success, 1 failed computation or selftest, 2 usage error,
3 sweep finished but some rows missed their error target.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .bogoliubov import cw_coefficients, numeric_coefficients
from .channel import (
    PACKET_TAU_TOL,
    PLANEWAVE_TAU_TOL,
    ChannelError,
    assemble_packet,
    assemble_planewave,
    canonical_params,
    optimize_epsilon,
)
from .specfun import gamma_imag_modulus, lambert_w0, loggamma
from .trajectory import CarlitzWilley, Darcx
from .wavepacket import PacketIndex, packet_norm

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_FLAGGED = 3

log = logging.getLogger("mirrorchannel")

PLANEWAVE_HEADER = ("omega", "kappa", "cutoff_low", "cutoff_high", "tau", "n_bar", "class")
PACKET_HEADER = ("traj", "kappa", "epsilon", "xi", "nu", "j", "n", "tau", "n_bar", "class", "quad_error")
OFFSET_COLUMN = "tau_minus_one"

DEFAULTS: dict[str, Any] = {
    "kappa": 1.0,
    "epsilon": 0.1,
    "omega_min": 0.05,
    "omega_max": 20.0,
    "omega_steps": 50,
    "j_min": 0,
    "j_max": 4,
    "n_min": -40,
    "n_max": 40,
    "j": 0,
    "n": 0,
    "cutoff_low": 1e-30,
    "cutoff_high": 1e30,
    "traj": "cw",
    "xi": None,
    "nu": None,
    "xi_nu": None,
    "units": None,
    "window": 400.0,
    "tol": 1e-4,
    "tau_offset": False,
    "eps_min": None,
    "eps_max": None,
    "out": None,
    "jobs": 1,
}

PRESETS: dict[str, dict[str, Any]] = {
    "fig1": {"traj": "cw", "kappa": 1.0, "epsilon": 0.1, "j_min": 0, "j_max": 4, "n_min": -40, "n_max": 40},
    "fig2": {"traj": "cw", "kappa": 1.0, "epsilon": 0.1, "j_min": 0, "j_max": 4, "n_min": -40, "n_max": 40},
    "fig3": {
        "traj": "darcx",
        "epsilon": 2e-44,
        "xi": "5.6e-27,3.6e-27,1.6e-27",
        "xi_nu": 1e-50,
        "j_min": 0,
        "j_max": 0,
        "n_min": -40,
        "n_max": 40,
    },
}

_FLOAT_KEYS = {
    "kappa", "epsilon", "omega_min", "omega_max", "cutoff_low", "cutoff_high", "nu", "xi_nu",
    "window", "tol", "eps_min", "eps_max",
}
_INT_KEYS = {"omega_steps", "j_min", "j_max", "n_min", "n_max", "j", "n", "jobs"}
_STR_KEYS = {"traj", "xi", "units", "out"}
_BOOL_KEYS = {"tau_offset"}


class UsageError(Exception):
    """Invalid invocation; reported with exit status 2."""


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text not in ("true", "false", "1", "0", "yes", "no"):
            raise UsageError(f"bad value for {key}: {value!r}")
        return text in ("true", "1", "yes")
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc
    return str(value)


def read_config(path: str) -> dict[str, Any]:
    """Parse a ``key = value`` config file."""
    if not os.path.isfile(path):
        raise UsageError(f"config file not found: {path}")
    out: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS and key != "preset":
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, preset, config file and explicit flags."""
    settings = dict(DEFAULTS)
    config = read_config(args.config) if getattr(args, "config", None) else {}
    preset = getattr(args, "preset", None) or config.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise UsageError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        settings.update(PRESETS[preset])
    settings.update(config)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    settings = {k: _coerce(k, v) for k, v in settings.items()}
    settings["preset"] = preset
    return settings


# ---------------------------------------------------------------------------
# CSV helpers
# ---------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def _csv_text(header: Sequence[str], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row.get(col)) for col in header) + "\n")
    return buf.getvalue()


def _emit(text: str, settings: dict[str, Any], meta: dict[str, Any]) -> None:
    out = settings.get("out")
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(out + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _run_pool(func: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------------------
# Plane-wave sweep
# ---------------------------------------------------------------------------


def _planewave_row(item: tuple[float, float, float, float]) -> dict[str, Any]:
    omega, kappa, lo, hi = item
    params = canonical_params(assemble_planewave(omega, kappa, lo, hi), tol=PLANEWAVE_TAU_TOL)
    return {
        "omega": omega,
        "kappa": kappa,
        "cutoff_low": lo,
        "cutoff_high": hi,
        "tau": params.tau,
        "n_bar": params.n_bar,
        "class": params.cls.value,
        "physical": params.physical,
    }


def omega_grid(settings: dict[str, Any]) -> np.ndarray:
    steps = settings["omega_steps"]
    lo, hi = settings["omega_min"], settings["omega_max"]
    if steps is None or steps < 1:
        raise UsageError("omega grid is empty (omega-steps must be at least 1)")
    if not (lo > 0.0 and math.isfinite(lo)):
        raise UsageError("omega-min must be positive")
    if steps == 1:
        return np.array([lo])
    if not (hi >= lo and math.isfinite(hi)):
        raise UsageError("omega grid is empty (omega-max must not be below omega-min)")
    return np.geomspace(lo, hi, steps)


def run_planewave_sweep(settings: dict[str, Any]) -> int:
    """Write the plane-wave CSV; rows are in ascending frequency."""
    if settings["traj"] != "cw":
        raise UsageError(
            "plane-wave channels need a horizon: for a mirror that is asymptotically inertial "
            "the plane wave approach leads to undefined tau; use the packet subcommand"
        )
    t0 = time.perf_counter()
    grid = omega_grid(settings)
    kappa, lo, hi = settings["kappa"], settings["cutoff_low"], settings["cutoff_high"]
    if not (kappa > 0.0):
        raise UsageError("kappa must be positive")
    if not (0.0 < lo < hi):
        raise UsageError("cutoffs must satisfy 0 < cutoff-low < cutoff-high")
    if math.log(hi / lo) <= 1.0 / float(grid[0]):
        raise UsageError(
            f"ln(cutoff-high/cutoff-low) must exceed 1/omega-min = {1.0 / grid[0]:.6g} for a positive noise matrix"
        )
    rows = _run_pool(_planewave_row, [(float(w), kappa, lo, hi) for w in grid], settings["jobs"])
    rows.sort(key=lambda r: r["omega"])
    unphysical = [r["omega"] for r in rows if not r["physical"]]
    meta = _metadata("planewave", settings, t0, len(rows), flagged=[])
    meta["tau_tolerance"] = PLANEWAVE_TAU_TOL
    meta["below_complete_positivity_bound"] = unphysical
    _emit(_csv_text(PLANEWAVE_HEADER, rows), settings, meta)
    if unphysical:
        log.warning("%d rows fall below the complete-positivity bound; widen the cutoffs", len(unphysical))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Packet sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _PacketTask:
    traj: str
    kappa: float | None
    epsilon: float
    xi: float | None
    nu: float | None
    j: int
    n: int
    units: str | None
    window: float
    tol: float


def _packet_row(task: _PacketTask) -> dict[str, Any]:
    index = PacketIndex(task.j, task.n, task.epsilon)
    source: Any = task.kappa if task.traj == "cw" else Darcx(task.xi, task.nu)
    row: dict[str, Any] = {
        "traj": task.traj,
        "kappa": task.kappa,
        "epsilon": task.epsilon,
        "xi": task.xi,
        "nu": task.nu,
        "j": task.j,
        "n": task.n,
    }
    try:
        pair = assemble_packet(source, index, units=task.units, window=task.window, tol=task.tol)
        params = canonical_params(pair, tol=PACKET_TAU_TOL)
    except (ChannelError, ArithmeticError, ValueError) as exc:
        row.update(tau=math.nan, n_bar=math.nan, **{"class": "failed"}, quad_error=math.inf)
        row[OFFSET_COLUMN] = math.nan
        row["flag"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(tau=params.tau, n_bar=params.n_bar, quad_error=pair.quad_error)
    row[OFFSET_COLUMN] = pair.tau_offset if pair.tau_offset is not None else params.tau - 1.0
    row["class"] = params.cls.value
    if not pair.converged:
        row["flag"] = "; ".join(pair.notes) or "not converged"
    elif not pair.is_physical():
        row["flag"] = "below the complete-positivity bound"
    return row


def _xi_values(settings: dict[str, Any]) -> list[float]:
    raw = settings["xi"]
    if raw is None:
        raise UsageError("--xi is required for darcx")
    try:
        values = [float(v) for v in str(raw).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --xi list: {raw!r}") from exc
    if not values:
        raise UsageError("--xi list is empty")
    return values


def packet_tasks(settings: dict[str, Any]) -> list[_PacketTask]:
    traj = settings["traj"]
    eps = settings["epsilon"]
    if not (eps is not None and eps > 0.0):
        raise UsageError("epsilon must be positive")
    j_range = range(settings["j_min"], settings["j_max"] + 1)
    n_range = range(settings["n_min"], settings["n_max"] + 1)
    if len(j_range) == 0 or len(n_range) == 0 or settings["j_min"] < 0:
        raise UsageError("(j, n) grid is empty or j-min is negative")
    common = {"units": settings["units"], "window": settings["window"], "tol": settings["tol"]}
    if traj == "cw":
        if not (settings["kappa"] > 0.0):
            raise UsageError("kappa must be positive")
        pairs = [(settings["kappa"], None, None)]
    elif traj == "darcx":
        pairs = []
        for xi in _xi_values(settings):
            nu = settings["nu"]
            if nu is None:
                if settings["xi_nu"] is None:
                    raise UsageError("darcx needs --nu or --xi-nu")
                nu = settings["xi_nu"] / xi
            if not (0.0 < abs(xi) < 1.0) or nu == 0.0:
                raise UsageError("darcx needs 0 < |xi| < 1 and nu != 0")
            pairs.append((None, xi, nu))
    else:
        raise UsageError(f"unknown trajectory {traj!r}; choose cw or darcx")
    return [
        _PacketTask(traj, kappa, eps, xi, nu, j, n, **common)
        for kappa, xi, nu in pairs
        for j in j_range
        for n in n_range
    ]


def run_packet_sweep(settings: dict[str, Any]) -> int:
    """Write the packet CSV; rows ordered by (xi, j, n) with j and n ascending."""
    t0 = time.perf_counter()
    tasks = packet_tasks(settings)
    order = {id(t): k for k, t in enumerate(tasks)}
    rows = _run_pool(_packet_row, tasks, settings["jobs"])
    keyed = sorted(zip(tasks, rows), key=lambda tr: order[id(tr[0])])
    rows = [r for _, r in keyed]
    flagged = [{"j": r["j"], "n": r["n"], "xi": r["xi"], "reason": r["flag"]} for r in rows if "flag" in r]
    meta = _metadata("packet", settings, t0, len(rows), flagged)
    meta["tau_tolerance"] = PACKET_TAU_TOL
    header = PACKET_HEADER + ((OFFSET_COLUMN,) if settings["tau_offset"] else ())
    if settings["traj"] != "cw" and not settings["tau_offset"]:
        meta["note"] = "tau may equal 1 to double precision; --tau-offset adds tau - 1 at full precision"
    _emit(_csv_text(header, rows), settings, meta)
    if flagged:
        log.warning("%d of %d rows missed their error target; see the sidecar metadata", len(flagged), len(rows))
        return EXIT_FLAGGED
    return EXIT_OK


def _metadata(mode: str, settings: dict[str, Any], t0: float, count: int, flagged: list) -> dict[str, Any]:
    return {
        "mode": mode,
        "version": __version__,
        "settings": {k: v for k, v in settings.items()},
        "rows": count,
        "flagged": flagged,
        "csv_float_format": "%.17g",
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


# ---------------------------------------------------------------------------
# Epsilon optimization
# ---------------------------------------------------------------------------


def run_optimize(settings: dict[str, Any]) -> int:
    kappa = settings["kappa"]
    if not (kappa > 0.0):
        raise UsageError("kappa must be positive")
    lo = settings["eps_min"] if settings["eps_min"] is not None else kappa / 100.0
    hi = settings["eps_max"] if settings["eps_max"] is not None else kappa
    if not (0.0 < lo < hi):
        raise UsageError("need 0 < eps-min < eps-max")
    res = optimize_epsilon(kappa, settings["j"], settings["n"], (lo, hi))
    rows = [
        {
            "kappa": kappa,
            "j": settings["j"],
            "n": settings["n"],
            "epsilon": res.epsilon,
            "tau": res.tau,
            "method": res.method,
            "at_boundary": res.at_boundary,
        }
    ]
    header = ("kappa", "j", "n", "epsilon", "tau", "method", "at_boundary")
    meta = _metadata("optimize-eps", settings, time.perf_counter(), 1, [])
    meta["search_range"] = [lo, hi]
    _emit(_csv_text(header, rows), settings, meta)
    if res.at_boundary:
        log.warning("maximum lies on the edge of the search range [%g, %g]", lo, hi)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Self test
# ---------------------------------------------------------------------------


FAULTS = ("gamma-branch",)


def selftest_checks(fault: str | None = None) -> list[tuple[str, bool, str]]:
    """Run the built-in oracle checks; returns ``(name, passed, detail)`` triples.

    ``fault="gamma-branch"`` uses the unphysical branch of the Gamma phase in
    the closed-form coefficients, which the thermal-spectrum check must catch.
    """
    branch = -1 if fault == "gamma-branch" else 1
    results: list[tuple[str, bool, str]] = []

    xs = np.array([-1.0 / math.e + 1e-12, -0.2, 0.0, 0.5, 1.0, math.e, 10.0, 1e6])
    w = np.asarray(lambert_w0(xs))
    resid = float(np.max(np.abs(w * np.exp(w) - xs) / np.maximum(np.abs(xs), 1e-300)[None]))
    results.append(("lambert_w identity", resid <= 1e-13, f"max relative residual {resid:.2e}"))

    ys = np.array([0.01, 0.3, 1.0, 5.0, 40.0])
    g2 = np.abs(np.exp(np.asarray(loggamma(1j * ys)))) ** 2
    ref = math.pi / (ys * np.sinh(math.pi * ys))
    err = float(np.max(np.abs(g2 / ref - 1.0)))
    results.append(("gamma reflection |Gamma(iy)|^2", err <= 1e-12, f"max relative error {err:.2e}"))
    err = float(np.max(np.abs(np.asarray(gamma_imag_modulus(ys)) ** 2 / ref - 1.0)))
    results.append(("gamma modulus path", err <= 1e-12, f"max relative error {err:.2e}"))

    worst = 0.0
    for omega in (0.1, 1.0, 3.0):
        for omega_p in (0.2, 2.0):
            for kappa in (0.5, 2.0):
                pair = cw_coefficients(omega, omega_p, kappa, branch=branch)
                thermal = abs(pair.beta) ** 2 * 2 * math.pi * kappa * omega_p * math.expm1(2 * math.pi * omega / kappa)
                ratio = abs(pair.beta / pair.alpha) ** 2 / math.exp(-2 * math.pi * omega / kappa)
                worst = max(worst, abs(thermal - 1.0), abs(ratio - 1.0))
    results.append(("thermal spectrum", worst <= 1e-10, f"max deviation {worst:.2e}"))

    cw = CarlitzWilley(1.0)
    num = numeric_coefficients(cw, 1.0, 0.5)
    ana = cw_coefficients(1.0, 0.5, 1.0, branch=branch)
    err = max(abs(abs(num.alpha) / abs(ana.alpha) - 1), abs(abs(num.beta) / abs(ana.beta) - 1))
    results.append(("numeric vs closed-form coefficients", err <= 1e-2, f"relative modulus error {err:.2e}"))

    worst = 0.0
    for omega in (0.05, 1.0, 20.0):
        for kappa in (0.05, 1.0, 20.0):
            tau = assemble_planewave(omega, kappa, 1e-30, 1e30).tau
            worst = max(worst, abs(tau * 2 * math.pi * omega * kappa - 1.0))
    results.append(("transmissivity law det T = 1/(2 pi w kappa)", worst <= 1e-12, f"max relative error {worst:.2e}"))

    norm = packet_norm(PacketIndex(1, 0, 0.1), 1.0)
    results.append(("packet normalization", abs(norm.value - 1.0) <= 1e-3, f"integral {norm.value:.8f}"))
    return results


def run_selftest(fault: str | None = None) -> int:
    results = selftest_checks(fault)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 as well; keep the message format
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value settings file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="figure presets: fig1, fig2 (cw grids), fig3 (darcx)")
    p.add_argument("--out", metavar="PATH", help="CSV output path (stdout if omitted); PATH.json gets metadata")
    p.add_argument("--jobs", type=int, metavar="K", help="worker processes")
    p.add_argument("--kappa", type=float, help="surface gravity of the Carlitz-Willey mirror")
    p.add_argument("--traj", choices=("cw", "darcx"), help="mirror trajectory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mirrorchannel",
        description="Gaussian channels from reflection off accelerating mirrors.",
        epilog=(
            "Config files hold 'key = value' lines with keys named like the flags "
            "(omega-min or omega_min). Exit status: 0 ok, 1 failure, 2 usage error, "
            "3 rows flagged as not converged."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    pw = sub.add_parser("planewave", help="plane-wave sweep over omega")
    _common(pw)
    pw.add_argument("--omega-min", type=float)
    pw.add_argument("--omega-max", type=float)
    pw.add_argument("--omega-steps", type=int, help="log-spaced grid points; 1 gives omega-min only")
    pw.add_argument("--cutoff-low", type=float)
    pw.add_argument("--cutoff-high", type=float)

    pk = sub.add_parser("packet", help="wave-packet sweep over (j, n)")
    _common(pk)
    pk.add_argument("--epsilon", type=float, help="frequency bin width")
    pk.add_argument("--j-min", type=int)
    pk.add_argument("--j-max", type=int)
    pk.add_argument("--n-min", type=int)
    pk.add_argument("--n-max", type=int)
    pk.add_argument("--xi", type=str, help="darcx xi, or a comma-separated list")
    pk.add_argument("--nu", type=float, help="darcx nu")
    pk.add_argument("--xi-nu", type=float, help="fix |xi nu| and derive nu = xi-nu / xi for each xi")
    pk.add_argument("--units", choices=("natural", "bin"), help="coefficient units (default: natural for cw, bin for darcx)")
    pk.add_argument("--window", type=float, help="half-width of the log-frequency window for cw noise integrals")
    pk.add_argument("--tol", type=float, help="relative error target for noise integrals")
    pk.add_argument(
        "--tau-offset",
        action="store_const",
        const=True,
        help="append a tau_minus_one column computed without cancellation (resolves near-static mirrors)",
    )

    op = sub.add_parser("optimize-eps", help="bin width maximizing tau(j, n)")
    _common(op)
    op.add_argument("--j", type=int)
    op.add_argument("--n", type=int)
    op.add_argument("--eps-min", type=float, help="default kappa/100")
    op.add_argument("--eps-max", type=float, help="default kappa")

    st = sub.add_parser("selftest", help="run the built-in oracle checks")
    st.add_argument("--inject-fault", choices=FAULTS, help="deliberately break a formula (test hook)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s: %(message)s",
            stream=sys.stderr,
        )
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        if args.command == "selftest":
            return run_selftest(args.inject_fault)
        settings = resolve_settings(args)
        if settings["jobs"] < 1:
            raise UsageError("--jobs must be at least 1")
        if args.command == "planewave":
            return run_planewave_sweep(settings)
        if args.command == "packet":
            return run_packet_sweep(settings)
        return run_optimize(settings)
    except UsageError as exc:
        print(f"mirrorchannel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ChannelError, ArithmeticError) as exc:
        print(f"mirrorchannel: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
