"""Command-line front end.

Every option can also come from a ``key = value`` config file (``--config``);
command-line flags win over the file, the file wins over defaults. The fully
resolved configuration is echoed at the top of every CSV as
``# config: key = value`` lines and under ``"config"`` in every JSON object.
Such an output file can be handed back as ``--config`` to reproduce it.
Environment variables are never consulted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .counting import Backend, CountingConfig, counting_error_bound, quantum_count
from .detector import OutsideSupportError, detect_sweep, ml_decide
from .estimator import PdfEstimate, count_point, estimate_pdf, kl_divergence
from .grover import Oracle, optimal_iterations, search
from .statevector import ResourceError
from .vdb import SystemModel

ECHO_PREFIX = "# config:"

MODEL_KEYS = ["n", "sigma", "bin_width", "range_min", "range_max", "alphabet"]
COUNTING_KEYS = ["t", "backend", "samples", "seed"]

BACKENDS = {
    "quantum": Backend.SUBSPACE,
    "subspace": Backend.SUBSPACE,
    "statevector": Backend.STATEVECTOR,
    "classical": Backend.CLASSICAL,
}


class ConfigError(ValueError):
    pass


def parse_alphabet(text: str) -> List[float]:
    try:
        values = [float(v) for v in str(text).replace(" ", "").strip("[]").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alphabet {text!r}; expected e.g. -1,1") from None
    if not values:
        raise argparse.ArgumentTypeError("alphabet is empty")
    return values


def read_config_file(path: str) -> Dict[str, str]:
    """Parse ``key = value`` lines.

    Lines starting with ``# config:`` are config echoes from a previous
    output; when a file has any, every other line is ignored so an emitted
    CSV works as a config file.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    echoed = [ln[len(ECHO_PREFIX):] for ln in lines if ln.startswith(ECHO_PREFIX)]
    body = echoed if echoed else lines
    out = {}
    for lineno, raw in enumerate(body, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if not math.isfinite(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, Backend):
        return v.value
    return v


# -- argument parsing --------------------------------------------------------

def _common(parser: argparse.ArgumentParser, model=True, counting=True) -> None:
    g = parser.add_argument_group("run")
    g.add_argument("--config", help="key = value config file (or a previous output)")
    g.add_argument("--output", "-o", help="write to this path instead of stdout")
    g.add_argument("--format", choices=["csv", "json"], default=None)
    if model:
        m = parser.add_argument_group("model")
        m.add_argument("--n", type=int, help="database qubits (default 15)")
        m.add_argument("--sigma", type=float, help="noise standard deviation (default 0.9)")
        m.add_argument("--bin-width", type=float, help="quantizer bin width (default 0.1)")
        m.add_argument("--range-min", type=float, help="lowest bin center (default -6)")
        m.add_argument("--range-max", type=float, help="highest bin center (default 6)")
        m.add_argument("--alphabet", type=parse_alphabet,
                       help="comma-separated source symbols (default -1,1; use --alphabet=-1,1)")
    if counting:
        c = parser.add_argument_group("counting")
        c.add_argument("--t", type=int, help="counting qubits (default n + 4)")
        c.add_argument("--backend", choices=sorted(BACKENDS), help="default quantum (= subspace)")
        c.add_argument("--samples", type=int, help="sample this many outcomes instead of exact readout")
        c.add_argument("--seed", type=int, help="seed for --samples (default 0)")


DEFAULTS = {
    "n": 15,
    "sigma": 0.9,
    "bin_width": 0.1,
    "range_min": -6.0,
    "range_max": 6.0,
    "alphabet": [-1.0, 1.0],
    "t": None,
    "backend": "quantum",
    "samples": None,
    "seed": 0,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpdf", description="Quantum-counting pdf estimation and ML detection (simulated)."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("count", help="quantum counting outcome distribution for one bin")
    _common(p)
    p.add_argument("--marked-bin", type=float, help="observed value r whose bin is marked")
    p.add_argument("--s", type=float, help="source symbol (default: first of alphabet)")
    p.add_argument("--summary", help="also write the JSON summary to this path")

    p = sub.add_parser("search", help="Grover search outcome distribution")
    _common(p)
    p.add_argument("--marked-bin", type=float, help="observed value r whose bin is marked")
    p.add_argument("--s", type=float)
    p.add_argument("--k", type=int, help="Grover iterations (default: optimal for the true M)")

    p = sub.add_parser("estimate-point", help="bin mass f(r|s) at one received value")
    _common(p)
    p.add_argument("--r", type=float)
    p.add_argument("--s", type=float)

    p = sub.add_parser("estimate-pdf", help="bin masses over a grid of received values")
    _common(p)
    p.add_argument("--s", type=float)
    p.add_argument("--grid-min", type=float, help="default s - 4 sigma")
    p.add_argument("--grid-max", type=float, help="default s + 4 sigma")

    p = sub.add_parser("detect", help="maximum-likelihood decision for one received value")
    _common(p)
    p.add_argument("--r", type=float)

    p = sub.add_parser("detect-sweep", help="decisions and per-symbol masses over a grid of r")
    _common(p)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)

    p = sub.add_parser("kl", help="KL divergence between two pdf CSV files")
    p.add_argument("p", help="CSV with r,mass columns")
    p.add_argument("q", help="CSV with r,mass columns")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--config", help=argparse.SUPPRESS)

    p = sub.add_parser("dump-vdb", help="virtual database rows x, n_x, g(s,x)")
    _common(p, counting=False)
    p.add_argument("--s", type=float)
    return parser


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> Dict[str, object]:
    """Merge flags, config file and defaults into one flat dict."""
    file_values = read_config_file(args.config) if args.config else {}
    sub = _subparser(parser, args.command)
    converters = {a.dest: a.type for a in sub._actions if a.dest not in ("help", "config")}
    resolved = {}
    for dest, conv in converters.items():
        if dest in ("output", "config", "format", "summary", "p", "q"):
            continue
        value = getattr(args, dest)
        if value is None and dest in file_values and file_values[dest] != "":
            try:
                value = conv(file_values[dest]) if conv else file_values[dest]
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {dest}: {exc}") from None
        if value is None:
            value = DEFAULTS.get(dest)
        resolved[dest] = value
    if "backend" in resolved and resolved["backend"] not in BACKENDS:
        raise ConfigError(f"unknown backend {resolved['backend']!r}")
    if "t" in resolved and resolved["t"] is None:
        resolved["t"] = resolved["n"] + 4
    return resolved


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def model_from(cfg: Dict[str, object]) -> SystemModel:
    return SystemModel.build(
        n=cfg["n"], sigma=cfg["sigma"], bin_width=cfg["bin_width"],
        range_min=cfg["range_min"], range_max=cfg["range_max"], alphabet=cfg["alphabet"],
    )


def counting_from(cfg: Dict[str, object]) -> CountingConfig:
    return CountingConfig(
        database_qubits=cfg["n"], counting_qubits=cfg["t"], backend=BACKENDS[cfg["backend"]],
        samples=cfg["samples"], seed=cfg["seed"],
    )


def _symbol(cfg, model: SystemModel) -> float:
    if cfg.get("s") is None:
        cfg["s"] = model.source_alphabet[0]
    return model.check_symbol(cfg["s"])


def _require(cfg, key: str, flag: str) -> None:
    if cfg.get(key) is None:
        raise ConfigError(f"missing required value {flag}")


# -- emitters ----------------------------------------------------------------

def _echo(command: str, cfg: Dict[str, object]) -> List[str]:
    lines = [f"{ECHO_PREFIX} command = {command}"]
    lines += [f"{ECHO_PREFIX} {k} = {_fmt(v)}" for k, v in cfg.items()]
    return lines


def emit_csv(command: str, cfg, header: Sequence[str], rows, extra: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in _echo(command, cfg):
        buf.write(line + "\n")
    for line in extra:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_json(command: str, cfg, payload: dict) -> str:
    obj = {"command": command, "config": _jsonable(cfg)}
    obj.update(_jsonable(payload))
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _mass_column(s: float) -> str:
    name = f"{abs(s):g}".replace(".", "p")
    return f"mass_{'minus' if s < 0 else 'plus'}{name}"


# -- subcommands ---------------------------------------------------------------

def cmd_count(cfg, fmt):
    _require(cfg, "marked_bin", "--marked-bin")
    model = model_from(cfg)
    s = _symbol(cfg, model)
    oracle = Oracle(model.database_qubits, model.match_predicate(cfg["marked_bin"], s))
    config = counting_from(cfg)
    if config.backend is Backend.CLASSICAL:
        raise ConfigError("count needs a quantum backend (quantum, subspace or statevector)")
    outcome = quantum_count(oracle, config)
    M_true = model.classical_count(cfg["marked_bin"], s)
    summary = {
        "N": model.N,
        "M_true": M_true,
        "t": config.t,
        "M_hat": outcome.point_estimate,
        "M_hat_rounded": outcome.rounded_estimate(),
        "most_probable_outcome": outcome.most_probable_outcome,
        "bound": counting_error_bound(M_true, model.N, config.t),
        "coverage": outcome.coverage(M_true),
    }
    probs = outcome.outcome_distribution.probabilities
    est = outcome.count_estimates
    if fmt == "json":
        dist = [{"outcome": m, "probability": probs[m], "count_estimate": est[m]}
                for m in range(len(probs))]
        return emit_json("count", cfg, {"summary": summary, "distribution": dist}), summary
    rows = ((m, float(probs[m]), float(est[m])) for m in range(len(probs)))
    extra = ["# summary: " + json.dumps(_jsonable(summary))]
    return emit_csv("count", cfg, ["outcome", "probability", "count_estimate"], rows, extra), summary


def cmd_search(cfg, fmt):
    _require(cfg, "marked_bin", "--marked-bin")
    model = model_from(cfg)
    s = _symbol(cfg, model)
    pred = model.match_predicate(cfg["marked_bin"], s)
    oracle = Oracle.from_predicate(model.database_qubits, pred, with_count=True)
    if cfg["k"] is None:
        cfg["k"] = optimal_iterations(model.N, oracle.marked_count)
    dist = search(oracle, cfg["k"])
    mask = oracle.mask()
    summary = {"N": model.N, "M": oracle.marked_count, "k": cfg["k"],
               "marked_probability": dist.mass(np.flatnonzero(mask))}
    if fmt == "json":
        return emit_json("search", cfg, {"summary": summary,
                                         "probabilities": dist.probabilities})
    rows = ((x, float(dist[x]), int(mask[x])) for x in range(model.N))
    extra = ["# summary: " + json.dumps(_jsonable(summary))]
    return emit_csv("search", cfg, ["index", "probability", "marked"], rows, extra)


def cmd_estimate_point(cfg, fmt):
    _require(cfg, "r", "--r")
    model = model_from(cfg)
    s = _symbol(cfg, model)
    est = count_point(model, cfg["r"], s, counting_from(cfg))
    payload = {
        "r": est.r,
        "s": est.s,
        "count_estimate": est.count,
        "mass": est.mass,
        "density": est.mass / model.bin_width,
        "bound": est.bound / model.N,
    }
    if fmt == "csv":
        return emit_csv("estimate-point", cfg, list(payload), [list(payload.values())])
    return emit_json("estimate-point", cfg, payload)


def cmd_estimate_pdf(cfg, fmt):
    model = model_from(cfg)
    s = _symbol(cfg, model)
    lo = cfg["grid_min"] if cfg["grid_min"] is not None else s - 4 * model.noise_sigma
    hi = cfg["grid_max"] if cfg["grid_max"] is not None else s + 4 * model.noise_sigma
    grid = model.quantizer.centers_between(lo, hi)
    pdf = estimate_pdf(model, s, grid, counting_from(cfg))
    if fmt == "json":
        return emit_json("estimate-pdf", cfg, {"r": pdf.grid, "mass": pdf.mass,
                                               "density": pdf.density})
    rows = zip(pdf.grid.tolist(), pdf.mass.tolist(), pdf.density.tolist())
    return emit_csv("estimate-pdf", cfg, ["r", "mass", "density"], rows)


def cmd_detect(cfg, fmt):
    _require(cfg, "r", "--r")
    model = model_from(cfg)
    decision = ml_decide(model, cfg["r"], counting_from(cfg))
    payload = decision.as_dict()
    if fmt == "csv":
        rows = [[p["s"], p["count_estimate"], p["mass"], p["s"] == decision.chosen]
                for p in payload["per_symbol"]]
        return emit_csv("detect", cfg, ["s", "count_estimate", "mass", "chosen"], rows)
    return emit_json("detect", cfg, payload)


def cmd_detect_sweep(cfg, fmt):
    model = model_from(cfg)
    alphabet = model.source_alphabet
    spread = 4 * model.noise_sigma
    lo = cfg["r_min"] if cfg["r_min"] is not None else min(alphabet) - spread
    hi = cfg["r_max"] if cfg["r_max"] is not None else max(alphabet) + spread
    grid = model.quantizer.centers_between(lo, hi)
    decisions = detect_sweep(model, grid, counting_from(cfg))
    header = ["r", "chosen"] + [_mass_column(s) for s in alphabet] + ["tie"]
    rows = []
    for r, d in zip(grid.tolist(), decisions):
        if d is None:
            rows.append([r, None] + [0.0] * len(alphabet) + [False])
        else:
            rows.append([r, d.chosen] + d.masses() + [d.tie])
    if fmt == "json":
        return emit_json("detect-sweep", cfg, {"columns": header, "rows": rows})
    return emit_csv("detect-sweep", cfg, header, rows)


def read_pdf_csv(path: str) -> PdfEstimate:
    with open(path) as fh:
        data = [ln for ln in fh if not ln.startswith("#") and ln.strip()]
    reader = csv.DictReader(data)
    if reader.fieldnames is None or not {"r", "mass"} <= set(reader.fieldnames):
        raise ConfigError(f"{path}: need a header with r and mass columns")
    grid, mass = [], []
    for row in reader:
        grid.append(float(row["r"]))
        mass.append(float(row["mass"]))
    grid = np.array(grid)
    width = float(np.min(np.diff(grid))) if len(grid) > 1 else 1.0
    return PdfEstimate(grid, np.array(mass), width)


def cmd_kl(cfg, fmt, args):
    p, q = read_pdf_csv(args.p), read_pdf_csv(args.q)
    value = kl_divergence(p, q)
    payload = {"p": args.p, "q": args.q, "kl": value if math.isfinite(value) else None,
               "absolutely_continuous": math.isfinite(value)}
    if fmt == "csv":
        return emit_csv("kl", cfg, ["p", "q", "kl"], [[args.p, args.q, value]])
    return emit_json("kl", cfg, payload)


def cmd_dump_vdb(cfg, fmt):
    model = model_from(cfg)
    s = _symbol(cfg, model)
    x = np.arange(model.N)
    noise = model.noise_table
    g = model.g(s, x)
    if fmt == "json":
        return emit_json("dump-vdb", cfg, {"x": x, "n_x": noise, "g": g})
    rows = zip(x.tolist(), noise.tolist(), g.tolist())
    return emit_csv("dump-vdb", cfg, ["x", "n_x", "g"], rows)


COMMANDS: Dict[str, Callable] = {
    "count": cmd_count,
    "search": cmd_search,
    "estimate-point": cmd_estimate_point,
    "estimate-pdf": cmd_estimate_pdf,
    "detect": cmd_detect,
    "detect-sweep": cmd_detect_sweep,
    "dump-vdb": cmd_dump_vdb,
}

DEFAULT_FORMAT = {
    "count": "csv",
    "search": "csv",
    "estimate-point": "json",
    "estimate-pdf": "csv",
    "detect": "json",
    "detect-sweep": "csv",
    "kl": "json",
    "dump-vdb": "csv",
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "kl":
            fmt = args.format or DEFAULT_FORMAT["kl"]
            text = cmd_kl({}, fmt, args)
        else:
            cfg = resolve(args, parser)
            fmt = args.format or DEFAULT_FORMAT[args.command]
            result = COMMANDS[args.command](cfg, fmt)
            if args.command == "count":
                text, summary = result
                if args.summary:
                    with open(args.summary, "w") as fh:
                        fh.write(emit_json("count", cfg, {"summary": summary}))
            else:
                text = result
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except ResourceError as exc:
        print(f"qpdf {args.command}: resource error: {exc}", file=stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"qpdf {args.command}: error: {exc}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
