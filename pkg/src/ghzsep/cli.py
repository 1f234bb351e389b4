"""Command-line interface: ``ghzsep state | analyze | sample | cvalue``.

Exit codes of ``analyze``: 0 separable, 1 entangled, 2 undecided. Any input
error exits with 3.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import classify, criterion, separability, states
from .linalg import PARTIES, PSD_TOL, pt_min_eigenvalues

EXIT_SEPARABLE, EXIT_ENTANGLED, EXIT_UNDECIDED, EXIT_ERROR = 0, 1, 2, 3


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error exit code instead of argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# --- JSON output -----------------------------------------------------------


def _fmt(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite number {x!r}")
        return format(x, ".17g")
    if isinstance(obj, (complex, np.complexfloating)):
        return _fmt([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _fmt(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_fmt(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric rows stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray, complex)) for v in obj):
            return "[" + ", ".join(_fmt(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _fmt(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with 17 significant digits per float and insertion-ordered keys."""
    return _fmt(obj, 2, 0)


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


# --- state input -----------------------------------------------------------


def _parse_entry(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise CliError(f"matrix entries must be numbers or [re, im] pairs, got {v!r}")


def state_from_json(doc, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Build and validate a density matrix from the state schema."""
    if not isinstance(doc, dict):
        raise CliError("state JSON must be an object")
    try:
        if "matrix" in doc:
            rows = doc["matrix"]
            if not isinstance(rows, list) or len(rows) != 8 or any(
                not isinstance(r, list) or len(r) != 8 for r in rows
            ):
                raise CliError("'matrix' must be 8 rows of 8 entries")
            m = np.array([[_parse_entry(v) for v in r] for r in rows])
        elif "ghz_probs" in doc:
            m = states.ghz_diagonal_from_probs(doc["ghz_probs"]).matrix
        elif doc.get("family") == "kay":
            m = states.kay_state(doc["alpha"])
        elif doc.get("family") == "hyllus":
            m = states.hyllus_state(doc["eta"])
        else:
            raise CliError("state JSON needs 'matrix', 'ghz_probs' or a family of kay/hyllus")
    except KeyError as exc:
        raise CliError(f"missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, states.NotAStateError):
            raise
        raise CliError(f"malformed state: {exc}") from None
    return states.check_density_matrix(m, psd_tol=psd_tol)


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(f"cannot parse numbers from {text!r}") from None
    if n is not None and len(vals) != n:
        raise CliError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _complexes(text: str, n: int) -> list[complex]:
    """Parse ``"re,im re,im ..."``."""
    parts = text.split()
    if len(parts) != n:
        raise CliError(f"expected {n} complex numbers as 're,im', got {len(parts)}")
    out = []
    for part in parts:
        fields = part.split(",")
        if len(fields) != 2:
            raise CliError(f"cannot parse complex number {part!r}; use 're,im'")
        re_, im_ = _floats(" ".join(fields), 2)
        out.append(complex(re_, im_))
    return out


# --- subcommands -----------------------------------------------------------


def cmd_state(args) -> int:
    fam = args.family
    if fam == "kay":
        m = states.kay_state(args.alpha)
    elif fam == "hyllus":
        m = states.hyllus_state(args.eta)
    elif fam == "ghz-probs":
        m = states.ghz_diagonal_from_probs(_floats(args.p, 8)).matrix
    elif fam == "ghz-lambdas":
        m = states.ghz_diagonal_from_lambdas(_floats(args.l, 7)).matrix
    else:
        _, m = states.product_state(_complexes(args.c, 3), _complexes(args.s, 3))
    print(dumps({"matrix": matrix_to_json(m)}))
    return 0


def analyze(rho, psd_tol: float = PSD_TOL, seed: int = 0) -> tuple[dict, int]:
    """Full report for one state and the matching exit code."""
    ppt = pt_min_eigenvalues(rho)
    old = criterion.old_criterion(rho)
    x, obs = criterion.optimize_x(rho)
    w = criterion.w_criterion(rho)
    ghz = states.ghz_diagonal_from_matrix(rho)
    cert = None
    if ghz is not None and not obs.violated and np.min(ppt) >= -psd_tol:
        cert = separability.certify(ghz, seed=seed)
        if cert is not None:
            separability.build_separable_witness_state(cert, ghz)

    if np.min(ppt) < -psd_tol:
        verdict, code = "entangled (NPT)", EXIT_ENTANGLED
    elif obs.violated:
        verdict, code = "entangled (PPT, criterion violated)", EXIT_ENTANGLED
    elif w.violated:
        verdict, code = "entangled (PPT, W-vicinity criterion violated)", EXIT_ENTANGLED
    elif old.violated:
        verdict, code = "entangled (PPT, single-element criterion violated)", EXIT_ENTANGLED
    elif cert is not None:
        verdict, code = "separable (certificate)", EXIT_SEPARABLE
    elif ghz is not None and classify.odd_negative(ghz):
        verdict, code = "separable (PPT sufficient)", EXIT_SEPARABLE
    else:
        verdict, code = "undecided", EXIT_UNDECIDED

    report = {
        "input": {"matrix": matrix_to_json(rho)},
        "ppt": {p: float(v) for p, v in zip(PARTIES, ppt)},
        "old_criterion": {
            "lhs": old.lhs,
            "rhs_sixth_root": old.rhs_sixth_root,
            "rhs_fourth_root": old.rhs_fourth_root,
            "violated": old.violated,
        },
        "observation": {
            "x": [complex(v) for v in x],
            "l_value": obs.l_value,
            "c_value": obs.c_value,
            "kappa": obs.kappa,
            "kappa_term": obs.kappa_term_used,
            "bound": obs.bound,
            "violated": obs.violated,
        },
        "w_criterion": {"lhs": w.lhs, "rhs": w.rhs, "violated": w.violated},
        "certificate": None if cert is None else cert.to_dict(),
        "verdict": verdict,
    }
    return report, code


def cmd_analyze(args) -> int:
    text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON: {exc}") from None
    rho = state_from_json(doc, psd_tol=args.tol)
    report, code = analyze(rho, psd_tol=args.tol, seed=args.seed)
    if args.format == "table":
        for key in ("ppt", "old_criterion", "observation", "w_criterion", "certificate"):
            print(f"{key}: {report[key]}")
        print(f"verdict: {report['verdict']}")
    else:
        print(dumps(report))
    return code


def cmd_sample(args) -> int:
    n = 1_000_000 if args.full else args.count
    if n < 1:
        raise CliError("--count must be at least 1")
    if n < 10_000:
        print(f"note: n = {n} is small; statistical errors are large", file=sys.stderr)
    report = classify.run_ensemble(n, seed=args.seed, chunk_size=args.chunk_size, workers=args.workers)
    if args.format == "json":
        print(dumps(report.to_dict()))
    else:
        print(report.table())
    return 0


def cmd_cvalue(args) -> int:
    x = np.array(_complexes(args.x, 4))
    if np.all(x == 0):
        raise CliError("X must not be all zero")
    if np.all(x.imag == 0):
        res = criterion.c_value_closed_form(x.real)
    else:
        res = criterion.c_value_numeric(x)
    out = {"x": [complex(v) for v in x], "c": res.c, "maximizer": list(res.maximizer), "method": res.method}
    if res.q is not None:
        out["q"] = res.q
        out["r"] = res.r
    if args.format == "table":
        print(f"C = {res.c:.12g} ({res.method}) at (a, b, c) = {tuple(round(t, 9) for t in res.maximizer)}")
    else:
        print(dumps(out))
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument(
        "--tol", type=float, default=argparse.SUPPRESS, help=f"PSD/NPT threshold (default {PSD_TOL:g})"
    )
    common.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)

    parser = _Parser(
        prog="ghzsep", description="Entanglement and separability tests for three-qubit states.", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", parents=[common], help="emit a state as JSON")
    p.add_argument("family", choices=("kay", "hyllus", "ghz-probs", "ghz-lambdas", "product"))
    p.add_argument("--alpha", type=float, help="kay parameter (>= 2)")
    p.add_argument("--eta", type=float, help="hyllus parameter (> 0)")
    p.add_argument("--p", help="eight GHZ weights, comma separated")
    p.add_argument("--l", help="seven Pauli coefficients, comma separated")
    p.add_argument("--c", help="three amplitudes 're,im re,im re,im'")
    p.add_argument("--s", help="three amplitudes 're,im re,im re,im'")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("analyze", parents=[common], help="run every test on a state file")
    p.add_argument("file", nargs="?", default="-", help="state JSON file, '-' for stdin")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", parents=[common], help="classify random GHZ-diagonal states")
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--full", action="store_true", help="use 10^6 samples")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=10_000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cvalue", parents=[common], help="evaluate C(X)")
    p.add_argument("--x", required=True, help="four complex numbers 're,im re,im re,im re,im'")
    p.set_defaults(func=cmd_cvalue)
    return parser


_REQUIRED = {"kay": ("alpha",), "hyllus": ("eta",), "ghz-probs": ("p",), "ghz-lambdas": ("l",), "product": ("c", "s")}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    args.seed = getattr(args, "seed", 0)
    args.tol = getattr(args, "tol", PSD_TOL)
    if not hasattr(args, "format"):
        args.format = "table" if args.command == "sample" else "json"
    if args.command == "state":
        missing = [f"--{k}" for k in _REQUIRED[args.family] if getattr(args, k) is None]
        if missing:
            print(f"error: state {args.family} requires {', '.join(missing)}", file=sys.stderr)
            return EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, ValueError, ArithmeticError, OSError, separability.CertificateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
