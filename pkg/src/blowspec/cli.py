"""Command-line interface.

Every command prints one JSON document on stdout::

    {"schema_version": "1", "command": ..., "input": {...}, "s": ...,
     "result": {...}, "meta": {...}}

Exit codes: 0 ok, 2 usage, 3 input format, 4 certification or verification
failure, 5 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .classify import classify_real_eigenvalue, numeric_real_eigvec_search
from .engine import EngineOptions, blowup_spectrum, cross_validate_reductions, verify_spectrum
from .errors import (
    CertificationError,
    GraphFormatError,
    NumericError,
    ValidationError,
    VerificationError,
)
from .graph import Graph, parse_edge_list, parse_graph6, spectral_radius
from .hypergraph import build_blowup
from .spectra import DEFAULT_TOL, SpectrumSet, Witness, char_poly
from .weights import EtaAssignment, adjacency_from_eta

SCHEMA_VERSION = "1"

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_CERT, EXIT_NUMERIC = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real + 0.0, "im": z.imag + 0.0}


def _add_input(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--input", metavar="FILE", help="edge-list file (graph6 if it ends in .g6)")
    g.add_argument("--graph6", metavar="STR", help="graph6 string")
    g.add_argument("--edges", metavar="STR", help="edge list, lines separated by newlines or ';'")


def _build_parser() -> _Parser:
    parser = _Parser(prog="blowspec", description="Eigenvalues of s-blowup hypergraphs of simple graphs.")
    parser.add_argument("--json", action="store_true", help="report errors as JSON on stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, help_, needs_s=True, graph=True):
        p = sub.add_parser(name, help=help_)
        if graph:
            _add_input(p)
        if needs_s:
            p.add_argument("--s", type=int, required=True, help="block size s >= 2")
        p.add_argument("--json", action="store_true", help="report errors as JSON on stderr")
        p.add_argument("--timing", action="store_true", help="include wall time in meta")
        return p

    p = cmd("spectrum", "all eigenvalues of G^[s] with witnesses")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--no-eta-reduction", action="store_true")
    p.add_argument("--no-rotation-quotient", action="store_true")
    p.add_argument("--no-connected-reduction", action="store_true")
    p.add_argument("--no-certify", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", action="store_true", help="CSV rows instead of JSON")

    p = cmd("verify", "re-certify a spectrum document from its witnesses")
    p.add_argument("--spectrum", required=True, metavar="FILE")
    p.add_argument("--tol", type=float, default=None)

    p = cmd("classify", "H/N classification of a real eigenvalue")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--oracle-restarts", type=int, default=0,
                   help="also run the numeric real-eigenvector search")

    p = cmd("charpoly", "characteristic polynomial of diag(eta) A(G)")
    p.add_argument("--eta", required=True, help="comma-separated eta exponents in [0, s)")

    p = cmd("blowup", "export G^[s] as JSON")
    p.add_argument("--export-only", action="store_true", help='print only {"k", "n", "edges"}')

    cmd("radius", "spectral radius of G", needs_s=False)

    p = cmd("crossval", "compare spectra with each reduction disabled")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--certify", action="store_true")
    return parser


def _read_graph(args, stdin) -> tuple[Graph, dict]:
    if args.graph6 is not None:
        return parse_graph6(args.graph6), {"format": "graph6", "source": args.graph6}
    if args.edges is not None:
        return parse_edge_list(args.edges.replace(";", "\n")), {"format": "edges", "source": args.edges}
    if args.input is not None:
        path = Path(args.input)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        if path.suffix == ".g6":
            return parse_graph6(text), {"format": "graph6", "source": str(path)}
        return parse_edge_list(text), {"format": "edges", "source": str(path)}
    raise UsageError("one of --input, --graph6 or --edges is required")


def _document(command: str, g: Graph | None, src: dict | None, s, result, meta) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    if g is not None:
        doc["input"] = {**src, "n": g.n, "edges": [list(e) for e in g.edges]}
    doc["s"] = s
    doc["result"] = result
    doc["meta"] = meta
    return doc


def _spectrum_payload(rep) -> dict:
    values = []
    certs = rep.certified or (None,) * len(rep.values)
    for z, w, r in zip(rep.spectrum.values, rep.spectrum.witnesses, certs):
        values.append({**_cplx(z), "residual": r, "witness": w.to_dict()})
    return {"count": len(values), "certified": rep.certified is not None, "values": values}


def _spectrum_csv(rep) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["re", "im", "residual", "witness_subset", "witness_eta"])
    certs = rep.certified or (None,) * len(rep.values)
    for z, w, r in zip(rep.spectrum.values, rep.spectrum.witnesses, certs):
        out.writerow([
            repr(z.real + 0.0), repr(z.imag + 0.0), "" if r is None else repr(r),
            " ".join(map(str, w.subset)), " ".join(map(str, w.eta)),
        ])
    return buf.getvalue()


def _load_spectrum(path: str, s: int) -> tuple[dict, SpectrumSet]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"spectrum file is not JSON: {exc}") from exc
    try:
        if doc.get("s") is not None and int(doc["s"]) != s:
            raise UsageError(f"spectrum document is for s={doc['s']}, got --s {s}")
        vals = doc["result"]["values"]
        values = tuple(complex(v["re"], v["im"]) for v in vals)
        wits = tuple(Witness.from_dict(v["witness"], s) if v.get("witness") else None for v in vals)
        tol = float(doc.get("meta", {}).get("tolerance", DEFAULT_TOL))
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed spectrum document: {exc!r}") from exc
    return doc, SpectrumSet(values, tol, wits)


def _run(args, stdin, stdout) -> int:
    command = args.command
    timing = {}

    if command == "verify":
        doc, sp = _load_spectrum(args.spectrum, args.s)
        if args.input or args.graph6 or args.edges:
            g, src = _read_graph(args, stdin)
        else:
            try:
                inp = doc["input"]
                g = Graph.from_edges(int(inp["n"]), [tuple(e) for e in inp["edges"]])
            except (KeyError, TypeError, ValueError) as exc:
                raise GraphFormatError(f"spectrum document has no usable input graph: {exc!r}") from exc
            src = {"format": inp.get("format", "edges"), "source": inp.get("source", args.spectrum)}
        rep = verify_spectrum(g, args.s, sp, args.tol)
        result = {
            "passed": rep.passed,
            "failures": len(rep.failures),
            "entries": [
                {**_cplx(e.value), "residual": e.residual, "ok": e.ok, "reason": e.reason}
                for e in rep.entries
            ],
        }
        meta = {"tolerance": sp.tol if args.tol is None else args.tol}
        _emit(stdout, _document(command, g, src, args.s, result, meta))
        return EXIT_OK if rep.passed else EXIT_CERT

    g, src = _read_graph(args, stdin)

    if command == "spectrum":
        opts = EngineOptions(
            tol=args.tol,
            use_eta_reduction=not args.no_eta_reduction,
            use_rotation_quotient=not args.no_rotation_quotient,
            use_connected_reduction=not args.no_connected_reduction,
            certify=not args.no_certify,
            worker_count=args.threads,
        )
        rep = blowup_spectrum(g, args.s, opts)
        if args.csv:
            stdout.write(_spectrum_csv(rep))
            return EXIT_OK
        counts = {k: v for k, v in rep.counts.items() if k != "wall_ms"}
        if args.timing:
            timing["wall_ms"] = rep.counts["wall_ms"]
        meta = {"tolerance": opts.tol, "reductions": opts.reductions(), "counts": counts, **timing}
        _emit(stdout, _document(command, g, src, args.s, _spectrum_payload(rep), meta))
        return EXIT_OK

    if command == "classify":
        verdict = classify_real_eigenvalue(g, args.s, args.lam)
        result = verdict.to_dict()
        if args.oracle_restarts > 0:
            h, _ = build_blowup(g, args.s)
            best, _ = numeric_real_eigvec_search(h, args.lam, args.oracle_restarts)
            result["oracle"] = {"restarts": args.oracle_restarts, "best_residual": best,
                                "found_real_vector": best <= 1e-6}
        _emit(stdout, _document(command, g, src, args.s, result, {}))
        return EXIT_OK

    if command == "charpoly":
        try:
            exps = [int(e) for e in args.eta.split(",") if e.strip()]
        except ValueError as exc:
            raise UsageError(f"--eta must be comma-separated integers: {exc}") from exc
        poly = char_poly(adjacency_from_eta(g, EtaAssignment(args.s, exps)))
        result = {"eta": exps, "degree": poly.degree, "coefficients": [_cplx(c) for c in poly.coeffs]}
        _emit(stdout, _document(command, g, src, args.s, result, {"order": "ascending powers"}))
        return EXIT_OK

    if command == "blowup":
        h, _ = build_blowup(g, args.s)
        if args.export_only:
            _emit(stdout, h.to_json())
        else:
            _emit(stdout, _document(command, g, src, args.s, h.to_json(), {}))
        return EXIT_OK

    if command == "radius":
        _emit(stdout, _document(command, g, src, None, {"rho": spectral_radius(g)}, {}))
        return EXIT_OK

    if command == "crossval":
        rep = cross_validate_reductions(g, args.s, tol=args.tol, certify=args.certify)
        result = {
            "equal": rep.equal,
            "configs": {
                name: {"count": len(r.values), "reductions": r.options.reductions(),
                       "matrices": r.counts["matrices"]}
                for name, r in rep.reports.items()
            },
            "diffs": {
                name: {"a_minus_b": [_cplx(z) for z in c.a_minus_b],
                       "b_minus_a": [_cplx(z) for z in c.b_minus_a]}
                for name, c in rep.comparisons.items() if not c.equal
            },
        }
        _emit(stdout, _document(command, g, src, args.s, result, {"tolerance": args.tol, "reference": "all_reductions"}))
        return EXIT_OK if rep.equal else EXIT_CERT

    raise UsageError(f"unknown command {command!r}")


def _emit(stdout, doc) -> None:
    stdout.write(json.dumps(doc, indent=None, separators=(",", ":")))
    stdout.write("\n")


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    as_json = "--json" in argv
    try:
        args = _build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        return _run(args, stdin, stdout)
    except UsageError as exc:
        return _fail(stderr, as_json, EXIT_USAGE, "usage", str(exc))
    except GraphFormatError as exc:
        return _fail(stderr, as_json, EXIT_FORMAT, "input_format", str(exc))
    except ValidationError as exc:
        return _fail(stderr, as_json, EXIT_USAGE, "validation", str(exc))
    except (CertificationError, VerificationError) as exc:
        return _fail(stderr, as_json, EXIT_CERT, "certification", str(exc))
    except NumericError as exc:
        return _fail(stderr, as_json, EXIT_NUMERIC, "numeric", str(exc))


def _fail(stderr, as_json: bool, code: int, kind: str, message: str) -> int:
    if as_json:
        stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    else:
        stderr.write(f"blowspec: {kind} error: {message}\n")
    return code


def main() -> None:
    sys.exit(run())
