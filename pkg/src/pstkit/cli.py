"""``pstkit`` command line.

Graphs are given either as graph6 (``--g6``) or in a small expression
language (``--named``, ``--x``, ``--y``)::

    path:3
    cartesian(complete:4,complete:4)
    tensor(star:3,cycle:4)
    complement(cycle:5)
    g6:C~

JSON goes to standard output and a one-line summary to standard error.
Exit status is 0 when the analysis completed (a negative answer included),
1 on usage or parse errors and 2 when the spectrum is outside what the exact
machinery handles.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from typing import Iterable, Optional

from . import __version__
from .errors import Graph6Error, InvalidParameter, PSTKitError, UnsupportedSpectrum
from .graph_core import (FAMILIES, Graph, cartesian, complement, make_named, parse_graph6,
                         read_graph6_file, tensor, write_graph6)
from .pst_core import certify_pst, minimal_period
from .qfield import ExactTime, UnitPhase
from .spectra import decompose, strong_cospectral, support
from .switching_pst import complement_switching_check, matching_switching_check, switching_pst_check
from .tensor_pst import (cartesian_power_certificate, make_y_certificate, min_cartesian_power,
                         tensor_necessary, tensor_pst_check)
from .walk_oracle import scan, verify_claim

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2


class UsageError(Exception):
    pass


# -- graph expressions --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(g6:[?-~]+)|([a-z_]+)\s*:\s*(\d+)|([a-z_]+)\s*\(|(,)|(\)))")
_BINARY = {"cartesian": cartesian, "tensor": tensor}


def parse_graph_expr(text: str) -> Graph:
    """Evaluate a graph expression such as ``cartesian(path:2,cycle:4)``."""
    pos = 0

    def expr():
        nonlocal pos
        m = _TOKEN.match(text, pos)
        if not m:
            raise UsageError(f"cannot parse graph expression at {text[pos:]!r}")
        pos = m.end()
        g6, fam, k, func = m.group(1), m.group(2), m.group(3), m.group(4)
        if g6:
            return parse_graph6(g6[3:])
        if fam:
            return make_named(fam, int(k))
        if func is None:
            raise UsageError(f"unexpected {m.group(0).strip()!r} in graph expression")
        args = [expr()]
        while True:
            m = _TOKEN.match(text, pos)
            if not m or not (m.group(5) or m.group(6)):
                raise UsageError(f"expected ',' or ')' at {text[pos:]!r}")
            pos = m.end()
            if m.group(6):
                break
            args.append(expr())
        if func in _BINARY:
            if len(args) != 2:
                raise UsageError(f"{func} takes two graphs")
            return _BINARY[func](*args)
        if func == "complement":
            if len(args) != 1:
                raise UsageError("complement takes one graph")
            return complement(args[0])
        raise UsageError(f"unknown operation {func!r}; use cartesian, tensor, complement or {sorted(FAMILIES)}")

    g = expr()
    if text[pos:].strip():
        raise UsageError(f"trailing input {text[pos:]!r}")
    return g


def _graph_from_args(args, expr_attr: str = "named") -> Graph:
    g6 = getattr(args, "g6", None)
    expr = getattr(args, expr_attr, None)
    if (g6 is None) == (expr is None):
        raise UsageError(f"give exactly one of --g6 or --{expr_attr}")
    return parse_graph6(g6) if g6 is not None else parse_graph_expr(expr)


def _check_vertex(g: Graph, *vs):
    for v in vs:
        if not 0 <= v < g.n:
            raise UsageError(f"vertex {v} out of range for a graph on {g.n} vertices")


# -- JSON helpers -------------------------------------------------------------

def claims_json(obj) -> list[dict]:
    """The oracle claims of a certificate or report, serialized."""
    return [{"graph": write_graph6(g), "u": int(u), "v": int(v), "tau": str(tau), "phase": str(ph)}
            for g, u, v, tau, ph in obj.oracle_claims()]


def with_claims(obj) -> dict:
    doc = obj.to_json()
    doc["claims"] = claims_json(obj)
    return doc


def load_schema() -> dict:
    """The JSON schema every document printed by this CLI conforms to."""
    ref = resources.files("pstkit") / "schemas" / "documents.schema.json"
    return json.loads(ref.read_text())


def _emit(doc, summary: str = ""):
    sys.stdout.write(json.dumps(doc) + "\n")
    if summary:
        sys.stderr.write(summary + "\n")


# -- commands -----------------------------------------------------------------

def spectrum_doc(g: Graph) -> dict:
    d = decompose(g)
    supports = {}
    for u in range(g.n):
        idx = support(d, u, strict=False)
        supports[str(u)] = [str(d.eigenvalues[r]) for r in idx]
        if d.touches_residual(u):
            supports[str(u)].extend(f"root of {grp.poly}" for grp in d.residual
                                    if not grp.projector.column_is_zero(u))
    return {
        "type": "spectrum",
        "graph": write_graph6(g),
        "n": g.n,
        "delta": d.delta,
        "eigenvalues": [str(t) for t in d.eigenvalues],
        "multiplicities": list(d.multiplicities),
        "residual": [{"poly": str(grp.poly), "multiplicity": grp.multiplicity} for grp in d.residual],
        "supports": supports,
    }


def cmd_spectrum(args) -> int:
    g = _graph_from_args(args)
    doc = spectrum_doc(g)
    _emit(doc, f"{g.n} vertices, eigenvalues {', '.join(doc['eigenvalues'])}")
    return EXIT_OK


def cmd_certify(args) -> int:
    g = _graph_from_args(args)
    _check_vertex(g, args.u, args.v)
    if args.u == args.v:
        per = minimal_period(g, args.u)
        if per is None:
            doc = {"type": "not_periodic", "u": args.u, "graph": write_graph6(g), "claims": []}
            _emit(doc, f"vertex {args.u} is not periodic")
            return EXIT_OK
        doc = with_claims(per)
        doc["graph"] = write_graph6(g)
        _emit(doc, f"vertex {args.u} periodic, period {per.period}")
        return EXIT_OK
    cert = certify_pst(g, args.u, args.v)
    doc = with_claims(cert)
    if cert.passed:
        summary = f"PST {args.u} -> {args.v} at {cert.tau0}, phase {cert.phase}"
    else:
        summary = f"no PST {args.u} -> {args.v}: condition {cert.condition} fails"
    _emit(doc, summary)
    return EXIT_OK


def cmd_tensor(args) -> int:
    x, y = parse_graph_expr(args.x), parse_graph_expr(args.y)
    _check_vertex(x, args.w, args.z)
    _check_vertex(y, args.u, args.v)
    nec = tensor_necessary(x, y, (args.w, args.u), (args.z, args.v))
    if not isinstance(nec, list):
        doc = {"type": "tensor_violation", "reason": nec.reason, "witness": nec.witness, "claims": []}
        _emit(doc, f"no PST: {nec.reason}")
        return EXIT_OK
    if args.u == args.v:
        doc = {"type": "tensor_necessary", "requirements": [c.to_json() for c in nec], "claims": [],
               "note": "the tensor criterion needs PST in Y; only the factor requirements are reported"}
        _emit(doc, "factor requirements hold; Y-periodicity case not decided by the criterion")
        return EXIT_OK
    ycert = make_y_certificate(y, args.u, args.v)
    if args.min_power:
        k0 = min_cartesian_power(x, ycert, args.w, args.z)
        doc = {"type": "min_power", "k0": k0, "report": None, "claims": []}
        if k0 is not None:
            rep = tensor_pst_check(x, args.w, args.z, cartesian_power_certificate(ycert, k0))
            doc["report"] = rep.to_json()
            doc["claims"] = claims_json(rep) if k0 <= args.max_claim_power else []
        _emit(doc, f"k0 = {k0}")
        return EXIT_OK
    rep = tensor_pst_check(x, args.w, args.z, ycert)
    _emit(with_claims(rep), f"tensor PST {'holds' if rep.passed else 'fails'}"
          + (f" at {rep.tau}, phase {rep.phase}" if rep.passed else f": {rep.reason}"))
    return EXIT_OK


def cmd_switching(args) -> int:
    x = parse_graph_expr(args.x)
    modes = sum(bool(m) for m in (args.complement, args.y, args.matching))
    if modes != 1:
        raise UsageError("give exactly one of --complement, --y or --matching")
    if args.complement:
        _check_vertex(x, args.u)
        rep = complement_switching_check(x, args.u)
        _emit(with_claims(rep), f"complement switching: {'case i at ' + str(rep.tau) if rep.passed else rep.reason}")
        return EXIT_OK
    reports = matching_switching_check(x) if args.matching else switching_pst_check(x, parse_graph_expr(args.y))
    doc = {"type": "switching_reports", "reports": [with_claims(r) for r in reports]}
    _emit(doc, "; ".join(f"case {r.case}" + (f" at {r.tau}" if r.tau else "") for r in reports))
    return EXIT_OK


def cmd_scan(args) -> int:
    g = _graph_from_args(args)
    _check_vertex(g, args.u, args.v)
    if args.step <= 0 or args.t_max <= 0:
        raise UsageError("--step and --t-max must be positive")
    res = scan(g, args.u, args.v, args.t_max, args.step)
    doc = {"type": "scan", "u": args.u, "v": args.v, "best_t": res.best_t,
           "best_fidelity": res.best_fidelity, "t_max": res.t_max, "step": res.step}
    _emit(doc, f"max fidelity {res.best_fidelity:.12f} at t = {res.best_t:.6f}")
    return EXIT_OK


def verify_doc(doc: dict, tol: Optional[float] = None) -> dict:
    results = []
    for c in doc.get("claims", []):
        g = parse_graph6(c["graph"])
        r = verify_claim(g, c["u"], c["v"], ExactTime.parse(c["tau"]), UnitPhase.parse(c["phase"]), tol)
        results.append({"u": c["u"], "v": c["v"], "tau": c["tau"], "passed": r.passed,
                        "fidelity": r.fidelity, "phase_error": r.phase_error})
    return {"type": "verification", "source": doc.get("type"),
            "passed": all(r["passed"] for r in results), "results": results}


def _iter_docs(path: str) -> Iterable[dict]:
    fh = sys.stdin if path == "-" else open(path)
    try:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if doc.get("type") == "switching_reports":
                yield from doc["reports"]
            elif doc.get("type") == "search":
                for item in doc["pst"] + doc.get("periodic", []):
                    yield item
            else:
                yield doc
    finally:
        if fh is not sys.stdin:
            fh.close()


def cmd_verify(args) -> int:
    n = bad = 0
    for doc in _iter_docs(args.results):
        out = verify_doc(doc, args.tol)
        n += len(out["results"])
        bad += sum(not r["passed"] for r in out["results"])
        _emit(out)
    sys.stderr.write(f"{n - bad}/{n} claims verified\n")
    return EXIT_OK


def search_graph(g6: str) -> dict:
    """Every PST pair of one graph, as certificates (picklable worker)."""
    g = parse_graph6(g6)
    d = decompose(g)
    found, undetermined = [], []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            rep = strong_cospectral(d, u, v)
            if not rep.strongly_cospectral:
                continue
            if rep.residual_touched:
                undetermined.append([u, v])
                continue
            cert = certify_pst(d, u, v)
            if cert.passed:
                found.append(with_claims(cert))
    return {"type": "search", "graph": g6, "n": g.n, "pst": found, "undetermined": undetermined}


def cmd_search(args) -> int:
    graphs = [write_graph6(g) for g in read_graph6_file(args.corpus)]
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    hits = 0
    if args.jobs == 1:
        results = map(search_graph, graphs)
        for doc in results:
            hits += bool(doc["pst"])
            _emit(doc)
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for doc in pool.map(search_graph, graphs, chunksize=16):
                hits += bool(doc["pst"])
                _emit(doc)
    sys.stderr.write(f"{hits} of {len(graphs)} graphs have PST\n")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _add_graph(p):
    p.add_argument("--named", help="graph expression, e.g. path:3 or cartesian(path:2,cycle:4)")
    p.add_argument("--g6", help="graph6 string")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pstkit", description="Exact perfect state transfer certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="exact eigenvalues, multiplicities and vertex supports")
    _add_graph(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("certify", help="PST between u and v (periodicity when u == v)")
    _add_graph(p)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("tensor", help="PST from (w,u) to (z,v) in X x Y")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    for name in ("w", "z", "u", "v"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--min-power", action="store_true", help="smallest k with PST in X x Y^k")
    p.add_argument("--max-claim-power", type=int, default=3,
                   help="emit oracle claims for --min-power only up to this k (graph size grows fast)")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("switching", help="transfer on the switching graph [[A(X), B], [B, A(X)]]")
    p.add_argument("--x", required=True)
    p.add_argument("--y", help="second graph; B = A(Y)")
    p.add_argument("--complement", action="store_true", help="B = A(complement(X)), using the spectral criterion")
    p.add_argument("--matching", action="store_true", help="B = I")
    p.add_argument("--u", type=int, default=0, help="vertex for --complement")
    p.set_defaults(func=cmd_switching)

    p = sub.add_parser("scan", help="grid maximum of |U(t)[v,u]|")
    _add_graph(p)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="check every claim in a JSON Lines results file against the oracle")
    p.add_argument("results", help="file of JSON documents, one per line ('-' for stdin)")
    p.add_argument("--tol", type=float, default=None, help="fidelity tolerance (default PSTKIT_TOL or 1e-9)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="all PST pairs in a graph6 corpus")
    p.add_argument("corpus")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, Graph6Error, InvalidParameter, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"pstkit: error: {exc}\n")
        return EXIT_USAGE
    except (UnsupportedSpectrum, PSTKitError) as exc:
        sys.stderr.write(f"pstkit: unsupported: {exc}\n")
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
