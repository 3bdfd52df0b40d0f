"""Command-line front end: problem ingestion, enumeration runs, result and
point-cloud emission, and partition-level symbolic debugging.

Subcommands:
  enumerate <problem.json> [options]   full minima enumeration
  debug <problem.json> --partition P --show WHAT   symbolic dumps
  check                                built-in fixture suite

Exit codes: 0 complete, 2 complete with unresolved partitions, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import mpmath
from gmpy2 import mpq

from .errors import ParseError, ReluMinimaError
from .groebner import saturate
from .numbers import format_rational, parse_rational
from .pipeline import PipelineConfig, run_enumeration
from .poly import LEX
from .surrogate import (Dataset, IndicatorMatrix, build_boundary_system,
                        build_interior_system, build_surrogate)


def load_problem(path):
    """Read a problem file: exact rationals only, centering applied."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read problem file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"problem file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "points" not in raw:
        raise ParseError(f"problem file {path} needs a 'points' array")
    xs, ys = [], []
    for k, point in enumerate(raw["points"]):
        try:
            xs.append([parse_rational(v) for v in point["x"]])
            ys.append(parse_rational(point["y"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(
                f"problem file {path}, point {k}: needs 'x' (array) and 'y'"
            ) from exc
        except ParseError as exc:
            raise ParseError(f"problem file {path}, point {k}: {exc}") from exc
    if "lambda" not in raw:
        raise ParseError(f"problem file {path} needs a 'lambda' entry")
    try:
        lam = parse_rational(raw["lambda"])
    except ParseError as exc:
        raise ParseError(f"problem file {path}, field 'lambda': {exc}") from exc
    if lam <= 0:
        raise ParseError(
            f"problem file {path}: ridge weight must be positive, got {lam}")
    hidden = raw.get("hidden_units", 1)
    try:
        return Dataset(xs, ys, lam, hidden)
    except ReluMinimaError as exc:
        raise ParseError(f"problem file {path}: {exc}") from exc


def _decimal(value, places):
    """Fixed-point decimal string of a high-precision real."""
    with mpmath.workprec(max(64, mpmath.mp.prec)):
        s = mpmath.nstr(mpmath.mpf(value), places + 12, strip_zeros=False)
    # Round through Python float-free decimal handling for stable output.
    from decimal import Decimal, ROUND_HALF_EVEN
    q = Decimal(s).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    text = format(q, "f")
    if text == "-" + "0." + "0" * places:
        text = text[1:]
    return text


def result_document(result):
    """The deterministic JSON-serializable form of an enumeration result."""
    places = result.metadata["display_precision"]
    names = result.dataset.varset.names
    minima = []
    for cand in result.candidates:
        minima.append({
            "psi": [_decimal(v, places) for v in cand.psi],
            "psi_exact": [format_rational(v) for v in cand.psi_rational],
            "head": [format_rational(v) for v in cand.head],
            "bias": format_rational(cand.bias),
            "loss": _decimal(
                mpmath.mpf(cand.loss.numerator) / mpmath.mpf(cand.loss.denominator),
                places),
            "loss_exact": format_rational(cand.loss),
            "provenance": [{"pattern": pat, "where": tag}
                           for pat, tag in cand.provenance],
            "verdict": cand.verdict,
        })
    components = []
    for idx, comp in enumerate(result.components):
        where = comp.provenance[0] if comp.provenance[0] == "interior" else \
            f"boundary({comp.provenance[1]},{comp.provenance[2]})"
        components.append({
            "pattern": comp.pattern,
            "where": where,
            "basis": [p.to_text(LEX) for p in comp.basis],
            "free_variables": list(comp.free_variables),
            "sample_file": "points.csv",
            "sample_count": len(comp.sample.boxes),
            "sample_verdicts": list(comp.sample_verdicts),
            "diagnostic": comp.sample.diagnostic,
        })
    return {
        "metadata": result.metadata,
        "variables": list(names),
        "minima": minima,
        "components": components,
        "unresolved": result.unresolved,
    }


def points_csv(result):
    """CSV of zero-dimensional candidates and component samples."""
    places = result.metadata["display_precision"]
    names = result.dataset.varset.names
    lines = ["index," + ",".join(names) + ",loss,kind,verdict"]
    idx = 0
    for cand in result.candidates:
        idx += 1
        coords = ",".join(_decimal(v, places) for v in cand.psi)
        loss = _decimal(mpmath.mpf(cand.loss.numerator)
                        / mpmath.mpf(cand.loss.denominator), places)
        lines.append(f"{idx},{coords},{loss},candidate,{cand.verdict}")
    for comp in result.components:
        for box, verdict in zip(comp.sample.boxes, comp.sample_verdicts):
            idx += 1
            coords = ",".join(_decimal(v, places) for v in box.point(names))
            lines.append(f"{idx},{coords},,sample,{verdict}")
    return "\n".join(lines) + "\n"


def emit_results(result, out_dir):
    """Write result.json and points.csv; both byte-deterministic."""
    os.makedirs(out_dir, exist_ok=True)
    doc = result_document(result)
    json_path = os.path.join(out_dir, "result.json")
    csv_path = os.path.join(out_dir, "points.csv")
    try:
        with open(json_path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(csv_path, "w") as fh:
            fh.write(points_csv(result))
    except OSError as exc:
        raise ReluMinimaError(f"cannot write results under {out_dir}: {exc}")
    return json_path, csv_path


def debug_partition(dataset, pattern, what):
    """Canonical-text dump of one partition's symbolic objects."""
    E = IndicatorMatrix.from_pattern(pattern, dataset.n, dataset.L)
    s = build_surrogate(dataset, E)
    out = []
    if what == "surrogate":
        out.append("numerator: " + s.loss.num.to_text(LEX))
        out.append("denominator: " + s.loss.den.to_text(LEX))
    elif what == "interior-system":
        system = build_interior_system(s)
        for name, g in zip(dataset.varset.names,
                           system.equations.generators):
            out.append(f"d/d{name} numerator: " + g.to_text(LEX))
        out.append("exclusion: " + system.exclusion_product().to_text(LEX))
    elif what.startswith("boundary-system"):
        spec = what[len("boundary-system"):].strip("():")
        try:
            i, ell = (int(v) for v in spec.split(","))
        except ValueError:
            raise ParseError(
                "boundary-system needs indices, e.g. boundary-system:0,0")
        system = build_boundary_system(s, i, ell)
        for g in system.equations.generators:
            out.append("equation: " + g.to_text(LEX))
        out.append("exclusion: " + system.exclusion_product().to_text(LEX))
    elif what == "bases":
        system = build_interior_system(s)
        sat = saturate(system.equations, system.saturation_product())
        out.append("interior saturation:")
        for p in sat:
            out.append("  " + p.to_text(LEX))
        for i in range(dataset.n):
            for ell in range(dataset.L):
                bsys = build_boundary_system(s, i, ell)
                elim = saturate(bsys.equations, bsys.saturation_product(),
                                drop=["beta"])
                out.append(f"boundary({i},{ell}) elimination:")
                for p in elim:
                    out.append("  " + p.to_text(LEX))
    else:
        raise ParseError(
            f"unknown debug target {what!r}; choose surrogate, "
            "interior-system, boundary-system:i,l, or bases")
    return "\n".join(out)


def run_check():
    """Built-in fixture suite on the two-point worked example."""
    failures = []

    def expect(label, ok):
        print(("PASS " if ok else "FAIL ") + label)
        if not ok:
            failures.append(label)

    ds = Dataset([["-17/100"], ["11/25"]], ["-11/25", "19/20"], "1/10", 1)
    expect("outcome centering", ds.y_centered == [mpq(-139, 200), mpq(139, 200)])
    E4 = IndicatorMatrix.from_pattern("--", 2, 1)
    s4 = build_surrogate(ds, E4)
    expect("all-inactive loss is the ridge term",
           s4.loss.evaluate([mpq(1), mpq(1)]) == mpq(1, 5))
    E2 = IndicatorMatrix.from_pattern("+-", 2, 1)
    s2 = build_surrogate(ds, E2)
    expect("denominator fixture",
           s2.det.terms.get((2, 0)) == mpq(289, 10000))
    system = build_interior_system(s2)
    sat = saturate(system.equations, system.saturation_product())
    texts = [p.to_text(LEX) for p in sat]
    expect("interior saturation fixture",
           texts == ["b_11 + 17/100*c_1",
                     "c_1^4 + 20000000/105863521*c_1^2"
                     " - 4869844225000000/11207085078517441"])
    res = run_enumeration(ds, PipelineConfig(seed=0))
    expect("three merged candidates", len(res.candidates) == 3)
    expect("no unresolved partitions", not res.unresolved)
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="reluminima",
        description="Enumerate all local minima of a ridge-regularized "
                    "one-hidden-layer ReLU regression loss.")
    sub = parser.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enumerate", help="run the full enumeration")
    enum.add_argument("problem")
    enum.add_argument("--seed", type=int, default=0)
    enum.add_argument("--threads", type=int, default=1)
    enum.add_argument("--timeout", type=float, default=300.0,
                      help="per-basis-computation timeout in seconds")
    enum.add_argument("--perturb-count", type=int, default=20)
    enum.add_argument("--perturb-radius", default="1/1000")
    enum.add_argument("--sample-count", type=int, default=10000)
    enum.add_argument("--prune-symmetry", action="store_true")
    enum.add_argument("--partition", default=None,
                      help="row-major +/- pattern restricting the run")
    enum.add_argument("--force-lex", action="store_true")
    enum.add_argument("--out", default="results")
    enum.add_argument("--display-precision", type=int, default=6)
    enum.add_argument("--indicator-cap", type=int, default=20)
    enum.add_argument("--cap-override", action="store_true")

    dbg = sub.add_parser("debug", help="dump one partition's symbolic objects")
    dbg.add_argument("problem")
    dbg.add_argument("--partition", required=True)
    dbg.add_argument("--show", required=True)

    sub.add_parser("check", help="run the built-in fixture suite")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return run_check()
        dataset = load_problem(args.problem)
        if args.command == "debug":
            print(debug_partition(dataset, args.partition, args.show))
            return 0
        config = PipelineConfig(
            seed=args.seed, threads=args.threads, timeout=args.timeout,
            perturb_count=args.perturb_count,
            perturb_radius=parse_rational(args.perturb_radius),
            sample_count=args.sample_count,
            prune_symmetry=args.prune_symmetry, partition=args.partition,
            force_lex=args.force_lex,
            display_precision=args.display_precision,
            indicator_cap=args.indicator_cap,
            cap_override=args.cap_override)
        result = run_enumeration(dataset, config)
        json_path, csv_path = emit_results(result, args.out)
        n_min = len(result.minima())
        print(f"{len(result.candidates)} candidates, {n_min} minima, "
              f"{len(result.components)} components, "
              f"{len(result.unresolved)} unresolved")
        print(f"wrote {json_path} and {csv_path}")
        return 2 if result.unresolved else 0
    except ReluMinimaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
