"""Command-line entry point: measures, shifts, Clark families, constructions,
coupling sweeps, oracle comparisons and end-to-end reproductions.

Exit codes: 0 success, 1 a verification failed, 2 malformed input.  Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .constructions import (CantorSpec, GradedIntervals, WellMixedPair, build_interleaved_shift, cantor_build,
                            cantor_points_periodic, certify, classify_lambda_sweep, density_chain, example_5_2, interleaved_pair,
                            middle_thirds_complement, porous_embed, theorem_5_5_check)
from .matrix_oracle import compare_with_formula, strictly_interlaced
from .measures import AtomicMeasure, IntervalSet, MeasureError, norm, validate
from .phase_shift import (atom_criterion_mu, atom_criterion_nu, exact_shift_from_measure, pair_from_shift,
                          pole_coefficients, singular_support_test)
from .rank_one import AtomTestConfig, classify_points, coupling_to_circle, perturbed_atoms
from .shifts import PhaseShift
from .transforms import cauchy, cauchy_of_shift

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
REPRO_TARGETS = ("example-3.4", "example-5.2", "example-6.1", "thm-5.1", "thm-5.5")


class InputError(Exception):
    """Malformed or unreadable input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        sys.exit(EXIT_INPUT)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


# -- io helpers ------------------------------------------------------------------

def _read_json(path: str) -> dict:
    """JSON from a file, from stdin (``-``) or given literally as an object."""
    try:
        if path.lstrip().startswith("{"):
            text = path
        else:
            text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from exc


def _load_measure(path: str) -> AtomicMeasure:
    data = _read_json(path)
    try:
        return AtomicMeasure.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad measure JSON in {path}: {exc}") from exc


def _load_shift(path: str) -> PhaseShift:
    data = _read_json(path)
    try:
        return PhaseShift.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad shift JSON in {path}: {exc}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _read_points(path: str) -> list[float]:
    try:
        rows = list(csv.reader(Path(path).read_text().splitlines()))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    out = []
    for row in rows:
        if not row or not row[0].strip():
            continue
        try:
            out.append(float(row[0]))
        except ValueError:
            if out:
                raise InputError(f"bad point {row[0]!r} in {path}")
    return out


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _write(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_json(args, data) -> None:
    _write(args, json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")


def _write_csv(args, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    _write(args, buf.getvalue())


# -- subcommands -------------------------------------------------------------------

def cmd_measure(args) -> int:
    m = _load_measure(args.measure)
    problem = validate(m)
    _write_json(args, {"valid": problem is None, "problem": problem, "norm": norm(m), "atoms": len(m),
                       "measure": m.to_json()})
    return EXIT_OK if problem is None else EXIT_FAIL


def cmd_transform(args) -> int:
    if bool(args.measure) == bool(args.shift):
        raise InputError("give exactly one of --measure or --shift")
    if args.measure:
        m = _load_measure(args.measure)
        f: Callable = lambda z: cauchy(m, z)
    else:
        u = _load_shift(args.shift)
        f = lambda z: cauchy_of_shift(u, z)
    rows = []
    for x in args.x:
        ys = args.ymax * 0.5 ** np.arange(args.steps)
        vals = np.asarray(f(x + 1j * ys), dtype=complex)
        if args.kind == "poisson":
            vals = vals.imag + 0j
        elif args.kind == "conj":
            vals = -vals.real + 0j
        rows += [(x, y, v.real, v.imag) for y, v in zip(ys, vals)]
    _write_csv(args, ("x", "y", "re", "im"), rows)
    return EXIT_OK


def cmd_shift(args) -> int:
    if args.action == "to-pair":
        u = _load_shift(args.shift)
        lam = args.lam if args.lam is not None else float(u.sign)
        pair = pair_from_shift(u, lam)
        _write_json(args, {"lambda": lam, "mu": pair.mu.to_json(), "nu": pair.nu.to_json()})
        return EXIT_OK
    if args.action == "from-pair":
        m = _load_measure(args.measure)
        if args.lam is None:
            raise InputError("--lambda is required")
        _write_json(args, exact_shift_from_measure(m, args.lam).to_json())
        return EXIT_OK
    u = _load_shift(args.shift)
    if args.x is None:
        raise InputError("--x is required")
    out = {}
    for x in args.x:
        mu, nu = atom_criterion_mu(u, x), atom_criterion_nu(u, x)
        sup = singular_support_test(u, x)
        out[repr(x)] = {"mu": {"verdict": mu.verdict, "value": mu.value},
                        "nu": {"verdict": nu.verdict, "value": nu.value},
                        "support_side": sup.side}
    _write_json(args, out)
    return EXIT_OK


def cmd_family(args) -> int:
    m = _load_measure(args.measure)
    cp = coupling_to_circle(args.lam)
    member = perturbed_atoms(m, args.lam)
    _write_json(args, {"lambda": args.lam, "alpha": [cp.alpha.real, cp.alpha.imag], "scale": cp.scale_c,
                       "measure": member.to_json()})
    return EXIT_OK


def cmd_classify(args) -> int:
    m = _load_measure(args.measure)
    xs = _read_points(args.points)
    cfg = AtomTestConfig(match_tol=args.tol, quotient_tol=args.tol)
    rows = [(v.x, v.kind, v.mass, v.evidence_rate) for v in classify_points(m, args.lam, xs, cfg)]
    _write_csv(args, ("x", "kind", "mass", "evidence_rate"), rows)
    return EXIT_OK


def _spec_from(args) -> CantorSpec:
    return CantorSpec(args.depth, exponent=args.exponent, constant=args.constant)


def cmd_construct(args) -> int:
    if args.what == "cantor":
        spec = _spec_from(args)
        tree = cantor_build(spec)
        _write_json(args, tree.to_json())
        return EXIT_OK
    if args.what == "wellmixed":
        if args.a is None or args.b is None:
            raise InputError("--a and --b are required")
        pair = WellMixedPair(args.a, args.b)
        mp = interleaved_pair(pair)
        _write_json(args, {"shift": build_interleaved_shift(pair).to_json(), "lambda": mp.lam,
                           "mu": mp.mu.to_json(), "nu": mp.nu.to_json()})
        return EXIT_OK
    res = example_5_2(args.n)
    _write_json(args, {"n": res.n, "a": res.a, "b": res.b, "well_mixed": res.well_mixed,
                       "shift": res.shift.to_json(), "criterion": res.criterion.verdict,
                       "criterion_value": res.criterion.value, "partial_sums": res.partial_sums,
                       "bound": res.bound, "mass_at_zero": res.mass_at_zero})
    return EXIT_OK if res.criterion.verdict == "atom" and res.mass_at_zero > 0 else EXIT_FAIL


def cmd_check(args) -> int:
    data = _read_json(args.k)
    try:
        ivs = [tuple(iv) for iv in data["intervals"]]
        gens = data.get("generations")
        removed = (GradedIntervals.from_pairs(list(zip(ivs, gens))) if gens is not None
                   else IntervalSet.from_unsorted(ivs))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad interval JSON: {exc}") from exc
    res = theorem_5_5_check(removed, args.y, tail_bound=data.get("tail_bound"))
    _write_json(args, {"y": args.y, "verdict": res.verdict, "total": res.total, "endpoint": res.endpoint,
                       "increments": res.increments, "partial_sums": res.partial_sums,
                       "tail_bound": res.tail_bound})
    return EXIT_OK if res.verdict == "passes" else EXIT_FAIL


def _sweep_rows(reports) -> list[tuple]:
    rows = []
    for r in reports:
        ds = [c.d for c in r.sc_evidence if c.d is not None]
        rows.append((r.lam, r.depth, r.verdict, len(r.atoms), r.inner_gaps, r.off_set_atoms, r.truncation_atoms,
                     r.confirmed, r.oracle_max_loc, r.oracle_max_mass, r.oracle_off_set,
                     sum(bool(c.quotient_diverges) for c in r.sc_evidence), min(ds) if ds else None,
                     r.criteria_fail_at_samples))
    return rows


SWEEP_HEADER = ("lambda", "depth", "verdict", "atoms", "inner_gaps", "off_set_atoms", "truncation_atoms",
                "confirmed", "oracle_max_loc", "oracle_max_mass", "oracle_off_set", "sc_points", "min_d",
                "criteria_fail")


def cmd_sweep(args) -> int:
    data = _read_json(args.spec)
    try:
        spec = CantorSpec(int(data["depth"]), exponent=float(data.get("exponent", 1.5)),
                          cap=float(data.get("cap", 0.5)), constant=data.get("constant"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad Cantor spec: {exc}") from exc
    reports = classify_lambda_sweep(cantor_build(spec), args.lambdas)
    _write_csv(args, SWEEP_HEADER, _sweep_rows(reports))
    return EXIT_OK


def cmd_oracle(args) -> int:
    m = _load_measure(args.measure)
    d = compare_with_formula(m, args.lam)
    out = d.to_json()
    out["ok"] = d.ok(args.tol)
    _write_json(args, out)
    return EXIT_OK if d.ok(args.tol) else EXIT_FAIL


# -- reproductions -------------------------------------------------------------------

def _repro_example_3_4(args) -> list[tuple[str, str, str, bool]]:
    rows = []
    for x, y in ((Fraction(0), Fraction(1)), (Fraction(1, 4), Fraction(3, 4)), (Fraction(-1), Fraction(3))):
        u = PhaseShift.exact([(float(x), float(y))], 1)
        pair = pair_from_shift(u, 1.0, exact=True)
        c_mu = pole_coefficients([float(y)], [float(x)], exact=True)[0]
        ok = (pair.mu.locations == (float(x),) and pair.nu.locations == (float(y),)
              and pair.mu.masses[0] == float(y - x) and pair.nu.masses[0] == float(y - x) and c_mu == float(y - x))
        rows.append((f"u = pi*chi({x}, {y})",
                     f"mu = {pair.mu.masses[0]!r} delta_{float(x)!r}, nu = {pair.nu.masses[0]!r} delta_{float(y)!r}",
                     f"mass {y - x} at both ends", ok))
    return rows


def _repro_example_5_2(args) -> list[tuple[str, str, str, bool]]:
    rows, values = [], []
    for n in range(2, args.n + 1):
        res = example_5_2(n)
        values.append(res.criterion.value)
        rows.append((f"n = {n}", f"integral {res.criterion.value:.6f}, mass at 0 {res.mass_at_zero:.6f}",
                     f"<= {res.bound:.6f}, atom",
                     res.well_mixed and res.criterion.verdict == "atom" and res.mass_at_zero > 0
                     and res.criterion.value <= res.bound + 1e-12))
    mono = all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    rows.append(("trail", "monotone" if mono else "not monotone", "monotone and bounded", mono))
    return rows


def _repro_example_6_1(args) -> list[tuple[str, str, str, bool]]:
    spec = CantorSpec(args.depth)
    tree = cantor_build(spec)
    cert = certify(spec)
    dens = density_chain(tree)
    rows = [("product and removed fraction", f"c >= {cert.c_lower:.5f}", "certified", cert.conforming),
            ("|C_depth| = prod(1 - a_k)", str(float(tree.measure())), "exact", tree.measure() == tree.product()),
            ("density chain at every node", f"{dens.nodes} nodes, margin {dens.worst_margin:.3g}", "holds",
             dens.exact_density_ok and dens.chain_ok)]
    for r in classify_lambda_sweep(tree, args.lambdas):
        if 0 < r.lam < 1:
            ok = (r.off_set_atoms == 0 and r.oracle_off_set == 0 and r.criteria_fail_at_samples
                  and all(c.d and c.d > 0 and c.quotient_diverges for c in r.sc_evidence))
            rows.append((f"lambda = {r.lam}", f"{r.verdict}, {len(r.sc_evidence)} sample points, no atom off C",
                         "singular_continuous_evidence", ok))
        elif r.lam > 1 or r.lam < 0:
            per_gap = sum(a.region == "gap" for a in r.atoms)
            ok = (per_gap == r.inner_gaps and r.confirmed == r.off_set_atoms == len(r.atoms)
                  and r.oracle_max_loc is not None and max(r.oracle_max_loc, r.oracle_max_mass) <= 1e-8)
            rows.append((f"lambda = {r.lam}", f"{r.verdict}, {r.confirmed} confirmed atoms, {per_gap} in inner gaps",
                         f"one per gap ({r.inner_gaps}) plus one outside", ok))
        else:
            rows.append((f"lambda = {r.lam}", f"{len(r.atoms)} truncation atoms", "endpoint atoms only", True))
    return rows


def _random_wellmixed(rng: np.random.Generator, n: int) -> tuple[list[float], list[float]]:
    while True:
        pts = np.sort(rng.uniform(0, 1, 2 * n))
        if np.min(np.diff(pts)) >= 1e-3:
            break
    start = int(rng.integers(2))
    a = [float(p) for i, p in enumerate(pts) if i % 2 == start]
    b = [float(p) for i, p in enumerate(pts) if i % 2 != start]
    return a, b


def _repro_thm_5_1(args) -> list[tuple[str, str, str, bool]]:
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(5):
        n = int(rng.integers(1, 11))
        a, b = _random_wellmixed(rng, n)
        pair = interleaved_pair(WellMixedPair(a, b))
        member = perturbed_atoms(pair.mu, pair.lam)
        loc = max(abs(p - q) for p, q in zip(member.locations, pair.nu.locations))
        mass = max(abs(p - q) for p, q in zip(member.masses, pair.nu.masses))
        ok = (list(pair.mu.locations) == sorted(a) and list(pair.nu.locations) == sorted(b)
              and max(loc, mass) <= 1e-9 and (pair.lam < 0 or strictly_interlaced(pair.mu.x, pair.nu.x)))
        rows.append((f"trial {trial}: {n} + {n} points", f"atoms exact, perturbation error {max(loc, mass):.2e}",
                     "mu on a, nu on b, nu = perturbed mu", ok))
    return rows


def _repro_thm_5_5(args) -> list[tuple[str, str, str, bool]]:
    removed = middle_thirds_complement(12)
    patterns = ["02", "20", "0022", "2200", "0222", "2000", "002", "220", "0202022", "2020200"]
    fails = [theorem_5_5_check(removed, y) for y in cantor_points_periodic(patterns)]
    rows = [("middle thirds, depth 12", f"min total {min(r.total for r in fails):.3f}",
             "fails at 10 points, totals > 10", all(r.verdict == "fails" and r.total > 10 for r in fails))]
    hosts = IntervalSet(((0.0, 1.0), (2.0, 3.0)))
    res = porous_embed(hosts)
    pts = res.boundary_points()
    rng = np.random.default_rng(args.seed)
    chosen = sorted(rng.choice(len(pts), size=min(20, len(pts)), replace=False))
    checks = [theorem_5_5_check(res.removed, pts[i], tail_bound=res.tail_bound) for i in chosen]
    worst = max(r.tail_bound for r in checks)
    budget = sum(res.budgets)
    rows.append(("porous embedding", f"max certified total {worst:.4f}", f"passes, < {budget}",
                 res.ok and all(r.verdict == "passes" for r in checks) and worst < budget))
    return rows


REPRO: dict[str, Callable] = {"example-3.4": _repro_example_3_4, "example-5.2": _repro_example_5_2,
                              "example-6.1": _repro_example_6_1, "thm-5.1": _repro_thm_5_1,
                              "thm-5.5": _repro_thm_5_5}


def cmd_repro(args) -> int:
    rows = REPRO[args.target](args)
    _write_csv(args, ("item", "value", "expected", "status"),
               [(i, v, e, "PASS" if ok else "FAIL") for i, v, e, ok in rows])
    return EXIT_OK if all(r[3] for r in rows) else EXIT_FAIL


# -- parser -----------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numerical tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized runs (default 0)")
    p.add_argument("--out", default=argparse.SUPPRESS, help="write the artifact here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="krein", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common], help="validate a measure and report its norm")
    p.add_argument("--measure", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("transform", parents=[common], help="sample a transform on vertical rays (CSV)")
    p.add_argument("--measure")
    p.add_argument("--shift")
    p.add_argument("--kind", choices=("cauchy", "poisson", "conj"), default="cauchy")
    p.add_argument("--x", type=_floats, required=True)
    p.add_argument("--ymax", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("shift", parents=[common], help="shift to pair, pair to shift, point criteria")
    p.add_argument("action", choices=("to-pair", "from-pair", "criteria"))
    p.add_argument("--shift")
    p.add_argument("--measure")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--x", type=_floats)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("family", parents=[common], help="member of the rank-one family at a coupling")
    p.add_argument("--measure", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("classify", parents=[common], help="atom verdicts at given points (CSV)")
    p.add_argument("--measure", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--points", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", parents=[common], help="explicit constructions")
    p.add_argument("what", choices=("cantor", "wellmixed", "example52"))
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--exponent", type=float, default=1.5)
    p.add_argument("--constant", type=float)
    p.add_argument("--a", type=_floats)
    p.add_argument("--b", type=_floats)
    p.add_argument("--n", type=int, default=6)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check", parents=[common], help="porosity condition at a point")
    p.add_argument("what", choices=("t55",))
    p.add_argument("--k", required=True, help='JSON {"intervals": [[a, b], ...], "generations": [...]}')
    p.add_argument("--y", type=float, required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="coupling sweep of the Cantor family (CSV)")
    p.add_argument("--spec", required=True, help='JSON {"depth": D, "exponent": p}')
    p.add_argument("--lambdas", type=_floats, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", parents=[common], help="three-way comparison with dense diagonalization")
    p.add_argument("what", choices=("compare",))
    p.add_argument("--measure", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("repro", parents=[common], help="reproduce a named item with a pass/fail table")
    p.add_argument("target", choices=REPRO_TARGETS)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--lambdas", type=_floats, default=[0.5, 2.0])
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(func=cmd_repro)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("tol", 1e-9), ("seed", 0), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if not args.tol > 0:
        _emit_error("input", "--tol must be positive")
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, MeasureError, ValueError) as exc:
        _emit_error("input", str(exc))
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
