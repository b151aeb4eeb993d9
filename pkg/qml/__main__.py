import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

try:
    from .correspondence import CorrespondenceError, verify_correspondence
    from .field_matrix import FieldMatrixError, FieldSpec, to_json
    from .framing import FramingError
    from .grassmannian import (
        GrassmannianError,
        enumerate_group,
        grassmannian_count,
        grassmannian_points,
        partition_orbits,
        quotient_grassmannian_points,
        sigma_action,
    )
    from .harness import Budget, BudgetExceeded
    from .parser import InstanceParseError, load_quiver, load_representation, load_vector
    from .quiver_core import DimVector, Quiver, QuiverError, StabilityParam, euler_form, restricted_dim, theta_split
    from .report_writer import ReportWriter, ReportWriterError
    from .representation import (
        RepresentationError,
        canonical_injective_resolution,
        canonical_phi,
        canonical_projective_resolution,
        canonical_psi,
        injective_sum,
        projective_sum,
        verify_resolution_exact,
    )
    from .stability import StabilityError, check_stability
    from .suite import (
        EXIT_BUDGET,
        EXIT_FAILURES,
        EXIT_PARSE_ERROR,
        PRESETS,
        SUITE_CHECKS,
        SuiteConfig,
        SuiteError,
        preset,
        run_suite,
    )
    from .zelevinsky import ZelevinskyError, dual_zelevinsky_h, verify_zelevinsky_bijection, zelevinsky_g
except ImportError:
    # Fallback for direct execution
    from correspondence import CorrespondenceError, verify_correspondence
    from field_matrix import FieldMatrixError, FieldSpec, to_json
    from framing import FramingError
    from grassmannian import (
        GrassmannianError,
        enumerate_group,
        grassmannian_count,
        grassmannian_points,
        partition_orbits,
        quotient_grassmannian_points,
        sigma_action,
    )
    from harness import Budget, BudgetExceeded
    from parser import InstanceParseError, load_quiver, load_representation, load_vector
    from quiver_core import DimVector, Quiver, QuiverError, StabilityParam, euler_form, restricted_dim, theta_split
    from report_writer import ReportWriter, ReportWriterError
    from representation import (
        RepresentationError,
        canonical_injective_resolution,
        canonical_phi,
        canonical_projective_resolution,
        canonical_psi,
        injective_sum,
        projective_sum,
        verify_resolution_exact,
    )
    from stability import StabilityError, check_stability
    from suite import (
        EXIT_BUDGET,
        EXIT_FAILURES,
        EXIT_PARSE_ERROR,
        PRESETS,
        SUITE_CHECKS,
        SuiteConfig,
        SuiteError,
        preset,
        run_suite,
    )
    from zelevinsky import ZelevinskyError, dual_zelevinsky_h, verify_zelevinsky_bijection, zelevinsky_g

LIBRARY_ERRORS = (
    FieldMatrixError,
    QuiverError,
    RepresentationError,
    StabilityError,
    FramingError,
    GrassmannianError,
    CorrespondenceError,
    ZelevinskyError,
    SuiteError,
)


def status(message: str) -> None:
    """Print a progress line; stdout is reserved for JSON."""
    print(message, file=sys.stderr)


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def resolve_quiver(value: Optional[str]) -> Optional[Quiver]:
    """
    Read ``--quiver``: a JSON file, or ``subspace:m`` / ``linear:n`` for the built-in families.

    Raises:
        InstanceParseError: If the value is neither
    """
    if value is None:
        return None
    family, _, size = value.partition(":")
    if family in ("subspace", "linear") and size.isdigit():
        return Quiver.subspace(int(size)) if family == "subspace" else Quiver.linear(int(size))
    return load_quiver(value)


def build_config(args: argparse.Namespace, require_theta: bool = True) -> SuiteConfig:
    """
    Merge ``--preset`` with the explicit instance flags, explicit flags winning.

    Raises:
        InstanceParseError: If a file or inline vector cannot be read
        ValueError: If the instance is incomplete
    """
    base = preset(args.preset) if getattr(args, "preset", None) else None
    quiver = resolve_quiver(args.quiver) or (base.quiver if base else None)
    if quiver is None:
        raise ValueError("No quiver given: pass --quiver or --preset")
    field_spec = FieldSpec.parse(args.field) if args.field else (base.field if base else FieldSpec(2))
    if args.alpha:
        alpha = load_vector(args.alpha, quiver, DimVector)
    elif base is not None and base.quiver == quiver:
        alpha = base.alpha
    else:
        raise ValueError("No dimension vector given: pass --alpha")
    if args.theta:
        theta = load_vector(args.theta, quiver, StabilityParam)
    elif base is not None and base.quiver == quiver:
        theta = base.theta
    elif require_theta:
        raise ValueError("No stability parameter given: pass --theta")
    else:
        theta = StabilityParam.zero(quiver.vertices)
    budget = Budget(args.budget) if args.budget else Budget.from_env()
    weights = base.weights if base is not None and base.quiver == quiver and not args.theta else None
    return SuiteConfig(
        quiver, alpha, theta, field_spec,
        name=base.name if base is not None else "custom",
        n=args.N, budget=budget, seed=args.seed, samples=args.samples, workers=args.workers,
        timings=getattr(args, "timings", False), weights=weights,
    )


def emit(report: Dict[str, Any], out: Optional[str]) -> None:
    writer = ReportWriter(out)
    if out:
        path = writer.write(report)
        status(f"📄 Report written to {path}")
    else:
        sys.stdout.write(writer.render(report))


def cmd_euler(args: argparse.Namespace) -> int:
    quiver = resolve_quiver(args.quiver)
    if quiver is None:
        raise ValueError("euler needs --quiver")
    if not args.alpha or not args.beta:
        raise ValueError("euler needs --alpha and --beta")
    alpha = load_vector(args.alpha, quiver, DimVector)
    beta = load_vector(args.beta, quiver, DimVector)
    emit({"alpha": alpha.to_dict(), "beta": beta.to_dict(), "euler_form": euler_form(quiver, alpha, beta)}, args.out)
    return 0


def _load_rep(args: argparse.Namespace) -> Tuple[Quiver, Any]:
    if not args.rep:
        raise ValueError("Pass the representation file with --rep")
    # An instance file carries its own quiver
    quiver = resolve_quiver(args.quiver) or load_quiver(args.rep)
    field_spec = FieldSpec.parse(args.field) if args.field else None
    return quiver, load_representation(args.rep, quiver, field_spec)


def cmd_check_stability(args: argparse.Namespace) -> int:
    quiver, rep = _load_rep(args)
    if not args.theta:
        raise ValueError("check-stability needs --theta")
    theta = load_vector(args.theta, quiver, StabilityParam)
    budget = Budget(args.budget) if args.budget else None
    status(f"🔍 Checking theta-stability of a representation of dimension {rep.dim.to_dict()}")
    verdict = check_stability(rep, theta, budget)
    status(f"✅ Verdict: {verdict.kind.value}")
    emit({"theta": theta.to_dict(), "rep": rep.to_dict(), "verdict": verdict.to_dict()}, args.out)
    return 0


def _hom_with_labels(hom) -> Dict[str, Any]:
    labels = hom.source.labels or hom.target.labels or {}
    return {
        "maps": hom.to_dict(),
        "labels": {v: [str(lb) for lb in labels.get(v, ())] for v in hom.source.quiver.vertices},
    }


def cmd_resolve(args: argparse.Namespace) -> int:
    quiver, rep = _load_rep(args)
    theta = load_vector(args.theta, quiver, StabilityParam) if args.theta else None
    _, phi = canonical_phi(rep, theta)
    _, psi = canonical_psi(rep, theta)
    projective = canonical_projective_resolution(rep)
    injective = canonical_injective_resolution(rep)
    report = {
        "rep": rep.to_dict(),
        "theta": theta.to_dict() if theta is not None else None,
        "phi": {**_hom_with_labels(phi), "surjective": phi.is_surjective()},
        "psi": {**_hom_with_labels(psi), "injective": psi.is_injective()},
        "projective_resolution": {
            "P1": projective.first.dim.to_dict(),
            "P0": projective.second.dim.to_dict(),
            "differential": projective.differential.to_dict(),
            "problems": verify_resolution_exact(projective),
        },
        "injective_resolution": {
            "I0": injective.first.dim.to_dict(),
            "I1": injective.second.dim.to_dict(),
            "differential": injective.differential.to_dict(),
            "problems": verify_resolution_exact(injective),
        },
    }
    emit(report, args.out)
    return 0


def cmd_grassmannian(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    plus, minus = theta_split(cfg.theta)
    if args.ambient == "p_plus":
        beta = restricted_dim(cfg.alpha, plus)
        ambient = projective_sum(cfg.quiver, cfg.field, beta)
        status(f"🔍 Enumerating Gr^alpha(P+) with P+ of dimension {ambient.dim.to_dict()}")
        points = list(quotient_grassmannian_points(ambient, cfg.alpha, cfg.budget))
    else:
        beta = restricted_dim(cfg.alpha, minus)
        ambient = injective_sum(cfg.quiver, cfg.field, beta)
        status(f"🔍 Enumerating Gr_alpha(I-) with I- of dimension {ambient.dim.to_dict()}")
        points = list(grassmannian_points(ambient, cfg.alpha, cfg.budget))
    report: Dict[str, Any] = {
        "ambient": args.ambient,
        "ambient_dim": ambient.dim.to_dict(),
        "alpha": cfg.alpha.to_dict(),
        "field": cfg.field.name,
        "count": len(points),
    }
    if args.ambient == "i_minus" and args.recount:
        report["count"] = grassmannian_count(ambient, cfg.alpha, cfg.budget, recount=True)
    if not args.count:
        report["points"] = [p.to_dict() for p in points]
    if args.orbits:
        group = list(enumerate_group(cfg.field, beta, cfg.budget))
        orbits = partition_orbits(points, group, sigma_action)
        report["orbits"] = [{"size": len(o), "representative": o[0].to_dict()} for o in orbits]
    status(f"✅ Found {len(points)} points")
    emit(report, args.out)
    return 0


def cmd_correspond(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    status(f"🔍 Comparing orbits on R(Q, {cfg.alpha.to_dict()}) over {cfg.field.name}")
    report = verify_correspondence(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget, cfg.workers)
    _summarize(report.name, report.passed, report.failure_count)
    emit(report.to_dict(), args.out)
    return 0 if report.passed else EXIT_FAILURES


def cmd_zelevinsky(args: argparse.Namespace) -> int:
    if args.emit_matrix:
        _, rep = _load_rep(args)
        matrix = zelevinsky_g(rep) if args.which != "eta" else dual_zelevinsky_h(rep)
        report: Dict[str, Any] = {"rep": rep.to_dict(), "which": args.which, "matrix": to_json(matrix)}
        if args.which == "both":
            report["matrix_eta"] = to_json(dual_zelevinsky_h(rep))
        emit(report, args.out)
        return 0
    if not args.alpha:
        raise ValueError("zelevinsky needs --alpha (or --emit-matrix with --rep)")
    quiver = Quiver.linear(len(args.alpha.split(",")))
    alpha = load_vector(args.alpha, quiver, DimVector)
    field_spec = FieldSpec.parse(args.field or "F2")
    budget = Budget(args.budget) if args.budget else None
    status(f"🔍 Checking the Zelevinsky maps for alpha = {alpha.to_dict()} over {field_spec.name}")
    report_obj = verify_zelevinsky_bijection(alpha, field_spec, budget, which=args.which, workers=args.workers)
    _summarize(report_obj.name, report_obj.passed, report_obj.failure_count)
    emit(report_obj.to_dict(), args.out)
    return 0 if report_obj.passed else EXIT_FAILURES


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    status(f"🔍 Running {', '.join(args.checks)} on {cfg.name} over {cfg.field.name}")
    code, report = run_suite(cfg, args.checks)
    for name, result in report["checks"].items():
        if result["status"] == "skipped":
            status(f"⏭️  {name}: skipped ({result['reason']})")
        elif result["status"] == "budget_exceeded":
            status(f"❌ {name}: {result['error']}")
        else:
            mark = "✅" if result["status"] == "passed" else "❌"
            status(f"{mark} {name}: {result['checked']} checked, {result['failure_count']} failures")
    emit(report, args.out)
    return code


def _summarize(name: str, passed: bool, failures: int) -> None:
    if passed:
        status(f"✅ {name}: no counterexamples")
    else:
        status(f"❌ {name}: {failures} counterexamples")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiver", help="Quiver JSON file, or subspace:m / linear:n")
    common.add_argument("--preset", choices=sorted(PRESETS), help="Start from a named example instance")
    common.add_argument("--alpha", help="Dimension vector: JSON file or inline list such as 1,1,1,2")
    common.add_argument("--theta", help="Stability parameter: JSON file or inline list such as 2,2,2,-3")
    common.add_argument("--field", default=None, help="F2, F3, F5, ... or Q (default: F2)")
    common.add_argument("--N", type=int, default=None, help="Framing constant N (default: 1 + sum |theta_i| alpha_i)")
    common.add_argument("--budget", type=int, default=None, help="Enumeration budget (default: QML_BUDGET or 10^7)")
    common.add_argument("--workers", type=int, default=1, help="Worker threads")
    common.add_argument("--seed", type=int, default=0, help="Seed for sampled checks")
    common.add_argument("--samples", type=int, default=200, help="Samples for randomized checks")
    common.add_argument("--out", default=None, help="Write the JSON report to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="qml",
        description="Exact finite-field computations with quiver representations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    euler = sub.add_parser("euler", parents=[common], help="Euler form of two dimension vectors")
    euler.add_argument("--beta", help="Second dimension vector")
    euler.set_defaults(handler=cmd_euler)

    stability = sub.add_parser("check-stability", parents=[common], help="theta-stability verdict with witness")
    stability.add_argument("--rep", help="Representation JSON file")
    stability.set_defaults(handler=cmd_check_stability)

    resolve = sub.add_parser("resolve", parents=[common], help="phi_M, psi_M and the canonical resolutions")
    resolve.add_argument("--rep", help="Representation JSON file")
    resolve.set_defaults(handler=cmd_resolve)

    grass = sub.add_parser("grassmannian", parents=[common], help="Points of Gr^alpha(P+) or Gr_alpha(I-)")
    grass.add_argument("--ambient", choices=["p_plus", "i_minus"], default="i_minus")
    grass.add_argument("--count", action="store_true", help="Only print the number of points")
    grass.add_argument("--orbits", action="store_true", help="Decompose into orbits of the framing group")
    grass.add_argument("--recount", action="store_true", help="Confirm the count in reverse vertex order")
    grass.set_defaults(handler=cmd_grassmannian)

    correspond = sub.add_parser("correspond", parents=[common], help="Orbit-level correspondence report")
    correspond.set_defaults(handler=cmd_correspond)

    zel = sub.add_parser("zelevinsky", parents=[common], help="Zelevinsky maps on the linear A_n quiver")
    zel.add_argument("--which", choices=["zeta", "eta", "both"], default="both")
    zel.add_argument("--verify", action="store_true", help="Check the bijections (the default action)")
    zel.add_argument("--emit-matrix", action="store_true", help="Print g_M / h_M for --rep")
    zel.add_argument("--rep", help="Representation JSON file")
    zel.set_defaults(handler=cmd_zelevinsky)

    verify = sub.add_parser("verify", parents=[common], help="Run verification checks")
    verify.add_argument("checks", nargs="*", default=["all"],
                        help=f"Checks to run: all, {', '.join(SUITE_CHECKS)}")
    verify.add_argument("--timings", action="store_true", help="Record runtimes in the report")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None):
    """Main entry point for the qml command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        code = args.handler(args)

    except InstanceParseError as e:
        print(f"❌ Parsing error: {e}", file=sys.stderr)
        print("💡 Please check the JSON layout of your quiver, vector and representation files.", file=sys.stderr)
        sys.exit(EXIT_PARSE_ERROR)

    except BudgetExceeded as e:
        print(f"❌ Budget exceeded: {e}", file=sys.stderr)
        print("💡 Raise --budget (or QML_BUDGET) or pick a smaller instance.", file=sys.stderr)
        sys.exit(EXIT_BUDGET)

    except ReportWriterError as e:
        print(f"❌ Report writing error: {e}", file=sys.stderr)
        print("💡 Please check output directory permissions.", file=sys.stderr)
        sys.exit(EXIT_FAILURES)

    except LIBRARY_ERRORS as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        sys.exit(EXIT_FAILURES)

    except ValueError as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        sys.exit(EXIT_FAILURES)

    except Exception as e:
        print(f"❌ Unexpected error: {e}", file=sys.stderr)
        sys.exit(EXIT_FAILURES)

    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
