"""
Verification suites.

A suite is one instance (quiver, alpha, theta, field) plus a selection of
checks. Each check wraps one verify_* operation of the library, gets its own
random stream derived from the suite seed and contributes one section to the
JSON report. Checks that do not apply to the instance (the subspace criterion
on a non-subspace quiver, the Zelevinsky maps off type A_n, ...) are listed
with the reason instead of being run.
"""

import logging
import time
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

try:
    from .correspondence import verify_bipartite, verify_correspondence, verify_hilbert_points, verify_saturation
    from .field_matrix import FieldSpec
    from .framing import default_N, verify_engel_reineke, verify_framed_stability, verify_theta_pm
    from .harness import Budget, BudgetExceeded, VerificationReport, derive_rng, parallel_map
    from .quiver_core import DimVector, Quiver, QuiverError, StabilityParam, theta_value
    from .representation import verify_hom_ext
    from .stability import (
        verify_canonical_maps,
        verify_stability_invariance,
        verify_subspace_criterion,
    )
    from .zelevinsky import linear_order, verify_zelevinsky_bijection
except ImportError:
    from correspondence import verify_bipartite, verify_correspondence, verify_hilbert_points, verify_saturation
    from field_matrix import FieldSpec
    from framing import default_N, verify_engel_reineke, verify_framed_stability, verify_theta_pm
    from harness import Budget, BudgetExceeded, VerificationReport, derive_rng, parallel_map
    from quiver_core import DimVector, Quiver, QuiverError, StabilityParam, theta_value
    from representation import verify_hom_ext
    from stability import (
        verify_canonical_maps,
        verify_stability_invariance,
        verify_subspace_criterion,
    )
    from zelevinsky import linear_order, verify_zelevinsky_bijection

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_PARSE_ERROR = 2
EXIT_BUDGET = 3

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 200


class SuiteError(Exception):
    """Custom exception for suite configuration errors."""
    pass


class UnknownPreset(SuiteError):
    """Raised for a preset name that is not defined."""
    pass


@dataclass
class SuiteConfig:
    """
    Everything a suite run depends on.

    Two runs with equal configs produce byte-identical reports unless
    ``timings`` is set.
    """

    quiver: Quiver
    alpha: DimVector
    theta: StabilityParam
    field: FieldSpec = FieldSpec(2)
    name: str = "custom"
    n: Optional[int] = None
    budget: Budget = dataclass_field(default_factory=Budget.from_env)
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    workers: int = 1
    timings: bool = False
    weights: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.workers < 1:
            raise SuiteError(f"Worker count must be at least 1, got {self.workers}")
        if self.samples < 0:
            raise SuiteError(f"Sample count must be non-negative, got {self.samples}")
        if self.n is not None and self.n < 1:
            raise SuiteError(f"N must be positive, got {self.n}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "quiver": self.quiver.to_dict(),
            "alpha": self.alpha.to_dict(),
            "theta": self.theta.to_dict(),
            "field": self.field.name,
            "N": self.n,
            "budget": self.budget.limit,
            "seed": self.seed,
            "samples": self.samples,
        }


def _subspace_config(name: str, m: int, n: int, field_spec: FieldSpec) -> SuiteConfig:
    quiver = Quiver.subspace(m)
    weights = (1,) * m
    alpha = DimVector(quiver.vertices, [1] * m + [n])
    theta = StabilityParam(quiver.vertices, [n * w for w in weights] + [-sum(weights)])
    return SuiteConfig(quiver, alpha, theta, field_spec, name=name, weights=weights)


def _linear_config(name: str, alpha: Sequence[int], theta: Optional[Sequence[int]] = None) -> SuiteConfig:
    quiver = Quiver.linear(len(alpha))
    theta = theta if theta is not None else [0] * len(alpha)
    return SuiteConfig(quiver, DimVector(quiver.vertices, list(alpha)), StabilityParam(quiver.vertices, list(theta)),
                       FieldSpec(2), name=name)


PRESETS: Dict[str, Callable[[], SuiteConfig]] = {
    "subspace-3-2": lambda: _subspace_config("subspace-3-2", 3, 2, FieldSpec(2)),
    "subspace-4-2": lambda: _subspace_config("subspace-4-2", 4, 2, FieldSpec(2)),
    "subspace-3-2-f3": lambda: _subspace_config("subspace-3-2-f3", 3, 2, FieldSpec(3)),
    "an-linear-111": lambda: _linear_config("an-linear-111", (1, 1, 1)),
    "an-linear-121": lambda: _linear_config("an-linear-121", (1, 2, 1)),
    "a2-11": lambda: _linear_config("a2-11", (1, 1), (1, -1)),
}


def preset(name: str) -> SuiteConfig:
    """
    Build one of the named example instances.

    Raises:
        UnknownPreset: If ``name`` is not a preset
    """
    try:
        return PRESETS[name]()
    except KeyError:
        raise UnknownPreset(f"Unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")


def subspace_weights(cfg: SuiteConfig) -> Optional[Tuple[int, ...]]:
    """Weights a with theta = (n*a, -|a|) on a subspace quiver, or None if theta has another shape."""
    if cfg.weights is not None:
        return cfg.weights
    sinks = cfg.quiver.sinks()
    if len(sinks) != 1:
        return None
    n = cfg.alpha[sinks[0]]
    sources = [v for v in cfg.quiver.vertices if v != sinks[0]]
    if n == 0 or any(cfg.theta[v] % n for v in sources):
        return None
    weights = tuple(cfg.theta[v] // n for v in sources)
    if cfg.theta[sinks[0]] != -sum(weights):
        return None
    return weights


def _balanced(cfg: SuiteConfig) -> Optional[str]:
    if theta_value(cfg.theta, cfg.alpha) != 0:
        return f"theta(alpha) = {theta_value(cfg.theta, cfg.alpha)}, needs 0"
    return None


def _subspace_shape(cfg: SuiteConfig) -> Optional[str]:
    sinks = cfg.quiver.sinks()
    if len(sinks) != 1:
        return "not a subspace quiver"
    for v in cfg.quiver.vertices:
        if v == sinks[0]:
            continue
        out = cfg.quiver.arrows_from(v)
        if cfg.quiver.arrows_to(v) or len(out) != 1 or cfg.alpha[v] != 1:
            return "not a subspace quiver with unit source dimensions"
    if subspace_weights(cfg) is None:
        return "theta is not of the form (n*a, -|a|)"
    return None


def _bipartite_shape(cfg: SuiteConfig) -> Optional[str]:
    quiver = cfg.quiver
    if not quiver.is_bipartite_oriented():
        return "not every vertex is a source or a sink"
    if set(quiver.sources()) & set(quiver.sinks()):
        return "isolated vertex"
    if any(cfg.theta[v] <= 0 for v in quiver.sources()) or any(cfg.theta[v] >= 0 for v in quiver.sinks()):
        return "theta must be positive on sources and negative on sinks"
    return None


def _linear_shape(cfg: SuiteConfig) -> Optional[str]:
    try:
        vertices, _ = linear_order(cfg.quiver)
    except QuiverError as e:
        return str(e)
    if list(vertices) != list(Quiver.linear(len(vertices)).vertices):
        return "vertices must be named 1..n"
    if not cfg.field.is_finite:
        return "needs a finite field"
    return None


def _finite(cfg: SuiteConfig) -> Optional[str]:
    return None if cfg.field.is_finite else "exhaustive checks need a finite field"


def _first(*reasons: Callable[[SuiteConfig], Optional[str]]) -> Callable[[SuiteConfig], Optional[str]]:
    def check(cfg: SuiteConfig) -> Optional[str]:
        for reason in reasons:
            found = reason(cfg)
            if found:
                return found
        return None
    return check


def _hom_ext_fields(cfg: SuiteConfig) -> List[FieldSpec]:
    fields = [cfg.field]
    for extra in (FieldSpec(2), FieldSpec(3)):
        if extra not in fields:
            fields.append(extra)
    return fields


@dataclass(frozen=True)
class SuiteCheck:
    """One named check: how to run it and when it applies."""

    run: Callable[[SuiteConfig], VerificationReport]
    applies: Callable[[SuiteConfig], Optional[str]] = lambda cfg: None


SUITE_CHECKS: Dict[str, SuiteCheck] = {
    "hom-ext": SuiteCheck(
        lambda cfg: verify_hom_ext(cfg.quiver, _hom_ext_fields(cfg), cfg.samples,
                                   derive_rng(cfg.seed, "hom-ext"))),
    "canonical-maps": SuiteCheck(
        lambda cfg: verify_canonical_maps(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget),
        _finite),
    "subspace-criterion": SuiteCheck(
        lambda cfg: verify_subspace_criterion(cfg.quiver, cfg.alpha, subspace_weights(cfg), cfg.field, cfg.budget),
        _first(_finite, _subspace_shape)),
    "stability-invariance": SuiteCheck(
        lambda cfg: verify_stability_invariance(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.samples,
                                                derive_rng(cfg.seed, "stability-invariance"), cfg.budget),
        _finite),
    "engel-reineke": SuiteCheck(
        lambda cfg: verify_engel_reineke(cfg.quiver, cfg.alpha, cfg.alpha, cfg.field, cfg.budget),
        _finite),
    "theta-pm": SuiteCheck(
        lambda cfg: verify_theta_pm(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget, cfg.n),
        _first(_finite, _balanced)),
    "framed-stability": SuiteCheck(
        lambda cfg: verify_framed_stability(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget, cfg.n),
        _first(_finite, _balanced)),
    "hilbert-equivariance": SuiteCheck(
        lambda cfg: verify_hilbert_points(cfg.quiver, cfg.alpha, cfg.theta, cfg.field,
                                          derive_rng(cfg.seed, "hilbert-equivariance"), cfg.samples, cfg.budget),
        _finite),
    "saturation": SuiteCheck(
        lambda cfg: verify_saturation(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget, cfg.n),
        _first(_finite, _balanced)),
    "correspondence": SuiteCheck(
        lambda cfg: verify_correspondence(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget),
        _first(_finite, _balanced)),
    "bipartite": SuiteCheck(
        lambda cfg: verify_bipartite(cfg.quiver, cfg.alpha, cfg.theta, cfg.field, cfg.budget),
        _first(_finite, _balanced, _bipartite_shape)),
    "zelevinsky": SuiteCheck(
        lambda cfg: verify_zelevinsky_bijection(cfg.alpha, cfg.field, cfg.budget),
        _linear_shape),
}


def resolve_checks(names: Sequence[str]) -> List[str]:
    """
    Expand ``all`` and validate check names, keeping the declared order.

    Raises:
        SuiteError: For an unknown check name
    """
    if not names or "all" in names:
        return list(SUITE_CHECKS)
    unknown = [n for n in names if n not in SUITE_CHECKS]
    if unknown:
        raise SuiteError(f"Unknown check(s) {unknown}; available: all, {', '.join(SUITE_CHECKS)}")
    return [n for n in SUITE_CHECKS if n in names]


def _run_check(cfg: SuiteConfig, name: str) -> Dict[str, Any]:
    check = SUITE_CHECKS[name]
    reason = check.applies(cfg)
    if reason:
        logger.info("Skipping %s: %s", name, reason)
        return {"status": "skipped", "reason": reason}
    started = time.perf_counter()
    try:
        report = check.run(cfg)
    except BudgetExceeded as e:
        logger.warning("%s stopped: %s", name, e)
        out = {"status": "budget_exceeded", "error": str(e), "needed": e.count, "limit": e.limit}
    else:
        out = {"status": "passed" if report.passed else "failed", **report.to_dict()}
    if cfg.timings:
        out["seconds"] = round(time.perf_counter() - started, 3)
    return out


def run_suite(cfg: SuiteConfig, names: Sequence[str] = ("all",)) -> Tuple[int, Dict[str, Any]]:
    """
    Run the selected checks on one instance.

    Checks run concurrently on up to ``cfg.workers`` threads; the report is
    assembled afterwards in check order.

    Returns:
        (exit code, report): 0 when every check that ran passed, 1 when some
        check failed, 3 when an enumeration exceeded the budget

    Raises:
        SuiteError: For an unknown check name
    """
    selected = resolve_checks(names)
    results = parallel_map(lambda name: _run_check(cfg, name), selected, cfg.workers)
    checks = dict(zip(selected, results))
    failed = sorted(n for n, r in checks.items() if r["status"] == "failed")
    over_budget = sorted(n for n, r in checks.items() if r["status"] == "budget_exceeded")
    report = {
        "suite": cfg.name,
        "config": cfg.to_dict(),
        "default_N": default_N(cfg.theta, cfg.alpha),
        "checks": checks,
        "failed": failed,
        "over_budget": over_budget,
        "failure_count": sum(r.get("failure_count", 0) for r in checks.values()),
        "passed": not failed and not over_budget,
    }
    if over_budget:
        return EXIT_BUDGET, report
    return (EXIT_FAILURES if failed else EXIT_OK), report
