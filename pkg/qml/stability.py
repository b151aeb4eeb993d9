"""
Theta-(semi)stability by exhaustive enumeration of subrepresentations.

M is theta-semistable when theta(dim M) = 0 and theta(M') <= 0 for every
non-zero proper subrepresentation M'; stable when the inequality is strict.
Over F_p the quantifier is realized literally by enumerating all invariant
subspace tuples, which is why only finite fields are accepted here.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Union

import numpy as np

try:
    from .field_matrix import FieldSpec, InfiniteField, Matrix, enumerate_matrices, row_space, vstack, zeros
    from .grassmannian import SubspaceTuple, all_subspace_tuples
    from .harness import Budget, VerificationReport, parallel_map, resolve_budget
    from .quiver_core import DimVector, GroupElement, Quiver, StabilityParam, WrongQuiverShape, theta_value
    from .representation import Representation, canonical_phi, canonical_psi
except ImportError:
    from field_matrix import FieldSpec, InfiniteField, Matrix, enumerate_matrices, row_space, vstack, zeros
    from grassmannian import SubspaceTuple, all_subspace_tuples
    from harness import Budget, VerificationReport, parallel_map, resolve_budget
    from quiver_core import DimVector, GroupElement, Quiver, StabilityParam, WrongQuiverShape, theta_value
    from representation import Representation, canonical_phi, canonical_psi

logger = logging.getLogger(__name__)


class StabilityError(Exception):
    """Custom exception for stability checks."""
    pass


@dataclass(frozen=True)
class SubrepWitness:
    """A subrepresentation together with its dimension vector and theta-value."""

    subspace: SubspaceTuple
    dim: DimVector
    theta_value: int

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim.to_dict(), "theta_value": self.theta_value, **self.subspace.to_dict()}


class StabilityKind(Enum):
    STABLE = "stable"
    SEMISTABLE_NOT_STABLE = "semistable_not_stable"
    UNSTABLE = "unstable"
    THETA_NONZERO = "theta_nonzero"


@dataclass(frozen=True)
class StabilityVerdict:
    kind: StabilityKind
    witness: Optional[SubrepWitness] = None

    @property
    def is_semistable(self) -> bool:
        return self.kind in (StabilityKind.STABLE, StabilityKind.SEMISTABLE_NOT_STABLE)

    @property
    def is_stable(self) -> bool:
        return self.kind is StabilityKind.STABLE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.kind.value,
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }


def enumerate_subreps(rep: Representation, budget: Optional[Budget] = None) -> Iterator[SubrepWitness]:
    """
    Every subrepresentation of ``rep``, including 0 and ``rep`` itself.

    Theta-values in the stream are 0; use ``check_stability`` for a verdict.

    Raises:
        InfiniteField: Over Q
        BudgetExceeded: If the subspace tuple count exceeds the budget
    """
    for sub in all_subspace_tuples(rep, budget):
        yield SubrepWitness(sub, sub.dim, 0)


def check_stability(rep: Representation, theta: StabilityParam, budget: Optional[Budget] = None) -> StabilityVerdict:
    """
    Decide theta-(semi)stability of ``rep`` by exhaustive enumeration.

    The witness is the first violator in enumeration order: the first
    subrepresentation with positive theta-value for an unstable verdict, or the
    first non-zero proper one with theta-value zero for a strictly semistable one.

    Raises:
        InfiniteField: If the representation is over Q
        BudgetExceeded: If the subspace tuple count exceeds the budget
    """
    if theta_value(theta, rep.dim) != 0:
        return StabilityVerdict(StabilityKind.THETA_NONZERO)
    if not rep.field.is_finite:
        raise InfiniteField("Stability is decided by subrepresentation enumeration, which needs a finite field")
    total = rep.dim
    first_zero = None
    for sub in all_subspace_tuples(rep, budget):
        dim = sub.dim
        if dim.is_zero() or dim == total:
            continue
        value = theta_value(theta, dim)
        if value > 0:
            return StabilityVerdict(StabilityKind.UNSTABLE, SubrepWitness(sub, dim, value))
        if value == 0 and first_zero is None:
            first_zero = SubrepWitness(sub, dim, value)
    if first_zero is not None:
        return StabilityVerdict(StabilityKind.SEMISTABLE_NOT_STABLE, first_zero)
    return StabilityVerdict(StabilityKind.STABLE)


def _subspace_shape(rep: Representation) -> List[str]:
    quiver = rep.quiver
    sinks = quiver.sinks()
    if len(sinks) != 1 or len(quiver.vertices) < 2:
        raise WrongQuiverShape("Subspace criterion needs exactly one sink")
    sink = sinks[0]
    sources = [v for v in quiver.vertices if v != sink]
    for v in sources:
        outgoing = quiver.arrows_from(v)
        if quiver.arrows_to(v) or len(outgoing) != 1 or outgoing[0].dst != sink:
            raise WrongQuiverShape(f"Vertex {v} is not a source with a single arrow to {sink}")
        if rep.dim[v] != 1:
            raise WrongQuiverShape(f"Source {v} must have dimension 1, got {rep.dim[v]}")
    return sources


def subspace_theta(quiver: Quiver, weights: Sequence[int], n: int) -> StabilityParam:
    """theta = (n*a_1, ..., n*a_m, -|a|) on the m-subspace quiver with sink dimension n."""
    sink = quiver.sinks()[0]
    sources = [v for v in quiver.vertices if v != sink]
    values = dict(zip(sources, (n * w for w in weights)))
    values[sink] = -sum(weights)
    return StabilityParam(quiver.vertices, values)


def subspace_quiver_criterion(rep: Representation, weights: Union[Mapping[str, int], Sequence[int]]) -> StabilityVerdict:
    """
    Closed-form verdict on the m-subspace quiver with alpha = (1, ..., 1, n).

    With v_i the image of the i-th arrow, M is semistable iff
    n * |a|_I <= |a| * dim span(v_i : i in I) for every non-empty I, and stable
    iff the inequality is strict except for I = all with span = k^n. For n = 2
    this says every I with |a|_I > |a|/2 spans k^2.

    Raises:
        WrongQuiverShape: If ``rep`` does not live on a subspace quiver with unit source dimensions
    """
    sources = _subspace_shape(rep)
    sink = rep.quiver.sinks()[0]
    if isinstance(weights, Mapping):
        weights = [weights[v] for v in sources]
    weights = list(weights)
    if len(weights) != len(sources) or any(w <= 0 for w in weights):
        raise StabilityError(f"Need {len(sources)} positive weights, got {weights}")
    n = rep.dim[sink]
    total = sum(weights)
    theta = subspace_theta(rep.quiver, weights, n)
    vectors = {v: _source_vector(rep, v) for v in sources}

    first_zero = None
    for size in range(1, len(sources) + 1):
        for chosen in itertools.combinations(range(len(sources)), size):
            names = [sources[i] for i in chosen]
            span = row_space(vstack(rep.field, [vectors[v] for v in names], n))
            lhs = n * sum(weights[i] for i in chosen)
            rhs = total * span.rows
            if lhs < rhs or (lhs == rhs and first_zero is not None):
                continue
            if lhs == rhs and size == len(sources) and span.rows == n:
                continue
            bases = {v: (Matrix._wrap(rep.field, np.ones((1, 1), dtype=np.int64)) if v in names
                         else zeros(rep.field, 0, 1)) for v in sources}
            bases[sink] = span
            sub = SubspaceTuple(rep, bases, canonical=True)
            witness = SubrepWitness(sub, sub.dim, theta_value(theta, sub.dim))
            if lhs > rhs:
                return StabilityVerdict(StabilityKind.UNSTABLE, witness)
            first_zero = witness
    if first_zero is not None:
        return StabilityVerdict(StabilityKind.SEMISTABLE_NOT_STABLE, first_zero)
    return StabilityVerdict(StabilityKind.STABLE)


def _source_vector(rep: Representation, source: str) -> Matrix:
    """The image v_i of the arrow leaving ``source``, as a 1 x n row."""
    arrow = rep.quiver.arrows_from(source)[0]
    return rep.map(arrow.id).T


def count_reps(quiver: Quiver, alpha: DimVector, field: FieldSpec) -> int:
    return field.size ** sum(alpha[a.src] * alpha[a.dst] for a in quiver.arrows)


def enumerate_reps(quiver: Quiver, alpha: DimVector, field: FieldSpec,
                   budget: Optional[Budget] = None) -> Iterator[Representation]:
    """
    All points of R(Q, alpha)(F_p), in lexicographic order of the arrow matrices.

    Raises:
        InfiniteField: Over Q
        BudgetExceeded: If p^(sum alpha_s alpha_t) exceeds the budget
    """
    total = count_reps(quiver, alpha, field)
    resolve_budget(budget).ensure(total, f"R(Q, {alpha.to_dict()}) over {field.name}")
    logger.debug("Enumerating %d points of R(Q, %s) over %s", total, alpha.to_dict(), field.name)
    factors = [list(enumerate_matrices(field, alpha[a.dst], alpha[a.src])) for a in quiver.arrows]
    for matrices in itertools.product(*factors):
        yield Representation(quiver, field, alpha, {a.id: m for a, m in zip(quiver.arrows, matrices)})


def verify_canonical_maps(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                          budget: Optional[Budget] = None, workers: int = 1) -> VerificationReport:
    """On the whole semistable locus, phi_M is a surjective and psi_M an injective homomorphism."""
    report = VerificationReport("canonical-maps")
    reps = list(enumerate_reps(quiver, alpha, field, budget))
    verdicts = parallel_map(lambda m: check_stability(m, theta, budget), reps, workers)
    semistable = stable = 0
    for rep, verdict in zip(reps, verdicts):
        if not verdict.is_semistable:
            continue
        semistable += 1
        stable += verdict.is_stable
        _, phi = canonical_phi(rep, theta)
        _, psi = canonical_psi(rep, theta)
        ok = phi.is_valid() and psi.is_valid() and phi.is_surjective() and psi.is_injective()
        report.record(ok, rep=rep.to_dict(), phi_surjective=phi.is_surjective(), psi_injective=psi.is_injective())
    logger.debug("Canonical maps checked on %d of %d points (%d stable)", semistable, len(reps), stable)
    report.details = {"points": len(reps), "semistable": semistable, "stable": stable}
    return report


def verify_subspace_criterion(quiver: Quiver, alpha: DimVector, weights: Sequence[int], field: FieldSpec,
                              budget: Optional[Budget] = None, workers: int = 1) -> VerificationReport:
    """The closed-form subspace criterion and exhaustive check_stability agree on every point."""
    report = VerificationReport("subspace-criterion")
    sink = quiver.sinks()[0]
    theta = subspace_theta(quiver, weights, alpha[sink])
    reps = list(enumerate_reps(quiver, alpha, field, budget))

    def compare(rep: Representation):
        return check_stability(rep, theta, budget).kind, subspace_quiver_criterion(rep, weights).kind

    counts: Dict[str, int] = {}
    for rep, (exhaustive, closed) in zip(reps, parallel_map(compare, reps, workers)):
        counts[exhaustive.value] = counts.get(exhaustive.value, 0) + 1
        report.record(exhaustive == closed, rep=rep.to_dict(), exhaustive=exhaustive.value, closed_form=closed.value)
    logger.debug("Subspace criterion verdicts on %d points: %s", len(reps), counts)
    report.details = {"points": len(reps), "verdicts": counts, "theta": theta.to_dict()}
    return report


def verify_stability_invariance(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                                samples: int, rng: np.random.Generator,
                                budget: Optional[Budget] = None) -> VerificationReport:
    """
    Verdicts are constant on G(alpha)-orbits (random samples) and unchanged by
    rescaling theta by 2 and 3 (every point).
    """
    report = VerificationReport("stability-invariance")
    reps = list(enumerate_reps(quiver, alpha, field, budget))
    scaled = [theta.scaled(k) for k in (2, 3)]
    for rep in reps:
        kind = check_stability(rep, theta, budget).kind
        for k, other in zip((2, 3), scaled):
            report.record(check_stability(rep, other, budget).kind == kind, rep=rep.to_dict(), scale=k)
    for k in range(samples):
        rep = reps[int(rng.integers(len(reps)))]
        g = GroupElement.random(field, alpha, rng)
        moved = rep.act(g)
        report.record(check_stability(moved, theta, budget).kind == check_stability(rep, theta, budget).kind,
                      sample=k, rep=rep.to_dict(), moved=moved.to_dict())
    logger.debug("Stability invariance: %d points, %d group samples", len(reps), samples)
    report.details = {"points": len(reps), "group_samples": samples}
    return report
