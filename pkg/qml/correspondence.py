"""
The correspondence between theta-semistable representations and quiver
Grassmannians of P+ and I-.

phi(M) = ker(phi_M) in Gr^alpha(P+) and psi(M) = im(psi_M) in Gr_alpha(I-).
Both factor through the framed representations f+(M) = (M, id) and
f-(M) = (M, id) and the Hilbert scheme points of those. Everything here is
verified at the level of F_p-points and orbits: G(alpha)-orbits on the
(semi)stable locus against sigma-orbits of G(alpha+) and G(alpha-) on the
images.
"""

import itertools
import logging
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

try:
    from .field_matrix import (
        FieldSpec,
        Matrix,
        block_diagonal,
        column_space,
        hstack,
        invert,
        is_invertible,
        kernel_basis,
        matmul,
        row_space,
        scale,
        transpose,
        vstack,
        zeros,
    )
    from .framing import (
        FramedRep,
        FramingKind,
        build_framed,
        default_N,
        enumerate_framed,
        framed_param_theta,
        framed_stability,
        framing_invertible,
    )
    from .grassmannian import (
        NotInDegreeZeroLocus,
        SubspaceTuple,
        enumerate_group,
        hilbert_point_phi,
        hilbert_point_psi,
        partition_orbits,
        sigma_action,
    )
    from .harness import Budget, VerificationReport, parallel_map, resolve_budget
    from .quiver_core import DimVector, GroupElement, Quiver, StabilityParam, WrongQuiverShape, restricted_dim, theta_split
    from .representation import Representation, canonical_phi, canonical_psi, hom_basis, identity_framing
    from .stability import check_stability, enumerate_reps
except ImportError:
    from field_matrix import (
        FieldSpec,
        Matrix,
        block_diagonal,
        column_space,
        hstack,
        invert,
        is_invertible,
        kernel_basis,
        matmul,
        row_space,
        scale,
        transpose,
        vstack,
        zeros,
    )
    from framing import (
        FramedRep,
        FramingKind,
        build_framed,
        default_N,
        enumerate_framed,
        framed_param_theta,
        framed_stability,
        framing_invertible,
    )
    from grassmannian import (
        NotInDegreeZeroLocus,
        SubspaceTuple,
        enumerate_group,
        hilbert_point_phi,
        hilbert_point_psi,
        partition_orbits,
        sigma_action,
    )
    from harness import Budget, VerificationReport, parallel_map, resolve_budget
    from quiver_core import DimVector, GroupElement, Quiver, StabilityParam, WrongQuiverShape, restricted_dim, theta_split
    from representation import Representation, canonical_phi, canonical_psi, hom_basis, identity_framing
    from stability import check_stability, enumerate_reps

logger = logging.getLogger(__name__)


class CorrespondenceError(Exception):
    """Custom exception for correspondence errors."""
    pass


class NotSemistable(CorrespondenceError):
    """Raised when phi or psi is applied to a representation that is not theta-semistable."""
    pass


def f_plus(rep: Representation, theta: StabilityParam) -> FramedRep:
    """(M, A) with A the identity on Q0+ and empty elsewhere."""
    plus, _ = theta_split(theta)
    return FramedRep(rep, identity_framing(rep, plus, a_type=True), "A")


def f_minus(rep: Representation, theta: StabilityParam) -> FramedRep:
    """(M, B) with B the identity on Q0- and empty elsewhere."""
    _, minus = theta_split(theta)
    return FramedRep(rep, identity_framing(rep, minus, a_type=False), "B")


def _require_semistable(rep: Representation, theta: StabilityParam, budget: Optional[Budget]) -> None:
    verdict = check_stability(rep, theta, budget)
    if not verdict.is_semistable:
        raise NotSemistable(f"Representation is {verdict.kind.value} for theta={theta.to_dict()}")


def gm_phi(rep: Representation, theta: StabilityParam, budget: Optional[Budget] = None,
           check: bool = True) -> SubspaceTuple:
    """
    phi(M) = ker(phi_M), computed as the Hilbert point of f+(M).

    Raises:
        NotSemistable: If ``check`` is set and M is not theta-semistable
        CorrespondenceError: If the two routes to the kernel disagree
    """
    if check:
        _require_semistable(rep, theta, budget)
    try:
        point = hilbert_point_phi(f_plus(rep, theta))
    except NotInDegreeZeroLocus:
        raise NotSemistable("phi_M is not surjective, so M cannot be theta-semistable")
    _, phi = canonical_phi(rep, theta)
    if point != SubspaceTuple(point.ambient, phi.kernel(), canonical=True):
        raise CorrespondenceError("Hilbert point of f+(M) differs from ker phi_M")
    return point


def gm_psi(rep: Representation, theta: StabilityParam, budget: Optional[Budget] = None,
           check: bool = True) -> SubspaceTuple:
    """
    psi(M) = im(psi_M), computed as the Hilbert point of f-(M).

    Raises:
        NotSemistable: If ``check`` is set and M is not theta-semistable
        CorrespondenceError: If the two routes to the image disagree
    """
    if check:
        _require_semistable(rep, theta, budget)
    try:
        point = hilbert_point_psi(f_minus(rep, theta))
    except NotInDegreeZeroLocus:
        raise NotSemistable("psi_M is not injective, so M cannot be theta-semistable")
    _, psi = canonical_psi(rep, theta)
    if point != SubspaceTuple(point.ambient, psi.image(), canonical=True):
        raise CorrespondenceError("Hilbert point of f-(M) differs from im psi_M")
    return point


def rep_isomorphic(m: Representation, n: Representation,
                   budget: Optional[Budget] = None) -> Tuple[bool, Optional[GroupElement]]:
    """
    Decide M = N up to isomorphism by searching Hom(M, N) for an invertible element.

    Returns:
        (True, g) with g . M = N, or (False, None)

    Raises:
        BudgetExceeded: If |Hom(M, N)| exceeds the budget
    """
    if m.dim != n.dim:
        return False, None
    basis = hom_basis(m, n)
    field = m.field
    resolve_budget(budget).ensure(field.size ** len(basis), "elements of Hom(M, N)")
    for coefficients in itertools.product(field.elements(), repeat=len(basis)):
        blocks = {}
        for v in m.quiver.vertices:
            total = zeros(field, n.dim[v], m.dim[v])
            for c, f in zip(coefficients, basis):
                if c:
                    total = total + scale(f[v], c)
            blocks[v] = total
        if all(is_invertible(b) for b in blocks.values()):
            return True, GroupElement(field, blocks, check=False)
    return False, None


def _saturation_side(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec, sign: str,
                     semistable: Sequence[Representation], n: int, budget: Optional[Budget],
                     report: VerificationReport) -> Dict[str, int]:
    plus, minus = theta_split(theta)
    chosen = plus if sign == "+" else minus
    kind = FramingKind.Q_TRI_SOURCE if sign == "+" else FramingKind.Q_TRI_SINK
    beta = restricted_dim(alpha, chosen)
    fq = build_framed(quiver, beta, kind)
    param = framed_param_theta(theta, alpha, sign, n)
    framing = f_plus if sign == "+" else f_minus
    g_identity = GroupElement.identity(field, alpha)

    saturation = set()
    framed_group = list(enumerate_group(field, beta, budget))
    for rep in semistable:
        base = framing(rep, theta)
        for h in framed_group:
            saturation.add(base.act(h, g_identity))

    h_identity = GroupElement.identity(field, beta)
    framed_semistable = set()
    for fr in enumerate_framed(quiver, alpha, beta, kind.side, field, budget):
        if not framed_stability(fr, fq, param, budget).is_semistable:
            continue
        framed_semistable.add(fr)
        # explicit preimage: g is A (resp. B^-1) on the framed vertices and the identity elsewhere
        blocks = {}
        for v in quiver.vertices:
            if v in chosen and framing_invertible(fr, [v]):
                blocks[v] = fr.framing[v] if sign == "+" else invert(fr.framing[v])
            else:
                blocks[v] = g_identity[v]
        g = GroupElement(field, blocks, check=False)
        original = fr.rep.act(g.inverse())
        rebuilt = framing(original, theta).act(h_identity, g)
        report.record(rebuilt == fr and check_stability(original, theta, budget).is_semistable,
                      sign=sign, check="decomposition", point=fr.to_dict())

    for fr in sorted(saturation - framed_semistable, key=FramedRep.key):
        report.fail(sign=sign, check="saturation inside semistable locus", point=fr.to_dict())
    for fr in sorted(framed_semistable - saturation, key=FramedRep.key):
        report.fail(sign=sign, check="semistable locus inside saturation", point=fr.to_dict())
    report.checked += len(saturation | framed_semistable)
    logger.debug("Saturation on %s: %d points, %d framed semistable", kind.value, len(saturation),
                 len(framed_semistable))
    return {"saturation": len(saturation), "framed_semistable": len(framed_semistable)}


def verify_saturation(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                      budget: Optional[Budget] = None, n: Optional[int] = None) -> VerificationReport:
    """
    The saturation of f+(semistable locus) is the theta+-semistable locus on
    Q^tri, and dually for f- and theta-.

    The saturation is generated from (h, 1) . f+(M): the identity
    (h, g) . f+(M) = (h g^-1, 1) . f+(g . M), with g restricted to Q0+, and the
    G(alpha)-invariance of the semistable locus make the G(alpha) factor redundant.
    """
    n = default_N(theta, alpha) if n is None else n
    report = VerificationReport("saturation")
    semistable = [m for m in enumerate_reps(quiver, alpha, field, budget)
                  if check_stability(m, theta, budget).is_semistable]
    details: Dict[str, Any] = {"N": n, "semistable": len(semistable)}
    for sign in ("+", "-"):
        details[sign] = _saturation_side(quiver, alpha, theta, field, sign, semistable, n, budget, report)
    report.details = details
    return report


def verify_hilbert_points(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                          rng: np.random.Generator, samples: int = 200,
                          budget: Optional[Budget] = None) -> VerificationReport:
    """
    On the degree-zero loci of Q^{alpha+} and Q_{alpha-}: two framed points
    share a G(alpha)-orbit iff they have the same Hilbert point, and the Hilbert
    point is sigma-equivariant under the framing group on random samples.
    """
    report = VerificationReport("hilbert-equivariance")
    plus, minus = theta_split(theta)
    details: Dict[str, Any] = {}
    for sign, chosen, point_of in (("+", plus, hilbert_point_phi), ("-", minus, hilbert_point_psi)):
        beta = restricted_dim(alpha, chosen)
        side = "A" if sign == "+" else "B"
        h_identity = GroupElement.identity(field, beta)
        locus = []
        for fr in enumerate_framed(quiver, alpha, beta, side, field, budget):
            try:
                locus.append((fr, point_of(fr)))
            except NotInDegreeZeroLocus:
                continue
        points = dict(locus)
        group = list(enumerate_group(field, alpha, budget))
        orbits = partition_orbits(points, group, lambda g, fr: fr.act(h_identity, g))
        seen: Dict[SubspaceTuple, int] = {}
        for index, orbit in enumerate(orbits):
            values = {points[fr] for fr in orbit}
            report.record(len(values) == 1, sign=sign, check="constant on orbits", orbit=index)
            for value in values:
                if value in seen:
                    report.fail(sign=sign, check="distinct orbits share a point", orbits=[seen[value], index])
                seen[value] = index
        for k in range(samples if locus else 0):
            fr, point = locus[int(rng.integers(len(locus)))]
            h = GroupElement.random(field, beta, rng)
            g = GroupElement.random(field, alpha, rng)
            moved = point_of(fr.act(h, g))
            report.record(moved == sigma_action(h, point), sign=sign, check="equivariance", sample=k,
                          point=fr.to_dict())
        details[sign] = {"degree_zero_points": len(locus), "orbits": len(orbits), "hilbert_points": len(seen)}
        logger.debug("Hilbert points %s: %d degree-zero points in %d orbits", sign, len(locus), len(orbits))
    report.details = details
    return report


@dataclass
class CorrespondenceReport(VerificationReport):
    """Orbit counts and pairings of the correspondence on one instance."""

    instance: Dict[str, Any] = dataclass_field(default_factory=dict)
    counts: Dict[str, int] = dataclass_field(default_factory=dict)
    pairings: List[Dict[str, Any]] = dataclass_field(default_factory=list)
    unverified: List[Dict[str, Any]] = dataclass_field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out.update({"instance": self.instance, "counts": self.counts, "pairings": self.pairings,
                    "unverified": self.unverified})
        return out


def _orbit_index(orbits: Sequence[Sequence[Any]]) -> Dict[Any, int]:
    return {member: k for k, orbit in enumerate(orbits) for member in orbit}


def _image_side(report: CorrespondenceReport, name: str, rep_orbits: List[List[Representation]],
                stable_flags: List[bool], image_of: Callable[[Representation], SubspaceTuple],
                group: List[GroupElement]) -> Tuple[List[int], List[List[SubspaceTuple]]]:
    """
    Check that ``image_of`` maps G(alpha)-orbits to sigma-orbits, injectively on
    the stable locus. Returns the target orbit of every source orbit.
    """
    images = {m.key(): image_of(m) for orbit in rep_orbits for m in orbit}
    image_set = set(images.values())
    orbits = partition_orbits(image_set, group, sigma_action)
    index = _orbit_index(orbits)
    closed = all(member in image_set for orbit in orbits for member in orbit)
    report.record(closed, check=f"{name} image is closed under the framing group")

    targets = []
    for k, orbit in enumerate(rep_orbits):
        hit = {index[images[m.key()]] for m in orbit}
        report.record(len(hit) == 1, check=f"{name} constant on orbits", orbit=k, targets=sorted(hit))
        targets.append(min(hit))
    stable_targets = [t for t, stable in zip(targets, stable_flags) if stable]
    report.record(len(set(stable_targets)) == len(stable_targets), check=f"{name} injective on stable orbits",
                  targets=stable_targets)
    strict_targets = [t for t, stable in zip(targets, stable_flags) if not stable]
    if strict_targets:
        report.unverified.append({
            "map": name,
            "strictly_semistable_orbits": len(strict_targets),
            "target_orbits": len(set(strict_targets)),
        })
    return targets, orbits


def _characterize_image(report: CorrespondenceReport, quiver: Quiver, alpha: DimVector, theta: StabilityParam,
                        field: FieldSpec, sign: str, image: set, budget: Optional[Budget]) -> None:
    plus, minus = theta_split(theta)
    chosen = plus if sign == "+" else minus
    kind = FramingKind.Q_TRI_SOURCE if sign == "+" else FramingKind.Q_TRI_SINK
    beta = restricted_dim(alpha, chosen)
    fq = build_framed(quiver, beta, kind)
    param = framed_param_theta(theta, alpha, sign, default_N(theta, alpha))
    point_of = hilbert_point_phi if sign == "+" else hilbert_point_psi
    framed_image = set()
    for fr in enumerate_framed(quiver, alpha, beta, kind.side, field, budget):
        if framed_stability(fr, fq, param, budget).is_semistable:
            framed_image.add(point_of(fr))
    report.record(framed_image == image, check=f"image characterization {sign}",
                  framed_points=len(framed_image), image_points=len(image))


def verify_correspondence(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                          budget: Optional[Budget] = None, workers: int = 1,
                          characterize: bool = True) -> CorrespondenceReport:
    """
    Orbit-level check of the correspondence on R(Q, alpha)(F_p).

    G(alpha)-orbits on the semistable locus are mapped through phi and psi to
    sigma-orbits of G(alpha+) on Gr^alpha(P+) and G(alpha-) on Gr_alpha(I-).
    Constancy on orbits is asserted on the whole semistable locus, injectivity
    and the count equality on the stable locus. Strictly semistable classes are
    only reported.
    """
    report = CorrespondenceReport("correspondence")
    report.instance = {"quiver": quiver.to_dict(), "alpha": alpha.to_dict(), "theta": theta.to_dict(),
                       "field": field.name}
    budget = resolve_budget(budget)
    reps = list(enumerate_reps(quiver, alpha, field, budget))
    verdicts = parallel_map(lambda m: check_stability(m, theta, budget), reps, workers)
    semistable = [m for m, v in zip(reps, verdicts) if v.is_semistable]
    stable_keys = {m.key() for m, v in zip(reps, verdicts) if v.is_stable}

    group = list(enumerate_group(field, alpha, budget))
    rep_orbits = partition_orbits(semistable, group, lambda g, m: m.act(g))
    logger.debug("%d semistable points of %d in %d orbits", len(semistable), len(reps), len(rep_orbits))
    stable_flags = [orbit[0].key() in stable_keys for orbit in rep_orbits]
    for orbit in rep_orbits:
        flags = {m.key() in stable_keys for m in orbit}
        report.record(len(flags) == 1, check="stability constant on orbits")

    plus, minus = theta_split(theta)
    plus_group = list(enumerate_group(field, restricted_dim(alpha, plus), budget))
    minus_group = list(enumerate_group(field, restricted_dim(alpha, minus), budget))
    phi_targets, phi_orbits = _image_side(report, "phi", rep_orbits, stable_flags,
                                          lambda m: gm_phi(m, theta, check=False), plus_group)
    psi_targets, psi_orbits = _image_side(report, "psi", rep_orbits, stable_flags,
                                          lambda m: gm_psi(m, theta, check=False), minus_group)

    stable_orbits = sum(stable_flags)
    phi_stable = len({t for t, s in zip(phi_targets, stable_flags) if s})
    psi_stable = len({t for t, s in zip(psi_targets, stable_flags) if s})
    report.record(stable_orbits == phi_stable == psi_stable, check="stable orbit counts agree",
                  stable=stable_orbits, phi=phi_stable, psi=psi_stable)

    for k, orbit in enumerate(rep_orbits):
        report.pairings.append({
            "orbit": k,
            "representative": orbit[0].to_dict(),
            "size": len(orbit),
            "stable": stable_flags[k],
            "phi_orbit": phi_targets[k],
            "psi_orbit": psi_targets[k],
        })

    if characterize:
        _characterize_image(report, quiver, alpha, theta, field, "+",
                            {m for orbit in phi_orbits for m in orbit}, budget)
        _characterize_image(report, quiver, alpha, theta, field, "-",
                            {m for orbit in psi_orbits for m in orbit}, budget)

    report.counts = {
        "points": len(reps),
        "semistable_points": len(semistable),
        "stable_points": len(stable_keys),
        "orbits_semistable": len(rep_orbits),
        "orbits_stable": stable_orbits,
        "phi_orbits": len(phi_orbits),
        "phi_orbits_stable": phi_stable,
        "psi_orbits": len(psi_orbits),
        "psi_orbits_stable": psi_stable,
    }
    report.details = {"degenerate": theta.is_zero()}
    return report


def _classical_phi(rep: Representation, sink: str) -> Matrix:
    """ker [M_a | a into sink] inside the sum of the source spaces, one block per arrow."""
    arrows = rep.quiver.arrows_to(sink)
    joined = hstack(rep.field, [rep.map(a.id) for a in arrows], rep.dim[sink])
    return column_space(kernel_basis(joined))


def _classical_psi(rep: Representation, source: str) -> Matrix:
    """im of the stacked [M_a | a out of source] inside the sum of the sink spaces."""
    arrows = rep.quiver.arrows_from(source)
    stacked = vstack(rep.field, [rep.map(a.id) for a in arrows], rep.dim[source])
    return column_space(stacked)


def verify_bipartite(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                     budget: Optional[Budget] = None) -> VerificationReport:
    """
    For a quiver whose vertices are all sources or sinks, with theta > 0 on
    sources and theta < 0 on sinks, compare the sigma-orbit counts of the phi
    and psi images with the classical picture: kernels of [M_a] under the
    product of GL(V_i) over sources, and images of the stacked [M_a] under the
    product of GL(V_j) over sinks.

    Raises:
        WrongQuiverShape: If the quiver or theta does not have this shape
    """
    if not quiver.is_bipartite_oriented():
        raise WrongQuiverShape("Every vertex must be a source or a sink")
    sources, sinks = quiver.sources(), quiver.sinks()
    isolated = set(sources) & set(sinks)
    if isolated or any(theta[v] <= 0 for v in sources) or any(theta[v] >= 0 for v in sinks):
        raise WrongQuiverShape("Need theta > 0 on sources and theta < 0 on sinks, without isolated vertices")
    report = VerificationReport("bipartite")
    semistable = [m for m in enumerate_reps(quiver, alpha, field, budget)
                  if check_stability(m, theta, budget).is_semistable]

    def classical_orbits(points, movers, blocks_for):
        group = list(enumerate_group(field, restricted_dim(alpha, movers), budget))

        def act(g, point):
            return tuple(row_space(matmul(u, transpose(block_diagonal(field, blocks_for(g, v)))))
                         for v, u in point)

        def keyed(g, point):
            return tuple(zip([v for v, _ in point], act(g, point)))

        return partition_orbits(points, group, keyed, key=lambda p: tuple(u.key() for _, u in p))

    phi_points = {tuple((j, _classical_phi(m, j)) for j in sinks) for m in semistable}
    psi_points = {tuple((i, _classical_psi(m, i)) for i in sources) for m in semistable}
    phi_classical = classical_orbits(
        phi_points, sources, lambda g, j: [g[a.src] for a in quiver.arrows_to(j)])
    psi_classical = classical_orbits(
        psi_points, sinks, lambda g, i: [g[a.dst] for a in quiver.arrows_from(i)])

    plus_group = list(enumerate_group(field, restricted_dim(alpha, sources), budget))
    minus_group = list(enumerate_group(field, restricted_dim(alpha, sinks), budget))
    phi_sigma = partition_orbits({gm_phi(m, theta, check=False) for m in semistable}, plus_group, sigma_action)
    psi_sigma = partition_orbits({gm_psi(m, theta, check=False) for m in semistable}, minus_group, sigma_action)

    report.record(len(phi_classical) == len(phi_sigma), check="phi orbit counts",
                  classical=len(phi_classical), sigma=len(phi_sigma))
    report.record(len(psi_classical) == len(psi_sigma), check="psi orbit counts",
                  classical=len(psi_classical), sigma=len(psi_sigma))
    report.details = {"semistable": len(semistable), "phi_orbits": len(phi_sigma), "psi_orbits": len(psi_sigma)}
    return report
