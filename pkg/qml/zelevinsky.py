"""
Zelevinsky maps for the linearly oriented quiver of type A_n.

With V = V_1 + ... + V_n, a representation M = (M_1, ..., M_{n-1}) gives two
invertible matrices on V: the Zelevinsky matrix g_M (block lower triangular,
products of the arrow maps below the diagonal) and the dual Zelevinsky matrix
h_M (identity diagonal, -M_i just below it). Their first-column spans are
partial flags, which is how cosets of the block upper triangular parabolic are
represented here: two matrices give the same FlagPoint exactly when they lie
in the same coset.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

try:
    from .correspondence import gm_phi, gm_psi
    from .field_matrix import (
        FieldSpec,
        Matrix,
        SingularMatrix,
        block_assemble,
        block_diagonal,
        column_space,
        contains,
        identity,
        image_of_subspace,
        intersection_dim,
        is_invertible,
        matmul,
        neg,
        preimage,
        row_space,
        standard_subspace,
        zeros,
    )
    from .grassmannian import enumerate_group, enumerate_subspaces, gaussian_binomial
    from .harness import Budget, VerificationReport, parallel_map, resolve_budget
    from .quiver_core import Arrow, DimVector, Path, Quiver, StabilityParam, WrongQuiverShape
    from .representation import Representation
    from .stability import enumerate_reps
except ImportError:
    from correspondence import gm_phi, gm_psi
    from field_matrix import (
        FieldSpec,
        Matrix,
        SingularMatrix,
        block_assemble,
        block_diagonal,
        column_space,
        contains,
        identity,
        image_of_subspace,
        intersection_dim,
        is_invertible,
        matmul,
        neg,
        preimage,
        row_space,
        standard_subspace,
        zeros,
    )
    from grassmannian import enumerate_group, enumerate_subspaces, gaussian_binomial
    from harness import Budget, VerificationReport, parallel_map, resolve_budget
    from quiver_core import Arrow, DimVector, Path, Quiver, StabilityParam, WrongQuiverShape
    from representation import Representation
    from stability import enumerate_reps

logger = logging.getLogger(__name__)

OMEGA = "omega"
UPSILON = "upsilon"


class ZelevinskyError(Exception):
    """Custom exception for Zelevinsky map errors."""
    pass


def linear_order(quiver: Quiver) -> Tuple[List[str], List[Arrow]]:
    """
    Vertices v_1, ..., v_n and arrows a_i: v_i -> v_{i+1} of a linear A_n quiver.

    Raises:
        WrongQuiverShape: If the quiver is not 1 -> 2 -> ... -> n up to renaming
    """
    vertices = list(quiver.topological_order)
    arrows: List[Arrow] = []
    if len(quiver.arrows) != len(vertices) - 1:
        raise WrongQuiverShape(f"A linear A_n quiver has n - 1 arrows, got {len(quiver.arrows)} for n = {len(vertices)}")
    for src, dst in zip(vertices, vertices[1:]):
        found = [a for a in quiver.arrows_from(src) if a.dst == dst]
        if len(found) != 1:
            raise WrongQuiverShape(f"Expected exactly one arrow {src} -> {dst}, got {len(found)}")
        arrows.append(found[0])
    return vertices, arrows


def _offsets(rep: Representation, vertices: Sequence[str]) -> Dict[str, int]:
    offsets, total = {}, 0
    for v in vertices:
        offsets[v] = total
        total += rep.dim[v]
    return offsets


def _transport(rep: Representation, vertices: Sequence[str], arrows: Sequence[Arrow], j: int, i: int) -> Matrix:
    """M_{i-1} ... M_j, the map V_j -> V_i along the line (identity when i == j)."""
    result = identity(rep.field, rep.dim[vertices[j]])
    for arrow in arrows[j:i]:
        result = matmul(rep.map(arrow.id), result)
    return result


def zelevinsky_g(rep: Representation) -> Matrix:
    """
    g_M: identity blocks on the diagonal and M_{i-1} ... M_j in block (i, j) for i > j.

    Raises:
        WrongQuiverShape: If the quiver is not linear A_n

    Examples:
        For n = 3 and alpha = (1, 1, 1), M = (a, b) gives [[1, 0, 0], [a, 1, 0], [ba, b, 1]].
    """
    vertices, arrows = linear_order(rep.quiver)
    if not arrows:
        return identity(rep.field, rep.dim[vertices[0]])
    field = rep.field
    grid = []
    for i, vi in enumerate(vertices):
        row = []
        for j, vj in enumerate(vertices):
            if i > j:
                row.append(_transport(rep, vertices, arrows, j, i))
            elif i == j:
                row.append(identity(field, rep.dim[vi]))
            else:
                row.append(zeros(field, rep.dim[vi], rep.dim[vj]))
        grid.append(row)
    return block_assemble(grid)


def dual_zelevinsky_h(rep: Representation) -> Matrix:
    """
    h_M: identity blocks on the diagonal and -M_i in block (i + 1, i).

    Raises:
        WrongQuiverShape: If the quiver is not linear A_n
    """
    vertices, arrows = linear_order(rep.quiver)
    if not arrows:
        return identity(rep.field, rep.dim[vertices[0]])
    field = rep.field
    grid = []
    for i, vi in enumerate(vertices):
        row = []
        for j, vj in enumerate(vertices):
            if i == j:
                row.append(identity(field, rep.dim[vi]))
            elif i == j + 1:
                row.append(neg(rep.map(arrows[j].id)))
            else:
                row.append(zeros(field, rep.dim[vi], rep.dim[vj]))
        grid.append(row)
    return block_assemble(grid)


@dataclass(frozen=True)
class FlagPoint:
    """
    A partial flag F_1 <= ... <= F_n in V with dim F_i = alpha_1 + ... + alpha_i.

    ``steps`` holds canonical row bases, so equal flags compare equal.
    """

    profile: Tuple[int, ...]
    steps: Tuple[Matrix, ...]

    @property
    def ambient_dim(self) -> int:
        return sum(self.profile)

    @property
    def dims(self) -> Tuple[int, ...]:
        total, out = 0, []
        for a in self.profile:
            total += a
            out.append(total)
        return tuple(out)

    def is_nested(self) -> bool:
        return all(contains(big, small) for small, big in zip(self.steps, self.steps[1:]))

    def moved_by(self, g: Matrix) -> "FlagPoint":
        """g . F, applied step by step."""
        return FlagPoint(self.profile, tuple(image_of_subspace(g, step) for step in self.steps))

    def key(self) -> Tuple:
        return (self.profile, tuple(step.key() for step in self.steps))

    def to_dict(self) -> Dict[str, Any]:
        return {"profile": list(self.profile), "steps": [step.entries() for step in self.steps]}

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        return isinstance(other, FlagPoint) and self.key() == other.key()


def _profile(alpha: Sequence[int]) -> Tuple[int, ...]:
    return tuple(int(a) for a in alpha)


def flag_of_matrix(g: Matrix, profile: Sequence[int]) -> FlagPoint:
    """
    The flag of the coset gH: F_i is spanned by the first alpha_1 + ... + alpha_i columns of g.

    Raises:
        SingularMatrix: If g is not invertible
    """
    profile = _profile(profile)
    if not is_invertible(g) or g.rows != sum(profile):
        raise SingularMatrix(f"Flag needs an invertible {sum(profile)}x{sum(profile)} matrix, got shape {g.shape}")
    steps, width = [], 0
    for a in profile:
        width += a
        steps.append(column_space(Matrix._wrap(g.field, g.data[:, :width].copy())))
    return FlagPoint(profile, tuple(steps))


def standard_flag(field: FieldSpec, profile: Sequence[int]) -> FlagPoint:
    """E_i = V_1 + ... + V_i."""
    profile = _profile(profile)
    return flag_of_matrix(identity(field, sum(profile)), profile)


def _leading(field: FieldSpec, profile: Tuple[int, ...], i: int) -> Matrix:
    """E_i for 0 <= i <= n (E_0 = 0)."""
    return standard_subspace(field, sum(profile), range(sum(profile[:i])))


def _trailing(field: FieldSpec, profile: Tuple[int, ...], i: int) -> Matrix:
    """E'_i = V_{i+1} + ... + V_n."""
    total = sum(profile)
    return standard_subspace(field, total, range(sum(profile[:i]), total))


def _omega_at(flag: FlagPoint, field: FieldSpec, i: int) -> bool:
    """F_i contains E_{i-1}; i is 1-based."""
    return contains(flag.steps[i - 1], _leading(field, flag.profile, i - 1))


def _upsilon_at(flag: FlagPoint, field: FieldSpec, i: int) -> bool:
    """F_i lies inside E_{i+1}; i is 1-based."""
    if i >= len(flag.profile):
        return True
    return contains(_leading(field, flag.profile, i + 1), flag.steps[i - 1])


def _opposite_at(flag: FlagPoint, field: FieldSpec, i: int) -> bool:
    step = flag.steps[i - 1]
    return intersection_dim(step, _trailing(field, flag.profile, i)) == 0


def _first_violation(flag: FlagPoint, check: Callable[[FlagPoint, FieldSpec, int], bool],
                     indices: Sequence[int], name: str, warn: bool = False) -> Optional[int]:
    if not flag.steps:
        return None
    field = flag.steps[0].field
    for i in indices:
        if not check(flag, field, i):
            logger.log(logging.WARNING if warn else logging.DEBUG, "Flag fails %s at index %d", name, i)
            return i
    return None


def in_omega(flag: FlagPoint, warn: bool = False) -> bool:
    """F_i contains E_{i-1} for i = 2, ..., n. With ``warn`` a failure is logged as a warning."""
    return _first_violation(flag, _omega_at, range(2, len(flag.profile) + 1), OMEGA, warn) is None


def in_upsilon(flag: FlagPoint, warn: bool = False) -> bool:
    """F_i lies in E_{i+1} for i = 1, ..., n - 1."""
    return _first_violation(flag, _upsilon_at, range(1, len(flag.profile)), UPSILON, warn) is None


def in_opposite_cell(flag: FlagPoint, warn: bool = False) -> bool:
    """F_i meets E'_i trivially for i = 1, ..., n."""
    return _first_violation(flag, _opposite_at, range(1, len(flag.profile) + 1), "opposite cell", warn) is None


def _step_allowed(flag: FlagPoint, field: FieldSpec, i: int, constraint: Optional[str], opposite: bool) -> bool:
    if constraint == OMEGA and i >= 2 and not _omega_at(flag, field, i):
        return False
    if constraint == UPSILON and not _upsilon_at(flag, field, i):
        return False
    return not opposite or _opposite_at(flag, field, i)


def enumerate_flags(profile: Sequence[int], field: FieldSpec, budget: Optional[Budget] = None,
                    constraint: Optional[str] = None, opposite: bool = False, workers: int = 1) -> List[FlagPoint]:
    """
    All partial flags of the given profile over F_p, optionally restricted.

    F_1 is chosen first and each later step is extended from the previous one;
    a partial flag is dropped as soon as one of its steps breaks the constraint.

    Args:
        profile: alpha_1, ..., alpha_n
        field: A finite field
        budget: Enumeration guard
        constraint: None, "omega" or "upsilon"
        opposite: Also require F_i to meet E'_i trivially
        workers: Threads used over the choices of F_1

    Raises:
        ZelevinskyError: For an unknown constraint
        BudgetExceeded: If the number of flags exceeds the budget
    """
    if constraint not in (None, OMEGA, UPSILON):
        raise ZelevinskyError(f"Unknown flag constraint {constraint!r}")
    profile = _profile(profile)
    budget = resolve_budget(budget)
    total = sum(profile)
    count, done = 1, 0
    for a in profile:
        count *= gaussian_binomial(total - done, a, field.size)
        done += a
    budget.ensure(count, f"flags of profile {profile} over {field.name}")
    if not profile:
        return []
    dims = FlagPoint(profile, ()).dims
    by_dim = {d: enumerate_subspaces(field, total, d, budget) for d in set(dims)}

    def extend(steps: Tuple[Matrix, ...]) -> Iterator[FlagPoint]:
        i = len(steps)
        if i == len(profile):
            yield FlagPoint(profile, steps)
            return
        for candidate in by_dim[dims[i]]:
            if steps and not contains(candidate, steps[-1]):
                continue
            if _step_allowed(FlagPoint(profile, steps + (candidate,)), field, i + 1, constraint, opposite):
                yield from extend(steps + (candidate,))

    def from_first(first: Matrix) -> List[FlagPoint]:
        if not _step_allowed(FlagPoint(profile, (first,)), field, 1, constraint, opposite):
            return []
        return list(extend((first,)))

    chunks = parallel_map(from_first, by_dim[dims[0]], workers)
    return [flag for chunk in chunks for flag in chunk]


def zeta(rep: Representation) -> FlagPoint:
    """The Zelevinsky map M -> g_M H."""
    vertices, _ = linear_order(rep.quiver)
    return flag_of_matrix(zelevinsky_g(rep), [rep.dim[v] for v in vertices])


def eta(rep: Representation) -> FlagPoint:
    """The dual Zelevinsky map M -> h_M H."""
    vertices, _ = linear_order(rep.quiver)
    return flag_of_matrix(dual_zelevinsky_h(rep), [rep.dim[v] for v in vertices])


def _label_coordinates(ambient: Representation, vertex: str, offsets: Dict[str, int], width: int) -> Matrix:
    """Rows: label basis of ``ambient`` at ``vertex``; columns: coordinates of V."""
    labels = ambient.labels[vertex]
    rows = []
    for lb in labels:
        row = [0] * width
        row[offsets[lb.anchor] + lb.copy] = 1
        rows.append(row)
    return Matrix(ambient.field, rows, shape=(len(labels), width))


def _line_path(vertices: Sequence[str], arrows: Sequence[Arrow], i: int, j: int) -> Path:
    path = Path.trivial(vertices[i])
    for arrow in arrows[i:j]:
        path = path.then(arrow)
    return path


def flag_from_injective_point(rep: Representation, theta: StabilityParam) -> FlagPoint:
    """
    The flag of psi(M) in Gr_alpha(I): F_i is the preimage of U_i under I_1 -> I_i.

    ``theta`` must put every vertex into the injective side, the trivial parameter does.
    """
    vertices, arrows = linear_order(rep.quiver)
    point = gm_psi(rep, theta, check=False)
    ambient = point.ambient
    offsets = _offsets(rep, vertices)
    total = rep.total_dim()
    to_v = _label_coordinates(ambient, vertices[0], offsets, total)
    steps = []
    for i, v in enumerate(vertices):
        transport = ambient.path_matrix(_line_path(vertices, arrows, 0, i))
        pulled = preimage(transport, point.bases[v])
        steps.append(row_space(matmul(pulled, to_v)))
    return FlagPoint(tuple(rep.dim[v] for v in vertices), tuple(steps))


def flag_from_projective_point(rep: Representation, theta: StabilityParam) -> FlagPoint:
    """
    The flag of phi(M) in Gr^alpha(P): U_{i+1} pushed into P_n gives F_i, and F_n = V.

    ``theta`` must put every vertex into the projective side, the trivial parameter does.
    """
    vertices, arrows = linear_order(rep.quiver)
    point = gm_phi(rep, theta, check=False)
    ambient = point.ambient
    offsets = _offsets(rep, vertices)
    total = rep.total_dim()
    last = len(vertices) - 1
    to_v = _label_coordinates(ambient, vertices[last], offsets, total)
    steps = []
    for i in range(1, len(vertices)):
        transport = ambient.path_matrix(_line_path(vertices, arrows, i, last))
        pushed = image_of_subspace(transport, point.bases[vertices[i]])
        steps.append(row_space(matmul(pushed, to_v)))
    steps.append(identity(rep.field, total))
    return FlagPoint(tuple(rep.dim[v] for v in vertices), tuple(steps))


def _verify_one(report: VerificationReport, name: str, reps: Sequence[Representation],
                map_fn: Callable[[Representation], FlagPoint], schubert: Callable[..., bool],
                targets: List[FlagPoint], grassmannian_flag: Callable[[Representation], FlagPoint],
                group: Sequence, vertices: Sequence[str]) -> Dict[str, int]:
    images: Dict[FlagPoint, Representation] = {}
    for rep in reps:
        flag = map_fn(rep)
        in_cell = schubert(flag, warn=True) and in_opposite_cell(flag, warn=True)
        report.record(in_cell, map=name, check="lands in Schubert cell",
                      rep=rep.to_dict(), flag=flag.to_dict())
        if flag in images:
            report.fail(map=name, check="injective", reps=[images[flag].to_dict(), rep.to_dict()])
        images[flag] = rep
        report.record(grassmannian_flag(rep) == flag, map=name, check="agrees with the quiver Grassmannian",
                      rep=rep.to_dict())
        for g in group:
            diagonal = block_diagonal(rep.field, [g[v] for v in vertices])
            report.record(map_fn(rep.act(g)) == flag.moved_by(diagonal), map=name, check="equivariant",
                          rep=rep.to_dict())
    target_set = set(targets)
    report.record(set(images) == target_set, map=name, check="onto Schubert cell",
                  images=len(images), targets=len(target_set))
    return {"reps": len(reps), "images": len(images), "targets": len(target_set)}


def verify_zelevinsky_bijection(alpha: DimVector, field: FieldSpec, budget: Optional[Budget] = None,
                                which: str = "both", workers: int = 1) -> VerificationReport:
    """
    zeta: R(Q, alpha) -> Omega n O and eta: R(Q, alpha) -> Upsilon n O are bijections on F_p-points.

    Besides bijectivity each map is checked against the flag read off the
    quiver Grassmannian point (psi(M) for zeta, phi(M) for eta, under the
    trivial stability parameter) and for equivariance over all of G(alpha).

    Raises:
        ZelevinskyError: For an unknown ``which``
        BudgetExceeded: If an enumeration exceeds the budget
    """
    if which not in ("zeta", "eta", "both"):
        raise ZelevinskyError(f"Unknown map {which!r}, expected zeta, eta or both")
    quiver = Quiver.linear(len(alpha))
    alpha = DimVector(quiver.vertices, list(alpha.values_tuple))
    vertices, _ = linear_order(quiver)
    profile = alpha.values_tuple
    trivial = StabilityParam.zero(quiver.vertices)
    reps = list(enumerate_reps(quiver, alpha, field, budget))
    group = list(enumerate_group(field, alpha, budget))
    report = VerificationReport("zelevinsky")
    details: Dict[str, Any] = {"alpha": alpha.to_dict(), "field": field.name}
    if which in ("zeta", "both"):
        targets = enumerate_flags(profile, field, budget, constraint=OMEGA, opposite=True, workers=workers)
        details["zeta"] = _verify_one(report, "zeta", reps, zeta, in_omega, targets,
                                      lambda m: flag_from_injective_point(m, trivial), group, vertices)
    if which in ("eta", "both"):
        targets = enumerate_flags(profile, field, budget, constraint=UPSILON, opposite=True, workers=workers)
        details["eta"] = _verify_one(report, "eta", reps, eta, in_upsilon, targets,
                                     lambda m: flag_from_projective_point(m, trivial), group, vertices)
    report.details = details
    return report
