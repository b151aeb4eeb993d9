"""
Quiver Grassmannians over finite fields.

Points of Gr_beta(M) are stored as SubspaceTuples: one canonical (RREF) row
basis per vertex. Quotient Grassmannian points Gr^beta(M) are stored as their
kernels, i.e. as points of Gr_{dim M - beta}(M). The module also implements the
action sigma of G(beta) on the framed modules P_beta and I_beta, the Hilbert
scheme points ker phi_{M,A} and im psi_{M,B}, and orbit enumeration by
canonical-form hashing.
"""

import itertools
import logging
from functools import lru_cache
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

import numpy as np

try:
    from .field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        contains,
        enumerate_matrices,
        is_invertible,
        matmul,
        row_space,
        transpose,
        zeros,
    )
    from .harness import Budget, resolve_budget
    from .quiver_core import DimVector, GroupElement
    from .representation import BasisLabel, Representation, framed_phi, framed_psi, is_rigid
except ImportError:
    from field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        contains,
        enumerate_matrices,
        is_invertible,
        matmul,
        row_space,
        transpose,
        zeros,
    )
    from harness import Budget, resolve_budget
    from quiver_core import DimVector, GroupElement
    from representation import BasisLabel, Representation, framed_phi, framed_psi, is_rigid

if TYPE_CHECKING:
    from .framing import FramedRep

logger = logging.getLogger(__name__)

T = TypeVar("T")


class GrassmannianError(Exception):
    """Custom exception for quiver Grassmannian errors."""
    pass


class NotInDegreeZeroLocus(GrassmannianError):
    """Raised when phi_{M,A} is not surjective or psi_{M,B} is not injective."""
    pass


class SubspaceTuple:
    """
    A tuple (U_i) of subspaces of the spaces of an ambient representation.

    Args:
        ambient: The representation the subspaces live in
        bases: Row bases per vertex; rows need not be independent unless ``canonical``
        canonical: Skip the RREF pass when the bases are already canonical
    """

    __slots__ = ("ambient", "bases", "_key")

    def __init__(self, ambient: Representation, bases: Mapping[str, Matrix], canonical: bool = False):
        self.ambient = ambient
        self.bases: Dict[str, Matrix] = {}
        for v in ambient.quiver.vertices:
            basis = bases[v]
            if basis.cols != ambient.dim[v]:
                raise DimensionMismatch(f"Subspace at {v} lives in dimension {basis.cols}, ambient has {ambient.dim[v]}")
            self.bases[v] = basis if canonical else row_space(basis)
        self._key = None

    def key(self) -> Tuple:
        if self._key is None:
            self._key = tuple(self.bases[v].key() for v in self.ambient.quiver.vertices)
        return self._key

    @property
    def dim(self) -> DimVector:
        return DimVector(self.ambient.quiver.vertices, [self.bases[v].rows for v in self.ambient.quiver.vertices])

    def is_subrepresentation(self) -> bool:
        """M_a(U_{s(a)}) is contained in U_{t(a)} for every arrow."""
        for arrow in self.ambient.quiver.arrows:
            moved = matmul(self.bases[arrow.src], transpose(self.ambient.map(arrow.id)))
            if not contains(self.bases[arrow.dst], moved):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"bases": {v: self.bases[v].entries() for v in self.ambient.quiver.vertices}}
        if self.ambient.labels is not None:
            out["labels"] = {v: [str(lb) for lb in self.ambient.labels[v]] for v in self.ambient.quiver.vertices}
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, SubspaceTuple) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"SubspaceTuple({ {v: b.entries() for v, b in self.bases.items()} })"


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """
    Number of k-dimensional subspaces of F_q^d.

    Examples:
        >>> gaussian_binomial(2, 1, 3)
        4
    """
    if k < 0 or k > d:
        return 0
    numerator = 1
    denominator = 1
    for i in range(k):
        numerator *= q ** (d - i) - 1
        denominator *= q ** (i + 1) - 1
    return numerator // denominator


def count_subspaces(d: int, q: int) -> int:
    return sum(gaussian_binomial(d, k, q) for k in range(d + 1))


def gl_order(n: int, q: int) -> int:
    """|GL_n(F_q)| = product of (q^n - q^i) for i < n."""
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    return order


@lru_cache(maxsize=1024)
def _subspaces(field: FieldSpec, d: int, k: int) -> Tuple[Matrix, ...]:
    elements = field.elements()
    found = []
    for pivots in itertools.combinations(range(d), k):
        free = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, d) if c not in pivots]
        for values in itertools.product(elements, repeat=len(free)):
            array = np.zeros((k, d), dtype=np.int64)
            for r, p in enumerate(pivots):
                array[r, p] = 1
            for (r, c), value in zip(free, values):
                array[r, c] = value
            found.append(Matrix._wrap(field, array))
    return tuple(found)


def enumerate_subspaces(field: FieldSpec, d: int, k: int, budget: Optional[Budget] = None) -> Tuple[Matrix, ...]:
    """
    All k-dimensional subspaces of F_p^d as canonical RREF row bases.

    Subspaces are ordered by pivot columns, then by the free entries.

    Raises:
        InfiniteField: Over Q
        BudgetExceeded: If [d choose k]_p exceeds the budget
    """
    if k < 0 or k > d:
        return ()
    resolve_budget(budget).ensure(gaussian_binomial(d, k, field.size), f"{k}-subspaces of {field.name}^{d}")
    return _subspaces(field, d, k)


@lru_cache(maxsize=64)
def general_linear_group(field: FieldSpec, n: int) -> Tuple[Matrix, ...]:
    """All invertible n x n matrices over a finite field, in matrix enumeration order."""
    if n == 0:
        return (zeros(field, 0, 0),)
    return tuple(m for m in enumerate_matrices(field, n, n) if is_invertible(m))


def enumerate_group(field: FieldSpec, dims: DimVector, budget: Optional[Budget] = None) -> Iterator[GroupElement]:
    """
    All elements of G(dims) = product of GL(dims_i) over a finite field.

    Raises:
        BudgetExceeded: If the group order exceeds the budget
    """
    budget = resolve_budget(budget)
    order = 1
    for v in dims:
        order *= gl_order(dims[v], field.size)
    budget.ensure(order, f"G({dims.to_dict()}) over {field.name}")
    vertices = list(dims.vertices)
    factors = [general_linear_group(field, dims[v]) for v in vertices]
    for blocks in itertools.product(*factors):
        yield GroupElement(field, dict(zip(vertices, blocks)), check=False)


def iter_invariant_tuples(rep: Representation, candidates: Mapping[str, Sequence[Matrix]],
                          order: Optional[Sequence[str]] = None) -> Iterator[Dict[str, Matrix]]:
    """
    Depth-first search over per-vertex candidate subspaces, keeping only
    arrow-invariant tuples.

    A partial choice is pruned as soon as an arrow between two chosen vertices
    violates M_a(U_{s(a)}) inside U_{t(a)}.
    """
    order = list(order if order is not None else rep.quiver.topological_order)
    moved_by = {}
    for arrow in rep.quiver.arrows:
        moved_by.setdefault(arrow.src, []).append(arrow)
        moved_by.setdefault(arrow.dst, []).append(arrow)
    chosen: Dict[str, Matrix] = {}

    def fits(vertex: str, basis: Matrix) -> bool:
        for arrow in moved_by.get(vertex, ()):
            other = arrow.dst if arrow.src == vertex else arrow.src
            if other not in chosen:
                continue
            source = basis if arrow.src == vertex else chosen[arrow.src]
            target = basis if arrow.dst == vertex else chosen[arrow.dst]
            if not contains(target, matmul(source, transpose(rep.map(arrow.id)))):
                return False
        return True

    def descend(depth: int) -> Iterator[Dict[str, Matrix]]:
        if depth == len(order):
            yield dict(chosen)
            return
        vertex = order[depth]
        for basis in candidates[vertex]:
            if fits(vertex, basis):
                chosen[vertex] = basis
                yield from descend(depth + 1)
                del chosen[vertex]

    yield from descend(0)


def _candidates(rep: Representation, beta: DimVector, budget: Budget) -> Dict[str, Tuple[Matrix, ...]]:
    if not beta <= rep.dim:
        raise GrassmannianError(f"Dimension vector {beta.to_dict()} does not fit inside {rep.dim.to_dict()}")
    q = rep.field.size
    total = 1
    for v in rep.quiver.vertices:
        total *= gaussian_binomial(rep.dim[v], beta[v], q)
    budget.ensure(total, f"candidate tuples of Gr_{beta.to_dict()}")
    return {v: enumerate_subspaces(rep.field, rep.dim[v], beta[v], budget) for v in rep.quiver.vertices}


def grassmannian_points(rep: Representation, beta: DimVector, budget: Optional[Budget] = None) -> Iterator[SubspaceTuple]:
    """
    All F_p-points of Gr_beta(M), vertices processed in topological order.

    Raises:
        GrassmannianError: If beta is not below dim M
        BudgetExceeded: If the candidate product exceeds the budget
    """
    candidates = _candidates(rep, beta, resolve_budget(budget))
    for bases in iter_invariant_tuples(rep, candidates):
        yield SubspaceTuple(rep, bases, canonical=True)


def count_points_reverse(rep: Representation, beta: DimVector, budget: Optional[Budget] = None) -> int:
    """Recount Gr_beta(M) with the vertices processed in reverse topological order."""
    candidates = _candidates(rep, beta, resolve_budget(budget))
    order = list(reversed(rep.quiver.topological_order))
    return sum(1 for _ in iter_invariant_tuples(rep, candidates, order))


def grassmannian_count(rep: Representation, beta: DimVector, budget: Optional[Budget] = None,
                       recount: Optional[bool] = None) -> int:
    """
    Count Gr_beta(M). For a rigid ambient (or when ``recount`` is set) the count
    is validated against the reverse-order recount.

    Raises:
        GrassmannianError: If the two counts disagree
    """
    count = sum(1 for _ in grassmannian_points(rep, beta, budget))
    if recount is None:
        recount = is_rigid(rep)
    if recount:
        other = count_points_reverse(rep, beta, budget)
        if other != count:
            raise GrassmannianError(f"Point count {count} disagrees with reverse recount {other}")
        logger.debug("Reverse recount confirmed %d points of Gr_%s", count, beta.to_dict())
    return count


def quotient_grassmannian_points(rep: Representation, beta: DimVector,
                                 budget: Optional[Budget] = None) -> Iterator[SubspaceTuple]:
    """Gr^beta(M), stored as kernels: the points of Gr_{dim M - beta}(M)."""
    if not beta <= rep.dim:
        raise GrassmannianError(f"Quotient dimension {beta.to_dict()} exceeds {rep.dim.to_dict()}")
    return grassmannian_points(rep, rep.dim - beta, budget)


def all_subspace_tuples(rep: Representation, budget: Optional[Budget] = None) -> Iterator[SubspaceTuple]:
    """
    Every subrepresentation of M, of every dimension vector.

    Raises:
        BudgetExceeded: If the product of per-vertex subspace counts exceeds the budget
    """
    budget = resolve_budget(budget)
    q = rep.field.size
    total = 1
    for v in rep.quiver.vertices:
        total *= count_subspaces(rep.dim[v], q)
    budget.ensure(total, f"subspace tuples of a representation of dimension {rep.dim.to_dict()}")
    candidates = {
        v: tuple(s for k in range(rep.dim[v] + 1) for s in enumerate_subspaces(rep.field, rep.dim[v], k, budget))
        for v in rep.quiver.vertices
    }
    for bases in iter_invariant_tuples(rep, candidates):
        yield SubspaceTuple(rep, bases, canonical=True)


def _copy_counts(ambient: Representation) -> Dict[str, int]:
    return {v: sum(1 for lb in ambient.labels[v] if lb.path.length == 0 and lb.summand == 0)
            for v in ambient.quiver.vertices}


def _sigma_matrices(h: GroupElement, ambient: Representation) -> Dict[str, Matrix]:
    if ambient.labels is None:
        raise GrassmannianError("sigma needs an ambient module with a labeled basis (P_beta or I_beta)")
    counts = _copy_counts(ambient)
    for v, count in counts.items():
        if v not in h.blocks or h[v].rows != count:
            raise DimensionMismatch(f"Group element block at {v} must be {count}x{count}")
    field = ambient.field
    matrices = {}
    for j in ambient.quiver.vertices:
        labels = ambient.labels[j]
        index = {lb: k for k, lb in enumerate(labels)}
        array = np.zeros((len(labels), len(labels)), dtype=field.dtype)
        array[:] = field.zero
        for col, lb in enumerate(labels):
            block = h[lb.anchor]
            for r in range(block.rows):
                array[index[BasisLabel(lb.path, r, lb.dual, lb.summand)], col] = block[r, lb.copy]
        matrices[j] = Matrix._wrap(field, array)
    return matrices


def sigma_action(h: GroupElement, pt: SubspaceTuple) -> SubspaceTuple:
    """
    Apply sigma(h) to a point of a Grassmannian of P_beta or I_beta.

    sigma(h) acts as h_i on the copy index of every basis label anchored at i.

    Raises:
        GrassmannianError: If the ambient module has no labeled basis
        DimensionMismatch: If h does not match the framing dimension vector
    """
    matrices = _sigma_matrices(h, pt.ambient)
    moved = {v: matmul(pt.bases[v], transpose(matrices[v])) for v in pt.ambient.quiver.vertices}
    return SubspaceTuple(pt.ambient, moved)


def hilbert_point_phi(fr: "FramedRep") -> SubspaceTuple:
    """
    ker phi_{M,A} as a point of the quotient Grassmannian of P_beta.

    Raises:
        NotInDegreeZeroLocus: If phi_{M,A} is not surjective
    """
    p_beta, phi = framed_phi(fr.rep, fr.framing)
    if not phi.is_surjective():
        raise NotInDegreeZeroLocus("phi_{M,A} is not surjective")
    return SubspaceTuple(p_beta, phi.kernel(), canonical=True)


def hilbert_point_psi(fr: "FramedRep") -> SubspaceTuple:
    """
    im psi_{M,B} as a point of the Grassmannian of I_beta.

    Raises:
        NotInDegreeZeroLocus: If psi_{M,B} is not injective
    """
    i_beta, psi = framed_psi(fr.rep, fr.framing)
    if not psi.is_injective():
        raise NotInDegreeZeroLocus("psi_{M,B} is not injective")
    return SubspaceTuple(i_beta, psi.image(), canonical=True)


def orbit_of_point(pt: SubspaceTuple, group: Iterable[GroupElement]) -> frozenset:
    """The sigma-orbit of ``pt`` as a set of canonical SubspaceTuples."""
    return frozenset(sigma_action(h, pt) for h in group)


def partition_orbits(items: Iterable[T], group: Sequence[Any], act: Callable[[Any, T], T],
                     key: Callable[[T], Hashable] = lambda x: x.key()) -> List[List[T]]:
    """
    Split ``items`` into orbits under ``group``.

    Returns:
        Orbits as lists sorted by ``key``; the orbits are ordered by their
        least element, which serves as the representative
    """
    pool = {key(item): item for item in items}
    seen = set()
    orbits = []
    for k in sorted(pool):
        if k in seen:
            continue
        members = {}
        for g in group:
            image = act(g, pool[k])
            members[key(image)] = image
        if k not in members:
            members[k] = pool[k]
        seen.update(members)
        orbits.append([members[m] for m in sorted(members)])
    return orbits
