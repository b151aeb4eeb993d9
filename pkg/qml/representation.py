"""
Quiver representations over exact fields.

This module builds representations, the standard modules S(i), P(i), I(i) and
their framed sums P_beta, I_beta, computes Hom spaces by solving the
intertwining equations, and constructs the canonical projective and injective
resolutions together with the framed maps phi_{M,A} and psi_{M,B}.

Basis conventions: at vertex j, P_beta has one basis vector p (x) e_c for every
vertex i (declared order), every copy c < beta_i and every path p: i -> j (path
order). I_beta has one basis vector q* (x) e_c for every vertex i, copy
c < beta_i and path q: j -> i.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

try:
    from .field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        block_assemble,
        column_space,
        from_json,
        identity,
        kernel_basis,
        kron,
        matmul,
        neg,
        random_matrix,
        rank,
        to_json,
        transpose,
        zeros,
    )
    from .harness import VerificationReport
    from .quiver_core import DimVector, GroupElement, Path, Quiver, euler_form, theta_split
except ImportError:
    from field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        block_assemble,
        column_space,
        from_json,
        identity,
        kernel_basis,
        kron,
        matmul,
        neg,
        random_matrix,
        rank,
        to_json,
        transpose,
        zeros,
    )
    from harness import VerificationReport
    from quiver_core import DimVector, GroupElement, Path, Quiver, euler_form, theta_split

logger = logging.getLogger(__name__)


class RepresentationError(Exception):
    """Custom exception for invalid representations and homomorphisms."""
    pass


@dataclass(frozen=True)
class BasisLabel:
    """
    Label of one basis vector of a standard module.

    ``path`` with ``dual=False`` labels p (x) e_copy in a projective; with
    ``dual=True`` it labels p* (x) e_copy in an injective. ``summand`` tells
    apart the pieces of a general direct sum.
    """

    path: Path
    copy: int = 0
    dual: bool = False
    summand: int = 0

    @property
    def anchor(self) -> str:
        """The vertex whose multiplicity space carries the copy index."""
        return self.path.target if self.dual else self.path.source

    def __str__(self) -> str:
        text = f"{self.path}{'*' if self.dual else ''}#{self.copy}"
        return f"{text}@{self.summand}" if self.summand else text


LabeledBasis = Dict[str, Tuple[BasisLabel, ...]]


class Representation:
    """
    A representation M of a quiver: a dimension vector and one matrix per arrow
    of shape alpha_{t(a)} x alpha_{s(a)}.

    Raises:
        RepresentationError: If arrows are missing or unknown
        DimensionMismatch: If a matrix has the wrong shape
    """

    def __init__(self, quiver: Quiver, field: FieldSpec, dim: DimVector, maps: Mapping[str, Matrix],
                 labels: Optional[LabeledBasis] = None):
        self.quiver = quiver
        self.field = field
        self.dim = dim if isinstance(dim, DimVector) else DimVector(quiver.vertices, dim)
        if set(self.dim.vertices) != set(quiver.vertices):
            raise RepresentationError("Dimension vector does not match the quiver vertices")
        unknown = set(maps) - {a.id for a in quiver.arrows}
        if unknown:
            raise RepresentationError(f"Maps given for unknown arrows: {sorted(unknown)}")
        self._maps: Dict[str, Matrix] = {}
        for arrow in quiver.arrows:
            if arrow.id not in maps:
                raise RepresentationError(f"Missing matrix for arrow {arrow.id}")
            matrix = maps[arrow.id]
            expected = (self.dim[arrow.dst], self.dim[arrow.src])
            if matrix.shape != expected:
                raise DimensionMismatch(f"Arrow {arrow.id} needs a {expected} matrix, got {matrix.shape}")
            if matrix.field != field:
                raise RepresentationError(f"Arrow {arrow.id} is over {matrix.field.name}, expected {field.name}")
            self._maps[arrow.id] = matrix
        if labels is not None:
            for vertex in quiver.vertices:
                if len(labels.get(vertex, ())) != self.dim[vertex]:
                    raise RepresentationError(f"Label count at {vertex} does not match dimension {self.dim[vertex]}")
        self.labels = labels
        self._key = None

    @classmethod
    def zero(cls, quiver: Quiver, field: FieldSpec, dim: DimVector) -> "Representation":
        return cls(quiver, field, dim, {a.id: zeros(field, dim[a.dst], dim[a.src]) for a in quiver.arrows})

    @classmethod
    def from_dict(cls, quiver: Quiver, data: Mapping[str, Any], field: Optional[FieldSpec] = None) -> "Representation":
        """Read ``{"dim": {...}, "field": "F2", "maps": {"a1": [[...]]}}``."""
        if field is None:
            field = FieldSpec.parse(str(data.get("field", "F2")))
        dim = DimVector(quiver.vertices, data["dim"])
        raw_maps = data.get("maps", {})
        maps = {}
        for arrow in quiver.arrows:
            if arrow.id not in raw_maps:
                raise RepresentationError(f"Missing matrix for arrow {arrow.id}")
            maps[arrow.id] = from_json(field, raw_maps[arrow.id], dim[arrow.dst], dim[arrow.src])
        return cls(quiver, field, dim, maps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim.to_dict(),
            "field": self.field.name,
            "maps": {a.id: to_json(self._maps[a.id]) for a in self.quiver.arrows},
        }

    @property
    def maps(self) -> Dict[str, Matrix]:
        return dict(self._maps)

    def map(self, arrow_id: str) -> Matrix:
        return self._maps[arrow_id]

    def total_dim(self) -> int:
        return sum(self.dim.values_tuple)

    def path_matrix(self, path: Path) -> Matrix:
        """M_p: the product of the arrow matrices along ``path`` (identity for a trivial path)."""
        result = identity(self.field, self.dim[path.source])
        for arrow in path.arrows:
            result = matmul(self._maps[arrow.id], result)
        return result

    def act(self, g: GroupElement) -> "Representation":
        """g . M with (g . M)_a = g_{t(a)} M_a g_{s(a)}^{-1}."""
        inverse = g.inverse()
        maps = {a.id: matmul(matmul(g[a.dst], self._maps[a.id]), inverse[a.src]) for a in self.quiver.arrows}
        return Representation(self.quiver, self.field, self.dim, maps)

    def key(self) -> Tuple:
        if self._key is None:
            self._key = (self.dim.values_tuple, tuple(self._maps[a.id].key() for a in self.quiver.arrows))
        return self._key

    def __eq__(self, other) -> bool:
        return (isinstance(other, Representation) and self.quiver == other.quiver
                and self.field == other.field and self.key() == other.key())

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Representation(dim={self.dim.to_dict()}, maps={ {k: m.entries() for k, m in self._maps.items()} })"


class Homomorphism:
    """A vertex-indexed family of matrices f_i: M_i -> N_i."""

    def __init__(self, source: Representation, target: Representation, maps: Mapping[str, Matrix]):
        self.source = source
        self.target = target
        self.maps: Dict[str, Matrix] = {}
        for vertex in source.quiver.vertices:
            matrix = maps[vertex]
            expected = (target.dim[vertex], source.dim[vertex])
            if matrix.shape != expected:
                raise DimensionMismatch(f"Component at {vertex} needs shape {expected}, got {matrix.shape}")
            self.maps[vertex] = matrix

    def __getitem__(self, vertex: str) -> Matrix:
        return self.maps[vertex]

    def is_valid(self) -> bool:
        """N_a f_{s(a)} = f_{t(a)} M_a for every arrow."""
        return all(
            matmul(self.target.map(a.id), self.maps[a.src]) == matmul(self.maps[a.dst], self.source.map(a.id))
            for a in self.source.quiver.arrows
        )

    def compose(self, first: "Homomorphism") -> "Homomorphism":
        """self o first."""
        return Homomorphism(first.source, self.target,
                            {v: matmul(self.maps[v], first.maps[v]) for v in self.maps})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.maps.values())

    def is_surjective(self) -> bool:
        return all(rank(m) == m.rows for m in self.maps.values())

    def is_injective(self) -> bool:
        return all(rank(m) == m.cols for m in self.maps.values())

    def is_isomorphism(self) -> bool:
        return all(m.rows == m.cols and rank(m) == m.rows for m in self.maps.values())

    def kernel(self) -> Dict[str, Matrix]:
        """Canonical row bases of the kernels, one per vertex."""
        return {v: column_space(kernel_basis(m)) for v, m in self.maps.items()}

    def image(self) -> Dict[str, Matrix]:
        """Canonical row bases of the images, one per vertex."""
        return {v: column_space(m) for v, m in self.maps.items()}

    def as_group_element(self) -> GroupElement:
        return GroupElement(self.source.field, self.maps)

    def to_dict(self) -> Dict[str, Any]:
        return {v: to_json(m) for v, m in self.maps.items()}


HomBasis = List[Homomorphism]


def is_homomorphism(f: Homomorphism, m: Representation, n: Representation) -> bool:
    return f.source == m and f.target == n and f.is_valid()


def act_on_representation(g: GroupElement, m: Representation) -> Representation:
    return m.act(g)


@dataclass(frozen=True)
class Resolution:
    """
    A two-term resolution of ``module``.

    Projective: 0 -> first --differential--> second --augmentation--> module -> 0.
    Injective:  0 -> module --augmentation--> first --differential--> second -> 0.
    """

    module: Representation
    first: Representation
    second: Representation
    differential: Homomorphism
    augmentation: Homomorphism
    injective: bool = False


def _matrix_from_columns(field: FieldSpec, rows: int, columns: Sequence[np.ndarray]) -> Matrix:
    if not columns:
        return zeros(field, rows, 0)
    return Matrix._wrap(field, np.column_stack(columns).reshape(rows, len(columns)))


def _matrix_from_rows(field: FieldSpec, cols: int, rows: Sequence[np.ndarray]) -> Matrix:
    if not rows:
        return zeros(field, 0, cols)
    return Matrix._wrap(field, np.vstack(rows).reshape(len(rows), cols))


@lru_cache(maxsize=256)
def _standard_sum(quiver: Quiver, field: FieldSpec, beta: DimVector, dual: bool) -> Representation:
    labels: Dict[str, List[BasisLabel]] = {j: [] for j in quiver.vertices}
    for i in quiver.vertices:
        for c in range(beta[i]):
            for j in quiver.vertices:
                paths = quiver.paths(i, j) if not dual else quiver.paths(j, i)
                labels[j].extend(BasisLabel(p, c, dual) for p in paths)
    index = {j: {label: k for k, label in enumerate(labels[j])} for j in quiver.vertices}

    maps = {}
    for arrow in quiver.arrows:
        u, w = arrow.src, arrow.dst
        array = np.zeros((len(labels[w]), len(labels[u])), dtype=np.int64)
        for col, label in enumerate(labels[u]):
            if not dual:
                array[index[w][BasisLabel(label.path.then(arrow), label.copy)], col] = 1
            elif label.path.arrows and label.path.arrows[0] == arrow:
                array[index[w][BasisLabel(label.path.drop_first(), label.copy, True)], col] = 1
        maps[arrow.id] = Matrix._wrap(field, array.astype(field.dtype))
    dim = DimVector(quiver.vertices, [len(labels[j]) for j in quiver.vertices])
    return Representation(quiver, field, dim, maps, {j: tuple(ls) for j, ls in labels.items()})


def projective_sum(quiver: Quiver, field: FieldSpec, beta: DimVector) -> Representation:
    """P_beta = sum over i of P(i) (x) k^{beta_i}, with labeled basis."""
    return _standard_sum(quiver, field, beta, False)


def injective_sum(quiver: Quiver, field: FieldSpec, beta: DimVector) -> Representation:
    """I_beta = sum over i of I(i) (x) k^{beta_i}, with labeled dual basis."""
    return _standard_sum(quiver, field, beta, True)


def simple(quiver: Quiver, field: FieldSpec, vertex: str) -> Representation:
    dim = DimVector.unit(quiver.vertices, vertex)
    labels = {v: ((BasisLabel(Path.trivial(v)),) if v == vertex else ()) for v in quiver.vertices}
    zero = Representation.zero(quiver, field, dim)
    return Representation(quiver, field, dim, zero.maps, labels)


def projective(quiver: Quiver, field: FieldSpec, vertex: str) -> Representation:
    """
    P(i): basis of P(i)_j is the set of paths i -> j; arrows append themselves.

    Examples:
        >>> P = projective(Quiver.linear(2), FieldSpec(2), "1")
        >>> P.dim.to_dict(), P.map("a1").entries()
        ({'1': 1, '2': 1}, [[1]])
    """
    return projective_sum(quiver, field, DimVector.unit(quiver.vertices, vertex))


def injective(quiver: Quiver, field: FieldSpec, vertex: str) -> Representation:
    """I(i): basis of I(i)_j is the set of q* for paths q: j -> i."""
    return injective_sum(quiver, field, DimVector.unit(quiver.vertices, vertex))


def direct_sum(reps: Sequence[Representation]) -> Representation:
    """
    Blockwise direct sum. Labels survive, tagged with the summand index, when
    every summand is labeled.

    Raises:
        RepresentationError: If the summands live on different quivers or fields
    """
    if not reps:
        raise RepresentationError("direct_sum needs at least one summand")
    quiver, field = reps[0].quiver, reps[0].field
    if any(r.quiver != quiver or r.field != field for r in reps):
        raise RepresentationError("Direct sum summands must share quiver and field")
    dim = DimVector(quiver.vertices, [sum(r.dim[v] for r in reps) for v in quiver.vertices])
    maps = {}
    for arrow in quiver.arrows:
        grid = []
        for k, row_rep in enumerate(reps):
            grid.append([
                row_rep.map(arrow.id) if k == l else zeros(field, row_rep.dim[arrow.dst], col_rep.dim[arrow.src])
                for l, col_rep in enumerate(reps)
            ])
        maps[arrow.id] = _assemble_or_empty(field, grid, dim[arrow.dst], dim[arrow.src])
    labels = None
    if all(r.labels is not None for r in reps):
        labels = {
            v: tuple(BasisLabel(lb.path, lb.copy, lb.dual, k) for k, r in enumerate(reps) for lb in r.labels[v])
            for v in quiver.vertices
        }
    return Representation(quiver, field, dim, maps, labels)


def _assemble_or_empty(field: FieldSpec, grid, rows: int, cols: int) -> Matrix:
    if rows == 0 or cols == 0:
        return zeros(field, rows, cols)
    return block_assemble(grid)


def _labeled_zero(quiver: Quiver, field: FieldSpec) -> Representation:
    zero = Representation.zero(quiver, field, DimVector.zero(quiver.vertices))
    return Representation(quiver, field, zero.dim, zero.maps, {v: () for v in quiver.vertices})


def tensor_by_space(rep: Representation, multiplicity: int) -> Representation:
    """rep (x) k^multiplicity, labels carrying the copy index."""
    if multiplicity == 0:
        return _labeled_zero(rep.quiver, rep.field)
    total = direct_sum([rep] * multiplicity)
    if rep.labels is None:
        return total
    labels = {
        v: tuple(BasisLabel(lb.path, lb.summand, lb.dual) for lb in total.labels[v]) for v in rep.quiver.vertices
    }
    return Representation(rep.quiver, rep.field, total.dim, total.maps, labels)


def random_representation(quiver: Quiver, field: FieldSpec, dim: DimVector,
                          rng: np.random.Generator) -> Representation:
    maps = {a.id: random_matrix(field, dim[a.dst], dim[a.src], rng) for a in quiver.arrows}
    return Representation(quiver, field, dim, maps)


def _hom_system(m: Representation, n: Representation) -> Tuple[Matrix, List[Tuple[str, int, int]]]:
    """Coefficient matrix of the intertwining equations on row-major vec(f_i)."""
    if m.quiver != n.quiver or m.field != n.field:
        raise RepresentationError("Hom needs representations of one quiver over one field")
    field = m.field
    quiver = m.quiver
    layout = [(v, n.dim[v], m.dim[v]) for v in quiver.vertices]
    total = sum(r * c for _, r, c in layout)
    blocks = []
    for arrow in quiver.arrows:
        s, t = arrow.src, arrow.dst
        height = n.dim[t] * m.dim[s]
        if height == 0:
            continue
        row = []
        for v, r, c in layout:
            if v == s:
                row.append(kron(n.map(arrow.id), identity(field, m.dim[s])))
            elif v == t:
                row.append(neg(kron(identity(field, n.dim[t]), transpose(m.map(arrow.id)))))
            else:
                row.append(zeros(field, height, r * c))
        blocks.append(row)
    if not blocks or total == 0:
        return zeros(field, 0, total), layout
    return block_assemble(blocks), layout


def hom_basis(m: Representation, n: Representation) -> HomBasis:
    """
    A basis of Hom(M, N): solutions of N_a f_{s(a)} = f_{t(a)} M_a.

    Raises:
        RepresentationError: If M and N live on different quivers or fields
    """
    system, layout = _hom_system(m, n)
    kernel = kernel_basis(system)
    basis = []
    for k in range(kernel.cols):
        column = kernel.data[:, k]
        offset = 0
        maps = {}
        for v, r, c in layout:
            segment = column[offset:offset + r * c]
            maps[v] = Matrix._wrap(m.field, np.array(segment).reshape(r, c))
            offset += r * c
        basis.append(Homomorphism(m, n, maps))
    return basis


def hom_dim(m: Representation, n: Representation) -> int:
    system, _ = _hom_system(m, n)
    return system.cols - rank(system)


def ext_dim(m: Representation, n: Representation) -> int:
    """dim Ext^1(M, N) = dim Hom(M, N) - <dim M, dim N>."""
    return hom_dim(m, n) - euler_form(m.quiver, m.dim, n.dim)


def canonical_projective_resolution(m: Representation) -> Resolution:
    """
    0 -> P1 -> P0 -> M -> 0 with P0 = sum_i P(i) (x) M_i and
    P1 = sum over arrows a of P(t(a)) (x) M_{s(a)}.

    The differential sends q (x) v in the summand of arrow a to
    (a then q) (x) v - q (x) M_a v.
    """
    quiver, field = m.quiver, m.field
    p0 = projective_sum(quiver, field, m.dim)
    summands = [tensor_by_space(projective(quiver, field, a.dst), m.dim[a.src]) for a in quiver.arrows]
    if summands:
        p1 = direct_sum(summands)
    else:
        p1 = _labeled_zero(quiver, field)
    index0 = {j: {label: k for k, label in enumerate(p0.labels[j])} for j in quiver.vertices}

    components = {}
    for j in quiver.vertices:
        array = np.zeros((p0.dim[j], p1.dim[j]), dtype=object)
        array[:] = 0
        for col, label in enumerate(p1.labels[j]):
            arrow = quiver.arrows[label.summand]
            q, c = label.path, label.copy
            array[index0[j][BasisLabel(q.after(arrow), c)], col] += 1
            m_a = m.map(arrow.id)
            for r in range(m.dim[arrow.dst]):
                array[index0[j][BasisLabel(q, r)], col] -= m_a[r, c]
        components[j] = Matrix(field, array)
    differential = Homomorphism(p1, p0, components)
    _, augmentation = canonical_phi(m)
    return Resolution(m, p1, p0, differential, augmentation)


def canonical_injective_resolution(m: Representation) -> Resolution:
    """
    0 -> M -> I0 -> I1 -> 0 with I0 = sum_i I(i) (x) M_i and
    I1 = sum over arrows a of I(s(a)) (x) M_{t(a)}.

    Writing x in I0_j as a family (x_q) over paths q starting at j, the
    differential is x |-> (x_{r then a} - M_a x_r) indexed by (a, r).
    """
    quiver, field = m.quiver, m.field
    i0 = injective_sum(quiver, field, m.dim)
    summands = [tensor_by_space(injective(quiver, field, a.src), m.dim[a.dst]) for a in quiver.arrows]
    if summands:
        i1 = direct_sum(summands)
    else:
        i1 = _labeled_zero(quiver, field)
    index0 = {j: {label: k for k, label in enumerate(i0.labels[j])} for j in quiver.vertices}

    components = {}
    for j in quiver.vertices:
        array = np.zeros((i1.dim[j], i0.dim[j]), dtype=object)
        array[:] = 0
        for row, label in enumerate(i1.labels[j]):
            arrow = quiver.arrows[label.summand]
            r_path, c = label.path, label.copy
            array[row, index0[j][BasisLabel(r_path.then(arrow), c, True)]] += 1
            m_a = m.map(arrow.id)
            for d in range(m.dim[arrow.src]):
                array[row, index0[j][BasisLabel(r_path, d, True)]] -= m_a[c, d]
        components[j] = Matrix(field, array)
    differential = Homomorphism(i0, i1, components)
    _, augmentation = canonical_psi(m)
    return Resolution(m, i0, i1, differential, augmentation, injective=True)


def verify_resolution_exact(resolution: Resolution) -> List[str]:
    """
    Check a resolution is a short exact sequence of representations.

    Returns:
        A list of problems; empty when the sequence is exact
    """
    problems = []
    d, aug = resolution.differential, resolution.augmentation
    for name, hom in (("differential", d), ("augmentation", aug)):
        if not hom.is_valid():
            problems.append(f"{name} is not a homomorphism")
    composite = aug.compose(d) if not resolution.injective else d.compose(aug)
    if not composite.is_zero():
        problems.append("composite of the two maps is not zero")
    if resolution.injective:
        if not aug.is_injective():
            problems.append("M -> I0 is not injective")
        if not d.is_surjective():
            problems.append("I0 -> I1 is not surjective")
        outer = (resolution.first, resolution.second)
    else:
        if not d.is_injective():
            problems.append("P1 -> P0 is not injective")
        if not aug.is_surjective():
            problems.append("P0 -> M is not surjective")
        outer = (resolution.second, resolution.first)
    big, small = outer
    for v in resolution.module.quiver.vertices:
        if big.dim[v] - small.dim[v] != resolution.module.dim[v]:
            problems.append(f"dimensions do not add up at {v}")
    return problems


def ext_dim_via_resolution(m: Representation, n: Representation) -> int:
    """
    dim Ext^1(M, N) as the cokernel dimension of Hom(P0, N) -> Hom(P1, N),
    computed from the canonical projective resolution of M.
    """
    resolution = canonical_projective_resolution(m)
    p1, p0, d = resolution.first, resolution.second, resolution.differential
    field = m.field
    rows = []
    for f in hom_basis(p0, n):
        pieces = [matmul(f[v], d[v]).data.ravel() for v in m.quiver.vertices]
        rows.append(np.concatenate(pieces) if pieces else np.zeros(0, dtype=field.dtype))
    width = sum(n.dim[v] * p1.dim[v] for v in m.quiver.vertices)
    image_rank = rank(_matrix_from_rows(field, width, rows)) if rows else 0
    return hom_dim(p1, n) - image_rank


def _check_framing(m: Representation, framing: Mapping[str, Matrix], a_type: bool) -> DimVector:
    beta = []
    for v in m.quiver.vertices:
        if v not in framing:
            raise DimensionMismatch(f"Framing matrix missing at vertex {v}")
        block = framing[v]
        size = block.rows if a_type else block.cols
        if size != m.dim[v]:
            raise DimensionMismatch(f"Framing at {v} has shape {block.shape}, incompatible with dimension {m.dim[v]}")
        beta.append(block.cols if a_type else block.rows)
    return DimVector(m.quiver.vertices, beta)


def framed_phi(m: Representation, a: Mapping[str, Matrix]) -> Tuple[Representation, Homomorphism]:
    """
    phi_{M,A}: P_beta -> M, p (x) w |-> M_p A_{s(p)} w, where A_i: k^{beta_i} -> M_i.

    Raises:
        DimensionMismatch: If a framing block has the wrong number of rows
    """
    beta = _check_framing(m, a, a_type=True)
    p_beta = projective_sum(m.quiver, m.field, beta)
    components = {}
    for j in m.quiver.vertices:
        columns = []
        cache: Dict[Path, Matrix] = {}
        for label in p_beta.labels[j]:
            if label.path not in cache:
                cache[label.path] = matmul(m.path_matrix(label.path), a[label.path.source])
            columns.append(cache[label.path].data[:, label.copy])
        components[j] = _matrix_from_columns(m.field, m.dim[j], columns)
    return p_beta, Homomorphism(p_beta, m, components)


def framed_psi(m: Representation, b: Mapping[str, Matrix]) -> Tuple[Representation, Homomorphism]:
    """
    psi_{M,B}: M -> I_beta, v |-> sum over q of q* (x) B_{t(q)} M_q v, where B_i: M_i -> k^{beta_i}.

    Raises:
        DimensionMismatch: If a framing block has the wrong number of columns
    """
    beta = _check_framing(m, b, a_type=False)
    i_beta = injective_sum(m.quiver, m.field, beta)
    components = {}
    for i in m.quiver.vertices:
        rows = []
        cache: Dict[Path, Matrix] = {}
        for label in i_beta.labels[i]:
            if label.path not in cache:
                cache[label.path] = matmul(b[label.path.target], m.path_matrix(label.path))
            rows.append(cache[label.path].data[label.copy, :])
        components[i] = _matrix_from_rows(m.field, m.dim[i], rows)
    return i_beta, Homomorphism(m, i_beta, components)


def identity_framing(m: Representation, vertices, a_type: bool = True) -> Dict[str, Matrix]:
    """Identity on ``vertices`` and empty blocks elsewhere."""
    chosen = set(vertices)
    framing = {}
    for v in m.quiver.vertices:
        size = m.dim[v] if v in chosen else 0
        framing[v] = identity(m.field, m.dim[v]) if v in chosen else (
            zeros(m.field, m.dim[v], size) if a_type else zeros(m.field, size, m.dim[v]))
    return framing


def canonical_phi(m: Representation, theta=None) -> Tuple[Representation, Homomorphism]:
    """phi_M: P+ -> M with P+ built on Q0+ (all vertices when ``theta`` is None)."""
    vertices = m.quiver.vertices if theta is None else theta_split(theta)[0]
    return framed_phi(m, identity_framing(m, vertices, a_type=True))


def canonical_psi(m: Representation, theta=None) -> Tuple[Representation, Homomorphism]:
    """psi_M: M -> I- with I- built on Q0- (all vertices when ``theta`` is None)."""
    vertices = m.quiver.vertices if theta is None else theta_split(theta)[1]
    return framed_psi(m, identity_framing(m, vertices, a_type=False))


def is_rigid(m: Representation) -> bool:
    return ext_dim(m, m) == 0


def verify_hom_ext(quiver: Quiver, fields: Sequence[FieldSpec], samples: int, rng: np.random.Generator,
                   max_entry: int = 2) -> VerificationReport:
    """
    Check dim Hom - dim Ext^1 = <dim M, dim N> on random pairs, with Ext^1
    computed from the canonical resolution and cross-checked against the
    Euler-form route. Both canonical resolutions are checked for exactness.
    """
    report = VerificationReport("hom-ext")
    for k in range(samples):
        field = fields[k % len(fields)]
        dims = [DimVector(quiver.vertices, rng.integers(0, max_entry + 1, size=len(quiver.vertices)).tolist())
                for _ in range(2)]
        m = random_representation(quiver, field, dims[0], rng)
        n = random_representation(quiver, field, dims[1], rng)
        hom = hom_dim(m, n)
        via_resolution = ext_dim_via_resolution(m, n)
        via_euler = hom - euler_form(quiver, m.dim, n.dim)
        ok = hom - via_resolution == euler_form(quiver, m.dim, n.dim) and via_resolution == via_euler
        problems = verify_resolution_exact(canonical_projective_resolution(m))
        problems += verify_resolution_exact(canonical_injective_resolution(m))
        report.record(ok and not problems, sample=k, field=field.name, m=m.to_dict(), n=n.to_dict(),
                      hom=hom, ext_resolution=via_resolution, ext_euler=via_euler, resolution_problems=problems)
    logger.debug("Hom/Ext checked on %d random pairs over %s", samples, ", ".join(f.name for f in fields))
    report.details = {"samples": samples, "fields": [f.name for f in fields]}
    return report
