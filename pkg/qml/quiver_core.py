"""
Quivers, paths, dimension vectors, stability parameters and group elements.

A Quiver is an acyclic directed multigraph backed by a networkx MultiDiGraph.
Vertices and arrows are identified by strings. Paths are stored as tuples of
arrows and ordered by (length, arrow id sequence), which fixes the bases of the
standard projective and injective modules.
"""

from collections import abc
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

try:
    from .field_matrix import (
        FieldSpec,
        Matrix,
        SingularMatrix,
        determinant,
        identity,
        invert,
        is_invertible,
        matmul,
        random_matrix,
        scale,
    )
except ImportError:
    from field_matrix import (
        FieldSpec,
        Matrix,
        SingularMatrix,
        determinant,
        identity,
        invert,
        is_invertible,
        matmul,
        random_matrix,
        scale,
    )


class QuiverError(Exception):
    """Custom exception for malformed quivers and vertex vectors."""
    pass


class CyclicQuiver(QuiverError):
    """Raised when a quiver has an oriented cycle."""
    pass


class WrongQuiverShape(QuiverError):
    """Raised when an operation needs a specific quiver (subspace, linear A_n, bipartite)."""
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class Path:
    """A path from ``source`` to ``target``; arrows are listed in the order they are traversed."""

    source: str
    target: str
    arrows: Tuple[Arrow, ...] = ()

    def __post_init__(self):
        if not self.arrows:
            if self.source != self.target:
                raise QuiverError(f"Trivial path must start and end at one vertex, got {self.source}->{self.target}")
            return
        if self.arrows[0].src != self.source or self.arrows[-1].dst != self.target:
            raise QuiverError(f"Path endpoints do not match its arrows: {self}")
        for first, second in zip(self.arrows, self.arrows[1:]):
            if first.dst != second.src:
                raise QuiverError(f"Arrows {first.id} and {second.id} do not compose")

    @classmethod
    def trivial(cls, vertex: str) -> "Path":
        return cls(vertex, vertex)

    @property
    def length(self) -> int:
        return len(self.arrows)

    @property
    def arrow_ids(self) -> Tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def sort_key(self) -> Tuple[int, Tuple[str, ...]]:
        return (self.length, self.arrow_ids)

    def then(self, arrow: Arrow) -> "Path":
        """This path followed by ``arrow``."""
        return Path(self.source, arrow.dst, self.arrows + (arrow,))

    def after(self, arrow: Arrow) -> "Path":
        """``arrow`` followed by this path."""
        return Path(arrow.src, self.target, (arrow,) + self.arrows)

    def drop_first(self) -> "Path":
        return Path(self.arrows[0].dst, self.target, self.arrows[1:])

    def __str__(self) -> str:
        if not self.arrows:
            return f"e_{self.source}"
        return ".".join(self.arrow_ids)


class Quiver:
    """
    A finite acyclic quiver.

    Args:
        vertices: Vertex ids; their order is the declared order used for bases
        arrows: Arrows with unique ids between existing vertices

    Raises:
        QuiverError: On duplicate ids or dangling arrows
        CyclicQuiver: If the arrows contain an oriented cycle
    """

    def __init__(self, vertices: Sequence[str], arrows: Sequence[Arrow]):
        self.vertices: Tuple[str, ...] = tuple(str(v) for v in vertices)
        self.arrows: Tuple[Arrow, ...] = tuple(arrows)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError(f"Duplicate vertex ids in {list(self.vertices)}")
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise QuiverError(f"Duplicate arrow ids in {ids}")

        self._graph = nx.MultiDiGraph()
        self._graph.add_nodes_from(self.vertices)
        for arrow in self.arrows:
            if arrow.src not in self._graph or arrow.dst not in self._graph:
                raise QuiverError(f"Arrow {arrow.id} references an unknown vertex: {arrow.src}->{arrow.dst}")
            self._graph.add_edge(arrow.src, arrow.dst, key=arrow.id)
        if not nx.is_directed_acyclic_graph(self._graph):
            cycle = nx.find_cycle(self._graph)
            raise CyclicQuiver(f"Quiver has an oriented cycle through {[edge[0] for edge in cycle]}")

        position = {v: k for k, v in enumerate(self.vertices)}
        self._order = tuple(nx.lexicographical_topological_sort(self._graph, key=position.__getitem__))
        self._arrow_index = {a.id: a for a in self.arrows}
        self._paths_from: Dict[str, Tuple[Path, ...]] = {}

    @classmethod
    def linear(cls, n: int) -> "Quiver":
        """Type A_n with the linear orientation 1 -> 2 -> ... -> n."""
        vertices = [str(i) for i in range(1, n + 1)]
        arrows = [Arrow(f"a{i}", str(i), str(i + 1)) for i in range(1, n)]
        return cls(vertices, arrows)

    @classmethod
    def subspace(cls, m: int) -> "Quiver":
        """The m-subspace quiver: sources q1..qm, each with one arrow to the sink s."""
        vertices = [f"q{i}" for i in range(1, m + 1)] + ["s"]
        arrows = [Arrow(f"a{i}", f"q{i}", "s") for i in range(1, m + 1)]
        return cls(vertices, arrows)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Quiver":
        arrows = [Arrow(str(a["id"]), str(a["src"]), str(a["dst"])) for a in data.get("arrows", [])]
        return cls(data["vertices"], arrows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"id": a.id, "src": a.src, "dst": a.dst} for a in self.arrows],
        }

    @property
    def graph(self) -> nx.MultiDiGraph:
        return self._graph

    @property
    def topological_order(self) -> Tuple[str, ...]:
        return self._order

    def arrow(self, arrow_id: str) -> Arrow:
        return self._arrow_index[arrow_id]

    def arrows_from(self, vertex: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == vertex]

    def arrows_to(self, vertex: str) -> List[Arrow]:
        return [a for a in self.arrows if a.dst == vertex]

    def sources(self) -> List[str]:
        return [v for v in self.vertices if self._graph.in_degree(v) == 0]

    def sinks(self) -> List[str]:
        return [v for v in self.vertices if self._graph.out_degree(v) == 0]

    def is_bipartite_oriented(self) -> bool:
        """True when every vertex is a source or a sink."""
        return all(self._graph.in_degree(v) == 0 or self._graph.out_degree(v) == 0 for v in self.vertices)

    def paths_from(self, vertex: str) -> Tuple[Path, ...]:
        cached = self._paths_from.get(vertex)
        if cached is not None:
            return cached
        found = []
        stack = [Path.trivial(vertex)]
        while stack:
            path = stack.pop()
            found.append(path)
            stack.extend(path.then(arrow) for arrow in self.arrows_from(path.target))
        result = tuple(sorted(found, key=Path.sort_key))
        self._paths_from[vertex] = result
        return result

    def paths(self, i: str, j: str) -> Tuple[Path, ...]:
        return tuple(p for p in self.paths_from(i) if p.target == j)

    def _signature(self) -> Tuple:
        return (self.vertices, self.arrows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Quiver) and self._signature() == other._signature()

    def __hash__(self) -> int:
        return hash(self._signature())

    def __repr__(self) -> str:
        return f"Quiver(vertices={list(self.vertices)}, arrows={[a.id for a in self.arrows]})"


class VertexVector(abc.Mapping):
    """An integer per vertex; iteration follows the declared vertex order."""

    def __init__(self, vertices: Sequence[str], values: Union[Mapping[str, int], Sequence[int]]):
        self._vertices = tuple(vertices)
        if isinstance(values, abc.Mapping):
            if set(values) != set(self._vertices):
                raise QuiverError(
                    f"{type(self).__name__} must be defined on exactly {list(self._vertices)}, got {sorted(values)}"
                )
            data = tuple(int(values[v]) for v in self._vertices)
        else:
            data = tuple(int(x) for x in values)
            if len(data) != len(self._vertices):
                raise QuiverError(
                    f"{type(self).__name__} needs {len(self._vertices)} entries, got {len(data)}"
                )
        self._values = data
        self._index = {v: k for k, v in enumerate(self._vertices)}
        self._validate()

    def _validate(self) -> None:
        pass

    @classmethod
    def zero(cls, vertices: Sequence[str]):
        return cls(vertices, [0] * len(vertices))

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self._vertices

    @property
    def values_tuple(self) -> Tuple[int, ...]:
        return self._values

    def __getitem__(self, vertex: str) -> int:
        return self._values[self._index[vertex]]

    def __iter__(self) -> Iterator[str]:
        return iter(self._vertices)

    def __len__(self) -> int:
        return len(self._vertices)

    def norm(self) -> int:
        return sum(abs(x) for x in self._values)

    def is_zero(self) -> bool:
        return not any(self._values)

    def scaled(self, factor: int):
        return type(self)(self._vertices, [factor * x for x in self._values])

    def __add__(self, other: "VertexVector"):
        return type(self)(self._vertices, [self[v] + other[v] for v in self._vertices])

    def __sub__(self, other: "VertexVector"):
        return type(self)(self._vertices, [self[v] - other[v] for v in self._vertices])

    def __eq__(self, other) -> bool:
        if isinstance(other, VertexVector):
            return self._vertices == other._vertices and self._values == other._values
        return abc.Mapping.__eq__(self, other)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._vertices, self._values))

    def to_dict(self) -> Dict[str, int]:
        return dict(zip(self._vertices, self._values))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class DimVector(VertexVector):
    """A dimension vector; entries are non-negative."""

    def _validate(self) -> None:
        if any(x < 0 for x in self._values):
            raise QuiverError(f"Dimension vector entries must be non-negative: {self.to_dict()}")

    @classmethod
    def unit(cls, vertices: Sequence[str], vertex: str) -> "DimVector":
        return cls(vertices, [1 if v == vertex else 0 for v in vertices])

    def __le__(self, other: "DimVector") -> bool:
        return all(self[v] <= other[v] for v in self._vertices)


class StabilityParam(VertexVector):
    """A stability parameter theta: one integer weight per vertex."""
    pass


class GroupElement:
    """
    An element of G(d) = product of GL(d_i): one invertible matrix per vertex.

    Raises:
        SingularMatrix: If ``check`` is set and some block is not invertible
    """

    def __init__(self, field: FieldSpec, blocks: Mapping[str, Matrix], check: bool = True):
        self.field = field
        self.blocks: Dict[str, Matrix] = dict(blocks)
        for vertex, block in self.blocks.items():
            if block.rows != block.cols:
                raise SingularMatrix(f"Group element block at {vertex} is not square: {block.shape}")
            if check and not is_invertible(block):
                raise SingularMatrix(f"Group element block at {vertex} is singular")
        self._inverse: Optional["GroupElement"] = None

    @classmethod
    def identity(cls, field: FieldSpec, dim: DimVector) -> "GroupElement":
        return cls(field, {v: identity(field, dim[v]) for v in dim}, check=False)

    @classmethod
    def scalar(cls, field: FieldSpec, dim: DimVector, t) -> "GroupElement":
        if field.element(t) == 0:
            raise SingularMatrix("Scalar group elements need a non-zero scalar")
        return cls(field, {v: scale(identity(field, dim[v]), t) for v in dim}, check=False)

    @classmethod
    def random(cls, field: FieldSpec, dim: DimVector, rng: np.random.Generator) -> "GroupElement":
        blocks = {}
        for v in dim:
            block = random_matrix(field, dim[v], dim[v], rng)
            while not is_invertible(block):
                block = random_matrix(field, dim[v], dim[v], rng)
            blocks[v] = block
        return cls(field, blocks, check=False)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(self.blocks)

    @property
    def dim(self) -> DimVector:
        return DimVector(self.vertices, [self.blocks[v].rows for v in self.vertices])

    def __getitem__(self, vertex: str) -> Matrix:
        return self.blocks[vertex]

    def compose(self, other: "GroupElement") -> "GroupElement":
        """The product self * other (apply ``other`` first)."""
        return GroupElement(self.field, {v: matmul(self[v], other[v]) for v in self.vertices}, check=False)

    def inverse(self) -> "GroupElement":
        if self._inverse is None:
            self._inverse = GroupElement(self.field, {v: invert(b) for v, b in self.blocks.items()}, check=False)
        return self._inverse

    def restrict(self, vertices: Sequence[str]) -> "GroupElement":
        return GroupElement(self.field, {v: self.blocks[v] for v in vertices}, check=False)

    def key(self) -> Tuple:
        return tuple((v, self.blocks[v].key()) for v in self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"GroupElement({ {v: b.entries() for v, b in self.blocks.items()} })"


def topological_order(quiver: Quiver) -> Tuple[str, ...]:
    """Vertices ordered so that every arrow points forward; ties broken by vertex id."""
    return quiver.topological_order


def enumerate_paths(quiver: Quiver, i: str, j: str) -> Tuple[Path, ...]:
    """
    All paths from ``i`` to ``j`` ordered by (length, arrow ids).

    Examples:
        >>> [str(p) for p in enumerate_paths(Quiver.linear(3), "1", "3")]
        ['a1.a2']
    """
    return quiver.paths(i, j)


def euler_form(quiver: Quiver, a: VertexVector, b: VertexVector) -> int:
    """<a, b> = sum_i a_i b_i - sum over arrows of a_{s(arrow)} b_{t(arrow)}."""
    return sum(a[v] * b[v] for v in quiver.vertices) - sum(a[x.src] * b[x.dst] for x in quiver.arrows)


def theta_value(theta: StabilityParam, dim: VertexVector) -> int:
    return sum(theta[v] * dim[v] for v in theta)


def theta_split(theta: StabilityParam) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """
    Return (Q0+, Q0-). Vertices with theta_i = 0 belong to both sets.
    """
    plus = frozenset(v for v in theta if theta[v] >= 0)
    minus = frozenset(v for v in theta if theta[v] <= 0)
    return plus, minus


def restricted_dim(alpha: DimVector, vertices) -> DimVector:
    """alpha on ``vertices`` and zero elsewhere (alpha+ and alpha-)."""
    chosen = set(vertices)
    return DimVector(alpha.vertices, [alpha[v] if v in chosen else 0 for v in alpha.vertices])


def character_value(theta: StabilityParam, g: GroupElement):
    """
    chi_theta(g) = product over vertices of det(g_i)^(-theta_i).

    Raises:
        SingularMatrix: If some block of ``g`` has zero determinant
    """
    field = g.field
    value = field.one
    for vertex in theta:
        det = determinant(g[vertex])
        if det == 0:
            raise SingularMatrix(f"Block at {vertex} is singular")
        value = field.element(value * field.power(det, -theta[vertex]))
    return value
