"""
Exact scalar arithmetic and dense matrix algebra.

Two kinds of fields are supported: prime fields F_p with p <= 251 and the
rationals Q. Matrices over F_p are stored as numpy int64 residues and reduced
after every operation; matrices over Q are numpy object arrays holding
``fractions.Fraction`` values. Matrix values are immutable.

Subspaces of k^n are represented canonically by the reduced row echelon form
of a matrix whose rows span them, so two subspaces are equal exactly when
their canonical matrices are equal.
"""

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator, List, Optional, Sequence, Tuple

import numpy as np

MAX_PRIME = 251


class FieldMatrixError(Exception):
    """Custom exception for exact linear algebra errors."""
    pass


class DimensionMismatch(FieldMatrixError):
    """Raised when matrix shapes do not fit together."""
    pass


class SingularMatrix(FieldMatrixError):
    """Raised when an invertible matrix or non-zero scalar was required."""
    pass


class InfiniteField(FieldMatrixError):
    """Raised when exhaustive enumeration is requested over the rationals."""
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class FieldSpec:
    """
    An exact computable field: F_p for a small prime p, or Q when ``p`` is None.

    Examples:
        >>> FieldSpec.parse("F3").name
        'F3'
        >>> FieldSpec.parse("Q").is_finite
        False
    """

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and (not is_prime(self.p) or self.p > MAX_PRIME):
            raise FieldMatrixError(f"Unsupported field characteristic {self.p}: need a prime p <= {MAX_PRIME}")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """
        Parse a field name such as ``F2``, ``F_5`` or ``Q``.

        Raises:
            FieldMatrixError: If the name is not understood or p is not an allowed prime
        """
        cleaned = text.strip()
        if cleaned.upper() in ("Q", "QQ"):
            return cls(None)
        match = re.fullmatch(r"[Ff]_?(\d+)", cleaned)
        if not match:
            raise FieldMatrixError(f"Unknown field {text!r}: expected F<p> or Q")
        return cls(int(match.group(1)))

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.is_finite else "Q"

    @property
    def dtype(self):
        return np.int64 if self.is_finite else object

    @property
    def size(self) -> int:
        if not self.is_finite:
            raise InfiniteField("The rationals have no finite size")
        return self.p

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def elements(self) -> Tuple[int, ...]:
        """All field elements in increasing residue order (finite fields only)."""
        if not self.is_finite:
            raise InfiniteField("Cannot enumerate the elements of Q")
        return tuple(range(self.p))

    def element(self, value: Any):
        """Coerce an int, Fraction, numpy integer or ``"n/d"`` string into the field."""
        if isinstance(value, str):
            value = Fraction(value.strip())
        if not self.is_finite:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise FieldMatrixError(f"{value} has no image in {self.name}")
            return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
        return int(value) % self.p

    def reduce(self, array: np.ndarray) -> np.ndarray:
        return array % self.p if self.is_finite else array

    def inverse(self, value):
        if value == 0:
            raise SingularMatrix(f"Zero has no inverse in {self.name}")
        if self.is_finite:
            return pow(int(value), -1, self.p)
        return 1 / Fraction(value)

    def power(self, value, exponent: int):
        if exponent < 0:
            value, exponent = self.inverse(value), -exponent
        if self.is_finite:
            return pow(int(value), exponent, self.p)
        return Fraction(value) ** exponent

    def normalize(self, array: np.ndarray) -> np.ndarray:
        out = np.empty(array.shape, dtype=self.dtype)
        for index, value in np.ndenumerate(array):
            out[index] = self.element(value)
        return out

    def __str__(self) -> str:
        return self.name


class Matrix:
    """Immutable dense matrix over a FieldSpec. 0 x n and n x 0 matrices are allowed."""

    __slots__ = ("field", "_data", "_key")

    def __init__(self, field: FieldSpec, rows: Any, shape: Optional[Tuple[int, int]] = None):
        array = np.asarray(rows, dtype=object)
        if shape is not None:
            array = array.reshape(shape)
        if array.ndim != 2:
            raise DimensionMismatch(f"Matrix data must be two-dimensional, got shape {array.shape}")
        self.field = field
        self._data = field.normalize(array)
        self._data.setflags(write=False)
        self._key = None

    @classmethod
    def _wrap(cls, field: FieldSpec, array: np.ndarray) -> "Matrix":
        matrix = object.__new__(cls)
        matrix.field = field
        if not field.is_finite:
            array = _as_fractions(array)
        matrix._data = np.ascontiguousarray(array)
        matrix._data.setflags(write=False)
        matrix._key = None
        return matrix

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def T(self) -> "Matrix":
        return transpose(self)

    def __getitem__(self, index):
        return self._data[index]

    def entries(self) -> List[List[Any]]:
        return self._data.tolist()

    def key(self) -> Tuple:
        if self._key is None:
            self._key = (self.field.p or 0, self.shape, tuple(self._data.ravel().tolist()))
        return self._key

    def is_zero(self) -> bool:
        return not np.any(self._data)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.field == other.field and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def __add__(self, other: "Matrix") -> "Matrix":
        return add(self, other)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return add(self, neg(other))

    def __neg__(self) -> "Matrix":
        return neg(self)

    def __repr__(self) -> str:
        return f"Matrix({self.field.name}, {self.entries()})"


_to_fraction = np.frompyfunc(Fraction, 1, 1)


def _as_fractions(array: np.ndarray) -> np.ndarray:
    if array.size == 0:
        return np.empty(array.shape, dtype=object)
    return np.asarray(_to_fraction(array), dtype=object)


def _same_field(*matrices: Matrix) -> FieldSpec:
    field = matrices[0].field
    for matrix in matrices[1:]:
        if matrix.field != field:
            raise FieldMatrixError(f"Field mismatch: {field.name} vs {matrix.field.name}")
    return field


def identity(field: FieldSpec, n: int) -> Matrix:
    return Matrix._wrap(field, np.eye(n, dtype=np.int64).astype(field.dtype))


def zeros(field: FieldSpec, rows: int, cols: int) -> Matrix:
    return Matrix._wrap(field, np.zeros((rows, cols), dtype=np.int64).astype(field.dtype))


def transpose(m: Matrix) -> Matrix:
    return Matrix._wrap(m.field, m.data.T.copy())


def matmul(a: Matrix, b: Matrix) -> Matrix:
    field = _same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"Cannot multiply {a.shape} by {b.shape}")
    if a.cols == 0:
        return zeros(field, a.rows, b.cols)
    return Matrix._wrap(field, field.reduce(a.data @ b.data))


def add(a: Matrix, b: Matrix) -> Matrix:
    field = _same_field(a, b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot add {a.shape} and {b.shape}")
    return Matrix._wrap(field, field.reduce(a.data + b.data))


def neg(m: Matrix) -> Matrix:
    return Matrix._wrap(m.field, m.field.reduce(-m.data))


def scale(m: Matrix, scalar) -> Matrix:
    scalar = m.field.element(scalar)
    return Matrix._wrap(m.field, m.field.reduce(m.data * scalar))


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; block (i, j) of the result is a[i, j] * b."""
    field = _same_field(a, b)
    outer = np.multiply.outer(a.data, b.data).transpose(0, 2, 1, 3)
    shape = (a.rows * b.rows, a.cols * b.cols)
    return Matrix._wrap(field, field.reduce(outer.reshape(shape)))


def block_assemble(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    """
    Assemble a matrix from a rectangular grid of blocks.

    Every block in a grid row must have the same number of rows and every block
    in a grid column the same number of columns.

    Raises:
        DimensionMismatch: If the partitions are inconsistent
        FieldMatrixError: If the grid is empty
    """
    if not grid or not grid[0]:
        raise FieldMatrixError("block_assemble needs at least one block")
    width = len(grid[0])
    if any(len(row) != width for row in grid):
        raise DimensionMismatch("Block grid rows have different lengths")
    field = _same_field(*[block for row in grid for block in row])
    heights = [row[0].rows for row in grid]
    widths = [block.cols for block in grid[0]]
    for r, row in enumerate(grid):
        for c, block in enumerate(row):
            if block.shape != (heights[r], widths[c]):
                raise DimensionMismatch(
                    f"Block ({r}, {c}) has shape {block.shape}, expected {(heights[r], widths[c])}"
                )
    out = np.zeros((sum(heights), sum(widths)), dtype=np.int64).astype(field.dtype)
    top = 0
    for r, row in enumerate(grid):
        left = 0
        for c, block in enumerate(row):
            out[top:top + heights[r], left:left + widths[c]] = block.data
            left += widths[c]
        top += heights[r]
    return Matrix._wrap(field, out)


def block_diagonal(field: FieldSpec, blocks: Sequence[Matrix]) -> Matrix:
    """Square blocks along the diagonal, zeros elsewhere."""
    size = sum(b.rows for b in blocks)
    width = sum(b.cols for b in blocks)
    out = np.zeros((size, width), dtype=np.int64).astype(field.dtype)
    top = left = 0
    for block in blocks:
        out[top:top + block.rows, left:left + block.cols] = block.data
        top += block.rows
        left += block.cols
    return Matrix._wrap(field, out)


def vstack(field: FieldSpec, blocks: Sequence[Matrix], cols: int) -> Matrix:
    blocks = [b for b in blocks if b.rows]
    if not blocks:
        return zeros(field, 0, cols)
    return block_assemble([[b] for b in blocks])


def hstack(field: FieldSpec, blocks: Sequence[Matrix], rows: int) -> Matrix:
    blocks = [b for b in blocks if b.cols]
    if not blocks:
        return zeros(field, rows, 0)
    return block_assemble([blocks])


def _eliminate(field: FieldSpec, array: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    array = array.copy()
    num_rows, num_cols = array.shape
    pivots = []
    row = 0
    for col in range(num_cols):
        if row >= num_rows:
            break
        nonzero = np.nonzero(array[row:, col])[0]
        if len(nonzero) == 0:
            continue
        pivot_row = row + int(nonzero[0])
        if pivot_row != row:
            array[[row, pivot_row]] = array[[pivot_row, row]]
        array[row] = field.reduce(array[row] * field.inverse(array[row, col]))
        for r in range(num_rows):
            if r != row and array[r, col] != 0:
                array[r] = field.reduce(array[r] - array[r, col] * array[row])
        pivots.append(col)
        row += 1
    return array, tuple(pivots)


def rref(m: Matrix) -> Tuple[Matrix, Tuple[int, ...], int]:
    """
    Reduced row echelon form.

    Returns:
        Tuple of (rref matrix, pivot column indices, rank)

    Examples:
        >>> F2 = FieldSpec(2)
        >>> rref(Matrix(F2, [[1, 1], [1, 1]]))[2]
        1
    """
    reduced, pivots = _eliminate(m.field, m.data)
    return Matrix._wrap(m.field, reduced), pivots, len(pivots)


def rank(m: Matrix) -> int:
    return len(_eliminate(m.field, m.data)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """
    Basis of the null space of ``m`` as the columns of a cols x nullity matrix.

    Column k has a 1 in the k-th free (non-pivot) column position and is zero
    in the other free positions.
    """
    field = m.field
    reduced, pivots = _eliminate(field, m.data)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = np.zeros((m.cols, len(free)), dtype=np.int64).astype(field.dtype)
    for k, f in enumerate(free):
        basis[f, k] = field.one
        for r, p in enumerate(pivots):
            basis[p, k] = -reduced[r, f]
    return Matrix._wrap(field, field.reduce(basis))


def row_space(m: Matrix) -> Matrix:
    """Canonical basis (the non-zero rows of the rref) of the span of the rows of ``m``."""
    reduced, pivots = _eliminate(m.field, m.data)
    return Matrix._wrap(m.field, reduced[:len(pivots)].copy())


def column_space(m: Matrix) -> Matrix:
    """Canonical row basis of the span of the columns of ``m``."""
    return row_space(transpose(m))


def image_basis(m: Matrix) -> Matrix:
    """Columns forming a canonical basis of the image of ``m`` (rows x rank)."""
    return transpose(column_space(m))


def is_invertible(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def invert(m: Matrix) -> Matrix:
    """
    Inverse of a square matrix.

    Raises:
        DimensionMismatch: If ``m`` is not square
        SingularMatrix: If ``m`` is not invertible
    """
    if m.rows != m.cols:
        raise DimensionMismatch(f"Only square matrices can be inverted, got {m.shape}")
    n = m.rows
    augmented = hstack(m.field, [m, identity(m.field, n)], n)
    reduced, pivots = _eliminate(m.field, augmented.data)
    if pivots[:n] != tuple(range(n)):
        raise SingularMatrix(f"Matrix is singular: {m.entries()}")
    return Matrix._wrap(m.field, reduced[:, n:].copy())


def determinant(m: Matrix):
    if m.rows != m.cols:
        raise DimensionMismatch(f"Determinant needs a square matrix, got {m.shape}")
    field = m.field
    array = m.data.copy()
    n = m.rows
    det = field.one
    for col in range(n):
        nonzero = np.nonzero(array[col:, col])[0]
        if len(nonzero) == 0:
            return field.zero
        pivot_row = col + int(nonzero[0])
        if pivot_row != col:
            array[[col, pivot_row]] = array[[pivot_row, col]]
            det = field.element(-det)
        pivot = array[col, col]
        det = field.element(det * pivot)
        inverse = field.inverse(pivot)
        for r in range(col + 1, n):
            if array[r, col] != 0:
                factor = field.element(array[r, col] * inverse)
                array[r] = field.reduce(array[r] - factor * array[col])
    return det


@lru_cache(maxsize=65536)
def annihilator(space: Matrix) -> Matrix:
    """Columns spanning the vectors orthogonal to every row of ``space``."""
    return kernel_basis(space)


def contains(space: Matrix, vectors: Matrix) -> bool:
    """True iff every row of ``vectors`` lies in the row span of ``space``."""
    if vectors.rows == 0:
        return True
    if space.cols != vectors.cols:
        raise DimensionMismatch(f"Ambient dimensions differ: {space.cols} vs {vectors.cols}")
    return matmul(vectors, annihilator(space)).is_zero()


def subspace_sum(a: Matrix, b: Matrix) -> Matrix:
    return row_space(vstack(a.field, [a, b], a.cols))


def intersection_dim(a: Matrix, b: Matrix) -> int:
    return rank(a) + rank(b) - rank(vstack(a.field, [a, b], a.cols))


def image_of_subspace(t: Matrix, space: Matrix) -> Matrix:
    """Canonical row basis of t(U) where U is the row span of ``space``."""
    return row_space(matmul(space, transpose(t)))


def preimage(t: Matrix, space: Matrix) -> Matrix:
    """Canonical row basis of {x : t x in U} where U is the row span of ``space``."""
    if t.rows != space.cols:
        raise DimensionMismatch(f"Map with {t.rows} rows cannot land in a space of dimension {space.cols}")
    constraints = matmul(transpose(annihilator(row_space(space))), t)
    return column_space(kernel_basis(constraints))


def standard_subspace(field: FieldSpec, n: int, coordinates: Sequence[int]) -> Matrix:
    """Span of the given standard basis vectors of k^n, canonically ordered."""
    rows = np.zeros((len(coordinates), n), dtype=np.int64)
    for r, c in enumerate(sorted(coordinates)):
        rows[r, c] = 1
    return Matrix._wrap(field, rows.astype(field.dtype))


def enumerate_matrices(field: FieldSpec, rows: int, cols: int) -> Iterator[Matrix]:
    """All rows x cols matrices over a finite field, lexicographic in row-major entries."""
    elements = field.elements()
    for values in itertools.product(elements, repeat=rows * cols):
        yield Matrix._wrap(field, np.array(values, dtype=np.int64).reshape(rows, cols))


def random_matrix(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> Matrix:
    if field.is_finite:
        return Matrix._wrap(field, rng.integers(0, field.p, size=(rows, cols), dtype=np.int64))
    return Matrix(field, rng.integers(-2, 3, size=(rows, cols)).tolist() if rows else [], shape=(rows, cols))


def to_json(m: Matrix) -> List[List[Any]]:
    """Nested lists of residues (F_p) or of ints / ``"n/d"`` strings (Q)."""
    if m.field.is_finite:
        return m.entries()
    return [[v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}" for v in row]
            for row in m.entries()]


def from_json(field: FieldSpec, data: Any, rows: int, cols: int) -> Matrix:
    """
    Read a matrix written by ``to_json``; the shape is passed explicitly so
    that empty matrices round-trip.

    Raises:
        DimensionMismatch: If the data does not have the expected shape
    """
    array = np.asarray(data, dtype=object)
    if rows == 0 or cols == 0:
        if array.size != 0:
            raise DimensionMismatch(f"Expected an empty {rows}x{cols} matrix")
        return zeros(field, rows, cols)
    if array.shape != (rows, cols):
        raise DimensionMismatch(f"Expected a {rows}x{cols} matrix, got shape {array.shape}")
    return Matrix(field, array)
