"""
Framed quivers, framed representations and their stability parameters.

Four framings of a base quiver Q are supported:

- Q^beta: a new vertex "0" with beta_i arrows 0 -> i, carrying (M, A);
- Q_beta: a new vertex "∞" with beta_i arrows i -> ∞, carrying (M, B);
- Q^tri: a copy "i+" of every vertex with one arrow i+ -> i, carrying (M, A);
- Q_tri: a copy "i-" of every vertex with one arrow i -> i-, carrying (M, B).

A FramedRep keeps A (or B) as one matrix per base vertex; embed/split
translate between that form and an honest representation of the framed
quiver, on which stability is tested with the usual subrepresentation oracle.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

try:
    from .field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        annihilator,
        column_space,
        enumerate_matrices,
        identity,
        image_of_subspace,
        is_invertible,
        kernel_basis,
        matmul,
        preimage,
        row_space,
        transpose,
        vstack,
    )
    from .harness import Budget, VerificationReport, resolve_budget
    from .quiver_core import (
        Arrow,
        DimVector,
        GroupElement,
        Quiver,
        StabilityParam,
        restricted_dim,
        theta_split,
        theta_value,
    )
    from .representation import Representation, framed_phi, framed_psi
    from .stability import StabilityVerdict, check_stability, count_reps, enumerate_reps
except ImportError:
    from field_matrix import (
        DimensionMismatch,
        FieldSpec,
        Matrix,
        annihilator,
        column_space,
        enumerate_matrices,
        identity,
        image_of_subspace,
        is_invertible,
        kernel_basis,
        matmul,
        preimage,
        row_space,
        transpose,
        vstack,
    )
    from harness import Budget, VerificationReport, resolve_budget
    from quiver_core import (
        Arrow,
        DimVector,
        GroupElement,
        Quiver,
        StabilityParam,
        restricted_dim,
        theta_split,
        theta_value,
    )
    from representation import Representation, framed_phi, framed_psi
    from stability import StabilityVerdict, check_stability, count_reps, enumerate_reps

logger = logging.getLogger(__name__)

SOURCE_VERTEX = "0"
SINK_VERTEX = "∞"


class FramingError(Exception):
    """Custom exception for framed quiver errors."""
    pass


class ThetaAlphaNonzero(FramingError):
    """Raised when a framed parameter is requested for theta with theta(alpha) != 0."""
    pass


class FramingKind(Enum):
    Q_BETA_SOURCE = "Q^beta"
    Q_BETA_SINK = "Q_beta"
    Q_TRI_SOURCE = "Q^tri"
    Q_TRI_SINK = "Q_tri"

    @property
    def side(self) -> str:
        """'A' when the framing maps into M, 'B' when it maps out of M."""
        return "A" if self in (FramingKind.Q_BETA_SOURCE, FramingKind.Q_TRI_SOURCE) else "B"


@dataclass(frozen=True)
class FramedQuiver:
    kind: FramingKind
    base: Quiver
    beta: DimVector
    quiver: Quiver
    framing_arrows: Tuple[Tuple[str, Tuple[str, ...]], ...]

    def arrows_at(self, vertex: str) -> Tuple[str, ...]:
        """Ids of the framing arrows attached to base vertex ``vertex``."""
        return dict(self.framing_arrows)[vertex]

    def copy_vertex(self, vertex: str) -> str:
        return f"{vertex}+" if self.kind is FramingKind.Q_TRI_SOURCE else f"{vertex}-"


def build_framed(quiver: Quiver, beta: DimVector, kind: FramingKind) -> FramedQuiver:
    """
    Build one of the four framed quivers of ``quiver``.

    Raises:
        FramingError: If a framing vertex name is already taken
    """
    base = list(quiver.vertices)
    arrows = list(quiver.arrows)
    attached: Dict[str, Tuple[str, ...]] = {}
    if kind is FramingKind.Q_BETA_SOURCE:
        extra = [SOURCE_VERTEX]
        vertices = extra + base
        for i in base:
            new = [Arrow(f"{SOURCE_VERTEX}>{i}#{k}", SOURCE_VERTEX, i) for k in range(beta[i])]
            arrows.extend(new)
            attached[i] = tuple(a.id for a in new)
    elif kind is FramingKind.Q_BETA_SINK:
        extra = [SINK_VERTEX]
        vertices = base + extra
        for i in base:
            new = [Arrow(f"{i}>{SINK_VERTEX}#{k}", i, SINK_VERTEX) for k in range(beta[i])]
            arrows.extend(new)
            attached[i] = tuple(a.id for a in new)
    elif kind is FramingKind.Q_TRI_SOURCE:
        extra = [f"{i}+" for i in base]
        vertices = extra + base
        for i in base:
            arrows.append(Arrow(f"{i}+>{i}", f"{i}+", i))
            attached[i] = (f"{i}+>{i}",)
    else:
        extra = [f"{i}-" for i in base]
        vertices = base + extra
        for i in base:
            arrows.append(Arrow(f"{i}>{i}-", i, f"{i}-"))
            attached[i] = (f"{i}>{i}-",)
    clash = set(extra) & set(base)
    if clash:
        raise FramingError(f"Framing vertex names {sorted(clash)} clash with base vertices")
    return FramedQuiver(kind, quiver, beta, Quiver(vertices, arrows), tuple(attached.items()))


def framed_dim(fq: FramedQuiver, alpha: DimVector) -> DimVector:
    """(1, alpha), (alpha, 1), (beta, alpha) or (alpha, beta) on the framed quiver."""
    values = dict(alpha.to_dict())
    if fq.kind is FramingKind.Q_BETA_SOURCE:
        values[SOURCE_VERTEX] = 1
    elif fq.kind is FramingKind.Q_BETA_SINK:
        values[SINK_VERTEX] = 1
    else:
        for i in fq.base.vertices:
            values[fq.copy_vertex(i)] = fq.beta[i]
    return DimVector(fq.quiver.vertices, values)


class FramedRep:
    """
    A representation M together with framing matrices.

    Side "A": A_i has shape alpha_i x beta_i (a map E_i -> V_i).
    Side "B": B_i has shape beta_i x alpha_i (a map V_i -> E_i).

    Raises:
        DimensionMismatch: If a framing block does not match dim M
    """

    def __init__(self, rep: Representation, framing: Mapping[str, Matrix], side: str = "A"):
        if side not in ("A", "B"):
            raise FramingError(f"Framing side must be 'A' or 'B', got {side!r}")
        self.rep = rep
        self.side = side
        self.framing: Dict[str, Matrix] = {}
        for v in rep.quiver.vertices:
            if v not in framing:
                raise DimensionMismatch(f"Framing matrix missing at vertex {v}")
            block = framing[v]
            inner = block.rows if side == "A" else block.cols
            if inner != rep.dim[v]:
                raise DimensionMismatch(f"Framing at {v} has shape {block.shape}, dimension there is {rep.dim[v]}")
            self.framing[v] = block

    @property
    def beta(self) -> DimVector:
        return DimVector(self.rep.quiver.vertices,
                         [self.framing[v].cols if self.side == "A" else self.framing[v].rows
                          for v in self.rep.quiver.vertices])

    def act(self, h: GroupElement, g: GroupElement) -> "FramedRep":
        """(h, g).(M, A) = (g.M, g A h^-1) and (g, h).(M, B) = (g.M, h B g^-1)."""
        moved = self.rep.act(g)
        if self.side == "A":
            framing = {v: matmul(matmul(g[v], self.framing[v]), h.inverse()[v]) for v in self.framing}
        else:
            framing = {v: matmul(matmul(h[v], self.framing[v]), g.inverse()[v]) for v in self.framing}
        return FramedRep(moved, framing, self.side)

    def key(self) -> Tuple:
        return (self.side, self.rep.key(), tuple(self.framing[v].key() for v in self.rep.quiver.vertices))

    def __eq__(self, other) -> bool:
        return isinstance(other, FramedRep) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_dict(self) -> Dict:
        return {"rep": self.rep.to_dict(), "side": self.side,
                "framing": {v: m.entries() for v, m in self.framing.items()}}


def embed(fr: FramedRep, fq: FramedQuiver) -> Representation:
    """
    View (M, A) or (M, B) as a representation of the framed quiver.

    On Q^beta the i-th framing arrow block carries column k of A_i; on Q_beta
    it carries row k of B_i. On the copy-vertex framings the whole matrix sits
    on the connecting arrow.

    Raises:
        FramingError: If the framing side does not fit the quiver kind
        DimensionMismatch: If the framing does not match beta
    """
    if fr.side != fq.kind.side:
        raise FramingError(f"A side-{fr.side} framed representation cannot live on {fq.kind.value}")
    if fr.beta != fq.beta:
        raise DimensionMismatch(f"Framing dimension {fr.beta.to_dict()} does not match {fq.beta.to_dict()}")
    field = fr.rep.field
    maps = dict(fr.rep.maps)
    for i in fq.base.vertices:
        block = fr.framing[i]
        ids = fq.arrows_at(i)
        if fq.kind is FramingKind.Q_BETA_SOURCE:
            for k, arrow_id in enumerate(ids):
                maps[arrow_id] = Matrix._wrap(field, block.data[:, k:k + 1].copy())
        elif fq.kind is FramingKind.Q_BETA_SINK:
            for k, arrow_id in enumerate(ids):
                maps[arrow_id] = Matrix._wrap(field, block.data[k:k + 1, :].copy())
        else:
            maps[ids[0]] = block
    return Representation(fq.quiver, field, framed_dim(fq, fr.rep.dim), maps)


def split(rep: Representation, fq: FramedQuiver) -> FramedRep:
    """Inverse of ``embed``."""
    base = fq.base
    alpha = DimVector(base.vertices, [rep.dim[v] for v in base.vertices])
    inner = Representation(base, rep.field, alpha, {a.id: rep.map(a.id) for a in base.arrows})
    framing = {}
    for i in base.vertices:
        ids = fq.arrows_at(i)
        if fq.kind is FramingKind.Q_BETA_SOURCE:
            framing[i] = _join(rep.field, [rep.map(a) for a in ids], alpha[i], by_columns=True)
        elif fq.kind is FramingKind.Q_BETA_SINK:
            framing[i] = _join(rep.field, [rep.map(a) for a in ids], alpha[i], by_columns=False)
        else:
            framing[i] = rep.map(ids[0])
    return FramedRep(inner, framing, fq.kind.side)


def _join(field: FieldSpec, blocks: Sequence[Matrix], size: int, by_columns: bool) -> Matrix:
    if not blocks:
        shape = (size, 0) if by_columns else (0, size)
        return Matrix._wrap(field, np.zeros(shape, dtype=np.int64).astype(field.dtype))
    if by_columns:
        return transpose(vstack(field, [transpose(b) for b in blocks], size))
    return vstack(field, list(blocks), size)


def _require_balanced(theta: StabilityParam, alpha: DimVector) -> None:
    if theta_value(theta, alpha) != 0:
        raise ThetaAlphaNonzero(f"theta(alpha) = {theta_value(theta, alpha)}, expected 0")


def framed_param_c(fq: FramedQuiver, alpha: DimVector) -> StabilityParam:
    """
    c^alpha = (|alpha| at 0, -1 elsewhere) on Q^beta and
    c_alpha = (1 on Q, -|alpha| at ∞) on Q_beta.

    Raises:
        FramingError: For the copy-vertex framings
    """
    norm = alpha.norm()
    if fq.kind is FramingKind.Q_BETA_SOURCE:
        values = {v: -1 for v in fq.base.vertices}
        values[SOURCE_VERTEX] = norm
    elif fq.kind is FramingKind.Q_BETA_SINK:
        values = {v: 1 for v in fq.base.vertices}
        values[SINK_VERTEX] = -norm
    else:
        raise FramingError(f"c-parameters exist on Q^beta and Q_beta only, not on {fq.kind.value}")
    return StabilityParam(fq.quiver.vertices, values)


def framed_param_theta(theta: StabilityParam, alpha: DimVector, sign: str, n: int) -> StabilityParam:
    """
    theta+ on Q^tri (sign "+") or theta- on Q_tri (sign "-").

    theta+ is N at the copies of Q0+ and 0 at the other copies; at an original
    vertex it is theta_i - N on Q0+ and theta_i elsewhere. theta- is dual:
    N + theta_i at originals in Q0-, -N at the copies of Q0-.

    Raises:
        ThetaAlphaNonzero: If theta(alpha) != 0
    """
    _require_balanced(theta, alpha)
    plus, minus = theta_split(theta)
    base = list(theta.vertices)
    if sign == "+":
        copies = {f"{i}+": (n if i in plus else 0) for i in base}
        originals = {i: (theta[i] - n if i in plus else theta[i]) for i in base}
        return StabilityParam([f"{i}+" for i in base] + base, {**copies, **originals})
    if sign == "-":
        originals = {i: (n + theta[i] if i in minus else theta[i]) for i in base}
        copies = {f"{i}-": (-n if i in minus else 0) for i in base}
        return StabilityParam(base + [f"{i}-" for i in base], {**originals, **copies})
    raise FramingError(f"Sign must be '+' or '-', got {sign!r}")


def framed_param_eta(theta: StabilityParam, alpha: DimVector, sign: str, n: int) -> StabilityParam:
    """
    eta+ on Q^{alpha+}: N|alpha+| at 0, theta_i - N on Q0+, theta_i elsewhere.
    eta- on Q_{alpha-}: theta_i + N on Q0-, theta_i elsewhere, -N|alpha-| at ∞.

    Raises:
        ThetaAlphaNonzero: If theta(alpha) != 0
    """
    _require_balanced(theta, alpha)
    plus, minus = theta_split(theta)
    base = list(theta.vertices)
    if sign == "+":
        values = {i: (theta[i] - n if i in plus else theta[i]) for i in base}
        values[SOURCE_VERTEX] = n * restricted_dim(alpha, plus).norm()
        return StabilityParam([SOURCE_VERTEX] + base, values)
    if sign == "-":
        values = {i: (theta[i] + n if i in minus else theta[i]) for i in base}
        values[SINK_VERTEX] = -n * restricted_dim(alpha, minus).norm()
        return StabilityParam(base + [SINK_VERTEX], values)
    raise FramingError(f"Sign must be '+' or '-', got {sign!r}")


def default_N(theta: StabilityParam, alpha: DimVector) -> int:
    """1 + sum |theta_i| alpha_i, which exceeds |theta(alpha')| for every alpha' <= alpha."""
    return 1 + sum(abs(theta[v]) * alpha[v] for v in alpha.vertices)


def enumerate_framed(quiver: Quiver, alpha: DimVector, beta: DimVector, side: str, field: FieldSpec,
                     budget: Optional[Budget] = None) -> Iterator[FramedRep]:
    """
    All framed representations (M, A) or (M, B) with dim M = alpha and framing dimension beta.

    Raises:
        BudgetExceeded: If the point count exceeds the budget
    """
    budget = resolve_budget(budget)
    framing_entries = sum(alpha[v] * beta[v] for v in quiver.vertices)
    budget.ensure(count_reps(quiver, alpha, field) * field.size ** framing_entries,
                  f"framed representations with alpha={alpha.to_dict()}, beta={beta.to_dict()}")
    vertices = list(quiver.vertices)
    shapes = [(alpha[v], beta[v]) if side == "A" else (beta[v], alpha[v]) for v in vertices]
    framings = [list(enumerate_matrices(field, r, c)) for r, c in shapes]
    reps = list(enumerate_reps(quiver, alpha, field, budget))
    for rep in reps:
        for blocks in itertools.product(*framings):
            yield FramedRep(rep, dict(zip(vertices, blocks)), side)


def framed_stability(fr: FramedRep, fq: FramedQuiver, param: StabilityParam,
                     budget: Optional[Budget] = None) -> StabilityVerdict:
    return check_stability(embed(fr, fq), param, budget)


def generated_subrep(rep: Representation, a: Mapping[str, Matrix]) -> Dict[str, Matrix]:
    """The smallest subrepresentation of M containing every im A_i, as row bases."""
    spaces: Dict[str, Matrix] = {}
    for j in rep.quiver.topological_order:
        parts = [column_space(a[j])]
        for arrow in rep.quiver.arrows_to(j):
            parts.append(image_of_subspace(rep.map(arrow.id), spaces[arrow.src]))
        spaces[j] = row_space(vstack(rep.field, parts, rep.dim[j]))
    return spaces


def _intersection(field: FieldSpec, size: int, spaces: Sequence[Matrix]) -> Matrix:
    constraints = [transpose(annihilator(row_space(s))) for s in spaces]
    if not constraints:
        return identity(field, size)
    return column_space(kernel_basis(vstack(field, constraints, size)))


def largest_subrep_in_kernel(rep: Representation, b: Mapping[str, Matrix]) -> Dict[str, Matrix]:
    """The largest subrepresentation of M inside every ker B_i, as row bases."""
    spaces: Dict[str, Matrix] = {}
    for i in reversed(rep.quiver.topological_order):
        parts = [column_space(kernel_basis(b[i]))]
        for arrow in rep.quiver.arrows_from(i):
            parts.append(preimage(rep.map(arrow.id), spaces[arrow.dst]))
        spaces[i] = _intersection(rep.field, rep.dim[i], parts)
    return spaces


def verify_engel_reineke(quiver: Quiver, alpha: DimVector, beta: DimVector, field: FieldSpec,
                         budget: Optional[Budget] = None) -> VerificationReport:
    """
    On every framed point, four conditions agree.

    For (M, A) on Q^beta with c^alpha: semistable, stable, "no proper
    subrepresentation contains every im A_i" and "phi_{M,A} surjective". For
    (M, B) on Q_beta with c_alpha: semistable, stable, "no non-zero
    subrepresentation lies in every ker B_i" and "psi_{M,B} injective".
    """
    report = VerificationReport("engel-reineke")
    counts = {"A": 0, "B": 0}
    for kind in (FramingKind.Q_BETA_SOURCE, FramingKind.Q_BETA_SINK):
        fq = build_framed(quiver, beta, kind)
        param = framed_param_c(fq, alpha)
        side = kind.side
        logger.debug("Framed points on %s with c = %s", kind.value, param.to_dict())
        for fr in enumerate_framed(quiver, alpha, beta, side, field, budget):
            verdict = framed_stability(fr, fq, param, budget)
            if side == "A":
                spaces = generated_subrep(fr.rep, fr.framing)
                structural = all(spaces[v].rows == alpha[v] for v in quiver.vertices)
                _, hom = framed_phi(fr.rep, fr.framing)
                mapped = hom.is_surjective()
            else:
                spaces = largest_subrep_in_kernel(fr.rep, fr.framing)
                structural = all(spaces[v].rows == 0 for v in quiver.vertices)
                _, hom = framed_psi(fr.rep, fr.framing)
                mapped = hom.is_injective()
            conditions = (verdict.is_semistable, verdict.is_stable, structural, mapped)
            counts[side] += conditions[0]
            report.record(len(set(conditions)) == 1, side=side, point=fr.to_dict(),
                          conditions=dict(zip(("semistable", "stable", "structural", "degree_zero"), conditions)))
    report.details = {"alpha": alpha.to_dict(), "beta": beta.to_dict(), "semistable_A": counts["A"],
                      "semistable_B": counts["B"]}
    return report


def framing_invertible(fr: FramedRep, vertices) -> bool:
    return all(is_invertible(fr.framing[v]) for v in vertices)


def verify_theta_pm(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                    budget: Optional[Budget] = None, n: Optional[int] = None) -> VerificationReport:
    """
    (M, A) on Q^tri is theta+-(semi)stable iff M is theta-(semi)stable and A_i
    is invertible on Q0+; dually for (M, B) on Q_tri, theta- and Q0-.

    Raises:
        ThetaAlphaNonzero: If theta(alpha) != 0
    """
    _require_balanced(theta, alpha)
    n = default_N(theta, alpha) if n is None else n
    plus, minus = theta_split(theta)
    report = VerificationReport("theta-pm")
    base_verdicts: Dict[Tuple, StabilityVerdict] = {}
    for sign, kind, chosen in (("+", FramingKind.Q_TRI_SOURCE, plus), ("-", FramingKind.Q_TRI_SINK, minus)):
        beta = restricted_dim(alpha, chosen)
        fq = build_framed(quiver, beta, kind)
        param = framed_param_theta(theta, alpha, sign, n)
        logger.debug("theta%s sweep on %s with N = %d", sign, kind.value, n)
        for fr in enumerate_framed(quiver, alpha, beta, kind.side, field, budget):
            key = fr.rep.key()
            if key not in base_verdicts:
                base_verdicts[key] = check_stability(fr.rep, theta, budget)
            base = base_verdicts[key]
            invertible = framing_invertible(fr, [v for v in quiver.vertices if v in chosen])
            framed = framed_stability(fr, fq, param, budget)
            ok = (framed.is_semistable == (base.is_semistable and invertible)
                  and framed.is_stable == (base.is_stable and invertible))
            report.record(ok, sign=sign, point=fr.to_dict(), framed=framed.kind.value, base=base.kind.value,
                          invertible=invertible)
    report.details = {"N": n, "default_N": default_N(theta, alpha)}
    return report


def verify_framed_stability(quiver: Quiver, alpha: DimVector, theta: StabilityParam, field: FieldSpec,
                            budget: Optional[Budget] = None, n: Optional[int] = None) -> VerificationReport:
    """
    eta+-semistable = eta+-stable = {phi_{M,A} surjective} on Q^{alpha+}, and
    eta--semistable = eta--stable = {psi_{M,B} injective} on Q_{alpha-}.

    The report details say whether N reached ``default_N`` and whether the
    three loci agreed, so a too small N shows up as a failed check.
    """
    _require_balanced(theta, alpha)
    n = default_N(theta, alpha) if n is None else n
    plus, minus = theta_split(theta)
    report = VerificationReport("framed-stability")
    for sign, kind, chosen in (("+", FramingKind.Q_BETA_SOURCE, plus), ("-", FramingKind.Q_BETA_SINK, minus)):
        beta = restricted_dim(alpha, chosen)
        fq = build_framed(quiver, beta, kind)
        param = framed_param_eta(theta, alpha, sign, n)
        logger.debug("eta%s sweep on %s with N = %d", sign, kind.value, n)
        for fr in enumerate_framed(quiver, alpha, beta, kind.side, field, budget):
            verdict = framed_stability(fr, fq, param, budget)
            if sign == "+":
                degree_zero = framed_phi(fr.rep, fr.framing)[1].is_surjective()
            else:
                degree_zero = framed_psi(fr.rep, fr.framing)[1].is_injective()
            ok = verdict.is_semistable == verdict.is_stable == degree_zero
            report.record(ok, sign=sign, point=fr.to_dict(), verdict=verdict.kind.value, degree_zero=degree_zero)
    report.details = {"N": n, "default_N": default_N(theta, alpha), "N_at_least_default": n >= default_N(theta, alpha),
                      "N_sufficient": report.passed}
    return report
