"""Ordering cones, their dual generator sets, and variable orders.

Two cone families cover every ordering used by the bundled problems:

* :class:`Polyhedral` -- ``{z : a_i^T z >= 0 for every row a_i}``
* :class:`NormCone`   -- ``{z : ||z||_2 <= a^T z}`` (a circular cone around ``a``)

A :class:`VariableOrder` maps points to cones, indexed either by the decision
variable (``K(x)``) or by the objective value (``K(F(x))``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

# Absolute slack added to every membership test so that z ~ 0 is handled.
EPS_ABS = 1e-12
# Generators closer than this are considered duplicates.
DUPLICATE_TOL = 1e-12


class ConeError(ValueError):
    """Raised for malformed cones or unsupported cone operations."""


def _as_vector(z, dim: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.ndim != 1 or z.shape[0] != dim:
        raise ConeError(f"expected a vector of length {dim}, got shape {z.shape}")
    return z


class Polyhedral:
    """Closed polyhedral cone ``{z : a_i^T z >= 0}``.

    Parameters
    ----------
    rows : sequence of array_like
        Normal vectors ``a_i``.
    senses : sequence of str, optional
        ``">="`` (default) or ``"<="`` per row; ``"<="`` rows are negated so
        that every stored row reads ``a_i^T z >= 0``. Rows are stored
        unit-normalized, which leaves the cone unchanged.
    """

    def __init__(self, rows: Sequence, senses: Sequence[str] | None = None):
        A = np.atleast_2d(np.asarray(rows, dtype=float))
        if A.size == 0:
            raise ConeError("a polyhedral cone needs at least one row")
        if senses is None:
            senses = [">="] * A.shape[0]
        if len(senses) != A.shape[0]:
            raise ConeError("one sense per row is required")
        signs = []
        for s in senses:
            if s not in (">=", "<="):
                raise ConeError(f"unknown inequality sense {s!r}")
            signs.append(1.0 if s == ">=" else -1.0)
        A = A * np.asarray(signs)[:, None]
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0.0):
            raise ConeError("zero normal vector in polyhedral cone")
        self.rows = A / norms[:, None]
        self.rows.setflags(write=False)
        self.dim = A.shape[1]
        if np.linalg.matrix_rank(self.rows) < self.dim:
            # Without m independent rows the cone contains a line.
            raise ConeError("polyhedral cone is not pointed (row rank < dimension)")

    @classmethod
    def from_rays(cls, r1, r2) -> "Polyhedral":
        """The planar cone spanned by two independent rays."""
        r1 = _as_vector(r1, 2)
        r2 = _as_vector(r2, 2)
        cross = r1[0] * r2[1] - r1[1] * r2[0]
        if abs(cross) <= 1e-14 * np.linalg.norm(r1) * np.linalg.norm(r2):
            raise ConeError("rays are parallel; the cone has empty interior")
        # Each facet normal is perpendicular to one ray and points at the other.
        n1 = np.array([-r1[1], r1[0]])
        if n1 @ r2 < 0:
            n1 = -n1
        n2 = np.array([-r2[1], r2[0]])
        if n2 @ r1 < 0:
            n2 = -n2
        return cls([n1, n2])

    @classmethod
    def orthant(cls, dim: int) -> "Polyhedral":
        return cls(np.eye(dim))

    def slacks(self, z: np.ndarray) -> np.ndarray:
        return self.rows @ z

    def extreme_rays_2d(self) -> np.ndarray:
        """The two extreme rays of a planar cone, as unit row vectors."""
        if self.dim != 2:
            raise ConeError("extreme rays are only computed for planar cones")
        a, b = _extreme_pair(self.rows)
        # The ray of facet a lies on a^T z = 0 and satisfies b^T z >= 0.
        r1 = np.array([-a[1], a[0]])
        if r1 @ b < 0:
            r1 = -r1
        r2 = np.array([-b[1], b[0]])
        if r2 @ a < 0:
            r2 = -r2
        return np.vstack([r1, r2])

    def __eq__(self, other):
        return (
            isinstance(other, Polyhedral)
            and other.rows.shape == self.rows.shape
            and bool(np.array_equal(other.rows, self.rows))
        )

    def __repr__(self):
        return f"Polyhedral(rows={self.rows.tolist()})"


class NormCone:
    """Circular cone ``{z : ||z||_2 <= a^T z}``.

    The cone has nonempty interior iff ``||a|| > 1``; its half-angle around
    the axis ``a / ||a||`` is ``arccos(1 / ||a||)``.
    """

    def __init__(self, axis):
        a = np.atleast_1d(np.asarray(axis, dtype=float))
        if a.ndim != 1:
            raise ConeError("axis must be a vector")
        norm = float(np.linalg.norm(a))
        if not norm > 1.0:
            raise ConeError(f"norm cone axis must have norm > 1, got {norm:.6g}")
        self.axis = a
        self.axis.setflags(write=False)
        self.dim = a.shape[0]

    @property
    def half_angle(self) -> float:
        return math.acos(1.0 / float(np.linalg.norm(self.axis)))

    def __eq__(self, other):
        return isinstance(other, NormCone) and bool(np.array_equal(other.axis, self.axis))

    def __repr__(self):
        return f"NormCone(axis={self.axis.tolist()})"


ConeRep = Polyhedral | NormCone


def _extreme_pair(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pick the two extreme vectors among planar unit vectors spanning a pointed cone."""
    if rows.shape[0] == 2:
        return rows[0], rows[1]
    # The vectors lie in an open half-plane; their mean direction is inside it.
    centre = rows.sum(axis=0)
    centre = centre / np.linalg.norm(centre)
    perp = np.array([-centre[1], centre[0]])
    angles = np.arctan2(rows @ perp, rows @ centre)
    return rows[int(np.argmin(angles))], rows[int(np.argmax(angles))]


def _signed_slack(cone: ConeRep, z: np.ndarray) -> float:
    if isinstance(cone, Polyhedral):
        return float(np.min(cone.slacks(z)))
    return float(cone.axis @ z - np.linalg.norm(z))


def cone_contains(cone: ConeRep, z, margin: float = 0.0) -> bool:
    """Closed-cone membership, allowing every constraint to be violated by
    ``margin * ||z|| + 1e-12``."""
    if margin < 0:
        raise ConeError("margin must be nonnegative")
    z = _as_vector(z, cone.dim)
    return _signed_slack(cone, z) >= -(margin * float(np.linalg.norm(z)) + EPS_ABS)


def cone_strict_contains(cone: ConeRep, z, margin: float) -> bool:
    """Interior membership: every constraint holds with slack ``>= margin * ||z||``.

    ``z = 0`` is never interior.
    """
    if margin <= 0:
        raise ConeError("strict membership needs a positive margin")
    z = _as_vector(z, cone.dim)
    nz = float(np.linalg.norm(z))
    if nz == 0.0:
        return False
    return _signed_slack(cone, z) >= margin * nz


@dataclass(frozen=True)
class GeneratorSet:
    """Finite set of unit vectors in the dual cone whose conic hull is the dual cone."""

    generators: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if G.shape[0] == 0:
            raise ConeError("generator set is empty")
        norms = np.linalg.norm(G, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ConeError("generators must be unit vectors")
        for i in range(G.shape[0]):
            for j in range(i):
                if np.linalg.norm(G[i] - G[j]) <= DUPLICATE_TOL:
                    raise ConeError("duplicate generators")
        G = G.copy()
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    def __len__(self):
        return self.generators.shape[0]

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def combine(self, weights) -> np.ndarray:
        """The convex combination ``sum_i w_i g_i``."""
        return np.asarray(weights, dtype=float) @ self.generators


def _rotate(u: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * u[0] - s * u[1], s * u[0] + c * u[1]])


def dual_generators(cone: ConeRep) -> GeneratorSet:
    """Unit extreme rays of the dual cone.

    For a polyhedral cone ``{z : A z >= 0}`` the dual cone is generated by the
    rows of ``A``; in the plane only the two extreme rows are kept. For a
    planar norm cone with half-angle ``alpha`` the dual is the circular cone of
    half-angle ``pi/2 - alpha`` around the same axis.
    """
    if isinstance(cone, Polyhedral):
        if cone.dim == 2:
            return GeneratorSet(np.vstack(_extreme_pair(cone.rows)))
        unique: list[np.ndarray] = []
        for row in cone.rows:
            if all(np.linalg.norm(row - u) > DUPLICATE_TOL for u in unique):
                unique.append(row)
        return GeneratorSet(np.vstack(unique))
    if isinstance(cone, NormCone):
        if cone.dim != 2:
            raise ConeError("dual generators of a norm cone are only available in the plane")
        u = cone.axis / np.linalg.norm(cone.axis)
        opening = math.pi / 2 - cone.half_angle
        return GeneratorSet(np.vstack([_rotate(u, -opening), _rotate(u, opening)]))
    raise ConeError(f"unsupported cone type {type(cone).__name__}")


def hausdorff_distance(A: GeneratorSet, B: GeneratorSet) -> float:
    a = A.generators
    b = B.generators
    if a.shape[1] != b.shape[1]:
        raise ConeError("generator sets live in different dimensions")
    D = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


class Indexing(enum.Enum):
    DOMAIN = "domain"  # K(x): cone depends on the decision variable
    IMAGE = "image"  # K(F(x)): cone depends on the objective value


@dataclass(frozen=True)
class VariableOrder:
    """A point-to-cone mapping.

    ``mapping`` must be deterministic. ``bounding_cone`` is an optional fixed
    cone containing every ``K(x)`` over the feasible set; it is only used for
    diagnostics.
    """

    mapping: Callable[[np.ndarray], ConeRep]
    indexing: Indexing = Indexing.DOMAIN
    bounding_cone: ConeRep | None = None
    name: str = field(default="", compare=False)

    def cone(self, point) -> ConeRep:
        return self.mapping(np.atleast_1d(np.asarray(point, dtype=float)))

    def generators(self, point) -> GeneratorSet:
        return dual_generators(self.cone(point))

    @classmethod
    def constant(cls, cone: ConeRep, indexing: Indexing = Indexing.DOMAIN) -> "VariableOrder":
        return cls(lambda _p: cone, indexing, bounding_cone=cone, name="constant")


def estimate_generator_lipschitz(order: VariableOrder, pairs: Iterable[tuple]) -> float:
    """Largest observed ``d_H(G(p), G(q)) / ||p - q||`` over the given pairs.

    This is an empirical lower bound on the Lipschitz constant of the generator
    map; it is reported, never used to gate a solve.
    """
    best = None
    for p, q in pairs:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        q = np.atleast_1d(np.asarray(q, dtype=float))
        dist = float(np.linalg.norm(p - q))
        if dist == 0.0:
            raise ConeError("coincident points in Lipschitz estimate")
        ratio = hausdorff_distance(order.generators(p), order.generators(q)) / dist
        best = ratio if best is None else max(best, ratio)
    if best is None:
        raise ConeError("at least one pair of points is required")
    return best
