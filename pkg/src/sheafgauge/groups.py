"""Matrix group models with adjoint action and logarithmic differential.

A ``GroupModel`` fixes an ambient matrix size k, a basis of the Lie
algebra as k x k matrices, and the structure constants of the bracket
in that basis.  Group elements are invertible ``MatrixField`` values.

Two maps matter here.  The adjoint representation sends g to the
conjugation a -> g a g^-1, expressed in the Lie basis by
``rho_matrix``.  The logarithmic differential ``mc`` sends g to
g^-1 dg, a Lie-algebra valued one-form; it obeys the crossed
homomorphism rule

    mc(s t) = rho(t^-1) . mc(s) + mc(t)

which ``check_logarithmic_rule`` verifies numerically.  Both maps
expand matrices in the Lie basis by least squares and insist the
expansion residual stays tiny, so feeding elements whose conjugation
leaves the modeled algebra is caught at runtime.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    FieldMismatchError,
    ScenarioError,
    SpanError,
)
from .jets import (
    DET_FLOOR,
    MatrixField,
    _FieldBase,
    _require_aligned,
    identity_matrix_field,
    mat_inv,
    mat_mul,
    point_order,
)
from .report import CheckResult

SPAN_TOL = 1e-10
BRACKET_TOL = 1e-12
LOG_RULE_TOL = 1e-9


class LieValuedOneForm(_FieldBase):
    """Per point: a (dim, m) array of coefficients, chart directions first,
    Lie basis second."""

    def __init__(self, region: str, data: Mapping):
        clean = {}
        shapes = set()
        for p, arr in dict(data).items():
            a = np.asarray(arr, dtype=float)
            if a.ndim != 2:
                raise DimensionMismatchError(
                    "lie-valued one-form entries must be (dim, m) arrays")
            if not np.isfinite(a).all():
                raise ValueError("lie-valued one-form coefficients must be finite")
            shapes.add(a.shape)
            a = a.copy()
            a.setflags(write=False)
            clean[p] = a
        if len(shapes) > 1:
            raise DimensionMismatchError("mixed shapes in lie-valued one-form")
        super().__init__(region, clean)

    @property
    def dim(self):
        for a in self.data.values():
            return a.shape[0]
        return None

    @property
    def rank(self):
        for a in self.data.values():
            return a.shape[1]
        return None

    def _replace(self, region, data):
        return LieValuedOneForm(region, data)


class GroupModel:
    """A matrix group kind together with its modeled Lie algebra."""

    def __init__(self, kind: str, ambient: int, lie_basis,
                 structure_constants=None, bracket_tol: float = BRACKET_TOL):
        self.kind = str(kind)
        self.ambient = int(ambient)
        basis = np.asarray(lie_basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1:] != (self.ambient, self.ambient):
            raise DimensionMismatchError(
                f"lie basis must be (m, {self.ambient}, {self.ambient})")
        self.lie_basis = basis
        self.lie_basis.setflags(write=False)
        m = basis.shape[0]
        self._flat = basis.reshape(m, -1)            # (m, k*k)
        if np.linalg.matrix_rank(self._flat, tol=1e-10) != m:
            raise SpanError("lie basis matrices are linearly dependent")
        # left inverse via the Gram system: exact for orthogonal bases,
        # where SVD-based pinv loses an ulp and spoils unit-element checks
        gram = self._flat @ self._flat.T
        self._pinv = np.linalg.solve(gram, self._flat)   # (m, k*k): coeffs = pinv @ flat
        if structure_constants is None:
            structure_constants = self._derive_structure(bracket_tol)
        self.structure_constants = np.asarray(structure_constants, dtype=float)
        if self.structure_constants.shape != (m, m, m):
            raise DimensionMismatchError("structure constants must be (m, m, m)")
        self.structure_constants.setflags(write=False)
        self._check_brackets(bracket_tol)

    @property
    def rank(self) -> int:
        return self.lie_basis.shape[0]

    def _derive_structure(self, tol: float) -> np.ndarray:
        m = self.lie_basis.shape[0]
        c = np.empty((m, m, m))
        for i in range(m):
            for j in range(m):
                br = self.lie_basis[i] @ self.lie_basis[j] \
                    - self.lie_basis[j] @ self.lie_basis[i]
                coeff, res = self.expand(br)
                if res > tol:
                    raise SpanError(
                        f"bracket of basis elements {i}, {j} leaves the span "
                        f"(residual {res:.3e})", residual=res)
                c[i, j] = coeff
        return c

    def _check_brackets(self, tol: float) -> None:
        for i in range(self.rank):
            for j in range(self.rank):
                br = self.lie_basis[i] @ self.lie_basis[j] \
                    - self.lie_basis[j] @ self.lie_basis[i]
                recon = np.einsum("k,kab->ab", self.structure_constants[i, j],
                                  self.lie_basis)
                if np.max(np.abs(br - recon)) > tol:
                    raise SpanError(
                        f"structure constants disagree with brackets at ({i}, {j})")

    def expand(self, matrix: np.ndarray) -> tuple[np.ndarray, float]:
        """Least-squares coefficients of a matrix in the Lie basis.

        Returns (coefficients, reconstruction residual in max norm).
        """
        flat = np.asarray(matrix, dtype=float).reshape(-1)
        coeff = self._pinv @ flat
        res = float(np.max(np.abs(self._flat.T @ coeff - flat), initial=0.0))
        return coeff, res

    def expand_stack(self, mats: np.ndarray) -> tuple[np.ndarray, float]:
        """Expand a stack (q, k, k) of matrices at once."""
        q = mats.shape[0]
        flat = mats.reshape(q, -1)
        coeff = flat @ self._pinv.T
        res = float(np.max(np.abs(coeff @ self._flat - flat), initial=0.0))
        return coeff, res

    def combine(self, coeff: np.ndarray) -> np.ndarray:
        """Matrix with the given Lie-basis coefficients."""
        return np.einsum("k,kab->ab", np.asarray(coeff, dtype=float), self.lie_basis)

    def unit_field(self, region: str, points, dim: int) -> MatrixField:
        return identity_matrix_field(region, points, self.ambient, dim)

    def matches(self, other: "GroupModel") -> bool:
        return (self.kind == other.kind and self.ambient == other.ambient
                and self.lie_basis.shape == other.lie_basis.shape
                and bool(np.allclose(self.lie_basis, other.lie_basis)))

    def __repr__(self):
        return f"GroupModel({self.kind!r}, ambient={self.ambient}, rank={self.rank})"


# -- model factories ---------------------------------------------------------

def gl_model(n: int) -> GroupModel:
    """Invertible n x n matrices; the algebra is all of M_n with the
    elementary-matrix basis in row-major order."""
    if n < 1:
        raise DimensionMismatchError("gl(n) needs n >= 1")
    basis = np.eye(n * n).reshape(n * n, n, n)
    return GroupModel(f"gl({n})", n, basis)


def so2_model() -> GroupModel:
    """Plane rotations; one-dimensional algebra spanned by the quarter turn."""
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    return GroupModel("so(2)", 2, j[None, :, :])


def gl1_positive_model() -> GroupModel:
    """Positive scalars viewed as 1 x 1 matrices."""
    return GroupModel("gl1+", 1, np.ones((1, 1, 1)))


def torus_model(n: int) -> GroupModel:
    """Invertible diagonal n x n matrices."""
    if n < 1:
        raise DimensionMismatchError("torus(n) needs n >= 1")
    basis = np.zeros((n, n, n))
    for i in range(n):
        basis[i, i, i] = 1.0
    return GroupModel(f"torus({n})", n, basis)


def model_by_name(name: str) -> GroupModel:
    """Build a group model from its scenario name: gl(n), so(2), gl1+, torus(n)."""
    s = name.strip().lower().replace(" ", "")
    if s == "so(2)":
        return so2_model()
    if s == "gl1+":
        return gl1_positive_model()
    m = re.fullmatch(r"gl\((\d+)\)", s)
    if m:
        return gl_model(int(m.group(1)))
    m = re.fullmatch(r"torus\((\d+)\)", s)
    if m:
        return torus_model(int(m.group(1)))
    raise ScenarioError(f"unknown group kind {name!r}")


# -- operations ---------------------------------------------------------------

def group_mul(g: MatrixField, h: MatrixField,
              det_floor: float = DET_FLOOR) -> MatrixField:
    """Pointwise product of group-element fields; result must stay invertible."""
    out = mat_mul(g, h)
    for p in out.ordered_points():
        det = float(np.linalg.det(out.data[p].value))
        if abs(det) < det_floor:
            raise FieldMismatchError(
                f"group product leaves the invertible range at {p!r} (det {det:.3e})")
    return out


def ad_action(model: GroupModel, g: MatrixField, a: MatrixField,
              span_tol: float = SPAN_TOL) -> MatrixField:
    """Conjugation g a g^-1 on an algebra-valued field, span-checked."""
    out = mat_mul(mat_mul(g, a), mat_inv(g))
    for p in out.ordered_points():
        _, res = model.expand(out.data[p].value)
        if res > span_tol:
            raise SpanError(
                f"adjoint action leaves span(lie_basis) at {p!r} "
                f"(residual {res:.3e})", point=p, residual=res)
    return out


def rho_matrix(model: GroupModel, g: MatrixField,
               span_tol: float = SPAN_TOL) -> dict:
    """Per point, the matrix of Ad(g) in the Lie basis.

    Column i holds the coefficients of g E_i g^-1, so coefficient
    vectors transform by left multiplication.  Only the value part of
    g enters; coefficients of one-forms are plain reals.
    """
    out = {}
    for p in g.ordered_points():
        v = g.data[p].value
        vi = np.linalg.inv(v)
        images = np.einsum("ij,mjk,kl->mil", v, model.lie_basis, vi)
        coeff, res = model.expand_stack(images)
        if res > span_tol:
            raise SpanError(
                f"adjoint action leaves span(lie_basis) at {p!r} "
                f"(residual {res:.3e})", point=p, residual=res)
        out[p] = coeff.T
    return out


def mc(model: GroupModel, g: MatrixField, det_floor: float = DET_FLOOR,
       span_tol: float = SPAN_TOL) -> LieValuedOneForm:
    """Logarithmic differential g^-1 dg as a Lie-algebra valued one-form."""
    data = {}
    for p in g.ordered_points():
        jm = g.data[p]
        det = float(np.linalg.det(jm.value))
        if abs(det) < det_floor:
            raise SpanError(f"group element not invertible at {p!r}", point=p)
        vi = np.linalg.inv(jm.value)
        mats = np.einsum("ij,kjl->kil", vi, jm.grad)   # (dim, k, k)
        coeff, res = model.expand_stack(mats)
        if res > span_tol:
            raise SpanError(
                f"logarithmic differential leaves span(lie_basis) at {p!r} "
                f"(residual {res:.3e})", point=p, residual=res)
        data[p] = coeff
    return LieValuedOneForm(g.region, data)


def rho_dot_form(model: GroupModel, g: MatrixField,
                 w: LieValuedOneForm) -> LieValuedOneForm:
    """Apply Ad(g) to the Lie coefficients of a one-form, directionwise.

    The chart-direction index is untouched: the action is one tensor
    identity on coefficients of each differential separately.
    """
    _require_aligned(g, w)
    rho = rho_matrix(model, g)
    return LieValuedOneForm(w.region,
                            {p: w.data[p] @ rho[p].T for p in w.data})


def check_logarithmic_rule(model: GroupModel, s: MatrixField, t: MatrixField,
                           tol: float = LOG_RULE_TOL) -> CheckResult:
    """Residual of mc(s t) = rho(t^-1) . mc(s) + mc(t) over the common points."""
    lhs = mc(model, group_mul(s, t))
    rhs_data = {}
    tinv = mat_inv(t)
    rot = rho_dot_form(model, tinv, mc(model, s))
    dt_part = mc(model, t)
    for p in lhs.data:
        rhs_data[p] = rot.data[p] + dt_part.data[p]
    worst, worst_p = 0.0, None
    for p in lhs.ordered_points():
        d = float(np.max(np.abs(lhs.data[p] - rhs_data[p]), initial=0.0))
        if d > worst:
            worst, worst_p = d, p
    return CheckResult("log.crossed", worst, tol, worst_p)


def lie_form_residual(a: LieValuedOneForm, b: LieValuedOneForm) -> tuple[float, object]:
    if set(a.data) != set(b.data):
        raise FieldMismatchError("lie-valued forms live on different point sets")
    worst, worst_p = 0.0, None
    for p in point_order(a.data):
        d = float(np.max(np.abs(a.data[p] - b.data[p]), initial=0.0))
        if d > worst:
            worst, worst_p = d, p
    return worst, worst_p
