"""Dirichlet-series partial sums as a stress test for the decay machinery.

A coefficient sequence b_1, b_2, ... induces the pure-jump integrator

    A(t) = sum_{log n < t} b_n / n,

whose transform is the Dirichlet series sum b_n n^{-(z+1)}.  Summation by
parts gives the certificate constant C = e * max(sup ||b_n||, 1) with x0 = 1
and cutoff R(t) = e^t, so the generic decay bound applies verbatim and can be
measured against the true partial sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bv import BVFunction, DensityPiece
from .growth import CutoffRule, GrowthBound
from .oracles import log_two
from .rates import RateInputs, decay_rate, t_prime
from .transform import TauberianCertificate
from .vectors import vector_norm
from .verify import SupReport

COEFFICIENT_KINDS = ("alternating", "ones", "periodic", "file")


@dataclass(frozen=True)
class CoefficientSequence:
    """b_n source: a named rule, a repeating table, or a file of values."""

    kind: str
    table: np.ndarray | None = None
    source: str = ""

    def __post_init__(self):
        if self.kind not in COEFFICIENT_KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind in ("periodic", "file"):
            if self.table is None or self.table.size == 0:
                raise ValueError(f"{self.kind} coefficients need a nonempty table")

    @staticmethod
    def alternating() -> "CoefficientSequence":
        return CoefficientSequence("alternating")

    @staticmethod
    def ones() -> "CoefficientSequence":
        return CoefficientSequence("ones")

    @staticmethod
    def periodic(values) -> "CoefficientSequence":
        table = np.atleast_2d(np.asarray(values, dtype=complex))
        if table.shape[0] == 1 and np.asarray(values).ndim == 1:
            table = table.T
        return CoefficientSequence("periodic", table=table)

    @staticmethod
    def from_file(path) -> "CoefficientSequence":
        """One coefficient per line: whitespace-separated re im pairs.

        Every data line must carry the same number of pairs (the vector
        dimension); blank lines and lines starting with '#' are skipped.
        """
        rows: list[list[complex]] = []
        width = None
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) % 2 != 0:
                raise ValueError(
                    f"{path}:{lineno}: expected re/im pairs, got {len(tokens)} numbers")
            try:
                nums = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            row = [complex(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(
                    f"{path}:{lineno}: expected {width} coefficient components, got {len(row)}")
            rows.append(row)
        if not rows:
            raise ValueError(f"{path}: no coefficients found")
        return CoefficientSequence("file", table=np.asarray(rows, dtype=complex),
                                   source=str(path))

    @property
    def dimension(self) -> int:
        return 1 if self.table is None else int(self.table.shape[1])

    @property
    def max_n(self) -> int | None:
        """Largest index available (file sources only)."""
        return int(self.table.shape[0]) if self.kind == "file" else None

    def values(self, n: np.ndarray) -> np.ndarray:
        """Coefficients b_n for a 1-based index array, shape (len(n), dimension)."""
        n = np.asarray(n, dtype=np.int64)
        if np.any(n < 1):
            raise ValueError("coefficient indices are 1-based")
        if self.kind == "alternating":
            return np.where(n % 2 == 1, 1.0, -1.0).astype(complex)[:, None]
        if self.kind == "ones":
            return np.ones((n.size, 1), dtype=complex)
        if self.kind == "periodic":
            return self.table[(n - 1) % self.table.shape[0]]
        if np.any(n > self.table.shape[0]):
            raise ValueError(
                f"file source {self.source!r} has {self.table.shape[0]} coefficients, "
                f"index {int(n.max())} requested")
        return self.table[n - 1]

    def sup_norm(self, norm_kind: str = "euclidean") -> float:
        if self.kind in ("alternating", "ones"):
            return 1.0
        return float(np.max(vector_norm(self.table, norm_kind)))

    def describe(self) -> str:
        if self.kind == "periodic":
            return f"periodic(period={self.table.shape[0]})"
        if self.kind == "file":
            return f"file({self.source}, n={self.table.shape[0]})"
        return self.kind


@dataclass(frozen=True)
class DirichletInstance:
    coefficients: CoefficientSequence
    n_max: int
    bv: BVFunction
    certificate: TauberianCertificate
    d_constant: float
    f0: np.ndarray | None
    f0_provenance: str | None

    @property
    def t_max(self) -> float:
        """Largest time at which the truncated integrator is faithful."""
        return math.log(self.n_max)


def build_instance(coeffs: CoefficientSequence, n_max: int = 1_000_000,
                   norm_kind: str = "euclidean") -> DirichletInstance:
    """Materialize the first n_max jumps and the summation-by-parts certificate."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    limit = coeffs.max_n
    if limit is not None and n_max > limit:
        raise ValueError(
            f"coefficient source only provides {limit} values; lower n_max")
    n = np.arange(1, n_max + 1, dtype=np.int64)
    sizes = coeffs.values(n) / n[:, None]
    bv = BVFunction(dimension=coeffs.dimension, jump_times=np.log(n.astype(float)),
                    jump_sizes=sizes, pieces=(), norm_kind=norm_kind)
    d_constant = max(coeffs.sup_norm(norm_kind), 1.0)
    cert = TauberianCertificate(C=d_constant * math.e, x0=1.0, T=0.0,
                                R_rule=CutoffRule.exp_of_t())
    f0 = None
    provenance = None
    if coeffs.kind == "alternating":
        # limit of sum (-1)^{n+1}/n, computed by series acceleration rather
        # than typed in as a decimal constant
        f0 = np.asarray([complex(log_two())])
        provenance = "accelerated alternating series (64+ digit-stable scheme)"
    return DirichletInstance(coefficients=coeffs, n_max=n_max, bv=bv,
                             certificate=cert, d_constant=d_constant,
                             f0=f0, f0_provenance=provenance)


@dataclass(frozen=True)
class DecayRow:
    t: float
    decay_norm: float
    bound_B: float
    margin: float
    branch: str


def partial_sum_decay(instance: DirichletInstance, M: GrowthBound,
                      t_grid, f0=None) -> list[DecayRow]:
    """Measured ||A(t) - f(0)|| against the generic bound on a t grid.

    Rows where t <= T' carry nan bounds (the guarantee only starts past T');
    the decay norm itself is always reported.
    """
    if f0 is None:
        f0 = instance.f0
    if f0 is None:
        raise ValueError(
            f"coefficient source {instance.coefficients.describe()!r} has no known "
            "limit value; pass f0 explicitly")
    f0 = np.atleast_1d(np.asarray(f0, dtype=complex))
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size and float(t_grid.max()) > instance.t_max + 1e-12:
        raise ValueError(
            f"t = {float(t_grid.max()):g} exceeds log(n_max) = {instance.t_max:.6g}; "
            "the truncated jump list is not faithful there")

    bv = instance.bv
    prefix = np.concatenate([np.zeros((1, bv.dimension), dtype=complex),
                             np.cumsum(bv.jump_sizes, axis=0)])
    idx = np.searchsorted(bv.jump_times, t_grid, side="left")
    decay = np.asarray(vector_norm(prefix[idx] - f0[None, :], bv.norm_kind), dtype=float)

    inputs = RateInputs(C=instance.certificate.C, M=M, T=instance.certificate.T,
                        R_rule=instance.certificate.R_rule)
    threshold = t_prime(inputs)
    rows = []
    for t, d in zip(t_grid, decay):
        if t > threshold:
            res = decay_rate(inputs, float(t))
            rows.append(DecayRow(float(t), float(d), res.bound, res.bound - float(d),
                                 res.branch))
        else:
            rows.append(DecayRow(float(t), float(d), math.nan, math.nan, "below_t_prime"))
    return rows


# -- bounded-density instances ----------------------------------------------------

DENSITY_INSTANCE_KINDS = ("cosine", "decaying_exp", "constant")


@dataclass(frozen=True)
class BoundedDensityInstance:
    bv: BVFunction
    certificate: TauberianCertificate
    extension: object       # callable z -> f(z), valid off the density's poles
    kind: str


def bounded_density_instance(kind: str, c0: float = 1.0,
                             norm_kind: str = "euclidean") -> BoundedDensityInstance:
    """dA = a(s) ds with ||a|| <= c0: the certificate holds with C = c0, any x0.

    The weighted partials are x e^{-xt} int_0^t e^{xs} a(s) ds, bounded by
    c0 (1 - e^{-xt}) <= c0 uniformly in x > 0, so no cutoff is needed.
    """
    from .contour import RationalExtension  # local import avoids a cycle

    if c0 <= 0:
        raise ValueError("density amplitude must be positive")
    if kind == "cosine":
        piece = DensityPiece(start=0.0, end=math.inf, kind="exponential",
                             scale=(0.5 * c0,), rate=1j)
        piece2 = DensityPiece(start=0.0, end=math.inf, kind="exponential",
                              scale=(0.5 * c0,), rate=-1j)
        bv = BVFunction(dimension=1, pieces=(piece, piece2), norm_kind=norm_kind)
        ext = RationalExtension(numerator=(0.0, c0), denominator=(1.0, 0.0, 1.0))
    elif kind == "decaying_exp":
        piece = DensityPiece(start=0.0, end=math.inf, kind="exponential",
                             scale=(c0,), rate=-1.0)
        bv = BVFunction(dimension=1, pieces=(piece,), norm_kind=norm_kind)
        ext = RationalExtension(numerator=(c0,), denominator=(1.0, 1.0))
    elif kind == "constant":
        piece = DensityPiece(start=0.0, end=math.inf, kind="constant", scale=(c0,))
        bv = BVFunction(dimension=1, pieces=(piece,), norm_kind=norm_kind)
        ext = RationalExtension(numerator=(c0,), denominator=(0.0, 1.0))
    else:
        raise ValueError(f"unknown bounded-density kind {kind!r}; "
                         f"choose from {DENSITY_INSTANCE_KINDS}")
    cert = TauberianCertificate(C=c0, x0=1.0, T=0.0, R_rule=CutoffRule.infinite())
    return BoundedDensityInstance(bv=bv, certificate=cert, extension=ext, kind=kind)


# -- growth-bound admissibility on the left strip ----------------------------------


def check_admissibility(f_ext, M: GrowthBound, y_grid=None,
                        x_fracs=(0.0, 0.05, 0.25, 0.5, 0.75, 0.98),
                        norm_kind: str = "euclidean") -> SupReport:
    """Grid check of ||f(x+iy)|| <= M(|y|) on the strip -1/M(|y|) < x <= 0.

    grid_sup is the worst excess ||f|| - M(|y|) (so admissible means <= 0);
    singular sample points count as +inf excess.
    """
    if y_grid is None:
        y_grid = np.linspace(-20.0, 20.0, 801)
    y_grid = np.asarray(y_grid, dtype=float)
    for frac in x_fracs:
        if not 0.0 <= frac < 1.0:
            raise ValueError("x_fracs are depth fractions in [0, 1)")

    worst = -math.inf
    witness_y = math.nan
    witness_x = math.nan
    singular = False
    m_vals = np.asarray(M(np.abs(y_grid)), dtype=float)
    for frac in x_fracs:
        x = -frac / m_vals
        z = x + 1j * y_grid
        vals = np.asarray(f_ext(z), dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        norms = np.asarray(vector_norm(vals, norm_kind), dtype=float)
        bad = ~np.isfinite(norms)
        if np.any(bad):
            norms = np.where(bad, math.inf, norms)
            singular = True
        excess = norms - m_vals
        k = int(np.argmax(excess))
        if excess[k] > worst:
            worst = float(excess[k])
            witness_y = float(y_grid[k])
            witness_x = float(x[k])

    note = (f"strip depths {tuple(x_fracs)} of 1/M(|y|), {y_grid.size} ordinates in "
            f"[{y_grid.min():g}, {y_grid.max():g}]")
    if singular:
        note += "; singular sample encountered"
    return SupReport(case_id="admissibility", grid_sup=worst, bound=0.0,
                     witness_t=witness_y, witness_x=witness_x,
                     hypothesis_failed=False, note=note)


def calibrate_affine_growth(f_ext, y_max: float = 20.0, safety: float = 1.25,
                            y_points: int = 481,
                            norm_kind: str = "euclidean") -> GrowthBound:
    """Fit M(s) = c (1 + s) so that f stays below M on its own left strip.

    Fixed-point scan: start from the imaginary axis, re-scan the strip the
    candidate defines, enlarge c until stable, then apply the safety factor.
    The result is empirically admissible on the scanned window only; it is
    not a proof of admissibility.
    """
    if safety < 1.0:
        raise ValueError("safety factor must be >= 1")
    y = np.linspace(-y_max, y_max, y_points)

    def needed_c(candidate: float) -> float:
        m_vals = candidate * (1.0 + np.abs(y))
        c_req = 1.0
        for frac in (0.0, 0.25, 0.5, 0.75, 0.98):
            z = -frac / m_vals + 1j * y
            vals = np.asarray(f_ext(z), dtype=complex)
            if vals.ndim == 1:
                vals = vals[:, None]
            norms = np.asarray(vector_norm(vals, norm_kind), dtype=float)
            if not np.all(np.isfinite(norms)):
                raise ValueError(
                    "extension is singular on the candidate strip; affine growth "
                    "cannot be calibrated on this window")
            c_req = max(c_req, float(np.max(norms / (1.0 + np.abs(y)))))
        return c_req

    c = needed_c(1.0)
    for _ in range(8):
        c_next = needed_c(c)
        if c_next <= c * (1.0 + 1e-9):
            break
        c = c_next
    c *= safety
    M = GrowthBound.affine(c)
    report = check_admissibility(f_ext, M, y_grid=np.linspace(-y_max, y_max, y_points),
                                 norm_kind=norm_kind)
    if not report.grid_sup <= 0.0:
        raise ArithmeticError(
            f"calibrated affine bound c = {c:.6g} still violated by "
            f"{report.grid_sup:.3g} at y = {report.witness_t:g}")
    return M
