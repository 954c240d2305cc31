"""Exact realizability decisions over enumerated configuration spaces.

A prescribed correlation pair is realizable on a finite domain exactly when
the linear program

    sum_eta p_eta = 1
    sum_eta n_i(eta) p_eta = rho1_i                    for every site i
    sum_eta fp2(eta)_ij p_eta = rho2_ij                for every pair i <= j
    p_eta >= 0

is feasible, where ``fp2`` is the second factorial power.  Feasibility
yields an explicit realizing distribution; infeasibility yields a Farkas
dual that maps directly onto a quadratic certificate: the dual of the
normalization row becomes ``f0``, duals of first-moment rows become ``f1``,
duals of pair rows become ``f2`` (off-diagonal duals split evenly between
the two symmetric entries).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import simplex
from .core import (
    CorrelationPair,
    Distribution,
    Domain,
    QuadraticPolynomial,
    RealizationResult,
    Scalar,
    eval_quadratic,
    factorial_power2,
    h_moment,
    pairing,
)
from .enumeration import DEFAULT_LIMIT, enumerate_configurations
from .errors import DimensionError, RationalInputError, ValidationError


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the feasibility core.

    ``tolerance`` governs float-mode comparisons (primal feasibility); the
    certificate strict-negativity margin is ten times larger to avoid
    boundary flapping.  Rational mode compares exactly and ignores the
    tolerance.

    The default pivot rule is Dantzig (most negative reduced cost) with a
    stall guard that switches permanently to Bland's rule when too many
    pivots pass without progress, so termination stays guaranteed while
    typical instances run orders of magnitude faster than under pure
    Bland.  Selecting ``"bland"`` uses the textbook rule from the first
    pivot; on degenerate float instances beyond a few dozen rows it can
    need astronomically many pivots, so it is mainly useful in rational
    mode, where it is exact.
    """

    tolerance: float = 1e-9
    arithmetic_mode: str = "float"  # "float" | "rational"
    pivot_rule: str = "dantzig"  # "dantzig" | "bland"
    max_iterations: int = 50_000

    def __post_init__(self):
        if not 0 < self.tolerance <= 1e-3:
            raise ValidationError("tolerance must lie in (0, 1e-3]")
        if self.arithmetic_mode not in ("float", "rational"):
            raise ValidationError(f"unknown arithmetic mode {self.arithmetic_mode!r}")
        if self.pivot_rule not in ("bland", "dantzig"):
            raise ValidationError(f"unknown pivot rule {self.pivot_rule!r}")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be positive")

    @property
    def rational(self) -> bool:
        return self.arithmetic_mode == "rational"


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class LinearProgramResult:
    """Feasibility outcome of ``A x = b, x >= 0`` plus optional optimization."""

    feasible: bool
    solution: tuple | None = None
    dual: tuple | None = None
    farkas_dual: tuple | None = None
    objective_value: Scalar | None = None
    iterations: int = 0


@dataclass(frozen=True)
class RestrictedCubic:
    """Quadratic observable plus ``f3`` times the third factorial sum.

    The cubic channel uses unit weights, so on a configuration with total
    particle number ``N`` the added term is ``f3 * N(N-1)(N-2)``.  Families
    of these observables govern how large a third moment any realization
    must carry.
    """

    quadratic: QuadraticPolynomial
    f3: Scalar

    def evaluate(self, config: Sequence[int]) -> Scalar:
        ones = np.ones(len(config), dtype=np.int64)
        return eval_quadratic(self.quadratic, config) + self.f3 * h_moment(config, ones, 3)

    def budget_pairing(self, corr: CorrelationPair, budget: Scalar) -> Scalar:
        """Pairing when the third-moment channel is priced at ``budget``."""
        return pairing(self.quadratic, corr) + self.f3 * budget


@dataclass(frozen=True)
class ThirdMomentResult:
    """Least third factorial moment among realizing distributions.

    ``finite`` with ``r_star`` attained by ``witness``, or infeasible with a
    quadratic certificate.  ``dual_cubic`` is the optimality certificate
    extracted from the dual: a restricted cubic, nonnegative on every
    admissible configuration, whose budget pairing vanishes at ``r_star``
    and goes negative for any smaller budget.
    """

    finite: bool
    r_star: Scalar | None = None
    witness: Distribution | None = None
    certificate: QuadraticPolynomial | None = None
    dual_cubic: RestrictedCubic | None = None


def lp_feasibility(
    A_eq, b_eq, objective=None, opts: SolverOptions | None = None
) -> LinearProgramResult:
    """Phase-1 simplex feasibility with optional phase-2 minimization.

    Infeasible systems come back with ``farkas_dual = y`` satisfying
    ``y.A >= 0`` componentwise (within tolerance in float mode) and
    ``y.b < 0``; see :mod:`realz.simplex` for the convention.
    """
    opts = opts or DEFAULT_OPTIONS
    out = simplex.solve(
        A_eq,
        b_eq,
        objective,
        rational=opts.rational,
        tolerance=opts.tolerance,
        pivot_rule=opts.pivot_rule,
        max_iterations=opts.max_iterations,
    )
    if out.status == "infeasible":
        return LinearProgramResult(
            feasible=False, farkas_dual=out.farkas, iterations=out.iterations
        )
    return LinearProgramResult(
        feasible=True,
        solution=out.x,
        dual=out.dual,
        farkas_dual=None,
        objective_value=out.objective_value,
        iterations=out.iterations,
    )


def _pair_indices(s: int) -> list:
    return [(i, j) for i in range(s) for j in range(i, s)]


def _moment_column(config) -> list:
    """LP column of one configuration: [1, first moments, pair moments]."""
    fp2 = factorial_power2(config)
    col = [1]
    col.extend(int(n) for n in config)
    col.extend(int(fp2[i, j]) for (i, j) in _pair_indices(len(config)))
    return col


def _moment_system(domain: Domain, corr: CorrelationPair, configs) -> tuple:
    s = domain.site_count
    columns = [_moment_column(c) for c in configs]
    n_rows = 1 + s + s * (s + 1) // 2
    A = [[col[r] for col in columns] for r in range(n_rows)]
    b = [1]
    b.extend(corr.rho1[i] for i in range(s))
    b.extend(corr.rho2[i, j] for (i, j) in _pair_indices(s))
    return A, b


def _polynomial_from_row_duals(y: Sequence[Scalar], s: int, exact: bool) -> QuadraticPolynomial:
    dtype = object if exact else float
    f1 = np.array(list(y[1 : 1 + s]), dtype=dtype)
    f2 = np.zeros((s, s), dtype=dtype)
    for k, (i, j) in enumerate(_pair_indices(s)):
        v = y[1 + s + k]
        if i == j:
            f2[i, i] = v
        else:
            half = v / 2
            f2[i, j] = half
            f2[j, i] = half
    return QuadraticPolynomial(f0=y[0], f1=f1, f2=f2)


def normalize_certificate(cert: QuadraticPolynomial) -> QuadraticPolynomial:
    """Scale so the largest coefficient magnitude is one.

    The scale factor is positive, so nonnegativity on configurations and
    the sign of any pairing are preserved.
    """
    scale = max(abs(c) for c in cert.coefficients())
    if scale == 0 or scale == 1:
        return cert
    exact = isinstance(scale, (int, Fraction)) and not isinstance(scale, bool)
    if exact:
        scale = Fraction(scale)
    dtype = object if exact else float
    return QuadraticPolynomial(
        f0=cert.f0 / scale,
        f1=np.array([v / scale for v in cert.f1.tolist()], dtype=dtype),
        f2=np.array(
            [[v / scale for v in row] for row in cert.f2.tolist()], dtype=dtype
        ),
    )


def _unit_poly(s: int, *, f0=0, site=None, pair=None, diag=None, sign=1) -> QuadraticPolynomial:
    f1 = np.zeros(s)
    f2 = np.zeros((s, s))
    if site is not None:
        f1[site] = sign
    if diag is not None:
        f2[diag, diag] = sign
    if pair is not None:
        i, j = pair
        f2[i, j] = sign / 2
        f2[j, i] = sign / 2
    return QuadraticPolynomial(f0=f0, f1=f1, f2=f2)


def _validation_certificate(domain: Domain, corr: CorrelationPair) -> QuadraticPolynomial | None:
    """Analytic certificate for inputs that fail sign or support constraints.

    Negative entries, mass on the diagonal of a capped-at-one site, or mass
    on an excluded pair each refute realizability without running the LP.
    """
    s = domain.site_count
    for i in range(s):
        if corr.rho1[i] < 0:
            return _unit_poly(s, site=i)
    for i, j in _pair_indices(s):
        if corr.rho2[i, j] < 0:
            return _unit_poly(s, diag=i) if i == j else _unit_poly(s, pair=(i, j))
    d = domain.exclusion_diameter
    hard = d is not None and d > 0
    for i in range(s):
        if corr.rho2[i, i] > 0 and (domain.occupancy_cap[i] <= 1 or hard):
            # n(n-1) vanishes identically when at most one particle fits,
            # so minus that observable certifies.
            return _unit_poly(s, diag=i, sign=-1)
    if hard:
        for i, j in _pair_indices(s):
            if i != j and corr.rho2[i, j] > 0 and domain.distance[i, j] < d:
                return _unit_poly(s, pair=(i, j), sign=-1)
    return None


def _require_exact(corr: CorrelationPair) -> None:
    if not corr.is_exact:
        raise RationalInputError(
            "rational mode requires int or Fraction correlation entries"
        )


def _check_dimensions(domain: Domain, corr: CorrelationPair) -> None:
    if corr.site_count != domain.site_count:
        raise DimensionError("correlation tables do not match the domain size")


def _witness(domain: Domain, configs, solution) -> Distribution:
    atoms = [(configs[k], w) for k, w in enumerate(solution) if w > 0]
    return Distribution(domain, tuple(atoms))


def check_realizability(
    domain: Domain,
    corr: CorrelationPair,
    opts: SolverOptions | None = None,
    limit: int = DEFAULT_LIMIT,
) -> RealizationResult:
    """Decide whether the correlation pair is realizable on the domain.

    Feasible outcomes carry a realizing distribution whose correlations
    match the input within the solver tolerance.  Infeasible outcomes carry
    a certificate, normalized so its largest coefficient magnitude is one,
    that is nonnegative on every admissible configuration and pairs
    strictly negatively with the input.
    """
    opts = opts or DEFAULT_OPTIONS
    _check_dimensions(domain, corr)
    corr.validate(require_nonnegative=False)
    if opts.rational:
        _require_exact(corr)

    shortcut = _validation_certificate(domain, corr)
    if shortcut is not None:
        return RealizationResult.refuted(normalize_certificate(shortcut))

    configs = enumerate_configurations(domain, limit=limit)
    A, b = _moment_system(domain, corr, configs)
    res = lp_feasibility(A, b, None, opts)
    if res.feasible:
        return RealizationResult.realized(_witness(domain, configs, res.solution))
    cert = _polynomial_from_row_duals(res.farkas_dual, domain.site_count, opts.rational)
    return RealizationResult.refuted(normalize_certificate(cert))


def verify_certificate(
    domain: Domain,
    cert: QuadraticPolynomial,
    corr: CorrelationPair,
    tol: float = 1e-9,
    limit: int = DEFAULT_LIMIT,
) -> bool:
    """Replay a certificate by enumeration, independently of any solver.

    True exactly when the observable is nonnegative (within ``tol``) on
    every admissible configuration and its pairing with ``corr`` is below
    ``-tol``.
    """
    if cert.site_count != domain.site_count or corr.site_count != domain.site_count:
        raise DimensionError("certificate, correlations and domain disagree on size")
    worst = min(
        eval_quadratic(cert, config)
        for config in enumerate_configurations(domain, limit=limit)
    )
    return worst >= -tol and pairing(cert, corr) < -tol


def minimal_third_moment(
    domain: Domain,
    corr: CorrelationPair,
    opts: SolverOptions | None = None,
    limit: int = DEFAULT_LIMIT,
) -> ThirdMomentResult:
    """Minimize the third factorial moment over all realizing distributions."""
    opts = opts or DEFAULT_OPTIONS
    _check_dimensions(domain, corr)
    corr.validate(require_nonnegative=False)
    if opts.rational:
        _require_exact(corr)

    shortcut = _validation_certificate(domain, corr)
    if shortcut is not None:
        return ThirdMomentResult(
            finite=False, certificate=normalize_certificate(shortcut)
        )

    configs = enumerate_configurations(domain, limit=limit)
    A, b = _moment_system(domain, corr, configs)
    ones = np.ones(domain.site_count, dtype=np.int64)
    objective = [h_moment(config, ones, 3) for config in configs]
    res = lp_feasibility(A, b, objective, opts)
    if not res.feasible:
        cert = _polynomial_from_row_duals(
            res.farkas_dual, domain.site_count, opts.rational
        )
        return ThirdMomentResult(finite=False, certificate=normalize_certificate(cert))

    # Reduced costs at the optimum say H3 - P_y >= 0 on every admissible
    # configuration, and strong duality makes the budget pairing vanish at
    # the optimum, which certifies minimality.
    neg_dual = [-v for v in res.dual]
    dual_cubic = RestrictedCubic(
        quadratic=_polynomial_from_row_duals(neg_dual, domain.site_count, opts.rational),
        f3=Fraction(1) if opts.rational else 1.0,
    )
    return ThirdMomentResult(
        finite=True,
        r_star=res.objective_value,
        witness=_witness(domain, configs, res.solution),
        dual_cubic=dual_cubic,
    )
