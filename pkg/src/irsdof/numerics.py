"""Dense complex linear algebra kernels used by the solvers.

Everything here operates on small dense complex systems (tens of rows,
up to a few thousand columns).  Three solve flavours are provided:

* :func:`solve_square` -- exact solve of a well-conditioned square system,
* :func:`min_norm_solve` -- minimum Euclidean norm solution of a wide
  full-row-rank system,
* :func:`min_linf_feasible` -- feasibility of ``A x = b`` subject to a
  per-entry magnitude cap, with the smallest feasible cap refined by
  bisection over alternating projections.

The magnitude constraint ``|x_u| <= t`` describes a product of discs in
the complex plane, so the constrained set is convex and projection onto
it is an entrywise radial clip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import NonConvergentError, RankDeficientError, SingularMatrixError

# Relative condition-number ceiling beyond which a square solve is refused.
COND_LIMIT = 1e12

# Default relative singular-value cutoff for numerical rank decisions.
RANK_REL_TOL = 1e-10


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of a matrix together with the evidence for it.

    Attributes
    ----------
    rank : int
        Number of singular values above the cutoff.
    tolerance_used : float
        Absolute cutoff actually applied (``rel_tol * sigma_max``).
    singular_values : np.ndarray
        Full singular spectrum, descending.
    """

    rank: int
    tolerance_used: float
    singular_values: np.ndarray


def _as_complex_matrix(a, name: str = "A") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def _as_complex_vector(b, length: int, name: str = "b") -> np.ndarray:
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if b.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {b.shape[0]}")
    if not (np.all(np.isfinite(b.real)) and np.all(np.isfinite(b.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return b


def solve_square(a, b) -> np.ndarray:
    """Solve ``A x = b`` for square well-conditioned ``A``.

    Uses LAPACK LU with partial pivoting.  The condition number is
    estimated from the singular spectrum first; anything above
    ``COND_LIMIT`` (or exactly singular) raises
    :class:`~irsdof.errors.SingularMatrixError` rather than returning a
    garbage solution.
    """
    a = _as_complex_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"square solve needs a square matrix, got {a.shape}")
    b = _as_complex_vector(b, n)
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > COND_LIMIT:
        raise SingularMatrixError(
            f"condition number {np.inf if s[-1] == 0 else s[0] / s[-1]:.3e} "
            f"exceeds limit {COND_LIMIT:.1e}"
        )
    return np.linalg.solve(a, b)


def rank_of(a, rel_tol: float = RANK_REL_TOL) -> RankReport:
    """Numerical rank of ``a`` with cutoff ``rel_tol * sigma_max``.

    The report keeps the spectrum so callers can audit borderline
    decisions.  A zero matrix has rank 0 with ``tolerance_used`` 0.
    """
    a = _as_complex_matrix(a)
    if a.size == 0:
        raise ValueError("rank_of needs a non-empty matrix")
    s = np.linalg.svd(a, compute_uv=False)
    smax = float(s[0])
    tol = rel_tol * smax
    rank = int(np.count_nonzero(s > tol))
    return RankReport(rank=rank, tolerance_used=tol, singular_values=s)


def _gram_cholesky(a: np.ndarray):
    """Cholesky factor of ``A A^H``; raises RankDeficientError if it fails."""
    gram = a @ a.conj().T
    try:
        return cho_factor(gram, lower=True)
    except Exception as exc:
        raise RankDeficientError(f"Gram factorization failed: {exc}") from exc


def min_norm_solve(a, b) -> np.ndarray:
    """Minimum-norm solution ``A^H (A A^H)^{-1} b`` of a wide system.

    ``a`` must have at least as many columns as rows and full row rank;
    otherwise :class:`~irsdof.errors.RankDeficientError` is raised.  An
    empty system (zero rows) returns the all-zero vector, which is its
    minimum-norm solution.
    """
    a = _as_complex_matrix(a)
    m, q = a.shape
    if m > q:
        raise ValueError(f"min-norm solve needs rows <= columns, got {a.shape}")
    b = _as_complex_vector(b, m)
    if m == 0:
        return np.zeros(q, dtype=np.complex128)
    if rank_of(a).rank < m:
        raise RankDeficientError(f"row rank below {m}")
    cho = _gram_cholesky(a)
    return a.conj().T @ cho_solve(cho, b)


def _clip_to_polydisc(x: np.ndarray, t: float) -> np.ndarray:
    """Entrywise radial projection onto ``{x : |x_u| <= t}``."""
    mag = np.abs(x)
    scale = np.ones_like(mag)
    over = mag > t
    scale[over] = t / mag[over]
    return x * scale


def _affine_project(a, a_h, cho, x, b):
    """Orthogonal projection of ``x`` onto the affine set ``A x = b``."""
    resid = a @ x - b
    return x - a_h @ cho_solve(cho, resid)


def _polydisc_violation(x: np.ndarray, t: float) -> float:
    """How far ``x`` pokes out of the cap-``t`` polydisc (0 if inside)."""
    return float(max(np.max(np.abs(x)) - t, 0.0))


def _feasible_at(a, a_h, cho, b, t, start, max_iters: int = 500,
                 viol_tol: float = 1e-8):
    """Alternating projections between the affine set and the polydisc.

    Returns ``(feasible, witness)``.  The convergence quantity is the
    distance from the affine-set iterate to the polydisc: it tends to the
    distance between the two sets, so it separates empty from non-empty
    intersections (successive-iterate displacement does not, both cases
    drive it to zero).

    Asymptotically the distance decays as ``d_inf + c * r^iter`` with a
    fixed ratio r, which near the boundary gets close to 1 and would eat
    any fixed budget.  Both exits therefore use Aitken extrapolation of
    the distance sequence: a positive extrapolated limit (seen several
    times in a row) means the sets are disjoint, a vanishing one lets the
    affine iterate jump its remaining geometric tail in one step.  The
    jump is an affine combination of affine-set members, so the verified
    witness still satisfies ``A x = b`` exactly; feasibility is never
    declared without such a witness.
    """
    x = _clip_to_polydisc(start, t)
    d_prev2 = d_prev = np.inf
    aff_prev = None
    misses = 0
    for _ in range(max_iters):
        aff = _affine_project(a, a_h, cho, x, b)
        clipped = _clip_to_polydisc(aff, t)
        dist = float(np.linalg.norm(aff - clipped))
        if dist < viol_tol:
            return True, aff
        e1, e2 = d_prev - d_prev2, dist - d_prev
        if np.isfinite(e1) and e1 < 0.0 and e2 < 0.0 and e2 > e1:
            ratio = e2 / e1
            d_inf = dist + e2 * ratio / (1.0 - ratio)
            if d_inf < viol_tol and aff_prev is not None:
                jump = aff + (aff - aff_prev) * (ratio / (1.0 - ratio))
                if _polydisc_violation(jump, t) < viol_tol:
                    return True, jump
            if d_inf > 100.0 * viol_tol and ratio > 0.5:
                misses += 1
                if misses >= 5:
                    return False, None
            else:
                misses = 0
        elif dist > 0.999 * d_prev and dist > 100.0 * viol_tol:
            # plateau without a usable geometric model
            misses += 1
            if misses >= 5:
                return False, None
        d_prev2, d_prev = d_prev, dist
        aff_prev = aff
        x = clipped
    return False, None


def min_linf_feasible(a, b, cap: float, t_tol: float = 1e-4,
                      max_iters: int = 500):
    """Smallest magnitude cap under which ``A x = b`` stays solvable.

    Parameters
    ----------
    a, b : array_like
        Wide full-row-rank system (rows <= columns).
    cap : float
        Cap of interest; the returned flag reports ``t_star <= cap``.
    t_tol : float
        Absolute bisection tolerance on the cap.
    max_iters : int
        Alternating-projection budget per feasibility probe.

    Returns
    -------
    (feasible, t_star, witness)
        ``witness`` satisfies ``A x = b`` with ``max |x_u| <= t_star``
        up to the projection tolerance.

    Notes
    -----
    The bisection bracket is ``[max_r |b_r| / sum_u |A_ru|, max |x*|]``
    where ``x*`` is the min-norm solution: every solution obeys
    ``|b_r| <= max|x| * sum_u |A_ru|`` row by row, and ``x*`` itself is
    always admissible at its own sup-norm.  If the final verification
    probe at the returned cap fails,
    :class:`~irsdof.errors.NonConvergentError` is raised instead of
    reporting an unverified value.
    """
    a = _as_complex_matrix(a)
    m, q = a.shape
    if m > q:
        raise ValueError(f"min-linf needs rows <= columns, got {a.shape}")
    b = _as_complex_vector(b, m)
    if cap < 0:
        raise ValueError("cap must be non-negative")
    if m == 0:
        return True, 0.0, np.zeros(q, dtype=np.complex128)
    if rank_of(a).rank < m:
        raise RankDeficientError(f"row rank below {m}")

    a_h = a.conj().T
    cho = _gram_cholesky(a)
    x_star = a_h @ cho_solve(cho, b)
    upper = float(np.max(np.abs(x_star)))
    if upper <= t_tol:
        return bool(upper <= cap), upper, x_star
    if m == q:
        # Square full-rank system: the solution is unique, nothing to refine.
        return bool(upper <= cap), upper, x_star

    row_l1 = np.sum(np.abs(a), axis=1)
    lower = float(np.max(np.abs(b) / row_l1))
    lower = min(lower, upper)

    witness = x_star
    t_hi, t_lo = upper, lower
    start = x_star
    while t_hi - t_lo > t_tol:
        mid = 0.5 * (t_hi + t_lo)
        ok, w = _feasible_at(a, a_h, cho, b, mid, start, max_iters)
        if ok:
            t_hi = mid
            witness = w
            start = w
        else:
            t_lo = mid
    t_star = t_hi

    # Verify the reported cap actually admits a witness.
    if _polydisc_violation(witness, t_star) > 1e-6 * max(1.0, t_star):
        ok, w = _feasible_at(a, a_h, cho, b, t_star, witness, max_iters)
        if not ok:
            raise NonConvergentError(
                f"no witness at reported cap {t_star:.6g}"
            )
        witness = w
    return bool(t_star <= cap), t_star, witness


def linf_feasible_within(a, b, cap: float, max_iters: int = 500) -> bool:
    """Decision-only version of :func:`min_linf_feasible`.

    Answers "is there a solution with every ``|x_u| <= cap``" without
    refining the minimal cap; the Monte Carlo loops only need the event.
    Short-circuits on the min-norm upper bracket and the row-wise lower
    bracket before running projections at the single level ``cap``.
    """
    a = _as_complex_matrix(a)
    m, q = a.shape
    if m > q:
        raise ValueError(f"feasibility needs rows <= columns, got {a.shape}")
    b = _as_complex_vector(b, m)
    if m == 0:
        return True
    a_h = a.conj().T
    cho = _gram_cholesky(a)
    x_star = a_h @ cho_solve(cho, b)
    if float(np.max(np.abs(x_star))) <= cap:
        return True
    if m == q:
        return False
    row_l1 = np.sum(np.abs(a), axis=1)
    if float(np.max(np.abs(b) / row_l1)) > cap:
        return False
    ok, _ = _feasible_at(a, a_h, cho, b, cap, x_star, max_iters)
    return ok
