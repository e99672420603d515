"""Surface coefficient solvers and the feasibility events they decide.

The surface turns the direct channel ``H`` into the effective channel
``H + G2 diag(c) G1`` where ``G1`` collects transmitter-to-element gains,
``G2`` element-to-receiver gains and ``c`` the per-element reflection
coefficients.  Nulling a cross link (i, j) is one linear equation in
``c``; a connectivity pattern therefore induces a linear system whose
solvability under different amplitude constraints is what each solver
here decides:

* unconstrained amplitudes (amplifying surface): exact solve,
* amplitudes capped at 1 (passive surface): min-norm candidate plus the
  convex sup-norm feasibility event,
* amplitudes pinned near 1 (lossless / eps-relaxed surface): search over
  square element subsets, or pure phase alignment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, pi

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .errors import (
    SingularMatrixError,
    TooFewElementsError,
    TooManyTargetsError,
)
from .numerics import (
    COND_LIMIT,
    linf_feasible_within,
    min_linf_feasible,
    min_norm_solve,
    solve_square,
)
from .topology import NetworkMatrix, cancellation_set

_AMP_SLACK = 1e-9

# All-subset searches refuse to enumerate more candidates than this.
MAX_SUBSETS = 10_000


@dataclass(frozen=True)
class IrsMode:
    """Amplitude class a coefficient vector claims to satisfy."""

    variant: str
    epsilon: float | None = None

    _VARIANTS = ("active", "passive", "passive_lossless", "eps_relaxed")

    def __post_init__(self) -> None:
        if self.variant not in self._VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "eps_relaxed":
            if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
                raise ValueError("eps_relaxed needs epsilon in (0, 1)")
        elif self.epsilon is not None:
            raise ValueError(f"{self.variant} takes no epsilon")


ACTIVE = IrsMode("active")
PASSIVE = IrsMode("passive")
PASSIVE_LOSSLESS = IrsMode("passive_lossless")


def eps_relaxed_mode(epsilon: float) -> IrsMode:
    return IrsMode("eps_relaxed", epsilon)


@dataclass(frozen=True)
class IrsCoefficients:
    """Per-element reflection coefficients plus their claimed mode.

    Construction validates the mode's amplitude class with 1e-9 slack.
    Elements may always be switched off (coefficient 0) in the
    constrained modes; "lossless" constrains the elements actually used.
    """

    values: np.ndarray
    mode: IrsMode

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "values", v)
        mag = np.abs(v)
        if not np.all(np.isfinite(mag)):
            raise ValueError("coefficients must be finite")
        if self.mode.variant == "passive":
            if np.any(mag > 1.0 + _AMP_SLACK):
                raise ValueError("passive mode needs all magnitudes <= 1")
        elif self.mode.variant == "passive_lossless":
            used = mag > _AMP_SLACK
            if np.any(np.abs(mag[used] - 1.0) > _AMP_SLACK):
                raise ValueError("lossless mode needs unit magnitudes")
        elif self.mode.variant == "eps_relaxed":
            lo = 1.0 - float(self.mode.epsilon) - _AMP_SLACK
            used = mag > _AMP_SLACK
            if np.any(mag[used] > 1.0 + _AMP_SLACK) or np.any(mag[used] < lo):
                raise ValueError(
                    f"eps-relaxed mode needs used magnitudes in "
                    f"[{1.0 - self.mode.epsilon}, 1]"
                )

    @property
    def Q(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the passive-candidate solve for one pattern.

    ``pinv_feasible`` is the min-norm event (its solution already obeys
    the cap); ``linf_feasible`` the weaker convex event (some solution
    does).  The first implies the second.
    """

    network: NetworkMatrix
    pinv_feasible: bool
    linf_feasible: bool
    linf_value: float
    pinv_max_abs: float


@dataclass(frozen=True)
class SinrSample:
    """Per-user SINRs: joint, real part only, imaginary part only."""

    full: np.ndarray
    real_part: np.ndarray
    imag_part: np.ndarray


def pair_products(ch: ChannelRealization) -> np.ndarray:
    """Tensor P with ``P[i, j, u] = tx_to_irs[u, i] * irs_to_rx[j, u]``.

    Row (i, j) of any cancellation system is ``P[i, j, :]``.
    """
    return ch.tx_to_irs.T[:, None, :] * ch.irs_to_rx[None, :, :]


def build_cancellation_system(ch: ChannelRealization,
                              network: NetworkMatrix):
    """Linear system ``A c = b`` whose solutions null the absent links.

    One row per absent cross link (i, j), row-major; the right-hand side
    is the negated direct gain of that link.  Raises
    :class:`~irsdof.errors.TooManyTargetsError` when the pattern asks for
    more nulls than there are elements.
    """
    if network.K != ch.K:
        raise ValueError(f"pattern has K={network.K}, channel has K={ch.K}")
    pairs = cancellation_set(network).pairs
    if len(pairs) > ch.Q:
        raise TooManyTargetsError(
            f"{len(pairs)} links to null but only {ch.Q} elements"
        )
    prods = pair_products(ch)
    a = np.empty((len(pairs), ch.Q), dtype=np.complex128)
    b = np.empty(len(pairs), dtype=np.complex128)
    for r, (i, j) in enumerate(pairs):
        a[r, :] = prods[i, j, :]
        b[r] = -ch.direct[j, i]
    return a, b


def solve_active(ch: ChannelRealization, network: NetworkMatrix) -> IrsCoefficients:
    """Exact nulling with unconstrained amplitudes.

    Square solve when targets equal elements, min-norm solve when fewer.
    """
    a, b = build_cancellation_system(ch, network)
    if a.shape[0] == a.shape[1]:
        coeffs = solve_square(a, b)
    else:
        coeffs = min_norm_solve(a, b)
    return IrsCoefficients(values=coeffs, mode=ACTIVE)


def solve_passive_candidate(ch: ChannelRealization, network: NetworkMatrix,
                            cap: float = 1.0):
    """Min-norm candidate plus both unit-cap feasibility events.

    Returns ``(coefficients, report)``.  The coefficient vector is always
    the min-norm solution; its mode is passive exactly when that solution
    already respects the cap, otherwise it is labeled active.
    """
    a, b = build_cancellation_system(ch, network)
    candidate = min_norm_solve(a, b)
    pinv_max = float(np.max(np.abs(candidate))) if candidate.size else 0.0
    pinv_ok = bool(pinv_max <= cap)
    if pinv_ok:
        linf_ok, linf_val = True, pinv_max
        if a.shape[0] > 0:
            linf_ok, linf_val, _ = min_linf_feasible(a, b, cap)
    else:
        linf_ok, linf_val, _ = min_linf_feasible(a, b, cap)
    report = FeasibilityReport(
        network=network,
        pinv_feasible=pinv_ok,
        linf_feasible=bool(linf_ok),
        linf_value=float(linf_val),
        pinv_max_abs=pinv_max,
    )
    mode = PASSIVE if pinv_ok else ACTIVE
    return IrsCoefficients(values=candidate, mode=mode), report


def _full_target_rhs(ch: ChannelRealization) -> np.ndarray:
    """RHS of the K^2-row system: null every cross link, keep zeros on diag."""
    k = ch.K
    rhs = -ch.direct.T.reshape(k * k).copy()
    rhs[:: k + 1] = 0.0
    return rhs


def _rows_matrix(ch: ChannelRealization) -> np.ndarray:
    """All K^2 cancellation rows, row-major over (i, j), shape (K^2, Q)."""
    k = ch.K
    return pair_products(ch).reshape(k * k, ch.Q)


def eps_block_extremes(ch: ChannelRealization) -> list[tuple[float, float]]:
    """Per disjoint K^2-element block: (min, max) coefficient magnitude.

    Solves the full K^2-target system exactly on each block of elements
    ``[m K^2, (m+1) K^2)``.  Singular or ill-conditioned blocks report
    ``(inf, inf)`` so no amplitude band accepts them.  The magnitudes do
    not depend on any relaxation level, so one call serves every band.
    """
    k = ch.K
    n_rows = k * k
    n_blocks = ch.Q // n_rows
    if n_blocks == 0:
        raise TooFewElementsError(
            f"need at least {n_rows} elements, got {ch.Q}"
        )
    rows = _rows_matrix(ch)
    rhs = _full_target_rhs(ch)
    stacks = rows[:, : n_blocks * n_rows].reshape(n_rows, n_blocks, n_rows)
    stacks = np.ascontiguousarray(stacks.transpose(1, 0, 2))
    sv = np.linalg.svd(stacks, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_ok = (sv[:, -1] > 0.0) & (sv[:, 0] / sv[:, -1] <= COND_LIMIT)
    out: list[tuple[float, float]] = [(np.inf, np.inf)] * n_blocks
    idx = np.nonzero(cond_ok)[0]
    if idx.size:
        rhs_cols = np.tile(rhs[:, None], (idx.size, 1, 1))
        try:
            sols = np.linalg.solve(stacks[idx], rhs_cols)[:, :, 0]
        except np.linalg.LinAlgError:
            sols = None
        if sols is None:
            for m in idx:
                try:
                    c = np.linalg.solve(stacks[m], rhs)
                except np.linalg.LinAlgError:
                    continue
                mag = np.abs(c)
                out[m] = (float(mag.min()), float(mag.max()))
        else:
            mags = np.abs(sols)
            for row, m in enumerate(idx):
                out[m] = (float(mags[row].min()), float(mags[row].max()))
    return out


def _band_accepts(lo: float, hi: float, epsilon: float) -> bool:
    return lo >= 1.0 - epsilon - _AMP_SLACK and hi <= 1.0 + _AMP_SLACK


def eps_relaxed_lambda(ch: ChannelRealization, epsilon: float,
                       strategy: str = "disjoint_blocks"):
    """Does some K^2-element subset null all cross links with magnitudes
    in [1 - epsilon, 1]?

    Returns ``(indicator, witness_or_None)``.  ``disjoint_blocks`` checks
    only the floor(Q / K^2) disjoint element blocks (a valid lower bound
    on the event); ``all_subsets`` is exact but refuses more than
    ``MAX_SUBSETS`` candidate subsets.  Subsets whose square system is
    singular simply fail.  In the epsilon -> 1 limit the band becomes
    (0, 1] and the event reduces to passive feasibility of the subset
    solve.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    k = ch.K
    n_rows = k * k
    if ch.Q < n_rows:
        raise TooFewElementsError(
            f"need at least {n_rows} elements, got {ch.Q}"
        )
    rows = _rows_matrix(ch)
    rhs = _full_target_rhs(ch)

    def witness_from(subset, coeffs) -> IrsCoefficients:
        full = np.zeros(ch.Q, dtype=np.complex128)
        full[list(subset)] = coeffs
        return IrsCoefficients(values=full, mode=eps_relaxed_mode(epsilon))

    if strategy == "disjoint_blocks":
        extremes = eps_block_extremes(ch)
        for m, (lo, hi) in enumerate(extremes):
            if _band_accepts(lo, hi, epsilon):
                subset = range(m * n_rows, (m + 1) * n_rows)
                coeffs = solve_square(rows[:, subset], rhs)
                return True, witness_from(subset, coeffs)
        return False, None
    if strategy == "all_subsets":
        n_subsets = comb(ch.Q, n_rows)
        if n_subsets > MAX_SUBSETS:
            raise ValueError(
                f"{n_subsets} subsets exceed the cap {MAX_SUBSETS}; "
                "use disjoint_blocks"
            )
        for subset in itertools.combinations(range(ch.Q), n_rows):
            try:
                coeffs = solve_square(rows[:, subset], rhs)
            except SingularMatrixError:
                continue
            mag = np.abs(coeffs)
            if _band_accepts(float(mag.min()), float(mag.max()), epsilon):
                return True, witness_from(subset, coeffs)
        return False, None
    raise ValueError(f"unknown strategy {strategy!r}")


def lossless_phase_align(ch: ChannelRealization) -> IrsCoefficients:
    """Unit-modulus coefficients that co-phase each user's own link.

    Elements are split into K equal groups of n = floor(Q / K); group k
    serves user k with phase ``-(arg G1[u, k] + arg G2[k, u]) + pi/4``,
    so every served element contributes its gain magnitude at 45 degrees
    (equal real and imaginary parts, which keeps both quadrature halves
    of the direct link strong).  Leftover elements are switched off.
    """
    k, q = ch.K, ch.Q
    n = q // k
    coeffs = np.zeros(q, dtype=np.complex128)
    for user in range(k):
        for u in range(user * n, (user + 1) * n):
            phase = (-np.angle(ch.tx_to_irs[u, user])
                     - np.angle(ch.irs_to_rx[user, u]) + pi / 4.0)
            coeffs[u] = np.exp(1j * phase)
    return IrsCoefficients(values=coeffs, mode=PASSIVE_LOSSLESS)


def effective_channel(ch: ChannelRealization,
                      coeffs: IrsCoefficients | np.ndarray) -> np.ndarray:
    """Direct channel plus the surface's rank-Q correction."""
    values = coeffs.values if isinstance(coeffs, IrsCoefficients) else np.asarray(coeffs)
    if values.shape[0] != ch.Q:
        raise ValueError(f"expected {ch.Q} coefficients, got {values.shape[0]}")
    return ch.direct + (ch.irs_to_rx * values[None, :]) @ ch.tx_to_irs


def sinr_triplet(ch: ChannelRealization, coeffs: IrsCoefficients,
                 cfg: SystemConfig) -> SinrSample:
    """Per-user SINRs of the effective channel under ``cfg`` powers.

    ``full`` treats each complex symbol jointly; ``real_part`` and
    ``imag_part`` score the two quadrature halves separately (each gets
    half the transmit power and half the noise).  The joint value is a
    power-weighted mediant of the halves, so
    ``full >= min(real_part, imag_part)`` entrywise.
    """
    heff = effective_channel(ch, coeffs)
    rho, n0 = cfg.snr_rho, cfg.noise_n0
    re2 = heff.real ** 2
    im2 = heff.imag ** 2
    k = ch.K
    diag = np.arange(k)
    sig_full = (re2[diag, diag] + im2[diag, diag]) * rho
    tot = (re2 + im2).sum(axis=1) - (re2[diag, diag] + im2[diag, diag])
    full = sig_full / (tot * rho + n0)
    sig_r = re2[diag, diag] * (rho / 2.0)
    int_r = (re2.sum(axis=1) - re2[diag, diag]) * (rho / 2.0) + n0 / 2.0
    sig_i = im2[diag, diag] * (rho / 2.0)
    int_i = (im2.sum(axis=1) - im2[diag, diag]) * (rho / 2.0) + n0 / 2.0
    return SinrSample(full=full, real_part=sig_r / int_r,
                      imag_part=sig_i / int_i)


def passive_feasibility_within(ch: ChannelRealization,
                               network: NetworkMatrix,
                               cap: float = 1.0) -> bool:
    """Decision-only passive feasibility of one pattern (the convex event)."""
    a, b = build_cancellation_system(ch, network)
    return linf_feasible_within(a, b, cap)
