"""Desk-scale certification of product-form alignment constructions.

Transmitters extend their signal over T channel uses and beamform along
columns of the form ``prod_l (w_l)^{a_l}`` where ``w_l`` is the slot
vector of one present cross link and the integer exponents ``a_l`` run
over small per-user, per-link ranges.  Multiplying such a column by a
cross-link slot vector bumps one exponent, so every receiver's
interference lands inside a slightly enlarged common exponent grid while
its own message keeps a factor of the direct link that no interference
column has.  Certification draws actual slot channels (with the surface
realizing the connectivity pattern), builds the columns and checks the
three ranks receiver by receiver.

Everything is deliberately small: the point is exact rank bookkeeping at
desk scale, not throughput.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import SystemConfig, sample
from .errors import NotDecodableError, SingularMatrixError, SizeOverflowError
from .irs import effective_channel, solve_active
from .montecarlo import RandomStream
from .numerics import rank_of
from .topology import NetworkMatrix, cancellation_set

MAX_USERS = 4
MAX_LINKS = 6
DEFAULT_BUDGET = 4096


@dataclass(frozen=True)
class IaConfig:
    """One alignment construction: pattern, extension order, exponent ranges.

    ``message_ranges[i][l]`` is how many exponent values (0-based, so
    ``0 .. r-1``) user ``i`` uses on present cross link ``l``; the link
    order is row-major over (tx, rx).  ``slots`` is the extension length
    T the construction budgets for.
    """

    network: NetworkMatrix
    n: int
    user_caps: tuple[Fraction, ...]
    message_ranges: tuple[tuple[int, ...], ...]
    slots: int
    label: str
    links: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self) -> None:
        k = self.network.K
        if k > MAX_USERS:
            raise ValueError(f"at most {MAX_USERS} users, got {k}")
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 2, got {self.n}")
        links = tuple(
            (i, j)
            for i in range(k)
            for j in range(k)
            if i != j and self.network.bits[i][j] == 1
        )
        if len(links) > MAX_LINKS:
            raise ValueError(f"at most {MAX_LINKS} present cross links, got {len(links)}")
        object.__setattr__(self, "links", links)
        if len(self.user_caps) != k or len(self.message_ranges) != k:
            raise ValueError("need caps and ranges for every user")
        for i, ranges in enumerate(self.message_ranges):
            if len(ranges) != len(links):
                raise ValueError(f"user {i} needs one range per link")
            if any(r < 1 for r in ranges):
                raise ValueError("ranges must be >= 1")
        if self.slots < 1:
            raise ValueError("slots must be >= 1")

    @property
    def K(self) -> int:
        return self.network.K

    def message_dim(self, user: int) -> int:
        return math.prod(self.message_ranges[user])

    def interferers(self, receiver: int) -> tuple[int, ...]:
        bits = self.network.bits
        return tuple(i for i in range(self.K)
                     if i != receiver and bits[i][receiver] == 1)

    def interference_counts(self, receiver: int) -> tuple[int, ...] | None:
        """Exponent counts of the enlarged grid at one receiver.

        Per link: the largest message range any interferer uses, plus one
        (the bump a cross-link multiplication adds).  None when the
        receiver hears no interference.
        """
        sources = self.interferers(receiver)
        if not sources:
            return None
        return tuple(
            max(self.message_ranges[i][l] for i in sources) + 1
            for l in range(len(self.links))
        )

    def interference_dim(self, receiver: int) -> int:
        counts = self.interference_counts(receiver)
        return 0 if counts is None else math.prod(counts)


def generic_config(network: NetworkMatrix, n: int,
                   user_caps: tuple[Fraction, ...]) -> IaConfig:
    """Uniform construction: user i uses range cap_i * n on every link.

    Extension length is the full enlarged grid, (n+1) ** L.
    """
    caps = tuple(Fraction(c) for c in user_caps)
    k = network.K
    if len(caps) != k:
        raise ValueError("need one cap per user")
    ranges = []
    for c in caps:
        r = c * n
        if r.denominator != 1 or r < 1:
            raise ValueError(f"cap {c} times n={n} must be a positive integer")
        ranges.append(int(r))
    links = sum(
        1 for i in range(k) for j in range(k)
        if i != j and network.bits[i][j] == 1
    )
    slots = (n + 1) ** links
    message_ranges = tuple(tuple(r for _ in range(links)) for r in ranges)
    return IaConfig(network=network, n=n, user_caps=caps,
                    message_ranges=message_ranges, slots=slots,
                    label="generic")


def example1_config(n: int) -> IaConfig:
    """Preset: three mutually interfering users plus one isolated user.

    Users 0-2 cap one designated link (the last in row-major order) at
    n/2 and use n elsewhere; the isolated user uses n everywhere.  The
    extension length is exactly the message size of a capped user plus
    the enlarged grid: n^6 / 2 + (n+1)^5 (n/2 + 1).
    """
    network = NetworkMatrix.from_lines(["1110", "1110", "1110", "0001"])
    if n < 2 or n % 2 != 0:
        raise ValueError(f"n must be even and >= 2, got {n}")
    half = n // 2
    capped = (n, n, n, n, n, half)
    uncapped = (n, n, n, n, n, n)
    slots = (n ** 6) // 2 + (n + 1) ** 5 * (half + 1)
    return IaConfig(
        network=network,
        n=n,
        user_caps=(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1)),
        message_ranges=(capped, capped, capped, uncapped),
        slots=slots,
        label="example1",
    )


@dataclass(frozen=True)
class ReceiverReport:
    """Certified (or counted) subspace dimensions at one receiver."""

    dim_message: int
    dim_interference: int
    joint_rank: int
    decodable: bool


@dataclass(frozen=True)
class SubspaceReport:
    receivers: tuple[ReceiverReport, ...]
    slots: int

    @property
    def all_decodable(self) -> bool:
        return all(r.decodable for r in self.receivers)


@dataclass(frozen=True)
class DofPoint:
    """Exact per-user and total achieved DoF of a certified construction."""

    per_user: tuple[Fraction, ...]
    total: Fraction


def effective_slot_channels(cfg: IaConfig, seed: int,
                            budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Draw T effective channels realizing the pattern, one per slot.

    Unit-variance geometry; the surface gets exactly as many elements as
    the pattern has absent links, so each slot is a square nulling solve.
    A slot whose solve is too ill-conditioned is redrawn from a shifted
    substream (deterministic in the seed).
    """
    if cfg.slots > budget:
        raise SizeOverflowError(f"{cfg.slots} slots exceed budget {budget}")
    k = cfg.K
    pairs = cancellation_set(cfg.network).pairs
    sys_cfg = SystemConfig(K=k, Q=len(pairs), wavelength_m=4.0 * math.pi,
                           dist_irs_m=1.0, dist_direct_m=1.0)
    out = np.empty((cfg.slots, k, k), dtype=np.complex128)
    for t in range(cfg.slots):
        for attempt in range(3):
            stream = RandomStream(seed=seed,
                                  substream_index=attempt * cfg.slots + t)
            ch = sample(sys_cfg, stream)
            try:
                coeffs = solve_active(ch, cfg.network)
            except SingularMatrixError:
                continue
            out[t] = effective_channel(ch, coeffs)
            break
        else:
            raise SingularMatrixError(
                f"slot {t}: no well-conditioned draw in 3 attempts"
            )
    return out


def _prescaled_link_vectors(cfg: IaConfig, slot_channels: np.ndarray) -> list[np.ndarray]:
    """Per present link: its T slot gains, scaled to unit max magnitude.

    Per-column rescaling leaves every span unchanged but keeps repeated
    powers inside a sane float range.
    """
    vecs = []
    for (i, j) in cfg.links:
        v = slot_channels[:, j, i].copy()
        top = float(np.max(np.abs(v)))
        if top == 0.0:
            raise ValueError(f"link ({i}, {j}) is identically zero")
        vecs.append(v / top)
    return vecs


def _grid_columns(vectors: list[np.ndarray], counts, t: int) -> np.ndarray:
    """All products prod_l v_l^{e_l}, e_l in 0..counts[l]-1, lexicographic.

    The first link is the most significant digit of the column index.
    """
    cols = np.ones((t, 1), dtype=np.complex128)
    for vec, cnt in zip(vectors, counts):
        powers = np.empty((t, cnt), dtype=np.complex128)
        powers[:, 0] = 1.0
        for e in range(1, cnt):
            powers[:, e] = powers[:, e - 1] * vec
        cols = (cols[:, :, None] * powers[:, None, :]).reshape(t, -1)
    return cols


def _unit_columns(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("zero column while normalizing")
    return m / norms[None, :]


def _balanced(m: np.ndarray, rounds: int = 10) -> np.ndarray:
    """Alternate row/column norm scaling (rank-preserving).

    Monomial matrices concentrate their mass on slots where every link
    happens to be strong; the raw singular spectrum then hides the true
    rank below any reasonable tolerance.  Diagonal scalings cannot change
    the rank, so the certified rank of the balanced matrix is the rank of
    the original.
    """
    out = m.copy()
    for _ in range(rounds):
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        out /= np.linalg.norm(out, axis=0, keepdims=True)
    return out


def build_beamformers(cfg: IaConfig, slot_channels: np.ndarray,
                      budget: int = DEFAULT_BUDGET) -> list[np.ndarray]:
    """Per-user beamforming columns over the T slots, unit L2 columns.

    Raises :class:`~irsdof.errors.SizeOverflowError` when the extension
    length or any user's column count exceeds the budget.
    """
    t = cfg.slots
    if slot_channels.shape != (t, cfg.K, cfg.K):
        raise ValueError(
            f"slot_channels must be ({t}, {cfg.K}, {cfg.K}), got {slot_channels.shape}"
        )
    if t > budget:
        raise SizeOverflowError(f"{t} slots exceed budget {budget}")
    for i in range(cfg.K):
        if cfg.message_dim(i) > budget:
            raise SizeOverflowError(
                f"user {i} asks for {cfg.message_dim(i)} columns, budget {budget}"
            )
    vecs = _prescaled_link_vectors(cfg, slot_channels)
    out = []
    for i in range(cfg.K):
        grid = _grid_columns(vecs, cfg.message_ranges[i], t)
        out.append(_unit_columns(grid))
    return out


def certify(cfg: IaConfig, slot_channels: np.ndarray,
            beamformers: list[np.ndarray] | None = None,
            budget: int = DEFAULT_BUDGET) -> SubspaceReport:
    """Numerically certify message/interference separation at each receiver.

    Message columns are the user's beamformers scaled by the direct
    link; the interference space is generated by the receiver's enlarged
    exponent grid (which contains every bumped interference column, see
    :func:`interference_containment_residual`).  Decodable means the
    joint rank is exactly the sum of the two dimensions.
    """
    if beamformers is None:
        beamformers = build_beamformers(cfg, slot_channels, budget=budget)
    t = cfg.slots
    vecs = _prescaled_link_vectors(cfg, slot_channels)
    reports = []
    for j in range(cfg.K):
        direct = slot_channels[:, j, j]
        message = _unit_columns(direct[:, None] * beamformers[j])
        counts = cfg.interference_counts(j)
        if counts is None:
            interference = None
            dim_int = 0
        else:
            if math.prod(counts) > budget:
                raise SizeOverflowError(
                    f"receiver {j} interference grid "
                    f"{math.prod(counts)} exceeds budget {budget}"
                )
            interference = _unit_columns(_grid_columns(vecs, counts, t))
            dim_int = rank_of(_balanced(interference)).rank
        dim_msg = rank_of(_balanced(message)).rank
        if interference is None:
            joint = dim_msg
        else:
            joint = rank_of(_balanced(np.hstack([message, interference]))).rank
        reports.append(ReceiverReport(
            dim_message=dim_msg,
            dim_interference=dim_int,
            joint_rank=joint,
            decodable=bool(joint == dim_msg + dim_int),
        ))
    return SubspaceReport(receivers=tuple(reports), slots=t)


def interference_containment_residual(cfg: IaConfig, slot_channels: np.ndarray,
                                      beamformers: list[np.ndarray],
                                      receiver: int) -> float:
    """Largest relative residual of actual interference columns outside
    the receiver's enlarged grid (0 when the receiver hears none)."""
    counts = cfg.interference_counts(receiver)
    if counts is None:
        return 0.0
    t = cfg.slots
    vecs = _prescaled_link_vectors(cfg, slot_channels)
    grid = _grid_columns(vecs, counts, t)
    q, _ = np.linalg.qr(grid)
    worst = 0.0
    for i in cfg.interferers(receiver):
        gain = slot_channels[:, receiver, i]
        cols = gain[:, None] * beamformers[i]
        resid = cols - q @ (q.conj().T @ cols)
        rel = np.linalg.norm(resid, axis=0) / np.linalg.norm(cols, axis=0)
        worst = max(worst, float(rel.max()))
    return worst


def predicted_report(cfg: IaConfig) -> SubspaceReport:
    """Counting-only version of :func:`certify` (generic-position dims).

    Useful when the extension length exceeds the numeric budget; at
    certifiable sizes it must agree with the numeric report.
    """
    reports = []
    for j in range(cfg.K):
        dim_msg = cfg.message_dim(j)
        dim_int = cfg.interference_dim(j)
        joint = min(cfg.slots, dim_msg + dim_int)
        reports.append(ReceiverReport(
            dim_message=dim_msg,
            dim_interference=dim_int,
            joint_rank=joint,
            decodable=bool(dim_msg + dim_int <= cfg.slots),
        ))
    return SubspaceReport(receivers=tuple(reports), slots=cfg.slots)


def achieved_dof(cfg: IaConfig, report: SubspaceReport) -> DofPoint:
    """Exact per-user DoF ``dim_message / slots`` of a decodable report.

    Raises :class:`~irsdof.errors.NotDecodableError` when any receiver's
    subspaces overlap.
    """
    bad = [j for j, r in enumerate(report.receivers) if not r.decodable]
    if bad:
        raise NotDecodableError(f"receivers {bad} are not decodable")
    per_user = tuple(
        Fraction(r.dim_message, report.slots) for r in report.receivers
    )
    return DofPoint(per_user=per_user, total=sum(per_user, Fraction(0)))
