"""System geometry, fading variances and channel sampling.

A scenario is a K-user interference network with Q reconfigurable
elements sitting between the transmitter and receiver sides.  All links
are i.i.d. circularly-symmetric complex Gaussians; the per-hop variances
follow free-space path loss at the configured carrier wavelength, with an
extra multiplicative blockage factor on the direct (transmitter to
receiver) paths.

Indexing is 0-based throughout: ``direct[j, i]`` is the gain from
transmitter ``i`` to receiver ``j``, ``tx_to_irs[u, i]`` from transmitter
``i`` to element ``u``, and ``irs_to_rx[j, u]`` from element ``u`` to
receiver ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .montecarlo import RandomStream


@dataclass(frozen=True)
class SystemConfig:
    """Static description of one simulated scenario.

    Attributes
    ----------
    K : int
        Number of transmitter/receiver pairs (>= 1; the bound estimators
        assume >= 2, single-user configs exist for solver-level checks).
    Q : int
        Number of reflecting elements (>= 0).
    wavelength_m : float
        Carrier wavelength in metres.
    dist_irs_m : float
        Node-to-surface distance used for both hops, metres.
    dist_direct_m : float
        Transmitter-to-receiver distance, metres.
    blockage : float
        Multiplicative variance factor on the direct paths, in (0, 1].
    snr_rho : float
        Transmit power to noise ratio used by SINR evaluations.
    noise_n0 : float
        Noise power.
    """

    K: int
    Q: int
    wavelength_m: float = 0.06
    dist_irs_m: float = 25.0 * math.sqrt(2.0)
    dist_direct_m: float = 25.0 * math.sqrt(2.0)
    blockage: float = 1.0
    snr_rho: float = 1.0
    noise_n0: float = 1.0

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.Q < 0:
            raise ValueError(f"Q must be >= 0, got {self.Q}")
        for field in ("wavelength_m", "dist_irs_m", "dist_direct_m",
                      "snr_rho", "noise_n0"):
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be positive")
        if not 0.0 < self.blockage <= 1.0:
            raise ValueError(f"blockage must be in (0, 1], got {self.blockage}")


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn set of complex gains for a scenario.

    Shapes: ``direct`` is (K, K), ``tx_to_irs`` is (Q, K), ``irs_to_rx``
    is (K, Q).
    """

    direct: np.ndarray
    tx_to_irs: np.ndarray
    irs_to_rx: np.ndarray

    def __post_init__(self) -> None:
        k = self.direct.shape[0]
        if self.direct.shape != (k, k):
            raise ValueError(f"direct must be square, got {self.direct.shape}")
        q = self.tx_to_irs.shape[0]
        if self.tx_to_irs.shape != (q, k):
            raise ValueError(
                f"tx_to_irs must be (Q, K) = ({q}, {k}), got {self.tx_to_irs.shape}"
            )
        if self.irs_to_rx.shape != (k, q):
            raise ValueError(
                f"irs_to_rx must be (K, Q) = ({k}, {q}), got {self.irs_to_rx.shape}"
            )

    @property
    def K(self) -> int:
        return self.direct.shape[0]

    @property
    def Q(self) -> int:
        return self.tx_to_irs.shape[0]


def variance_params(cfg: SystemConfig) -> tuple[float, float]:
    """Per-hop variances (sigma1_sq, sigma2_sq) implied by the geometry.

    sigma1_sq applies to both surface hops, sigma2_sq to the direct paths:

    >>> cfg = SystemConfig(K=3, Q=9)
    >>> s1, s2 = variance_params(cfg)
    >>> round(s1 / 1e-8, 4)
    1.8238
    """
    s1 = (cfg.wavelength_m / (4.0 * math.pi * cfg.dist_irs_m)) ** 2
    s2 = cfg.blockage * (cfg.wavelength_m / (4.0 * math.pi * cfg.dist_direct_m)) ** 2
    return s1, s2


def _cn_sample(rng: np.random.Generator, variance: float, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with the given total variance."""
    scale = math.sqrt(variance / 2.0)
    z = rng.standard_normal(size=(*shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * scale


def sample(cfg: SystemConfig, stream: RandomStream) -> ChannelRealization:
    """Draw one realization from its dedicated substream.

    The draw order is fixed: the (K, K) direct block first, then one
    block per surface element (its incoming row followed by its outgoing
    column).  Two configs differing only in Q therefore agree on the
    direct block and on the first min(Q, Q') element blocks when sampled
    from the same stream, which keeps per-sample comparisons across Q
    meaningful.
    """
    rng = stream.generator()
    s1, s2 = variance_params(cfg)
    k, q = cfg.K, cfg.Q
    direct = _cn_sample(rng, s2, (k, k))
    tx_to_irs = np.empty((q, k), dtype=np.complex128)
    irs_to_rx = np.empty((k, q), dtype=np.complex128)
    for u in range(q):
        block = _cn_sample(rng, s1, (2, k))
        tx_to_irs[u, :] = block[0]
        irs_to_rx[:, u] = block[1]
    return ChannelRealization(direct=direct, tx_to_irs=tx_to_irs,
                              irs_to_rx=irs_to_rx)
