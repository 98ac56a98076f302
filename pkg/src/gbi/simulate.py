"""Monte Carlo simulation of the broadcast protocols.

Each round, the parties on the source side of the splitting privately draw a
correlated pair and the broadcast variable, publish the broadcast, and every
party adds its displacement multiple of the broadcast to its private draw.
Rounds are processed in fixed chunks; chunk k draws from
``default_rng(SeedSequence([seed, k]))`` and the chunk Gram matrices are
combined by a fixed pairwise tree, so serial and threaded runs produce
bitwise-identical reports.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bound_info import SplittingProtocol, compose_protocol
from .errors import DomainError
from .gaussian import _pd_cholesky
from .quantum import purification_x_matrix

CHUNK_ROUNDS = 1 << 16
MIN_ROUNDS = 10_000


@dataclass(frozen=True)
class Party:
    """One honest participant: private sources plus its displacement rule.

    ``displacement_rule`` maps each output variable to ``(private source,
    broadcast coefficient)``: output = source + coefficient * broadcast.
    """

    name: str
    private_sources: tuple[str, ...]
    displacement_rule: dict[str, tuple[str, float]]


@dataclass(frozen=True)
class SimReport:
    """Empirical-versus-analytic comparison of one simulation run."""

    protocol: str
    r: float
    n_rounds: int
    seed: int
    labels: tuple[str, ...]
    empirical_ccm: np.ndarray
    analytic_ccm: np.ndarray
    max_abs_dev: float
    max_dev_in_se: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "protocol": self.protocol,
                "r": self.r,
                "n": self.n_rounds,
                "seed": self.seed,
                "labels": list(self.labels),
                "empirical_ccm": self.empirical_ccm.tolist(),
                "analytic_ccm": self.analytic_ccm.tolist(),
                "max_abs_dev": self.max_abs_dev,
                "max_dev_in_se": self.max_dev_in_se,
            },
            indent=2,
        )


def build_parties(p: SplittingProtocol) -> tuple[tuple[Party, ...], str]:
    """Party records for a protocol, plus the label of the broadcast variable.

    The first party on the pair side additionally owns the broadcast source;
    the lone party receives the broadcast over the public channel only.
    """
    names = {"A": "Alice", "B": "Bob", "C": "Clare"}
    src = {party: f"z_{party}" for party in ("A", "B", "C")}
    parties = []
    for party in ("A", "B", "C"):
        owns_broadcast = party == p.pair[0]
        parties.append(
            Party(
                name=names[party],
                private_sources=(src[party], p.public_label) if owns_broadcast else (src[party],),
                displacement_rule={party: (src[party], p.coeffs_x[party])},
            )
        )
    return tuple(parties), p.public_label


def public_channel_ok(parties: tuple[Party, ...], lone_party: str, broadcast: str) -> bool:
    """Structural one-broadcast discipline check.

    The lone party must not own the broadcast source, and its displacement
    may reference only its own private draws plus the broadcast coefficient;
    the broadcast must be owned on the other side of the splitting.
    """
    lone = next((p for p in parties if p.name == lone_party), None)
    if lone is None or broadcast in lone.private_sources:
        return False
    for source, _coeff in lone.displacement_rule.values():
        if source not in lone.private_sources:
            return False
    owners = [p for p in parties if broadcast in p.private_sources and p.name != lone_party]
    return len(owners) == 1


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(n, CHUNK_ROUNDS)
    return [CHUNK_ROUNDS] * full + ([rest] if rest else [])


def _pairwise_sum(mats: list[np.ndarray]) -> np.ndarray:
    while len(mats) > 1:
        mats = [
            mats[i] + mats[i + 1] if i + 1 < len(mats) else mats[i]
            for i in range(0, len(mats), 2)
        ]
    return mats[0]


def _accumulate(
    sizes: list[int],
    seed: int,
    draw_chunk: Callable[[np.random.Generator, int], np.ndarray],
    threads: int,
) -> np.ndarray:
    def gram(k: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), k]))
        rows = draw_chunk(rng, sizes[k])
        return rows.T @ rows

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grams = list(pool.map(gram, range(len(sizes))))
    else:
        grams = [gram(k) for k in range(len(sizes))]
    return _pairwise_sum(grams)


def _check_run_args(n: int, seed: int) -> None:
    if n < MIN_ROUNDS:
        raise DomainError(f"need at least {MIN_ROUNDS} rounds, got {n}")
    if not (0 <= int(seed) < 2**64):
        raise DomainError("seed must be an unsigned 64-bit integer")


def _report(protocol, r, n, seed, labels, gram_total, analytic) -> SimReport:
    empirical = 2.0 * gram_total / n
    empirical = 0.5 * (empirical + empirical.T)
    dev = np.abs(empirical - analytic)
    # SE of a CCM entry from Gaussian fourth moments, in CCM scale:
    # sqrt((X_ii X_jj + X_ij^2) / n)
    diag = np.diagonal(analytic)
    se = np.sqrt((np.outer(diag, diag) + analytic**2) / n)
    return SimReport(
        protocol=protocol,
        r=r,
        n_rounds=int(n),
        seed=int(seed),
        labels=tuple(labels),
        empirical_ccm=empirical,
        analytic_ccm=np.array(analytic),
        max_abs_dev=float(np.max(dev)),
        max_dev_in_se=float(np.max(dev / se)),
    )


def simulate(p: SplittingProtocol, n: int, seed: int, threads: int = 1) -> SimReport:
    """Run the broadcast protocol for ``n`` rounds and compare with the algebra."""
    _check_run_args(n, seed)
    parties, broadcast = build_parties(p)
    lone_name = {"A": "Alice", "B": "Bob", "C": "Clare"}[p.lone]
    if not public_channel_ok(parties, lone_name, broadcast):
        raise DomainError("protocol violates the single-broadcast discipline")
    pair_chol = _pd_cholesky(p.private_ccm, "private pair CCM") / math.sqrt(2.0)
    solo_sd = math.sqrt(p.solo_variance)
    public_sd = math.sqrt(p.public_variance)
    src_col = {f"z_{p.pair[0]}": 0, f"z_{p.pair[1]}": 1, f"z_{p.lone}": 2}
    rules = {}
    for party in parties:
        rules.update(party.displacement_rule)

    def draw_chunk(rng: np.random.Generator, m: int) -> np.ndarray:
        normals = rng.standard_normal((m, 4))
        sources = np.empty((m, 4))
        sources[:, :2] = normals[:, :2] @ pair_chol.T
        sources[:, 2] = normals[:, 2] * solo_sd
        sources[:, 3] = normals[:, 3] * public_sd   # the broadcast, tagged public
        out = np.empty((m, 4))
        for col, party in enumerate(("A", "B", "C")):
            source, coeff = rules[party]
            out[:, col] = sources[:, src_col[source]] + coeff * sources[:, 3]
        out[:, 3] = sources[:, 3]
        return out

    gram = _accumulate(_chunk_sizes(n), seed, draw_chunk, threads)
    analytic = compose_protocol(p)
    return _report(p.splitting, p.r, n, seed, analytic.labels, gram, analytic.ccm)


def simulate_full(r: float, n: int, seed: int, threads: int = 1) -> SimReport:
    """Sample the five-variable source distribution directly as an end-to-end check."""
    _check_run_args(n, seed)
    analytic = purification_x_matrix(r)
    chol = _pd_cholesky(analytic, "source CCM") / math.sqrt(2.0)

    def draw_chunk(rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.standard_normal((m, 5)) @ chol.T

    gram = _accumulate(_chunk_sizes(n), seed, draw_chunk, threads)
    return _report("full", float(r), n, seed, ("A", "B", "C", "E1", "E2"), gram, analytic)
