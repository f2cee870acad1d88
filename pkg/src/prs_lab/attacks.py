"""Unconditional distinguishers against short-output keyed state generators.

Two attacks:

* symmetric-subspace projection, run through a Gram matrix so the t-copy
  projector is never materialized: <psi_k^t | theta^t> = <psi_k|theta>^t
  reduces everything to base-dimension inner products plus one
  pseudo-inverse of the entrywise t-th power of the Gram matrix;
* a purity test (repeated swap tests) that catches generators whose
  output is noticeably mixed, while never rejecting any pure state.

Every Monte-Carlo trial owns the substream derived from its index, so
results do not depend on the worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError, ShapeError
from .generators import PrsEnsemble
from .states import PureState, Rng, swap_test_accept_prob
from .symmetric import sym_dim

#: Singular values below this fraction of the largest are treated as zero
#: when inverting the Gram matrix (near-collinear sign states are common).
GRAM_RANK_RTOL = 1e-8

#: Residual tolerance of the pseudo-inverse consistency check.
GRAM_RESIDUAL_TOL = 1e-6

DEFAULT_MAX_T = 100_000


def satisfies_rank_bound(lam: int, n: int, t: int) -> bool:
    """True when 2^lam <= sym_dim(2^n, t) / 6: the copy count at which the
    projection attack's acceptance gap reaches 1/3."""
    return 6 * 2**lam <= sym_dim(2**n, t)


def choose_t(lam: int, n: int, max_t: int = DEFAULT_MAX_T) -> int:
    """Smallest copy count t making the rank bound hold."""
    if n < 1 or lam < 1:
        raise DomainError("need lam >= 1 and n >= 1")
    for t in range(1, max_t + 1):
        if satisfies_rank_bound(lam, n, t):
            return t
    raise InfeasibleError(f"no t <= {max_t} satisfies the rank bound")


@dataclass
class GramOracle:
    """Projection onto span{psi_k^{otimes t}} in Gram form."""

    states: np.ndarray  # (K, 2^n) enrolled state vectors
    t: int
    gram_t: np.ndarray = field(init=False)
    pinv: np.ndarray = field(init=False)
    rank: int = field(init=False)
    residual: float = field(init=False)

    def __post_init__(self):
        self.states = np.ascontiguousarray(self.states, dtype=np.complex128)
        if self.states.ndim != 2:
            raise ShapeError("enrolled states must form a 2-D array")
        if self.t < 1:
            raise DomainError("need t >= 1")
        gram = self.states.conj() @ self.states.T
        self.gram_t = gram**self.t
        u, s, vh = np.linalg.svd(self.gram_t, hermitian=True)
        keep = s > GRAM_RANK_RTOL * s[0]
        self.rank = int(keep.sum())
        self.pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
        self.residual = float(
            np.linalg.norm(self.gram_t @ self.pinv @ self.gram_t - self.gram_t)
        )
        if self.residual > GRAM_RESIDUAL_TOL:
            raise DomainError(
                f"Gram pseudo-inverse residual {self.residual:.3g} too large"
            )

    @classmethod
    def from_ensemble(cls, ensemble: PrsEnsemble, t: int) -> "GramOracle":
        return cls(np.array(ensemble.all_states()), t)

    def accept(self, theta: PureState) -> float:
        """|| P theta^{otimes t} ||^2 without forming the t-copy space."""
        return float(self.accept_batch(theta.amplitudes[None, :])[0])

    def accept_batch(self, thetas: np.ndarray) -> np.ndarray:
        """Vectorized acceptance for rows of unit vectors."""
        if thetas.shape[1] != self.states.shape[1]:
            raise ShapeError("probe state dimension mismatch")
        overlaps = self.states.conj() @ thetas.T  # (K, batch)
        w = overlaps**self.t
        vals = np.einsum("kb,kl,lb->b", w.conj(), self.pinv, w).real
        return np.clip(vals, 0.0, None)


@dataclass
class AttackReport:
    """Measured acceptance rates and the resulting distinguishing advantage."""

    lam: int
    n: int
    t: int
    kind: str
    accept_gen: float
    accept_haar: float
    advantage: float
    ci95: float
    trials: int
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda": self.lam,
                "n": self.n,
                "t": self.t,
                "kind": self.kind,
                "accept_gen": self.accept_gen,
                "accept_haar": self.accept_haar,
                "advantage": self.advantage,
                "ci95": self.ci95,
                "trials": self.trials,
                "seed": self.seed,
            },
            sort_keys=True,
        )


def _haar_probes(dim: int, trials: int, rng: Rng) -> np.ndarray:
    """One probe per trial, each from the trial's own derived substream."""
    probes = np.empty((trials, dim), dtype=np.complex128)
    for j in range(trials):
        g = rng.derive(j).np
        v = g.normal(size=dim) + 1j * g.normal(size=dim)
        probes[j] = v / np.linalg.norm(v)
    return probes


def _chunked(total: int, size: int):
    for lo in range(0, total, size):
        yield lo, min(lo + size, total)


def gram_haar_acceptances(
    oracle: GramOracle, trials: int, rng: Rng, workers: int = 1
) -> np.ndarray:
    """Exact projection weight of each Haar probe; trial-parallel."""
    dim = oracle.states.shape[1]
    probes = _haar_probes(dim, trials, rng)
    out = np.empty(trials)

    def work(bounds):
        lo, hi = bounds
        out[lo:hi] = oracle.accept_batch(probes[lo:hi])

    chunks = list(_chunked(trials, 512))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, chunks))
    else:
        for bounds in chunks:
            work(bounds)
    return out


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return mean, se


def gram_attack(
    ensemble: PrsEnsemble, t: int, trials: int, rng: Rng, workers: int = 1
) -> tuple[AttackReport, GramOracle]:
    """Projection attack: exact per-sample acceptance on both ensembles."""
    oracle = GramOracle.from_ensemble(ensemble, t)
    gen_accepts = oracle.accept_batch(oracle.states)
    haar_accepts = gram_haar_acceptances(oracle, trials, rng.derive(1), workers)
    mean_gen = float(gen_accepts.mean())
    mean_haar, se_haar = _mean_se(haar_accepts)
    report = AttackReport(
        lam=ensemble.params.lam,
        n=ensemble.params.n,
        t=t,
        kind="gram",
        accept_gen=mean_gen,
        accept_haar=mean_haar,
        advantage=abs(mean_gen - mean_haar),
        ci95=1.96 * se_haar,
        trials=trials,
        seed=rng.seed,
    )
    return report, oracle


def purity_attack(
    ensemble: PrsEnsemble,
    t: int | None,
    trials: int,
    rng: Rng,
    workers: int = 1,
) -> AttackReport:
    """Repeated-swap-test attack; t copies give floor(t/2) pair tests.

    Pure inputs are never rejected (analytic acceptance 1), so the whole
    Haar side is exact.  On the generator side each trial samples a key,
    computes kappa = 1 - Tr(rho_k^2) exactly, and rejects as soon as one
    pair test fails.  Default copy count is 2 * ceil(4 / kappa).
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    if t is not None and t < 2:
        raise DomainError("need at least two copies to pair")
    x0 = "0" * ensemble.params.d
    rejected = np.zeros(trials, dtype=bool)

    def work(bounds):
        lo, hi = bounds
        for j in range(lo, hi):
            r = rng.derive(j)
            key = ensemble.sample_key(r)
            rho = ensemble.output(key, x0)
            kappa = 1.0 - rho.purity
            if t is None:
                if kappa <= 1e-12:
                    raise DomainError("generator output is pure; purity attack idle")
                pairs = math.ceil(4.0 / kappa)
            else:
                pairs = t // 2
            p_accept = swap_test_accept_prob(rho)
            rejected[j] = bool((r.np.random(pairs) >= p_accept).any())

    chunks = list(_chunked(trials, 64))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, chunks))
    else:
        for bounds in chunks:
            work(bounds)

    reject_gen = float(rejected.mean())
    return AttackReport(
        lam=ensemble.params.lam,
        n=ensemble.params.n,
        t=t if t is not None else -1,
        kind="purity",
        accept_gen=1.0 - reject_gen,
        accept_haar=1.0,  # swap tests accept every pure state
        advantage=reject_gen,
        ci95=1.96 * math.sqrt(max(reject_gen * (1 - reject_gen), 1e-12) / trials),
        trials=trials,
        seed=rng.seed,
    )


def run_distinguishing_experiment(
    ensemble: PrsEnsemble,
    kind: str,
    trials: int,
    rng: Rng,
    t: int | None = None,
    workers: int = 1,
) -> AttackReport:
    """Dispatch to one attack; advantage = |accept_gen - accept_haar|."""
    if kind == "gram":
        t_eff = t if t is not None else choose_t(ensemble.params.lam, ensemble.params.n)
        report, _ = gram_attack(ensemble, t_eff, trials, rng, workers)
        return report
    if kind == "purity":
        return purity_attack(ensemble, t, trials, rng, workers)
    raise DomainError(f"unknown attack kind {kind!r}")
