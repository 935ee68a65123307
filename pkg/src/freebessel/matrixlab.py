"""Random-matrix and character models, exact permutation sums, Weingarten checks.

Monte Carlo runs are reproducible: trial i draws from a generator seeded by
splitmix64(seed, i), and results are accumulated in trial order regardless of
any parallel execution.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .partitions import ColoredWord, SetPartition, enumerate_balanced, join, star_moment

MASK64 = (1 << 64) - 1


def splitmix64(seed: int, index: int) -> int:
    """Deterministic per-trial seed derivation."""
    x = (seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(splitmix64(seed, index)))


@dataclass(frozen=True)
class MCReport:
    statistic: str
    estimate: float
    std_error: float
    trials: int
    dim: int
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "statistic": self.statistic,
                "estimate": self.estimate,
                "std_error": self.std_error,
                "trials": self.trials,
                "N": self.dim,
                "seed": self.seed,
            }
        )


def _report(statistic: str, samples: Sequence[float], dim: int, seed: int) -> MCReport:
    arr = np.asarray(samples, dtype=float)
    est = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else float("nan")
    return MCReport(statistic, est, se, len(arr), dim, seed)


def sample_ginibre(
    rows: int, cols: int, variance: float, rng: np.random.Generator
) -> np.ndarray:
    """Complex Gaussian matrix with i.i.d. entries, E|g|^2 = variance."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    scale = math.sqrt(variance / 2)
    return scale * (
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    )


def sample_ginibre_seeded(
    rows: int, cols: int, variance: float, seed: int
) -> np.ndarray:
    return sample_ginibre(rows, cols, variance, _trial_rng(seed, 0))


def product_model_mc(
    s: int, N: int, k: int, trials: int, seed: int
) -> MCReport:
    """Mean of tr((M M*)^k) with M a product of s independent Ginibre matrices.

    Spectral moments are taken by iterated matrix multiplication, never by
    eigendecomposition.
    """
    if s < 1 or k < 1:
        raise ValueError("s and k must be >= 1")
    samples = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        M = np.eye(N, dtype=complex)
        for _ in range(s):
            M = M @ sample_ginibre(N, N, 1.0 / N, rng)
        A = M @ M.conj().T
        P = A
        for _ in range(k - 1):
            P = P @ A
        samples.append(P.trace().real / N)
    return _report(f"tr((MM*)^{k}), s={s}", samples, N, seed)


def _dw_matrix(s: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """D W for a W(sN, sN, I/(sN)) Wishart W and the s-roots-of-unity diagonal D."""
    M = s * N
    G = sample_ginibre(M, M, 1.0 / M, rng)
    W = G.conj().T @ G
    w = np.exp(2j * np.pi / s)
    d = np.repeat(w ** np.arange(s), N)
    return d[:, None] * W


def dw_model_mc(
    s: int, N: int, k: int, trials: int, seed: int, power: int | None = None
) -> MCReport:
    """Mean of tr((DW)^m) with m = s*k by default, or any explicit power.

    For s | m the estimates converge to the Fuss-Catalan moments; for s !| m
    they vanish in the limit.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    m = power if power is not None else s * k
    if m < 1:
        raise ValueError("power must be >= 1")
    samples = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        DW = _dw_matrix(s, N, rng)
        P = DW
        for _ in range(m - 1):
            P = P @ DW
        samples.append(P.trace().real / (s * N))
    return _report(f"tr((DW)^{m}), s={s}", samples, N, seed)


def dw_model_mc_multi(
    s: int, N: int, powers: Sequence[int], trials: int, seed: int
) -> dict[int, MCReport]:
    """Like dw_model_mc but shares the per-trial matrices over several powers."""
    m_max = max(powers)
    samples: dict[int, list[float]] = {m: [] for m in powers}
    for i in range(trials):
        rng = _trial_rng(seed, i)
        DW = _dw_matrix(s, N, rng)
        P = np.eye(s * N, dtype=complex)
        for m in range(1, m_max + 1):
            P = P @ DW
            if m in samples:
                samples[m].append(P.trace().real / (s * N))
    return {
        m: _report(f"tr((DW)^{m}), s={s}", vals, N, seed)
        for m, vals in samples.items()
    }


# --- exact permutation sums -------------------------------------------------


def _cycle_lengths(perm: tuple[int, ...]) -> list[int]:
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        out.append(length)
    return out


def _cycle_count(perm: tuple[int, ...]) -> int:
    return len(_cycle_lengths(perm))


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """(a b)(i) = a(b(i))."""
    return tuple(a[b[i]] for i in range(len(a)))


def _inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def _full_cycle(K: int) -> tuple[int, ...]:
    return tuple((i + 1) % K for i in range(K))


GLM_MAX_K = 8


def glm_exact(
    K: int, s: int | None = None, d_spec: str = "identity"
) -> dict[int, Fraction]:
    """Exact E tr((DW)^K) as a Laurent polynomial in 1/M, by the permutation sum.

    For ``d_spec="identity"`` the result is the normalized Wishart trace
    E tr(W^K) as {exponent: coefficient} in 1/M.  For ``d_spec="roots"`` (with
    block size s), only permutations with all cycle lengths divisible by s
    survive, M = sN, and the constant term equals #NC_s(K/s).
    """
    if K > GLM_MAX_K:
        raise ValueError(f"K = {K} exceeds the brute-force bound {GLM_MAX_K}")
    if K < 1:
        raise ValueError("K must be >= 1")
    if d_spec not in ("identity", "roots"):
        raise ValueError(d_spec)
    if d_spec == "roots":
        if s is None or s < 1:
            raise ValueError("roots spec needs s >= 1")
        if K % s != 0:
            raise ValueError("roots spec needs s | K")
    pi = _full_cycle(K)
    poly: dict[int, Fraction] = {}
    for perm in itertools.permutations(range(K)):
        lengths = _cycle_lengths(perm)
        if d_spec == "roots" and any(l % s for l in lengths):
            continue
        gamma_sigma = len(lengths)
        gamma_rel = _cycle_count(_compose(_inverse(perm), pi))
        # r_sigma(D) = M^gamma(sigma) for both specs (Tr D^p = M when it survives)
        exponent = gamma_rel + gamma_sigma - K - 1  # normalized-trace exponent
        poly[exponent] = poly.get(exponent, Fraction(0)) + 1
    return dict(sorted(poly.items(), reverse=True))


def glm_eval(poly: dict[int, Fraction], M: float) -> float:
    return float(sum(float(c) * M**e for e, c in poly.items()))


def geodesic_count(s: int, k: int) -> int:
    """#{sigma in S_sk: cycle lengths all divisible by s, sigma on a geodesic e -> full cycle}.

    Distances on the Cayley graph are d(a,b) = K - #cycles(a^-1 b).
    """
    K = s * k
    if K > GLM_MAX_K:
        raise ValueError(f"sk = {K} exceeds the brute-force bound {GLM_MAX_K}")
    pi = _full_cycle(K)
    d_total = K - _cycle_count(pi)
    count = 0
    for perm in itertools.permutations(range(K)):
        lengths = _cycle_lengths(perm)
        if any(l % s for l in lengths):
            continue
        d_e = K - len(lengths)
        d_pi = K - _cycle_count(_compose(_inverse(perm), pi))
        if d_e + d_pi == d_total:
            count += 1
    return count


# --- characters and Weingarten ----------------------------------------------


def hns_character_mc(
    s: int, n: int, t: float, trials: int, seed: int, word: ColoredWord
) -> MCReport:
    """Monte Carlo *-moment of the truncated character over Z_s wr S_n.

    A uniform group element is a uniform permutation with i.i.d. uniform
    s-th-root-of-unity entries; the truncated character sums the diagonal
    entries with index <= floor(t n).
    """
    if not 0 < t <= 1:
        raise ValueError("t must be in (0, 1]")
    if n < 4:
        raise ValueError("n must be >= 4")
    m = int(math.floor(t * n))
    samples = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        perm = rng.permutation(n)
        fixed = np.nonzero(perm[:m] == np.arange(m))[0]
        phases = np.exp(2j * np.pi * rng.integers(0, s, size=n) / s)
        chi = phases[fixed].sum() if fixed.size else 0j
        val = 1.0 + 0j
        for sg in word.signs:
            val *= chi if sg == 1 else np.conj(chi)
        samples.append(val.real)
    label = "".join("u" if sg == 1 else "*" for sg in word.signs)
    return _report(f"chi_t word {label}, s={s}, t={t}", samples, n, seed)


def _fraction_matrix_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular Gram matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


EXACT_WEINGARTEN_MAX_DIM = 20


def weingarten_finite_n(s: int, word: ColoredWord, n: int, t: float) -> float:
    """Finite-n Weingarten value sum_{p,q} W_n(p,q) [tn]^{|p join q|}.

    The Gram matrix over the balanced partitions has entries n^{|p join q|};
    W_n is its inverse.  Converges to star_moment(s, t, word) as n grows.
    Uses exact rational inversion when the matrix is small and n is integral.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    parts = enumerate_balanced(s, word)
    if not parts:
        return 0.0
    if len(word) == 0:
        return 1.0
    dim = len(parts)
    m = int(math.floor(t * n))
    join_blocks = [
        [join(p, q).block_count for q in parts] for p in parts
    ]
    if dim <= EXACT_WEINGARTEN_MAX_DIM and float(n).is_integer():
        gram = [
            [Fraction(int(n) ** join_blocks[i][j]) for j in range(dim)]
            for i in range(dim)
        ]
        wg = _fraction_matrix_inverse(gram)
        total = sum(
            wg[i][j] * Fraction(m) ** join_blocks[i][j]
            for i in range(dim)
            for j in range(dim)
        )
        return float(total)
    gram = np.array(
        [[float(n) ** join_blocks[i][j] for j in range(dim)] for i in range(dim)]
    )
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e14:
        raise np.linalg.LinAlgError(
            f"Gram matrix ill-conditioned (cond ~ {cond:.3g}) at n = {n}"
        )
    wg = np.linalg.inv(gram)
    coupling = np.array(
        [[float(m) ** join_blocks[i][j] for j in range(dim)] for i in range(dim)]
    )
    return float(np.sum(wg * coupling))


def exact_star_moment(s: int, t, word: ColoredWord) -> Fraction:
    """Limit value of the Weingarten sum: the balanced-partition generating sum."""
    return star_moment(s, t, word)
