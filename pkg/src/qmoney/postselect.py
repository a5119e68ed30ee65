"""Collision-free money by postselection on a hashed label function.

An (n, s, d) label scheme hashes s subsets of the n bit positions (each
bit in exactly d subsets) into one bit each; L(x) is the s-bit string of
hash outputs.  A note is the uniform superposition over one label's
preimage, obtained exactly by sampling the postselection distribution
N_l / 2**n.  Verification measures the label, then applies r rounds of
M = (1/n) sum_i P_i, where rule P_i flips bit i iff that leaves the label
unchanged — an involution, so M is symmetric and minted notes are +1
eigenvectors.  component_analysis and the beta chain quantify how badly
the walk fragments or freezes, which is the scheme's soundness slack.

Cryptographic-scale parameters (s = ceil(sqrt(n)) subsets, d = 10) need
n >= 100, far beyond dense vectors; (s, d) stay free so small instances
with exact enumeration oracles keep the same structure.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, DimensionError
from .pauli import DENSE_LIMIT

__all__ = [
    "LabelScheme",
    "LabeledMoney",
    "MarkovVerifier",
    "ComponentAnalysis",
    "BetaChainDiagnostics",
    "make_label_scheme",
    "label",
    "label_table",
    "label_bits",
    "parse_label_bits",
    "mint",
    "build_verifier",
    "apply_M",
    "matrix_M",
    "verify_money",
    "kraus_equivalence_check",
    "class_markov_matrix",
    "component_analysis",
    "default_iteration_count",
    "find_frozen_strings",
    "beta_chain_mixing",
]

_LUT_MAX_BITS = 16


@dataclass(frozen=True)
class LabelScheme:
    """s keyed one-bit hashes over fixed bit subsets; label = concatenated outputs."""

    n: int
    s: int
    d: int
    seed: int
    subsets: tuple[tuple[int, ...], ...]
    trivial_hash: bool = False

    def __post_init__(self):
        if len(self.subsets) != self.s:
            raise ValueError("subset count must equal s")
        counts = [0] * self.n
        for sub in self.subsets:
            if len(set(sub)) != len(sub) or any(not 0 <= b < self.n for b in sub):
                raise ValueError("subsets must hold distinct in-range bit indices")
            for b in sub:
                counts[b] += 1
        if any(c != self.d for c in counts):
            raise ValueError(f"every bit must lie in exactly d={self.d} subsets")

    def _key(self, j: int) -> bytes:
        return (self.seed & (1 << 64) - 1).to_bytes(8, "little") + j.to_bytes(4, "little")

    def _hash_raw(self, j: int, value: int) -> int:
        data = value.to_bytes((len(self.subsets[j]) + 7) // 8 or 1, "little")
        return hashlib.blake2b(data, digest_size=1, key=self._key(j)).digest()[0] & 1

    @cached_property
    def _luts(self) -> tuple[np.ndarray | None, ...]:
        out = []
        for j, sub in enumerate(self.subsets):
            if len(sub) > _LUT_MAX_BITS:
                out.append(None)
                continue
            lut = np.fromiter(
                (self._hash_raw(j, v) for v in range(1 << len(sub))),
                dtype=np.uint8,
                count=1 << len(sub),
            )
            out.append(lut)
        return tuple(out)

    def hash_bit(self, j: int, value: int) -> int:
        if self.trivial_hash:
            return 0
        lut = self._luts[j]
        if lut is not None:
            return int(lut[value])
        return self._hash_raw(j, value)

    @cached_property
    def _table(self) -> np.ndarray:
        if self.n > 24:
            raise CapacityError("label_table enumerates 2**n strings; need n <= 24")
        if self.s > 32:
            raise CapacityError("label_table packs labels into uint32; need s <= 32")
        x = np.arange(1 << self.n, dtype=np.uint32)
        out = np.zeros(1 << self.n, dtype=np.uint32)
        if not self.trivial_hash:
            for j, sub in enumerate(self.subsets):
                lut = self._luts[j]
                if lut is None:
                    raise CapacityError(f"subset {j} too large for a lookup table")
                value = np.zeros(1 << self.n, dtype=np.uint32)
                for t, b in enumerate(sub):
                    value |= ((x >> np.uint32(b)) & np.uint32(1)) << np.uint32(t)
                out |= lut[value].astype(np.uint32) << np.uint32(j)
        out.setflags(write=False)
        return out


def make_label_scheme(
    n: int, s: int, d: int, seed: int, *, trivial_hash: bool = False
) -> LabelScheme:
    """Random d-regular assignment of bits to s subsets, sizes as equal as possible.

    Each bit draws d distinct subsets weighted by remaining capacity
    (configuration model); rare dead ends are resampled.  The same seed
    always yields the same scheme.
    """
    if n < 1 or s < 1 or not 1 <= d <= s:
        raise ValueError(f"need n, s >= 1 and 1 <= d <= s, got {(n, s, d)}")
    total = n * d
    sizes = np.array([total // s + (1 if t < total % s else 0) for t in range(s)])
    if sizes.max() > n:
        raise ValueError(f"(s={s}, d={d}) infeasible: a subset would need repeats")
    rng = np.random.default_rng(seed)
    for _ in range(200):
        remaining = sizes.copy()
        members: list[list[int]] = [[] for _ in range(s)]
        for bit in rng.permutation(n):
            avail = np.flatnonzero(remaining > 0)
            if len(avail) < d:
                break
            chosen = rng.choice(
                avail, size=d, replace=False, p=remaining[avail] / remaining[avail].sum()
            )
            for t in chosen:
                members[t].append(int(bit))
                remaining[t] -= 1
        else:
            subsets = tuple(tuple(sorted(sub)) for sub in members)
            return LabelScheme(n, s, d, seed, subsets, trivial_hash)
    raise ValueError(f"could not realize a d-regular assignment for (n={n}, s={s}, d={d})")


def label(scheme: LabelScheme, x: int) -> int:
    """The s-bit label of x; bit j is hash_j of x restricted to subset j."""
    if not 0 <= x < (1 << scheme.n):
        raise ValueError(f"x out of range for n={scheme.n} bits")
    out = 0
    for j, sub in enumerate(scheme.subsets):
        value = 0
        for t, b in enumerate(sub):
            value |= ((x >> b) & 1) << t
        out |= scheme.hash_bit(j, value) << j
    return out


def label_table(scheme: LabelScheme) -> np.ndarray:
    """Labels of all 2**n strings (cached on the scheme)."""
    return scheme._table


def label_bits(value: int, s: int) -> str:
    """Label as a bit string; character j is label bit j."""
    return "".join("1" if (value >> j) & 1 else "0" for j in range(s))


def parse_label_bits(text: str) -> int:
    if not text or any(ch not in "01" for ch in text):
        raise ValueError(f"not a bit string: {text!r}")
    return sum(1 << j for j, ch in enumerate(text) if ch == "1")


@dataclass(frozen=True, eq=False)
class LabeledMoney:
    label: int
    state: np.ndarray
    support_size: int

    def __post_init__(self):
        v = np.asarray(self.state, dtype=complex)
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("money state must be normalised")
        mags = np.abs(v[np.abs(v) > 1e-12])
        if len(mags) != self.support_size or np.any(
            np.abs(mags - 1.0 / math.sqrt(self.support_size)) > 1e-9
        ):
            raise ValueError("amplitudes must be 0 or 1/sqrt(support_size)")
        v.setflags(write=False)
        object.__setattr__(self, "state", v)

    @property
    def n(self) -> int:
        return self.state.shape[0].bit_length() - 1


def mint(scheme: LabelScheme, rng: np.random.Generator) -> LabeledMoney:
    """Measure L on the uniform superposition: label l w.p. N_l/2**n, then |psi_l>."""
    if scheme.n > DENSE_LIMIT:
        raise CapacityError(f"minting builds a dense state; need n <= {DENSE_LIMIT}")
    table = label_table(scheme)
    x = int(rng.integers(1 << scheme.n))
    ell = int(table[x])
    support = np.flatnonzero(table == ell)
    state = np.zeros(1 << scheme.n, dtype=complex)
    state[support] = 1.0 / math.sqrt(len(support))
    return LabeledMoney(ell, state, len(support))


@dataclass(frozen=True, eq=False)
class MarkovVerifier:
    """r rounds of M = (1/n) sum_i P_i; P_i flips bit i iff the label survives."""

    scheme: LabelScheme
    r: int
    permutations: np.ndarray

    @property
    def n_rules(self) -> int:
        return self.permutations.shape[0]


def build_verifier(scheme: LabelScheme, r: int) -> MarkovVerifier:
    if r < 1:
        raise ValueError("need r >= 1 verification rounds")
    table = label_table(scheme)
    size = 1 << scheme.n
    x = np.arange(size, dtype=np.int64)
    perms = np.empty((scheme.n, size), dtype=np.int64)
    for i in range(scheme.n):
        flipped = x ^ (1 << i)
        perms[i] = np.where(table[flipped] == table[x], flipped, x)
    perms.setflags(write=False)
    return MarkovVerifier(scheme, r, perms)


def apply_M(verifier: MarkovVerifier, v: np.ndarray) -> np.ndarray:
    """Mv without matrices: involutions act by index gather."""
    v = np.asarray(v)
    size = verifier.permutations.shape[1]
    if v.shape != (size,):
        raise DimensionError(f"expected a vector of length {size}, got {v.shape}")
    return v[verifier.permutations].mean(axis=0)


def matrix_M(verifier: MarkovVerifier) -> np.ndarray:
    """Dense M for oracle comparisons (n <= 10)."""
    if verifier.scheme.n > 10:
        raise CapacityError("dense M is an oracle for n <= 10")
    size = verifier.permutations.shape[1]
    m = np.zeros((size, size))
    for perm in verifier.permutations:
        np.add.at(m, (perm, np.arange(size)), 1.0 / verifier.n_rules)
    return m


def verify_money(
    verifier: MarkovVerifier, money: LabeledMoney, rng: np.random.Generator
) -> tuple[bool, float]:
    """Label projection, then acceptance probability ||M^r v||**2.

    The probability is computed exactly from the vector (simulation
    privilege); the returned boolean samples it, mirroring the protocol.
    """
    table = label_table(verifier.scheme)
    if money.state.shape != table.shape:
        raise DimensionError("money and verifier act on different string lengths")
    w = np.where(table == money.label, money.state, 0.0)
    for _ in range(verifier.r):
        w = apply_M(verifier, w)
    prob = float(min(1.0, np.linalg.norm(w) ** 2))
    return bool(rng.random() < prob), prob


def kraus_equivalence_check(verifier: MarkovVerifier) -> float:
    """Max deviation between M and the two-register Kraus construction.

    Builds U = sum_i P_i (x) |i><i| on the 2**n * n space explicitly and
    contracts the rule register with the uniform vector.
    """
    n = verifier.scheme.n
    if n > 6:
        raise CapacityError("Kraus check builds a (2**n * n)-dim operator; need n <= 6")
    size = 1 << n
    n_rules = verifier.n_rules
    big = np.zeros((size * n_rules, size * n_rules))
    for i, perm in enumerate(verifier.permutations):
        p_mat = np.zeros((size, size))
        p_mat[perm, np.arange(size)] = 1.0
        e_ii = np.zeros((n_rules, n_rules))
        e_ii[i, i] = 1.0
        big += np.kron(p_mat, e_ii)
    bra = np.kron(np.eye(size), np.full((1, n_rules), 1.0 / math.sqrt(n_rules)))
    kraus = bra @ big @ bra.T
    return float(np.abs(kraus - matrix_M(verifier)).max())


def class_markov_matrix(scheme: LabelScheme, ell: int) -> tuple[np.ndarray, np.ndarray]:
    """(members, M restricted to the class {x : L(x) = ell}); rules never leave it."""
    table = label_table(scheme)
    members = np.flatnonzero(table == ell)
    if len(members) == 0:
        raise ValueError(f"label {ell} has empty preimage")
    perms = build_verifier(scheme, 1).permutations
    k = len(members)
    mat = np.zeros((k, k))
    cols = np.arange(k)
    for perm in perms:
        target = np.searchsorted(members, perm[members])
        mat[target, cols] += 1.0 / scheme.n
    return members, mat


@dataclass(frozen=True, eq=False)
class ComponentAnalysis:
    members: np.ndarray
    components: tuple[tuple[int, ...], ...]
    eigenvalues: np.ndarray
    plus_dim: int
    second_eigenvalue: float | None


def component_analysis(scheme: LabelScheme, ell: int) -> ComponentAnalysis:
    """Connected components of the rule graph on a label class + spectrum of M there.

    The +1 eigenspace of the class-restricted M is spanned by the uniform
    vectors of the components, so its dimension equals the component count.
    """
    members, mat = class_markov_matrix(scheme, ell)
    perms = build_verifier(scheme, 1).permutations
    parent = list(range(len(members)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    index = {int(x): i for i, x in enumerate(members)}
    for i, x in enumerate(members):
        for perm in perms:
            j = index[int(perm[x])]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i, x in enumerate(members):
        groups.setdefault(find(i), []).append(int(x))
    components = tuple(tuple(sorted(g)) for g in sorted(groups.values()))
    eigenvalues = np.linalg.eigvalsh(mat)
    plus_dim = int(np.sum(eigenvalues > 1.0 - 1e-9))
    second = float(eigenvalues[-2]) if len(eigenvalues) >= 2 else None
    return ComponentAnalysis(members, components, eigenvalues, plus_dim, second)


def default_iteration_count(
    scheme: LabelScheme, ell: int, tol: float = 1e-6
) -> int | None:
    """Smallest r with (subdominant |eigenvalue|)**r <= tol, or None if gapless."""
    analysis = component_analysis(scheme, ell)
    rest = analysis.eigenvalues[analysis.eigenvalues <= 1.0 - 1e-9]
    if len(rest) == 0:
        return 1
    lam = float(np.abs(rest).max())
    if lam >= 1.0 - 1e-9:
        return None  # a -1 (bipartite component) never decays under powers
    if lam <= 0.0:
        return 1
    return max(1, math.ceil(math.log(tol) / math.log(lam)))


def find_frozen_strings(scheme: LabelScheme) -> np.ndarray:
    """Strings none of whose single-bit flips preserves the label."""
    table = label_table(scheme)
    x = np.arange(1 << scheme.n, dtype=np.int64)
    frozen = np.ones(1 << scheme.n, dtype=bool)
    for i in range(scheme.n):
        frozen &= table[x ^ (1 << i)] != table[x]
    return np.flatnonzero(frozen)


@dataclass(frozen=True)
class BetaChainDiagnostics:
    acceptance_rate: float
    autocorr_time: float
    tv_distance: float | None
    frozen: bool
    mean_energy: float


def _autocorr_time(series: np.ndarray) -> float:
    x = series - series.mean()
    var = float(x @ x) / len(x)
    if var == 0.0:
        return math.inf
    size = 1 << (2 * len(x) - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f))[: len(x)].real / len(x)
    rho = acov / acov[0]
    tau = 1.0
    for w in range(1, len(rho)):
        tau += 2.0 * float(rho[w])
        if w >= 5.0 * tau:  # Sokal's adaptive window
            return max(tau, 1.0)
    return math.inf


def beta_chain_mixing(
    scheme: LabelScheme,
    ell: int,
    beta: float,
    steps: int,
    rng: np.random.Generator,
    start: int | None = None,
) -> BetaChainDiagnostics:
    """Half-lazy single-bit Metropolis chain for pi(x) ~ exp(-beta * c(x)).

    c(x) = Hamming distance between L(x) and the target label.  The lazy
    half-step makes the walk aperiodic (at beta = 0 every proposal is
    accepted and the plain walk would oscillate between parities).  For
    n <= 12 the exact kernel is also evolved from the start state and the
    total-variation distance to exp(-beta*c)/Z after the budget is
    reported; the autocorrelation time is estimated from the energy trace.
    """
    if scheme.n > 24:
        raise CapacityError("beta chain supports n <= 24")
    if steps < 1:
        raise ValueError("need steps >= 1")
    n = scheme.n
    size = 1 << n
    if scheme.n <= 16:
        table = label_table(scheme)
        energy = lambda x: int(table[x] ^ ell).bit_count()
    else:
        energy = lambda x: (label(scheme, x) ^ ell).bit_count()
    x = int(rng.integers(size)) if start is None else int(start)
    x0 = x
    e = energy(x)
    energies = np.empty(steps + 1, dtype=np.int64)
    energies[0] = e
    accepted = 0
    proposals = 0
    for t in range(steps):
        if rng.random() < 0.5:
            energies[t + 1] = e
            continue
        i = int(rng.integers(n))
        y = x ^ (1 << i)
        ey = energy(y)
        proposals += 1
        if ey <= e or rng.random() < math.exp(-beta * (ey - e)):
            x, e = y, ey
            accepted += 1
        energies[t + 1] = e
    acceptance_rate = accepted / proposals if proposals else 0.0
    tau = _autocorr_time(energies.astype(float))
    tv = None
    if n <= 12:
        table = label_table(scheme)
        c_all = np.array([int(v).bit_count() for v in table ^ np.uint32(ell)])
        idx = np.arange(size)
        flips = [idx ^ (1 << i) for i in range(n)]
        ratios = [np.minimum(1.0, np.exp(-beta * (c_all[f] - c_all))) for f in flips]
        p = np.zeros(size)
        p[x0] = 1.0
        for _ in range(steps):
            q = p.copy()
            for f, ratio in zip(flips, ratios):
                out = p * ratio * (0.5 / n)
                q -= out
                q += out[f]
            p = q
        pi = np.exp(-beta * c_all)
        pi /= pi.sum()
        tv = float(0.5 * np.abs(p - pi).sum())
    frozen = math.isinf(tau) or tau > steps
    return BetaChainDiagnostics(
        acceptance_rate, tau, tv, frozen, float(energies.mean())
    )
