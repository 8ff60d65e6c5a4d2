"""Count distributions and their discrete Fourier transforms.

For a model and a list of formulas, the count distribution is the law of the
vector of true-grounding counts under the model's distribution.  Its DFT is
obtained point by point: the frequency-k value is a single weighted model
count in which each count formula's indicator predicate carries the root of
unity ``exp(-2*pi*i*k_j/M_j)``.  Inverting the transform on the full grid
recovers the distribution.

Transforms are evaluated naively (quadratic in the grid size); the grids of
interest are small and the code is kept close to the defining sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleConstraintError, NumericResidueError
from .lifted import Fo2Theory, compile_theory
from .logic import (
    Atom, Domain, Formula, Iff, Predicate, count_true_groundings,
    free_variables, universal_closure,
)
from .mln import Mln, as_real, fresh_name, translate_mln

SUM_TOL = 1e-6
IMAG_TOL = 1e-6
NEG_TOL = 1e-9


@dataclass(frozen=True)
class CountSpec:
    """The formulas whose true-grounding counts are tracked."""

    formulas: tuple[Formula, ...]

    def __post_init__(self):
        if not self.formulas:
            raise ValueError("count spec must contain at least one formula")

    @staticmethod
    def of(formulas) -> "CountSpec":
        return CountSpec(tuple(formulas))

    def __len__(self):
        return len(self.formulas)


def shape_vector(psi: CountSpec, d: Domain) -> tuple[int, ...]:
    """Grid side lengths: |domain|^(free vars) + 1 per formula."""
    return tuple(d.size ** len(free_variables(b)) + 1 for b in psi.formulas)


def count_statistics(psi: CountSpec, world, d: Domain) -> tuple[int, ...]:
    """Componentwise true-grounding counts of the spec's formulas."""
    return tuple(count_true_groundings(b, world, d) for b in psi.formulas)


@dataclass(frozen=True)
class Spectrum:
    """Complex transform values on the full frequency grid."""

    values: np.ndarray  # complex128, shape = shape_vector(psi, d)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape


@dataclass(frozen=True)
class CountDistribution:
    """Probabilities on the count grid; indices are count vectors."""

    probabilities: np.ndarray  # float64, shape = shape_vector(psi, d)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probabilities.shape

    def __getitem__(self, index):
        return self.probabilities[index]


class _SpectrumEvaluator:
    """One compiled theory reused for every frequency; only the indicator
    weights of the count formulas change between points."""

    def __init__(self, phi: Mln, psi: CountSpec, d: Domain):
        theory, w, wbar = translate_mln(phi)
        used = {p.name for p in theory.vocabulary}
        sentences = list(theory.sentences)
        vocab = list(theory.vocabulary)
        self.beta_names = []
        for beta in psi.formulas:
            fv = tuple(sorted(free_variables(beta), key=lambda v: v.name))
            xi = Predicate(fresh_name("xb", used), len(fv))
            vocab.append(xi)
            sentences.append(universal_closure(Iff(Atom(xi, fv), beta)))
            self.beta_names.append(xi.name)
        self.compiled = compile_theory(Fo2Theory.of(sentences, vocab))
        self.w = w
        self.wbar = wbar
        self.d = d
        self.shape = shape_vector(psi, d)
        # The zero-frequency count is the partition normalizer itself.
        self.z = as_real(self.point_raw((0,) * len(psi)), "partition function")
        if self.z <= 0:
            raise InfeasibleConstraintError(
                "partition function is zero: every world is excluded")

    def point_raw(self, k):
        updates = {}
        for name, kj, mj in zip(self.beta_names, k, self.shape):
            updates[name] = 1 if kj == 0 else \
                complex(math.cos(-2 * math.pi * kj / mj),
                        math.sin(-2 * math.pi * kj / mj))
        return self.compiled.wfomc(self.w.updated(updates), self.wbar, self.d)

    def point(self, k) -> complex:
        return complex(self.point_raw(k)) / self.z


def spectrum_point(phi: Mln, psi: CountSpec, k, d: Domain) -> complex:
    """Transform value at one frequency vector: the normalized weighted
    count with root-of-unity indicator weights."""
    ev = _SpectrumEvaluator(phi, psi, d)
    k = tuple(k)
    for kj, mj in zip(k, ev.shape):
        if not 0 <= kj < mj:
            raise ValueError(f"frequency {k} outside grid {ev.shape}")
    return ev.point(k)


def _point_block(ev: _SpectrumEvaluator, indices) -> list[complex]:
    return [ev.point(k) for k in indices]


def full_spectrum(phi: Mln, psi: CountSpec, d: Domain,
                  threads: int = 1) -> Spectrum:
    """Transform values at every grid frequency, in C index order."""
    ev = _SpectrumEvaluator(phi, psi, d)
    indices = list(np.ndindex(*ev.shape))
    if threads > 1 and len(indices) > 4 * threads:
        import multiprocessing

        chunk = (len(indices) + threads - 1) // threads
        blocks = [indices[i:i + chunk] for i in range(0, len(indices), chunk)]
        with multiprocessing.Pool(threads) as pool:
            results = pool.starmap(_point_block,
                                   [(ev, block) for block in blocks])
        flat = [v for block in results for v in block]
    else:
        flat = [ev.point(k) for k in indices]
    values = np.array(flat, dtype=np.complex128).reshape(ev.shape)
    return Spectrum(values)


def forward_dft(values: np.ndarray) -> np.ndarray:
    """Naive multidimensional transform: g(k) = sum_n f(n) e^{-2 pi i <k, n/M>}."""
    return _naive_dft(np.asarray(values, dtype=np.complex128), -1.0, 1.0)


def inverse_dft_raw(values: np.ndarray) -> np.ndarray:
    """Naive inverse: f(n) = (1/prod M) sum_k g(k) e^{+2 pi i <n, k/M>}."""
    arr = np.asarray(values, dtype=np.complex128)
    return _naive_dft(arr, +1.0, 1.0 / arr.size)


def _naive_dft(arr: np.ndarray, sign: float, scale: float) -> np.ndarray:
    shape = arr.shape
    coords = [np.array(idx, dtype=np.float64)
              for idx in np.ndindex(*shape)]
    grid = np.stack(coords) if coords else np.zeros((0, 0))
    norm = grid / np.array(shape, dtype=np.float64)
    flat = arr.reshape(-1)
    out = np.empty(flat.shape, dtype=np.complex128)
    # Quadratic evaluation, blocked to bound the phase-matrix size.
    block = max(1, (4 << 20) // max(1, flat.size))
    for lo in range(0, flat.size, block):
        hi = min(lo + block, flat.size)
        phase = np.exp(sign * 2j * np.pi * (grid[lo:hi] @ norm.T))
        out[lo:hi] = phase @ flat
    return (out * scale).reshape(shape)


def inverse_dft(g: Spectrum) -> CountDistribution:
    """Invert a spectrum into a probability grid, checking residues.

    Imaginary parts above tolerance or negatives below ``-1e-9`` signal an
    upstream numeric fault; small negatives are clamped to zero.
    """
    raw = inverse_dft_raw(g.values)
    worst_imag = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if worst_imag > IMAG_TOL:
        raise NumericResidueError(
            f"inverse transform has imaginary residue {worst_imag:g}")
    q = raw.real.copy()
    if q.size and float(q.min()) < -NEG_TOL:
        raise NumericResidueError(
            f"inverse transform has negative mass {float(q.min()):g}")
    np.clip(q, 0.0, None, out=q)
    return CountDistribution(q)


def count_distribution(phi: Mln, psi: CountSpec, d: Domain,
                       threads: int = 1) -> CountDistribution:
    """Distribution of the count vector under the model, via one weighted
    count per frequency and a naive inverse transform."""
    dist = inverse_dft(full_spectrum(phi, psi, d, threads=threads))
    total = float(dist.probabilities.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise NumericResidueError(
            f"count distribution sums to {total!r}, expected 1")
    return dist
