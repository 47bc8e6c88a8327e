"""Finite matrix models of diagonal shift tuples, used as an independent
oracle for the closed-form defect diagonals.

The compression of the adjoint tuple to span{e_alpha : |alpha| <= D} maps
each basis vector to at most one other, so every T_i is stored as a column
map  col -> (row, squared_weight)  with exact rational squared weights.
Operator products are computed by generic composition of these maps and
T^{*alpha} T^{alpha} by a generic gram construction that does not assume
diagonality; that the result comes out diagonal is a checked output, not an
input assumption.  A dense float64 path cross-checks the exact one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from . import multiindex as mi
from .multiindex import MultiIndex
from .weights import WeightFunction

# col -> (row, squared matrix entry); absent columns map to zero.
ColumnMap = dict[int, tuple[int, Fraction]]


def compose(f: ColumnMap, g: ColumnMap) -> ColumnMap:
    """The map f o g (apply g first)."""
    out: ColumnMap = {}
    for col, (row_g, w_g) in g.items():
        hit = f.get(row_g)
        if hit is not None:
            row_f, w_f = hit
            out[col] = (row_f, w_f * w_g)
    return out


@dataclass(frozen=True)
class GramResult:
    """f* f computed entry by entry: exact diagonal plus any off-diagonal
    float entries that appeared (none do for monomial maps, and tests pin
    that down)."""

    diagonal: dict[int, Fraction]
    off_diagonal: dict[tuple[int, int], float]


def gram(f: ColumnMap) -> GramResult:
    """Compute f* f without assuming structure: entry (c1, c2) sums
    conj(f[r, c1]) f[r, c2] over rows r, i.e. columns of f sharing a row."""
    by_row: dict[int, list[tuple[int, Fraction]]] = {}
    for col, (row, w) in f.items():
        by_row.setdefault(row, []).append((col, w))
    diagonal: dict[int, Fraction] = {}
    off: dict[tuple[int, int], float] = {}
    for cols in by_row.values():
        for c1, w1 in cols:
            for c2, w2 in cols:
                if c1 == c2:
                    diagonal[c1] = diagonal.get(c1, Fraction(0)) + w1
                else:
                    off[(c1, c2)] = off.get((c1, c2), 0.0) + sqrt(float(w1 * w2))
    return GramResult(diagonal=diagonal, off_diagonal=off)


@dataclass(frozen=True)
class TruncatedTuple:
    """The compression of the adjoint shift tuple to degrees <= max_degree."""

    weight: WeightFunction
    max_degree: int
    basis: tuple[MultiIndex, ...]
    position: dict[MultiIndex, int]
    maps: tuple[ColumnMap, ...]  # one per direction

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def power_map(self, alpha: MultiIndex) -> ColumnMap:
        """T^alpha as a composed column map."""
        if len(alpha) != self.weight.m:
            raise ValueError("multi-index dimension mismatch")
        out: ColumnMap = {p: (p, Fraction(1)) for p in range(self.dimension)}
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = compose(self.maps[i], out)
        return out

    def dense_matrices(self) -> list[np.ndarray]:
        """float64 matrices of the T_i, for the cross-check path."""
        mats = []
        for f in self.maps:
            A = np.zeros((self.dimension, self.dimension))
            for col, (row, wsq) in f.items():
                A[row, col] = sqrt(float(wsq))
            mats.append(A)
        return mats


def build_truncated(W: WeightFunction, max_degree: int) -> TruncatedTuple:
    """Build the truncated adjoint tuple; T_i e_alpha =
    sqrt(rho(alpha - e_i)/rho(alpha)) e_{alpha - e_i}, zero on alpha_i = 0.

    Construction verifies that all pairwise commutators vanish exactly in
    the column-map representation.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    basis = tuple(mi.enumerate_leq_degree(W.m, max_degree))
    position = {alpha: p for p, alpha in enumerate(basis)}
    maps: list[ColumnMap] = []
    for i in range(W.m):
        e = mi.unit(W.m, i)
        f: ColumnMap = {}
        for alpha in basis:
            if alpha[i] == 0:
                continue
            f[position[alpha]] = (position[mi.sub(alpha, e)], W.rho_ratio(alpha, e))
        maps.append(f)
    tt = TruncatedTuple(
        weight=W,
        max_degree=max_degree,
        basis=basis,
        position=position,
        maps=tuple(maps),
    )
    worst = commutator_defect(tt)
    if worst != 0:
        raise RuntimeError(f"truncated tuple fails to commute: defect {worst}")
    return tt


def commutator_defect(tt: TruncatedTuple) -> Fraction:
    """Largest squared-entry discrepancy between T_i T_j and T_j T_i over
    all pairs; exactly zero for any diagonal weight."""
    worst = Fraction(0)
    for i in range(tt.weight.m):
        for j in range(i + 1, tt.weight.m):
            ab = compose(tt.maps[i], tt.maps[j])
            ba = compose(tt.maps[j], tt.maps[i])
            for col in set(ab) | set(ba):
                x = ab.get(col)
                y = ba.get(col)
                if x is None or y is None or x[0] != y[0]:
                    # A structural mismatch counts as the full entry.
                    worst = max(worst, (x or y)[1])
                else:
                    worst = max(worst, abs(x[1] - y[1]))
    return worst


def commutator_float_norm(tt: TruncatedTuple) -> float:
    """Max-entry norm of the dense-path commutators."""
    mats = tt.dense_matrices()
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            C = mats[i] @ mats[j] - mats[j] @ mats[i]
            worst = max(worst, float(np.max(np.abs(C))))
    return worst


@dataclass(frozen=True)
class DefectOperator:
    """The order-k defect of the truncated tuple, assembled from generic
    gram products: exact diagonal in basis order plus whatever off-diagonal
    entries the generic path produced (always none, and checked)."""

    order: int
    diagonal: tuple[Fraction, ...]
    off_diagonal: dict[tuple[int, int], float]


def defect_operator(tt: TruncatedTuple, k: int) -> DefectOperator:
    """sum_{|beta| <= k} (-1)^|beta| (k choose beta) T^{*beta} T^{beta},
    computed through composed column maps rather than weight ratios.

    This is the oracle path: per-step squared weights are multiplied along
    rays by compose(), so agreement with the closed-form defect diagonal is
    a real telescoping check.
    """
    if k < 0:
        raise ValueError("defect order k must be >= 0")
    diag = [Fraction(0)] * tt.dimension
    off: dict[tuple[int, int], float] = {}
    for beta in mi.enumerate_leq_degree(tt.weight.m, k):
        coeff = Fraction(mi.multinomial(k, beta))
        if mi.degree(beta) % 2 == 1:
            coeff = -coeff
        g = gram(tt.power_map(beta))
        for col, w in g.diagonal.items():
            diag[col] += coeff * w
        for key, v in g.off_diagonal.items():
            off[key] = off.get(key, 0.0) + float(coeff) * v
    return DefectOperator(order=k, diagonal=tuple(diag), off_diagonal=off)


def defect_operator_dense(tt: TruncatedTuple, k: int) -> np.ndarray:
    """The same operator on the float64 path, as a dense matrix."""
    if k < 0:
        raise ValueError("defect order k must be >= 0")
    mats = tt.dense_matrices()
    dim = tt.dimension
    out = np.zeros((dim, dim))
    for beta in mi.enumerate_leq_degree(tt.weight.m, k):
        M = np.eye(dim)
        for i, b in enumerate(beta):
            for _ in range(b):
                M = mats[i] @ M
        sign = -1.0 if mi.degree(beta) % 2 else 1.0
        out += sign * mi.multinomial(k, beta) * (M.T @ M)
    return out


def m_power_diag(tt: TruncatedTuple, k: int) -> tuple[Fraction, ...]:
    """Diagonal of M_T^k(I) = sum_{|beta| = k} (k!/beta!) T^{*beta} T^{beta}
    on the truncated model, exact, in basis order."""
    if k < 0:
        raise ValueError("power k must be >= 0")
    diag = [Fraction(0)] * tt.dimension
    for beta in mi.enumerate_exact_degree(tt.weight.m, k):
        coeff = Fraction(mi.multinomial(k, beta))
        g = gram(tt.power_map(beta))
        for col, w in g.diagonal.items():
            diag[col] += coeff * w
        if g.off_diagonal:
            raise RuntimeError("monomial gram produced off-diagonal entries")
    return tuple(diag)


def decay_curve(tt: TruncatedTuple, alpha: MultiIndex, k_max: int) -> list[Fraction]:
    """[M_T^k(I)]_{alpha,alpha} for k = 0..k_max; reaches exactly 0 once
    k exceeds |alpha| because every monomial T^beta then annihilates
    e_alpha."""
    alpha = tuple(alpha)
    pos = tt.position.get(alpha)
    if pos is None:
        raise ValueError(f"{alpha!r} is outside the truncation")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return [m_power_diag(tt, k)[pos] for k in range(k_max + 1)]
