"""Construction, encoding and syndrome checking of (dv=2, dc)-regular
non-binary LDPC codes.

A code is the null space of a sparse P x N parity-check matrix over
GF(2^m) with every column holding exactly two nonzero entries and every
row exactly dc.  Construction samples the column-to-row incidence as a
random dc-regular simple graph on the P check nodes (columns are edges),
which is exactly the "no two rows share two columns" girth condition, and
draws the nonzero coefficients uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .galois import GaloisField, build_field


class ConstructionError(RuntimeError):
    """Code construction failed (girth conditioning or rank deficiency)."""


@dataclass(frozen=True)
class CodeParams:
    """Ensemble parameters of a (dv=2, dc)-regular code over GF(2^m)."""

    n_symbols: int
    dc: int
    m: int = 8
    seed: int = 0
    dv: int = 2

    def __post_init__(self) -> None:
        if self.dv != 2:
            raise ValueError("only column weight dv=2 is supported")
        if self.dc <= self.dv:
            raise ValueError(f"row weight dc={self.dc} must exceed dv={self.dv}")
        if (self.n_symbols * self.dv) % self.dc != 0:
            raise ValueError(
                f"N*dv = {self.n_symbols * self.dv} not divisible by dc = {self.dc}"
            )

    @property
    def n_checks(self) -> int:
        return self.n_symbols * self.dv // self.dc

    @property
    def k_symbols(self) -> int:
        return self.n_symbols - self.n_checks

    @property
    def rate(self) -> float:
        return self.k_symbols / self.n_symbols

    @property
    def n_bits(self) -> int:
        return self.m * self.n_symbols

    @property
    def k_bits(self) -> int:
        return self.m * self.k_symbols


class ParityCheckMatrix:
    """Sparse parity-check matrix over GF(2^m) plus its Tanner adjacency.

    Immutable after construction.  `row_cols[i]` / `row_coeffs[i]` hold the
    column indices and nonzero coefficients of check i; `col_rows[j]` /
    `col_coeffs[j]` are the column-major companion view.
    """

    def __init__(
        self,
        field: GaloisField,
        n_symbols: int,
        row_cols: list[np.ndarray],
        row_coeffs: list[np.ndarray],
        params: CodeParams | None = None,
    ) -> None:
        self.field = field
        self.n_symbols = n_symbols
        self.n_checks = len(row_cols)
        self.row_cols = [np.asarray(c, dtype=np.int64) for c in row_cols]
        self.row_coeffs = [np.asarray(a, dtype=np.int64) for a in row_coeffs]
        self.params = params

        for i, (cols, coeffs) in enumerate(zip(self.row_cols, self.row_coeffs)):
            if len(cols) != len(coeffs):
                raise ValueError(f"row {i}: column/coefficient length mismatch")
            if np.any(coeffs == 0) or np.any(coeffs >= field.q):
                raise ValueError(f"row {i}: coefficients must be nonzero field symbols")
            if len(np.unique(cols)) != len(cols):
                raise ValueError(f"row {i}: repeated column index")

        # Column-major adjacency.
        col_rows: list[list[int]] = [[] for _ in range(n_symbols)]
        col_coeffs: list[list[int]] = [[] for _ in range(n_symbols)]
        for i in range(self.n_checks):
            for j, a in zip(self.row_cols[i], self.row_coeffs[i]):
                col_rows[j].append(i)
                col_coeffs[j].append(int(a))
        self.col_rows = [np.asarray(r, dtype=np.int64) for r in col_rows]
        self.col_coeffs = [np.asarray(a, dtype=np.int64) for a in col_coeffs]

        # Flat CSR-style view for fast syndrome evaluation.
        self._row_ptr = np.zeros(self.n_checks + 1, dtype=np.int64)
        self._row_ptr[1:] = np.cumsum([len(c) for c in self.row_cols])
        self._flat_cols = (
            np.concatenate(self.row_cols)
            if self.n_checks
            else np.zeros(0, dtype=np.int64)
        )
        self._flat_coeffs = (
            np.concatenate(self.row_coeffs)
            if self.n_checks
            else np.zeros(0, dtype=np.int64)
        )

    def row_weights(self) -> np.ndarray:
        return np.array([len(c) for c in self.row_cols])

    def col_weights(self) -> np.ndarray:
        return np.array([len(r) for r in self.col_rows])

    def syndrome(self, x) -> np.ndarray:
        """A x^T over GF(2^m); zero iff x is a codeword."""
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.n_symbols,):
            raise ValueError(f"expected {self.n_symbols} symbols, got {x.shape}")
        prods = self.field.mul(self._flat_coeffs, x[self._flat_cols])
        out = np.bitwise_xor.reduceat(prods, self._row_ptr[:-1])
        out[self._row_ptr[:-1] == self._row_ptr[1:]] = 0
        return out

    def has_four_cycle(self) -> bool:
        """Exhaustive scan: do any two rows share two or more columns?"""
        pair_seen: set[tuple[int, int]] = set()
        for j in range(self.n_symbols):
            rows = sorted(int(r) for r in self.col_rows[j])
            for a in range(len(rows)):
                for b in range(a + 1, len(rows)):
                    pair = (rows[a], rows[b])
                    if pair in pair_seen:
                        return True
                    pair_seen.add(pair)
        return False

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_checks, self.n_symbols), dtype=np.int64)
        for i in range(self.n_checks):
            dense[i, self.row_cols[i]] = self.row_coeffs[i]
        return dense

    # Plain-text persistence: header `m N P dc seed`, then one line per row
    # of space-separated col:coeff pairs with the coefficient in hex.
    def save(self, path) -> None:
        weights = self.row_weights()
        if len(set(weights.tolist())) != 1:
            raise ValueError("text format requires a regular row weight")
        dc = int(weights[0])
        seed = self.params.seed if self.params is not None else 0
        with open(path, "w") as fh:
            fh.write(f"{self.field.m} {self.n_symbols} {self.n_checks} {dc} {seed}\n")
            for cols, coeffs in zip(self.row_cols, self.row_coeffs):
                fh.write(
                    " ".join(f"{int(j)}:{int(a):x}" for j, a in zip(cols, coeffs))
                )
                fh.write("\n")

    @classmethod
    def load(cls, path, field: GaloisField | None = None) -> "ParityCheckMatrix":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 5:
                raise ValueError(f"{path}: malformed header {header!r}")
            m, n_symbols, n_checks, dc, seed = (int(t) for t in header)
            if field is None:
                field = build_field(m)
            elif field.m != m:
                raise ValueError(f"{path}: field degree {m} != {field.m}")
            row_cols, row_coeffs = [], []
            for i in range(n_checks):
                line = fh.readline()
                if not line:
                    raise ValueError(f"{path}: truncated after {i} rows")
                cols, coeffs = [], []
                for tok in line.split():
                    j, a = tok.split(":")
                    cols.append(int(j))
                    coeffs.append(int(a, 16))
                row_cols.append(np.array(cols, dtype=np.int64))
                row_coeffs.append(np.array(coeffs, dtype=np.int64))
        params = CodeParams(n_symbols=n_symbols, dc=dc, m=m, seed=seed)
        mat = cls(field, n_symbols, row_cols, row_coeffs, params=params)
        if mat.n_checks != params.n_checks or np.any(mat.col_weights() != 2):
            raise ValueError(f"{path}: loaded matrix violates (dv=2, dc) regularity")
        return mat


def construct_code(
    params: CodeParams,
    field: GaloisField | None = None,
    min_girth: int = 6,
    max_attempts: int = 20000,
) -> ParityCheckMatrix:
    """Sample a (dv=2, dc)-regular matrix, rejecting 4-cycles.

    Each column is an edge between the two check nodes holding its nonzero
    entries; the pairing model is resampled until the resulting graph is
    simple (min_girth=6, the default) or merely loop-free (min_girth=4,
    for toy configurations where N exceeds the number of distinct row
    pairs and 4-cycles are unavoidable).  Deterministic given params.seed.
    """
    if min_girth not in (4, 6):
        raise ValueError("min_girth must be 4 or 6")
    if field is None:
        field = build_field(params.m)
    elif field.m != params.m:
        raise ValueError(f"field degree {field.m} != params.m={params.m}")

    P, N, dc = params.n_checks, params.n_symbols, params.dc
    if min_girth >= 6 and N > P * (P - 1) // 2:
        raise ConstructionError(
            f"girth > 4 is infeasible: N={N} columns but only {P * (P - 1) // 2} "
            f"distinct row pairs exist; use min_girth=4 for toy configurations"
        )

    rng = np.random.default_rng(params.seed)
    stubs = np.repeat(np.arange(P, dtype=np.int64), dc)
    pairing = None
    for _ in range(max_attempts):
        rng.shuffle(stubs)
        a, b = stubs[0::2], stubs[1::2]
        if np.any(a == b):
            continue
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        if min_girth >= 6 and len(np.unique(lo * P + hi)) != N:
            continue
        pairing = (a.copy(), b.copy())
        break
    if pairing is None:
        raise ConstructionError(
            f"no girth-{min_girth} pairing found for (N={N}, dc={dc}) "
            f"within {max_attempts} attempts"
        )

    coeffs = rng.integers(1, field.q, size=(N, 2), dtype=np.int64)
    row_cols: list[list[int]] = [[] for _ in range(P)]
    row_coeffs: list[list[int]] = [[] for _ in range(P)]
    for j in range(N):
        for side, row in enumerate((int(pairing[0][j]), int(pairing[1][j]))):
            row_cols[row].append(j)
            row_coeffs[row].append(int(coeffs[j, side]))
    return ParityCheckMatrix(
        field,
        N,
        [np.array(c) for c in row_cols],
        [np.array(a) for a in row_coeffs],
        params=params,
    )


@dataclass(frozen=True)
class EncoderPlan:
    """Back-substitution plan from one-time Gaussian elimination of A.

    Parity symbol i equals the GF inner product of `parity_coeffs[i]` with
    the K information symbols; information symbols occupy `info_cols`.
    """

    field: GaloisField
    n_symbols: int
    info_cols: np.ndarray
    parity_cols: np.ndarray
    parity_coeffs: np.ndarray

    @property
    def k_symbols(self) -> int:
        return len(self.info_cols)

    def encode(self, info_syms) -> np.ndarray:
        """Map K information symbols to an N-symbol codeword (A x^T = 0)."""
        u = np.asarray(info_syms, dtype=np.int64)
        if u.shape != (self.k_symbols,):
            raise ValueError(f"expected {self.k_symbols} info symbols, got {u.shape}")
        x = np.zeros(self.n_symbols, dtype=np.int64)
        x[self.info_cols] = u
        prods = self.field.mul(self.parity_coeffs, u[np.newaxis, :])
        x[self.parity_cols] = np.bitwise_xor.reduce(prods, axis=1)
        return x


def build_encoder(matrix: ParityCheckMatrix) -> EncoderPlan:
    """Row-reduce A over GF(2^m) into an encoding plan.

    Raises ConstructionError when A is rank-deficient; the caller should
    reconstruct with a fresh seed rather than puncture rows.
    """
    gf = matrix.field
    P, N = matrix.n_checks, matrix.n_symbols
    R = matrix.to_dense()

    pivot_cols: list[int] = []
    row = 0
    for col in range(N):
        if row == P:
            break
        nz = np.nonzero(R[row:, col])[0]
        if len(nz) == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            R[[row, pr]] = R[[pr, row]]
        R[row] = gf.mul(gf.inv(int(R[row, col])), R[row])
        others = np.nonzero(R[:, col])[0]
        others = others[others != row]
        if len(others):
            R[others] = np.bitwise_xor(
                R[others], gf.mul(R[others, col][:, np.newaxis], R[row][np.newaxis, :])
            )
        pivot_cols.append(col)
        row += 1
    if row < P:
        raise ConstructionError(
            f"parity-check matrix is rank deficient ({row} < {P}); "
            f"reconstruct the code with a new seed"
        )

    parity_cols = np.array(pivot_cols, dtype=np.int64)
    info_cols = np.setdiff1d(np.arange(N, dtype=np.int64), parity_cols)
    # In RREF, row i reads x[pivot_i] + sum_j R[i, info_j] x[info_j] = 0.
    parity_coeffs = R[:, info_cols].astype(np.int64)
    return EncoderPlan(gf, N, info_cols, parity_cols, parity_coeffs)


def syndrome(matrix: ParityCheckMatrix, x) -> np.ndarray:
    """Functional alias for :meth:`ParityCheckMatrix.syndrome`."""
    return matrix.syndrome(x)


def make_code(
    params: CodeParams,
    field: GaloisField | None = None,
    max_seed_tries: int = 32,
) -> tuple[ParityCheckMatrix, EncoderPlan]:
    """Construct a full-rank code, bumping the seed on rank deficiency."""
    if field is None:
        field = build_field(params.m)
    last_err: Exception | None = None
    for t in range(max_seed_tries):
        p = CodeParams(params.n_symbols, params.dc, params.m, params.seed + t)
        matrix = construct_code(p, field=field)
        try:
            return matrix, build_encoder(matrix)
        except ConstructionError as err:
            last_err = err
    raise ConstructionError(
        f"no full-rank construction in {max_seed_tries} seed tries: {last_err}"
    )
