"""End-to-end Monte-Carlo BER/FER driver.

A frame is one codeword: draw information symbols, encode, Gray-map onto
uses_per_codeword channel uses, transmit through independent Rayleigh
draws, MMSE-detect, form GF(2^m) priors, BP-decode, and count bit errors
on the information positions only.  Frames are the unit of parallelism;
every frame derives its own RNG substream from (master_seed, SNR point,
frame index), so results are bit-identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import multiprocessing
import os
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .capacity import ergodic_capacity, snr_for_rate  # noqa: F401  (CLI re-export)
from .channel import noise_from_snr, sample_channel, transmit
from .codes import CodeParams, EncoderPlan, ParityCheckMatrix, build_encoder, make_code
from .decoder import Decoder
from .detector import compute_weights, detect, eq_awgn_params, gf_priors, likelihoods
from .galois import GaloisField, build_field
from .modem import Constellation, MappingPlan, build_constellation, build_mapping_plan, map_codeword

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "gamma_db",
    "frames",
    "info_bits",
    "bit_errors",
    "ber",
    "frame_errors",
    "fer",
    "mean_iterations",
    "spectral_efficiency_bps_hz",
    "elapsed_s",
)


@dataclass(frozen=True)
class SimConfig:
    """Fully explicit simulation configuration (no environment state)."""

    n_t: int
    n_r: int
    modulation: str
    n_symbols: int
    dc: int
    m: int = 8
    code_seed: int = 1
    snr_start_db: float = 0.0
    snr_stop_db: float = 0.0
    snr_step_db: float = 0.5
    max_iter: int = 100
    min_errors: int = 100
    max_frames: int = 10**6
    master_seed: int = 0
    workers: int = 1
    es: float = 1.0
    code_file: str | None = None

    def __post_init__(self) -> None:
        if self.n_t != self.n_r:
            raise ValueError("only square systems (N_t = N_r) are supported")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.snr_step_db <= 0:
            raise ValueError("snr_step_db must be positive")
        if self.snr_stop_db < self.snr_start_db:
            raise ValueError("empty SNR grid (snr_start_db > snr_stop_db)")
        # Mapping-consistency checks; raises on indivisible combinations.
        self.mapping_plan()

    def constellation(self) -> Constellation:
        return build_constellation(self.modulation, self.es / self.n_t)

    def mapping_plan(self) -> MappingPlan:
        return build_mapping_plan(
            self.n_t, self.constellation(), self.n_symbols, self.m
        )

    def code_params(self) -> CodeParams:
        return CodeParams(self.n_symbols, self.dc, self.m, self.code_seed)

    @property
    def spectral_efficiency(self) -> float:
        return self.constellation().bits_per_symbol * self.code_params().rate * self.n_t

    def snr_grid(self) -> list[float]:
        n = int(np.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9))
        return [self.snr_start_db + i * self.snr_step_db for i in range(n + 1)]

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


@dataclass(frozen=True)
class BerRecord:
    """Accumulated statistics of one SNR point."""

    gamma_db: float
    frames: int
    bit_errors: int
    info_bits: int
    frame_errors: int
    ber: float
    fer: float
    mean_iterations: float
    elapsed_s: float = 0.0

    @classmethod
    def from_counts(
        cls,
        gamma_db: float,
        frames: int,
        bit_errors: int,
        info_bits: int,
        frame_errors: int,
        total_iterations: int,
        elapsed_s: float = 0.0,
    ) -> "BerRecord":
        return cls(
            gamma_db=gamma_db,
            frames=frames,
            bit_errors=bit_errors,
            info_bits=info_bits,
            frame_errors=frame_errors,
            ber=bit_errors / info_bits if info_bits else 0.0,
            fer=frame_errors / frames if frames else 0.0,
            mean_iterations=total_iterations / frames if frames else 0.0,
            elapsed_s=elapsed_s,
        )


class FrameResult(NamedTuple):
    bit_errors: int
    frame_error: bool
    iterations: int


class SimContext:
    """Immutable per-run objects shared by all frames and workers."""

    def __init__(
        self,
        field: GaloisField,
        matrix: ParityCheckMatrix,
        plan: EncoderPlan,
        decoder: Decoder,
        constellation: Constellation,
        mapping: MappingPlan,
    ):
        self.field = field
        self.matrix = matrix
        self.plan = plan
        self.decoder = decoder
        self.constellation = constellation
        self.mapping = mapping

    def warmup(self) -> None:
        """Force JIT compilation before any worker processes fork."""
        uniform = np.full((self.matrix.n_symbols, self.field.q), 1.0 / self.field.q)
        self.decoder.decode(uniform, 1, early_stop=False)


def build_context(config: SimConfig) -> SimContext:
    field = build_field(config.m)
    if config.code_file and os.path.exists(config.code_file):
        matrix = ParityCheckMatrix.load(config.code_file, field=field)
        got = (matrix.n_symbols, int(matrix.row_weights()[0]), matrix.field.m)
        want = (config.n_symbols, config.dc, config.m)
        if got != want:
            raise ValueError(
                f"{config.code_file}: code (N, dc, m)={got} does not match "
                f"configuration {want}"
            )
        plan = build_encoder(matrix)
    else:
        matrix, plan = make_code(config.code_params(), field=field)
        if config.code_file:
            matrix.save(config.code_file)
    return SimContext(
        field,
        matrix,
        plan,
        Decoder(matrix),
        config.constellation(),
        config.mapping_plan(),
    )


def _frame_rng(master_seed: int, gamma_db: float, frame_index: int) -> np.random.Generator:
    point_key = int(round(gamma_db * 1000.0)) % (1 << 32)
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, point_key, frame_index])
    )


def run_frame(
    config: SimConfig,
    ctx: SimContext,
    gamma_db: float,
    frame_index: int,
    perfect_priors: bool = False,
) -> FrameResult:
    """Simulate one codeword end to end; never raises on decode failure.

    `perfect_priors` bypasses channel and detector and feeds truth point
    masses to the decoder (a fixture mode for pipeline diagnostics).
    """
    rng = _frame_rng(config.master_seed, gamma_db, frame_index)
    gf = ctx.field
    plan = ctx.plan
    info = rng.integers(0, gf.q, size=plan.k_symbols, dtype=np.int64)
    x = plan.encode(info)

    if perfect_priors:
        priors = np.full((config.n_symbols, gf.q), 1e-12)
        priors[np.arange(config.n_symbols), x] = 1.0
    else:
        n0, sigma_n_sq = noise_from_snr(gamma_db, config.es)
        s = map_codeword(x, ctx.mapping, ctx.constellation)
        H = sample_channel(config.n_t, config.n_r, rng, size=(ctx.mapping.uses_per_codeword,))
        y = transmit(H, s, sigma_n_sq, rng)
        W = compute_weights(H, n0, config.es, config.n_t)
        s_hat = detect(W, y)
        mu, eps_sq = eq_awgn_params(W, H, config.es, config.n_t)
        tabs = likelihoods(s_hat, mu, eps_sq, ctx.constellation)
        tabs = tabs.reshape(config.n_symbols, ctx.mapping.q, ctx.constellation.size)
        priors = gf_priors(tabs, ctx.mapping, gf)

    result = ctx.decoder.decode(priors, config.max_iter)
    u_hat = result.symbols[plan.info_cols]
    bit_errors = int(np.bitwise_count(np.bitwise_xor(u_hat, info)).sum())
    return FrameResult(bit_errors, bit_errors > 0, result.iterations_used)


# --- worker-pool plumbing -------------------------------------------------

_POOL_STATE: tuple[SimConfig, SimContext] | None = None


def _pool_init(config: SimConfig, ctx: SimContext) -> None:
    global _POOL_STATE
    _POOL_STATE = (config, ctx)


def _pool_chunk(args: tuple[float, int, int]) -> list[FrameResult]:
    gamma_db, start, count = args
    config, ctx = _POOL_STATE
    return [run_frame(config, ctx, gamma_db, start + i) for i in range(count)]


def _make_pool(config: SimConfig, ctx: SimContext):
    try:
        mp = multiprocessing.get_context("fork")
    except ValueError:  # pragma: no cover - non-POSIX fallback
        mp = multiprocessing.get_context("spawn")
    return mp.Pool(config.workers, initializer=_pool_init, initargs=(config, ctx))


def run_point(
    config: SimConfig,
    ctx: SimContext,
    gamma_db: float,
    pool=None,
) -> BerRecord:
    """Accumulate frames at one SNR until min_errors frame errors or
    max_frames, whichever first.

    Frames are always folded in ascending frame-index order and the fold
    stops at the exact frame that meets the stop rule, so the record is
    identical for any worker count or chunking.
    """
    t0 = time.perf_counter()
    frames = 0
    bit_errors = 0
    frame_errors = 0
    total_iters = 0

    def fold(res: FrameResult) -> bool:
        nonlocal frames, bit_errors, frame_errors, total_iters
        frames += 1
        bit_errors += res.bit_errors
        frame_errors += int(res.frame_error)
        total_iters += res.iterations
        return frame_errors >= config.min_errors or frames >= config.max_frames

    if config.workers == 1:
        idx = 0
        while True:
            if fold(run_frame(config, ctx, gamma_db, idx)):
                break
            idx += 1
    else:
        own_pool = pool is None
        if own_pool:
            ctx.warmup()
            pool = _make_pool(config, ctx)
        try:
            next_idx = 0
            wave = 4 * config.workers
            done = False
            while not done:
                wave = min(wave, config.max_frames - next_idx)
                per_task = max(1, -(-wave // (4 * config.workers)))
                tasks = []
                start = next_idx
                while start < next_idx + wave:
                    count = min(per_task, next_idx + wave - start)
                    tasks.append((gamma_db, start, count))
                    start += count
                for chunk in pool.map(_pool_chunk, tasks):
                    for res in chunk:
                        if fold(res):
                            done = True
                            break
                    if done:
                        break
                next_idx += wave
                wave = min(2 * wave, 1024)
        finally:
            if own_pool:
                pool.close()
                pool.join()

    info_bits = frames * config.m * ctx.plan.k_symbols
    return BerRecord.from_counts(
        gamma_db,
        frames,
        bit_errors,
        info_bits,
        frame_errors,
        total_iters,
        elapsed_s=time.perf_counter() - t0,
    )


def run_sweep(
    config: SimConfig,
    ctx: SimContext | None = None,
    out_path: str | None = None,
) -> list[BerRecord]:
    """One BerRecord per grid point, ascending SNR, plus optional CSV."""
    grid = config.snr_grid()
    if ctx is None:
        ctx = build_context(config)

    pool = None
    if config.workers > 1:
        ctx.warmup()
        pool = _make_pool(config, ctx)
    records: list[BerRecord] = []
    try:
        for gamma_db in grid:
            rec = run_point(config, ctx, gamma_db, pool=pool)
            if (
                records
                and records[-1].frame_errors >= 100
                and rec.frame_errors >= 100
                and rec.ber > records[-1].ber
            ):
                logger.warning(
                    "BER increased from %.3g to %.3g between %.2f and %.2f dB",
                    records[-1].ber,
                    rec.ber,
                    records[-1].gamma_db,
                    gamma_db,
                )
            records.append(rec)
            logger.info(
                "gamma=%.2f dB: frames=%d ber=%.4g fer=%.4g iters=%.1f (%.1fs)",
                gamma_db,
                rec.frames,
                rec.ber,
                rec.fer,
                rec.mean_iterations,
                rec.elapsed_s,
            )
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    if out_path is not None:
        try:
            write_csv(out_path, config, records)
        except OSError as err:
            raise OSError(f"failed to write CSV to {out_path}: {err}") from err
    return records


def format_csv(config: SimConfig, records: list[BerRecord]) -> str:
    lines = [f"# {config.to_json()}", ",".join(CSV_COLUMNS)]
    se = config.spectral_efficiency
    for r in records:
        lines.append(
            ",".join(
                [
                    repr(float(r.gamma_db)),
                    str(r.frames),
                    str(r.info_bits),
                    str(r.bit_errors),
                    repr(float(r.ber)),
                    str(r.frame_errors),
                    repr(float(r.fer)),
                    repr(float(r.mean_iterations)),
                    repr(float(se)),
                    repr(float(r.elapsed_s)),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(path: str, config: SimConfig, records: list[BerRecord]) -> None:
    with open(path, "w") as fh:
        fh.write(format_csv(config, records))
