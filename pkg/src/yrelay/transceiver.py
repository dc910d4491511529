"""End-to-end transmission rounds over the diagonalized Y-channel.

Uplink: every user precodes its slot word with the unit-norm right inverse of
its channel, so the relay observes the componentwise sum of all users' words,
each scaled only by the user's diagonalization constant alpha_j. Pair slots
then carry the two-way network-coded combination alpha_j*u_jk + alpha_k*u_kj.

Downlink: the relay rescales its (decoded) word to the power budget and
broadcasts; each user applies the unit-norm left inverse of its downlink
channel, recovers the word up to the scalar gamma*beta_k, and cancels its own
contribution from every slot it participates in.

Symbol extension T > 1 is handled by treating the length-T*N word as T
consecutive channel uses of the same block-constant channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .alignment import (
    DofVector,
    StreamPlan,
    StreamSymbols,
    assemble_uplink_symbol,
    build_stream_plan,
    extract_pair_slot,
    ordered_pairs,
)
from .channel import (
    STREAM_NOISE,
    STREAM_SYMBOLS,
    ChannelSet,
    SystemConfig,
    check_power,
    complex_normal,
    downlink_propagate,
    rng_for,
    uplink_propagate,
)
from .errors import DimensionError, ModeUnavailable, ScalarUnderflow
from .linalg import (
    NormalizedLeftMppi,
    NormalizedRightMppi,
    normalized_left_mppi,
    normalized_right_mppi,
)

SCALE_UNDERFLOW = 1e-300

GENIE = "genie"
RAW = "raw"


def sample_stream_symbols(plan: StreamPlan, seed: int) -> StreamSymbols:
    """Unit-variance complex Gaussian codeword symbols for every direction."""
    rng = rng_for(seed, STREAM_SYMBOLS)
    vectors = {}
    for pair in ordered_pairs(plan.K):
        length = plan.stream_lengths[pair]
        vectors[pair] = complex_normal(rng, length)
    return StreamSymbols(plan.K, vectors)


def build_precoders(ch: ChannelSet):
    """Per-user normalized right (uplink) and left (downlink) inverses."""
    right = tuple(normalized_right_mppi(h) for h in ch.uplink)
    left = tuple(normalized_left_mppi(d) for d in ch.downlink)
    return right, left


def uplink_precode(u_j, hr: NormalizedRightMppi) -> np.ndarray:
    """Transmit vector x_j = Hr @ u_j (length M) for one channel use."""
    u_j = np.asarray(u_j, dtype=np.complex128)
    if u_j.shape != (hr.matrix.shape[1],):
        raise DimensionError(f"slot word shape {u_j.shape} != ({hr.matrix.shape[1]},)")
    return hr.matrix @ u_j


def relay_observe(cfg: SystemConfig, ch: ChannelSet, precoders, us, noise=None) -> np.ndarray:
    """Relay observation for one channel use: sum_j alpha_j u_j plus noise."""
    if len(us) != cfg.K or len(precoders) != cfg.K:
        raise DimensionError(f"expected {cfg.K} users, got {len(us)} words / {len(precoders)} precoders")
    xs = [uplink_precode(u, hr) for u, hr in zip(us, precoders)]
    return uplink_propagate(ch, xs, noise)


@dataclass(frozen=True)
class RelayWord:
    """Noiseless network-coded relay word with its per-slot scale metadata.

    Slot {j,k} of `word` holds alpha_j*u_jk + alpha_k*u_kj; `pair_scales`
    maps each unordered pair to (alpha_j, alpha_k). The padding tail is zero.
    """

    word: np.ndarray
    pair_scales: dict


def network_coded_word(plan: StreamPlan, sym: StreamSymbols, alphas) -> RelayWord:
    """Ground-truth relay word w = sum_j alpha_j * (user j's slot word)."""
    word = np.zeros(plan.word_length, dtype=np.complex128)
    for j in range(1, plan.K + 1):
        word += alphas[j - 1] * assemble_uplink_symbol(j, sym, plan)
    scales = {(j, k): (alphas[j - 1], alphas[k - 1]) for j, k in plan.pairs()}
    return RelayWord(word=word, pair_scales=scales)


def relay_decode(y_word, plan: StreamPlan, mode: str, true_word=None) -> np.ndarray:
    """Relay's estimate of the network-coded word.

    genie: returns the supplied ground-truth word (ideal lattice decoding).
    raw:   passes the observation through, zeroing the padding tail.
    """
    y_word = np.asarray(y_word, dtype=np.complex128)
    if y_word.shape != (plan.word_length,):
        raise DimensionError(f"observation shape {y_word.shape} != ({plan.word_length},)")
    if mode == GENIE:
        if true_word is None:
            raise ModeUnavailable("genie decoding needs the ground-truth relay word")
        w = true_word.word if isinstance(true_word, RelayWord) else np.asarray(true_word)
        return np.array(w, dtype=np.complex128)
    if mode == RAW:
        w_hat = y_word.copy()
        if plan.padding:
            w_hat[plan.word_length - plan.padding :] = 0.0
        return w_hat
    raise ModeUnavailable(f"unknown relay decode mode {mode!r}")


def relay_transmit(w_hat, p: float):
    """Scale the decoded word to the power budget: x_r = sqrt(P)/||w|| * w.

    Returns (x_r, gamma). A zero word cannot be normalized; it is forwarded
    as-is with gamma = 0 (callers see the flag through gamma).
    """
    w_hat = np.asarray(w_hat, dtype=np.complex128)
    norm = float(np.linalg.norm(w_hat))
    if norm == 0.0:
        return np.zeros_like(w_hat), 0.0
    gamma = math.sqrt(p) / norm
    return gamma * w_hat, gamma


def user_postcode(y_k, dl: NormalizedLeftMppi) -> np.ndarray:
    """Left-inverse filtering of one received chunk: Dl @ y_k."""
    y_k = np.asarray(y_k, dtype=np.complex128)
    if y_k.shape != (dl.matrix.shape[1],):
        raise DimensionError(f"received shape {y_k.shape} != ({dl.matrix.shape[1]},)")
    return dl.matrix @ y_k


def user_recover(filtered, k: int, own: StreamSymbols, plan: StreamPlan, alphas, gamma: float, beta_k: float):
    """Estimates v_jk for all partners j != k from user k's filtered word.

    Per pair slot: undo the relay scale gamma and the downlink constant
    beta_k, subtract user k's own contribution alpha_k*u_kj, divide by the
    partner's alpha_j, and keep the first T*d_jk symbol positions.
    """
    filtered = np.asarray(filtered, dtype=np.complex128)
    estimates = {}
    for j in range(1, plan.K + 1):
        if j == k:
            continue
        denom = gamma * beta_k * alphas[j - 1]
        if abs(denom) < SCALE_UNDERFLOW:
            raise ScalarUnderflow(f"recovery scale gamma*beta*alpha = {denom:.3e} for pair ({j},{k})")
        slot = extract_pair_slot(filtered, (j, k), plan)
        _, length = plan.slot(j, k)
        own_word = np.zeros(length, dtype=np.complex128)
        v_own = own.get(k, j)
        own_word[: v_own.shape[0]] = v_own
        cleaned = slot / (gamma * beta_k) - alphas[k - 1] * own_word
        estimates[(j, k)] = cleaned[: plan.stream_lengths[(j, k)]] / alphas[j - 1]
    return estimates


@dataclass(frozen=True)
class StreamSnr:
    """Analytic per-direction SNRs: uplink slot, downlink slot, and the
    mode-effective value used by the rate proxy."""

    uplink: float
    downlink: float
    effective: float


@dataclass(frozen=True)
class SnrReport:
    """Per-direction SNR pairs plus the bottleneck rate proxy.

    `rates[(j,k)]` is the per-channel-use rate proxy of direction j->k:
    sum over its slot components of log2(1 + effective SNR), divided by T.
    `rate_proxy` is the sum over all active directions.
    """

    streams: dict
    rates: dict
    rate_proxy: float

    def to_dict(self) -> dict:
        return {
            "rate_proxy": self.rate_proxy,
            "streams": {
                f"{j}-{k}": {
                    "snr_uplink": s.uplink,
                    "snr_downlink": s.downlink,
                    "snr_effective": s.effective,
                    "rate": self.rates[(j, k)],
                }
                for (j, k), s in sorted(self.streams.items())
            },
        }


def expected_word_power(plan: StreamPlan, alphas) -> float:
    """E||w||^2 for unit-variance symbols: each direction adds alpha^2 per symbol."""
    total = 0.0
    for (j, k), length in plan.stream_lengths.items():
        total += (alphas[j - 1] ** 2) * length
    return total


def effective_snr(cfg: SystemConfig, ch: ChannelSet, plan: StreamPlan, mode: str = GENIE) -> SnrReport:
    """Analytic per-subchannel SNRs of the parallel two-way streams.

    Uplink: the relay sees alpha_j * v plus unit-variance noise, so direction
    j->k runs at alpha_j^2 per component. Downlink: the relay forwards with
    the deterministic scale gamma = sqrt(P / E||w||^2); after left-inverse
    filtering, word component q carries gamma^2 beta_k^2 alpha_j^2 of signal
    against the filtered noise power ||row q mod N of Dl_k||^2.

    The rate proxy counts log2(1 + SNR) per component: downlink-only SNR in
    genie mode (the relay decode is ideal), min(uplink, downlink) in raw mode.
    """
    if mode not in (GENIE, RAW):
        raise ModeUnavailable(f"unknown mode {mode!r}")
    right, left = build_precoders(ch)
    alphas = [hr.alpha for hr in right]
    word_power = expected_word_power(plan, alphas)
    gamma_sq = cfg.P / word_power if word_power > 0 else 0.0

    noise_rows = [np.sum(np.abs(dl.matrix) ** 2, axis=1) for dl in left]  # per-user, length N

    streams, rates = {}, {}
    total_rate = 0.0
    for (j, k), length in plan.stream_lengths.items():
        if length == 0:
            continue
        off, _ = plan.slot(j, k)
        snr_up = alphas[j - 1] ** 2 / cfg.noise_variance
        beta_k = left[k - 1].beta
        down = []
        rate = 0.0
        for i in range(length):
            row = (off + i) % cfg.N
            snr_dl = float(
                gamma_sq * (beta_k**2) * (alphas[j - 1] ** 2)
                / (noise_rows[k - 1][row] * cfg.noise_variance)
            )
            down.append(snr_dl)
            eff = snr_dl if mode == GENIE else min(snr_up, snr_dl)
            rate += math.log2(1.0 + eff)
        rate /= plan.T
        snr_down = min(down)
        effective = snr_down if mode == GENIE else min(snr_up, snr_down)
        streams[(j, k)] = StreamSnr(uplink=snr_up, downlink=snr_down, effective=effective)
        rates[(j, k)] = rate
        total_rate += rate
    return SnrReport(streams=streams, rates=rates, rate_proxy=total_rate)


@dataclass(frozen=True)
class RoundResult:
    """Outcome of one transmission round.

    `estimates[(j,k)]` is user k's estimate of v_jk; `rel_errors` the
    corresponding relative L2 errors; `snr` the analytic report for the
    round's mode. `power_ok` records that every emitted transmit vector
    passed the power check.
    """

    estimates: dict
    rel_errors: dict
    snr: SnrReport
    gamma: float
    zero_word: bool
    power_ok: bool
    mode: str
    noisy: bool

    def max_rel_error(self) -> float:
        return max(self.rel_errors.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "noisy": self.noisy,
            "gamma": self.gamma,
            "zero_word": self.zero_word,
            "power_ok": self.power_ok,
            "rel_errors": {f"{j}-{k}": e for (j, k), e in sorted(self.rel_errors.items())},
            "estimates": {
                f"{j}-{k}": [[float(z.real), float(z.imag)] for z in v]
                for (j, k), v in sorted(self.estimates.items())
            },
            "snr": self.snr.to_dict(),
        }


def _chunks(word: np.ndarray, n: int):
    return [word[t * n : (t + 1) * n] for t in range(word.shape[0] // n)]


def run_round(
    cfg: SystemConfig,
    ch: ChannelSet,
    d: DofVector,
    symbols: StreamSymbols | None = None,
    seed: int = 0,
    mode: str = GENIE,
    noise: bool = True,
) -> RoundResult:
    """Execute one full uplink + downlink round for the DoF target `d`.

    Symbols are sampled from (seed, symbol stream) when not supplied; noise
    from (seed, noise stream). Raises Infeasible when `d` does not fit the
    relay word.
    """
    plan = build_stream_plan(d, cfg.N)
    right, left = build_precoders(ch)
    alphas = [hr.alpha for hr in right]
    if symbols is None:
        symbols = sample_stream_symbols(plan, seed)
    symbols.check_plan(plan)
    noise_rng = rng_for(seed, STREAM_NOISE) if noise else None
    noise_scale = math.sqrt(cfg.noise_variance)

    words = [assemble_uplink_symbol(j, symbols, plan) for j in range(1, cfg.K + 1)]
    truth = network_coded_word(plan, symbols, alphas)

    power_ok = True
    y_parts = []
    for t, chunk_set in enumerate(zip(*(_chunks(w, cfg.N) for w in words))):
        z = noise_scale * complex_normal(noise_rng, cfg.N) if noise else None
        xs = [uplink_precode(u, hr) for u, hr in zip(chunk_set, right)]
        power_ok = power_ok and all(check_power(x, cfg.P) for x in xs)
        y_parts.append(uplink_propagate(ch, xs, z))
    y_word = np.concatenate(y_parts)

    w_hat = relay_decode(y_word, plan, mode, true_word=truth)
    x_word, gamma = relay_transmit(w_hat, cfg.P)
    zero_word = gamma == 0.0
    power_ok = power_ok and all(check_power(xc, cfg.P) for xc in _chunks(x_word, cfg.N))

    estimates, rel_errors = {}, {}
    for k in range(1, cfg.K + 1):
        filt_parts = []
        for x_chunk in _chunks(x_word, cfg.N):
            z = noise_scale * complex_normal(noise_rng, cfg.M) if noise else None
            y_k = downlink_propagate(ch.downlink[k - 1], x_chunk, z)
            filt_parts.append(user_postcode(y_k, left[k - 1]))
        filtered = np.concatenate(filt_parts)
        if zero_word:
            # Nothing was forwarded; report zero estimates for this user.
            for j in range(1, cfg.K + 1):
                if j != k:
                    estimates[(j, k)] = np.zeros(plan.stream_lengths[(j, k)], dtype=np.complex128)
        else:
            estimates.update(
                user_recover(filtered, k, symbols, plan, alphas, gamma, left[k - 1].beta)
            )

    for (j, k), v_hat in estimates.items():
        v = symbols.get(j, k)
        if v.shape[0] == 0:
            continue
        ref = float(np.linalg.norm(v))
        err = float(np.linalg.norm(v_hat - v))
        rel_errors[(j, k)] = err / ref if ref > 0 else (0.0 if err == 0 else math.inf)

    report = effective_snr(cfg, ch, plan, mode)
    return RoundResult(
        estimates=estimates,
        rel_errors=rel_errors,
        snr=report,
        gamma=gamma,
        zero_word=zero_word,
        power_ok=power_ok,
        mode=mode,
        noisy=noise,
    )
