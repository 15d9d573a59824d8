"""1D hyperbolic diffusion on [-L, L] with Neumann walls and its Shannon entropy.

In nondimensional variables the density obeys q_t + q_tt = q_xx with
q_x(+-L, t) = 0, so even unit-mass profiles evolve as a cosine series

    q(x, t) = a_0 + sum_n T_n(t) cos(k_n x),   k_n = n pi / L,

where each mode's clock T_n solves T'' + T' + k_n^2 T = 0. Modes with
k_n < 1/2 are purely dissipative with decay rates alpha+- = (1 +- sqrt(1 -
4 k_n^2))/2 (both roots decay; the slow rate alpha- dominates at late times);
modes with k_n > 1/2 are damped standing waves e^(-t/2) (A cos(omega_n t)
+ B sin(omega_n t)), omega_n = sqrt(k_n^2 - 1/4). Dissipative modes exist
only when L >= 2 pi, i.e. for n <= floor(L / (2 pi)). The critical wave
number k_n = 1/2 exactly (L an exact multiple of 2 pi) is a degenerate
double root and is rejected.

Total Shannon entropy S(t) = integral of q log(1/q) is computed by composite
trapezoid; where a truncated series dips to q <= 0 at a node the trace
records NaN for that time rather than a number, since the entropy of a
signed profile is undefined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

_EVEN_TOL = 1e-9


class ModeKind(enum.Enum):
    DISSIPATIVE = "dissipative"
    WAVE = "wave"


@dataclass(frozen=True)
class Mode:
    """One cosine mode with its time-clock amplitudes.

    Dissipative: coeff_a on e^(-alpha_plus t), coeff_b on e^(-alpha_minus t).
    Wave: coeff_a on e^(-t/2) cos(omega t), coeff_b on e^(-t/2) sin(omega t).
    """

    n: int
    k: float
    kind: ModeKind
    coeff_a: float
    coeff_b: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"mode index must be >= 1, got {self.n}")
        if self.k == 0.5:
            raise ValueError(
                "critical wave number k = 1/2 (degenerate double root) "
                "is unsupported"
            )
        expected = ModeKind.DISSIPATIVE if self.k < 0.5 else ModeKind.WAVE
        if self.kind is not expected:
            raise ValueError(f"mode n={self.n} with k={self.k} must be {expected}")

    @property
    def alpha_plus(self) -> float:
        return 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * self.k ** 2))

    @property
    def alpha_minus(self) -> float:
        return 0.5 * (1.0 - math.sqrt(1.0 - 4.0 * self.k ** 2))

    @property
    def omega(self) -> float:
        return math.sqrt(self.k ** 2 - 0.25)


@dataclass(frozen=True)
class ModeDecomposition:
    """Mean level plus cosine modes of an even profile on [-L, L]."""

    half_length: float
    a0: float
    modes: tuple[Mode, ...]

    def __post_init__(self):
        if self.half_length <= 0:
            raise ValueError(f"half-length must be positive, got {self.half_length}")

    @property
    def dissipative_count(self) -> int:
        return sum(1 for m in self.modes if m.kind is ModeKind.DISSIPATIVE)


def _zero_velocity_mode(n: int, k: float, c_n: float) -> Mode:
    """Mode amplitudes for initial value c_n and zero initial velocity."""
    if k == 0.5:
        raise ValueError(
            f"mode n={n} sits at the critical wave number k = 1/2 "
            "(degenerate double root); choose a half-length that is not an "
            "exact multiple of 2*pi*n"
        )
    if k < 0.5:
        root = math.sqrt(1.0 - 4.0 * k * k)
        alpha_plus = 0.5 * (1.0 + root)
        alpha_minus = 0.5 * (1.0 - root)
        a = -alpha_minus * c_n / root
        b = alpha_plus * c_n / root
        return Mode(n=n, k=k, kind=ModeKind.DISSIPATIVE, coeff_a=a, coeff_b=b)
    omega = math.sqrt(k * k - 0.25)
    return Mode(n=n, k=k, kind=ModeKind.WAVE, coeff_a=c_n,
                coeff_b=c_n / (2.0 * omega))


def decompose_initial(u0, half_length: float, n_modes: int,
                      assume_zero_velocity: bool = True) -> ModeDecomposition:
    """Cosine decomposition of an even profile sampled uniformly on [-L, L].

    u0 must be sampled on the inclusive uniform grid x_j = -L + 2L j / (N-1);
    its odd part must vanish to tolerance. Only the zero-initial-velocity
    problem is supported: per mode, the cosine coefficient c_n splits into
    the two decaying exponentials (dissipative) or the cos plus sin/2omega
    pair (wave) so that q_t(x, 0) = 0.
    """
    if not assume_zero_velocity:
        raise ValueError("only zero initial velocity is supported")
    if n_modes < 1:
        raise ValueError(f"need at least one mode, got {n_modes}")
    samples = np.asarray(u0, dtype=float)
    if samples.ndim != 1 or samples.size < 3:
        raise ValueError("u0 must be a 1D array of at least 3 samples")
    if samples.size - 1 < 2 * n_modes:
        raise ValueError(
            f"{samples.size} samples cannot resolve {n_modes} modes; "
            f"need at least {2 * n_modes + 1}"
        )
    odd = np.max(np.abs(samples - samples[::-1]))
    if odd > _EVEN_TOL * max(1.0, float(np.max(np.abs(samples)))):
        raise ValueError(f"profile has an odd component ({odd:.3e} above tolerance)")

    L = float(half_length)
    x = np.linspace(-L, L, samples.size)
    a0 = float(np.trapezoid(samples, x)) / (2.0 * L)
    modes = []
    for n in range(1, n_modes + 1):
        k = n * math.pi / L
        c_n = float(np.trapezoid(samples * np.cos(k * x), x)) / L
        modes.append(_zero_velocity_mode(n, k, c_n))
    return ModeDecomposition(half_length=L, a0=a0, modes=tuple(modes))


def evaluate(md: ModeDecomposition, x, t: float):
    """Profile value q(x, t); x scalar or array within [-L, L], t >= 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > md.half_length * (1 + 1e-12)):
        raise ValueError("x outside [-L, L]")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    q = np.full(x_arr.shape, md.a0)
    for mode in md.modes:
        if mode.kind is ModeKind.DISSIPATIVE:
            clock = (mode.coeff_a * math.exp(-mode.alpha_plus * t)
                     + mode.coeff_b * math.exp(-mode.alpha_minus * t))
        else:
            w = mode.omega
            clock = math.exp(-0.5 * t) * (mode.coeff_a * math.cos(w * t)
                                          + mode.coeff_b * math.sin(w * t))
        q = q + clock * np.cos(mode.k * x_arr)
    return float(q) if np.ndim(x) == 0 else q


@dataclass(frozen=True)
class EntropyTrace:
    """S(t) samples; NaN marks times where the profile was not positive."""

    times: np.ndarray
    entropy: np.ndarray
    n_intervals: int

    @property
    def computable(self) -> np.ndarray:
        return ~np.isnan(self.entropy)


def entropy_trace(md: ModeDecomposition, times, n_intervals: int = 400) -> EntropyTrace:
    """Total Shannon entropy by composite trapezoid on n_intervals panels."""
    if n_intervals < 2:
        raise ValueError(f"need at least 2 intervals, got {n_intervals}")
    t_arr = np.asarray(times, dtype=float)
    x = np.linspace(-md.half_length, md.half_length, n_intervals + 1)
    entropy = np.empty(t_arr.shape)
    for i, t in enumerate(t_arr):
        q = evaluate(md, x, float(t))
        if np.min(q) <= 0.0:
            entropy[i] = math.nan
            continue
        entropy[i] = float(np.trapezoid(-q * np.log(q), x))
    return EntropyTrace(times=t_arr, entropy=entropy, n_intervals=n_intervals)


def mass(md: ModeDecomposition, t: float, n_intervals: int = 400) -> float:
    """Trapezoid integral of the profile over [-L, L] at time t."""
    x = np.linspace(-md.half_length, md.half_length, n_intervals + 1)
    return float(np.trapezoid(evaluate(md, x, t), x))


EXPERIMENTS = ("standing_wave", "point_source", "rectangle")
_DEFAULT_TERMS = {"point_source": 100, "rectangle": 200}


def _standing_wave_decomposition(half_length: float) -> ModeDecomposition:
    # Snapshot form q = (1/2L) [1 + e^(-t/2) cos(omega t) cos(k x)] with the
    # n = 2 harmonic: amplitude on the cosine clock only, no sin companion.
    L = half_length
    k = 2.0 * math.pi / L
    mode = Mode(n=2, k=k, kind=ModeKind.WAVE, coeff_a=1.0 / (2.0 * L), coeff_b=0.0)
    return ModeDecomposition(half_length=L, a0=1.0 / (2.0 * L), modes=(mode,))


def _point_source_decomposition(half_length: float, n_modes: int) -> ModeDecomposition:
    # A point mass at the origin has the uniform cosine spectrum c_n = 1/L.
    L = half_length
    modes = tuple(
        _zero_velocity_mode(n, n * math.pi / L, 1.0 / L)
        for n in range(1, n_modes + 1)
    )
    return ModeDecomposition(half_length=L, a0=1.0 / (2.0 * L), modes=modes)


def _rectangle_decomposition(half_length: float, n_modes: int,
                             width: float) -> ModeDecomposition:
    if not 0 < width < 2 * half_length:
        raise ValueError(f"rectangle width must lie in (0, 2L), got {width}")
    L = half_length
    modes = []
    for n in range(1, n_modes + 1):
        k = n * math.pi / L
        c_n = 2.0 * math.sin(k * width / 2.0) / (L * k * width)
        modes.append(_zero_velocity_mode(n, k, c_n))
    return ModeDecomposition(half_length=L, a0=1.0 / (2.0 * L), modes=tuple(modes))


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    decomposition: ModeDecomposition
    trace: EntropyTrace
    snapshots: tuple[tuple[float, np.ndarray, np.ndarray], ...]


def run_experiment(name: str, *, half_length: float = 3.0 * math.pi,
                   n_modes: int | None = None, width: float = 2.0,
                   trace_times=None, snapshot_times=(),
                   n_intervals: int = 400) -> ExperimentResult:
    """Run a named scenario: standing_wave, point_source, or rectangle.

    Emits the entropy trace where computable plus (t, x, q) profile
    snapshots at the requested times.
    """
    if name == "standing_wave":
        md = _standing_wave_decomposition(half_length)
    elif name == "point_source":
        md = _point_source_decomposition(half_length,
                                         n_modes or _DEFAULT_TERMS[name])
    elif name == "rectangle":
        md = _rectangle_decomposition(half_length,
                                      n_modes or _DEFAULT_TERMS[name], width)
    else:
        raise ValueError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")

    if trace_times is None:
        trace_times = np.linspace(0.0, 25.0, 501)
    trace = entropy_trace(md, trace_times, n_intervals)
    x = np.linspace(-md.half_length, md.half_length, n_intervals + 1)
    snapshots = tuple(
        (float(t), x, evaluate(md, x, float(t))) for t in snapshot_times
    )
    return ExperimentResult(name=name, decomposition=md, trace=trace,
                            snapshots=snapshots)
