"""Time series of survival amplitudes and their on-disk form."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

INTERACTION = "interaction"
HEISENBERG = "heisenberg"


@dataclass(frozen=True)
class AmplitudeSeries:
    """Survival amplitudes on a time grid.

    ``convention`` records whether the amplitudes carry the free-evolution
    phase (heisenberg) or have it stripped (interaction); the two differ only
    by exp(i E_a t) and share the same modulus.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    convention: str = INTERACTION
    err_estimate: np.ndarray | None = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        a = np.asarray(self.amplitudes, dtype=complex)
        if t.ndim != 1 or a.shape != t.shape:
            raise ValueError("times and amplitudes must be 1-d and same length")
        if t.size == 0:
            raise ValueError("empty time grid")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(t < 0):
            raise ValueError("times must be non-negative")
        if self.convention not in (INTERACTION, HEISENBERG):
            raise ValueError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amplitudes", a)
        if t[0] == 0.0 and abs(a[0] - 1.0) > 1e-9:
            raise ValueError("amplitude at t=0 must be 1")
        if np.any(np.abs(a) > 1.0 + 1e-9):
            raise ValueError("amplitude modulus exceeds 1")

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_csv(self) -> str:
        """CSV body with columns t, re_amp, im_amp, prob, err_estimate."""
        buf = io.StringIO()
        buf.write("t,re_amp,im_amp,prob,err_estimate\r\n")
        err = self.err_estimate
        if err is None:
            err = np.zeros_like(self.times)
        for t, a, p, e in zip(self.times, self.amplitudes,
                              self.probabilities, err):
            buf.write(f"{t:.17g},{a.real:.17g},{a.imag:.17g},{p:.17g},{e:.17g}\r\n")
        return buf.getvalue()
