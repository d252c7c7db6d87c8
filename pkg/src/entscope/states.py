"""Named state families used as fixtures and CLI atoms."""

import numpy as np

from .exceptions import ArgumentError
from .tensor import PureState, random_state

_SQRT_HALF = 1 / np.sqrt(2)


def ket(bits: str, dim: int = 2) -> PureState:
    """Computational basis state, e.g. ``ket("010")``."""
    if not bits or any(c not in "0123456789"[:dim] for c in bits):
        raise ArgumentError(f"ket label {bits!r} must be a non-empty string of digits < {dim}")
    n = len(bits)
    amps = np.zeros(dim**n, dtype=np.complex128)
    amps[int(bits, dim)] = 1.0
    return PureState((dim,) * n, amps)


def ghz(n: int) -> PureState:
    """``(|0...0> + |1...1>) / sqrt(2)`` on ``n`` qubits."""
    if n < 1:
        raise ArgumentError("ghz needs n >= 1")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = amps[-1] = _SQRT_HALF
    return PureState((2,) * n, amps)


def w(n: int) -> PureState:
    """Equal superposition of the ``n`` single-excitation kets."""
    if n < 1:
        raise ArgumentError("w needs n >= 1")
    amps = np.zeros(2**n, dtype=np.complex128)
    for k in range(n):
        amps[1 << k] = 1 / np.sqrt(n)
    return PureState((2,) * n, amps)


_BELL = {
    "phip": (0, 3, 1.0),
    "phim": (0, 3, -1.0),
    "psip": (1, 2, 1.0),
    "psim": (1, 2, -1.0),
}


def bell(name: str) -> PureState:
    """One of ``phip``, ``phim``, ``psip``, ``psim``.

    ``psim`` is ``(|01> - |10>) / sqrt(2)``.
    """
    try:
        i, j, sign = _BELL[name]
    except KeyError:
        raise ArgumentError(f"unknown Bell state {name!r}; expected one of {sorted(_BELL)}") from None
    amps = np.zeros(4, dtype=np.complex128)
    amps[i] = _SQRT_HALF
    amps[j] = sign * _SQRT_HALF
    return PureState((2, 2), amps)


def rand(dims, seed: int) -> PureState:
    return random_state(dims, np.random.default_rng(seed))
