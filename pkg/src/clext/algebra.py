"""Parameter space of the C_lambda-extended oscillator algebra.

The algebra is fixed by the cyclic order ``lam`` and a real vector
``alpha`` of length ``lam`` summing to zero.  Everything downstream
indexes alpha, beta and gamma modulo ``lam``; use :func:`grade` for that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameters

TOL = 1e-12


def grade(mu: int, lam: int) -> int:
    """Reduce an index modulo ``lam`` (works for negative ``mu``)."""
    return mu % lam


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AlgebraParams:
    """Order ``lam`` plus the full alpha vector and its derived tables.

    ``beta[mu]`` is the partial sum of alpha below ``mu``, ``gamma[mu]`` the
    mean of two consecutive betas (with ``beta[lam] = 0``) and
    ``beta_bar[mu] = (beta[mu] + mu) / lam``.
    """

    lam: int
    alpha: np.ndarray
    beta: np.ndarray = field(init=False)
    gamma: np.ndarray = field(init=False)
    beta_bar: np.ndarray = field(init=False)

    def __post_init__(self):
        lam = self.lam
        if not isinstance(lam, (int, np.integer)) or lam < 2:
            raise InvalidParameters(f"lambda must be an integer >= 2, got {lam!r}")
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.shape != (lam,):
            raise InvalidParameters(f"alpha must have length {lam}, got shape {alpha.shape}")
        if not np.all(np.isfinite(alpha)):
            raise InvalidParameters("alpha entries must be finite")
        if abs(alpha.sum()) > TOL * max(1.0, np.abs(alpha).max()):
            raise InvalidParameters(f"alpha must sum to zero, got sum {alpha.sum():.3e}")

        beta = np.concatenate(([0.0], np.cumsum(alpha)[:-1]))
        beta_next = np.append(beta[1:], 0.0)
        object.__setattr__(self, "lam", int(lam))
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "beta", _frozen(beta))
        object.__setattr__(self, "gamma", _frozen(0.5 * (beta + beta_next)))
        object.__setattr__(self, "beta_bar", _frozen((beta + np.arange(lam)) / lam))

    def a(self, mu: int) -> float:
        return float(self.alpha[mu % self.lam])

    def b(self, mu: int) -> float:
        return float(self.beta[mu % self.lam])

    def g(self, mu: int) -> float:
        return float(self.gamma[mu % self.lam])

    def shifted(self, shift: int) -> "AlgebraParams":
        """Parameters with ``alpha'[mu] = alpha[mu + shift]``."""
        return AlgebraParams(self.lam, np.roll(self.alpha, -shift))

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "gamma": self.gamma.tolist(),
            "beta_bar": self.beta_bar.tolist(),
        }

    def __repr__(self):
        return f"AlgebraParams(lam={self.lam}, alpha={self.alpha.tolist()})"


def new_algebra(lam: int, alpha_free: Sequence[float]) -> AlgebraParams:
    """Build parameters from the ``lam - 1`` independent alphas.

    The last component is fixed by the zero-sum constraint.

    >>> new_algebra(3, [1, 0]).gamma.tolist()
    [0.5, 1.0, 0.5]
    """
    if not isinstance(lam, (int, np.integer)) or lam < 2:
        raise InvalidParameters(f"lambda must be an integer >= 2, got {lam!r}")
    free = np.asarray(alpha_free, dtype=float).ravel()
    if free.shape != (lam - 1,):
        raise InvalidParameters(f"expected {lam - 1} free alpha values, got {free.size}")
    if not np.all(np.isfinite(free)):
        raise InvalidParameters("alpha entries must be finite")
    return AlgebraParams(int(lam), np.append(free, -free.sum()))


def check_kappa(kappa: Sequence[complex], tol: float = TOL) -> np.ndarray:
    """Validate ``kappa[mu-1]* == kappa[lam-mu-1]`` and return it as an array."""
    kappa = np.asarray(kappa, dtype=complex).ravel()
    lam = kappa.size + 1
    if lam < 2:
        raise InvalidParameters("kappa must have at least one component")
    mirrored = kappa[::-1].conj()
    if np.max(np.abs(kappa - mirrored)) > tol * max(1.0, np.abs(kappa).max()):
        raise InvalidParameters("kappa violates the conjugation condition kappa_mu* = kappa_(lam-mu)")
    return kappa


def alphas_from_kappas(kappa: Sequence[complex], tol: float = TOL) -> np.ndarray:
    """Real alpha vector from the T-basis coefficients kappa_1..kappa_(lam-1)."""
    kappa = check_kappa(kappa, tol)
    lam = kappa.size + 1
    mu = np.arange(lam)[:, None]
    nu = np.arange(1, lam)[None, :]
    alpha = np.exp(2j * np.pi * mu * nu / lam) @ kappa
    if np.max(np.abs(alpha.imag)) > tol * max(1.0, np.abs(alpha).max()):
        raise InvalidParameters("kappa does not map to a real alpha vector")
    return alpha.real.copy()


def kappas_from_alphas(params: AlgebraParams) -> np.ndarray:
    """Inverse of :func:`alphas_from_kappas` (inverse DFT, kappa_0 dropped)."""
    lam = params.lam
    nu = np.arange(1, lam)[:, None]
    mu = np.arange(lam)[None, :]
    return (np.exp(-2j * np.pi * nu * mu / lam) @ params.alpha) / lam


def structure_function(params: AlgebraParams, n: int) -> float:
    """F(n) = n + beta[n mod lam]; also used at negative n."""
    return n + params.b(n)


def g_function(params: AlgebraParams, n: int) -> float:
    """G(n) = 1 + alpha[n mod lam], the commutator [a, a^dagger] on level n."""
    return 1.0 + params.a(n)


def structure_values(params: AlgebraParams, n_values) -> np.ndarray:
    """Vectorized :func:`structure_function`."""
    n = np.asarray(n_values)
    return n + params.beta[n % params.lam]
