"""Sensing-noise families and their characteristic functions.

Three symmetric, zero-location families are supported, selected by string
token: "gaussian", "laplace", "cauchy". The scale conventions are fixed
package-wide so that the characteristic function of sigma * eta (eta a
standardized draw) takes the closed forms below:

    gaussian  sigma = standard deviation      phi(w) = exp(-w^2 sigma^2 / 2)
    laplace   sigma = standard deviation      phi(w) = 1 / (1 + w^2 sigma^2 / 2)
              (classical scale b = sigma / sqrt(2))
    cauchy    sigma = half-width at half max  phi(w) = exp(-sigma w)

The Cauchy form holds for w > 0 only, and every entry point here rejects
omega <= 0; the rest of the package inherits that restriction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import RandomStream

__all__ = ["NoiseModel", "noise_model", "GAUSSIAN", "LAPLACE", "CAUCHY", "MODEL_TOKENS"]

_LAPLACE_B = 1.0 / math.sqrt(2.0)  # unit-variance Laplace scale

# Standardized Fisher information per unit sigma^-2, validated by numeric
# quadrature of the squared score in the test suite.
_FISHER_LOCATION = {"gaussian": 1.0, "laplace": 2.0, "cauchy": 0.5}
_FISHER_SCALE = {"gaussian": 2.0, "laplace": 1.0, "cauchy": 0.5}


def _check_positive(sigma, omega) -> None:
    if np.any(np.asarray(sigma) <= 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    if np.any(np.asarray(omega) <= 0.0):
        raise ValueError(f"omega must be strictly positive, got {omega}")


@dataclass(frozen=True)
class NoiseModel:
    """One noise family; construct via noise_model(token)."""

    kind: str

    def char_fn(self, sigma, omega):
        """Characteristic function of sigma * eta evaluated at omega.

        Accepts scalars or numpy arrays (broadcast); always in (0, 1) for
        omega > 0 and strictly decreasing in omega.
        """
        _check_positive(sigma, omega)
        scalar = not (isinstance(sigma, np.ndarray) or isinstance(omega, np.ndarray))
        if scalar:
            t = float(sigma) * float(omega)
            if self.kind == "gaussian":
                return math.exp(-0.5 * t * t)
            if self.kind == "laplace":
                return 1.0 / (1.0 + 0.5 * t * t)
            return math.exp(-t)
        t = np.asarray(sigma) * np.asarray(omega)
        if self.kind == "gaussian":
            return np.exp(-0.5 * t * t)
        if self.kind == "laplace":
            return 1.0 / (1.0 + 0.5 * t * t)
        return np.exp(-t)

    def phasor_cos_var(self, sigma, omega):
        """Var cos(omega (x - theta)) = 1/2 + phi(2 omega)/2 - phi^2.

        Evaluated in a cancellation-free form per model; the naive
        combination of char_fn values loses all precision for small
        sigma * omega, where this quantity is O((sigma omega)^4).
        """
        _check_positive(sigma, omega)
        scalar = not (isinstance(sigma, np.ndarray) or isinstance(omega, np.ndarray))
        t = (float(sigma) * float(omega)) if scalar else np.asarray(sigma) * np.asarray(omega)
        xp = math if scalar else np
        if self.kind == "gaussian":
            # 1/2 + e^{-2 t^2}/2 - e^{-t^2} = (1 - e^{-t^2})^2 / 2
            e = xp.expm1(-(t * t))
            return 0.5 * e * e
        if self.kind == "laplace":
            a = 0.5 * t * t
            return a * a * (5.0 + 2.0 * a) / ((1.0 + a) ** 2 * (1.0 + 4.0 * a))
        return -0.5 * xp.expm1(-2.0 * t)

    def phasor_sin_var(self, sigma, omega):
        """Var sin(omega (x - theta)) = (1 - phi(2 omega)) / 2,
        cancellation-free for small sigma * omega."""
        _check_positive(sigma, omega)
        scalar = not (isinstance(sigma, np.ndarray) or isinstance(omega, np.ndarray))
        t = (float(sigma) * float(omega)) if scalar else np.asarray(sigma) * np.asarray(omega)
        xp = math if scalar else np
        if self.kind == "gaussian":
            return -0.5 * xp.expm1(-2.0 * t * t)
        if self.kind == "laplace":
            a = 0.5 * t * t
            return 2.0 * a / (1.0 + 4.0 * a)
        return -0.5 * xp.expm1(-2.0 * t)

    def char_fn_dsigma(self, sigma, omega):
        """Partial derivative of char_fn with respect to sigma (omega fixed).

        gaussian: -omega^2 sigma exp(-omega^2 sigma^2 / 2)
        laplace:  -omega^2 sigma / (1 + omega^2 sigma^2 / 2)^2
        cauchy:   -omega exp(-sigma omega)

        Strictly negative for omega > 0.
        """
        _check_positive(sigma, omega)
        scalar = not (isinstance(sigma, np.ndarray) or isinstance(omega, np.ndarray))
        if scalar:
            s, w = float(sigma), float(omega)
            t = s * w
            if self.kind == "gaussian":
                return -w * w * s * math.exp(-0.5 * t * t)
            if self.kind == "laplace":
                den = 1.0 + 0.5 * t * t
                return -w * w * s / (den * den)
            return -w * math.exp(-t)
        s = np.asarray(sigma)
        w = np.asarray(omega)
        t = s * w
        if self.kind == "gaussian":
            return -w * w * s * np.exp(-0.5 * t * t)
        if self.kind == "laplace":
            den = 1.0 + 0.5 * t * t
            return -w * w * s / (den * den)
        return -w * np.exp(-t)

    def sample(self, stream: RandomStream, size: int | None = None):
        """Standardized draws (zero location, unit scale per the module
        conventions) from the given RandomStream.

        gaussian: Box-Muller normals from the stream.
        laplace: difference of two unit exponentials scaled by 1/sqrt(2),
            each exponential from -log(1 - u); consumes 2n uniforms.
        cauchy: tangent transform tan(pi (u - 1/2)); consumes n uniforms.
        """
        if self.kind == "gaussian":
            return stream.normal(size)
        n = 1 if size is None else int(size)
        if self.kind == "laplace":
            u = stream.uniform(2 * n)
            e1 = -np.log1p(-u[:n])
            e2 = -np.log1p(-u[n:])
            out = _LAPLACE_B * (e1 - e2)
        else:
            u = stream.uniform(n)
            out = np.tan(math.pi * (u - 0.5))
        if size is None:
            return float(out[0])
        return out

    def fisher_location(self, sigma: float) -> float:
        """Fisher information for the location of x = theta + sigma * eta."""
        _check_positive(sigma, 1.0)
        return _FISHER_LOCATION[self.kind] / (sigma * sigma)

    def fisher_scale(self, sigma: float) -> float:
        """Fisher information for sigma in x = theta + sigma * eta."""
        _check_positive(sigma, 1.0)
        return _FISHER_SCALE[self.kind] / (sigma * sigma)


GAUSSIAN = NoiseModel("gaussian")
LAPLACE = NoiseModel("laplace")
CAUCHY = NoiseModel("cauchy")

MODEL_TOKENS = ("gaussian", "laplace", "cauchy")
_BY_TOKEN = {"gaussian": GAUSSIAN, "laplace": LAPLACE, "cauchy": CAUCHY}


def noise_model(token: str) -> NoiseModel:
    """Look up a model by token ("gaussian" | "laplace" | "cauchy")."""
    try:
        return _BY_TOKEN[token.strip().lower()]
    except (KeyError, AttributeError):
        raise ValueError(
            f"unknown noise model {token!r}; expected one of {MODEL_TOKENS}"
        ) from None
