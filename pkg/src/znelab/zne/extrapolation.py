"""Zero-noise extrapolation models as scikit-learn style regressors.

Every model here is linear in the measured values at ``lambda = 0`` (the
exponential model after a log transform), so each fit exposes the weights
``g_k`` with ``E(0) = sum_k g_k E(lambda_k)``; variances propagate as
``sum_k g_k^2 sigma_k^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_finite_1d, check_scale_data
from ..exceptions import InvalidArgumentError
from .coefficients import richardson_coefficients


class ExtrapolationWarning(UserWarning):
    """The requested model could not be fitted and a fallback was used."""


def _propagate(weights: np.ndarray, std_error) -> Optional[float]:
    if std_error is None:
        return None
    sigma = check_finite_1d(std_error, "std_error")
    if sigma.size != weights.size:
        raise InvalidArgumentError("std_error must align with the scale factors")
    return float(np.sum(weights**2 * sigma**2))


def _qr_polyfit(lam: np.ndarray, y: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares polynomial coefficients (ascending) and the weights that map
    ``y`` to the intercept, via a QR decomposition of the Vandermonde matrix."""
    vander = np.vander(lam, degree + 1, increasing=True)
    q, r = np.linalg.qr(vander)
    # row 0 of R^-1 Q^T maps data to the intercept
    solve = solve_triangular(r, q.T)
    return solve @ y, solve[0]


class _ZeroNoiseRegressor(RegressorMixin, BaseEstimator):
    def _store(self, weights, y, std_error):
        self.weights_ = weights
        self.zero_noise_value_ = float(weights @ y)
        self.zero_noise_variance_ = _propagate(weights, std_error)
        return self

    def extrapolate(self) -> float:
        check_is_fitted(self, "zero_noise_value_")
        return self.zero_noise_value_


class PolynomialExtrapolator(_ZeroNoiseRegressor):
    """Least-squares polynomial of fixed ``degree`` evaluated at zero noise."""

    def __init__(self, degree: int = 2):
        self.degree = degree

    def _degree(self) -> int:
        return self.degree

    def fit(self, X, y, std_error=None):
        lam, values = check_scale_data(X, y)
        degree = self._degree()
        if degree < 1:
            raise InvalidArgumentError(f"polynomial degree must be >= 1, got {degree}")
        if degree > lam.size - 1:
            raise InvalidArgumentError(
                f"degree {degree} needs at least {degree + 1} scale factors, got {lam.size}"
            )
        self.coef_, weights = _qr_polyfit(lam, values, degree)
        return self._store(weights, values, std_error)

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return np.polynomial.polynomial.polyval(check_scale_data(X), self.coef_)


class LinearExtrapolator(PolynomialExtrapolator):
    def __init__(self):
        pass

    def _degree(self) -> int:
        return 1


class RichardsonExtrapolator(_ZeroNoiseRegressor):
    """Degree K-1 interpolation through all K points, via Lagrange coefficients."""

    def fit(self, X, y, std_error=None):
        lam, values = check_scale_data(X, y)
        self.scale_factors_ = lam
        self.values_ = values
        weights = richardson_coefficients(lam)
        order = np.argsort(lam)
        # richardson_coefficients sorts its input; map back to caller order
        aligned = np.empty_like(weights)
        aligned[order] = weights
        return self._store(aligned, values, std_error)

    def predict(self, X):
        check_is_fitted(self, "values_")
        x = check_scale_data(X)
        lam = self.scale_factors_
        out = np.zeros_like(x)
        for k in range(lam.size):
            basis = np.ones_like(x)
            for j in range(lam.size):
                if j != k:
                    basis *= (x - lam[j]) / (lam[k] - lam[j])
            out += self.values_[k] * basis
        return out


class ExponentialExtrapolator(_ZeroNoiseRegressor):
    """``E(lambda) = A exp(-b lambda)`` by log-linear least squares.

    Sign-mixed or zero data have no logarithm; the fit then falls back to a
    linear model and sets ``fallback_``.
    """

    def fit(self, X, y, std_error=None):
        lam, values = check_scale_data(X, y)
        if lam.size < 2:
            raise InvalidArgumentError("exponential extrapolation needs at least 2 points")
        signs = np.sign(values)
        self.fallback_ = bool(np.any(signs == 0) or np.any(signs != signs[0]))
        if self.fallback_:
            warnings.warn(
                "exponential fit undefined for sign-mixed or zero data; using linear fallback",
                ExtrapolationWarning,
                stacklevel=2,
            )
            linear = LinearExtrapolator().fit(lam, values, std_error)
            self.coef_ = linear.coef_
            self.sign_ = 1.0
            self.weights_ = linear.weights_
            self.zero_noise_value_ = linear.zero_noise_value_
            self.zero_noise_variance_ = linear.zero_noise_variance_
            return self
        self.sign_ = float(signs[0])
        log_y = np.log(np.abs(values))
        self.coef_, log_weights = _qr_polyfit(lam, log_y, 1)
        amplitude = self.sign_ * math.exp(self.coef_[0])
        self.amplitude_ = amplitude
        self.rate_ = -float(self.coef_[1])
        self.zero_noise_value_ = amplitude
        # delta method: Var(log|y_k|) = sigma_k^2 / y_k^2
        self.weights_ = log_weights
        if std_error is None:
            self.zero_noise_variance_ = None
        else:
            sigma = check_finite_1d(std_error, "std_error")
            var_log_a = float(np.sum(log_weights**2 * sigma**2 / values**2))
            self.zero_noise_variance_ = amplitude**2 * var_log_a
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = check_scale_data(X)
        if self.fallback_:
            return np.polynomial.polynomial.polyval(x, self.coef_)
        return self.sign_ * np.exp(self.coef_[0] + self.coef_[1] * x)


@dataclass(frozen=True)
class ExtrapolationMethod:
    """``kind`` is one of linear, polynomial, exponential, richardson."""

    kind: str
    degree: Optional[int] = None

    KINDS = ("linear", "polynomial", "exponential", "richardson")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgumentError(f"unknown extrapolation method {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "polynomial":
            if self.degree is None or self.degree < 1:
                raise InvalidArgumentError("polynomial extrapolation needs degree >= 1")
        elif self.degree is not None:
            raise InvalidArgumentError(f"{self.kind} extrapolation takes no degree")

    @classmethod
    def parse(cls, text: "str | ExtrapolationMethod") -> "ExtrapolationMethod":
        if isinstance(text, ExtrapolationMethod):
            return text
        kind, _, degree = str(text).partition(":")
        return cls(kind, int(degree) if degree else None)

    def __str__(self) -> str:
        return f"{self.kind}:{self.degree}" if self.degree is not None else self.kind

    def make_estimator(self) -> _ZeroNoiseRegressor:
        if self.kind == "linear":
            return LinearExtrapolator()
        if self.kind == "polynomial":
            return PolynomialExtrapolator(degree=self.degree)
        if self.kind == "exponential":
            return ExponentialExtrapolator()
        return RichardsonExtrapolator()


LINEAR = ExtrapolationMethod("linear")
EXPONENTIAL = ExtrapolationMethod("exponential")
RICHARDSON = ExtrapolationMethod("richardson")


class ExtrapolationResult(NamedTuple):
    value: float
    variance: float
    fallback: bool = False


def extrapolate(points: Sequence[Sequence[float]], method="richardson") -> ExtrapolationResult:
    """Extrapolate ``(lambda, estimate, std_error)`` triples to zero noise."""
    method = ExtrapolationMethod.parse(method)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidArgumentError("points must be a sequence of (lambda, estimate, std_error) triples")
    if pts.shape[0] < 2:
        raise InvalidArgumentError(f"extrapolation needs at least 2 points, got {pts.shape[0]}")
    if len(np.unique(pts[:, 0])) != pts.shape[0]:
        raise InvalidArgumentError("scale factors must be pairwise distinct")
    model = method.make_estimator()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        model.fit(pts[:, 0], pts[:, 1], std_error=pts[:, 2])
    return ExtrapolationResult(
        value=float(model.zero_noise_value_),
        variance=float(model.zero_noise_variance_),
        fallback=bool(getattr(model, "fallback_", False)),
    )
