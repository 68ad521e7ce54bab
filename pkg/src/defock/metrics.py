"""Nonclassicality diagnostics: quadrature variances, Mandel parameter,
second-order correlation, photon distributions, revival analysis.

Two quadrature pairs are offered:

* :func:`quadrature_stats` builds Y = (A + A^dag)/2 and Z = (A - A^dag)/(2i)
  from the deformed ladder operators of the chosen kernel.  Exact
  eigenstates of A (coherent families in the bare representation)
  saturate the Robertson bound identically in this pair.
* :func:`xp_uncertainty` evaluates the position/momentum pair of the
  minimal-length oscillator, with the first-order similarity correction
  x -> x + (tau_check/2)(p^2 x + x p^2) that makes the pair Hermitian
  under the physical inner product.  This is the pair whose commutator
  carries the 1 + tau_check p^2 deformation and whose variances show the
  characteristic asymmetric split.

Everything acts on amplitude vectors through ladder shifts; no dense
operator matrices are formed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .deform import Deformation, SpectrumCoeffs, dimensionless_e
from .errors import DegenerateStateError, TruncationError, ValidationError
from .states import FockState, gk_coherent

__all__ = [
    "LadderAction",
    "QuadratureStats",
    "XPUncertainty",
    "RevivalTimes",
    "GKUncertainty",
    "NonclassicalityReport",
    "apply_ladder",
    "ladder_weights",
    "quadrature_stats",
    "xp_uncertainty",
    "mandel_q",
    "g2_zero",
    "photon_distribution",
    "nonclassicality_report",
    "gk_autocorrelation",
    "detect_peaks",
    "revival_times",
    "gk_uncertainty_product",
]

_BOUNDARY_TOL = 1e-12
_DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class LadderAction:
    """A deformed ladder step plus the number-operator convention.

    ``number_convention="bare"`` counts quanta with n = a^dag a;
    ``"deformed"`` uses N = A^dag A, which is diagonal with eigenvalues
    e_n = n f^2(n).
    """

    deformation: Deformation
    direction: str = "lower"
    number_convention: str = "bare"

    def __post_init__(self):
        if self.direction not in ("lower", "raise"):
            raise ValidationError(f"direction must be lower/raise, got {self.direction!r}")
        if self.number_convention not in ("bare", "deformed"):
            raise ValidationError(
                f"number_convention must be bare/deformed, got {self.number_convention!r}"
            )


def ladder_weights(d: Deformation, n_max: int) -> np.ndarray:
    """sqrt(n f^2(n)) for n = 0 .. n_max-1; the matrix elements of A."""
    return np.sqrt(dimensionless_e(d, np.arange(n_max)))


def _lower(amps: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    out[:-1] = w[1:] * amps[1:]
    return out


def _raise(amps: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    out[1:] = w[1:] * amps[:-1]
    return out


def apply_ladder(state: FockState, action: LadderAction) -> np.ndarray:
    """Apply A (lower) or A^dag (raise) to the amplitude vector.

    Returns the unnormalized image.  Raising demands headroom: the
    boundary amplitude must be negligible or the shifted component would
    silently fall off the truncation.
    """
    w = ladder_weights(action.deformation, state.n_max)
    if action.direction == "lower":
        return _lower(state.amps, w)
    if abs(state.amps[-1]) > _BOUNDARY_TOL:
        raise TruncationError(
            "raise would push amplitude past the truncation boundary "
            f"(|c[n_max-1]| = {abs(state.amps[-1]):.3e})"
        )
    return _raise(state.amps, w)


@dataclass(frozen=True)
class QuadratureStats:
    var_y: float
    var_z: float
    gur_rhs: float


def quadrature_stats(state: FockState, d: Deformation) -> QuadratureStats:
    """Variances of the ladder quadratures and the uncertainty-bound RHS.

    Y = (A + A^dag)/2, Z = (A - A^dag)/(2i); the right-hand side is
    |<[Y, Z]>| / 2 = |<A A^dag> - <A^dag A>| / 4.  A coherent state of
    the undeformed kernel gives (1/4, 1/4, 1/4).
    """
    amps = state.amps
    if abs(amps[-1]) > _BOUNDARY_TOL:
        raise TruncationError("boundary amplitude non-negligible; enlarge n_max")
    w = ladder_weights(d, state.n_max)
    low = _lower(amps, w)
    hi = _raise(amps, w)
    e_a = np.vdot(amps, low)               # <A>
    e_a2 = np.vdot(hi, low)                # <A^2> = <A^dag psi | A psi>
    e_ada = float(np.vdot(low, low).real)  # <A^dag A>
    e_aad = float(np.vdot(hi, hi).real)    # <A A^dag>
    var_y = 0.25 * (2.0 * e_a2.real + e_ada + e_aad) - e_a.real**2
    var_z = 0.25 * (-2.0 * e_a2.real + e_ada + e_aad) - e_a.imag**2
    rhs = 0.25 * abs(e_aad - e_ada)
    return QuadratureStats(var_y=float(var_y), var_z=float(var_z), gur_rhs=float(rhs))


@dataclass(frozen=True)
class XPUncertainty:
    var_x: float
    var_p: float
    rhs: float

    @property
    def product(self) -> float:
        return math.sqrt(self.var_x * self.var_p)


def xp_uncertainty(state: FockState, tau: float, *, m: float = 1.0,
                   omega: float = 1.0, hbar: float = 1.0) -> XPUncertainty:
    """Position/momentum uncertainties of the minimal-length oscillator.

    Uses the first-order similarity-corrected pair

        X = x + (tau_check/2) (p^2 x + x p^2),   P = p,

    with tau_check = tau / (m omega hbar), whose commutator is
    i hbar (1 + tau_check p^2).  The returned ``rhs`` is the
    Robertson bound |<[X, P]>|/2 = (hbar/2)(1 + tau_check <p^2>).
    With m = omega = hbar = 1 the pair is dimensionless with vacuum
    variances 1/2.

    The state should be in the perturbed-basis representation; six
    levels of boundary headroom are required.
    """
    if tau < 0:
        raise ValidationError("tau must be >= 0")
    amps = state.amps
    if float(np.sum(np.abs(amps[-6:]) ** 2)) > 1e-18:
        raise TruncationError("boundary amplitudes non-negligible; enlarge n_max")
    n_max = state.n_max
    w = np.sqrt(np.arange(n_max, dtype=float))  # bare ladder
    cx = math.sqrt(hbar / (2.0 * m * omega))
    cp = math.sqrt(m * omega * hbar / 2.0)
    tau_check = tau / (m * omega * hbar)

    def x_op(v):
        return cx * (_lower(v, w) + _raise(v, w))

    def p_op(v):
        return 1j * cp * (_raise(v, w) - _lower(v, w))

    def big_x(v):
        xv = x_op(v)
        ppv = p_op(p_op(v))
        return xv + 0.5 * tau_check * (p_op(p_op(xv)) + x_op(ppv))

    xv = big_x(amps)
    xxv = big_x(xv)
    pv = p_op(amps)
    ppv = p_op(pv)
    mean_x = float(np.vdot(amps, xv).real)
    mean_x2 = float(np.vdot(amps, xxv).real)
    mean_p = float(np.vdot(amps, pv).real)
    mean_p2 = float(np.vdot(amps, ppv).real)
    var_x = mean_x2 - mean_x**2
    var_p = mean_p2 - mean_p**2
    rhs = 0.5 * hbar * (1.0 + tau_check * mean_p2)
    return XPUncertainty(var_x=var_x, var_p=var_p, rhs=rhs)


def _level_values(state: FockState, action: LadderAction) -> np.ndarray:
    if action.number_convention == "bare":
        return np.arange(state.n_max, dtype=float)
    return dimensionless_e(action.deformation, np.arange(state.n_max))


def mandel_q(state: FockState, action: LadderAction) -> float:
    """Mandel parameter <(Delta N)^2>/<N> - 1 in the chosen convention."""
    p = np.abs(state.amps) ** 2
    e = _level_values(state, action)
    mean = float(np.sum(p * e))
    if mean <= _DEGENERATE_TOL:
        raise DegenerateStateError("Mandel parameter undefined: <N> = 0")
    var = float(np.sum(p * e * e)) - mean**2
    return var / mean - 1.0


def g2_zero(state: FockState, action: LadderAction) -> float:
    """Zero-delay second-order correlation <A^dag^2 A^2> / <A^dag A>^2."""
    p = np.abs(state.amps) ** 2
    e = _level_values(state, action)
    mean = float(np.sum(p * e))
    if mean <= _DEGENERATE_TOL:
        raise DegenerateStateError("g2(0) undefined: <N> = 0")
    e_shift = np.concatenate([[0.0], e[:-1]])
    num = float(np.sum(p * e * e_shift))
    return num / mean**2


def photon_distribution(state: FockState) -> np.ndarray:
    """Level occupation probabilities |c_n|^2."""
    return np.abs(state.amps) ** 2


@dataclass
class NonclassicalityReport:
    """Bundle of single-state diagnostics."""

    var_y: float
    var_z: float
    gur_rhs: float
    mandel_q: float
    g2_zero: float
    mean_n: float
    photon_dist: np.ndarray

    def validate(self):
        if self.var_y < 0 or self.var_z < 0 or self.gur_rhs < 0:
            raise ValidationError("variances and bound must be nonnegative")
        if self.var_y * self.var_z < self.gur_rhs**2 - 1e-9:
            raise ValidationError("uncertainty relation violated beyond tolerance")
        return self

    def to_json(self) -> str:
        doc = {
            "var_y": self.var_y,
            "var_z": self.var_z,
            "gur_rhs": self.gur_rhs,
            "mandel_q": self.mandel_q,
            "g2_zero": self.g2_zero,
            "mean_n": self.mean_n,
            "photon_dist": list(map(float, self.photon_dist)),
        }
        return json.dumps(doc)


def nonclassicality_report(state: FockState, d: Deformation, *,
                           number_convention: str = "bare") -> NonclassicalityReport:
    action = LadderAction(d, "lower", number_convention)
    quad = quadrature_stats(state, d)
    report = NonclassicalityReport(
        var_y=quad.var_y,
        var_z=quad.var_z,
        gur_rhs=quad.gur_rhs,
        mandel_q=mandel_q(state, action),
        g2_zero=g2_zero(state, action),
        mean_n=state.mean_n(),
        photon_dist=photon_distribution(state),
    )
    return report.validate()


# ---------------------------------------------------------------------------
# Gazeau-Klauder dynamics
# ---------------------------------------------------------------------------

def gk_autocorrelation(J: float, gamma: float, tau: float, omega: float,
                       t_grid, n_max: int = 64) -> np.ndarray:
    """|<J,gamma | J,gamma+omega t>|^2 over a time grid.

    Equals |sum_n P_n exp(-i e_n omega t)|^2 with P_n the normalized
    level weights J^n/rho_n; the gamma dependence cancels.  A(0) = 1.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size and not np.all(np.isfinite(t)):
        raise ValidationError("t_grid must be finite")
    state = gk_coherent(J, gamma, tau, n_max, basis="bare")
    p = np.abs(state.amps) ** 2
    e = dimensionless_e(Deformation.perturbative_nc(tau), np.arange(state.n_max))
    z = np.exp(-1j * omega * np.outer(t, e)) @ p
    return np.abs(z) ** 2


def detect_peaks(t: np.ndarray, a: np.ndarray, min_height: float = 0.2) -> np.ndarray:
    """Local maxima of a sampled trace, refined by parabolic interpolation."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    if t.shape != a.shape or t.size < 3:
        raise ValidationError("need matching grids with at least 3 samples")
    peaks = []
    for i in range(1, len(t) - 1):
        if a[i] >= min_height and a[i] > a[i - 1] and a[i] >= a[i + 1]:
            denom = a[i - 1] - 2.0 * a[i] + a[i + 1]
            shift = 0.0 if denom == 0 else 0.5 * (a[i - 1] - a[i + 1]) / denom
            shift = float(np.clip(shift, -0.5, 0.5))
            peaks.append(t[i] + shift * (t[i + 1] - t[i]))
    return np.asarray(peaks)


@dataclass(frozen=True)
class RevivalTimes:
    t_cl: float
    t_rev: float


def revival_times(J: float, tau: float, omega: float, hbar: float = 1.0, *,
                  nbar_rule: str = "mean", nbar: float | None = None,
                  n_max: int = 64) -> RevivalTimes:
    """Classical period and revival time of the quadratic spectrum.

    With E_n = hbar omega (A n + B n^2): t_cl = 2 pi / (omega (A + 2 B nbar))
    and t_rev = 2 pi / (omega B), independent of nbar.  At tau = 0 the
    revival time is infinite and returned as ``math.inf``.
    """
    if omega <= 0 or hbar <= 0:
        raise ValidationError("omega and hbar must be positive")
    sc = SpectrumCoeffs.from_tau(tau)
    if nbar_rule == "explicit":
        if nbar is None:
            raise ValidationError("explicit nbar_rule needs a value for nbar")
        nb = float(nbar)
    elif nbar_rule == "mean":
        if J <= 0:
            raise ValidationError("mean nbar_rule needs J > 0")
        state = gk_coherent(J, 0.0, tau, n_max, basis="bare")
        nb = state.mean_n()
    else:
        raise ValidationError(f"unknown nbar_rule {nbar_rule!r}")
    t_cl = 2.0 * math.pi / (omega * (sc.A + 2.0 * sc.B * nb))
    t_rev = math.inf if sc.B == 0.0 else 2.0 * math.pi / (omega * sc.B)
    return RevivalTimes(t_cl=t_cl, t_rev=t_rev)


@dataclass(frozen=True)
class GKUncertainty:
    numeric: float
    closed_form: float


def gk_uncertainty_product(J: float, gamma: float, tau: float, *,
                           m: float = 1.0, omega: float = 0.5,
                           hbar: float = 1.0, n_max: int = 64) -> GKUncertainty:
    """Delta X Delta P on a Gazeau-Klauder state.

    ``numeric`` evaluates the similarity-corrected pair on the
    perturbed-basis state; ``closed_form`` is the first-order result
    (hbar/2)[1 + (tau/2)(1 + 4 J sin^2 gamma)].  The two agree to
    second order in tau.
    """
    state = gk_coherent(J, gamma, tau, n_max, basis="perturbed")
    stats = xp_uncertainty(state, tau, m=m, omega=omega, hbar=hbar)
    closed = 0.5 * hbar * (1.0 + 0.5 * tau * (1.0 + 4.0 * J * math.sin(gamma) ** 2))
    return GKUncertainty(numeric=stats.product, closed_form=closed)
