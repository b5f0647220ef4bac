"""Parameter maps and operator algebra for Ornstein-Uhlenbeck processes of order p.

An OU(p) process is obtained by composing p first-order OU operators (one per
complex rate kappa in the open right half-plane) applied to scaled Wiener
noise.  The composition collapses, by partial fractions, to a linear
combination of basic processes whose moving-average kernel is a finite sum of
terms ``exp(-kappa*u) * (-kappa*u)**j / j!``.  This module houses:

* the real reparameterisation ``phi`` (coefficients of the polynomial
  ``prod(1 + kappa_j z) = 1 - sum(phi_j z^j)``) and its inverse,
* root grouping into multiplicities and partial-fraction weights,
* construction of the exponential-polynomial kernel of the process,
* symbolic application of a single OU operator to a kernel (used to
  cross-check the closed-form construction).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateRoots, StationarityViolation

# Relative tolerance for merging near-coincident roots into multiplicities.
DEFAULT_GROUP_TOL = 1e-7

# Roots with |Im kappa| below this (relative) are snapped to the real axis.
REAL_SNAP_TOL = 1e-9


@dataclass(frozen=True)
class OUModel:
    """OU(p) model in the real parameterisation (phi, sigma2, mu).

    ``phi`` are the coefficients of ``1 - sum(phi_j z^j) = prod(1 + kappa_j z)``,
    ``sigma2`` the driving-noise variance per unit time and ``mu`` the process
    mean.  Admissibility (all kappa in the right half-plane) is checked on
    demand via :func:`kappa_from_phi`.
    """

    phi: tuple
    sigma2: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def kappa(self) -> np.ndarray:
        """Complex rate vector; raises StationarityViolation if inadmissible."""
        return kappa_from_phi(np.asarray(self.phi))

    @classmethod
    def from_kappa(cls, kappa, sigma2=1.0, mu=0.0) -> "OUModel":
        return cls(phi=tuple(phi_from_kappa(kappa)), sigma2=sigma2, mu=mu)

    def to_dict(self) -> dict:
        return {"p": self.p, "phi": list(self.phi), "sigma2": self.sigma2,
                "mu": self.mu}

    @classmethod
    def from_dict(cls, d: dict) -> "OUModel":
        phi = d["phi"]
        if "p" in d and int(d["p"]) != len(phi):
            raise ValueError(f"inconsistent model document: p={d['p']} "
                             f"but len(phi)={len(phi)}")
        return cls(phi=tuple(phi), sigma2=float(d.get("sigma2", 1.0)),
                   mu=float(d.get("mu", 0.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "OUModel":
        return cls.from_dict(json.loads(s))


def phi_from_kappa(kappa) -> np.ndarray:
    """Expand ``prod(1 + kappa_j z)`` and return phi with ``phi_j = -coeff_j``.

    The result is real whenever ``kappa`` is closed under conjugation;
    imaginary residue below 1e-12 (relative) is discarded.
    """
    kappa = np.atleast_1d(np.asarray(kappa, dtype=complex))
    coeffs = np.array([1.0 + 0j])
    for k in kappa:
        coeffs = np.convolve(coeffs, np.array([1.0, k]))
    phi = -coeffs[1:]
    scale = np.max(np.abs(phi)) or 1.0
    if np.max(np.abs(phi.imag)) > 1e-10 * scale:
        raise ValueError("kappa vector is not conjugation-closed; "
                         "phi would be complex")
    return phi.real


def kappa_from_phi(phi) -> np.ndarray:
    """Invert the polynomial map: roots z_j of ``1 - sum(phi_j z^j)``, kappa_j = -1/z_j.

    Roots come from the companion matrix (numpy), polished by one Newton step.
    Near-real roots are snapped to the real axis and the remaining ones are
    symmetrized into exact conjugate pairs, so a real phi always yields a
    conjugation-closed kappa.

    Raises
    ------
    StationarityViolation
        If any recovered kappa has non-positive real part.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    # ascending coefficients of g(z) = 1 - sum phi_j z^j
    coeffs = np.concatenate(([1.0], -phi))
    z = np.polynomial.polynomial.polyroots(coeffs)
    # one Newton polish step per root
    dcoeffs = np.polynomial.polynomial.polyder(coeffs)
    g = np.polynomial.polynomial.polyval(z, coeffs)
    gp = np.polynomial.polynomial.polyval(z, dcoeffs)
    nz = gp != 0
    z[nz] = z[nz] - g[nz] / gp[nz]
    kappa = -1.0 / z
    kappa = _symmetrize_conjugates(kappa)
    if np.any(kappa.real <= 0):
        bad = kappa[kappa.real <= 0]
        raise StationarityViolation(
            f"phi={np.array2string(phi, precision=6)} maps to rates with "
            f"non-positive real part: {bad}")
    return kappa


def _symmetrize_conjugates(kappa: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the axis and pair the rest as exact conjugates."""
    kappa = np.asarray(kappa, dtype=complex).copy()
    mags = np.abs(kappa)
    near_real = np.abs(kappa.imag) < REAL_SNAP_TOL * np.maximum(mags, 1e-300)
    kappa[near_real] = kappa[near_real].real
    complex_idx = [i for i in range(len(kappa)) if not near_real[i]]
    pos = [i for i in complex_idx if kappa[i].imag > 0]
    neg = [i for i in complex_idx if kappa[i].imag < 0]
    used = set()
    for i in pos:
        best, best_d = None, np.inf
        for j in neg:
            if j in used:
                continue
            d = abs(kappa[i] - np.conj(kappa[j]))
            if d < best_d:
                best, best_d = j, d
        if best is not None:
            used.add(best)
            avg = 0.5 * (kappa[i] + np.conj(kappa[best]))
            kappa[i] = avg
            kappa[best] = np.conj(avg)
    return kappa


def group_roots(kappa, tol=None) -> list:
    """Merge rates closer than ``tol`` into multiplicity groups.

    Parameters
    ----------
    kappa : array-like of complex
    tol : float, optional
        Absolute merge distance.  Defaults to ``DEFAULT_GROUP_TOL`` scaled by
        the largest root modulus.

    Returns
    -------
    list of (complex centroid, int multiplicity), centroids pairwise
    separated by more than ``tol``.
    """
    kappa = np.atleast_1d(np.asarray(kappa, dtype=complex))
    if tol is None:
        tol = DEFAULT_GROUP_TOL * max(np.max(np.abs(kappa)), 1.0)
    clusters = []  # [running sum, count]
    for k in kappa:
        placed = False
        for c in clusters:
            if abs(k - c[0] / c[1]) <= tol:
                c[0] += k
                c[1] += 1
                placed = True
                break
        if not placed:
            clusters.append([k, 1])
    return [(s / m, m) for s, m in clusters]


def partial_fraction_coefficients(groups) -> np.ndarray:
    """Partial-fraction weights K_h = 1 / prod_{l != h} (1 - kappa_l/kappa_h)^{p_l}.

    ``groups`` is a list of (kappa, multiplicity) with pairwise distinct kappa.
    """
    roots = [g[0] for g in groups]
    mults = [g[1] for g in groups]
    q = len(roots)
    K = np.empty(q, dtype=complex)
    for h in range(q):
        prod = 1.0 + 0j
        for l in range(q):
            if l == h:
                continue
            base = 1.0 - roots[l] / roots[h]
            if base == 0:
                raise DegenerateRoots(
                    f"coincident roots {roots[h]} and {roots[l]}")
            prod *= base ** mults[l]
        K[h] = 1.0 / prod
    return K


@dataclass(frozen=True)
class ExponentialPolynomialKernel:
    """Moving-average kernel f(u) = sum_h,j c_hj exp(-kappa_h u)(-kappa_h u)^j / j!.

    Coefficients are stored unscaled by sigma; the noise scale is kept in the
    ``sigma`` field and applied by covariance routines.  ``terms`` is a tuple
    of (kappa, degree, coeff).
    """

    terms: tuple
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "terms",
            tuple((complex(k), int(j), complex(c)) for k, j, c in self.terms))

    @property
    def order(self) -> int:
        return len(self.terms)

    def min_decay(self) -> float:
        """Slowest decay rate min Re(kappa); controls the kernel's tail."""
        return min(k.real for k, _, _ in self.terms)

    def __call__(self, u):
        """Evaluate sigma * f(u) for u >= 0 (vectorized)."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        for k, j, c in self.terms:
            out += c * np.exp(-k * u) * (-k * u) ** j / math.factorial(j)
        return self.sigma * out

    def evaluate_real(self, u, rtol=1e-10):
        """Evaluate on u >= 0, asserting the imaginary residue is negligible."""
        vals = self(u)
        scale = np.max(np.abs(vals)) or 1.0
        if np.max(np.abs(vals.imag)) > rtol * scale:
            raise ValueError("kernel is not real to tolerance; "
                             "was it built from a conjugation-closed kappa?")
        return vals.real


def _truncated_series_product(series_list, order):
    """Product of truncated power series (ascending coefficients)."""
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    for s in series_list:
        out = np.convolve(out, s)[: order + 1]
    return out


def kernel_from_kappa(kappa, sigma=1.0, tol=None) -> ExponentialPolynomialKernel:
    """Closed-form kernel of OU(kappa) by partial fractions of the transfer function.

    The composed operator has transfer function s^p / prod_h (s+kappa_h)^{p_h};
    expanding s^{p-1} / prod (s+kappa_h)^{p_h} around each pole gives the
    coefficient of every basis process exp(-kappa_h u)(-kappa_h u)^j / j!.
    For pairwise-distinct roots the degree-zero coefficients reduce to the
    partial-fraction weights K_h, and for a single repeated root to the
    binomial expansion of the operator power.
    """
    groups = group_roots(kappa, tol)
    p = sum(m for _, m in groups)
    terms = []
    for h, (root, mult) in enumerate(groups):
        s0 = -root
        # Taylor coefficients (order < mult) of s^{p-1} prod_{l!=h}(s+k_l)^{-p_l}
        # around s0.  Numerator (t + s0)^{p-1}:
        num = np.array([math.comb(p - 1, m) * s0 ** (p - 1 - m)
                        for m in range(mult)], dtype=complex)
        factors = [num]
        for l, (other, om) in enumerate(groups):
            if l == h:
                continue
            d = other - root
            inv = np.array([(-1) ** m * math.comb(om + m - 1, m)
                            / d ** (om + m) for m in range(mult)],
                           dtype=complex)
            factors.append(inv)
        taylor = _truncated_series_product(factors, mult - 1)
        # coefficient of 1/(s+root)^{j+1} is taylor[mult-1-j]
        for j in range(mult):
            c = taylor[mult - 1 - j] / (-root) ** j
            terms.append((root, j, c))
    return ExponentialPolynomialKernel(terms=tuple(terms), sigma=sigma)


def kernel_from_model(model: OUModel, tol=None) -> ExponentialPolynomialKernel:
    """Kernel of the OU(p) process parameterised by ``model``.

    Raises StationarityViolation for inadmissible phi.
    """
    return kernel_from_kappa(model.kappa(), sigma=model.sigma, tol=tol)


def _monomials_from_terms(terms):
    """Kernel terms -> dict {(kappa, m): coeff} in the basis exp(-kappa u) u^m."""
    mono = {}
    for k, j, c in terms:
        key = (k, j)
        mono[key] = mono.get(key, 0.0) + c * (-k) ** j / math.factorial(j)
    return mono


def _terms_from_monomials(mono):
    terms = []
    for (k, m), b in mono.items():
        if b == 0:
            continue
        terms.append((k, m, b * math.factorial(m) / (-k) ** m))
    return tuple(terms)


def _match_key(mono, k, tol=1e-12):
    """Canonicalize kappa keys that differ only by floating noise."""
    for (k2, _m) in mono:
        if abs(k2 - k) <= tol * max(abs(k), 1.0):
            return k2
    return k


def compose_kernels(kernel: ExponentialPolynomialKernel,
                    b_kappa: complex) -> ExponentialPolynomialKernel:
    """Apply one OU operator with rate ``b_kappa`` to an existing kernel.

    The image of a kernel f under the operator is
    ``f(0) exp(-kappa_b u) + int_0^u exp(-kappa_b (u-v)) f'(v) dv``,
    computed symbolically in the monomial basis exp(-kappa u) u^m.  Matching
    rates raise the polynomial degree; distinct rates split by partial
    fractions.  Iterated composition starting from a single OU kernel must
    reproduce :func:`kernel_from_kappa`.
    """
    b_kappa = complex(b_kappa)
    mono = _monomials_from_terms(kernel.terms)
    out = {}

    def add(k, m, val):
        k = _match_key(out, k)
        key = (k, m)
        out[key] = out.get(key, 0.0) + val

    for (k, m), b in mono.items():
        if m == 0:
            add(b_kappa, 0, b)  # f(0) contribution
        # derivative of b * exp(-k v) v^m
        deriv = [(m, -k * b)]
        if m >= 1:
            deriv.append((m - 1, m * b))
        for deg, d in deriv:
            if abs(b_kappa - k) <= 1e-12 * max(abs(k), 1.0):
                add(k, deg + 1, d / (deg + 1))
            else:
                a = b_kappa - k
                fact = math.factorial(deg)
                for r in range(deg + 1):
                    coef = d * (-1) ** r * fact / math.factorial(deg - r) \
                        / a ** (r + 1)
                    add(k, deg - r, coef)
                add(b_kappa, 0, d * (-1) ** (deg + 1) * fact / a ** (deg + 1))

    # drop numerically vanished terms
    scale = max((abs(v) for v in out.values()), default=1.0)
    cleaned = {key: v for key, v in out.items() if abs(v) > 1e-14 * scale}
    return ExponentialPolynomialKernel(terms=_terms_from_monomials(cleaned),
                                       sigma=kernel.sigma)


def kernel_via_composition(kappa, sigma=1.0) -> ExponentialPolynomialKernel:
    """Build the OU(p) kernel by iterated operator application (cross-check path)."""
    kappa = np.atleast_1d(np.asarray(kappa, dtype=complex))
    kern = ExponentialPolynomialKernel(terms=((kappa[0], 0, 1.0),), sigma=sigma)
    for k in kappa[1:]:
        kern = compose_kernels(kern, k)
    return kern


def random_admissible_kappa(rng, p, lam_range=(1e-3, 5.0),
                            allow_complex=True) -> np.ndarray:
    """Draw a conjugation-closed admissible kappa of length p.

    Decay rates are log-uniform over ``lam_range``; a random number of
    conjugate pairs gets oscillation rates of comparable magnitude.
    """
    lo, hi = math.log(lam_range[0]), math.log(lam_range[1])
    n_pairs = rng.integers(0, p // 2 + 1) if allow_complex else 0
    kappa = []
    for _ in range(n_pairs):
        lam = math.exp(rng.uniform(lo, hi))
        mu = math.exp(rng.uniform(lo, hi))
        kappa.extend([complex(lam, mu), complex(lam, -mu)])
    for _ in range(p - 2 * n_pairs):
        kappa.append(complex(math.exp(rng.uniform(lo, hi)), 0.0))
    return np.array(kappa, dtype=complex)


def parse_complex_list(text: str) -> np.ndarray:
    """Parse a comma-separated list like '0.9,0.2+0.4i,0.2-0.4i'."""
    vals = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j")
        if not tok:
            continue
        try:
            vals.append(complex(tok))
        except ValueError as e:
            raise ValueError(f"cannot parse complex number {tok!r}") from e
    if not vals:
        raise ValueError("empty parameter list")
    return np.array(vals, dtype=complex)


def format_kappa(kappa) -> str:
    parts = []
    for k in np.atleast_1d(kappa):
        k = complex(k)
        if k.imag == 0:
            parts.append(f"{k.real:.6g}")
        else:
            sign = "+" if k.imag >= 0 else "-"
            parts.append(f"{k.real:.6g}{sign}{abs(k.imag):.6g}i")
    return ", ".join(parts)
