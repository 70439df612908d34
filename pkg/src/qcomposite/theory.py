"""Closed-form quantities for q-composite random key graphs.

Edge probabilities (exact hypergeometric tail and its small-K^2/P
asymptote), the deviation of a parameter point from the critical scaling,
the limiting property probabilities, critical design parameters and the
predicted transition width.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .graph import ModelParams
from .properties.types import Kind, PropertySpec

NODE_SEARCH_CAP = 10**12
_SMALL_N_SCAN = 20


class UnreachableTarget(ValueError):
    """No admissible parameter value meets the requested probability."""


def _check_qkp(q: int, K: int, P: int) -> None:
    if not 1 <= q <= K <= P:
        raise ValueError(f"need 1 <= q <= K <= P, got q={q}, K={K}, P={P}")


# --- edge probability -------------------------------------------------------

def overlap_log_pmf(K: int, P: int) -> tuple[int, list[float]]:
    """Log-probabilities of |S_i & S_j| = u for two uniform K-subsets of a
    P-pool, for u from the lowest attainable overlap max(0, 2K - P) to K.

    The lowest term is a product of min(K, P-K) factors (1 - m/(P-i)), summed
    as log1p terms; the rest follow from the pmf ratio
    h(u+1)/h(u) = (K-u)^2 / ((u+1)(P-2K+u+1)).
    """
    u0 = max(0, 2 * K - P)
    m = min(K, P - K)
    log_h = math.fsum(math.log1p(-m / (P - i)) for i in range(m))
    out = [log_h]
    for u in range(u0, K):
        log_h += 2 * math.log(K - u) - math.log(u + 1) - math.log(P - 2 * K + u + 1)
        out.append(log_h)
    return u0, out


def exact_edge_probability(q: int, K: int, P: int) -> float:
    """P[two K-subsets of a P-pool share at least q elements]."""
    _check_qkp(q, K, P)
    u0, logs = overlap_log_pmf(K, P)
    top = max(logs)
    tail = [math.exp(x - top) for x in logs[max(0, q - u0):]]
    if not tail:
        return 0.0
    return min(1.0, math.exp(top) * math.fsum(tail))


def exact_edge_probability_rational(q: int, K: int, P: int) -> Fraction:
    """Same tail as an exact fraction (big-integer binomials)."""
    _check_qkp(q, K, P)
    num = sum(math.comb(K, u) * math.comb(P - K, K - u) for u in range(q, K + 1))
    return Fraction(num, math.comb(P, K))


def asymptotic_edge_probability(q: int, K: int, P: int) -> float:
    """(K^2/P)^q / q!, the small-K^2/P equivalent of the edge probability."""
    _check_qkp(q, K, P)
    return math.exp(q * (2 * math.log(K) - math.log(P)) - math.lgamma(q + 1))


def er_coupling_probability(q: int, K: int, P: int) -> float:
    """Edge probability of the Erdos-Renyi graph used in coupling runs.

    This is the exact edge probability: the lower-order correction factor of
    the asymptotic coupling has no finite-n value.
    """
    return exact_edge_probability(q, K, P)


# --- deviation and limits ---------------------------------------------------

def kappa_of(spec: PropertySpec) -> int:
    """Minimum-degree requirement driving the threshold of ``spec``."""
    if spec.kind is Kind.HAMILTON_CYCLE:
        return 2
    if spec.kind is Kind.PERFECT_MATCHING:
        return 1
    return spec.k


@dataclass(frozen=True)
class Deviation:
    kappa: int
    scaling: float
    alpha: float

    @property
    def scaling_in_unit_interval(self) -> bool:
        return 0.0 < self.scaling <= 1.0


def _log_scaling(q: int, K: float, P: float) -> float:
    return q * (2 * math.log(K) - math.log(P)) - math.lgamma(q + 1)


def threshold_offset(n: float, kappa: int) -> float:
    """ln n + (kappa - 1) ln ln n."""
    if kappa >= 2 and n < 3:
        raise ValueError(f"ln ln n term needs n >= 3 (kappa={kappa}, n={n})")
    f = math.log(n)
    if kappa > 1:
        f += (kappa - 1) * math.log(math.log(n))
    return f


def _alpha(n: float, q: int, K: float, P: float, kappa: int) -> float:
    return n * math.exp(_log_scaling(q, K, P)) - threshold_offset(n, kappa)


def deviation(params: ModelParams, spec: PropertySpec) -> Deviation:
    kappa = kappa_of(spec)
    scaling = math.exp(_log_scaling(params.q, params.K, params.P))
    return Deviation(kappa, scaling, _alpha(params.n, params.q, params.K, params.P, kappa))


@dataclass(frozen=True)
class LimitProbability:
    """A limiting probability, or ``value is None`` when only a zero-one law
    is known at this deviation."""

    value: float | None

    @property
    def indeterminate(self) -> bool:
        return self.value is None


def limit_probability(spec: PropertySpec, alpha: float) -> LimitProbability:
    """exp(-e^{-alpha} / (kappa-1)!) for all properties with a known limit;
    k-robustness only has the 0 / 1 endpoints."""
    if spec.kind is Kind.K_ROBUSTNESS:
        if alpha == math.inf:
            return LimitProbability(1.0)
        if alpha == -math.inf:
            return LimitProbability(0.0)
        return LimitProbability(None)
    if alpha == math.inf:
        return LimitProbability(1.0)
    if alpha == -math.inf or -alpha > 700:
        return LimitProbability(0.0)
    kappa = kappa_of(spec)
    return LimitProbability(math.exp(-math.exp(-alpha) / math.factorial(kappa - 1)))


def target_deviation(spec: PropertySpec, p: float) -> float:
    """Smallest deviation whose limiting probability is at least p:
    -ln((kappa-1)! ln(1/p))."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"target probability must lie in (0, 1), got {p}")
    if spec.kind is Kind.K_ROBUSTNESS:
        # Same scaling as k-connectivity; use its limit law as the design proxy.
        spec = PropertySpec.kconn(spec.k)
    kappa = kappa_of(spec)
    return -math.log(math.factorial(kappa - 1) * math.log(1.0 / p))


# --- critical parameters ----------------------------------------------------

@dataclass(frozen=True)
class CriticalParams:
    solved_for: str
    value: int
    target_probability: float
    property: PropertySpec
    clamped: bool = False
    closed_form: float | None = None

    def to_dict(self) -> dict:
        return {
            "solved_for": self.solved_for,
            "value": self.value,
            "target_probability": self.target_probability,
            "property": str(self.property),
            "clamped": self.clamped,
            "closed_form": self.closed_form,
        }


def _rhs(n: float, kappa: int, target: float) -> float:
    return threshold_offset(n, kappa) + target


def critical_key_ring(q: int, n: int, P: int, spec: PropertySpec, p: float) -> CriticalParams:
    """Minimal K in [q, P] whose deviation meets the target for probability p."""
    if n < 3:
        raise ValueError("need n >= 3")
    kappa = kappa_of(spec)
    target = target_deviation(spec, p)
    rhs = _rhs(n, kappa, target)
    if rhs <= 0:
        raise UnreachableTarget(
            f"closed form undefined: ln n + (kappa-1) ln ln n - ln((kappa-1)! ln(1/p)) = {rhs:.6g} <= 0")
    closed = math.sqrt(P) * (math.factorial(q) * rhs / n) ** (1.0 / (2 * q))
    K = math.ceil(closed)

    def ok(K):
        return _alpha(n, q, K, P, kappa) >= target

    # Settle float rounding at the boundary against the same evaluation.
    while K > 1 and ok(K - 1):
        K -= 1
    while not ok(K):
        K += 1
        if K > P:
            raise UnreachableTarget(f"even K = P = {P} misses the target")
    clamped = False
    if K < q:
        K, clamped = q, True
    if K > P:
        raise UnreachableTarget(f"critical key ring {K} exceeds the pool size {P}")
    return CriticalParams("K", K, p, spec, clamped, closed)


def critical_key_pool(q: int, n: int, K: int, spec: PropertySpec, p: float) -> CriticalParams:
    """Maximal P >= K whose deviation meets the target for probability p."""
    if n < 3:
        raise ValueError("need n >= 3")
    kappa = kappa_of(spec)
    target = target_deviation(spec, p)
    rhs = _rhs(n, kappa, target)
    if rhs <= 0:
        raise UnreachableTarget(
            f"closed form undefined: ln n + (kappa-1) ln ln n - ln((kappa-1)! ln(1/p)) = {rhs:.6g} <= 0")
    closed = K * K * (n / (math.factorial(q) * rhs)) ** (1.0 / q)
    P = math.floor(closed)

    def ok(P):
        return _alpha(n, q, K, P, kappa) >= target

    while ok(P + 1):
        P += 1
    while P >= 1 and not ok(P):
        P -= 1
    if P < K:
        raise UnreachableTarget(f"no pool size P >= K = {K} meets the target")
    return CriticalParams("P", P, p, spec, False, closed)


def critical_node_count(q: int, K: int, P: int, spec: PropertySpec, p: float) -> CriticalParams:
    """Minimal n >= 3 whose deviation meets the target for probability p.

    Scans n < 20 exhaustively, then bisects on the convex deviation curve.
    """
    _check_qkp(q, K, P)
    kappa = kappa_of(spec)
    target = target_deviation(spec, p)

    def ok(n):
        return _alpha(n, q, K, P, kappa) >= target

    for n in range(3, _SMALL_N_SCAN):
        if ok(n):
            return CriticalParams("n", n, p, spec)
    lo = _SMALL_N_SCAN
    if ok(lo):
        return CriticalParams("n", lo, p, spec)

    def rising(n):
        return _alpha(n + 1, q, K, P, kappa) >= _alpha(n, q, K, P, kappa)

    # Move past the minimum of the (convex) deviation curve.
    if not rising(lo):
        a, b = lo, lo
        while not rising(b):
            a, b = b, 2 * b
            if b > NODE_SEARCH_CAP:
                raise UnreachableTarget(f"no n <= {NODE_SEARCH_CAP} meets the target")
        while b - a > 1:
            mid = (a + b) // 2
            if rising(mid):
                b = mid
            else:
                a = mid
        lo = b
    if ok(lo):
        return CriticalParams("n", lo, p, spec)
    hi = lo
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > NODE_SEARCH_CAP:
            raise UnreachableTarget(f"no n <= {NODE_SEARCH_CAP} meets the target")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return CriticalParams("n", hi, p, spec)


def critical_satisfied(c: CriticalParams, q: int, n: int | None = None, K: int | None = None,
                       P: int | None = None) -> bool:
    """Boundary self-consistency of a solver result: the target holds at the
    returned value and fails one step beyond it."""
    spec = c.property
    kappa = kappa_of(spec)
    target = target_deviation(spec, c.target_probability)

    def ok(n_, K_, P_):
        return _alpha(n_, q, K_, P_, kappa) >= target

    v = c.value
    if c.solved_for == "K":
        if c.clamped:
            return ok(n, v, P)
        return ok(n, v, P) and (v - 1 < 1 or not ok(n, v - 1, P))
    if c.solved_for == "P":
        return ok(n, K, v) and not ok(n, K, v + 1)
    return ok(v, K, P) and (v == 3 or not ok(v - 1, K, P))


# --- transition width -------------------------------------------------------

def predicted_width(q: int, n: int, P: int, spec: PropertySpec, eps: float) -> float:
    """Leading-order transition width in key-ring units.

    sqrt(P) n^(-1/(2q)) (ln n)^((1-2q)/(2q)) (c1 - c2) (q!)^(1/(2q)) / (2q)
    with c1 - c2 = ln(ln(1/eps) / ln(1/(1-eps))), the limiting choice of
    the free constants.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    spread = math.log(math.log(1.0 / eps) / math.log(1.0 / (1.0 - eps)))
    return (math.sqrt(P) * n ** (-1.0 / (2 * q)) * math.log(n) ** ((1 - 2 * q) / (2 * q))
            * spread * math.factorial(q) ** (1.0 / (2 * q)) / (2 * q))


class PoolGrowth(enum.Enum):
    LINEAR = "Theta(n) & o(n ln n)"
    N_LOG_N = "Theta(n ln n)"
    SUPER_N_LOG_N = "omega(n ln n)"


class WidthRegime(enum.Enum):
    ZERO_OR_ONE = "0-or-1"
    BOUNDED = "Theta(1)"
    UNBOUNDED = "omega(1)"


def width_regime(q: int, growth: PoolGrowth) -> WidthRegime:
    """Asymptotic transition-width class for k-connectivity."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q >= 2:
        return WidthRegime.UNBOUNDED
    return {
        PoolGrowth.LINEAR: WidthRegime.ZERO_OR_ONE,
        PoolGrowth.N_LOG_N: WidthRegime.BOUNDED,
        PoolGrowth.SUPER_N_LOG_N: WidthRegime.UNBOUNDED,
    }[growth]
