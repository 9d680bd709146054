"""Desk-scale executable modular reductions with CRT reconstruction.

Two pipelines, both consuming only residues of exact-evaluator answers:

* Tutte at (x, y)  →  rank-sum queries on stretch-sums of the input with a
  rooted gadget, one prime at a time, recombined by the Chinese remainder
  theorem against an a-priori magnitude bound.
* independent-set count  →  permissive-count queries on cloud blowups.

Primes are found by direct search over small candidates (never assumed to
exist), and every (p, k) pair is re-verified against the gadget sums before
any congruence is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .exact import (
    count_pbis_auto,
    purity_split_sums,
    r2_prime,
    random_cluster,
    tutte,
)
from .graphs import (
    BipartiteGraph,
    Graph,
    LimitExceededError,
    biclique_gadget,
    cloud_blowup,
    fan_gadget,
    is_prime,
)

DEFAULT_PRIME_CAP = 2000
GADGET_ENUM_LIMIT = 16


class GadgetConditionError(ValueError):
    """The supplied (p, k) pair does not satisfy the gadget congruences."""


@dataclass(frozen=True)
class ModP:
    p: int
    value: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "value", self.value % self.p)


def rational_mod_p(r: Fraction, p: int) -> ModP:
    """Embed a rational into Z_p: numerator times inverse denominator."""
    r = Fraction(r)
    if r.denominator % p == 0:
        raise ZeroDivisionError(f"denominator of {r} is divisible by {p}")
    return ModP(p, r.numerator * pow(r.denominator, -1, p))


def crt_reconstruct(residues: list[ModP], bound: int) -> int:
    """The unique integer L with |L| <= bound matching every residue.

    Requires pairwise-coprime moduli with product > 2 * bound; residues
    decode into the signed range (-prod/2, prod/2].
    """
    if not residues:
        raise ValueError("no residues given")
    prod = 1
    for r in residues:
        if gcd(prod, r.p) != 1:
            raise ValueError("moduli are not pairwise coprime")
        prod *= r.p
    if prod <= 2 * bound:
        raise ValueError(
            f"modulus product {prod} too small for bound {bound} (need > {2 * bound})"
        )
    x, mod = 0, 1
    for r in residues:
        # lift x (mod mod) to also satisfy x = r.value (mod r.p)
        t = ((r.value - x) * pow(mod, -1, r.p)) % r.p
        x += mod * t
        mod *= r.p
    if x > mod // 2:
        x -= mod
    if abs(x) > bound:
        raise ValueError(f"reconstructed value {x} violates the bound {bound}")
    for r in residues:
        if x % r.p != r.value:
            raise AssertionError("reconstruction does not match a residue")
    return x


def _primes_up_to(cap: int):
    for p in range(3, cap + 1, 2):
        if is_prime(p):
            yield p


# ---------------------------------------------------------------------------
# Gadget parameter search (Tutte pipeline)


def _nonzero_mod(x: Fraction, p: int) -> bool:
    return x.numerator % p != 0


def _fraction_denominators_ok(p: int, *values: Fraction) -> bool:
    return all(v.denominator % p != 0 for v in values)


def gadget_conditions_hold(
    lam: Fraction, mu: Fraction, p: int, k: int
) -> bool:
    """Check X != 0 and Y == 0 mod p from the gadget closed forms."""
    from .exact import biclique_gadget_closed_forms, fan_gadget_closed_forms

    if mu == -2:
        x, y = biclique_gadget_closed_forms(k, lam)
    else:
        x, y = fan_gadget_closed_forms(k, lam, mu)
    if not _fraction_denominators_ok(p, x, y):
        return False
    return _nonzero_mod(x, p) and rational_mod_p(y, p).value == 0


def find_gadget_params(
    lam: Fraction,
    mu: Fraction,
    count: int = 1,
    prime_cap: int = DEFAULT_PRIME_CAP,
    min_product: int | None = None,
) -> list[tuple[int, int]]:
    """Smallest primes p (with a witness k in [1, p-1]) making the gadget
    congruences hold for (lam, mu).

    Collects ``count`` pairs, or keeps going until the prime product exceeds
    ``min_product`` if that is given.  Refuses lam in {0, 1/2, 1} (the
    corresponding evaluation points are polynomial-time anyway) and mu = 0.
    """
    lam, mu = Fraction(lam), Fraction(mu)
    if lam in (Fraction(0), Fraction(1)) or mu == 0:
        raise ValueError("need lam outside {0,1} and mu nonzero")
    if lam == Fraction(1, 2):
        raise ValueError(
            "lam = 1/2 maps to the easy Tutte curve (x-1)(y-1)=1; refusing"
        )
    found: list[tuple[int, int]] = []
    prod = 1
    a, b = lam.numerator, lam.denominator
    c, d = mu.numerator, mu.denominator
    for p in _primes_up_to(prime_cap):
        if (a * b * c * d) % p == 0:
            continue
        k = _gadget_witness(lam, mu, p)
        if k is None:
            continue
        found.append((p, k))
        prod *= p
        if min_product is not None:
            if prod > min_product:
                return found
        elif len(found) >= count:
            return found
    raise ValueError(
        f"not enough usable primes under {prime_cap} for lam={lam}, mu={mu}"
    )


def _gadget_witness(lam: Fraction, mu: Fraction, p: int) -> int | None:
    """Smallest k in [1, p-1] making the gadget congruences hold, or None."""
    if mu == -1:
        # the mixed-side sum vanishes identically; any k works when 1/lam != 0
        return 1 if lam.denominator % p != 0 else None
    if mu == -2:
        one_minus = 1 - 1 / lam
        if one_minus.numerator % p == 0:
            return None
        target = rational_mod_p((1 / lam**2 - 3 / lam + 1) / one_minus, p).value
        excluded = rational_mod_p(one_minus, p).value
        power = 1
        base = pow(25, 1, p)
        for k in range(1, p):
            power = (power * base) % p
            if power == target and power != excluded:
                return k
        return None
    target = rational_mod_p(1 - 1 / lam, p).value
    base = rational_mod_p(mu + 1, p).value
    power = base  # (mu+1)^(k+1) starting at k=0 -> exponent 1
    for k in range(1, p):
        power = (power * base) % p
        if power == target:
            return k
    return None


# ---------------------------------------------------------------------------
# Stretch-sum congruence (one prime)


def _gadget_for(mu: Fraction, k: int) -> tuple[BipartiteGraph, int]:
    return biclique_gadget(k) if mu == -2 else fan_gadget(k)


def verify_reduction_congruence(
    h: Graph,
    lam: Fraction,
    mu: Fraction,
    p: int,
    k: int,
    max_edges: int | None = None,
    workers: int = 1,
) -> bool:
    """Check, by full enumeration on the stretch-sum G of h with the rooted
    gadget, that the rank sum of G equals
    lam^(n * |U_gadget|) * X^n * Z(h; 1/lam - 1, mu^2) mod p.

    The gadget pair (p, k) is first re-verified from the gadget's own
    purity-split sums; a failure there raises GadgetConditionError rather
    than reporting a congruence mismatch.
    """
    lam, mu = Fraction(lam), Fraction(mu)
    gadget, root = _gadget_for(mu, k)
    if gadget.m <= GADGET_ENUM_LIMIT:
        zp, zm = purity_split_sums(gadget, root, lam, mu)
        x_val = lam * zp
        y_val = lam * zp + zm
    else:
        from .exact import biclique_gadget_closed_forms, fan_gadget_closed_forms

        x_val, y_val = (
            biclique_gadget_closed_forms(k, lam)
            if mu == -2
            else fan_gadget_closed_forms(k, lam, mu)
        )
    if not _fraction_denominators_ok(p, x_val, y_val) or not (
        _nonzero_mod(x_val, p) and rational_mod_p(y_val, p).value == 0
    ):
        raise GadgetConditionError(
            f"(p={p}, k={k}) fails the gadget congruence conditions"
        )
    from .graphs import stretch_sum

    g = stretch_sum(h, gadget, root)
    lhs = r2_prime(g, lam, mu, max_edges, workers).value
    n_u = len(gadget.side_u)
    rhs = (
        lam ** (h.n * n_u)
        * x_val**h.n
        * random_cluster(h, 1 / lam - 1, mu * mu).value
    )
    return rational_mod_p(lhs, p) == rational_mod_p(rhs, p)


# ---------------------------------------------------------------------------
# Pipelines


@dataclass(frozen=True)
class ReductionCert:
    """Everything needed to audit one CRT reconstruction."""

    primes: tuple[int, ...]
    ks: tuple[int, ...]
    residues: tuple[int, ...]
    reconstructed: int
    bound: int
    value: Fraction = field(default=Fraction(0))

    def to_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "ks": list(self.ks),
            "residues": list(self.residues),
            "reconstructed": self.reconstructed,
            "bound": self.bound,
            "value": f"{self.value.numerator}/{self.value.denominator}",
        }


def _rational_square_root(y: Fraction) -> Fraction | None:
    if y < 0:
        return None
    rn, rd = isqrt(y.numerator), isqrt(y.denominator)
    if rn * rn == y.numerator and rd * rd == y.denominator:
        return Fraction(rn, rd)
    return None


def tutte_via_oracle(
    h: Graph,
    x: Fraction,
    y: Fraction,
    prime_cap: int = DEFAULT_PRIME_CAP,
    max_edges: int | None = None,
    workers: int = 1,
) -> tuple[Fraction, ReductionCert]:
    """Tutte polynomial of h at (x, y) recovered purely from rank-sum
    residues on gadget stretch-sums, via (x-1)(y-1) = 1/lam - 1 and
    y - 1 = mu^2.

    Returns (value, certificate); the value must equal :func:`tutte` exactly.
    """
    x, y = Fraction(x), Fraction(y)
    mu = _rational_square_root(y - 1)
    if mu is None or mu == 0:
        raise ValueError("y - 1 must be a positive rational square")
    denom = (x - 1) * (y - 1) + 1
    if denom == 0:
        raise ValueError("(x-1)(y-1) = -1 has no matching weight")
    lam = 1 / denom
    if lam in (Fraction(0), Fraction(1), Fraction(1, 2)):
        raise ValueError(
            f"parameters map to the excluded easy weight lam={lam}"
        )
    n, m = h.n, h.m
    a, b = lam.numerator, lam.denominator
    c, d = mu.numerator, mu.denominator
    bound = 2**m * abs(b - a) ** n * abs(a) ** n * abs(c) ** (2 * m) * abs(d) ** (2 * m)
    pairs = find_gadget_params(lam, mu, prime_cap=prime_cap, min_product=2 * bound)

    residues: list[ModP] = []
    for p, k in pairs:
        gadget, root = _gadget_for(mu, k)
        zp, zm = purity_split_sums(gadget, root, lam, mu)
        x_val = lam * zp
        if not (
            _fraction_denominators_ok(p, x_val, lam * zp + zm)
            and _nonzero_mod(x_val, p)
            and rational_mod_p(lam * zp + zm, p).value == 0
        ):
            raise GadgetConditionError(f"(p={p}, k={k}) failed re-verification")
        from .graphs import stretch_sum

        g = stretch_sum(h, gadget, root)
        query = r2_prime(g, lam, mu, max_edges, workers).value
        n_u = len(gadget.side_u)
        # L = a^n d^(2m) lam^(-n|U|) X^(-n) * query  (mod p)
        factor = Fraction(a**n * d ** (2 * m)) / (lam ** (n * n_u) * x_val**n)
        residues.append(rational_mod_p(factor * query, p))

    big_l = crt_reconstruct(residues, bound)
    z_val = Fraction(big_l, a**n * d ** (2 * m))
    from .graphs import components

    kappa_full, _ = components(h, h.full_subset())
    value = (x - 1) ** (-kappa_full) * (y - 1) ** (-n) * z_val
    cert = ReductionCert(
        tuple(p for p, _ in pairs),
        tuple(k for _, k in pairs),
        tuple(r.value for r in residues),
        big_l,
        bound,
        value,
    )
    return value, cert


def find_pbis_params(
    eta: Fraction,
    count: int = 1,
    prime_cap: int = DEFAULT_PRIME_CAP,
    min_product: int | None = None,
    cloud_safe: bool = False,
) -> list[tuple[int, int]]:
    """Primes p > 2 with a witness k in [1, p-1] such that
    ((1+eta)/(1-eta))^(2k) = -1 mod p, smallest k per prime.

    With ``cloud_safe`` only k = 1 witnesses are returned.  The cloud
    congruence needs every partial-cloud binomial C(kp, h), 0 < h < kp, to
    vanish mod p, which holds exactly when kp is a power of p; already the
    edgeless single-vertex instance separates 2^(kp) = 2^k from 2 mod p for
    other k.  Witnesses k = p^j exist iff the k = 1 witness does, so k = 1
    loses nothing except cloud size.
    """
    eta = Fraction(eta)
    if eta in (Fraction(0), Fraction(1), Fraction(-1)):
        raise ValueError("eta must avoid {0, 1, -1}")
    ratio = (1 + eta) / (1 - eta)
    found: list[tuple[int, int]] = []
    prod = 1
    for p in _primes_up_to(prime_cap):
        if (eta.numerator * eta.denominator) % p == 0:
            continue
        if (eta - 1).numerator % p == 0 or (eta + 1).numerator % p == 0:
            continue
        r = rational_mod_p(ratio, p).value
        r2k = (r * r) % p
        power = 1
        k_found = None
        for k in range(1, p):
            power = (power * r2k) % p
            if power == p - 1:
                k_found = k
                break
            if power == 1:
                break  # cycled without hitting -1
        if k_found is None or (cloud_safe and k_found != 1):
            continue
        found.append((p, k_found))
        prod *= p
        if min_product is not None:
            if prod > min_product:
                return found
        elif len(found) >= count:
            return found
    raise ValueError(f"not enough usable primes under {prime_cap} for eta={eta}")


def bis_via_pbis_oracle(
    g: Graph,
    eta: Fraction,
    prime_cap: int = DEFAULT_PRIME_CAP,
) -> tuple[int, ReductionCert]:
    """Independent-set count of g recovered from permissive-count residues
    on cloud blowups, one prime at a time, recombined by CRT against the
    trivial bound 2^n."""
    eta = Fraction(eta)
    bound = 2**g.n
    pairs = find_pbis_params(
        eta, prime_cap=prime_cap, min_product=2 * bound, cloud_safe=True
    )
    residues: list[ModP] = []
    for p, k in pairs:
        blown = cloud_blowup(g, p, k)
        try:
            q = count_pbis_auto(blown, eta)
        except LimitExceededError as exc:
            raise LimitExceededError(
                f"cloud graph for p={p}, k={k} too large: {exc}"
            ) from exc
        residues.append(rational_mod_p(q, p))
    value = crt_reconstruct(residues, bound)
    cert = ReductionCert(
        tuple(p for p, _ in pairs),
        tuple(k for _, k in pairs),
        tuple(r.value for r in residues),
        value,
        bound,
        Fraction(value),
    )
    return value, cert
