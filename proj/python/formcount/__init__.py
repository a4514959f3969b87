"""Exact counting and density experiments for systems of forms."""

from fractions import Fraction

from ._formcount import FormSystem, GuardExceeded
from . import _formcount as _core

__all__ = [
    "FormSystem",
    "GuardExceeded",
    "evaluate",
    "derivative_tensor",
    "sup_norm_fd",
    "eval_m",
    "aux_count",
    "zero_count",
    "local_count",
    "singular_series",
    "singular_integral",
    "sigma_star",
]


def _q(values):
    return [str(Fraction(v)) for v in values]


def evaluate(system, point):
    return [Fraction(v) for v in _core.evaluate(system, _q(point))]


def derivative_tensor(system, form=0):
    return {idx: Fraction(v) for idx, v in _core.derivative_tensor(system, form).items()}


def sup_norm_fd(system, form=0):
    return Fraction(_core.sup_norm_fd(system, form))


def eval_m(system, slots, form=0):
    return [Fraction(v) for v in _core.eval_m(system, [_q(s) for s in slots], form)]


def aux_count(system, B, method="slab", workers=1):
    return _core.aux_count(system, str(Fraction(B)), method, workers)


def zero_count(system, P, box="full", method="auto", workers=1):
    return _core.zero_count(system, P, box, method, workers)


def local_count(system, p, k):
    raw, normalized = _core.local_count(system, p, k)
    return raw, Fraction(normalized)


def singular_series(system, prime_bound=50, k_max=3):
    out = _core.singular_series(system, prime_bound, k_max)
    out["product"] = Fraction(out["product"])
    for row in out["primes"]:
        row["factor"] = Fraction(row["factor"])
    return out


singular_integral = _core.singular_integral
sigma_star = _core.sigma_star
