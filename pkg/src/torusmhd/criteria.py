"""Regularity-criterion bookkeeping: admissible exponent regions, monitored
quantities, and the Gronwall right-hand-side functionals.

Admissibility is decided in exact rational arithmetic on the binary values
of the inputs, so boundary pairs land on the correct side deterministically.
The convention 1/inf = 0 applies throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from enum import Enum
from fractions import Fraction

from .field import SpectralField, gradient, partial_derivative
from .norms import NormSeries, accumulate, lp_norm, wxyz

__all__ = [
    "Theorem",
    "CriterionSpec",
    "MonitorStatus",
    "admissible",
    "monitor_update",
    "bootstrap_trigger",
    "gronwall_rhs",
    "monitored_components",
    "monitored_field",
    "p_label",
    "SMALLNESS_ENDPOINTS",
]


class Theorem(Enum):
    T1_1 = "T1_1"
    T1_2 = "T1_2"
    T1_3 = "T1_3"
    T1_4 = "T1_4"
    T1_5 = "T1_5"
    CLASSICAL_U = "CLASSICAL_U"
    CLASSICAL_GRADU = "CLASSICAL_GRADU"
    CLASSICAL_GRADPI = "CLASSICAL_GRADPI"


# canonical monitored quantities, in column order
_COMPONENTS = {
    Theorem.T1_1: ("u3", "u4"),
    Theorem.T1_2: ("grad_u3", "grad_u4"),
    Theorem.T1_3: ("u3", "u4", "b"),
    Theorem.T1_4: ("grad_u3", "grad_u4", "grad_b"),
    Theorem.T1_5: ("dpi3", "dpi4"),
    Theorem.CLASSICAL_U: ("u",),
    Theorem.CLASSICAL_GRADU: ("grad_u",),
    Theorem.CLASSICAL_GRADPI: ("grad_pi",),
}

SMALLNESS_ENDPOINTS = {
    Theorem.T1_1: Fraction(6),
    Theorem.T1_3: Fraction(6),
    Theorem.T1_2: Fraction(12, 5),
    Theorem.T1_4: Fraction(12, 5),
}

_PRESSURE_TAGS = frozenset({"dpi3", "dpi4", "grad_pi"})


def monitored_components(theorem: Theorem) -> tuple[str, ...]:
    return _COMPONENTS[theorem]


def _as_frac(x) -> Fraction | float:
    if x == math.inf:
        return math.inf
    return Fraction(x)


def _inv(x) -> Fraction:
    # 1/inf = 0
    return Fraction(0) if x == math.inf else 1 / Fraction(x)


def admissible(theorem: Theorem, p, r, dim: int = 4) -> bool:
    """Whether the integrability pair (p, r) lies in the theorem's region.

    ``dim`` enters only the classical (dimension-generic) criteria.  Values
    are compared exactly as rationals, including the open/closed endpoints.
    """
    pf, rf = _as_frac(p), _as_frac(r)
    if pf != math.inf and pf < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    if rf != math.inf and rf < 1:
        raise ValueError(f"r must be >= 1 or inf, got {r}")
    ip, ir = _inv(pf), _inv(rf)
    scal = 4 * ip + 2 * ir

    if theorem in (Theorem.T1_1, Theorem.T1_3):
        return pf > 6 and scal <= ip + Fraction(1, 2)
    if theorem in (Theorem.T1_2, Theorem.T1_4):
        if Fraction(12, 5) < pf <= 4:
            return scal <= Fraction(5, 4) + ip
        if pf > 4:
            return scal <= 1 + 2 * ip
        return False
    if theorem is Theorem.T1_5:
        return Fraction(12, 7) < pf < 6 and scal < Fraction(8, 3)
    if theorem is Theorem.CLASSICAL_U:
        return pf > dim and dim * ip + 2 * ir <= 1
    if theorem is Theorem.CLASSICAL_GRADU:
        r_cap = Fraction(2) if dim <= 2 else min(Fraction(2), Fraction(dim, dim - 2))
        return dim * ip + 2 * ir == 2 and 1 < rf <= r_cap
    if theorem is Theorem.CLASSICAL_GRADPI:
        return pf >= Fraction(dim, 3) and dim * ip + 2 * ir <= 3
    raise ValueError(f"unknown theorem {theorem}")


def p_label(p) -> str:
    if p == math.inf:
        return "inf"
    fp = float(p)
    return str(int(fp)) if fp == int(fp) else f"{fp:g}"


@dataclass(frozen=True)
class CriterionSpec:
    """One monitored criterion: a theorem plus per-quantity (p, r) pairs.

    ``pairs`` maps every canonical monitored quantity of the theorem to its
    integrability pair.  In smallness mode the pairs are pinned to the
    endpoint exponent with r = inf and only the running sup is tracked.
    """

    theorem: Theorem
    pairs: tuple[tuple[str, tuple[float, float]], ...] = ()
    smallness: bool = False

    def __post_init__(self):
        comps = _COMPONENTS[self.theorem]
        if self.smallness:
            if self.theorem not in SMALLNESS_ENDPOINTS:
                raise ValueError(
                    f"smallness mode is not defined for {self.theorem.value}"
                )
            endpoint = float(SMALLNESS_ENDPOINTS[self.theorem])
            filled = tuple((c, (endpoint, math.inf)) for c in comps)
            object.__setattr__(self, "pairs", filled)
            return
        given = dict(self.pairs)
        if set(given) != set(comps):
            raise ValueError(
                f"{self.theorem.value} monitors {list(comps)}, got pairs for "
                f"{sorted(given)}"
            )
        ordered = []
        for c in comps:
            p, r = given[c]
            if not admissible(self.theorem, p, r):
                raise ValueError(
                    f"pair (p={p}, r={r}) for '{c}' is outside the "
                    f"{self.theorem.value} admissible region"
                )
            ordered.append((c, (float(p), float(r))))
        object.__setattr__(self, "pairs", tuple(ordered))

    @property
    def label(self) -> str:
        return self.theorem.value

    def norm_tag(self, comp: str) -> str:
        p = dict(self.pairs)[comp][0]
        return f"L{p_label(p)}_{comp}"

    def accumulator_key(self, comp: str) -> str:
        return f"acc_{self.label}_{comp}"

    @property
    def needs_pressure(self) -> bool:
        return any(c in _PRESSURE_TAGS for c, _ in self.pairs)


def monitored_field(
    tag: str,
    u: SpectralField,
    b: SpectralField | None,
    pi: SpectralField | None = None,
    free_axes: tuple[int, int] = (2, 3),
) -> SpectralField:
    """Resolve a canonical monitored-quantity tag to a concrete field.

    ``free_axes`` are the (0-based) component axes playing the role of the
    two monitored directions; the default matches the dim-4 convention.
    """
    a3, a4 = free_axes
    if tag == "u":
        return u
    if tag == "u3":
        return u.component(a3)
    if tag == "u4":
        return u.component(a4)
    if tag == "b":
        if b is None:
            raise ValueError("monitored quantity 'b' requires a magnetic field")
        return b
    if tag == "grad_u":
        return gradient(u)
    if tag == "grad_u3":
        return gradient(u.component(a3))
    if tag == "grad_u4":
        return gradient(u.component(a4))
    if tag == "grad_b":
        if b is None:
            raise ValueError("monitored quantity 'grad_b' requires a magnetic field")
        return gradient(b)
    if tag in ("dpi3", "dpi4", "grad_pi"):
        if pi is None:
            raise ValueError(f"monitored quantity '{tag}' requires the pressure")
        if tag == "grad_pi":
            return gradient(pi)
        return partial_derivative(pi, a3 if tag == "dpi3" else a4)
    raise ValueError(f"unknown monitored quantity '{tag}'")


@dataclass
class MonitorStatus:
    """Running view of one criterion along a simulation."""

    spec: CriterionSpec
    accumulators: dict = dfield(default_factory=dict)
    sup_values: dict = dfield(default_factory=dict)
    verdict: str = "tracking"

    @classmethod
    def for_spec(cls, spec: CriterionSpec) -> "MonitorStatus":
        return cls(
            spec,
            {c: 0.0 for c, _ in spec.pairs},
            {c: -math.inf for c, _ in spec.pairs},
        )

    @property
    def finite(self) -> bool:
        return all(math.isfinite(v) for v in self.accumulators.values())


def monitor_update(
    status: MonitorStatus, series: NormSeries, dt: float
) -> MonitorStatus:
    """Advance a criterion's accumulators from the latest series record.

    The series must already hold the L^p norm tags for the spec; a missing
    tag is a configuration error naming the offender.
    """
    spec = status.spec
    for comp, (p, r) in spec.pairs:
        tag = spec.norm_tag(comp)
        if tag not in series.records:
            raise ValueError(
                f"series is missing tag '{tag}' required by {spec.label}"
            )
        key = spec.accumulator_key(comp)
        val = accumulate(series, tag, r, dt, key=key)
        status.accumulators[comp] = val
        status.sup_values[comp] = max(status.sup_values[comp], series.value(tag))
    return status


BOOTSTRAP_TAGS = ("gradu_LN", "gradb_LN")


def bootstrap_trigger(series: NormSeries) -> float:
    """Integral of ||grad u||_{L^N}^2 + ||grad b||_{L^N}^2 accumulated so far.

    Reads the accumulators advanced during recording; both gradient tags
    must be present in the series.
    """
    for tag in BOOTSTRAP_TAGS:
        if tag not in series.records:
            raise ValueError(f"series is missing bootstrap tag '{tag}'")
    total = 0.0
    for tag in BOOTSTRAP_TAGS:
        total += series.accumulators.get(f"acc_bootstrap_{tag}", 0.0)
    return total


def _velocity_exponents(p: float) -> tuple[float, float, float]:
    # norm, X and Z exponents of the velocity-type functional on [6, inf]
    if p == math.inf:
        return 2.0, 1.0, 0.0
    return 2 * p / (p - 2), (p - 4) / (p - 2), 2 / (p - 2)


def _gradient_exponents(p: float) -> tuple[float, float, float]:
    # norm, X and Z exponents of the gradient-type functional on [12/5, inf]
    if p == math.inf:
        return 1.0, 1.0, 0.0
    if p <= 4:
        d = 3 * p - 4
        return 4 * p / d, 4 * (p - 2) / d, (4 - p) / d
    return p / (p - 2), 1.0, 0.0


def gronwall_rhs(
    u: SpectralField,
    b: SpectralField | None,
    spec: CriterionSpec,
    free_axes: tuple[int, int] = (2, 3),
) -> dict[str, float]:
    """Instantaneous Gronwall data for a criterion at one state.

    Returns the anisotropic functionals W, X, Y, Z together with one RHS
    integrand value per monitored quantity.  Only the four component
    criteria carry a proposition-level functional; the pressure criterion
    and the classical monitors are rejected.
    """
    if spec.theorem in (Theorem.T1_1, Theorem.T1_3):
        expo = _velocity_exponents
        lo = Fraction(6)
    elif spec.theorem in (Theorem.T1_2, Theorem.T1_4):
        expo = _gradient_exponents
        lo = Fraction(12, 5)
    else:
        raise ValueError(
            f"no Gronwall functional is defined for {spec.theorem.value}"
        )
    g = u.grid
    if g.dim != 4:
        raise ValueError("Gronwall functionals are defined on dim-4 grids")
    plane = tuple(a for a in range(4) if a not in free_axes)
    vals = wxyz(u, b, plane=plane)
    out = {"W": vals.W, "X": vals.X, "Y": vals.Y, "Z": vals.Z}
    for comp, (p, _r) in spec.pairs:
        # smallness pairs are pinned to the endpoint by construction; the
        # float endpoint may sit one ulp off the exact rational
        if not spec.smallness and _as_frac(p) != math.inf and _as_frac(p) < lo:
            raise ValueError(
                f"p={p} for '{comp}' is below the functional's range (>= {lo})"
            )
        a_n, a_x, a_z = expo(p)
        n = lp_norm(monitored_field(comp, u, b, free_axes=free_axes), p)
        term = n**a_n
        if a_x:
            term *= vals.X**a_x
        if a_z:
            term *= vals.Z**a_z
        out[f"rhs_{spec.label}_{comp}"] = term
    return out
