"""Fault-space sizes for the three planning methods and SFI sample sizes.

All totals are exact integers (arbitrary magnitude); sample sizes use
exact rational arithmetic with round-half-up so results are reproducible
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .ffsets import SetCollection
from .netlist import Circuit

# two-sided normal cut-off per confidence level
T_VALUES = {"90": 1.645, "95": 1.96, "99.8": 3.09}

DEFAULT_MARGINS = (0.05, 0.01, 0.001)


def fault_space_total(coll: SetCollection) -> int:
    """Sum of (2**multiplicity - 1) over the unique sets."""
    return sum((1 << s.multiplicity) - 1 for s in coll.unique_sets)


def random_multibit_space(num_ffs: int) -> int:
    """Every nonempty FF combination: 2**n - 1."""
    if num_ffs < 0:
        raise ValueError("num_ffs must be >= 0")
    return (1 << num_ffs) - 1


def cutoff_for_confidence(confidence) -> float:
    key = f"{float(confidence):g}"
    if key in T_VALUES:
        return T_VALUES[key]
    raise ValueError(
        f"unsupported confidence level '{confidence}' (known: {', '.join(T_VALUES)})"
    )


def sfi_sample_size(N: int, e: float, t: float = 1.96, p: float = 0.5) -> int:
    """Sample size n = N / (1 + e^2 (N-1) / (t^2 p (1-p))), half-up, in [1, N].

    N is the fault population; e the error margin in (0,1); t the
    confidence cut-off; p the estimated failure proportion (0.5 worst case).
    """
    if N < 1:
        raise ValueError("population N must be >= 1")
    ef, tf, pf = Fraction(str(e)), Fraction(str(t)), Fraction(str(p))
    if not 0 < ef < 1:
        raise ValueError("margin e must be in (0, 1)")
    if tf <= 0:
        raise ValueError("cut-off t must be > 0")
    if not 0 < pf < 1:
        raise ValueError("proportion p must be in (0, 1)")
    q = Fraction(N) / (1 + ef * ef * Fraction(N - 1) / (tf * tf * pf * (1 - pf)))
    n = int(q + Fraction(1, 2))
    return max(1, min(n, N))


def sci3(value: int) -> str:
    """3-significant-digit scientific notation, e.g. 4140 -> '4.14E+03'."""
    if value == 0:
        return "0.00E+00"
    d = Decimal(value)
    exp = len(str(abs(value))) - 1
    m = (d / (Decimal(10) ** exp)).quantize(Decimal("1.00"), rounding=ROUND_HALF_UP)
    if abs(m) >= 10:
        m = (m / 10).quantize(Decimal("1.00"), rounding=ROUND_HALF_UP)
        exp += 1
    return f"{m}E+{exp:02d}"


@dataclass(frozen=True)
class FaultSpaceReport:
    method: str                 # static | propagated | random
    num_sets: int
    num_unique: int
    max_multiplicity: int
    total_faults: int

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "num_sets": self.num_sets,
            "num_superset": self.num_unique,
            "max_multiplicity": self.max_multiplicity,
            "total_faults": str(self.total_faults),
            "total_faults_sci": sci3(self.total_faults),
        }


@dataclass(frozen=True)
class SfiPlan:
    method: str
    population: int
    margin: float
    confidence: float
    cutoff: float
    p: float
    sample: int

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "N": str(self.population),
            "margin": self.margin,
            "confidence": self.confidence,
            "t": self.cutoff,
            "p": self.p,
            "n": self.sample,
        }


@dataclass(frozen=True)
class CampaignReport:
    num_ffs: int
    static: FaultSpaceReport
    propagated: FaultSpaceReport
    random: FaultSpaceReport
    plans: tuple[SfiPlan, ...]
    margins: tuple[float, ...]
    confidence: float

    @property
    def monotonic_reduction(self) -> bool:
        """Verified per run: Eq-1 totals are not guaranteed monotonic under
        set replacement once duplicates collapse, so the report records it."""
        return self.propagated.total_faults <= self.static.total_faults

    @property
    def static_over_propagated(self) -> float | None:
        if self.propagated.total_faults == 0:
            return None
        return self.static.total_faults / self.propagated.total_faults

    @property
    def random_over_propagated(self) -> float | None:
        if self.propagated.total_faults == 0:
            return None
        return self.random.total_faults / self.propagated.total_faults

    def to_json(self) -> dict:
        return {
            "num_ffs": self.num_ffs,
            "methods": {
                r.method: r.to_json() for r in (self.static, self.propagated, self.random)
            },
            "reduction": {
                "static_over_propagated": self.static_over_propagated,
                "random_over_propagated": self.random_over_propagated,
                "monotonic": self.monotonic_reduction,
            },
            "sfi": {
                "confidence": self.confidence,
                "margins": list(self.margins),
                "plans": [p.to_json() for p in self.plans],
            },
        }

    def to_csv(self) -> str:
        cols = ["method", "num_sets", "num_superset", "max_multiplicity", "total_faults"]
        cols += [f"n({m:g})" for m in self.margins]
        lines = [",".join(cols)]
        for r in (self.static, self.propagated, self.random):
            row = [
                r.method,
                str(r.num_sets),
                str(r.num_unique),
                str(r.max_multiplicity),
                str(r.total_faults),
            ]
            for m in self.margins:
                n = next(
                    p.sample for p in self.plans if p.method == r.method and p.margin == m
                )
                row.append(str(n))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def compare_methods(
    c: Circuit,
    static: SetCollection,
    optimized: SetCollection,
    margins=DEFAULT_MARGINS,
    confidence: float = 95,
) -> CampaignReport:
    """Assemble the three-method comparison with SFI plans per margin."""
    return build_campaign(len(c.flipflops), static, optimized, margins, confidence)


def build_campaign(
    n_ffs: int,
    static: SetCollection,
    optimized: SetCollection,
    margins=DEFAULT_MARGINS,
    confidence: float = 95,
) -> CampaignReport:
    reports = (
        FaultSpaceReport(
            "static",
            static.num_sets,
            static.num_unique,
            static.max_multiplicity,
            fault_space_total(static),
        ),
        FaultSpaceReport(
            "propagated",
            optimized.num_sets,
            optimized.num_unique,
            optimized.max_multiplicity,
            fault_space_total(optimized),
        ),
        FaultSpaceReport(
            "random",
            1 if n_ffs else 0,
            1 if n_ffs else 0,
            n_ffs,
            random_multibit_space(n_ffs),
        ),
    )
    t = cutoff_for_confidence(confidence)
    plans = []
    for r in reports:
        for m in margins:
            if r.total_faults >= 1:
                n = sfi_sample_size(r.total_faults, m, t)
            else:
                n = 0
            plans.append(
                SfiPlan(
                    method=r.method,
                    population=r.total_faults,
                    margin=float(m),
                    confidence=float(confidence),
                    cutoff=t,
                    p=0.5,
                    sample=n,
                )
            )
    return CampaignReport(
        num_ffs=n_ffs,
        static=reports[0],
        propagated=reports[1],
        random=reports[2],
        plans=tuple(plans),
        margins=tuple(float(m) for m in margins),
        confidence=float(confidence),
    )
