"""Pre- and post-selection measurement statistics.

A scenario fixes an initial state, a family of intermediate two-outcome
projective measurements indexed by a free choice ``C``, and a final
two-outcome projective measurement whose outcome 1 defines post-selection
success.  Joint outcome probabilities follow the Lueders update rule; the
post-selected conditional P(M1 | M2=1, C) is the Aharonov-Bergmann-Lebowitz
(ABL) quotient of those joint probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .errors import UndefinedConditionalError
from .hilbert import (
    DensityOperator,
    PVM,
    apply_projector,
    basis_state,
    binary_pvm,
    outer_product,
    projector_onto,
    state_vector,
    trace_product,
)

JointTable = Mapping[tuple[int, int], Fraction]


@dataclass(frozen=True)
class PpsScenario:
    """Initial state, per-choice intermediate PVMs, and the final PVM.

    The final PVM is binary with outcome 1 meaning post-selection success.
    """

    pre_state: DensityOperator
    intermediate: Mapping[int, PVM]
    final: PVM

    def __post_init__(self) -> None:
        if not self.intermediate:
            raise ValueError("scenario needs at least one intermediate measurement choice")
        dim = self.pre_state.dim
        for k, pvm in self.intermediate.items():
            if pvm.dim != dim:
                raise ValueError(f"intermediate PVM for choice {k} has dimension {pvm.dim}, expected {dim}")
        if self.final.dim != dim:
            raise ValueError(f"final PVM has dimension {self.final.dim}, expected {dim}")
        if len(self.final) != 2:
            raise ValueError("final measurement must be binary (failure/success)")
        object.__setattr__(self, "intermediate", MappingProxyType(dict(self.intermediate)))

    @property
    def choices(self) -> tuple[int, ...]:
        return tuple(sorted(self.intermediate))

    def pvm_for(self, k: int) -> PVM:
        try:
            return self.intermediate[k]
        except KeyError:
            raise ValueError(f"unknown measurement choice {k}; valid choices: {self.choices}") from None


def three_box_scenario() -> PpsScenario:
    """The canonical three-box instance.

    A single particle over three box states. Pre-selection is the equal
    superposition (1,1,1)/sqrt(3); post-selection checks (1,1,-1)/sqrt(3);
    the intermediate measurement for choice C asks "is the particle in
    box C?" via the PVM {1 - |C><C|, |C><C|}.
    """
    phi = state_vector([1, 1, 1], Fraction(1, 3))
    psi = state_vector([1, 1, -1], Fraction(1, 3))
    boxes = {
        c: binary_pvm(projector_onto(basis_state(3, c - 1)))
        for c in (1, 2, 3)
    }
    return PpsScenario(
        pre_state=outer_product(phi),
        intermediate=boxes,
        final=binary_pvm(projector_onto(psi)),
    )


def joint_distribution(s: PpsScenario, k: int) -> JointTable:
    """Exact table P(M1=i, M2=j | C=k) for i, j in {0, 1}.

    Each entry is the sandwich trace Tr[F_j P_i rho P_i] with P_i the
    intermediate projector for outcome i and F_j the final projector for
    outcome j.
    """
    pvm = s.pvm_for(k)
    if len(pvm) != 2:
        raise ValueError(f"intermediate measurement for choice {k} must be binary")
    table: dict[tuple[int, int], Fraction] = {}
    for i in (0, 1):
        sandwiched, _ = apply_projector(pvm[i], s.pre_state)
        for j in (0, 1):
            table[i, j] = trace_product(s.final[j], sandwiched)
    return table


def abl_conditional(s: PpsScenario, k: int, i: int) -> Fraction:
    """Post-selected conditional P(M1=i | M2=1, C=k)."""
    if i not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {i}")
    joint = joint_distribution(s, k)
    denominator = joint[0, 1] + joint[1, 1]
    if denominator == 0:
        raise UndefinedConditionalError(
            f"post-selection never succeeds for choice {k}; the conditional is undefined"
        )
    return joint[i, 1] / denominator


def postselection_success(s: PpsScenario, k: int) -> Fraction:
    """P(M2=1 | C=k), the probability that post-selection succeeds."""
    joint = joint_distribution(s, k)
    return joint[0, 1] + joint[1, 1]


def success_without_intermediate(s: PpsScenario) -> Fraction:
    """P(M2=1) when no intermediate measurement is performed: Tr[F_1 rho]."""
    return trace_product(s.final[1], s.pre_state)
