from dataclasses import dataclass
from typing import Tuple

import numpy as np

from urgp.errors import DomainError
from urgp.models.posynomial import GPProblem, Posynomial, _as_exponents
from urgp.models.uncertain import LinearNormalURV, NormalRV


@dataclass(frozen=True, eq=False)
class UncertainTerm:
    """Linear-normal uncertain coefficient times a monomial in the decision variables."""
    coeff: LinearNormalURV
    exponents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'exponents', _as_exponents(self.exponents))


@dataclass(frozen=True, eq=False)
class NormalTerm:
    """Normal random coefficient times a monomial in the decision variables."""
    coeff: NormalRV
    exponents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'exponents', _as_exponents(self.exponents))


def _check_groups(groups, var_count):
    for k, group in enumerate(groups):
        if not group:
            raise DomainError(f"Row {k} has no terms")
        for i, term in enumerate(group):
            if term.exponents.size != var_count:
                raise DomainError(
                    f"Row {k} term {i + 1} has {term.exponents.size} exponents, expected {var_count}"
                )


@dataclass(frozen=True)
class URGPProblem:
    """Geometric program whose coefficients are linear-normal uncertain random variables."""
    objective_terms: Tuple[UncertainTerm, ...]
    constraint_groups: Tuple[Tuple[UncertainTerm, ...], ...]
    var_names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'objective_terms', tuple(self.objective_terms))
        object.__setattr__(self, 'constraint_groups', tuple(tuple(g) for g in self.constraint_groups))
        object.__setattr__(self, 'var_names', tuple(self.var_names))
        _check_groups(self.rows, self.var_count)

    @property
    def var_count(self) -> int:
        return len(self.var_names)

    @property
    def rows(self):
        return (self.objective_terms,) + self.constraint_groups


@dataclass(frozen=True)
class StochasticGP:
    """Same shape as URGPProblem with normal random coefficients."""
    objective_terms: Tuple[NormalTerm, ...]
    constraint_groups: Tuple[Tuple[NormalTerm, ...], ...]
    var_names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'objective_terms', tuple(self.objective_terms))
        object.__setattr__(self, 'constraint_groups', tuple(tuple(g) for g in self.constraint_groups))
        object.__setattr__(self, 'var_names', tuple(self.var_names))
        _check_groups(self.rows, self.var_count)

    @property
    def var_count(self) -> int:
        return len(self.var_names)

    @property
    def rows(self):
        return (self.objective_terms,) + self.constraint_groups


@dataclass(frozen=True)
class ChanceRow:
    """mean_part(x) + quantile * sqrt(var_part(x)) for one row of the program."""
    mean_part: Posynomial
    var_part: Posynomial

    def __post_init__(self):
        if len(self.mean_part) != len(self.var_part):
            raise DomainError("Mean and variance parts must have the same number of terms")
        if not np.array_equal(self.var_part.exponent_matrix, 2.0 * self.mean_part.exponent_matrix):
            raise DomainError("Variance exponents must be exactly twice the mean exponents")


@dataclass(frozen=True)
class DeterministicProgram:
    """
    Deterministic equivalent of the chance-constrained program. Row 0 is
    the objective (its epigraph variable eliminated), rows 1..K are the
    constraints, each required to be <= 1.
    """
    rows: Tuple[ChanceRow, ...]
    quantile: float
    epsilon: float
    var_names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'rows', tuple(self.rows))
        object.__setattr__(self, 'var_names', tuple(self.var_names))
        if self.quantile < 0:
            raise DomainError(f"Quantile must be nonnegative, got {self.quantile}")

    @property
    def objective(self) -> ChanceRow:
        return self.rows[0]

    @property
    def constraints(self) -> Tuple[ChanceRow, ...]:
        return self.rows[1:]

    @property
    def var_count(self) -> int:
        return len(self.var_names)


@dataclass(frozen=True)
class AuxBinding:
    """Auxiliary variable var_index bounds var_part of deterministic row `row`."""
    var_index: int
    row: int
    name: str
    var_part: Posynomial


@dataclass(frozen=True)
class LiftedGP:
    gp: GPProblem
    aux_map: Tuple[AuxBinding, ...]
    original_var_count: int

    @property
    def aux_constraint_offset(self) -> int:
        """Index into gp.constraints of the first auxiliary constraint."""
        return len(self.gp.constraints) - len(self.aux_map)
