# src/qcsat/schemas/formula.py
from pydantic import BaseModel, ConfigDict, Field, model_validator

Clause = tuple[int, int, int]


class CnfFormula(BaseModel):
    """Fórmula 3-CNF con literales DIMACS: +i es x_i, -i es ¬x_i (1 ≤ i ≤ n_vars)."""
    model_config = ConfigDict(frozen=True)

    n_vars: int = Field(..., ge=1)
    clauses: tuple[Clause, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_literals(self) -> "CnfFormula":
        for k, clause in enumerate(self.clauses):
            for literal in clause:
                if literal == 0 or abs(literal) > self.n_vars:
                    raise ValueError(f"Literal {literal} inválido en la cláusula {k + 1}")
        return self

    def satisfied_by(self, values: list[int]) -> bool:
        return all(
            any((values[abs(lit) - 1] == 1) == (lit > 0) for lit in clause) for clause in self.clauses
        )

