"""Exception types raised across the package."""

from __future__ import annotations


class HypergraphError(ValueError):
    """Base class for malformed hypergraph input."""


class WrongCardinality(HypergraphError):
    pass


class VertexOutOfRange(HypergraphError):
    pass


class DuplicateEdge(HypergraphError):
    pass


class InvalidMatching(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """The exact oracle ran out of its node-expansion budget."""

    def __init__(self, budget: int):
        super().__init__(f"branch-and-bound exceeded {budget} node expansions")
        self.budget = budget


class ParameterGap(ValueError):
    """beta - beta_minus < d - 1: the fix procedure is not guaranteed to stop."""


class HostMismatch(ValueError):
    pass


class MemoryViolation(RuntimeError):
    """A simulated machine held or received more than its budget ``s``."""

    def __init__(self, machine: int, round_index: int, load: int, budget: int, trace=None):
        super().__init__(
            f"machine {machine} exceeded memory in round {round_index}: "
            f"load {load} > s={budget}"
        )
        self.machine = machine
        self.round_index = round_index
        self.load = load
        self.budget = budget
        self.trace = trace


class SampleOverflow(RuntimeError):
    def __init__(self, sampled: int, budget: int, attempt: int):
        super().__init__(f"attempt {attempt}: sampled {sampled} edges exceeds s={budget}")
        self.sampled = sampled
        self.budget = budget
        self.attempt = attempt


class AttemptsExhausted(RuntimeError):
    pass


class TooManyEdges(ValueError):
    pass


class EdgeExplosion(RuntimeError):
    pass


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, path=None):
        where = f"line {line}" if line is not None else "input"
        if path is not None:
            where = f"{path}:{where}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path
