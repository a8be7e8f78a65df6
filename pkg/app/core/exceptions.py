from typing import Any, Dict, Optional


class PatternsError(Exception):
    """Base error; carries the CLI exit code and the HTTP status it maps to."""

    exit_code: int = 1
    status_code: int = 500
    error: str = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def details(self) -> Dict[str, Any]:
        return {}

    def to_document(self) -> Dict[str, Any]:
        return {"error": self.error, "message": self.message, **self.details()}


class ParseError(PatternsError):
    exit_code = 2
    status_code = 400
    error = "parse"

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column

    def details(self) -> Dict[str, Any]:
        return {"line": self.line, "column": self.column}


class SizeError(PatternsError):
    exit_code = 2
    status_code = 422
    error = "size"


class PreconditionError(PatternsError):
    exit_code = 2
    status_code = 422
    error = "precondition"


class BudgetExhaustedError(PatternsError):
    exit_code = 3
    status_code = 408
    error = "budget"

    def __init__(self, nodes_explored: int, budget: int):
        super().__init__(
            f"node budget {budget} exhausted after {nodes_explored} nodes; result unknown"
        )
        self.nodes_explored = nodes_explored
        self.budget = budget

    def details(self) -> Dict[str, Any]:
        return {"nodes_explored": self.nodes_explored, "budget": self.budget}


class CapExceededError(PatternsError):
    exit_code = 4
    status_code = 413
    error = "cap"

    def __init__(self, size: int, cap: int, hint: Optional[str] = None):
        message = f"instance size {size} exceeds exact cap {cap}"
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)
        self.size = size
        self.cap = cap

    def details(self) -> Dict[str, Any]:
        return {"size": self.size, "cap": self.cap}


class VerificationError(PatternsError):
    exit_code = 5
    status_code = 500
    error = "verification"

    def __init__(self, message: str, failed_checks: Optional[list] = None):
        super().__init__(message)
        self.failed_checks = failed_checks or []

    def details(self) -> Dict[str, Any]:
        return {"failed_checks": self.failed_checks}
