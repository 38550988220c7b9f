"""Error types shared across modules.

Each error carries a module-qualified code so the CLI can report it and map it
to an exit status.
"""


class SolverError(RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code


class ConfigError(ValueError):
    """Invalid user input or configuration."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
