"""Exception hierarchy shared by ingestion, mining, engines and the bench harness."""

from __future__ import annotations


class OrgMineError(Exception):
    """Base class for every error raised by orgmine."""


class LogError(OrgMineError):
    """Input or configuration problem with an event log."""


class MalformedRow(LogError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class MissingColumn(LogError):
    def __init__(self, name: str | int) -> None:
        super().__init__(f"missing column: {name!r}")
        self.name = name


class EmptyLog(LogError):
    def __init__(self, message: str = "event log contains no events") -> None:
        super().__init__(message)


class SizeOutOfRange(LogError):
    def __init__(self, size: int, reason: str) -> None:
        super().__init__(f"chunk size {size}: {reason}")
        self.size = size


class LengthMismatch(OrgMineError, ValueError):
    pass


class ActorIdOutOfRange(OrgMineError, ValueError):
    def __init__(self, actor_id: int, actor_count: int) -> None:
        super().__init__(f"actor id {actor_id} outside [0, {actor_count})")
        self.actor_id = actor_id
        self.actor_count = actor_count


class EngineError(OrgMineError):
    """Raised by storage engines for misuse (wrong state or mode)."""


class NotLoaded(EngineError):
    def __init__(self, engine: str) -> None:
        super().__init__(f"{engine} engine has no log loaded")


class WrongMode(EngineError):
    def __init__(self, engine: str, mode: str, needed: str) -> None:
        super().__init__(f"{engine} engine loaded in {mode!r} mode; operation needs {needed!r}")


class InvariantViolation(OrgMineError):
    """An engine result disagreed with the reference beyond tolerance."""


class BenchError(OrgMineError):
    def __init__(self, engine: str, chunk_size: int, cause: BaseException) -> None:
        super().__init__(f"[engine={engine} chunk={chunk_size}] {cause}")
        self.engine = engine
        self.chunk_size = chunk_size
        self.cause = cause


class MissingPair(OrgMineError):
    pass
