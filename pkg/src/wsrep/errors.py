"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class WsrepError(Exception):
    """Base class for all domain errors raised by wsrep."""


# ingest
class ParseError(WsrepError):
    pass


class UnsupportedVersion(ParseError):
    pass


class ManifestError(WsrepError):
    pass


# store
class NotFound(WsrepError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return Exception.__str__(self)


class ReferentialIntegrity(WsrepError):
    pass


class EmptyCorpus(WsrepError):
    pass


class StoreLocked(WsrepError):
    pass


# rbtt
class RuleSyntaxError(WsrepError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateRuleId(WsrepError):
    pass


# reputation
class NoRatings(WsrepError):
    pass


class DegenerateWeights(WsrepError):
    pass


class NotInGraph(WsrepError):
    pass


class InconsistentStats(WsrepError):
    pass


class BudgetExceeded(WsrepError):
    pass


# discovery / recommend
class MissingReputation(WsrepError):
    pass


class QoSDirectionConflict(WsrepError):
    pass


class NoSymbolicReputation(WsrepError):
    pass


# eval
class EmptyRetrieval(WsrepError):
    pass


class EmptyRelevantSet(WsrepError):
    pass


class UnknownCategory(WsrepError):
    pass


class MissingRepresentation(WsrepError):
    pass
