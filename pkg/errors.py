"""
TOBL Correlation Toolkit - Errors
Exception hierarchy shared by every module
"""

from typing import Optional


class ToblError(ValueError):
    """Base class for input and domain errors (CLI exit status 2)"""


class MissingEntry(ToblError):
    """A behavior table lacks an (inputs, outputs) entry"""


class IndexOutOfRange(ToblError):
    """A party, input or output index lies outside the scenario"""


class ScenarioMismatch(ToblError):
    """Two objects that must share a scenario do not"""


class BadWeights(ToblError):
    """Mixture weights are negative or do not sum to one"""


class IncompatibleScenario(ToblError):
    """A party permutation or relabeling does not fit the scenario"""


class ZeroProbabilityOutcome(ToblError):
    """Postselection on an outcome that never occurs"""


class SignalingInput(ToblError):
    """A marginal that must be input-independent depends on other inputs"""


class DimensionMismatch(ToblError):
    """Linear program data with inconsistent dimensions"""


class ScenarioTooLarge(ToblError):
    """Enumeration would exceed the configured cap"""


class NotTripartite(ToblError):
    """A TOBL operation was given a scenario with other than three parties"""


class ProtocolInvalid(ToblError):
    """A wiring protocol violates its structural invariants"""


class BoxCountMismatch(ToblError):
    """Number of boxes differs from the protocol's box count"""


class SignalingBox(ToblError):
    """A box handed to the wiring simulator is not no-signaling"""


class DecompositionMismatch(ToblError):
    """A TOBL decomposition does not reproduce its box"""


class UnsupportedSplit(ToblError):
    """A box split for which no matching bipartition data is available"""


class ParseError(ToblError):
    """Malformed input file, with location context"""

    def __init__(self, message: str, path: Optional[str] = None,
                 key: Optional[str] = None, line: Optional[int] = None):
        self.detail = message
        self.path = path
        self.key = key
        self.line = line
        context = []
        if path:
            context.append(str(path))
        if line is not None:
            context.append(f"line {line}")
        if key:
            context.append(f"at {key}")
        super().__init__(f"{message} ({', '.join(context)})" if context else message)


class InvalidBehavior(ToblError):
    """A behavior fails nonnegativity or normalization"""
