"""Exception hierarchy shared by every enose module.

Two roots matter to callers: `InputError` covers malformed configs, files and
values handed in from outside (the CLI maps it to exit code 2), while
`ModelError` covers runtime failures inside the simulation or analysis
(exit code 3).
"""


class EnoseError(Exception):
    pass


class InputError(EnoseError, ValueError):
    pass


class ModelError(EnoseError):
    pass


# gas model
class InvalidParameter(InputError):
    pass


class NonPositiveVoltage(InputError):
    pass


class OverBias(InputError):
    pass


class InvalidSchedule(InputError):
    pass


# sampling protocol
class ProtocolError(ModelError):
    pass


class NotIdle(ProtocolError):
    pass


class IllegalTransition(ProtocolError):
    pass


class ActuatorMismatch(ProtocolError):
    pass


class NegativeFlow(InputError):
    pass


# daq
class OutOfRange(InputError):
    pass


class WindowTooLong(ModelError):
    pass


class NoSteadyState(ModelError):
    pass


# classifier
class MalformedVector(InputError):
    pass


# can telemetry
class FieldOverflow(InputError):
    pass


class DecodeError(InputError):
    pass


class UnknownId(DecodeError):
    pass


class BadLength(DecodeError):
    pass


class InvalidSpeciesCode(DecodeError):
    pass


# cli / files
class ConfigError(InputError):
    pass


class ParseError(InputError):
    pass


class BadRange(InputError):
    pass
