"""Exception taxonomy: validation failures vs numerical failures.

The CLI maps ValidationError to exit code 2 and NumericalError to exit
code 3; numerical failures always carry the achieved tolerance in their
message.
"""


class ValidationError(ValueError):
    """Bad inputs: malformed models, out-of-domain parameters."""


class NumericalError(RuntimeError):
    """A quadrature or root-finding stage failed to reach tolerance."""
