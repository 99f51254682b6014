"""Exception types shared across the package."""


class TelescoperError(Exception):
    """Base class for all errors raised by this package."""


class VariableMismatchError(TelescoperError):
    """Operands live in different variable universes."""


class InexactDivisionError(TelescoperError):
    """Polynomial division requested where the divisor is not a factor."""


class DegenerateSubstitutionError(TelescoperError):
    """A substitution sent a denominator to the zero polynomial."""


class PoleError(TelescoperError):
    """Exact evaluation hit a pole of the term."""


class UnboundParameterError(TelescoperError):
    """Evaluation point leaves a parameter without a value."""


class NonIntegerArgumentError(TelescoperError):
    """A gamma argument or power exponent evaluated to a non-integer."""


class AnsatzTooLargeError(TelescoperError):
    """Requested ansatz bounds exceed the configured size cap."""


class NotFoundError(TelescoperError):
    """The search budget ran out before an annihilator appeared.

    Carries the last ansatz bounds that were tried.
    """

    def __init__(self, message, bounds=None):
        self.bounds = bounds
        super().__init__(message)


class NotApplicableError(TelescoperError):
    """The requested transformation does not apply to this input.

    Carries the operator that was found instead, when there is one.
    """

    def __init__(self, message, found=None):
        self.found = found
        super().__init__(message)


class SupportError(TelescoperError):
    """Support analysis failed (no finite bounding box)."""


class CertificatePoleError(TelescoperError):
    """A certificate denominator can vanish on the support box."""


class MismatchError(TelescoperError):
    """Certificate and term (or statement) do not belong together."""


class ParseError(TelescoperError):
    """Syntax or semantic error in DSL input.

    Carries the source span of the offending token when available.
    """

    def __init__(self, message, span=None):
        self.span = span
        if span is not None:
            message = "%s: %s" % (span, message)
        super().__init__(message)


class CertificateFormatError(TelescoperError):
    """A certificate file does not match the JSON layout.

    Carries the path of the first offending entry, dotted into the
    document ('certificates.k.den', 'operator[0].coeff[2].exponents').
    """

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = "%s: %s" % (path, message)
        super().__init__(message)
