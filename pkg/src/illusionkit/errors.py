"""Exception hierarchy shared across the package."""


class IllusionKitError(Exception):
    """Base class for every error raised by illusionkit."""


class ConfigError(IllusionKitError, ValueError):
    """Invalid configuration, detected before any work is done."""


class DataError(IllusionKitError):
    """Input data is missing, unreadable or inconsistent."""


class EndpointError(IllusionKitError):
    """A remote chat endpoint could not serve a request."""


# image-core
class ZeroDimension(IllusionKitError, ValueError):
    pass


class ContentLargerThanCanvas(IllusionKitError, ValueError):
    pass


class MissingGlyph(IllusionKitError, ValueError):
    pass


class UnreachableScale(IllusionKitError, ValueError):
    pass


# spectral / perception
class InvalidLambda(IllusionKitError, ValueError):
    pass


class NonMonotoneBoundaries(IllusionKitError, ValueError):
    pass


class KTooSmall(IllusionKitError, ValueError):
    pass


# illugen
class InvalidParams(IllusionKitError, ValueError):
    pass


class MaskMismatch(IllusionKitError, ValueError):
    pass


class IdenticalParams(IllusionKitError, ValueError):
    pass


class MissingTruth(DataError):
    pass


class UnreadableImage(DataError):
    pass


# evalkit
class UnknownKind(IllusionKitError, ValueError):
    pass


class UnknownSample(DataError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class JudgeUnavailable(EndpointError):
    pass


class MalformedJudgeOutput(IllusionKitError):
    pass


# mllm-client
class AuthFailed(EndpointError):
    pass


class RateLimited(EndpointError):
    pass


class Timeout(EndpointError):
    pass


class ProtocolError(EndpointError):
    pass


class IndexOutOfRange(IllusionKitError, IndexError):
    pass
