"""Exception hierarchy shared by services, repositories and the CLI.

Each error carries a stable ``code`` that the CLI prints as a prefix on stderr,
so scripts can match failures without parsing the message text.
"""


class EtcError(Exception):
    """Base class for every domain failure raised by this package."""

    code = "ETC-ERROR"

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


class ChannelCountError(EtcError):
    code = "ETC-CHANNELS"


class DimensionError(EtcError):
    code = "ETC-DIMENSION"


class LayoutError(EtcError):
    code = "ETC-LAYOUT"


class EmptyGridError(EtcError):
    code = "ETC-EMPTY-GRID"


class ShapeError(EtcError):
    code = "ETC-SHAPE"


class EmptyDomainError(EtcError):
    code = "ETC-EMPTY-DOMAIN"


class ConfigError(EtcError):
    code = "ETC-CONFIG"


class KeyFileError(EtcError):
    code = "ETC-KEYFILE"


class DecodeError(EtcError):
    code = "ETC-DECODE"


class ResolutionError(EtcError):
    code = "ETC-RESOLUTION"


class GridError(EtcError):
    code = "ETC-GRID"


class SampleRangeError(EtcError):
    code = "ETC-RANGE"
