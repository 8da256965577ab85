"""Exception hierarchy shared by all splitbpe modules."""


class SplitBPEError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "error"


class EmptyCorpus(SplitBPEError):
    code = "empty_corpus"


class MalformedStream(SplitBPEError):
    code = "malformed_stream"


class MissingTable(SplitBPEError):
    code = "missing_table"


class ConfigMismatch(SplitBPEError):
    code = "config_mismatch"


class FormatError(SplitBPEError):
    """An artifact file has a wrong header or an unparsable line."""

    code = "format_error"


class ConfigError(SplitBPEError):
    code = "config_error"
