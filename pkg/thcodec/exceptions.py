"""Error hierarchy. Every error knows the CLI exit code it maps to."""


class CodecError(Exception):
    exit_code = 4


class ConfigError(CodecError):
    exit_code = 2


class FrameIOError(CodecError):
    exit_code = 3


class StreamError(CodecError):
    exit_code = 4


class KeypointError(StreamError):
    pass


class FlowError(CodecError):
    pass


class ScheduleError(ConfigError):
    pass


class SrError(CodecError):
    pass


class PolicyError(CodecError):
    pass


class MetricError(CodecError):
    pass
