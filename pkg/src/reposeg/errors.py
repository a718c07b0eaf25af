"""Exception hierarchy shared by all pipeline stages."""


class RePoSegError(Exception):
    """Base class for pipeline errors.

    ``stage`` is set by the pipeline runner when the error surfaced inside a
    named stage, so CLI diagnostics can say where a run died.
    """

    stage: str | None = None


class DecodeError(RePoSegError):
    """A raster file exists but cannot be decoded."""


class UnsupportedFormat(RePoSegError):
    """Raster format outside the supported PNG / binary-PGM subset."""


class NoSpecularRegion(RePoSegError):
    """Specular detection produced an empty region; the pipeline cannot prompt."""


class EmptyRegion(RePoSegError):
    """A region operation was handed a mask with no foreground pixels."""


class NoCandidates(RePoSegError):
    """A segmentation provider returned zero candidate masks."""


class DimensionMismatch(RePoSegError):
    """Two rasters that must share dimensions do not."""


class ProviderFailure(RePoSegError):
    """Subprocess provider died, timed out, or violated the wire protocol."""


class NoValidMask(RePoSegError):
    """Every candidate ratio exceeded the upper bound under the strict policy."""


class EmptyLabeling(RePoSegError):
    """Component operation on a labeling with zero components."""


class EmptyMask(RePoSegError):
    """Post-processing requires at least one foreground pixel."""


class DegenerateImage(RePoSegError):
    """All pixels share one intensity; no threshold separates two classes."""


class ZeroBaseline(RePoSegError):
    """Relative improvement is undefined for a non-positive baseline."""


class InvalidSpec(RePoSegError):
    """Synthetic scene specification violates its invariants."""


class ConfigError(RePoSegError):
    """Malformed configuration file or invalid option combination."""
