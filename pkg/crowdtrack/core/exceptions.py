class CrowdTrackException(Exception):  # noqa: N818
    """Base class for errors raised by the pipeline. ``module`` tags the stage."""

    module = "crowdtrack"


class FrameFormatException(CrowdTrackException):
    module = "frames"


class EmptySequenceException(CrowdTrackException):
    module = "frames"


class InvalidMaskException(CrowdTrackException):
    module = "frames"


class DimensionMismatchException(CrowdTrackException):
    module = "detection"


class InvalidBackgroundModelException(CrowdTrackException):
    module = "detection"


class InvalidDetectionConfigException(CrowdTrackException):
    module = "detection"


class InvalidBlobException(CrowdTrackException):
    module = "detection"


class InvalidFeatureConfigException(CrowdTrackException):
    module = "features"


class InvalidSegmentException(CrowdTrackException):
    module = "features"


class InvalidTrackException(CrowdTrackException):
    module = "tracker"


class InvalidSceneException(CrowdTrackException):
    module = "synth"


class InvalidConfigException(CrowdTrackException):
    module = "cli"
