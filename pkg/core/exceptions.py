from typing import Any, Dict


class StreamingError(Exception):
    """Base class for every error raised by the streaming pipeline."""

    code = "streaming_error"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> Dict[str, Any]:
        """
        Machine-readable form used by the CLI error output.

        Returns:
            Dictionary with the error code and message
        """
        return {"error": self.code, "message": self.message}


class InvalidInput(StreamingError):
    """Input data violates a documented precondition."""

    code = "invalid_input"


class InvalidConfig(InvalidInput):
    """Experiment configuration is inconsistent."""

    code = "invalid_config"


class DegenerateInput(StreamingError):
    """Input has no defined geometric meaning (zero vector)."""

    code = "degenerate_input"


class OutOfFrame(StreamingError):
    """Pixel coordinate lies outside the equirectangular frame."""

    code = "out_of_frame"


class InvalidQuaternion(StreamingError):
    """Head-orientation quaternion is too far from unit norm."""

    code = "invalid_quaternion"


class InsufficientData(StreamingError):
    """Series or trace is too short for the requested operation."""

    code = "insufficient_data"


class InvalidState(StreamingError):
    """Operation called out of order or on an unusable state."""

    code = "invalid_state"
