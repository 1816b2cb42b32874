"""Exception types shared across the package."""


class MecvfError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(MecvfError):
    """A configuration value is invalid. Carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class OverloadError(MecvfError):
    """A queue was offered more traffic than its stability guard allows."""

    def __init__(self, entity, offered, capacity):
        self.entity = entity
        self.offered = offered
        self.capacity = capacity
        super().__init__(
            f"{entity} overloaded: offered {offered:.6g} packets/s vs "
            f"capacity {capacity:.6g} packets/s"
        )


class DegenerateLinkError(MecvfError):
    """Traffic was routed over a link whose channel rate is zero."""


class EpisodeDoneError(MecvfError):
    """step() was called on an environment whose episode already ended."""


class BufferNotReadyError(MecvfError):
    """A replay buffer was sampled before it held a full batch."""


class NonFiniteUpdateError(MecvfError):
    """An optimizer step received NaN or infinite gradients."""
