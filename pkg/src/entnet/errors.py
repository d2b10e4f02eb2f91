"""Exception types shared across the package."""


class EntnetError(Exception):
    """Base class for all entnet errors."""


class NotFoundError(EntnetError):
    """A referenced node, port, user or allocation does not exist."""


class ConflictError(EntnetError):
    """A lock request collides with an existing lock held by another path."""


class StateError(EntnetError):
    """An unlock or state transition was requested that the current state forbids."""


class NoPathError(EntnetError):
    """No route with finite loss exists from the photon source to the target."""


class AlreadyConnectedError(EntnetError):
    """The user pair already has an active connection or a pending queue entry."""


class InconsistentStateError(EntnetError):
    """The status database violates one of its structural invariants."""
