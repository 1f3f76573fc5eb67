class CapExceeded(RuntimeError):
    """A configured size limit was hit; never silently approximated."""


class TruenessCapError(CapExceeded):
    pass


class StateCapError(CapExceeded):
    pass


class PathCountCapError(CapExceeded):
    pass
