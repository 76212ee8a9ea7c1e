class UsageError(ValueError):
    """Invalid arguments or configuration supplied by the caller."""
