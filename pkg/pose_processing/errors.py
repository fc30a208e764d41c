class ConfigurationError(ValueError):
    pass


class DataError(ValueError):
    pass
