from pywmmd.logging_config import configure_structlog

configure_structlog()

__version__ = "0.1.0"
