# Command-line entry point: python -m scattering_interferometer.app.cli

__all__ = []

# stdlib logging defaults: attach NullHandler to prevent 'No handler' warnings
import logging
_logger = logging.getLogger(__name__)
_logger.addHandler(logging.NullHandler())
