"""Root logger configuration for the command line."""

import logging
import sys

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


def configure_logging(verbosity: int = 0) -> None:
    """
    Send log records to stderr.

    Args:
        verbosity: -1 for warnings only, 0 for info, 1 or more for debug
    """
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity == 0:
        level = logging.INFO
    else:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)
