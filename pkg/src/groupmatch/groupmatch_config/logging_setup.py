"""Logging configuration for the groupmatch command line."""
import logging
import os

LOG_ENVIRONMENT_VARIABLE = "GROUPMATCH_LOG"

_Verbosity_Levels = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def configure_logging(verbosity: int = 0) -> int:
    """
    Configure the root logger once for a command line run.
    The GROUPMATCH_LOG environment variable (a level name such as DEBUG) takes precedence over the verbosity count.
    :param verbosity: Count of -v flags given on the command line.
    :return: The logging level that was set.
    """
    level = _Verbosity_Levels.get(min(verbosity, 2), logging.WARNING)
    env_level = os.environ.get(LOG_ENVIRONMENT_VARIABLE)
    if env_level is not None:
        named_level = logging.getLevelName(env_level.strip().upper())
        if isinstance(named_level, int):
            level = named_level
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger("groupmatch").setLevel(level)
    return level
