"""
Log backends receiving the messages routed by the LoggingService. Backends write log lines only, results never pass
through them.
"""
import os
from abc import ABCMeta, abstractmethod
from datetime import datetime

import click

from pygconvex.core.model.generic.i_model_mixins import LoggableMixin
from pygconvex.core.util.inheritance import SuperStop

FILE_NAME = "pygconvex.log"

_LEVELS = LoggableMixin.LogLevels


class ILogBackend(SuperStop):
    """ This is the interface for all backends which are able to log interactions into some kind of log store """
    __metaclass__ = ABCMeta

    def __init__(self, level=_LEVELS.INFO, **kwargs):
        if level not in _LEVELS.ORDER:
            raise ValueError("Unknown log level " + str(level))
        self._level = level
        super().__init__(**kwargs)

    @property
    def level(self):
        return self._level

    def accepts(self, level):
        return _LEVELS.ORDER[level] >= _LEVELS.ORDER[self._level]

    @property
    def time(self):
        return str(datetime.now())

    def log_info(self, message="", **kwargs):
        if self.accepts(_LEVELS.INFO):
            self.log(self.format("INFO", message), **kwargs)

    def log_warn(self, message="", **kwargs):
        if self.accepts(_LEVELS.WARN):
            self.log(self.format("WARN", message), **kwargs)

    def log_error(self, message="", **kwargs):
        if self.accepts(_LEVELS.ERROR):
            self.log(self.format("ERROR", message), **kwargs)

    def format(self, level, message):
        return self.time + ": " + level + ": " + str(message)

    @abstractmethod
    def log(self, message, **kwargs):
        raise NotImplementedError()


class StdErrLogBackend(ILogBackend):
    """ Echoes log lines to stderr, warnings in yellow and errors in red. """

    _COLORS = {"WARN": "yellow", "ERROR": "red"}

    def format(self, level, message):
        return click.style(level + ": " + str(message), fg=self._COLORS.get(level))

    def log(self, message, **kwargs):
        click.echo(message, err=True)


class FileLogBackend(ILogBackend):
    """
    Appends log lines to <log_dir>/pygconvex.log.
    """

    def __init__(self, log_dir, level=_LEVELS.INFO, **kwargs):
        self._log_dir = os.path.expanduser(log_dir)
        self._file = None
        super().__init__(level=level, **kwargs)

    @property
    def log_dir(self):
        return self._log_dir

    @property
    def path(self):
        return os.path.join(self._log_dir, FILE_NAME)

    def log(self, message, **kwargs):
        if self._file is None:
            if not os.path.exists(self._log_dir):
                os.makedirs(self._log_dir)
            self._file = open(self.path, "a")
        self._file.write(message + "\n")
        self._file.flush()

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None

    def __del__(self):
        self.close()
