from abc import ABCMeta, abstractmethod
from typing import Callable

from pygconvex.core.events.events import disconnect_base_signal


class ServiceMixin:
    """ Base class for services containing backends. """
    __metaclass__ = ABCMeta

    @abstractmethod
    def __init__(self, backends, *args, **kwargs):
        b = backends if isinstance(backends, list) else [backends]
        self._backends = [] if backends is None else b
        self._connections = []

    @property
    def backends(self):
        return self._backends

    def save_signal_fn(self, name, fn: Callable):
        # receivers are connected strongly, keeping them here allows disconnecting them again
        self._connections.append((name, fn))

    def close(self):
        for name, fn in self._connections:
            disconnect_base_signal(name, fn)
        self._connections = []
        for b in self._backends:
            if hasattr(b, "close"):
                b.close()
