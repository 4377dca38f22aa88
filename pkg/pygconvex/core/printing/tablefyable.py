from abc import ABCMeta, abstractmethod
from collections import OrderedDict

from pygconvex.core.util.inheritance import SuperStop

# class name -> column name -> attribute name or callable(obj)
registry = OrderedDict()


class Tablefyable(SuperStop, metaclass=ABCMeta):
    """
    Report objects printable as table rows. Subclasses register their columns in _tablefy_register_columns, which is
    called on first use.

        @classmethod
        def _tablefy_register_columns(cls):
            cls.tablefy_register("name", "passed")
            cls.tablefy_register_columns({"worst": lambda o: "%.3g" % o.worst})
    """

    @classmethod
    @abstractmethod
    def _tablefy_register_columns(cls):
        raise NotImplementedError()

    @classmethod
    def tablefy_register(cls, *names: str):
        """ Columns read from the attribute of the same name. """
        cls.tablefy_register_columns({name: name for name in names})

    @classmethod
    def tablefy_register_columns(cls, getters):
        registry.setdefault(cls.__name__, OrderedDict()).update(getters)

    @classmethod
    def _tablefy_getters(cls, *names):
        if cls.__name__ not in registry:
            cls._tablefy_register_columns()
        return [(key, getter) for key, getter in registry[cls.__name__].items() if not names or key in names]

    @classmethod
    def tablefy_columns(cls) -> str:
        return ", ".join(key for key, _ in cls._tablefy_getters())

    @classmethod
    def tablefy_header(cls, *names):
        """
        :param names: columns to print, all registered columns if empty
        """
        return [key for key, _ in cls._tablefy_getters(*names)]

    def _tablefy_value(self, getter):
        return getter(self) if callable(getter) else getattr(self, getter)

    def tablefy_to_row(self, *names):
        return [self._tablefy_value(getter) for _, getter in self._tablefy_getters(*names)]

    def __str__(self):
        cells = ["'%s: %s'" % (key, self._tablefy_value(getter)) for key, getter in self._tablefy_getters()]
        return "%s[%s]" % (self.__class__.__name__, ", ".join(cells))
