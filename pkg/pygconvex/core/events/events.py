"""
Event handling of pygconvex.

Engines send signals on class level. Signals whose schema cascades are forwarded to the base signal of the same
name. Receivers such as the log backends connect to base signals and never need to know the sending classes. Signals
that do not cascade are only seen by receivers connected to the class namespace.
"""
from blinker import Namespace

from pygconvex.core.util.inheritance import SuperStop


class SignalSchema:
    """
    This class holds a signal name and whether the signal should cascade to the base_signal level.
    """
    def __init__(self, name, cascade=False):
        self._name = name
        self._cascade = cascade

    @property
    def name(self):
        return self._name

    @property
    def cascade(self):
        return self._cascade

    def __str__(self):
        return str(self.name)

    def __hash__(self):
        return hash(self.name)

    def __eq__(self, other):
        return isinstance(other, SignalSchema) and other.name == self.name


class CommonSignals:
    """
    Common schemas of signals. These are used by the mixins in core.model.generic
    """
    PROGRESS = SignalSchema("progress", True)
    START = SignalSchema("start", True)
    STOP = SignalSchema("stop", True)
    LOG = SignalSchema("log", True)


class PointAccessNamespace(Namespace):
    """
    Namespace extension which allows for dot notation access.
    """
    def __getattr__(self, attr):
        try:
            return self[attr]
        except KeyError:
            raise AttributeError(attr)


# all base signals
base_signals = PointAccessNamespace()


def connect_base_signal(name, fn, weak=False):
    """
    Connect a fn to a base signal with given name
    :param name: name of the base signal
    :param fn: receiver taking (sender, **kwargs)
    :param weak: blinker weak referencing. Receivers defined inline have to be strongly referenced.
    :return: the connected fn
    """
    return base_signals.signal(name).connect(fn, weak=weak)


def disconnect_base_signal(name, fn):
    if name in base_signals:
        base_signals[name].disconnect(fn)


def _forward(name):
    def __forward(sender, **kwargs):
        base_signals.signal(name).send(sender, **kwargs)
    return __forward


def signals(*args):
    """
    Decorator used to decorate classes which are to send signals. The decorator takes either string names of signals
    or schema objects. Schemata of decorated base classes are inherited.
    :param args:
    :return:
    """

    def signals_decorator(cls):
        schemata = {}
        for base in reversed(cls.mro()[1:]):
            schemata.update(getattr(base, "_signal_schemata", {}))
        for schema in args:
            if isinstance(schema, str):
                schema = SignalSchema(schema)
            schemata[schema.name] = schema

        namespace = PointAccessNamespace()
        for schema in schemata.values():
            signal = namespace.signal(schema.name)
            if schema.cascade:
                signal.connect(_forward(schema.name), weak=False)

        cls._signal_schemata = schemata
        cls.signal_namespace = namespace
        return cls
    return signals_decorator


class Signaler(SuperStop):
    """
    Base class of a class being able to send signals.
    """

    @classmethod
    def send_cls_signal(cls, signal: SignalSchema, *sender, condition=True, **kwargs):
        if condition:
            if len(sender) == 0:
                sender = [cls]
            found = cls.signals().get(signal.name)
            if found is None:
                raise ValueError("Signal " + signal.name + " is not existing on " + str(cls))
            found.send(*sender, signal=signal, **kwargs)

    def send_signal(self, signal: SignalSchema, *sender, condition=True, **kwargs):
        if len(sender) == 0:
            sender = [self]
        self.send_cls_signal(signal, *sender, condition=condition, **kwargs)

    @classmethod
    def signals(cls):
        if "signal_namespace" not in vars(cls):
            # subclasses of a decorated class share the namespace of the closest decorated class
            for base in cls.mro():
                if "signal_namespace" in vars(base):
                    return vars(base)["signal_namespace"]
            raise ValueError("Namespace not defined on " + str(cls))
        return vars(cls)["signal_namespace"]
