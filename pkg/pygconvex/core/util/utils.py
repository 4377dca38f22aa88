import math
from typing import Tuple

import numpy as np


class _Const:
    """ Namespace of constants. Values can not be rebound on an instance. """

    class ConstError(TypeError):
        pass

    def __setattr__(self, name, value):
        if name in self.__dict__ or hasattr(self.__class__, name):
            raise self.ConstError("Can't rebind const(%s)" % name)
        self.__dict__[name] = value

    @classmethod
    def values(cls):
        return [v for k, v in vars(cls).items() if not k.startswith("_") and isinstance(v, str)]


def unpack(kwargs_obj: dict, *args):
    """
    Unpacks a dict object into a tuple. You can pass tuples for setting default values.
    :param kwargs_obj:
    :param args:
    :return:
    """
    empty = object()
    arg_list = []
    for entry in args:
        if isinstance(entry, str):
            arg_list.append(kwargs_obj.get(entry))
        elif isinstance(entry, Tuple):
            key, *rest = entry
            default = empty if len(rest) == 0 else rest[0]
            if default is empty:
                arg_list.append(kwargs_obj.get(key))
            else:
                arg_list.append(kwargs_obj.get(key, default))
        else:
            raise ValueError("Pass a tuple or string not: " + str(entry))
    return tuple(arg_list)


def filter_nones(d: dict):
    return {key: val for key, val in d.items() if val is not None}


def to_plain(obj):
    """
    Converts numpy containers and scalars into plain python lists / floats so that documents serialise.
    Non finite floats are kept as strings ("inf", "-inf", "nan") since json has no representation for them.
    :param obj: object to convert
    :return: plain python object
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if hasattr(obj, "to_document"):
        return to_plain(obj.to_document())
    if hasattr(obj, "__array__") and not isinstance(obj, np.ndarray):
        obj = np.asarray(obj)
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not math.isfinite(value):
            return str(value)
        return value
    return obj
