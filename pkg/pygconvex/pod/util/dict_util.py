from collections.abc import Mapping


def dict_merge(dct, merge_dct):
    """ Recursive dict merge. Inspired by :meth:``dict.update()``, instead of
    updating only top-level keys, dict_merge recurses down into dicts nested
    to an arbitrary depth, updating keys. The ``merge_dct`` is merged into
    ``dct``.
    :param dct: dict onto which the merge is executed
    :param merge_dct: dct merged into dct
    :return: None
    """
    for k, v in merge_dct.items():
        if k in dct and isinstance(dct[k], dict) and isinstance(v, Mapping):
            dict_merge(dct[k], v)
        else:
            dct[k] = v


def lower_keys(dct: Mapping) -> dict:
    """ Copy of a two level section dict with lower case option names, as configparser stores them. """
    return {section: {str(k).lower(): v for k, v in values.items()} if isinstance(values, Mapping) else values
            for section, values in dct.items()}
