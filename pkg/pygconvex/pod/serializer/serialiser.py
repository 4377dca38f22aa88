import json

import click
import yaml

from pygconvex.core.util.utils import to_plain
from pygconvex.pod.serializer.i_serializer import Serializer


class JSonSerializer(Serializer):
    """
    Result documents as JSON with sorted keys. Floats are written by json with their repr, so equal documents give
    equal text.
    """

    @staticmethod
    def serialise(obj):
        return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def deserialize(buffer):
        return json.loads(buffer)


class YamlSerializer(Serializer):

    @staticmethod
    def serialise(obj):
        return yaml.safe_dump(to_plain(obj), sort_keys=True, default_flow_style=False)

    @staticmethod
    def deserialize(buffer):
        return yaml.safe_load(buffer)


SERIALIZERS = {"json": JSonSerializer, "yaml": YamlSerializer}


def serializer_for(fmt: str):
    try:
        return SERIALIZERS[fmt]
    except KeyError:
        raise ValueError("Unknown format %s, expected one of %s" % (fmt, ", ".join(sorted(SERIALIZERS))))


def write_document(path, document, fmt="json"):
    """
    Writes a document, to stdout if path is None or "-". Returns the written text.
    """
    text = serializer_for(fmt).serialise(document)
    if path is None or path == "-":
        click.echo(text, nl=False)
    else:
        with open(path, "w") as f:
            f.write(text)
    return text
