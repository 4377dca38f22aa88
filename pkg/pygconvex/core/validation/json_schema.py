import json
from functools import lru_cache
from importlib import resources

from jsonschema import ValidationError, validators

from pygconvex.core.exceptions import InputError
from pygconvex.definitions import SCHEMA_PACKAGE


def rectangular(validator, rectangular, instance, schema):
    """
    Keyword checking that a nested list is a matrix, i.e. all rows have the same length.
    :param validator:
    :param rectangular: value of the keyword, checked if true
    :param instance:
    :return:
    """
    if rectangular and validator.is_type(instance, "array") and len(instance) > 0:
        lengths = {len(row) for row in instance if isinstance(row, list)}
        if len(lengths) > 1:
            yield ValidationError("rows of different lengths %r" % sorted(lengths))


def square(validator, square, instance, schema):
    """
    Keyword checking that a nested list is a square matrix.
    """
    if square and validator.is_type(instance, "array"):
        for row in instance:
            if isinstance(row, list) and len(row) != len(instance):
                yield ValidationError("matrix of %d rows is not square" % len(instance))
                return


gconvex_schema_validator = validators.extend(validators.Draft7Validator,
                                             validators={"rectangular": rectangular, "square": square})


@lru_cache(maxsize=None)
def load_schema(name):
    """
    Loads a schema shipped as package resource.
    :param name: name of the schema without the .json suffix
    :return: schema dict
    """
    try:
        text = resources.files(SCHEMA_PACKAGE).joinpath(name + ".json").read_text()
    except FileNotFoundError:
        raise InputError("Unknown schema " + name)
    return json.loads(text)


def _path_of(error):
    return "/".join(str(p) for p in error.absolute_path) or "<root>"


def validate_document(document, schema_name):
    """
    Validates a document against a named schema.
    :param document: parsed document
    :param schema_name: one of bl_datum, operator, matrix, posynomial
    :return: the document
    :raises InputError: on the first validation error (by path), naming the offending path
    """
    validator = gconvex_schema_validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(document), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        error = errors[0]
        raise InputError("Invalid %s document at %s: %s" % (schema_name, _path_of(error), error.message))
    return document
