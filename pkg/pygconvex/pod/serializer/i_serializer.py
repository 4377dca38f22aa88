from abc import ABCMeta, abstractmethod


class Serializer:
    """
    Serializers turn plain documents into text and back.
    """
    __metaclass__ = ABCMeta

    @staticmethod
    @abstractmethod
    def serialise(obj) -> str:
        raise NotImplementedError()

    @staticmethod
    @abstractmethod
    def deserialize(buffer):
        raise NotImplementedError()
