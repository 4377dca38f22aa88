import json
import os

from pygconvex.pod.backend.log_backends import ILogBackend


class RecordingLogBackend(ILogBackend):
    """ Keeps the formatted log lines in memory. """

    def __init__(self, level="info", **kwargs):
        super().__init__(level=level, **kwargs)
        self.lines = []
        self.closed = False

    def format(self, level, message):
        return level + ": " + str(message)

    def log(self, message, **kwargs):
        self.lines.append(message)

    def close(self):
        self.closed = True


def write_json(directory, name, document):
    path = os.path.join(directory, name)
    with open(path, "w") as f:
        json.dump(document, f)
    return path


def write_text(directory, name, text):
    path = os.path.join(directory, name)
    with open(path, "w") as f:
        f.write(text)
    return path
