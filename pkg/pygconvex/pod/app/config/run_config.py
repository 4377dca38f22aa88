"""
Per command parameter record. A RunConfig is assembled from the GConvexConfig sections a command reads plus the
options given on the command line and is echoed into the header of every output file.
"""
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from pygconvex._name import __name__ as _package_name
from pygconvex._version import __version__
from pygconvex.core.exceptions import InputError
from pygconvex.core.util.utils import filter_nones

# parameters allowed to be zero or negative
SIGNED_PARAMETERS = frozenset(["divergence_floor"])


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    input_path: str = None
    output_path: str = None
    parameters: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not _is_number(self.seed) or self.seed < 0:
            raise InputError("seed has to be a non negative integer, got %r" % (self.seed,))
        object.__setattr__(self, "seed", int(self.seed))
        for name, value in self.parameters.items():
            if not _is_number(value):
                continue
            if not math.isfinite(value):
                raise InputError("%s has to be finite, got %r" % (name, value))
            if name not in SIGNED_PARAMETERS and not value > 0:
                raise InputError("%s has to be positive, got %r" % (name, value))
        object.__setattr__(self, "parameters", MappingProxyType(dict(self.parameters)))

    @classmethod
    def of(cls, command, config, sections: Iterable[str] = (), input_path=None, output_path=None, seed=None,
           **overrides):
        """
        Creates the run config of a command.
        :param command: name of the command
        :param config: GConvexConfig providing the defaults
        :param sections: config sections read by the command, later sections win on equal names
        :param seed: seed override, GENERAL.seed if None
        :param overrides: command line values, None means not given
        :return: RunConfig
        """
        parameters = {}
        for section in sections:
            parameters.update(config.items(section))
        parameters.update(filter_nones(overrides))
        if seed is None:
            seed = config.get("seed")
        return cls(command=command, seed=seed, input_path=input_path, output_path=output_path,
                   parameters=parameters)

    def __getitem__(self, item):
        return self.parameters[item]

    def get(self, item, default=None):
        return self.parameters.get(item, default)

    def subset(self, *names) -> dict:
        return {name: self.parameters[name] for name in names if name in self.parameters}

    def header(self) -> list:
        """
        Provenance lines, sorted by key. The output path is left out so that a run can be compared with a run
        writing elsewhere.
        """
        entries = dict(self.parameters)
        entries["command"] = self.command
        entries["seed"] = self.seed
        entries[_package_name] = __version__
        if self.input_path is not None:
            entries["input"] = self.input_path
        return ["%s=%s" % (k, repr(v) if isinstance(v, float) else v) for k, v in sorted(entries.items())]

    def to_document(self):
        return {"command": self.command, "seed": self.seed, "input": self.input_path,
                "parameters": dict(self.parameters)}
