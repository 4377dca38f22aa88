import configparser
import os

from pygconvex.core.exceptions import InputError
from pygconvex.core.util.random import DEFAULT_SEED
from pygconvex.pod.util.dict_util import dict_merge, lower_keys

if "PYGCONVEX_CFG_FILE" in os.environ:
    _CFG_FILE = os.environ["PYGCONVEX_CFG_FILE"]
else:
    _CFG_FILE = os.path.expanduser('~/.pygconvex.cfg')


class GConvexConfig:
    """
    GConvexConfig class covering functionality for viewing or updating default
    configurations of the GConvexApp.
    Configuration file is placed at ~/.pygconvex.cfg (or $PYGCONVEX_CFG_FILE)

    Expected values in config are following
    ---------------------------------------
    [GENERAL]\n
    seed = 20190101\n
    log_dir = ~/.pygconvex\n
    log_level = warn

    [CONNECTION]\n
    fd_rel_step = 1e-4\n
    steps = 100\n
    orthant_guard = 1e-12

    [MATFUN]\n
    eig_floor = 1e-12

    [GCONVEX]\n
    trials = 500\n
    t_grid_size = 33\n
    tol_eq = 1e-8\n
    tol_ineq = 1e-6\n
    fd_step = 1e-5\n
    second_step = 1e-3

    [DESCENT]\n
    step = 1.0\n
    max_iter = 10000\n
    grad_tol = 1e-8\n
    armijo_factor = 0.5\n
    armijo_slope = 1e-4\n
    max_backtracks = 40\n
    divergence_floor = -50

    [SCALING]\n
    iters = 1000\n
    tol = 1e-10\n
    probes = 20

    [BL]\n
    heuristic_trials = 200\n
    oracle_max_subsets = 200000
    ---------------------------------------

    Values read from the file are strings, `get` converts them to the type of the default of the same entry.
    """

    def __init__(self, config_file: str = _CFG_FILE, create: bool = True, config: dict = None):
        """
        Precedence of configurations: default gets overwritten by file which gets overwritten by config parameter
        :param config_file: str pointing to the config file or None if no config file should be used
        :param create: true if the config file should be created
        :param config: Additional configuration
        """
        self._config = self.default()

        # handle file here
        self._config_file = config_file
        if self._config_file is not None:
            self.__load_config()
            if not os.path.exists(self._config_file) and create:
                self.save()

        # now merge
        self.__merge_config(config)

    def __merge_config(self, to_merge):
        # merges the provided dictionary into the config.
        if to_merge is not None:
            dict_merge(self._config, lower_keys(to_merge))

    def __load_config(self):
        """
        loads a configuration from the configured file
        """
        config = configparser.ConfigParser()
        if os.path.exists(self._config_file):
            try:
                config.read(self._config_file)
            except configparser.Error as e:
                raise InputError("Can't read config file %s: %s" % (self._config_file, e))
            self.__merge_config({s: dict(config.items(s)) for s in config.sections()})

    @staticmethod
    def default():
        """
        :return: default values of the config
        """
        return {
            "GENERAL": {
                "seed": DEFAULT_SEED,
                "log_dir": os.path.join(os.path.expanduser("~"), ".pygconvex"),
                "log_level": "warn"
            },
            "CONNECTION": {
                "fd_rel_step": 1e-4,
                "steps": 100,
                "orthant_guard": 1e-12
            },
            "MATFUN": {
                "eig_floor": 1e-12
            },
            "GCONVEX": {
                "trials": 500,
                "t_grid_size": 33,
                "tol_eq": 1e-8,
                "tol_ineq": 1e-6,
                "fd_step": 1e-5,
                "second_step": 1e-3
            },
            "DESCENT": {
                "step": 1.0,
                "max_iter": 10000,
                "grad_tol": 1e-8,
                "armijo_factor": 0.5,
                "armijo_slope": 1e-4,
                "max_backtracks": 40,
                "divergence_floor": -50.0
            },
            "SCALING": {
                "iters": 1000,
                "tol": 1e-10,
                "probes": 20
            },
            "BL": {
                "heuristic_trials": 200,
                "oracle_max_subsets": 200000
            }
        }

    @property
    def config_file(self):
        return self._config_file

    @property
    def config(self):
        return self._config

    @config.setter
    def config(self, config):
        self._config = config

    @property
    def general(self):
        return self._config["GENERAL"]

    def load(self) -> None:
        """
        reloads the configuration specified under the current config path
        """
        if self._config_file is not None:
            self.__load_config()

    def save(self) -> None:
        """
        saves the current configuration to the configured file. Without file this is a no-op.
        """
        if self._config_file is None:
            return
        pconfig = configparser.ConfigParser()
        for k, v in self._config.items():
            pconfig[k] = {key: str(value) for key, value in v.items()}
        directory = os.path.dirname(os.path.abspath(self._config_file))
        os.makedirs(directory, exist_ok=True)
        with open(self._config_file, "w") as cfile:
            pconfig.write(cfile)

    def sections(self) -> list:
        """
        :return: returns all sections of the config
        """
        return list(self._config.keys())

    def set(self, key, value, section='GENERAL'):
        """
        Set value for given key in config. The value is converted to the type of the default entry, so that a
        malformed value is rejected before it is saved.

        :param key: Any key in config
        :type key: str
        :param value: Value to be set for given key
        :param section: Section to be changed in config, default GENERAL
        :type section: str
        """
        key = key.lower()
        if section not in self._config:
            self._config[section] = dict()
        self._config[section][key] = self._convert(key, value, section)

    def has_entry(self, key, section='GENERAL'):
        return section in self._config and key.lower() in self._config[section]

    def get(self, key, section='GENERAL'):
        """
        Get value for given key.
        :param section: Section to be queried
        :param key: Any key in config for any section
        :type key: str
        :return: Found value, converted to the type of the default
        :raises InputError: if the entry is missing or can't be converted
        """
        key = key.lower()
        if not self.has_entry(key, section):
            raise InputError("No config entry %s in section %s" % (key, section))
        return self._convert(key, self._config[section][key], section)

    def items(self, section='GENERAL') -> dict:
        return {key: self.get(key, section) for key in self._config.get(section, {})}

    def _convert(self, key, value, section):
        default = self.default().get(section, {}).get(key)
        if default is None or isinstance(value, type(default)) and not isinstance(value, bool):
            return value
        try:
            if isinstance(default, int):
                return int(value)
            if isinstance(default, float):
                return float(value)
        except (TypeError, ValueError):
            raise InputError("Config entry %s.%s has to be a %s, got %r" % (section, key, type(default).__name__,
                                                                          value))
        return str(value)
