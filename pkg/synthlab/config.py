import math
import os
from collections import OrderedDict, namedtuple

from synthlab.dictionaries import DICTIONARY_BUILDERS
from synthlab.errors import ConfigError, DomainError
from synthlab.logger import Logger
from synthlab.models import SolverSettings
from synthlab.parsers import ConfigFormatParser, ValueFormatParser
from synthlab.signals import SIGNAL_RECIPES
from synthlab.utils import is_interactive, safe_join_path, select_name

# A configuration key: its default, the kind of value ("int", "float", "bool", "str", "ints", "floats"), the
# accepted words (for "str") and a one-line description.
Option = namedtuple("Option", ["default", "kind", "choices", "description"])


def _option(default, kind, description, choices=None):
    return Option(default, kind, choices, description)


SCHEMA = OrderedDict([
    ("run", OrderedDict([
        ("seed", _option(0, "int", "Master seed of all measurement, noise and coefficient draws.")),
        ("threads", _option(1, "int", "Maximal number of worker threads.")),
        ("out", _option("results", "str", "Output directory.")),
    ])),
    ("dictionary", OrderedDict([
        ("kind", _option("haar", "str", "Dictionary construction.", sorted(DICTIONARY_BUILDERS))),
        ("n", _option(64, "int", "Signal dimension.")),
        ("d", _option(128, "int", "Number of atoms (gaussian only).")),
        ("levels", _option(3, "int", "Decomposition levels (haar only).")),
        ("sigma", _option(10.0, "float", "Kernel width in samples (superres only).")),
        ("seed", _option(0, "int", "Seed of random dictionaries.")),
        ("normalize", _option(False, "bool", "Rescale every atom to unit norm.")),
    ])),
    ("signal", OrderedDict([
        ("recipe", _option("random", "str", "Coefficient recipe.", sorted(SIGNAL_RECIPES))),
        ("s", _option(8, "int", "Sparsity (random, blocks, omp).")),
        ("seed", _option(1, "int", "Seed of random coefficients (random, blocks).")),
        ("offset", _option(-1, "int", "First index of the blocks; -1 picks the low frequency atoms (blocks).")),
        ("spacing", _option(-1, "int", "Distance between the block starts; -1 picks n / 2 (blocks).")),
        ("indices", _option([], "ints", "Indices of the nonzero entries (spikes).")),
        ("values", _option([], "floats", "Values of the nonzero entries (spikes).")),
        ("jumps", _option(4, "int", "Number of equidistant jumps (jumps).")),
        ("x1", _option(2.0, "float", "First signal entry, x1 > xn > 0 (conv-example).")),
        ("xn", _option(1.0, "float", "Last signal entry (conv-example).")),
        ("tol", _option(0.0, "float", "Residual tolerance (omp).")),
        ("representer", _option("given", "str", "Use the coefficients as given, a minimal l1-representer of D z or "
                                                "one with maximal support.", ["given", "minimal", "maximal"])),
    ])),
    ("experiment", OrderedDict([
        ("kind", _option("fixed", "str", "Phase transition for the fixed signal or for random sparse vectors.",
                         ["fixed", "full"])),
        ("m_values", _option(list(range(2, 65, 2)), "ints", "Numbers of measurements.")),
        ("s_values", _option(list(range(2, 25, 2)), "ints", "Sparsities (full phase transition).")),
        ("trials", _option(25, "int", "Trials per grid cell or noise level.")),
        ("repetitions", _option(5, "int", "Measurement draws per random vector (full phase transition).")),
        ("eta_values", _option([round(0.05 * k, 12) for k in range(21)], "floats", "Noise levels.")),
        ("m", _option(0, "int", "Measurements of the noise sweep; 0 picks ceil(statdim) + 40.")),
        ("ensemble", _option("gaussian", "str", "Measurement ensemble.", ["gaussian", "rademacher"])),
        ("c_const", _option(1.0, "float", "Numerical constant c of the sampling rate (rademacher).")),
        ("gamma", _option(1.0, "float", "Sub-Gaussian norm gamma of the measurements (rademacher).")),
        ("u", _option(0.0, "float", "Probability parameter u of the sampling rate.")),
        ("overlay", _option(True, "bool", "Estimate the statistical dimension of the fixed signal.")),
    ])),
    ("solver", OrderedDict(
        (name, _option(getattr(SolverSettings, name), "bool" if name == "polish" else
                       "int" if name in ("max_iters", "restarts", "subgradient_iters", "seed") else "float",
                       "Solver setting '{}'.".format(name)))
        for name in SolverSettings.field_names())),
    ("width", OrderedDict([
        ("samples", _option(300, "int", "Gaussian samples of the statistical dimension estimate.")),
        ("seed", _option(0, "int", "Seed of the Gaussian samples.")),
        ("lambda_perturbations", _option(20, "int", "Perturbations of the lambda_min upper bound.")),
        ("lambda_scale", _option(1e-3, "float", "Perturbation size relative to ||D z|| of the lambda_min bound.")),
    ])),
    ("geometry", OrderedDict([
        ("n_values", _option([], "ints", "Sweep over signal dimensions; empty uses dictionary.n.")),
        ("statdim", _option(True, "bool", "Estimate the statistical dimension of the descent cone.")),
        ("lambda_min", _option(True, "bool", "Run the lambda_min upper bound heuristic.")),
    ])),
])

DESK_SECTION = "desk"

SOLVER_DESCRIPTIONS = {
    "max_iters": "Iteration limit of the ADMM solvers.",
    "abs_tol": "Absolute ADMM stopping tolerance.",
    "rel_tol": "Relative ADMM stopping tolerance.",
    "penalty": "Initial ADMM penalty parameter.",
    "over_relaxation": "ADMM over-relaxation in [1, 1.9].",
    "feas_tol": "Feasibility tolerance relative to max(1, ||y||).",
    "opt_tol": "Relative optimality tolerance.",
    "kkt_tol": "KKT tolerance of nonnegative least squares.",
    "cert_tol": "Certificate tolerance of the circumcenter.",
    "act_tol": "Active set tolerance of the circumcenter.",
    "restarts": "Random restarts of the circumcenter search.",
    "subgradient_iters": "Subgradient iterations per circumcenter start.",
    "perturbation": "Size of the tie-breaking linear perturbations relative to the l1-norm of the representer.",
    "polish": "Polish ADMM solutions on their support.",
    "seed": "Seed of the solver perturbations and restarts.",
}
for _name, _description in SOLVER_DESCRIPTIONS.items():
    SCHEMA["solver"][_name] = SCHEMA["solver"][_name]._replace(description=_description)


def _format_value(value, kind):
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("ints", "floats"):
        return ", ".join(_format_value(item, kind[:-1]) for item in value)
    if kind == "float":
        return repr(float(value))
    return str(value)


def _parse_value(text, option: Option, name):
    try:
        if option.kind == "int":
            return int(text)
        if option.kind == "float":
            return float(text)
        if option.kind == "bool":
            lowered = text.lower()
            if lowered not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(text)
            return lowered in ("true", "yes", "1")
        if option.kind == "ints":
            return ValueFormatParser().parse_list(text, int)
        if option.kind == "floats":
            return ValueFormatParser().parse_list(text, float)
    except ValueError:
        raise ConfigError("Parsing '{}' failed! Invalid {} value '{}'!".format(name, option.kind, text))
    if option.choices and text not in option.choices:
        raise ConfigError("Parsing '{}' failed! Expected one of {}, got '{}'!".format(
            name, ", ".join(option.choices), text))
    return text


def _lookup(section, key):
    if section not in SCHEMA:
        raise ConfigError("Parsing configuration failed! Unknown section '{}'!".format(section))
    if key not in SCHEMA[section]:
        raise ConfigError("Parsing configuration failed! Unknown key '{}' in section '{}'!".format(key, section))
    return SCHEMA[section][key]


class RunConfig:
    """
    The resolved configuration of a run: flat sections of typed values, all keys defaulted by SCHEMA.

    desk holds the qualified overrides (section.key -> text) applied for desk scale runs.
    """

    def __init__(self):
        self._values = OrderedDict(
            (section, OrderedDict((key, option.default) for key, option in options.items()))
            for section, options in SCHEMA.items())
        self.desk = OrderedDict()

    def get(self, section, key):
        _lookup(section, key)
        return self._values[section][key]

    def section(self, section):
        if section not in SCHEMA:
            raise ConfigError("Reading configuration failed! Unknown section '{}'!".format(section))
        return OrderedDict(self._values[section])

    def set(self, section, key, text):
        """ Assigns the textual value to section.key. """
        option = _lookup(section, key)
        self._values[section][key] = _parse_value(text, option, "{}.{}".format(section, key))

    def assign(self, qualified, text):
        section, _, key = qualified.partition(".")
        self.set(section, key, text)

    def update(self, assignments: dict):
        for qualified, text in assignments.items():
            self.assign(qualified, text)

    def merge(self, text):
        """ Applies a configuration file on top of the current values; its desk section extends desk. """
        for section, key, value in ConfigFormatParser().parse(text):
            if section == DESK_SECTION:
                qualified_section, _, qualified_key = key.partition(".")
                _lookup(qualified_section, qualified_key)
                self.desk[key] = value
            else:
                self.set(section, key, value)

    def apply_desk(self):
        self.update(self.desk)
        self.desk = OrderedDict()

    @staticmethod
    def loads(text):
        config = RunConfig()
        config.merge(text)
        return config

    def dumps(self, with_descriptions=False):
        lines = []
        for section, options in SCHEMA.items():
            lines.append("[{}]".format(section))
            for key, option in options.items():
                if with_descriptions:
                    lines.append("# {} (default: {})".format(
                        option.description, _format_value(option.default, option.kind) or "empty"))
                value = _format_value(self._values[section][key], option.kind)
                lines.append("{} = {}".format(key, value) if value else "{} =".format(key))
            lines.append("")
        if self.desk:
            lines.append("[{}]".format(DESK_SECTION))
            lines.extend("{} = {}".format(key, value) for key, value in self.desk.items())
            lines.append("")
        return "\n".join(lines)

    def solver_settings(self):
        try:
            return SolverSettings(**self.section("solver"))
        except DomainError as err:
            raise ConfigError(str(err))

    def validate(self):
        """ Checks referential integrity of the configuration before any computation starts. """

        def require(condition, message):
            if not condition:
                raise ConfigError("Validating configuration failed! {}!".format(message))

        run, dictionary, signal = self.section("run"), self.section("dictionary"), self.section("signal")
        experiment, width, geometry = self.section("experiment"), self.section("width"), self.section("geometry")
        require(run["threads"] >= 1, "Expected run.threads >= 1")
        require(run["out"] != "", "Expected an output directory")

        dimensions = geometry["n_values"] or [dictionary["n"]]
        for n in dimensions:
            d = self._atoms(dictionary, n)
            require(d >= 1, "Dictionary '{}' has no atoms for n={}".format(dictionary["kind"], n))
            if signal["recipe"] in ("random", "blocks", "omp"):
                require(1 <= signal["s"] <= d, "Expected 1 <= signal.s <= d = {}, got {}".format(d, signal["s"]))
            if signal["recipe"] == "spikes":
                require(len(signal["indices"]) > 0 and len(signal["indices"]) == len(signal["values"]),
                        "Expected as many signal.values as signal.indices")
                require(0 <= min(signal["indices"]) and max(signal["indices"]) < d,
                        "Expected signal.indices in [0, {})".format(d))
        if dictionary["kind"] == "haar":
            for n in dimensions:
                require(n >= 2 and not n & (n - 1), "Expected a power of two for the haar dimension, got {}".format(n))
                require(1 <= dictionary["levels"] <= int(math.log2(n)),
                        "Expected 1 <= dictionary.levels <= log2(n) for n={}".format(n))
        if signal["recipe"] == "jumps":
            require(dictionary["kind"] == "tv-pinv", "Recipe 'jumps' requires the tv-pinv dictionary")
        if signal["recipe"] == "conv-example":
            require(dictionary["kind"] == "conv-pair", "Recipe 'conv-example' requires the conv-pair dictionary")
            require(signal["x1"] > signal["xn"] > 0, "Expected signal.x1 > signal.xn > 0")
        require(experiment["m_values"] and min(experiment["m_values"]) >= 1, "Expected experiment.m_values >= 1")
        require(experiment["eta_values"] and min(experiment["eta_values"]) >= 0,
                "Expected experiment.eta_values >= 0")
        require(experiment["s_values"] and min(experiment["s_values"]) >= 1, "Expected experiment.s_values >= 1")
        if experiment["kind"] == "full":
            d = self._atoms(dictionary, dictionary["n"])
            require(max(experiment["s_values"]) <= d, "Expected experiment.s_values <= d = {}".format(d))
        require(experiment["trials"] >= 1, "Expected experiment.trials >= 1")
        require(experiment["repetitions"] >= 1, "Expected experiment.repetitions >= 1")
        require(experiment["m"] >= 0, "Expected experiment.m >= 0")
        require(experiment["u"] >= 0, "Expected experiment.u >= 0")
        require(width["samples"] >= 2, "Expected width.samples >= 2")
        require(width["lambda_perturbations"] >= 1, "Expected width.lambda_perturbations >= 1")
        self.solver_settings()
        return self

    @staticmethod
    def _atoms(dictionary, n):
        """ The number of atoms the dictionary section yields for dimension n. """
        kind = dictionary["kind"]
        return {
            "identity": n,
            "duplicated-identity": 2 * n,
            "gaussian": dictionary["d"],
            "haar": n * (dictionary["levels"] + 1),
            "conv-pair": 2 * n,
            "superres": n,
            "tv-pinv": n - 1,
        }[kind]

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self._values == other._values and self.desk == other.desk


class PresetStore:
    """
    Figure presets are configuration files named <preset>.cfg inside a folder named "presets". Either inside the
    application- or inside the home-directory. Presets in the home-directory win.
    """

    EXTENSION = ".cfg"

    def __init__(self, paths):
        self.paths = paths
        self.preset_paths = [safe_join_path(path, "presets") for path in paths]
        self.logger = Logger.get_instance()

    def _get_preset_file(self, name):
        if not name:
            return None
        for preset_path in self.preset_paths:
            preset_file = safe_join_path(preset_path, name + self.EXTENSION)
            if os.path.isfile(preset_file):
                return preset_file
        return None

    def names(self):
        names = set()
        for preset_path in self.preset_paths:
            if os.path.isdir(preset_path):
                names.update(os.path.splitext(file)[0] for file in os.listdir(preset_path)
                             if file.endswith(self.EXTENSION))
        return sorted(names)

    def load(self, name, interactive=None):
        """
        Returns the resolved preset name and the text of the preset file.

        An unknown name is offered for fuzzy selection when running interactively.
        """
        preset_file = self._get_preset_file(name)
        interactive = is_interactive() if interactive is None else interactive
        if not preset_file and interactive:
            name = select_name(self.names(), query=name)
            preset_file = self._get_preset_file(name)
        if not preset_file:
            raise ConfigError("Loading preset '{}' failed! Preset not found! Available presets: {}!".format(
                name or "", ", ".join(self.names())))
        self.logger.debug("Loading preset {} ...".format(preset_file))
        try:
            with open(preset_file) as f:
                return name, f.read()
        except OSError:
            raise ConfigError("Loading preset '{}' failed! Invalid preset file!".format(name))
