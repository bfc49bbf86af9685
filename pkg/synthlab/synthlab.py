#!/usr/bin/env python3
import argparse
import functools
import logging
import math
import os
import sys
import traceback
from pathlib import Path

import argcomplete
import numpy as np

from synthlab.codecs import OutputDirectory, encode_geometry, encode_noise, encode_phase, encode_widths
from synthlab.cones import descent_generators, lineality_decompose, maximal_representer, \
    coherence_circumangle_bound, sampling_bound_condition, sampling_rate_estimate, width_bound_gauge, \
    width_bound_polyhedral
from synthlab.config import PresetStore, RunConfig
from synthlab.dictionaries import build_dictionary, coherence
from synthlab.errors import ConfigError, ConvergenceError, DomainError, SynthlabError
from synthlab.experiments import run_noise_sweep, run_phase_fixed, run_phase_full
from synthlab.formatters import ConfigPrintFormatter, GeometrySummaryFormatter, NoiseSummaryFormatter, \
    PhaseSummaryFormatter
from synthlab.logger import Logger
from synthlab.models import CoefVector, WidthEstimate
from synthlab.parsers import ArgumentFormatParser
from synthlab.signals import build_coefficients
from synthlab.solvers import is_unique_representer, solve_bp_eq
from synthlab.utils import STREAM_MEASUREMENTS, STREAM_NOISE, STREAM_PERTURBATION, STREAM_SUPPORT, STREAM_VALUES, \
    STREAM_WIDTH
from synthlab.width import estimate_statdim, estimate_statdim_decomposed, sparse_descent_width_bound, \
    upper_bound_lambda_min

app_name = "synthlab"

# Configuration files
# ===================
# Presets can be placed into a folder named ".synthlab/presets". Either inside the application- or inside the
# home-directory.
app_config_path = os.path.join(os.path.dirname(os.path.realpath(__file__)), ".synthlab")
home_config_path = os.path.join(str(Path.home()), ".synthlab")

MANIFEST = "manifest.cfg"

# Runs with a larger share of failed solves exit with EXIT_FAILURES.
FAILURE_RATE_LIMIT = 0.05

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_FAILURES = 0, 1, 2, 3

# Entries below this fraction of the largest entry are cut from computed representers.
REPRESENTER_THRESHOLD = 1e-9


class Lab:
    """ Builds the dictionaries and coefficient vectors of a run from its configuration. """

    def __init__(self, config: RunConfig):
        self.config = config
        self.settings = config.solver_settings()
        self.logger = Logger.get_instance()

    def dictionary(self, n=None):
        params = self.config.section("dictionary")
        kind, normalize = params.pop("kind"), params.pop("normalize")
        if n is not None:
            params["n"] = n
        return build_dictionary(kind, normalize, **params)

    def coefficients(self, dictionary) -> CoefVector:
        params = self.config.section("signal")
        recipe, representer = params.pop("recipe"), params.pop("representer")
        for key in ("offset", "spacing"):
            if params[key] < 0:
                params[key] = None
        z = build_coefficients(recipe, dictionary, **params)
        if representer == "given":
            return z
        x0 = dictionary.synthesize(z)
        if representer == "maximal":
            return maximal_representer(dictionary, x0, self.settings)
        solution = solve_bp_eq(dictionary.matrix, x0, self.settings)
        if not solution.converged:
            self.logger.warning("Computing a minimal l1-representer did not converge.")
        entries = np.array(solution.z, dtype=float)
        entries[np.abs(entries) <= REPRESENTER_THRESHOLD * np.max(np.abs(entries), initial=0.0)] = 0.0
        return CoefVector(entries)


def manifest(config: RunConfig, command: str) -> str:
    """ The resolved configuration together with the derivation of all seeds. """
    run = config.section("run")
    lines = [
        "# synthlab {}".format(command),
        "# Random draws use SeedSequence(run.seed={}, spawn_key=(stream, row, m, trial[, repetition])).".format(
            run["seed"]),
        "# Streams: support={}, values={}, measurements={}, noise={}, width={}, perturbation={}.".format(
            STREAM_SUPPORT, STREAM_VALUES, STREAM_MEASUREMENTS, STREAM_NOISE, STREAM_WIDTH, STREAM_PERTURBATION),
        "# Gaussian width samples use width.seed={}; solver perturbations use solver.seed={}.".format(
            config.get("width", "seed"), config.get("solver", "seed")),
        "",
    ]
    return "\n".join(lines) + config.dumps()


def _log_lines(lines):
    logger = Logger.get_instance()
    for line in lines:
        logger.info(line)


def exit_status(command):
    """
    Maps the outcome of a command onto its exit status: invalid configurations exit with EXIT_CONFIG, every other
    failure with EXIT_ERROR. Tracebacks are only printed at debug level.
    """

    @functools.wraps(command)
    def wrapper(config):
        logger = Logger.get_instance()
        try:
            return command(config)
        except SynthlabError as err:
            logger.error(str(err))
            if logger.level <= logging.DEBUG:
                traceback.print_exc()
            return EXIT_CONFIG if isinstance(err, ConfigError) else EXIT_ERROR

    return wrapper


def _run(config: RunConfig, command, compute):
    """ Validates the configuration, writes the manifest and runs compute; its outputs are removed on failure. """
    config.validate()
    output = OutputDirectory(config.get("run", "out"))
    output.write(MANIFEST, manifest(config, command))
    try:
        failure_rate = compute(Lab(config), output)
    except BaseException:
        output.remove_written(keep=(MANIFEST,))
        raise
    if failure_rate > FAILURE_RATE_LIMIT:
        Logger.get_instance().error("Solver failure rate {:.1%} exceeds {:.0%}!".format(
            failure_rate, FAILURE_RATE_LIMIT))
        return EXIT_FAILURES
    return EXIT_OK


@exit_status
def cmd_phase(config: RunConfig) -> int:
    """ Phase transition of a fixed coefficient vector or of random sparse vectors; writes phase.csv. """

    def compute(lab, output):
        experiment, width = config.section("experiment"), config.section("width")
        seed, threads = config.get("run", "seed"), config.get("run", "threads")
        dictionary = lab.dictionary()
        if experiment["kind"] == "full":
            grid = run_phase_full(dictionary, experiment["s_values"], experiment["trials"], seed, lab.settings,
                                  width["samples"], width["seed"], experiment["m_values"], experiment["repetitions"],
                                  experiment["ensemble"], threads)
            labels = ["descent:{}:s={}".format(dictionary.label, s) for s in grid.s_values]
        else:
            z = lab.coefficients(dictionary)
            if not is_unique_representer(dictionary, z, lab.settings):
                lab.logger.warning("The coefficients are not the unique minimal l1-representer of their signal; "
                                   "coefficient recovery is bound to fail.")
            samples = width["samples"] if experiment["overlay"] else 0
            grid = run_phase_fixed(dictionary, z, experiment["m_values"], experiment["trials"], seed, lab.settings,
                                   experiment["ensemble"], threads, samples, width["seed"])
            labels = ["descent:" + dictionary.label]
        output.write("phase.csv", encode_phase(grid))
        if grid.overlay:
            output.write("widths.csv", encode_widths(
                (label, WidthEstimate(statdim, stderr, width["samples"], width["seed"]))
                for label, statdim, stderr in zip(labels, grid.overlay, grid.overlay_stderr)))
        _log_lines(PhaseSummaryFormatter.build(grid))
        return grid.failure_rate

    return _run(config, "phase", compute)


@exit_status
def cmd_noise(config: RunConfig) -> int:
    """ Recovery errors over the noise levels against the signal error bound; writes noise.csv. """

    def compute(lab, output):
        experiment, width = config.section("experiment"), config.section("width")
        seed, threads = config.get("run", "seed"), config.get("run", "threads")
        dictionary = lab.dictionary()
        z = lab.coefficients(dictionary)
        cone = descent_generators(dictionary, z)
        estimate = estimate_statdim(cone, width["samples"], width["seed"], lab.settings, threads)
        sweep = run_noise_sweep(dictionary, z, experiment["eta_values"], experiment["trials"], seed, lab.settings,
                                m=experiment["m"] or None, width=estimate, ensemble=experiment["ensemble"],
                                u=experiment["u"], c_const=experiment["c_const"], gamma=experiment["gamma"],
                                threads=threads)
        output.write("noise.csv", encode_noise(sweep))
        output.write("widths.csv", encode_widths([(cone.label, estimate)]))
        _log_lines(NoiseSummaryFormatter.build(sweep))
        return sweep.failure_rate

    return _run(config, "noise", compute)


def _or_none(function, *args):
    """ The value of the bound, or None where the bound does not apply. """
    try:
        return function(*args)
    except DomainError:
        return None


def geometry_record(lab: Lab, dictionary, z, width: dict, geometry: dict, threads=1) -> dict:
    """ Lineality, circumangle, statistical dimension and all analytic bounds of the descent cone at z. """
    decomposition = lineality_decompose(dictionary, z, lab.settings)
    s_bar = int(np.count_nonzero(z.signs()))
    record = {
        "label": dictionary.label, "n": dictionary.n, "d": dictionary.d, "s_bar": s_bar,
        "lineality_dim": decomposition.lineality_dim, "range_generators": decomposition.range_generator_count,
    }
    alpha = decomposition.circum_alpha
    if alpha is not None:
        record.update(alpha=alpha, cos_alpha=math.cos(alpha), tan2_alpha=decomposition.tan2_alpha)
        polyhedral = _or_none(width_bound_polyhedral, alpha, decomposition.range_generator_count)
        if polyhedral is not None:
            record["polyhedral_width_bound"] = decomposition.lineality_dim + polyhedral ** 2
        record["gauge_width_bound"] = _or_none(width_bound_gauge, s_bar, dictionary.d, alpha)
        record["corollary_rate"] = _or_none(sampling_rate_estimate, s_bar, dictionary.d, alpha)
    mu = _or_none(coherence, dictionary)
    record["coherence"] = mu
    if mu is not None:
        record["coherence_bound"] = _or_none(coherence_circumangle_bound, s_bar, mu)
    if geometry["statdim"]:
        estimate = estimate_statdim_decomposed(decomposition, width["samples"], width["seed"], lab.settings, threads)
        record.update(statdim=estimate.statdim, statdim_stderr=estimate.stderr)
    if geometry["lambda_min"]:
        try:
            bound = upper_bound_lambda_min(dictionary, z, width["lambda_perturbations"], width["seed"],
                                           lab.settings, width["lambda_scale"])
        except ConvergenceError as err:
            lab.logger.warning("Skipping lambda_min bound: {}".format(err))
            bound = None
        record["lambda_min_upper"] = bound
        if bound is not None and 0 < bound < math.inf:
            kappa = max(1.0, dictionary.spectral_norm / bound)
            record["condition_bound"] = sampling_bound_condition(kappa, sparse_descent_width_bound(s_bar, dictionary.d))
    return record


@exit_status
def cmd_geometry(config: RunConfig) -> int:
    """ Geometry of the descent cone for one or a sweep of signal dimensions; writes geometry.csv. """

    def compute(lab, output):
        width, geometry = config.section("width"), config.section("geometry")
        records, estimates = [], []
        for n in geometry["n_values"] or [None]:
            dictionary = lab.dictionary(n)
            z = lab.coefficients(dictionary)
            lab.logger.info("Analyzing '{}' with n={} ...".format(dictionary.label, dictionary.n))
            record = geometry_record(lab, dictionary, z, width, geometry, config.get("run", "threads"))
            records.append(record)
            if "statdim" in record:
                estimates.append(("descent:{}:n={}".format(dictionary.label, dictionary.n), WidthEstimate(
                    record["statdim"], record["statdim_stderr"], width["samples"], width["seed"])))
        output.write("geometry.csv", encode_geometry(records))
        if estimates:
            output.write("widths.csv", encode_widths(estimates))
        _log_lines(GeometrySummaryFormatter.build(records))
        return 0.0

    return _run(config, "geometry", compute)


@exit_status
def cmd_print_config(config: RunConfig) -> int:
    """ Prints the resolved configuration with every default documented inline. """
    for line in ConfigPrintFormatter.build(config):
        print(line)
    return EXIT_OK


COMMANDS = {
    "phase": cmd_phase,
    "noise": cmd_noise,
    "geometry": cmd_geometry,
    "print-config": cmd_print_config,
}


def resolve_config(arguments, presets: PresetStore) -> RunConfig:
    """
    Resolves the configuration in the order: defaults, preset, configuration file, desk overrides (unless --full),
    command line flags and finally the SECTION.KEY=VALUE overrides.
    """
    config = RunConfig()
    if arguments.figure:
        _, text = presets.load(arguments.figure)
        config.merge(text)
    if arguments.config:
        file = os.path.expanduser(arguments.config)
        if not os.path.isfile(file):
            raise ConfigError("Loading configuration failed! The file '{}' was not found!".format(file))
        with open(file) as f:
            config.merge(f.read())
    if arguments.full:
        config.desk.clear()
    else:
        config.apply_desk()
    for key, value in (("seed", arguments.seed), ("threads", arguments.threads), ("out", arguments.out)):
        if value is not None:
            config.set("run", key, str(value))
    parser = ArgumentFormatParser()
    for override in arguments.overrides:
        config.update(parser.parse(override))
    return config


def main():
    log_level = logging.DEBUG if "--debug" in sys.argv or "-d" in sys.argv else logging.INFO
    logger = Logger.initialize(app_name, "%(msg)s", log_level)
    presets = PresetStore([home_config_path, app_config_path])

    def argparse_preset_completer(prefix, parsed_args, **kwargs):
        return presets.names()

    parser = argparse.ArgumentParser(
        description='synthlab',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
    Presets:

""" + os.linesep.join(["  {}".format(name.rjust(20, ' ')) for name in presets.names()]) + """

    Examples:

        # Show the resolved configuration of a preset with every default
        $ synthlab print-config --figure fig1

        # Phase transition of the random sparse vectors at desk scale
        $ synthlab phase --figure fig1 --out results/fig1

        # The same at the original scale (takes hours)
        $ synthlab phase --figure fig1 --full --threads 8

        # Noise robustness with a custom noise grid
        $ synthlab noise --figure haar-coef experiment.eta_values=0:0.5:0.1

        # Noise levels read from a file (one per line)
        $ synthlab noise --figure haar-sig experiment.eta_values:etas.txt

        # Circumangle of the identity at a 4-sparse vector
        $ synthlab geometry dictionary.kind=identity dictionary.n=32 signal.s=4
        """
    )
    parser.add_argument('command', choices=sorted(COMMANDS), help="The command to run.")
    parser.add_argument('overrides', metavar='SECTION.KEY=VALUE | SECTION.KEY:FILE', nargs='*',
                        help='Overrides a single configuration key. A list value can be read from a file holding one '
                             'item per line.')
    parser.add_argument('--config', action="store", metavar="FILE", dest='config',
                        help="A configuration file applied on top of the preset.")
    parser.add_argument('--figure', action="store", metavar="NAME", dest='figure',
                        help="The preset which reproduces a figure.") \
        .completer = argparse_preset_completer
    scale = parser.add_mutually_exclusive_group()
    scale.add_argument('--desk', action="store_false", dest='full',
                       help="Apply the desk scale overrides of the preset (default).")
    scale.add_argument('--full', action="store_true", dest='full',
                       help="Run at the original scale of the preset.")
    parser.add_argument('--seed', action="store", type=int, metavar="N", dest='seed',
                        help="The master seed.")
    parser.add_argument('--threads', action="store", type=int, metavar="N", dest='threads',
                        help="The maximal number of worker threads.")
    parser.add_argument('--out', action="store", metavar="DIR", dest='out',
                        help="The output directory.")
    parser.add_argument('-q', '--quiet', action="store_false", dest='verbose',
                        help="Do not print progress and summaries.")
    parser.add_argument('-d', '--debug', action="store_true", dest='debug',
                        help="Prints additional debug information (e.g. stack traces).")

    argcomplete.autocomplete(parser)
    arguments = parser.parse_args()

    if arguments.debug:
        logger.level = logging.DEBUG
    elif arguments.verbose:
        logger.level = logging.INFO
    else:
        logger.level = logging.WARN

    try:
        config = resolve_config(arguments, presets)
    except SynthlabError as e:
        logger.error(str(e))
        if arguments.debug:
            traceback.print_exc()
        sys.exit(EXIT_CONFIG if isinstance(e, ConfigError) else EXIT_ERROR)

    sys.exit(COMMANDS[arguments.command](config))


if __name__ == '__main__':
    main()
