import argparse
import contextlib
import io
import logging
import math
import os
import tempfile
import unittest

from parameterized import parameterized

from synthlab.codecs import decode_table
from synthlab.config import PresetStore, RunConfig
from synthlab.errors import ConfigError
from synthlab.logger import Logger
from synthlab.synthlab import EXIT_CONFIG, EXIT_OK, MANIFEST, Lab, app_config_path, app_name, cmd_geometry, \
    cmd_noise, cmd_phase, cmd_print_config, resolve_config

Logger.initialize(app_name, "%(msg)s", logging.WARN)

SPIKES = {
    "dictionary.kind": "identity", "dictionary.n": "8",
    "signal.recipe": "spikes", "signal.indices": "1, 5", "signal.values": "1.5, -0.7",
    "width.samples": "20",
}


class NonInteractivePresets(PresetStore):

    def load(self, name, interactive=None):
        return super().load(name, interactive=False)


def new_config(out, **assignments):
    config = RunConfig()
    config.update(dict(SPIKES, **{"run.out": out}))
    config.update(assignments)
    return config


def new_arguments(**kwargs):
    arguments = dict(figure=None, config=None, full=False, seed=None, threads=None, out=None, overrides=[])
    arguments.update(kwargs)
    return argparse.Namespace(**arguments)


def read(directory, name):
    with open(os.path.join(directory, name)) as f:
        return f.read()


class TestCommands(unittest.TestCase):

    ####################################################################################################################
    # Phase
    ####################################################################################################################

    def test_phase(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"experiment.m_values": "2, 8", "experiment.trials": "2"})
            self.assertEqual(cmd_phase(config), EXIT_OK)
            self.assertEqual(sorted(os.listdir(out)), [MANIFEST, "phase.csv", "widths.csv"])
            records = decode_table(read(out, "phase.csv"))
            self.assertEqual([record["m"] for record in records], [2.0, 8.0])
            self.assertEqual(records[1]["sig_successes"], 2.0)
            self.assertEqual(records[1]["coef_successes"], 2.0)
            self.assertEqual(decode_table(read(out, "widths.csv"))[0]["cone_label"], "descent:identity")

    def test_phase_without_overlay(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"experiment.m_values": "8", "experiment.trials": "1",
                                        "experiment.overlay": "false"})
            self.assertEqual(cmd_phase(config), EXIT_OK)
            self.assertNotIn("widths.csv", os.listdir(out))

    def test_phase_full(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"experiment.kind": "full", "experiment.s_values": "1, 2",
                                        "experiment.m_values": "8", "experiment.trials": "1",
                                        "experiment.repetitions": "2", "signal.recipe": "random", "signal.s": "2"})
            self.assertEqual(cmd_phase(config), EXIT_OK)
            records = decode_table(read(out, "phase.csv"))
            self.assertEqual([record["trials"] for record in records], [2.0, 2.0])
            self.assertEqual(len(decode_table(read(out, "widths.csv"))), 2)

    def test_phase_reproducible(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second, \
                tempfile.TemporaryDirectory() as third:
            assignments = {"experiment.m_values": "2:8:2", "experiment.trials": "3", "run.seed": "11"}
            self.assertEqual(cmd_phase(new_config(first, **assignments)), EXIT_OK)
            self.assertEqual(cmd_phase(new_config(second, **assignments)), EXIT_OK)
            self.assertEqual(cmd_phase(new_config(third, **dict(assignments, **{"run.threads": "2"}))), EXIT_OK)
            self.assertEqual(read(first, "phase.csv"), read(second, "phase.csv"))
            self.assertEqual(read(first, "phase.csv"), read(third, "phase.csv"))

    def test_manifest(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"experiment.m_values": "8", "experiment.trials": "1"})
            cmd_phase(config)
            text = read(out, MANIFEST)
            self.assertTrue(text.startswith("# synthlab phase"))
            self.assertEqual(RunConfig.loads(text), config)

    @parameterized.expand([
        [cmd_phase],
        [cmd_noise],
        [cmd_geometry],
    ])
    def test_invalid_config(self, command):
        with tempfile.TemporaryDirectory() as directory:
            out = os.path.join(directory, "out")
            self.assertEqual(command(new_config(out, **{"run.threads": "0"})), EXIT_CONFIG)
            self.assertFalse(os.path.exists(out))

    ####################################################################################################################
    # Noise
    ####################################################################################################################

    def test_noise(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"experiment.eta_values": "0, 0.1", "experiment.trials": "2",
                                        "experiment.m": "8"})
            self.assertEqual(cmd_noise(config), EXIT_OK)
            records = decode_table(read(out, "noise.csv"))
            self.assertEqual([record["eta"] for record in records], [0.0, 0.1])
            self.assertLess(records[0]["mean_sig_err"], 1e-5)
            self.assertEqual(records[0]["bound_sig"], 0.0)
            self.assertEqual(len(decode_table(read(out, "widths.csv"))), 1)

    ####################################################################################################################
    # Geometry
    ####################################################################################################################

    def test_geometry_identity(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"dictionary.n": "16", "signal.indices": "0, 2, 4, 6",
                                        "signal.values": "1, -1, 1, -1", "geometry.lambda_min": "false"})
            self.assertEqual(cmd_geometry(config), EXIT_OK)
            record = decode_table(read(out, "geometry.csv"))[0]
            self.assertEqual(record["label"], "identity")
            self.assertEqual((record["s_bar"], record["lineality_dim"], record["range_generators"]), (4.0, 3.0, 24.0))
            self.assertAlmostEqual(record["tan2_alpha"], 4.0, delta=1e-6)
            self.assertEqual(record["coherence"], 0.0)
            self.assertIsNotNone(record["statdim"])
            self.assertIsNone(record["lambda_min_upper"])

    def test_geometry_conv_pair(self):
        with tempfile.TemporaryDirectory() as out:
            config = new_config(out, **{"dictionary.kind": "conv-pair", "signal.recipe": "conv-example",
                                        "geometry.n_values": "8, 12", "geometry.statdim": "false",
                                        "geometry.lambda_min": "false"})
            self.assertEqual(cmd_geometry(config), EXIT_OK)
            records = decode_table(read(out, "geometry.csv"))
            self.assertEqual([record["n"] for record in records], [8.0, 12.0])
            for record in records:
                self.assertEqual(record["lineality_dim"], 2.0)
                self.assertAlmostEqual(record["cos_alpha"], 1.0 / math.sqrt(3.0), delta=1e-6)
            self.assertNotIn("widths.csv", os.listdir(out))

    def test_lab_minimal_representer(self):
        config = new_config("unused", **{"dictionary.kind": "duplicated-identity", "signal.indices": "1",
                                         "signal.values": "2", "signal.representer": "minimal"})
        lab = Lab(config)
        dictionary = lab.dictionary()
        z = lab.coefficients(dictionary)
        self.assertAlmostEqual(z.l1_norm(), 2.0, places=6)

    ####################################################################################################################
    # Configuration
    ####################################################################################################################

    def test_print_config(self):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            self.assertEqual(cmd_print_config(new_config("results")), EXIT_OK)
        self.assertIn("[experiment]", stdout.getvalue())
        self.assertIn("trials = 25", stdout.getvalue())

    def test_resolve_desk(self):
        presets = NonInteractivePresets([app_config_path])
        config = resolve_config(new_arguments(figure="fig6a"), presets)
        self.assertEqual(config.get("dictionary", "n"), 64)
        self.assertEqual(config.get("experiment", "trials"), 25)

    def test_resolve_full(self):
        presets = NonInteractivePresets([app_config_path])
        config = resolve_config(new_arguments(figure="fig6a", full=True), presets)
        self.assertEqual(config.get("dictionary", "n"), 256)
        self.assertEqual(config.get("experiment", "trials"), 100)
        self.assertEqual(len(config.desk), 0)

    def test_resolve_order(self):
        presets = NonInteractivePresets([app_config_path])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "run.cfg")
            with open(path, "w") as f:
                f.write("[run]\nseed = 5\nthreads = 3\n[experiment]\ntrials = 7\n")
            config = resolve_config(new_arguments(figure="fig6a", config=path, seed=9,
                                                  overrides=["experiment.trials=4"]), presets)
        self.assertEqual(config.get("run", "seed"), 9)
        self.assertEqual(config.get("run", "threads"), 3)
        self.assertEqual(config.get("experiment", "trials"), 4)

    def test_resolve_unknown_preset(self):
        with self.assertRaises(ConfigError):
            resolve_config(new_arguments(figure="fig99"), NonInteractivePresets([app_config_path]))

    def test_resolve_missing_config(self):
        with self.assertRaises(ConfigError):
            resolve_config(new_arguments(config="/does/not/exist.cfg"), NonInteractivePresets([app_config_path]))
