import os
import unittest

test_path = os.path.dirname(os.path.realpath(__file__))

# Modules holding shared helpers only.
HELPER_MODULES = {"tests.oracles"}


def load_tests(loader, filter):
    """
    Load all test cases and return a unittest.TestSuite object.

    filter: a list of module names (e.g. tests.test_solvers); an empty list loads every module.
    """
    suite = unittest.TestSuite()
    for r, d, f in sorted(os.walk(test_path)):
        module_path = os.path.relpath(r, os.path.dirname(test_path)).replace(os.path.sep, ".")
        for file in sorted(f):
            filename, ext = os.path.splitext(file)
            module = module_path + "." + filename
            if ext != ".py" or file.startswith("_") or module in HELPER_MODULES:
                continue
            if not filter or module in filter:
                print("[ADD ] " + module)
                suite.addTest(loader.loadTestsFromName(module))
            else:
                print("[SKIP] " + module)
    return suite
