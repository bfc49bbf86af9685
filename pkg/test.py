import sys
import unittest


if __name__ == '__main__':
    import tests
    loader = unittest.TestLoader()
    suite = tests.load_tests(loader, sys.argv[1:])
    result = unittest.TextTestRunner().run(suite)
    sys.exit(0 if result.wasSuccessful() else 1)
