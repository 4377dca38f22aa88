import os
import shutil
import tempfile
import unittest

from pygconvex.core.events.events import CommonSignals, base_signals
from pygconvex.core.geometry.gconvex import builtin_field, default_sampler, violation_search
from pygconvex.core.geometry.manifold import orthant
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin
from pygconvex.pod.backend.log_backends import FILE_NAME, FileLogBackend, StdErrLogBackend
from pygconvex.pod.service.logging_service import LoggingService
from pygconvex.pod.tests.util.util import RecordingLogBackend


class LoggingServiceTest(unittest.TestCase):

    def test_engine_messages_reach_the_backends(self):
        backend = RecordingLogBackend()
        with LoggingService([backend]):
            m = orthant(1)
            violation_search(builtin_field("logbarrier", m), default_sampler(m), 5, seed=1)
        self.assertTrue(backend.closed)
        self.assertEqual(backend.lines[0], "INFO: ViolationSearch started")
        self.assertIn("INFO: logbarrier: no violation in 5 trials", backend.lines)

    def test_levels(self):
        backend = RecordingLogBackend(level="warn")
        with LoggingService(backend) as service:
            self.assertEqual(service.backends, [backend])
            sender = object()
            base_signals.signal(CommonSignals.LOG.name).send(sender, signal=CommonSignals.LOG, message="a",
                                                             log_level=LoggableMixin.LogLevels.INFO)
            base_signals.signal(CommonSignals.LOG.name).send(sender, signal=CommonSignals.LOG, message="b",
                                                             log_level=LoggableMixin.LogLevels.WARN)
            base_signals.signal(CommonSignals.LOG.name).send(sender, signal=CommonSignals.LOG, message="c",
                                                             log_level=LoggableMixin.LogLevels.ERROR)
            base_signals.signal(CommonSignals.LOG.name).send(sender, signal=CommonSignals.LOG, message="d",
                                                             log_level="debug")
        self.assertEqual(backend.lines, ["WARN: b", "ERROR: c", "WARN: Incorrect logging level specified: debug",
                                         "WARN: d"])

    def test_close_disconnects(self):
        backend = RecordingLogBackend()
        service = LoggingService([backend])
        service.close()
        m = orthant(1)
        violation_search(builtin_field("logbarrier", m), default_sampler(m), 1, seed=1)
        self.assertEqual(backend.lines, [])

    def test_no_backends(self):
        with LoggingService(None) as service:
            self.assertEqual(service.backends, [])


class LogBackendTest(unittest.TestCase):

    def test_unknown_level(self):
        with self.assertRaises(ValueError):
            StdErrLogBackend(level="debug")

    def test_accepts(self):
        backend = StdErrLogBackend(level="warn")
        self.assertFalse(backend.accepts("info"))
        self.assertTrue(backend.accepts("error"))

    def test_file_backend(self):
        directory = tempfile.mkdtemp(prefix="pygconvex-log")
        try:
            backend = FileLogBackend(os.path.join(directory, "logs"))
            backend.log_info(message="first")
            backend.log_warn(message="second")
            backend.close()
            self.assertEqual(backend.path, os.path.join(directory, "logs", FILE_NAME))
            with open(backend.path) as f:
                lines = f.read().splitlines()
            self.assertEqual(len(lines), 2)
            self.assertTrue(lines[0].endswith("INFO: first"))
            self.assertTrue(lines[1].endswith("WARN: second"))
        finally:
            shutil.rmtree(directory, ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
