import unittest

from pygconvex.core.events.events import CommonSignals, SignalSchema, Signaler, connect_base_signal, \
    disconnect_base_signal, signals
from pygconvex.core.model.generic.i_executable_mixin import ExecuteableMixin
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin, ProgressableMixin


@signals("private")
class Engine(LoggableMixin, ProgressableMixin, ExecuteableMixin):

    def __init__(self, fail=False, **kwargs):
        super().__init__(**kwargs)
        self.fail = fail

    def _execute_helper(self, *args, **kwargs):
        self.send_progress(progress=0.5)
        self.send_warn(message="half way")
        self.send_signal(SignalSchema("private"), value=1)
        if self.fail:
            raise RuntimeError("failed")
        return 42


class Recorder:

    def __init__(self, *names):
        self.received = []
        self.names = names
        for name in names:
            connect_base_signal(name, self.record)

    def record(self, sender, **kwargs):
        self.received.append((kwargs["signal"].name, sender, kwargs))

    def names_received(self):
        return [name for name, _, _ in self.received]

    def close(self):
        for name in self.names:
            disconnect_base_signal(name, self.record)


class SignalsTest(unittest.TestCase):

    def test_cascading_signals_reach_base_signals(self):
        recorder = Recorder(CommonSignals.START.name, CommonSignals.STOP.name, CommonSignals.LOG.name,
                            CommonSignals.PROGRESS.name)
        try:
            engine = Engine()
            self.assertEqual(engine.execute(), 42)
        finally:
            recorder.close()
        self.assertEqual(recorder.names_received(), ["start", "progress", "log", "stop"])
        _, sender, kwargs = recorder.received[2]
        self.assertIs(sender, engine)
        self.assertEqual(kwargs["log_level"], "warn")
        self.assertEqual(kwargs["message"], "half way")

    def test_non_cascading_signals_stay_on_the_class(self):
        recorder = Recorder("private")
        try:
            Engine().execute()
        finally:
            recorder.close()
        self.assertEqual(recorder.names_received(), [])

    def test_stop_is_sent_on_failure(self):
        recorder = Recorder(CommonSignals.STOP.name)
        try:
            with self.assertRaises(RuntimeError):
                Engine(fail=True).execute()
        finally:
            recorder.close()
        self.assertEqual(recorder.names_received(), ["stop"])

    def test_class_signals(self):
        received = []

        def on_private(sender, **kwargs):
            received.append(kwargs["value"])

        Engine.signals().private.connect(on_private)
        try:
            Engine().execute()
        finally:
            Engine.signals().private.disconnect(on_private)
        self.assertEqual(received, [1])
        self.assertEqual(set(Engine.signals().keys()), {"private", "log", "progress", "start", "stop"})

    def test_undeclared_signal(self):
        with self.assertRaises(ValueError):
            Engine().send_signal(SignalSchema("unknown"))

    def test_subclasses_share_the_namespace(self):
        class Derived(Engine):
            pass
        self.assertIs(Derived.signals(), Engine.signals())
        with self.assertRaises(ValueError):
            Signaler.signals()

    def test_condition(self):
        recorder = Recorder(CommonSignals.LOG.name)
        try:
            Engine().send_warn(message="hidden", condition=False)
            Engine().send_error(message="shown")
        finally:
            recorder.close()
        self.assertEqual([kwargs["message"] for _, _, kwargs in recorder.received], ["shown"])

    def test_schema_equality(self):
        self.assertEqual(SignalSchema("log"), CommonSignals.LOG)
        self.assertEqual(hash(SignalSchema("log")), hash(CommonSignals.LOG))
        self.assertEqual(str(CommonSignals.LOG), "log")


if __name__ == '__main__':
    unittest.main()
