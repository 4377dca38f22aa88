from pygconvex.core.events.events import CommonSignals, connect_base_signal
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin
from pygconvex.pod.service.base_service import ServiceMixin


class LoggingService(ServiceMixin):
    """
    Routes the cascading log and start signals of all engines to the log backends.
    """

    def __init__(self, backends, *args, **kwargs):
        super().__init__(backends, *args, **kwargs)

        def log(sender, **kwargs):
            """
            Logs a message of a LoggableMixin to the backends
            """
            kwargs.pop("signal", None)
            log_level = kwargs.pop('log_level', LoggableMixin.LogLevels.INFO)

            if log_level == LoggableMixin.LogLevels.INFO:
                for b in self.backends:
                    b.log_info(**kwargs)

            elif log_level == LoggableMixin.LogLevels.WARN:
                for b in self.backends:
                    b.log_warn(**kwargs)

            elif log_level == LoggableMixin.LogLevels.ERROR:
                for b in self.backends:
                    b.log_error(**kwargs)

            else:
                for b in self.backends:
                    b.log_warn(message="Incorrect logging level specified: {log_level}".format(log_level=log_level))
                    b.log_warn(**kwargs)

        connect_base_signal(CommonSignals.LOG.name, log)
        self.save_signal_fn(CommonSignals.LOG.name, log)

        def log_event(sender, **kwargs):
            if isinstance(sender, LoggableMixin):
                for b in self.backends:
                    b.log_info(message="{name} started".format(name=type(sender).__name__))

        connect_base_signal(CommonSignals.START.name, log_event)
        self.save_signal_fn(CommonSignals.START.name, log_event)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
