import logging
import sys

import structlog

_configured = False


def _stderr_logger(*args) -> structlog.PrintLogger:
    # resolve sys.stderr per logger so captured streams are honoured
    return structlog.PrintLogger(sys.stderr)


def setup_logging(debug: bool = False, colors: bool | None = None) -> structlog.BoundLogger:
    """Configure structured logging on stderr."""
    global _configured
    log_level = logging.DEBUG if debug else logging.INFO
    if colors is None:
        colors = sys.stderr.isatty()

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=colors),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(log_level),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )
    _configured = True

    return structlog.get_logger()


def get_logger(name: str | None = None) -> structlog.BoundLogger:
    """Get a logger bound to a component name."""
    global _configured
    if not _configured:
        # library use without the CLI: stay quiet below warnings
        structlog.configure(
            wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING),
            logger_factory=_stderr_logger,
        )
        _configured = True
    logger = structlog.get_logger()
    if name:
        logger = logger.bind(component=name)
    return logger
