"""
Logging utilities for the de Branges Spectral Laboratory.

`setup_logger` configures the DBLAB root logger (console plus rotating
file) from the `logging` section of the settings. Library modules only
call `get_logger` and inherit whatever the command-line runner set up.
"""

import os
import time
import logging
import platform
import traceback
from logging.handlers import RotatingFileHandler
from typing import Dict, Any, Optional
from datetime import datetime

import numpy as np

ROOT_LOGGER = "DBLAB"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
PACKAGE_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def get_logger(module_name: str) -> logging.Logger:
    """Child logger DBLAB.<module_name>; never carries handlers of its own."""
    return logging.getLogger(f"{ROOT_LOGGER}.{module_name}")


def _log_file(section: Dict[str, Any], paths: Dict[str, Any]) -> str:
    logs_dir = paths.get('logs_dir', 'logs')
    if not os.path.isabs(logs_dir):
        logs_dir = os.path.join(PACKAGE_ROOT, logs_dir)
    os.makedirs(logs_dir, exist_ok=True)
    return os.path.join(logs_dir, section.get('filename', 'dblab.log'))


def setup_logger(
    name: str,
    config: Dict[str, Any],
    verbose: bool = False,
    module_name: Optional[str] = None
) -> logging.Logger:
    """
    Configure a logger from the settings.

    Handlers are rebuilt on every call, so repeated construction of the
    runner (as in tests) does not duplicate output.

    Args:
        name: Root logger name, normally "DBLAB"
        config: Settings dictionary with a `logging` section
        verbose: Force DEBUG regardless of `logging.level`
        module_name: Give a component (e.g. "VerificationSuite") its own child logger

    Returns:
        Configured logger instance
    """
    section = config.get('logging', {})
    level = logging.DEBUG if verbose else getattr(logging, section.get('level', 'INFO'))
    formatter = logging.Formatter(section.get('format', DEFAULT_FORMAT))

    logger = logging.getLogger(f"{name}.{module_name}" if module_name else name)
    logger.setLevel(level)
    logger.propagate = module_name is None

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    handlers = []
    if section.get('console', True):
        handlers.append(logging.StreamHandler())
    if section.get('file', False):
        handlers.append(RotatingFileHandler(
            _log_file(section, config.get('paths', {})),
            maxBytes=section.get('max_size', 5 * 1024 * 1024),
            backupCount=section.get('backup_count', 3),
        ))

    for handler in handlers:
        handler.setFormatter(formatter)
        handler.setLevel(level)
        logger.addHandler(handler)

    return logger


def log_execution_time(logger: logging.Logger, start_time: float, operation: str) -> float:
    """Log and return the seconds elapsed since `start_time`."""
    elapsed = time.time() - start_time
    logger.info(f"{operation} finished in {elapsed:.2f} s")
    return elapsed


def _summarize(value: Any) -> Any:
    if isinstance(value, (str, int, bool, type(None))):
        return value
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.3e}"
    if isinstance(value, (complex, np.complexfloating)):
        return f"{complex(value):.3e}"
    if isinstance(value, np.ndarray):
        return f"ndarray{value.shape}"
    if isinstance(value, (list, tuple)):
        return f"{type(value).__name__}[{len(value)}]"
    if isinstance(value, dict):
        return f"dict[{len(value)}]"
    return type(value).__name__


def log_method_call(logger: logging.Logger, method_name: str, **kwargs) -> None:
    """
    Log a call at DEBUG level.

    Floats are shown in scientific notation, arrays by shape and
    containers by length.
    """
    args = {key: _summarize(value) for key, value in kwargs.items()}
    logger.debug(f"{method_name}({args})")


def log_result(logger: logging.Logger, method_name: str, result: Dict[str, Any]) -> None:
    """
    Log a status dictionary.

    "success" and "pass" go to INFO, "fail" to WARNING and anything else to
    ERROR. The remaining keys are summarized at DEBUG level.

    Args:
        logger: Logger instance
        method_name: Name of the producing method
        result: Dictionary with at least a "status" key
    """
    status = result.get('status', 'unknown')
    message = result.get('message')
    if status in ('success', 'pass'):
        logger.info(f"{method_name}: {status}" + (f" ({message})" if message else ""))
    elif status == 'fail':
        logger.warning(f"{method_name}: fail ({message or 'see report'})")
    else:
        logger.error(f"{method_name}: {status} ({message or 'no message'})")

    details = {key: _summarize(value) for key, value in result.items() if key not in ('status', 'message')}
    if details:
        logger.debug(f"{method_name} details: {details}")


def log_exception(logger: logging.Logger, method_name: str, exception: Exception) -> Dict[str, Any]:
    """
    Log an exception and return a serializable record of it.

    Partial results attached by the numerical errors (quadrature value,
    eigenvalue prefix) are carried into the record.

    Args:
        logger: Logger instance
        method_name: Where the exception was caught
        exception: The exception

    Returns:
        Dictionary with type, message, traceback and any partial result
    """
    trace = traceback.format_exc()
    logger.error(f"{method_name} raised {type(exception).__name__}: {exception}")
    logger.debug(trace)

    record = {
        "timestamp": datetime.now().isoformat(),
        "method": method_name,
        "exception_type": type(exception).__name__,
        "message": str(exception),
        "traceback": trace,
    }
    for attribute in ("partial_value", "error_estimate", "found"):
        if hasattr(exception, attribute):
            record[attribute] = getattr(exception, attribute)
    return record


def log_test_step(logger: logging.Logger, step_name: str, status: str, details: Optional[Dict[str, Any]] = None) -> None:
    """
    Log one verification check.

    Args:
        logger: Logger instance
        step_name: Suite or check name
        status: "PASS", "FAIL" or "SKIP"
        details: Extra context, logged for anything but PASS
    """
    level = {"PASS": logging.INFO, "FAIL": logging.ERROR}.get(status, logging.WARNING)
    line = f"[{step_name}] {status}"
    if details and status != "PASS":
        line += f" {details}"
    logger.log(level, line)


def log_system_info(logger: logging.Logger) -> None:
    import scipy

    logger.info(f"Python {platform.python_version()} on {platform.platform()}")
    logger.info(f"numpy {np.__version__}, scipy {scipy.__version__}")
