import json
import logging
import os

from rich.console import Console
from rich.logging import RichHandler

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS = {
    "threads": None,
    "debug_mode": False,
    "max_parts": None,
    "prime_check": False,
}


def _positive_int(value, source):
    try:
        number = int(value)
    except (TypeError, ValueError):
        logger.warning("Ignoring %s=%r: not an integer.", source, value)
        return None
    if number < 1:
        logger.warning("Ignoring %s=%r: must be positive.", source, value)
        return None
    return number


def load_settings(config_path="modcomp.json"):
    """
    Loads engine settings from an optional JSON file, then applies MODCOMP_THREADS.

    :param config_path: Path to a JSON file with an "engine_settings" object.
    :return: A settings dict with every key of DEFAULT_SETTINGS.
    """
    settings = dict(DEFAULT_SETTINGS)
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
        engine_settings = config.get("engine_settings", {})
        unknown = sorted(set(engine_settings) - set(DEFAULT_SETTINGS))
        if unknown:
            logger.warning("Unknown engine settings in %s: %s", config_path, ", ".join(unknown))
        settings.update({k: v for k, v in engine_settings.items() if k in DEFAULT_SETTINGS})
    except FileNotFoundError:
        logger.debug("%s not found. Using default engine settings.", config_path)

    if settings["threads"] is not None:
        settings["threads"] = _positive_int(settings["threads"], "threads")
    env_threads = os.environ.get("MODCOMP_THREADS")
    if env_threads:
        threads = _positive_int(env_threads, "MODCOMP_THREADS")
        if threads is not None:
            settings["threads"] = threads
    return settings


def configure_logging(debug=False):
    """
    Routes the package's log records through a single rich handler on stderr.
    """
    package_logger = logging.getLogger("modcomp")
    if not any(isinstance(h, RichHandler) for h in package_logger.handlers):
        package_logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    package_logger.setLevel(logging.DEBUG if debug else logging.INFO)
    return package_logger
