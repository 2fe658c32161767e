import hashlib
import json
import logging
import re
import dataclasses
from abc import ABC
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List

from .exceptions import ConfigError

logger = logging.getLogger(__name__)


PACKAGE_LOGGER = "phaseless_farfield"
LOG_FORMAT = "%(name)s : %(asctime)s : %(levelname)s : %(message)s"


def init_logger(level=logging.INFO) -> logging.Logger:
    """Console handler on the package logger, repeated calls only change the level"""
    package_logger = logging.getLogger(PACKAGE_LOGGER)
    package_logger.setLevel(level)
    if not package_logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        package_logger.addHandler(handler)
    return package_logger


def map_in_threads(func: Callable, items: Iterable, threads: int = 1) -> List:
    """
    Applies func to every item, optionally on a thread pool.
    numpy/scipy release the GIL inside LAPACK and FFT calls, so the
    per-direction and per-probe work of the solvers scales with threads

    Args:
        func(Callable): function of a single item
        items(Iterable): items to process, order is preserved
        threads(int): number of worker threads, 1 runs inline

    Returns:
        List: results in the order of items
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def split_in_chunks(count: int, chunks: int) -> List[slice]:
    """Splits range(count) in at most `chunks` contiguous slices"""
    chunks = max(1, min(chunks, count))
    bounds = [round(i * count / chunks) for i in range(chunks + 1)]
    return [slice(bounds[i], bounds[i + 1]) for i in range(chunks)]


def config_hash(*documents: Dict) -> str:
    """
    Content hash of JSON-serializable documents

    Args:
        *documents(Dict): documents (config, scene) that define an output

    Returns:
        str: hex sha256 of their canonical JSON form
    """
    digest = hashlib.sha256()
    for document in documents:
        digest.update(
            json.dumps(document, sort_keys=True, separators=(",", ":")).encode()
        )
    return digest.hexdigest()


def dataclass_from_dict(dataclass_type, dict_to_convert: Dict):
    """
    Builds a dataclass instance from a dict, rejecting unknown keys

    Args:
        dataclass_type: the dataclass to instantiate
        dict_to_convert (Dict): its field values

    Returns:
        instance of dataclass_type
    """
    known = {field.name for field in dataclasses.fields(dataclass_type)}
    unknown = set(dict_to_convert) - known
    if unknown:
        raise ConfigError(
            f"Unknown keys {sorted(unknown)} for {dataclass_type.__name__}"
        )
    try:
        return dataclass_type(**dict_to_convert)
    except TypeError as e:
        raise ConfigError(f"Invalid {dataclass_type.__name__}: {e}") from e


class AbstractFactory(ABC):
    """Abstract Factory for all the factories which is responsible
     for registering classes"""

    _builders = {}

    @staticmethod
    def valid_subclass_to_register(class_instance):
        """Checks if the class name is a valid format"""
        return re.match("Concrete.*Factory", class_instance.__name__) is not None

    @staticmethod
    def get_identifier_string(class_type):
        """Extracts the name from the name of the class,
        ConcreteRoughSurfaceFactory is registered as rough_surface"""
        matched = re.match("Concrete(.*)Factory", class_type.__name__)
        return re.sub(r"(?<!^)(?=[A-Z])", "_", matched.group(1)).lower()

    @classmethod
    def register_builder(cls, factory_type, class_type):
        """Registers the factory to be used later by the user"""
        assert cls.valid_subclass_to_register(class_type), (
            "Not a valid class to register. "
            "Ensure that the name follows the format "
            "'Concrete.*Factory'"
        )
        if factory_type not in cls._builders.keys():
            cls._builders[factory_type] = {}
        identifier = cls.get_identifier_string(class_type)
        cls._builders[factory_type][identifier] = class_type

    @classmethod
    def get_builders(cls):
        return cls._builders


def register_factory(factory_type):
    """Decorator for registering factories in the factory_types"""

    def decorate(decorated_class_type):
        AbstractFactory.register_builder(factory_type, decorated_class_type)
        return decorated_class_type

    return decorate
