from .utilities.general_utilities import init_logger, AbstractFactory  # NOQA
from .forward import solver_factory  # NOQA
from .version import __version__  # NOQA

class_builders = AbstractFactory.get_builders()
