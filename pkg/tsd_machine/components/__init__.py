from .stages import *
from .io_components import *

from .ComponentsRegister import ComponentsRegister
from .ComponentParser import ComponentParser
