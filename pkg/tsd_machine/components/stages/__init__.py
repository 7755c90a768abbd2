from .ParseComponent import ParseComponent
from .TypecheckComponent import TypecheckComponent
from .TranslateComponent import TranslateComponent
from .RunMachineComponent import RunMachineComponent
from .LintGraphComponent import LintGraphComponent
from .DifferentialCheckComponent import DifferentialCheckComponent
