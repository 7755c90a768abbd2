from .Type import *
from .Term import *
from .PortRef import *
from .NodeKind import *
from .Token import *
from .MachineState import *
from .TraceEvent import *
from .Reports import *
from .RunConfig import *
from .RunData import *
