from .LoadProgramFromFileComponent import LoadProgramFromFileComponent
from .SaveRunDataToJsonComponent import SaveRunDataToJsonComponent
from .SaveTraceComponent import SaveTraceComponent
from .PrintOutcomeComponent import PrintOutcomeComponent, format_value
from .ExportDotComponent import ExportDotComponent
