from abc import ABC, abstractmethod

from tsd_machine.common.errors import ComponentParserError
from tsd_machine.tsd_types import RunData


class AbstractComponent(ABC):
    """
    A pipeline stage. Stages read and write one shared RunData: setup runs for every stage first, then run.
    """

    def __init__(self, params: dict[str, str], name: str = None, should_run: bool = True, *args, **kwargs) -> None:
        """
        :param params: stage parameters, written as stage_name[key=value,key2=value2] on the command line
        :param name: name used in log lines, the class name by default
        :param should_run: False for stages written with a leading "!" (setup only)
        """
        self._params = params
        self._name = name if name else self.__class__.__name__
        self._should_run = should_run

    def set_name(self, new_name: str):
        self._name = new_name

    def get_name(self) -> str:
        return self._name

    @property
    def should_run(self) -> bool:
        return self._should_run

    def _flag(self, key: str, default: bool = False) -> bool:
        """Boolean parameter, true only for the string "true"."""
        return self._params.get(key, "true" if default else "false").lower() == "true"

    def _int_param(self, key: str) -> int | None:
        """
        Integer parameter, None when absent.
        :raises ComponentParserError: if the value is not an integer
        """
        if key not in self._params:
            return None
        try:
            return int(self._params[key])
        except ValueError:
            raise ComponentParserError(f"{self.__class__.__name__}: {key} must be an integer, "
                                       f"got '{self._params[key]}'") from None

    @staticmethod
    @abstractmethod
    def get_help() -> str:
        """Help text shown by --list_components."""
        raise NotImplementedError()

    @abstractmethod
    def setup(self, data: RunData) -> None:
        """
        Check parameters and adjust the run data before any stage runs, e.g. ask run_machine to record a trace.
        """
        raise NotImplementedError()

    @abstractmethod
    def run(self, data: RunData):
        """Run the stage on the run data, edited in place."""
        raise NotImplementedError()
