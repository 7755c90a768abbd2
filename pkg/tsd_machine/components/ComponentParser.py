from tsd_machine.common.errors import ComponentParserError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure import AbstractComponent


class ComponentParser:
    @staticmethod
    def parse_component_string(component_string: str) -> AbstractComponent:
        """
        Parse a stage string `name[key=value,...]` into an instantiated stage.
        A leading "!" means the stage is set up but not run.
        """
        component_string = component_string.strip()
        if not component_string:
            raise ComponentParserError("Empty component string.")
        if "[" in component_string and component_string.endswith("]"):
            registered_name, args_str = component_string.split("[", 1)
            args = ComponentParser.parse_component_params(args_str[:-1])
        else:
            registered_name = component_string
            args = {}

        should_run = True
        if registered_name.startswith("!"):
            registered_name = registered_name[1:]
            should_run = False

        component_class = ComponentsRegister.get_component(registered_name)
        if component_class is None:
            raise ComponentParserError(
                f"Component '{registered_name}' not found in registered components. "
                f"Available components: {', '.join(ComponentsRegister.names())}")

        return component_class(args, should_run=should_run)

    @staticmethod
    def parse_component_params(params_string: str) -> dict[str, str]:
        """
        Parse `key=value,key2=value2` into a dictionary. Values may contain "=".
        """
        if not params_string.strip():
            return {}
        try:
            return dict(arg.split("=", 1) for arg in params_string.split(","))
        except ValueError:
            raise ComponentParserError(
                f"Invalid argument format in '{params_string}'. Expected 'arg1=val1,arg2=val2,...'") from None
