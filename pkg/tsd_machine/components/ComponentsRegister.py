from tsd_machine.structure import AbstractComponent


class ComponentsRegister:
    """
    Pipeline stages by the snake_case name used in stage strings. Stage modules register themselves on import.
    """

    _components: dict[str, type[AbstractComponent]] = {}

    @staticmethod
    def register_component(component_name: str, component: type[AbstractComponent]):
        assert issubclass(component, AbstractComponent), f"{component} is not a pipeline stage."
        assert component_name not in ComponentsRegister._components, f"Stage {component_name} is already registered."
        ComponentsRegister._components[component_name] = component

    @staticmethod
    def get_component(component_name: str) -> type[AbstractComponent] | None:
        return ComponentsRegister._components.get(component_name)

    @staticmethod
    def names() -> list[str]:
        return sorted(ComponentsRegister._components)

    @staticmethod
    def get_all_components() -> dict[str, type[AbstractComponent]]:
        """
        :return: every registered stage by name. Mutable pointer, do not modify in place!
        """
        return ComponentsRegister._components
