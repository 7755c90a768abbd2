import logging
from pathlib import Path

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.graph import graph_to_dot
from tsd_machine.machine import Machine, init_state
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.translation import TranslationResult
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class ExportDotComponent(AbstractComponent):
    """
    Renders the graph as DOT: the current graph, or a snapshot taken after a number of transitions.
    """

    def __init__(self, params: dict[str, str], *args, **kwargs) -> None:
        super().__init__(params, *args, **kwargs)
        self._at_step = self._int_param("at_step")
        self._initial = self._flag("initial")

    @staticmethod
    def get_help() -> str:
        return """Renders the graph in DOT with !-boxes as clusters and the token position highlighted.
\tAttributes: file (optional, defaults to the configured dot path, or standard output), at_step (optional, render a fresh run stopped after that many transitions),
\tinitial (true renders the translated graph to the configured initial dot path)"""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        if data.translation is None:
            raise ComponentError(self, "no graph to render, translate must run first")
        if self._initial:
            graph, token = data.translation.graph, None
        elif self._at_step is not None:
            graph, token = self._snapshot(data.translation, data)
        elif data.outcome is not None and data.outcome.state is not None:
            graph, token = data.outcome.state.graph, data.outcome.state.main
        else:
            graph, token = data.translation.graph, None
        data.dot = graph_to_dot(graph, token, name=Path(data.source_name).stem or "tsd")

        configured = data.config.initial_dot_path if self._initial else data.config.dot_path
        target = self._params.get("file") or (str(configured) if configured else None)
        if target is None:
            print(data.dot)
        else:
            Path(target).write_text(data.dot, encoding="utf-8")
            logger.info("%s: wrote %d nodes to %s", self._name, graph.node_count(), target)

    def _snapshot(self, translation: TranslationResult, data: RunData):
        fresh = translation.model_copy(update={"graph": translation.graph.snapshot()})
        state = init_state(fresh)
        Machine(data.config).run(state, fuel=self._at_step)
        logger.info("%s: snapshot after %d transitions", self._name, state.steps)
        return state.graph, state.main


ComponentsRegister.register_component("export_dot", ExportDotComponent)
