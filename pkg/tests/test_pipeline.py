import json

import pytest

from tsd_machine.common.errors import ComponentError, ComponentParserError
from tsd_machine.components import ComponentParser, ComponentsRegister
from tsd_machine.pipeline import Pipeline
from tsd_machine.tsd_types import Final, RunData

from conftest import MAX_OF_CELLS


def test_parse_component_string():
    component = ComponentParser.parse_component_string("run_machine[fuel=100,schedule=rand:3]")
    assert component.get_name() == "RunMachineComponent"
    assert component.should_run

    skipped = ComponentParser.parse_component_string("!parse")
    assert not skipped.should_run


def test_parse_component_params():
    assert ComponentParser.parse_component_params("file=a=b.tsd,trace=false") == {"file": "a=b.tsd",
                                                                                    "trace": "false"}
    assert ComponentParser.parse_component_params("") == {}
    with pytest.raises(ComponentParserError):
        ComponentParser.parse_component_params("file")


@pytest.mark.parametrize("text", ["", "   ", "no_such_stage", "run_machine[fuel=lots]",
                                  "export_dot[at_step=soon]"])
def test_bad_component_strings(text):
    with pytest.raises(ComponentParserError):
        ComponentParser.parse_component_string(text)


def test_load_program_needs_a_file():
    pipeline = Pipeline.from_component_strings(["load_program", "parse"])
    with pytest.raises(ComponentParserError):
        pipeline.setup_and_run(RunData())


def test_load_program_reads_the_run_data_path(tmp_path):
    path = tmp_path / "odd,name].tsd"
    path.write_text(MAX_OF_CELLS, encoding="utf-8")
    data = Pipeline.from_component_strings(["load_program", "parse"]).setup_and_run(RunData(source_path=path))
    assert data.source == MAX_OF_CELLS
    assert data.source_name == str(path)
    assert data.term is not None


def test_every_stage_has_help():
    for name, component in ComponentsRegister.get_all_components().items():
        assert component.get_help(), name


def test_pipeline_runs_in_memory_source(capsys):
    pipeline = Pipeline.from_component_strings(["parse", "typecheck", "translate", "run_machine", "print_outcome"])
    data = pipeline.setup_and_run(RunData(source=MAX_OF_CELLS))
    assert isinstance(data.outcome, Final)
    assert str(data.type) == "Int"
    assert capsys.readouterr().out.split() == ["1", "3", "3"]
    # the translation keeps the initial graph
    assert data.translation.graph.cells() == []


def test_skipped_stage_is_only_set_up():
    pipeline = Pipeline.from_component_strings(["parse", "typecheck", "translate", "run_machine", "!save_trace"])
    data = pipeline.setup_and_run(RunData(source="step"))
    assert data.additional_attributes["record_trace"]
    assert data.trace


def test_stage_order_is_checked():
    with pytest.raises(ComponentError, match="parse must run first"):
        Pipeline.from_component_strings(["typecheck"]).setup_and_run(RunData(source="1"))


def test_save_run_data(tmp_path):
    target = tmp_path / "run.json"
    pipeline = Pipeline.from_component_strings(["parse", "typecheck", "translate", "run_machine",
                                                f"save_run_data_json[file={target},trace=false]"])
    data = pipeline.setup_and_run(RunData(source="let c = ref 1 in step; peek (deref c)"))
    saved = json.loads(target.read_text(encoding="utf-8"))
    assert saved["outcome"]["kind"] == "final"
    assert saved["outcome"]["observations"] == [1]
    assert "trace" not in saved
    assert data.additional_attributes["last_save_path"] == str(target)
