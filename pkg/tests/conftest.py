from pathlib import Path

import pytest

from tsd_machine.machine import Machine, init_state
from tsd_machine.translation import translate_program
from tsd_machine.tsd_types import RunConfig, ValidateLevel

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

SM = "let sm = λi. λf. λx. let s = ref i in link s (f s x); deref s in\n"

MAX_OF_CELLS = (PROGRAMS / "max_of_cells.tsd").read_text(encoding="utf-8")
ALT = (PROGRAMS / "alt.tsd").read_text(encoding="utf-8")
COMPOSITE = (PROGRAMS / "composite.tsd").read_text(encoding="utf-8")
SIEVE = (PROGRAMS / "sieve.tsd").read_text(encoding="utf-8")
SIEVE_STREAMS = (PROGRAMS / "sieve_streams.tsd").read_text(encoding="utf-8")

# graphs whose step is still ahead: the cells are linked, nothing has propagated yet
ALT_GRAPH = "let x = ref 1 in link x (1 - deref x); step"
COMPOSITE_GRAPH = SM + ("let alt = sm 1 (λs. λi. 1 - deref s) 0 in\n"
                        "let total = sm 0 (λs. λi. i + deref s) alt in\n"
                        "step")


def run_source(source: str, **config):
    """Translate and run a program text, returning the Outcome."""
    return Machine(RunConfig(**config)).run(init_state(translate_program(source)))


def state_before_step(source: str):
    """Run a program until its first `step` switches to propagation and return that state."""
    machine = Machine(RunConfig())
    state = init_state(translate_program(source))
    while machine.step(state) != "mode.sp":
        state.steps += 1
    return state


@pytest.fixture
def run():
    return run_source


@pytest.fixture
def validating():
    return lambda source: run_source(source, validate_level=ValidateLevel.EVERY_STEP)
