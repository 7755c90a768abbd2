from .DataflowRules import dataflow_pass
from .PassRules import pass_step
from .RewriteRules import rewrite_step
from .Machine import Machine, init_state, is_final, restart_state, run, run_program
