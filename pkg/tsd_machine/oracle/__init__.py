from .Oracle import NetCell, NetStore, Oracle, OracleResult, oracle_eval, observable
from .Differential import AgreementReport, differential_check, failure_kind
from .ProgramGenerator import ProgramGenerator, generate_programs
