from .Parser import parse
from .Pretty import pretty
from .TypeChecker import TypeEnv, infer_type, typecheck, PRIMITIVE_SIGNATURES
