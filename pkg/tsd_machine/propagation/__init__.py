from .Propagator import *
