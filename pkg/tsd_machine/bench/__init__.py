from .Benchmarks import *
