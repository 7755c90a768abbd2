from .Validity import *
