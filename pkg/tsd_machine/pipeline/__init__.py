from .Pipeline import Pipeline
