from .AbstractComponent import AbstractComponent
