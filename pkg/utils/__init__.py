"""Utils package for configuration, workspace files and report export."""

from .config import *
from .workspace import Workspace

__all__ = ['Workspace']
