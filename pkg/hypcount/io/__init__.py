"""Group/family file schemas and deterministic result export."""

from .export import *
from .schema import *
