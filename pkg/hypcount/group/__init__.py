"""Free groups of isometries: words, orbit enumeration, conjugacy classes and double cosets."""

from .classes import *
from .cosets import *
from .orbit import *
from .spec import *
from .trie import *
from .words import *
