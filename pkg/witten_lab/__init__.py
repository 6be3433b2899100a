from . version import version
from . errors import *
