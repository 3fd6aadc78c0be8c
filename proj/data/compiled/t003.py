import sys
from typing import Callable, Any, TypeVar, NamedTuple
from math import floor
from itertools import count

import module_ as module_
import _dafny as _dafny
import System_ as System_

# Module: module_

class default__:
    def  __init__(self):
        pass

    @staticmethod
    def TriangularPrismVolume(base, height, length):
        volume: int = int(0)
        volume = _dafny.euclidian_division(((base) * (height)) * (length), 2)
        return volume

