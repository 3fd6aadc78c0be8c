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
    def TriangleNumber(n):
        t: int = int(0)
        t = 0
        hi0_ = (n) + (1)
        for d_0_i_ in _dafny.IntegerRange(1, hi0_):
            t = (t) + (d_0_i_)
        return t

