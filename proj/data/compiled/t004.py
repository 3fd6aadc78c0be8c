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
    def SumArray(a):
        s: int = int(0)
        s = 0
        hi0_ = (a).length(0)
        for d_0_i_ in _dafny.IntegerRange(0, hi0_):
            s = (s) + ((a)[d_0_i_])
        return s

