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
    def Squares(n):
        a: _dafny.Array = _dafny.Array(None, n)
        hi0_ = n
        for d_0_i_ in _dafny.IntegerRange(0, hi0_):
            (a)[d_0_i_] = (d_0_i_) * (d_0_i_)
        return (a)[0]
