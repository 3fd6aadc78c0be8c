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
    def CountDigits(n):
        count: int = int(0)
        count = 1
        d_0_m_: int = int(0)
        d_0_m_ = _dafny.euclidian_division(n, 10)
        while (d_0_m_) > (0):
            count = (count) + (1)
            d_0_m_ = _dafny.euclidian_division(d_0_m_, 10)
        return count

