"""Module docstring."""
from __future__ import annotations

import os, sys as system
from .util import helper as h, other
from .. import sibling
from pkg.sub import (A,
                     B)

CONSTANT: int = 3
x = y = [1, 2.5, 3j, 0x1F, 1_000]
a, *rest = (1, 2, 3)
d = {"k": v for v in range(3) if v}
s = {1, 2}
t = f"value {x!r:>10}" "tail"
raw = rb'\d+' 
lam = lambda q, *r, k=1, **kw: q + k
cond = x if y else None
walrus = [z := 10, z ** 2]
chained = 1 < 2 <= 3 is not None
big = (1 +
       2 -
       3)
long_line = 1 + \
    2


@decorator
@other.decorator(arg=1)
class Widget(Base, metaclass=Meta):
    """A widget."""
    size: int = 0

    def __init__(self, size: int = 0, /, *, name: str = "w") -> None:
        self.size = size
        self.items[0] = name

    async def fetch(self, *args, **kwargs):
        async with session() as s, lock:
            async for item in s:
                await item
        return [i async for i in aiter()]


def generator(n):
    yield n
    yield from range(n)
    x = yield


def control(value):
    if value > 0:
        result = "positive"
    elif value < 0:
        result = "negative"
    elif value == 0:
        pass
    else:
        result = None
    while value:
        value -= 1
        if value == 5:
            break
        continue
    else:
        value = 0
    for i, (j, k) in enumerate(pairs):
        print(i, j, k, sep="")
    else:
        print("done")
    try:
        risky()
    except (ValueError, TypeError) as err:
        raise RuntimeError("bad") from err
    except Exception:
        raise
    else:
        ok = True
    finally:
        cleanup()
    with open("f") as fh, open("g") as gh:
        data = fh.read()[1:2, ::3]
    global CONSTANT
    del data, ok
    assert value == 0, "must be zero"
    return result; pass


def nested():
    counter = 0

    def inner():
        nonlocal counter
        counter += 1
        return counter

    class Local:
        attr = 1

    return inner
