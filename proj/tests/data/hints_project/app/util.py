import json


class Helper:
    pass


class _Cache(dict):
    class Entry:
        pass
