import os
import requests as rq
from numpy import ndarray, float64 as f64
from app.models import User
from .util import *


class Handler:
    class Options:
        pass

    def handle(self, user: User) -> rq.Response:
        return rq.get(os.environ["URL"])
