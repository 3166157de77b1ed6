from .sessions import Session
from .models import Request, Response


def get(url, **kwargs):
    return Session().get(url, **kwargs)
