from .models import Response
from .sessions import Session
