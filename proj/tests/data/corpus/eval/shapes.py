import math
from typing import Tuple


class Point:
    def __init__(self, x: float, y: float) -> None:
        self.x = x
        self.y = y

    def distance(self, other: "Point") -> float:
        dx: float = self.x - other.x
        dy: float = self.y - other.y
        return math.sqrt(dx * dx + dy * dy)


def centroid(points: list[Point]) -> Point:
    n: int = len(points)
    sx = sum(p.x for p in points)
    sy = sum(p.y for p in points)
    return Point(sx / n, sy / n)


def bounding_box(points: list[Point]) -> Tuple[Point, Point]:
    xs: list[float] = [p.x for p in points]
    ys: list[float] = [p.y for p in points]
    low: Point = Point(min(xs), min(ys))
    high = Point(max(xs), max(ys))
    return low, high


def label(point: Point, precision: int = 2) -> str:
    text: str = f"({point.x:.{precision}f}, {point.y:.{precision}f})"
    return text


ORIGIN: Point = Point(0.0, 0.0)
UNIT_NAMES: dict[str, str] = {"m": "metre", "cm": "centimetre"}
