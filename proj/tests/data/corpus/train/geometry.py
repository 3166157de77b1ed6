import math


class Vector:
    def __init__(self, x: float, y: float) -> None:
        self.x = x
        self.y = y

    def norm(self) -> float:
        squared: float = self.x * self.x + self.y * self.y
        return math.sqrt(squared)

    def scale(self, factor: float) -> "Vector":
        return Vector(self.x * factor, self.y * factor)


def add(a: Vector, b: Vector) -> Vector:
    result: Vector = Vector(a.x + b.x, a.y + b.y)
    return result


def path_length(points: list[Vector]) -> float:
    length: float = 0.0
    for i in range(1, len(points)):
        step = Vector(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y)
        length += step.norm()
    return length


ZERO: Vector = Vector(0.0, 0.0)
