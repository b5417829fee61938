import dataclasses


@dataclasses.dataclass(frozen=True)
class Point:
    """A point in the plane.

    Example:
        >>> Point(1, 2)
        Point(x=1, y=2)
    """

    x: int
    y: int


text = """
class NotAClass:
    '''inside a string'''
"""
