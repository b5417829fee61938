class Polygon:
    """I represent the polygon outline.

    Covers polygon vertex geometry concerns.
    """


class Mesh:
    """I represent the mesh cluster.

    It deals with vertex, geometry and polygon.
    """


class Hull:
    """I represent the convex hull.

    Covers geometry vertex polygon concerns.
    """


class Grid:
    """I represent the grid cursor.

    It deals with geometry, polygon and vertex.
    """
