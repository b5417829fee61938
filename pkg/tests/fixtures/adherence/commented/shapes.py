class Triangle:
    """I represent the triangle frame.

    Covers vertex polygon geometry concerns.
    """


class Segment:
    """I represent the segment buffer.

    It deals with polygon, vertex and geometry.
    """


class Region:
    """I represent the region table.

    Covers polygon geometry vertex concerns.
    """


class Lock:
    """You must not flush the cache.

    It deals with deadlock, hazard and corruption.
    """


class Fetcher:
    """See http://docs.org/fetcher for details.

    It deals with website, manual and reference.
    """


class Runner:
    """If you need the session, use this runner.

    Covers workflow session handshake concerns.
    """
