class Bare:
    pass


class AlsoBare:
    x = 1
