"""Checkpoint records returned by running code to the inference engine."""


class Checkpoint:
    __slots__ = ()


class SampleCP(Checkpoint):
    __slots__ = ("id", "dist", "cont", "state")

    def __init__(self, id, dist, cont, state):
        self.id = id
        self.dist = dist
        self.cont = cont
        self.state = state

    def __repr__(self):
        return f"SampleCP({self.id!r}, {self.dist!r})"


class ObserveCP(Checkpoint):
    __slots__ = ("id", "dist", "value", "cont", "state")

    def __init__(self, id, dist, value, cont, state):
        self.id = id
        self.dist = dist
        self.value = value
        self.cont = cont
        self.state = state

    def __repr__(self):
        return f"ObserveCP({self.id!r}, {self.dist!r}, {self.value!r})"


class ResultCP(Checkpoint):
    __slots__ = ("state",)

    def __init__(self, state):
        self.state = state

    def __repr__(self):
        return f"ResultCP({self.state.result!r})"


def continue_(cont, value, state):
    """Thunk that resumes ``cont`` with ``(value, state)`` when forced."""
    return lambda: cont(value, state)
