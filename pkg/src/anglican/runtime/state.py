"""The inference state threaded through every continuation.

States are immutable; every update returns a new :class:`State`.
"""

from typing import Any, NamedTuple

from .values import HashMap

_EMPTY = HashMap()


class State(NamedTuple):
    log_weight: float = 0.0
    result: Any = None
    mem: dict = {}
    store: HashMap = _EMPTY
    extras: dict = {}

    def add_log_weight(self, delta):
        return self._replace(log_weight=self.log_weight + delta)

    def set_log_weight(self, value):
        return self._replace(log_weight=value)

    def set_result(self, value):
        return self._replace(result=value)

    def set_extra(self, key, value):
        return self._replace(extras={**self.extras, key: value})


initial_state = State()


def mem_key(args):
    """Hashable key that keeps apart values ``=`` distinguishes but Python
    hashing does not (``1``, ``1.0`` and ``true``)."""
    return () if args is None else tuple(_tag(a) for a in args)


def _tag(v):
    t = v.__class__
    if t is bool:
        return ("bool", v)
    if t is float:
        return ("float", v)
    if isinstance(v, tuple):
        return ("seq", tuple(_tag(x) for x in v))
    if isinstance(v, dict):
        return ("map", frozenset((_tag(k), _tag(x)) for k, x in v.items()))
    if isinstance(v, frozenset):
        return ("set", frozenset(_tag(x) for x in v))
    return v


def in_mem(state, mem_id, args):
    table = state.mem.get(mem_id)
    return table is not None and mem_key(args) in table


def get_mem(state, mem_id, args):
    return state.mem[mem_id][mem_key(args)]


def set_mem(state, mem_id, args, value):
    mem = state.mem
    table = dict(mem.get(mem_id, ()))
    table[mem_key(args)] = value
    return state._replace(mem={**mem, mem_id: table})


def store(state, keys, value):
    """Write ``value`` under the key path ``keys``."""
    keys = tuple(keys)
    if not keys:
        raise ValueError("store needs at least one key")
    return state._replace(store=_assoc_in(state.store, keys, value))


def retrieve(state, keys):
    """Value under the key path ``keys``, or nil when absent."""
    node = state.store
    for k in keys:
        if not isinstance(node, dict) or k not in node:
            return None
        node = node[k]
    return node


def _assoc_in(node, keys, value):
    if not isinstance(node, dict):
        node = _EMPTY
    head = keys[0]
    if len(keys) == 1:
        return node.assoc(head, value)
    return node.assoc(head, _assoc_in(node.get(head), keys[1:], value))


def add_log_weight(state, delta):
    return state.add_log_weight(delta)


def set_result(state, value):
    return state.set_result(value)
