"""Checkpoint addresses: ``(identifier, padded occurrence count)``."""

from typing import Any, NamedTuple

from .._backend import kernels

AddressCursor = kernels.AddressCursor
DEFAULT_PADDING = 16


class Address(NamedTuple):
    identifier: Any
    index: int

    def __repr__(self):
        return f"[{self.identifier} {self.index}]"


def next_address(cursor, ident):
    """Address of the next occurrence of ``ident``.  The cursor is updated
    in place and returned for convenience."""
    return Address(*cursor.next(ident)), cursor


def checkpoint_id(cp, cursor):
    """Address of checkpoint ``cp``: its explicit identifier when the
    source gave one, else the fresh symbol of its form."""
    return next_address(cursor, cp.id)


def addresses(idents, padding=DEFAULT_PADDING):
    """Addresses for a whole sequence of identifiers."""
    cursor = AddressCursor(padding)
    return [Address(*cursor.next(i)) for i in idents]
