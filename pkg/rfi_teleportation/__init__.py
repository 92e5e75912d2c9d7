"""Reference-frame-independent teleportation: G-equivariant unitary error bases for finite groups."""

from rfi_teleportation.config import TOOL_VERSION

__version__ = TOOL_VERSION
