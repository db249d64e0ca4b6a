"""Resource and utility estimation for Fermi-Hubbard correlation-function workloads."""

from __future__ import annotations

__version__ = "0.1.0"
