"""Concrete problem families; importing this package registers them all."""

from . import (  # noqa: F401
    bouncingball,
    bpe,
    brusselator,
    doublependulum,
    grayscott,
    hires,
    linear,
    lorenz63,
    lorenz96,
    qgso,
)
