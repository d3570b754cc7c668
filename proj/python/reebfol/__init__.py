"""Python front end to the reebfol core."""

import json

from ._reebfol import (
    FormatError,
    Instance,
    InstanceError,
    instance_names,
    log_diffuse,
    make_instance,
    set_threads,
)
from . import _reebfol

__all__ = [
    "FormatError",
    "Instance",
    "InstanceError",
    "check_contact",
    "check_superharmonic",
    "contraction_rate",
    "instance_names",
    "log_diffuse",
    "make_instance",
    "set_threads",
    "solve_lp",
]


def check_superharmonic(instance, margin=0.0):
    return json.loads(_reebfol._superharmonic(instance, margin))


def check_contact(instance, eps=None):
    """eps=None searches the dyadic grid for the largest working eps."""
    return json.loads(_reebfol._contact(instance, eps))


def solve_lp(complex_):
    """complex_ is a complex dict (or JSON text) in the CLI file format."""
    text = complex_ if isinstance(complex_, str) else json.dumps(complex_)
    return json.loads(_reebfol._lp(text))


def contraction_rate(instance, T, dt, paths, seed):
    return json.loads(_reebfol._contraction(instance, T, dt, paths, seed))
