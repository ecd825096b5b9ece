"""Algorithm dispatch."""

from ..forms import Keyword
from ..runtime.rng import Rng
from .addressing import DEFAULT_PADDING
from .exec import InferenceError
from .importance import importance
from .lmh import lmh
from .smc import smc

ALGORITHMS = ("importance", "lmh", "smc")
_OPTIONS = {"particles", "seed", "padding"}


def _positive_int(name, value):
    if value.__class__ is not int or value < 1:
        raise InferenceError(f"option {name} must be a positive integer, got {value!r}")
    return value


def infer(algorithm, query, value=None, **options):
    """Lazy sequence of states drawn by ``algorithm`` (importance, lmh or
    smc).  Options: ``seed`` (all), ``padding`` (all), ``particles`` (smc).
    Nothing runs until the first element is requested."""
    if isinstance(algorithm, Keyword):
        algorithm = algorithm.name
    if algorithm not in ALGORITHMS:
        raise InferenceError(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
    unknown = set(options) - _OPTIONS
    if unknown:
        raise InferenceError(f"unknown option(s): {', '.join(sorted(unknown))}")
    seed = options.get("seed", 0)
    if seed.__class__ is not int:
        raise InferenceError(f"option seed must be an integer, got {seed!r}")
    padding = _positive_int("padding", options.get("padding", DEFAULT_PADDING))
    if "particles" in options and algorithm != "smc":
        raise InferenceError("option particles applies to smc only")
    particles = _positive_int("particles", options.get("particles", 1))
    rng = Rng(seed)
    if algorithm == "importance":
        return importance(query, value, rng)
    if algorithm == "lmh":
        return lmh(query, value, rng, padding)
    return smc(query, value, rng, particles, padding)


def doquery(algorithm, query, value=None, *options, **kw):
    """``infer`` taking keyword-style option pairs, e.g.
    ``doquery("smc", q, None, ":particles", 100)``."""
    if len(options) % 2:
        raise InferenceError("options must come in name/value pairs")
    for name, val in zip(options[::2], options[1::2]):
        if isinstance(name, Keyword):
            name = name.name
        elif isinstance(name, str):
            name = name.lstrip(":")
        else:
            raise InferenceError(f"option name must be a keyword, got {name!r}")
        kw[name] = val
    return infer(algorithm, query, value, **kw)
