"""Problem files: JSON schemas, validation with JSON-pointer diagnostics, bundled presets."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .hankel import MomentSequence
from .kset import ClosedSet
from .rational import PoleSpec, RationalMoments
from .solver import PoleSet, SolverConfig
from .special import BivariateSequence

KINDS = ("power_tmp", "rtmp", "strong_hamburger", "circle")

_NUM = {"type": ["string", "integer"]}
_END = {"type": ["string", "integer"]}
_K = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _END}}
_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "density_floor": {"type": "number", "minimum": 0},
        "max_retries": {"type": "integer", "minimum": 1},
        "max_extension_steps": {"type": ["integer", "null"], "minimum": 0},
        "seed": {"type": "integer"},
        "pole_margin": {"type": "number", "minimum": 0},
    },
}
_POLES = {
    "type": "object",
    "additionalProperties": False,
    "required": ["k0"],
    "properties": {
        "k0": {"type": "integer", "minimum": 0},
        "real": {"type": "array", "items": {
            "type": "object", "required": ["lambda", "k"], "additionalProperties": False,
            "properties": {"lambda": _NUM, "k": {"type": "integer", "minimum": 1}}}},
        "complex": {"type": "array", "items": {
            "type": "object", "required": ["eta", "l"], "additionalProperties": False,
            "properties": {"eta": _NUM, "l": {"type": "integer", "minimum": 1}}}},
    },
}
_RMOMENTS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["gamma0"],
    "properties": {
        "gamma0": {"type": "array", "items": _NUM},
        "real": {"type": "array", "items": {"type": "array", "items": _NUM}},
        "complex": {"type": "array", "items": {
            "type": "object", "required": ["s0", "s1"], "additionalProperties": False,
            "properties": {"s0": {"type": "array", "items": _NUM}, "s1": {"type": "array", "items": _NUM}}}},
    },
}
_COMMON = {"kind": {"enum": list(KINDS)}, "config": _CONFIG, "name": {"type": "string"},
           "fixed_extension": {"type": "array", "items": _NUM}}
SCHEMAS = {
    "power_tmp": {"type": "object", "required": ["kind", "moments", "K"], "additionalProperties": False,
                  "properties": {**_COMMON, "moments": {"type": "array", "minItems": 1, "items": _NUM}, "K": _K,
                                 "poles": {"type": "array", "items": _NUM}}},
    "rtmp": {"type": "object", "required": ["kind", "poles", "moments", "K"], "additionalProperties": False,
             "properties": {**_COMMON, "poles": _POLES, "moments": _RMOMENTS, "K": _K}},
    "strong_hamburger": {"type": "object", "required": ["kind", "poles", "moments"], "additionalProperties": False,
                         "properties": {**_COMMON, "poles": _POLES, "moments": _RMOMENTS}},
    "circle": {"type": "object", "required": ["kind", "k", "beta"], "additionalProperties": False,
               "properties": {**_COMMON, "k": {"type": "integer", "minimum": 2},
                              "beta": {"type": "array", "items": {
                                  "type": "array", "minItems": 3, "maxItems": 3,
                                  "prefixItems": [{"type": "integer", "minimum": 0},
                                                  {"type": "integer", "minimum": 0}, _NUM]}}}},
}


class ProblemError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


@dataclass(frozen=True)
class Problem:
    kind: str
    raw: dict = field(compare=False, repr=False)
    config: SolverConfig = field(default_factory=SolverConfig)
    K: ClosedSet | None = None
    moments: MomentSequence | None = None
    poles: PoleSet = field(default_factory=PoleSet)
    spec: PoleSpec | None = None
    data: RationalMoments | None = None
    beta: BivariateSequence | None = None
    fixed_extension: tuple[Fraction, ...] = ()
    name: str = ""


def _ptr(path) -> str:
    return "".join(f"/{p}" for p in path)


def _rat(value: Any, path: tuple) -> Fraction:
    try:
        return Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ProblemError(_ptr(path), f"not an exact rational: {value!r} ({exc})") from None


def _endpoint(value: Any, path: tuple):
    if isinstance(value, str) and value.strip() in ("inf", "+inf", "-inf"):
        return value.strip().lstrip("+")
    return _rat(value, path)


def _closed_set(raw: list, path: tuple) -> ClosedSet:
    ivs = [(_endpoint(lo, path + (i, 0)), _endpoint(hi, path + (i, 1))) for i, (lo, hi) in enumerate(raw)]
    try:
        return ClosedSet(ivs)
    except ValueError as exc:
        raise ProblemError(_ptr(path), str(exc)) from None


def _rats(raw: list, path: tuple) -> list[Fraction]:
    return [_rat(v, path + (i,)) for i, v in enumerate(raw)]


def _config(raw: dict | None) -> SolverConfig:
    raw = dict(raw or {})
    if "seed" in raw:
        raw["rng_seed"] = raw.pop("seed")
    try:
        return SolverConfig(**raw)
    except ValueError as exc:
        raise ProblemError("/config", str(exc)) from None


def _pole_spec(raw: dict, path: tuple) -> PoleSpec:
    real = [(_rat(p["lambda"], path + ("real", i, "lambda")), p["k"]) for i, p in enumerate(raw.get("real", []))]
    cplx = [(_rat(p["eta"], path + ("complex", i, "eta")), p["l"]) for i, p in enumerate(raw.get("complex", []))]
    try:
        return PoleSpec(raw["k0"], real, cplx)
    except ValueError as exc:
        raise ProblemError(_ptr(path), str(exc)) from None


def _rational_moments(raw: dict, spec: PoleSpec, path: tuple) -> RationalMoments:
    data = RationalMoments(
        _rats(raw["gamma0"], path + ("gamma0",)),
        [_rats(s, path + ("real", i)) for i, s in enumerate(raw.get("real", []))],
        [(_rats(c["s0"], path + ("complex", i, "s0")), _rats(c["s1"], path + ("complex", i, "s1")))
         for i, c in enumerate(raw.get("complex", []))],
    )
    try:
        data.check(spec)
    except ValueError as exc:
        raise ProblemError(_ptr(path), str(exc)) from None
    return data


def parse_problem_data(raw: Any) -> Problem:
    if not isinstance(raw, dict):
        raise ProblemError("/", "problem must be a JSON object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ProblemError("/kind", f"kind must be one of {', '.join(KINDS)}")
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(raw), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        err = errors[0]
        raise ProblemError(_ptr(err.absolute_path), err.message)
    cfg = _config(raw.get("config"))
    fixed = tuple(_rats(raw.get("fixed_extension", []), ("fixed_extension",)))
    common = dict(kind=kind, raw=raw, config=cfg, fixed_extension=fixed, name=raw.get("name", ""))
    if kind == "power_tmp":
        vals = _rats(raw["moments"], ("moments",))
        poles = _rats(raw.get("poles", []), ("poles",))
        if len(set(poles)) != len(poles):
            raise ProblemError("/poles", "duplicate pole")
        return Problem(K=_closed_set(raw["K"], ("K",)), moments=MomentSequence(vals), poles=PoleSet(poles), **common)
    if kind == "circle":
        k = raw["k"]
        beta = {}
        for n, (i, j, v) in enumerate(raw["beta"]):
            if (i, j) in beta:
                raise ProblemError(f"/beta/{n}", f"duplicate index ({i}, {j})")
            beta[(i, j)] = _rat(v, ("beta", n, 2))
        try:
            seq = BivariateSequence(k, beta)
        except ValueError as exc:
            raise ProblemError("/beta", str(exc)) from None
        return Problem(beta=seq, **common)
    spec = _pole_spec(raw["poles"], ("poles",))
    data = _rational_moments(raw["moments"], spec, ("moments",))
    if kind == "strong_hamburger":
        if spec.complex_poles or len(spec.real_poles) != 1 or spec.real_poles[0][0] != 0:
            raise ProblemError("/poles", "strong Hamburger data needs exactly one real pole, at 0")
        return Problem(K=ClosedSet.real_line(), spec=spec, data=data, poles=spec.poles, **common)
    return Problem(K=_closed_set(raw["K"], ("K",)), spec=spec, data=data, poles=spec.poles, **common)


def parse_problem(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemError("/", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError("/", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_problem_data(raw)


# ---------------------------------------------------------------- presets


def preset_names() -> list[str]:
    files = resources.files("rtmp").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def preset_data(name: str) -> dict:
    if name not in preset_names():
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return json.loads(resources.files("rtmp").joinpath("presets").joinpath(f"{name}.json").read_text())


def load_preset(name: str) -> Problem:
    return parse_problem_data(preset_data(name))
