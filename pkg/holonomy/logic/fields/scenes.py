# holonomy/logic/fields/scenes.py
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from holonomy.errors import ConfigError
from holonomy.logic.fields import param_maps as pm
from holonomy.logic.fields.forms import (
    CurvatureForm,
    Form,
    MappedForm,
    PolynomialForm,
    SumForm,
    TwoCurvatureForm,
    ZeroForm,
)
from holonomy.logic.higher.catalog import as_crossed_module, get_instance
from holonomy.logic.higher.crossed import Crossed2ModuleInstance, CrossedModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.ordered_exp import SCHEMES
from holonomy.logic.seeds import named_rng
from holonomy.paths import builtin_scenes_dir

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema", "id", "description", "instance", "seed", "dim", "fields", "map",
    "identities", "resolution", "scheme", "origin",
}
_FIELD_KEYS = {"kind", "amplitude", "order"}
_MAP_COMMON = {"kind", "warp", "reparam"}
_MAP_KEYS = {
    "affine": {"matrix", "offset"},
    "bigon": {"origin", "e1", "e2", "length", "height", "lobes", "bulge", "e3"},
    "fan": {"origin", "v0", "v1"},
    "bump-cube": {"base", "normal", "amp", "ms", "mt"},
    "bump-tesseract": {"base", "n1", "n2", "amp1", "amp2", "m1", "m2"},
    "extrude": {"base", "arity", "ignored"},
}
A_KINDS = {"zero": None, "constant": 0, "linear": 1, "polynomial": 2}
B_KINDS = ("zero", "curvature", "curvature+free", "free", "polynomial")
C_KINDS = ("zero", "two-curvature", "two-curvature+free", "polynomial")

Instance = Union[CrossedModuleInstance, Crossed2ModuleInstance]


@dataclass(frozen=True, eq=False)
class FieldSet:
    """Connection A with optional fake curvature B and fake 2-curvature C."""

    A: Form
    B: Optional[Form] = None
    C: Optional[Form] = None


@dataclass(frozen=True, eq=False)
class Scene:
    id: str
    description: str
    instance_id: str
    instance: Instance
    seed: int
    dim: int
    fields: FieldSet
    pmap: pm.ParamMap
    identities: Tuple[str, ...]
    resolution: Optional[int]
    scheme: str
    origin: np.ndarray  # G matrix of the lift origin
    source: str = ""
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def arity(self) -> int:
        return self.pmap.arity

    @property
    def crossed_module(self) -> CrossedModuleInstance:
        return as_crossed_module(self.instance)

    def with_seed(self, seed: int) -> "Scene":
        return build_scene(self.raw, self.source, seed=seed)

    def with_map(self, pmap: pm.ParamMap, suffix: str = "") -> "Scene":
        """Same fields and instance on another parameter map (composition pieces)."""
        return Scene(
            id=self.id + suffix, description=self.description, instance_id=self.instance_id,
            instance=self.instance, seed=self.seed, dim=self.dim, fields=self.fields, pmap=pmap,
            identities=self.identities, resolution=self.resolution, scheme=self.scheme,
            origin=self.origin, source=self.source, raw=self.raw,
        )

    def with_origin(self, origin: np.ndarray) -> "Scene":
        return Scene(
            id=self.id, description=self.description, instance_id=self.instance_id,
            instance=self.instance, seed=self.seed, dim=self.dim, fields=self.fields, pmap=self.pmap,
            identities=self.identities, resolution=self.resolution, scheme=self.scheme,
            origin=np.asarray(origin, dtype=complex), source=self.source, raw=self.raw,
        )


# =========================================================
# Small readers
# =========================================================

def _check_keys(source: str, where: str, data: Dict[str, Any], allowed: set) -> None:
    if not isinstance(data, dict):
        raise ConfigError(source, f"{where} must be an object", key=where)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(source, f"unknown key(s) in {where}: {', '.join(unknown)}", key=unknown[0])


def _vec(source: str, data: Dict[str, Any], key: str, dim: int, default=None) -> np.ndarray:
    raw = data.get(key, default)
    if raw is None:
        raise ConfigError(source, f"missing {key!r}", key=key)
    v = np.asarray(raw, dtype=float)
    if v.shape != (dim,):
        raise ConfigError(source, f"{key!r} must have {dim} entries", key=key)
    return v


def _num(source: str, data: Dict[str, Any], key: str, default: float, cast=float):
    try:
        return cast(data.get(key, default))
    except (TypeError, ValueError):
        raise ConfigError(source, f"{key!r} must be a number", key=key)


# =========================================================
# Parameter maps
# =========================================================

def build_map(source: str, data: Dict[str, Any], dim: int, rng_seed: int, path: str = "map") -> pm.ParamMap:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(source, f"{path} needs a 'kind'", key=path)
    kind = data["kind"]
    if kind not in _MAP_KEYS:
        raise ConfigError(source, f"unknown map kind {kind!r}", key=f"{path}.kind")
    _check_keys(source, path, data, _MAP_COMMON | _MAP_KEYS[kind])

    if kind == "affine":
        m = np.asarray(data.get("matrix"), dtype=float)
        if m.ndim != 2 or m.shape[0] != dim:
            raise ConfigError(source, f"matrix must be {dim} x k", key=f"{path}.matrix")
        out: pm.ParamMap = pm.Affine(m, _vec(source, data, "offset", dim, [0.0] * dim))
    elif kind == "bigon":
        out = pm.Bigon(
            _vec(source, data, "origin", dim, [0.0] * dim),
            _vec(source, data, "e1", dim),
            _vec(source, data, "e2", dim),
            length=_num(source, data, "length", 1.0),
            height=_num(source, data, "height", 0.4),
            lobes=_num(source, data, "lobes", 1, int),
            bulge=_num(source, data, "bulge", 0.0),
            e3=_vec(source, data, "e3", dim, [0.0] * dim),
        )
    elif kind == "fan":
        out = pm.Fan(_vec(source, data, "origin", dim, [0.0] * dim),
                     _vec(source, data, "v0", dim), _vec(source, data, "v1", dim))
    elif kind == "bump-cube":
        base = build_map(source, data.get("base"), dim, rng_seed, path + ".base")
        out = pm.BumpCube(base, _vec(source, data, "normal", dim), amp=_num(source, data, "amp", 0.3),
                          ms=_num(source, data, "ms", 1, int), mt=_num(source, data, "mt", 1, int))
    elif kind == "bump-tesseract":
        base = build_map(source, data.get("base"), dim, rng_seed, path + ".base")
        out = pm.BumpTesseract(base, _vec(source, data, "n1", dim), _vec(source, data, "n2", dim),
                               amp1=_num(source, data, "amp1", 0.3), amp2=_num(source, data, "amp2", 0.3),
                               m1=tuple(data.get("m1", (1, 1))), m2=tuple(data.get("m2", (1, 1))))
    else:  # extrude
        base = build_map(source, data.get("base"), dim, rng_seed, path + ".base")
        try:
            out = pm.Extrude(base, _num(source, data, "arity", base.arity + 1, int), data.get("ignored", [0]))
        except ValueError as e:
            raise ConfigError(source, str(e), key=f"{path}.ignored")

    if out.dim != dim:
        raise ConfigError(source, f"map dimension {out.dim} does not match dim {dim}", key=path)

    warp = data.get("warp")
    if warp is not None:
        _check_keys(source, f"{path}.warp", warp, {"style", "amp"})
        try:
            out = pm.Warp(out, style=warp.get("style", "trig"), amp=_num(source, warp, "amp", 0.1),
                          rng=named_rng(rng_seed, f"{path}/warp"))
        except ValueError as e:
            raise ConfigError(source, str(e), key=f"{path}.warp")
    eps = data.get("reparam")
    if eps is not None:
        try:
            out = pm.Reparam(out, eps)
        except (TypeError, ValueError) as e:
            raise ConfigError(source, str(e), key=f"{path}.reparam")
    return out


# =========================================================
# Fields
# =========================================================

def _field_entry(source: str, fields: Dict[str, Any], name: str, default: str) -> Dict[str, Any]:
    entry = fields.get(name, {"kind": default})
    if isinstance(entry, str):
        entry = {"kind": entry}
    _check_keys(source, f"fields.{name}", entry, _FIELD_KEYS)
    return entry


def build_connection(source: str, entry: Dict[str, Any], dim: int, inst: Instance, seed: int) -> Form:
    G = inst.G
    kind = entry.get("kind", "zero")
    if kind not in A_KINDS:
        raise ConfigError(source, f"unknown connection kind {kind!r}", key="fields.A.kind")
    if kind == "zero" or G.dim == 0:
        return ZeroForm(1, dim, G)
    return PolynomialForm.seeded(1, dim, G, named_rng(seed, "fields/A"),
                                 amplitude=_num(source, entry, "amplitude", 0.3),
                                 order=A_KINDS[kind])


def build_two_field(source: str, entry: Dict[str, Any], A: Form, inst: Instance, seed: int) -> Form:
    cm = as_crossed_module(inst)
    H = cm.H
    dim = A.dim
    kind = entry.get("kind", "zero")
    if kind not in B_KINDS:
        raise ConfigError(source, f"unknown 2-field kind {kind!r}", key="fields.B.kind")
    amp = _num(source, entry, "amplitude", 0.3)
    order = _num(source, entry, "order", 2, int)
    rng = named_rng(seed, "fields/B")

    if kind == "zero":
        return ZeroForm(2, dim, H)
    if kind == "polynomial":
        return PolynomialForm.seeded(2, dim, H, rng, amplitude=amp, order=order)

    kernel = cm.kernel_basis if cm.kernel_basis is not None else np.zeros((0, H.size, H.size), dtype=complex)
    if kind == "free":
        if kernel.shape[0] == 0:
            raise ConfigError(source, f"{inst.name} has no kernel directions for a free 2-form", key="fields.B.kind")
        return PolynomialForm.seeded(2, dim, H, rng, amplitude=amp, order=order, basis=kernel)

    if cm.tau_section is None:
        raise ConfigError(source, f"{inst.name} has no section to lift the curvature", key="fields.B.kind")
    lifted = MappedForm(CurvatureForm(A), cm.tau_section, H)
    if kind == "curvature":
        return lifted
    if kernel.shape[0] == 0:
        raise ConfigError(source, f"{inst.name} has no kernel directions for a free 2-form", key="fields.B.kind")
    return SumForm(lifted, PolynomialForm.seeded(2, dim, H, rng, amplitude=amp, order=order, basis=kernel))


def build_three_field(source: str, entry: Dict[str, Any], A: Form, B: Form, inst: Instance, seed: int) -> Form:
    if not isinstance(inst, Crossed2ModuleInstance):
        raise ConfigError(source, f"{inst.name} is not a crossed 2-module; C needs one", key="fields.C")
    L = inst.L
    dim = A.dim
    kind = entry.get("kind", "zero")
    if kind not in C_KINDS:
        raise ConfigError(source, f"unknown 3-field kind {kind!r}", key="fields.C.kind")
    amp = _num(source, entry, "amplitude", 0.3)
    order = _num(source, entry, "order", 2, int)
    rng = named_rng(seed, "fields/C")

    if kind == "zero":
        return ZeroForm(3, dim, L)
    # coefficients are read in the twisted coordinates of L
    if kind == "polynomial":
        twisted: Form = PolynomialForm.seeded(3, dim, L, rng, amplitude=amp, order=order)
    else:
        twisted = MappedForm(TwoCurvatureForm(A, B, inst.dact_H), inst.delta_section, L)
        if kind == "two-curvature+free":
            twisted = SumForm(twisted, PolynomialForm.seeded(3, dim, L, rng, amplitude=amp, order=order,
                                                             basis=inst.central_basis))
    return MappedForm(twisted, inst.from_twisted, L)


# =========================================================
# Scenes
# =========================================================

def build_scene(data: Dict[str, Any], source: str = "<memory>", seed: Optional[int] = None) -> Scene:
    """Validate a schema-1 document and build its fields and map."""
    _check_keys(source, "scene", data, _TOP_KEYS)
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(source, f"schema must be {SCHEMA_VERSION}", key="schema")
    for key in ("id", "instance", "dim", "map"):
        if key not in data:
            raise ConfigError(source, f"missing {key!r}", key=key)

    inst = get_instance(str(data["instance"]))
    dim = _num(source, data, "dim", 0, int)
    if dim not in (2, 3, 4):
        raise ConfigError(source, "dim must be 2, 3 or 4", key="dim")
    run_seed = int(seed) if seed is not None else _num(source, data, "seed", 0, int)

    scheme = data.get("scheme", "midpoint")
    if scheme not in SCHEMES:
        raise ConfigError(source, f"unknown scheme {scheme!r}", key="scheme")
    resolution = data.get("resolution")
    if resolution is not None:
        resolution = _num(source, data, "resolution", 0, int)
        if resolution < 4 or resolution % 4:
            raise ConfigError(source, "resolution must be a positive multiple of 4", key="resolution")

    pmap = build_map(source, data["map"], dim, run_seed)

    fields = data.get("fields", {})
    _check_keys(source, "fields", fields, {"A", "B", "C"})
    A = build_connection(source, _field_entry(source, fields, "A", "zero"), dim, inst, run_seed)
    B = build_two_field(source, _field_entry(source, fields, "B", "zero"), A, inst, run_seed) if "B" in fields else None
    C = None
    if "C" in fields:
        if B is None:
            raise ConfigError(source, "a 3-field needs a 2-field", key="fields.C")
        C = build_three_field(source, _field_entry(source, fields, "C", "zero"), A, B, inst, run_seed)

    G = inst.G
    origin = G.identity()
    if "origin" in data:
        c = np.asarray(data["origin"], dtype=float)
        if c.shape != (G.dim,):
            raise ConfigError(source, f"origin needs {G.dim} algebra coordinates", key="origin")
        origin = lg.expm(G.from_coords(c))

    ids = data.get("identities", [])
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise ConfigError(source, "identities must be a list of ids", key="identities")

    scene = Scene(
        id=str(data["id"]),
        description=str(data.get("description", "")),
        instance_id=str(data["instance"]),
        instance=inst,
        seed=run_seed,
        dim=dim,
        fields=FieldSet(A, B, C),
        pmap=pmap,
        identities=tuple(ids),
        resolution=resolution,
        scheme=scheme,
        origin=origin,
        source=source,
        raw=dict(data),
    )
    logger.debug("scene %s: instance=%s arity=%d scheme=%s", scene.id, scene.instance_id, pmap.arity, scheme)
    return scene


def load_scene(path: Union[str, Path], seed: Optional[int] = None) -> Scene:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(str(p), "scene file not found")
    except json.JSONDecodeError as e:
        raise ConfigError(str(p), f"invalid JSON: {e.msg} (line {e.lineno})")
    return build_scene(data, str(p), seed=seed)


def builtin_scene_ids() -> Tuple[str, ...]:
    d = builtin_scenes_dir()
    if not d.exists():
        return ()
    return tuple(sorted(p.stem for p in d.glob("*.json")))


def resolve_scene(ref: str, seed: Optional[int] = None) -> Scene:
    """A path to a scene file, or the id of a built-in scene."""
    p = Path(ref)
    if p.suffix == ".json" or p.exists():
        return load_scene(p, seed=seed)
    builtin = builtin_scenes_dir() / f"{ref}.json"
    if builtin.exists():
        return load_scene(builtin, seed=seed)
    raise ConfigError("scenes", f"no scene file or built-in scene named {ref!r}", key="scenes")


__all__ = [
    "SCHEMA_VERSION",
    "FieldSet",
    "Scene",
    "build_map",
    "build_connection",
    "build_two_field",
    "build_three_field",
    "build_scene",
    "load_scene",
    "builtin_scene_ids",
    "resolve_scene",
]
