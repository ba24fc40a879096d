"""Flat key-value run configuration (INI) with exact measure serialization."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from .bitspace import parse_seed
from .errors import InvalidParameter
from .measures import CustomSpec, Marginal, PeriodicSpec, SparseSpec, make_period_j, make_sparse

SCHEMA_VERSION = 1


def parse_marginal(text):
    try:
        p0, p1 = (Fraction(part.strip()) for part in text.split(":"))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameter(f"marginal must look like 'p0:p1', got {text!r}") from exc
    return Marginal(p0, p1)


def parse_marginals(text):
    return tuple(parse_marginal(t) for t in text.split(",") if t.strip())


def _fmt_marginals(ms):
    return ", ".join(str(m) for m in ms)


def measure_to_items(spec):
    if isinstance(spec, PeriodicSpec):
        items = [("variant", "periodic"), ("j", str(spec.period))]
        if spec != make_period_j(spec.period):
            items.append(("marginals", _fmt_marginals(spec.marginals)))
        return items
    if isinstance(spec, SparseSpec):
        return [("variant", "sparse"), ("n1", str(spec.n1))]
    if isinstance(spec, CustomSpec):
        return [("variant", "custom"), ("head", _fmt_marginals(spec.head)), ("tail", _fmt_marginals(spec.tail))]
    raise InvalidParameter(f"cannot serialize {spec!r}")


def measure_from_items(items):
    variant = items.get("variant", "periodic").strip()
    if variant == "periodic":
        if "marginals" in items:
            spec = PeriodicSpec(parse_marginals(items["marginals"]))
            if "j" in items and int(items["j"]) != spec.period:
                raise InvalidParameter(f"j={items['j']} disagrees with {spec.period} marginals")
            return spec
        return make_period_j(int(items.get("j", "3")))
    if variant == "sparse":
        return make_sparse(int(items.get("n1", "1")))
    if variant == "custom":
        return CustomSpec(parse_marginals(items.get("head", "")), parse_marginals(items["tail"]))
    raise InvalidParameter(f"unknown measure variant {variant!r}")


def _ints(text):
    return [int(t) for t in str(text).replace(" ", "").split(",") if t]


@dataclass
class RunConfig:
    measure: object = field(default_factory=lambda: make_period_j(3))
    master_seed: int = 20261018
    paths: int = 1000
    blocks: int = 100000
    thresholds: list = field(default_factory=lambda: [0, 5, 10, 20])
    horizons: list = field(default_factory=list)
    depth: int = 6
    cases: int = 500
    chain_cases: int = 200
    k: int = 12
    prefix: str = ""
    cap: int = 1 << 26
    k_blocks: int = 10
    j_min: int = 3
    j_max: int = 8
    out: str = ""

    _INT_KEYS = ("master_seed", "paths", "blocks", "depth", "cases", "chain_cases", "k", "cap", "k_blocks", "j_min", "j_max")
    _LIST_KEYS = ("thresholds", "horizons")

    def to_text(self):
        lines = ["[run]", f"schema_version = {SCHEMA_VERSION}"]
        for f in fields(self):
            if f.name == "measure":
                continue
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ", ".join(map(str, v))
            lines.append(f"{f.name} = {v}".rstrip())
        lines += ["", "[measure]"]
        lines += [f"{k} = {v}" for k, v in measure_to_items(self.measure)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        cp = configparser.ConfigParser(interpolation=None)
        cp.read_string(text)
        run = dict(cp["run"]) if cp.has_section("run") else {}
        version = int(run.pop("schema_version", SCHEMA_VERSION))
        if version != SCHEMA_VERSION:
            raise InvalidParameter(f"unsupported schema_version {version}")
        kwargs = {}
        names = {f.name for f in fields(cls)}
        for key, value in run.items():
            if key not in names or key == "measure":
                raise InvalidParameter(f"unknown config key {key!r}")
            if key == "master_seed":
                kwargs[key] = parse_seed(value)
            elif key in cls._INT_KEYS:
                kwargs[key] = int(value)
            elif key in cls._LIST_KEYS:
                kwargs[key] = _ints(value)
            else:
                kwargs[key] = value.strip()
        if cp.has_section("measure"):
            kwargs["measure"] = measure_from_items(dict(cp["measure"]))
        return cls(**kwargs)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    def updated(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
