"""Command-line front end.

Every failure ends with one line on stderr of the form
``error: <ErrorName>: <message>`` and a nonzero exit status (2 for invalid
configuration, 1 otherwise).
"""
from __future__ import annotations

import argparse
import logging
import random
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .assembly import SphereCellulation, assemble_sphere, triangulate_sphere
from .complexes.simplicial import SimplicialComplex, label_key
from .errors import ChoiceLengthMismatch, ConfigError, SpheresError
from .finite_field import prime_power
from .heffter import heffter_cellulation, heffter_report, heffter_triangulation, make_spec
from .verify import (count_distinct_sample, lower_bound_estimate, m_for, random_choices,
                     scaling_report, scaling_table, verify_sphere)

log = logging.getLogger("manyspheres")


@dataclass
class RunConfig:
    q: int = 5
    alpha: str = "auto"
    modulus: str | None = None
    m: int | None = None  # default q^3
    choices: str = "zeros"  # zeros | seed:K | ternary string
    verify: bool = False
    flip_budget: int = 1_000_000
    seed: int = 0
    out_dir: str = "out"
    verbose: int = 0

    def validate(self) -> None:
        if self.q % 4 != 1:
            raise ConfigError(f"q={self.q} is not 1 mod 4")
        if prime_power(self.q) is None:
            raise ConfigError(f"q={self.q} is not a prime power")
        if self.m is not None and self.m < 1:
            raise ConfigError(f"m={self.m} must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        if not (self.choices == "zeros" or self.choices.startswith("seed:")
                or set(self.choices) <= set("012")):
            raise ConfigError(f"bad choice source {self.choices!r}")

    @property
    def layers(self) -> int:
        return self.m if self.m is not None else m_for(self.q, "cubed")


def read_config(path) -> dict:
    """``key = value`` lines; blank lines and # comments are skipped."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _coerce(cfg: RunConfig, values: dict) -> RunConfig:
    types = {f.name: f.type for f in fields(RunConfig)}
    for k, v in values.items():
        if k not in types:
            raise ConfigError(f"unknown config key {k!r}")
        if v is None:
            continue
        t = types[k]
        try:
            if "bool" in t:
                v = v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes", "on")
            elif "int" in t:
                v = int(v)
        except ValueError as exc:
            raise ConfigError(f"{k}: {exc}") from exc
        setattr(cfg, k, v)
    return cfg


def resolve_choices(source: str, n: int) -> list[int]:
    """Choice vector from "zeros", "seed:K" or a ternary string (registry order, first digit first)."""
    if source == "zeros":
        return [0] * n
    if source.startswith("seed:"):
        return random_choices(n, random.Random(int(source[5:])))
    if len(source) != n:
        raise ChoiceLengthMismatch(f"ternary string has {len(source)} digits for {n} octahedra")
    return [int(c) for c in source]


def _spec(args):
    RunConfig(q=args.q).validate()
    return make_spec(args.q, args.alpha, args.modulus)


def _write(path, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


# -- subcommands -----------------------------------------------------------------------------

def cmd_heffter(args) -> int:
    spec = _spec(args)
    r = heffter_report(spec)
    print(f"q: {spec.q}")
    print(f"alpha: {spec.alpha}")
    print(f"modulus: {','.join(map(str, spec.field.modulus))}")
    print(f"f_vector: {' '.join(map(str, r.f_vector))}")
    print(f"genus: {r.genus}")
    print(f"neighborly: {str(r.neighborly).lower()}")
    print(f"orientable: {str(r.orientable).lower()}")
    if args.out:
        _write(args.out, heffter_cellulation(spec).to_text())
    if args.triangulation:
        _write(args.triangulation, heffter_triangulation(spec).to_text())
    return 0


def cmd_assemble(args) -> int:
    spec = _spec(args)
    m = args.m if args.m is not None else m_for(spec.q, "cubed")
    s = assemble_sphere(spec, m)
    _write(args.out, s.to_text())
    print(f"vertices: {s.n}")
    print(f"tetrahedra: {len(s.tets)}")
    print(f"octahedra: {len(s.octahedra)}")
    return 0


def cmd_triangulate(args) -> int:
    s = SphereCellulation.from_text(Path(args.infile).read_text())
    k = triangulate_sphere(s, resolve_choices(args.choices, len(s.octahedra)))
    _write(args.out, k.to_text())
    print(f"facets: {len(k.facets)}")
    return 0


def cmd_verify(args) -> int:
    k = SimplicialComplex.from_text(Path(args.infile).read_text())
    r = verify_sphere(k, args.flip_budget, args.seed)
    sys.stdout.write(r.to_text())
    return 0 if r.passed else 1


def cmd_count(args) -> int:
    s = SphereCellulation.from_text(Path(args.infile).read_text())
    est = count_distinct_sample(s, args.k, args.seed, args.base)
    print(f"samples: {est.k}")
    print(f"seed: {est.seed}")
    print(f"distinct: {est.distinct}")
    print(f"collisions: {len(est.collisions)}")
    for i, j, iso in est.collisions:
        print(f"collision {i} {j}: " + " ".join(f"{a}>{b}" for a, b in sorted(iso.items(), key=lambda kv: label_key(kv[0]))))
    print(f"log2_lower_bound: {est.log2_lower_bound:.3f}")
    return 0


def cmd_scaling(args) -> int:
    qs = [int(x) for x in args.q.split(",") if x]
    rows = scaling_report(qs, args.m_rule)
    sys.stdout.write(scaling_table(rows))
    return 0


def run_pipeline(cfg: RunConfig) -> int:
    """Build, triangulate and optionally verify; write all artifacts to cfg.out_dir."""
    cfg.validate()
    out = Path(cfg.out_dir)
    spec = make_spec(cfg.q, cfg.alpha, cfg.modulus)
    log.info("building q=%d m=%d", cfg.q, cfg.layers)
    _write(out / "heffter_cellulation.txt", heffter_cellulation(spec).to_text())
    _write(out / "heffter_triangulation.txt", heffter_triangulation(spec).to_text())
    s = assemble_sphere(spec, cfg.layers)
    _write(out / "sphere.txt", s.to_text())
    choices = resolve_choices(cfg.choices, len(s.octahedra))
    k = triangulate_sphere(s, choices)
    _write(out / "triangulation.txt", k.to_text())
    summary = [
        f"q: {spec.q}", f"alpha: {spec.alpha}", f"m: {cfg.layers}",
        f"vertices: {s.n}", f"octahedra: {len(s.octahedra)}", f"facets: {len(k.facets)}",
        f"choices: {''.join(map(str, choices))}",
        f"log2_lower_bound_base3: {lower_bound_estimate(s.n, len(s.octahedra), 3):.3f}",
    ]
    status = 0
    if cfg.verify:
        r = verify_sphere(k, cfg.flip_budget, cfg.seed)
        _write(out / "report.txt", r.to_text())
        summary.append(f"verified: {str(r.passed).lower()}")
        status = 0 if r.passed else 1
    _write(out / "summary.txt", "\n".join(summary) + "\n")
    sys.stdout.write((out / "summary.txt").read_text())
    return status


def cmd_run(args) -> int:
    cfg = RunConfig()
    if args.config:
        _coerce(cfg, read_config(args.config))
    given = {k: getattr(args, k) for k in ("q", "alpha", "modulus", "m", "choices", "flip_budget",
                                           "seed", "out_dir")}
    _coerce(cfg, {k: v for k, v in given.items() if v is not None})
    if args.verify:
        cfg.verify = True
    cfg.verbose = args.verbose
    return run_pipeline(cfg)


# -- parser ------------------------------------------------------------------------------------

def _field_args(p, required=True):
    p.add_argument("--q", type=int, required=required)
    p.add_argument("--alpha", default=None if not required else "auto")
    p.add_argument("--modulus", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="manyspheres", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("heffter", help="build and check the Heffter surface")
    _field_args(p)
    p.add_argument("--out", help="write the polygon cellulation here")
    p.add_argument("--triangulation", help="write the centred triangulation here")
    p.set_defaults(func=cmd_heffter)

    p = sub.add_parser("assemble", help="assemble the sphere cellulation")
    _field_args(p)
    p.add_argument("--m", type=int, default=None, help="layers (default q^3)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("triangulate", help="pick a triangulation of every octahedron")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--choices", default="zeros", help="zeros, seed:K or a ternary string")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_triangulate)

    p = sub.add_parser("verify", help="check that a facet list is a 3-sphere")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--flip-budget", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="sample triangulations and count distinct ones")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", type=int, choices=(2, 3), default=3)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("scaling", help="tabulate vertex and octahedron counts")
    p.add_argument("--q", default="5,9,13")
    p.add_argument("--m-rule", default="cubed", help="cubed or a fixed number of layers")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("run", help="whole pipeline into one output directory")
    p.add_argument("--config", help="file of key = value lines")
    p.add_argument("--q", type=int)
    p.add_argument("--alpha")
    p.add_argument("--modulus")
    p.add_argument("--m", type=int)
    p.add_argument("--choices")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--flip-budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (SpheresError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) and not isinstance(exc, SpheresError) else 1


if __name__ == "__main__":
    sys.exit(main())
