"""``rm-theta``: JSON-in/JSON-out batch front end.

Every command reads a job (``--job file.json``, optionally overridden by
flags), validates it against the shipped schema, runs, and writes

    {"command": ..., "version": ..., "config": <resolved job>, "result": ...}

with sorted keys.  Wall-clock timings go to ``<out>.timing.json`` so the main
output stays byte-identical across runs.  Exit status: 0 ok, 2 invalid job,
3 mathematical error (the error class name is reported on stderr).
"""
from __future__ import annotations

import json
import math
import os
import random
import sys
import tempfile
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import click
import jsonschema
import numpy as np
from sympy import isprime, nextprime

from . import __version__
from .characters import (
    MultiplicativeCharacter,
    gauss_sum,
    quadratic_character,
    trivial_character,
)
from .concordance import HeckeDataset, match
from .curves import HyperellipticCurve, euler_factor, rm_split_check
from .errors import BadReduction, RmThetaError
from .lattices import GlobalLattice, adapted_lattice
from .local_fields import LocalFieldDesc, teichmuller_unit_group
from .local_zeta import ramified_epsilon, ramified_lfactor, ramified_zeta_series
from .theta import HarmonicWeight, coefficient_report, theta_coefficients


class JobError(Exception):
    """The job is malformed; maps to exit status 2."""


# ---------------------------------------------------------------------------
# input helpers

def _schema() -> dict:
    text = resources.files("rm_theta").joinpath("schemas/job.schema.json").read_text()
    return json.loads(text)


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise JobError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobError(f"{path} is not valid JSON: {exc}") from exc


def _load_ref(value: Any, base: Path) -> Any:
    """Inline objects pass through; strings are JSON files relative to ``base``."""
    if isinstance(value, str):
        return _read_json((base / value) if not os.path.isabs(value) else Path(value))
    return value


def parse_primes(spec) -> list[int]:
    if isinstance(spec, str):
        lo, hi = (int(t) for t in spec.split(".."))
        candidates = range(lo, hi + 1)
    else:
        candidates = spec
    return sorted({int(p) for p in candidates if isprime(int(p))})


def _complex(v) -> complex:
    if isinstance(v, dict):
        return complex(v["re"], v.get("im", 0.0))
    return complex(v)


def _enc_complex(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _element(value):
    if isinstance(value, list):
        return (Fraction(value[0]), Fraction(value[1]))
    return Fraction(value)


def _pi_value(v):
    if v is None:
        return Fraction(0)
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    m, k = v
    return Fraction(k, m)


def _character(field: LocalFieldDesc, spec, pi_value) -> MultiplicativeCharacter:
    pi = _pi_value(pi_value)
    if spec == "quadratic":
        return quadratic_character(field, pi)
    if spec == "trivial":
        return trivial_character(field, pi)
    obj = dict(spec)
    obj["field"] = field.to_json()
    if pi_value is not None:
        obj["pi_value"] = pi_value
    return MultiplicativeCharacter.from_json(obj)


def _field(cfg: dict) -> LocalFieldDesc:
    return LocalFieldDesc.from_json(cfg["field"])


# ---------------------------------------------------------------------------
# command runners; each returns (result, extra timing data)

def run_local_field(cfg: dict) -> dict:
    F = _field(cfg)
    out: dict = {"field": F.to_json(), "e": F.e, "f": F.f, "q": F.q, "name": str(F)}
    elems = []
    for raw in cfg.get("elements", []):
        x = F.coerce(_element(raw))
        row = {"input": raw, "valuation": None if x.is_zero() else x.valuation}
        if not x.is_zero():
            row["digits"] = [list(d) if isinstance(d, tuple) else d for d in x.digits()]
        elems.append(row)
    out["elements"] = elems
    out["unit_groups"] = [
        {"level": c, "orders": list(G.orders), "order": G.order}
        for c in cfg.get("unit_group_levels", [])
        for G in [teichmuller_unit_group(F, c)]
    ]
    n = cfg.get("self_check", 0)
    if n:
        rng = random.Random(cfg["seed"])
        bound = F.p ** 4
        passed = 0
        for _ in range(n):
            a = F.element(rng.randint(1, bound), rng.randint(0, bound) if F.kind != "base" else 0)
            b = F.element(rng.randint(1, bound), rng.randint(0, bound) if F.kind != "base" else 0)
            if (a * b) / b == a and (a + b) - b == a and a * a.inverse() == F.one():
                passed += 1
        out["self_check"] = {"samples": n, "passed": passed}
    return out


def run_character(cfg: dict) -> dict:
    F = _field(cfg)
    chi = _character(F, cfg["char"], cfg.get("pi_value"))
    out = {"character": chi.to_json(), "conductor": chi.conductor_exponent, "sign": chi.sign()}
    if chi.conductor_exponent:
        G = gauss_sum(chi)
        out["gauss_sum"] = _enc_complex(G)
        out["gauss_abs2"] = abs(G) ** 2
        out["q_pow_c"] = F.q ** chi.conductor_exponent
    return out


def run_zeta(cfg: dict) -> dict:
    F = _field(cfg)
    chi = _character(F, cfg["char"], cfg.get("pi_value"))
    s = _complex(cfg["s"])
    series = ramified_zeta_series(chi, s, cfg["terms"], cfg["normalization"])
    out = {
        "partial_sum": _enc_complex(series.partial_sum),
        "closed_form": _enc_complex(series.closed_form),
        "tail_bound": series.tail_bound,
        "ratio": _enc_complex(series.ratio),
        "terms": series.terms,
        "normalization": series.normalization,
        "l_factor_at_s": _enc_complex(ramified_lfactor(chi)(s)),
        "epsilon": _enc_complex(ramified_epsilon(chi, None, s, include_gauss=cfg["include_gauss"])),
        "epsilon_simplified": _enc_complex(ramified_epsilon(chi, None, s, include_gauss=False)),
    }
    return out


def run_test_vector(cfg: dict) -> dict:
    F = _field(cfg)
    L = adapted_lattice(F, cfg["shape"])
    members = [L.contains([_element(x) for x in v]) for v in cfg.get("vectors", [])]
    stab = [L.stabilizes([[_element(x) for x in row] for row in g]) for g in cfg.get("matrices", [])]
    return {"lattice": L.to_json(), "members": members, "stabilizes": stab}


def _lattice(obj) -> GlobalLattice:
    if obj == {"standard": 4}:
        return GlobalLattice.standard(4)
    return GlobalLattice.from_json(obj)


def run_theta(cfg: dict) -> dict:
    L = _lattice(cfg["lattice"])
    kw = {"budget": cfg["budget"]} if "budget" in cfg else {}
    table = theta_coefficients(L, HarmonicWeight(cfg["weight"]), cfg["trace_bound"], **kw)
    out = {"table": table.to_json()}
    if cfg["report"]:
        out["report"] = coefficient_report(table)
    return out


def _curve(cfg: dict) -> HyperellipticCurve:
    obj = dict(cfg["curve"])
    if "rm_disc" in cfg:
        obj["rm_disc"] = cfg["rm_disc"]
    return HyperellipticCurve.from_json(obj)


def run_euler_factors(cfg: dict) -> dict:
    C = _curve(cfg)
    rows = []
    for p in parse_primes(cfg["primes"]):
        try:
            E = euler_factor(C, p)
        except BadReduction:
            rows.append({"p": p, "skipped": "BadReduction"})
            continue
        row = {"p": p, "coeffs": list(E.coeffs), "weil_defect": E.weil_defect()}
        if C.rm_disc is not None:
            w = rm_split_check(E, C.rm_disc)
            row["witness"] = None if w is None else w.to_json()
        rows.append(row)
    return {"curve": C.to_json(), "factors": rows}


def run_match(cfg: dict) -> dict:
    C = HyperellipticCurve.from_json(cfg["curve"])
    data = HeckeDataset.from_json(cfg["hecke"])
    return match(C, data, parse_primes(cfg["primes"])).to_json()


def _probe_once(target: str, size: int) -> None:
    if target == "zeta":
        F = LocalFieldDesc.from_json({"p": 3})
        ramified_zeta_series(quadratic_character(F), 2.0, size)
    elif target == "theta-coeffs":
        theta_coefficients(GlobalLattice.standard(4), HarmonicWeight("det"), size)
    else:
        C = HyperellipticCurve((1, 0, 0, 0, 0, 1), 5, "x^5+1")
        p = size if isprime(size) and size > 5 else nextprime(max(size, 5))
        euler_factor(C, p)


def run_complexity_probe(cfg: dict) -> tuple[dict, dict]:
    sizes = cfg["sizes"]
    if sizes != sorted(sizes):
        raise JobError("sizes must be ascending")
    rows = []
    for n in sizes:
        best = math.inf
        for _ in range(cfg["repeats"]):
            t0 = time.perf_counter()
            _probe_once(cfg["target"], n)
            best = min(best, time.perf_counter() - t0)
        rows.append({"size": n, "seconds": best})
    slope = None
    pts = [(math.log(r["size"]), math.log(r["seconds"])) for r in rows if r["seconds"] > 0]
    if len(pts) >= 2 and len({x for x, _ in pts}) >= 2:
        slope = float(np.polyfit([x for x, _ in pts], [y for _, y in pts], 1)[0])
    result = {"target": cfg["target"], "sizes": sizes,
              "note": "timings are informational and live in the timing sidecar"}
    return result, {"probe": rows, "loglog_slope": slope}


DEFAULTS: dict[str, dict] = {
    "zeta": {"terms": 200, "normalization": "paper", "include_gauss": True},
    "theta-coeffs": {"weight": "det", "report": False},
    "complexity-probe": {"repeats": 1},
    "local-field": {"self_check": 0},
}

RUNNERS: dict[str, Callable] = {
    "local-field": run_local_field,
    "character": run_character,
    "zeta": run_zeta,
    "test-vector": run_test_vector,
    "theta-coeffs": run_theta,
    "euler-factors": run_euler_factors,
    "match": run_match,
    "complexity-probe": run_complexity_probe,
}

FILE_KEYS = ("lattice", "curve", "hecke")


def resolve_config(command: str, job: dict, overrides: dict, seed: int | None,
                   base: Path) -> dict:
    if not isinstance(job, dict):
        raise JobError("a job must be a JSON object")
    cfg = dict(DEFAULTS.get(command, {}))
    cfg.update(job)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg.get("command", command) != command:
        raise JobError(f"job is for {cfg['command']!r}, not {command!r}")
    cfg["command"] = command
    if seed is not None:
        cfg["seed"] = seed
    cfg.setdefault("seed", 0)
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        raise JobError(f"job does not match the schema: {exc.message}") from exc
    for key in FILE_KEYS:
        if key in cfg:
            cfg[key] = _load_ref(cfg[key], base)
    if "field" in cfg:
        cfg["field"] = LocalFieldDesc.from_json(cfg["field"]).to_json()
    return cfg


def run(command: str, cfg: dict) -> tuple[dict, dict]:
    t0 = time.perf_counter()
    res = RUNNERS[command](cfg)
    extra: dict = {}
    if isinstance(res, tuple):
        res, extra = res
    timing = {"command": command, "seconds": time.perf_counter() - t0, **extra}
    doc = {"command": command, "version": __version__, "config": cfg, "result": res}
    return doc, timing


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute(command: str, job_path: str | None, out: str | None, seed: int | None,
            overrides: dict) -> int:
    try:
        if job_path:
            base = Path(job_path).resolve().parent
            job = _read_json(Path(job_path))
        else:
            base, job = Path.cwd(), {}
        cfg = resolve_config(command, job, overrides, seed, base)
        doc, timing = run(command, cfg)
        text = dumps(doc)
    except JobError as exc:
        click.echo(json.dumps({"error": "JobError", "message": str(exc)}), err=True)
        return 2
    except RmThetaError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return 3
    except (ValueError, KeyError, TypeError) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return 2
    if out:
        write_atomic(Path(out), text)
        write_atomic(Path(out + ".timing.json"), dumps(timing))
    else:
        click.echo(text, nl=False)
        click.echo(dumps(timing), err=True, nl=False)
    return 0


# ---------------------------------------------------------------------------
# click wiring

def _common(fn):
    fn = click.option("--seed", type=int, default=None, help="Seed for randomized sampling.")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False), default=None,
                      help="Output file (stdout when omitted).")(fn)
    fn = click.option("--job", "job_path", type=click.Path(dir_okay=False), default=None,
                      help="Job JSON file.")(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="rm-theta")
def cli():
    """Local factors, theta coefficients and Euler-factor concordance."""


def _simple(name: str, help_text: str):
    @cli.command(name, help=help_text)
    @_common
    def cmd(job_path, out, seed):
        sys.exit(execute(name, job_path, out, seed, {}))
    return cmd


_simple("local-field", "Valuations, digits and unit groups in a local field.")
_simple("character", "Conductor, sign and Gauss sum of a multiplicative character.")
_simple("test-vector", "Membership and stabilizer checks for an adapted lattice.")


@cli.command("zeta", help="Reduced ramified zeta series, L-factor and epsilon factor.")
@_common
@click.option("--s", "s", type=float, default=None)
@click.option("--terms", type=int, default=None)
@click.option("--normalization", type=click.Choice(["paper", "unshifted"]), default=None)
def zeta_cmd(job_path, out, seed, s, terms, normalization):
    sys.exit(execute("zeta", job_path, out, seed,
                     {"s": s, "terms": terms, "normalization": normalization}))


@cli.command("theta-coeffs", help="Theta-series Fourier coefficients a(T) up to a trace bound.")
@_common
@click.option("--lattice", default=None, help="Lattice JSON file.")
@click.option("--weight", type=click.Choice(["one", "det"]), default=None)
@click.option("--trace-bound", type=int, default=None)
@click.option("--report/--no-report", default=None)
def theta_cmd(job_path, out, seed, lattice, weight, trace_bound, report):
    sys.exit(execute("theta-coeffs", job_path, out, seed,
                     {"lattice": lattice, "weight": weight, "trace_bound": trace_bound,
                      "report": report}))


@cli.command("euler-factors", help="Euler factors of a genus-2 curve at a range of primes.")
@_common
@click.option("--curve", default=None, help="Curve JSON file.")
@click.option("--primes", default=None, help="Prime range such as 3..97.")
def euler_cmd(job_path, out, seed, curve, primes):
    sys.exit(execute("euler-factors", job_path, out, seed, {"curve": curve, "primes": primes}))


@cli.command("match", help="Compare curve and Hecke-side Euler factors prime by prime.")
@_common
@click.option("--curve", default=None, help="Curve JSON file.")
@click.option("--hecke", default=None, help="Hecke eigenvalue JSON file.")
@click.option("--primes", default=None, help="Prime range such as 3..97.")
def match_cmd(job_path, out, seed, curve, hecke, primes):
    sys.exit(execute("match", job_path, out, seed,
                     {"curve": curve, "hecke": hecke, "primes": primes}))


@cli.command("complexity-probe", help="Wall-time scaling of a command over ascending sizes.")
@_common
@click.option("--target", type=click.Choice(["zeta", "theta-coeffs", "euler-factors"]), default=None)
@click.option("--sizes", default=None, help="Comma-separated ascending sizes.")
def probe_cmd(job_path, out, seed, target, sizes):
    parsed = None
    if sizes is not None:
        try:
            parsed = [int(t) for t in sizes.split(",")]
        except ValueError:
            click.echo(json.dumps({"error": "JobError", "message": f"bad sizes {sizes!r}"}), err=True)
            sys.exit(2)
    sys.exit(execute("complexity-probe", job_path, out, seed, {"target": target, "sizes": parsed}))


def main(argv=None):
    cli.main(args=argv, prog_name="rm-theta")


if __name__ == "__main__":
    main()
