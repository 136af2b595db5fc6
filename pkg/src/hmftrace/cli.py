"""Command-line interface: config parsing, dispatch, and report emission.

Commands: field-info, zeta, transforms, trace, verify.  Reports are JSON
(complex numbers as {re, im} pairs) or CSV for tabulated sweeps; bodies are
deterministic for a fixed configuration.  Exit codes: 0 success, 1
computation error, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, HmftraceError
from .fields import (FieldEmbedding, embed, fundamental_unit,
                     make_quadratic_field, totally_positive_unit_element)
from .lattice import EmbeddedLattice, MultiplierGroup
from .transforms import TestFunction, g_of, get_suite, h_of
from .zeta import (ZetaContext, completed_xi, residue_at_one,
                   zeta_continued, zeta_direct)

_FIELD_RE = re.compile(r"^Q\(sqrt\s+(\d+)\)$")


@dataclass(frozen=True)
class RunConfig:
    """Run configuration; canonical text form is `key = value` per line."""

    field: str = "Q(sqrt 2)"
    psi_centers: tuple[float, ...] = (4.5, 4.5)
    psi_widths: tuple[float, ...] = (4.5, 4.5)
    psi_amplitude: float = 1.0
    form: str = "demo-eisenstein"
    s: complex = 0.8 + 0.0j
    m_u: int = 0
    m: int = 0
    A: float = 100.0
    quad_rtol: float = 1e-9
    zeta_tol: float = 1e-6
    output: str = "-"
    format: str = "json"

    def field_embedding(self) -> FieldEmbedding:
        mm = _FIELD_RE.match(self.field)
        if not mm:
            raise ConfigError(f"field descriptor {self.field!r} is not 'Q(sqrt D)'")
        return make_quadratic_field(int(mm.group(1)))

    def psi(self) -> TestFunction:
        return TestFunction(centers=self.psi_centers, widths=self.psi_widths,
                            amplitude=self.psi_amplitude)


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "")
    if not t.endswith("i") and not t.endswith("j"):
        return complex(float(t))
    body = t[:-1] + "j"
    try:
        return complex(body)
    except ValueError as exc:
        raise ConfigError(f"bad complex literal {text!r}") from exc


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


_SERIALIZERS = {
    "field": str,
    "psi_centers": lambda v: ", ".join(repr(x) for x in v),
    "psi_widths": lambda v: ", ".join(repr(x) for x in v),
    "psi_amplitude": repr,
    "form": str,
    "s": _fmt_complex,
    "m_u": str,
    "m": str,
    "A": repr,
    "quad_rtol": repr,
    "zeta_tol": repr,
    "output": str,
    "format": str,
}

_PARSERS = {
    "field": str,
    "psi_centers": _parse_floats,
    "psi_widths": _parse_floats,
    "psi_amplitude": float,
    "form": str,
    "s": _parse_complex,
    "m_u": int,
    "m": int,
    "A": float,
    "quad_rtol": float,
    "zeta_tol": float,
    "output": str,
    "format": str,
}


def serialize_config(cfg: RunConfig) -> str:
    lines = [f"{name} = {_SERIALIZERS[name](getattr(cfg, name))}"
             for name in _SERIALIZERS]
    return "\n".join(lines) + "\n"


def _validate(cfg: RunConfig, line_of: dict[str, int] | None = None) -> RunConfig:
    def fail(key, msg):
        raise ConfigError(f"key {key!r}: {msg}",
                          line=(line_of or {}).get(key))

    if cfg.A <= 0:
        fail("A", "must be positive")
    if cfg.quad_rtol <= 0 or cfg.zeta_tol <= 0:
        fail("quad_rtol", "tolerances must be positive")
    if len(cfg.psi_centers) != len(cfg.psi_widths):
        fail("psi_widths", "centers and widths must have the same length")
    if any(w <= 0 for w in cfg.psi_widths):
        fail("psi_widths", "widths must be positive")
    if any(c < 0 for c in cfg.psi_centers):
        fail("psi_centers", "centers must be nonnegative")
    if cfg.format not in ("json", "csv"):
        fail("format", "format must be json or csv")
    if cfg.form not in ("demo-eisenstein", "cusp-form-zero"):
        fail("form", "form must be demo-eisenstein or cusp-form-zero")
    if not _FIELD_RE.match(cfg.field):
        fail("field", "expected 'Q(sqrt D)' with integer D")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse `key = value` lines (strict keys, # comments, blank lines)."""
    values: dict[str, object] = {}
    line_of: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        try:
            values[key] = _PARSERS[key](val)
        except ConfigError:
            raise
        except Exception as exc:  # noqa: BLE001
            raise ConfigError(f"bad value for {key!r}: {exc}", line=lineno) from exc
        line_of[key] = lineno
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return _validate(cfg, line_of)


# -- report helpers ---------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    return obj


def _emit(cfg: RunConfig, body: str) -> None:
    if cfg.output in ("-", ""):
        sys.stdout.write(body)
        if not body.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(body)


def _json_body(payload) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2)


# -- commands ---------------------------------------------------------------------


def cmd_field_info(cfg: RunConfig) -> int:
    field = cfg.field_embedding()
    u0 = fundamental_unit(field)
    eps = totally_positive_unit_element(field)
    mult = MultiplierGroup.from_field(field)
    lattice = EmbeddedLattice.from_field(field)
    ctx = ZetaContext.from_field(field, (0,))
    payload = {
        "field": cfg.field,
        "discriminant": field.discriminant,
        "basis_matrix": [list(row) for row in field.basis_matrix],
        "fundamental_unit_coeffs": [str(c) for c in u0.coeffs],
        "fundamental_unit_embeddings": list(embed(field, u0)),
        "multiplier_generator": list(embed(field, eps)),
        "log_unit_matrix_det": mult.det_E,
        "covolume": lattice.covolume,
        "zeta_residue_at_one": residue_at_one(ctx),
    }
    _emit(cfg, _json_body(payload))
    return 0


def cmd_zeta(cfg: RunConfig, method: str) -> int:
    field = cfg.field_embedding()
    ctx = ZetaContext.from_field(field, (cfg.m,))
    s = cfg.s
    if method == "direct":
        value = zeta_direct(ctx, s, tol=cfg.zeta_tol)
        err = cfg.zeta_tol
    elif method == "continued":
        value = zeta_continued(ctx, s)
        err = 1e-10 * (1.0 + abs(value))
    elif method == "xi":
        value = completed_xi(ctx, s)
        err = 1e-11 * (1.0 + abs(value))
    elif method == "residue":
        value = complex(residue_at_one(ctx))
        err = 0.0
    else:
        raise ConfigError(f"unknown zeta method {method!r}")
    payload = {
        "field": cfg.field,
        "s": complex(s),
        "m": cfg.m,
        "method": method,
        "value_re": value.real,
        "value_im": value.imag,
        "error_estimate": err,
    }
    _emit(cfg, _json_body(payload))
    return 0


def cmd_transforms(cfg: RunConfig) -> int:
    psi = cfg.psi()
    suite = get_suite(psi, cfg.quad_rtol)
    rows = ["table,coord1,coord2,value"]
    u_lim = max(suite.u_support)
    grid = np.linspace(-u_lim, u_lim, 9)
    for u1 in grid:
        for u2 in grid:
            val = g_of(psi, (float(u1), float(u2)))
            rows.append(f"g,{u1!r},{u2!r},{val!r}")
    r_grid = np.linspace(0.0, 16.0, 9)
    for r1 in r_grid:
        for r2 in r_grid:
            val = h_of(psi, (float(r1), float(r2)))
            rows.append(f"h,{r1!r},{r2!r},{val!r}")
    _emit(cfg, "\n".join(rows) + "\n")
    return 0


def cmd_trace(cfg: RunConfig, which: str) -> int:
    from .trace import assemble_geometric_trace, demo_form, demo_inventory

    field = cfg.field_embedding()
    psi = cfg.psi()
    form = demo_form(field, s=cfg.s, cusp_form=(cfg.form == "cusp-form-zero"))
    inventory = demo_inventory(field, psi, form)
    report = assemble_geometric_trace(cfg.A, psi, form, inventory)
    names = {"elliptic": "elliptic", "mixed": "mixed", "parabolic": "parabolic",
             "hyp-par": "hyp_par"}
    if which == "all":
        payload = {
            "A": cfg.A,
            "s": complex(cfg.s),
            "total_re": report["total"].real,
            "total_im": report["total"].imag,
            "A_s_coeff": report["A_s_coeff"],
            "A_1ms_coeff": report["A_1ms_coeff"],
            "error_estimate": report["error_estimate"],
            "terms": {name: {
                "value_re": t.value.real,
                "value_im": t.value.imag,
                "A_s_coeff": (t.a_dependence or {}).get("A_s_coeff", 0.0),
                "A_1ms_coeff": (t.a_dependence or {}).get("A_1ms_coeff", 0.0),
                "error_estimate": t.error_estimate,
                "components": t.components,
            } for name, t in report["terms"].items()},
        }
    else:
        t = report["terms"][names[which]]
        payload = {
            "term": names[which],
            "A": cfg.A,
            "s": complex(cfg.s),
            "value_re": t.value.real,
            "value_im": t.value.imag,
            "A_s_coeff": (t.a_dependence or {}).get("A_s_coeff", 0.0),
            "A_1ms_coeff": (t.a_dependence or {}).get("A_1ms_coeff", 0.0),
            "components": t.components,
            "error_estimate": t.error_estimate,
        }
    _emit(cfg, _json_body(payload))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from .acceptance import run_all

    results = run_all(verbose=True)
    summary = {
        "passed": int(sum(r.passed for r in results)),
        "total": len(results),
        "criteria": [{"name": r.name, "passed": r.passed, "measured": r.measured,
                      "bound": r.bound, "seconds": round(r.seconds, 2)}
                     for r in results],
    }
    if cfg.output not in ("-", ""):
        _emit(cfg, _json_body(summary))
    ok = all(r.passed for r in results)
    print(f"verify: {summary['passed']}/{summary['total']} criteria passed")
    return 0 if ok else 1


def run(command: str, cfg: RunConfig, *, method: str = "continued",
        which: str = "all", psi_name: str = "default") -> int:
    """Dispatch a command against a validated configuration."""
    if psi_name != "default":
        raise ConfigError(f"unknown test-function preset {psi_name!r}")
    if command == "field-info":
        return cmd_field_info(cfg)
    if command == "zeta":
        return cmd_zeta(cfg, method)
    if command == "transforms":
        return cmd_transforms(cfg)
    if command == "trace":
        return cmd_trace(cfg, which)
    if command == "verify":
        return cmd_verify(cfg)
    raise ConfigError(f"unknown command {command!r}")


def _apply_thread_cap() -> None:
    cap = os.environ.get("HMFTRACE_THREADS")
    if not cap:
        return
    try:
        limit = max(1, int(cap))
    except ValueError:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=limit)
    except ImportError:
        pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmftrace",
        description="geometric-side trace terms over real quadratic fields")
    parser.add_argument("--config", help="path to a key = value configuration file")
    parser.add_argument("--output", help="report destination (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("field-info", help="field, unit and lattice constants")

    p_zeta = sub.add_parser("zeta", help="lattice zeta values")
    p_zeta.add_argument("--field")
    p_zeta.add_argument("--m", type=int)
    p_zeta.add_argument("--s")
    group = p_zeta.add_mutually_exclusive_group()
    group.add_argument("--direct", action="store_true")
    group.add_argument("--continued", action="store_true")
    group.add_argument("--xi", action="store_true")
    group.add_argument("--residue", action="store_true")

    p_tr = sub.add_parser("transforms", help="CSV tables of g and h")
    p_tr.add_argument("--psi", default="default")

    p_trace = sub.add_parser("trace", help="trace contribution terms")
    p_trace.add_argument("term", nargs="?", default="all",
                         choices=["elliptic", "mixed", "parabolic", "hyp-par", "all"])
    p_trace.add_argument("--field")
    p_trace.add_argument("--A", type=float)
    p_trace.add_argument("--form")
    p_trace.add_argument("--psi", default=None)
    p_trace.add_argument("--s")

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = RunConfig()
        overrides = {}
        for key in ("field", "m", "s", "A", "form", "output"):
            val = getattr(args, key, None)
            if val is not None:
                if key == "s":
                    val = _parse_complex(val)
                overrides[key] = val
        if overrides:
            cfg = _validate(dataclasses.replace(cfg, **overrides))
        method = "continued"
        for name in ("direct", "continued", "xi", "residue"):
            if getattr(args, name, False):
                method = name
        which = getattr(args, "term", "all")
        psi_name = getattr(args, "psi", None) or "default"
        return run(args.command, cfg, method=method, which=which,
                   psi_name=psi_name)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HmftraceError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
