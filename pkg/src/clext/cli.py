"""Command-line front end.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for usage
or configuration errors.  Every command builds one report dict
``{command, params, checks, data}``; the json, csv and text renderings are all
produced from it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Optional

import numpy as np

from . import deform, susy
from .algebra import new_algebra
from .errors import ClextError
from .fock import (build_fock, casimir_matrices, h0_anticommutator, h0_matrix, h0_spectrum,
                   spectrum_matches_matrix, verify_defining_relations)
from .report import RelationReport, block_residual
from .reps import (classify_gdoa, classify_oracle, fock_exists, matching_rows, same_classification,
                   sample_row_alpha, table_report, table_rows)

DEFAULT_TOL = 1e-10
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# configuration


_OPTIONS = {
    # dest: (type, default)
    "lam": (int, None),
    "alpha": (str, None),
    "dim": (int, None),
    "tol": (float, None),
    "format": (str, "json"),
    "p": (int, None),
    "mu": (int, 0),
    "family": (str, None),
    "q": (float, None),
    "k": (float, None),
    "B": (float, 1.0),
    "b": (float, 1.0),
    "eta": (str, None),
    "xi": (float, 1.0),
    "phi": (float, 0.0),
    "c_const": (float, 1.0),
    "r_mu": (float, None),
    "alpha_hat": (float, 0.0),
    "k_max": (int, 1),
    "n0": (int, 0),
    "seed": (int, 0),
    "samples": (int, 20),
    "special": (bool, False),
}

_CONFIG_ALIASES = {"lambda": "lam", "c-const": "c_const", "r-mu": "r_mu", "alpha-hat": "alpha_hat",
                   "k-max": "k_max"}


def _float_list(text, what: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = text
    else:
        vals = [t for t in str(text).replace(" ", "").split(",") if t != ""]
    try:
        out = [float(v) for v in vals]
    except ValueError as exc:
        raise UsageError(f"--{what} expects comma-separated numbers: {exc}") from None
    if not all(math.isfinite(v) for v in out):
        raise UsageError(f"--{what} entries must be finite")
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common")
    g.add_argument("--lambda", dest="lam", type=int, help="order of the cyclic group (>= 2)")
    g.add_argument("--alpha", help="the lambda-1 free alphas, comma separated (use --alpha=-1,0 for negatives)")
    g.add_argument("--dim", type=int, help="truncation dimension (default 20*lambda)")
    g.add_argument("--tol", type=float, help=f"check tolerance (default {DEFAULT_TOL:g}, env CLEXT_TOL)")
    g.add_argument("--format", choices=("json", "csv", "text"))
    g.add_argument("--config", help="JSON file with option values; flags override it")
    v = p.add_argument_group("variant options")
    v.add_argument("--p", type=int, help="PSSQM order (lambda = p + 1)")
    v.add_argument("--mu", type=int)
    v.add_argument("--family")
    v.add_argument("--q", type=float)
    v.add_argument("--k", type=float)
    v.add_argument("--B", type=float)
    v.add_argument("--b", type=float)
    v.add_argument("--eta", help="PSSQM: comma-separated eta list; pseudo family one: a single value")
    v.add_argument("--xi", type=float)
    v.add_argument("--phi", type=float)
    v.add_argument("--c-const", dest="c_const", type=float)
    v.add_argument("--r-mu", dest="r_mu", type=float)
    v.add_argument("--alpha-hat", dest="alpha_hat", type=float)
    v.add_argument("--k-max", dest="k_max", type=int, help="number of spectrum periods beyond the first")
    v.add_argument("--n0", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--special", action="store_const", const=True, default=None,
                   help="pssqm: also build the square-root special case")


def _resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults < environment < config file < explicit flags."""
    cfg: dict[str, Any] = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in raw.items():
            key = _CONFIG_ALIASES.get(key, key.replace("-", "_"))
            if key not in _OPTIONS:
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = val
    out = {}
    for key, (typ, default) in _OPTIONS.items():
        val = getattr(ns, key, None)
        if val is None:
            val = cfg.get(key, default)
        if val is not None and typ in (int, float) and not isinstance(val, bool):
            try:
                val = typ(val)
            except (TypeError, ValueError):
                raise UsageError(f"option {key} must be {typ.__name__}") from None
        out[key] = val
    if out["tol"] is None:
        env = os.environ.get("CLEXT_TOL")
        try:
            out["tol"] = float(env) if env else DEFAULT_TOL
        except ValueError:
            raise UsageError(f"CLEXT_TOL={env!r} is not a number") from None
    if not out["tol"] > 0:
        raise UsageError("tolerance must be positive")
    if out["format"] not in ("json", "csv", "text"):
        raise UsageError(f"unknown format {out['format']!r}")
    return out


def _algebra(opts: dict, lam_default: Optional[int] = None):
    lam = opts["lam"]
    if lam is None and opts.get("p") is not None:
        lam = opts["p"] + 1
    if lam is None:
        lam = lam_default
    if lam is None:
        raise UsageError("--lambda is required")
    if lam < 2:
        raise UsageError(f"--lambda must be >= 2, got {lam}")
    if opts["p"] is not None and opts["p"] != lam - 1:
        raise UsageError(f"--p {opts['p']} is inconsistent with --lambda {lam}")
    if opts["alpha"] is None:
        raise UsageError("--alpha is required")
    alpha = _float_list(opts["alpha"], "alpha")
    if len(alpha) != lam - 1:
        raise UsageError(f"--alpha needs {lam - 1} values for lambda={lam}, got {len(alpha)}")
    params = new_algebra(lam, alpha)
    opts["lam"] = lam
    opts["alpha"] = params.alpha.tolist()
    if opts["dim"] is None:
        opts["dim"] = 20 * lam
    return params


# ---------------------------------------------------------------------------
# reports


def _clean(x):
    """Round floats to 12 significant digits and make everything JSON-safe."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}") + 0.0
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


def make_report(command: str, opts: dict, checks: RelationReport, data: Optional[dict] = None) -> dict:
    params = {k: v for k, v in opts.items() if v is not None and k != "format"}
    out = {"command": command, "params": params, "checks": [c.to_dict() for c in checks.checks]}
    if data is not None:
        out["data"] = data
    return _clean(out)


REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "params", "checks"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "params": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "tol", "pass"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": "number"},
                    "tol": {"type": "number"},
                    "pass": {"type": "boolean"},
                },
            },
        },
        "data": {"type": "object"},
    },
}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, dict) and "text" in v:
        return v["text"]
    if isinstance(v, (list, tuple)):
        return "(" + "; ".join(_fmt(x) for x in v) + ")" if v and isinstance(v[0], dict) \
            else "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    rows = (report.get("data") or {}).get("rows")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows:
            cols = list(rows[0].keys())
            w.writerow(cols)
            for r in rows:
                w.writerow([_fmt(r.get(c)) for c in cols])
        else:
            w.writerow(["name", "residual", "tol", "pass"])
            for c in report["checks"]:
                w.writerow([c["name"], _fmt(c["residual"]), _fmt(c["tol"]), c["pass"]])
        return buf.getvalue().rstrip("\n")
    lines = [f"command: {report['command']}"]
    lines += [f"  {k} = {_fmt(v)}" for k, v in report["params"].items()]
    for c in report["checks"]:
        flag = "PASS" if c["pass"] else "FAIL"
        lines.append(f"{flag}  {c['name']}  residual={_fmt(c['residual'])}  tol={_fmt(c['tol'])}")
    data = report.get("data") or {}
    for key, val in data.items():
        if key == "rows":
            continue
        lines.append(f"{key}: {_fmt(val) if not isinstance(val, (dict, list)) else json.dumps(val)}")
    if rows:
        cols = list(rows[0].keys())
        lines.append("  ".join(cols))
        lines += ["  ".join(_fmt(r.get(c)) for c in cols) for r in rows]
    return "\n".join(lines)


def report_passed(report: dict) -> bool:
    return all(c["pass"] for c in report["checks"])


# ---------------------------------------------------------------------------
# commands


def cmd_algebra_info(opts: dict) -> dict:
    params = _algebra(opts)
    rpt = RelationReport()
    rpt.add("sum alpha=0", abs(params.alpha.sum()), 1e-12)
    rpt.add("sum (-1)^mu gamma_mu=0", abs(np.sum((-1.0) ** np.arange(params.lam) * params.gamma)), 1e-12)
    data = params.to_dict()
    data["fock_exists"] = fock_exists(params)
    return make_report("algebra info", opts, rpt, data)


def cmd_classify(opts: dict) -> dict:
    params = _algebra(opts)
    lam = params.lam
    rpt = RelationReport()
    rows = []
    for n0 in range(lam):
        got = classify_gdoa(params, n0)
        oracle = classify_oracle(params, n0, 4 * lam)
        agree = same_classification(got, oracle)
        rpt.add(f"oracle agrees n0={n0}", 0.0 if agree else 1.0, 0.0)
        row = {"n0": n0, "type": got.label, "c": getattr(got, "c", None), "near_boundary": got.near_boundary}
        if lam in (2, 3, 4):
            match = matching_rows(lam, params.alpha[:-1], n0 % lam)
            row["table_row"] = match[0].label if match else "none"
            expect = got.label
            ok = (match[0].label == expect) if match else (expect == "none")
            rpt.add(f"table agrees n0={n0}", 0.0 if ok else 1.0, 0.0)
        rows.append(row)
    return make_report("classify", opts, rpt, {"rows": rows})


def _h0_spectrum(opts, params):
    rep = build_fock(params, opts["dim"])
    m = rep.interior()
    levels = h0_spectrum(params, max(opts["k_max"], (m - 1) // params.lam))
    energies = np.array([lv.energy for lv in levels])
    rpt = RelationReport()
    rpt.add("closed form=eigenvalues of H0", spectrum_matches_matrix(energies, h0_matrix(rep), m), opts["tol"])
    rpt.add("H0 anticommutator=N+1/2+gamma", block_residual(h0_anticommutator(rep), h0_matrix(rep), m),
            opts["tol"])
    shown = levels[: (opts["k_max"] + 1) * params.lam]
    return rpt, [lv.to_dict() for lv in shown]


def _spec_rows(levels, count):
    return [{"n": lv.n, "energy": lv.energy, "degeneracy_class": lv.degeneracy_class,
             "degeneracy": lv.degeneracy} for lv in levels[:count]]


def cmd_spectrum(opts: dict, variant: str) -> dict:
    tol = opts["tol"]
    if variant == "h0":
        params = _algebra(opts)
        rpt, rows = _h0_spectrum(opts, params)
        return make_report("spectrum h0", opts, rpt, {"rows": rows})
    if variant == "pssqm":
        params = _algebra(opts)
        spec = susy.pssqm_spectrum(params, opts["mu"], opts["k_max"])
        rep = build_fock(params, opts["dim"])
        real = susy.pssqm_build(rep, opts["mu"])
        rpt = spec.report
        m = rep.interior(params.lam + 2)
        n = min(m, len(spec.levels))
        diag = np.real(np.diag(real.H))[:n]
        rpt.add("closed form=H diagonal", float(np.max(np.abs(diag - [lv.energy for lv in spec.levels[:n]]))), tol)
        data = {"rows": _spec_rows(spec.levels, len(spec.levels)), "ground_energy": spec.ground_energy,
                "ground_degeneracy": spec.ground_degeneracy}
        return make_report("spectrum pssqm", opts, rpt, data)
    params = _algebra(opts, lam_default=3)
    rep = build_fock(params, opts["dim"])
    real = _pseudo(rep, opts) if variant == "pseudo" else _ossqm(rep, opts)
    spec = susy.realization_spectrum(real)
    rpt = RelationReport()
    m = rep.interior(rep.lam + 2)
    if variant == "ossqm":
        closed = susy.ossqm_h_closed_form(rep, real.mu)
        rpt.add("E0 formula", abs(spec.ground_energy - susy.ossqm_ground_energy(params, real.mu)), tol)
    else:
        closed = susy.pseudo_h_closed_form(rep, real.family, real.mu, real.r)
    rpt.add("H ansatz=closed form", block_residual(real.H, closed, m), tol)
    count = (opts["k_max"] + 1) * params.lam
    data = {"rows": _spec_rows(spec.levels, count), "ground_energy": spec.ground_energy,
            "ground_degeneracy": spec.ground_degeneracy}
    return make_report(f"spectrum {variant}", opts, rpt, data)


def cmd_fock_verify(opts: dict) -> dict:
    params = _algebra(opts)
    rep = build_fock(params, opts["dim"])
    rpt = RelationReport()
    rpt.extend(verify_defining_relations(rep, opts["tol"]))
    rpt.extend(casimir_matrices(rep, opts["tol"])[3])
    m = rep.interior()
    rpt.add("H0 forms agree", block_residual(h0_anticommutator(rep), h0_matrix(rep), m), opts["tol"])
    return make_report("fock verify", opts, rpt, {"interior": m})


def _eta_list(opts):
    return None if opts["eta"] is None else _float_list(opts["eta"], "eta")


def _pseudo(rep, opts):
    family = (opts["family"] or "one").lower()
    eta = None
    if opts["eta"] is not None:
        vals = _float_list(opts["eta"], "eta")
        if len(vals) != 1:
            raise UsageError("pseudo --eta takes a single value")
        eta = vals[0]
    return susy.pseudo_build(rep, family, opts["mu"], opts["c_const"], eta=eta, phi=opts["phi"],
                             r_mu=opts["r_mu"])


def _ossqm(rep, opts):
    return susy.ossqm_build(rep, opts["mu"], opts["xi"], opts["phi"])


def cmd_susy(opts: dict, variant: str) -> dict:
    tol = opts["tol"]
    if variant == "pssqm":
        params = _algebra(opts)
        rep = build_fock(params, opts["dim"])
        real = susy.pssqm_build(rep, opts["mu"], _eta_list(opts))
        rpt = susy.pssqm_verify(real, tol)
        r_mu2 = susy.pssqm_r_mu2(params, opts["mu"], _eta_list(opts))
        data = {"r": real.r.tolist(), "ground_energy": susy.pssqm_ground_energy(params, opts["mu"], r_mu2)}
        if opts["special"]:
            sc = susy.pssqm_special_case(rep, opts["mu"], max(tol, 1e-8))
            rpt.extend(sc.report, prefix="special: ")
        return make_report("susy pssqm", opts, rpt, data)
    params = _algebra(opts, lam_default=3)
    rep = build_fock(params, opts["dim"])
    if variant == "pseudo":
        real = _pseudo(rep, opts)
        rpt = susy.pseudo_verify(real, tol)
        rpt.extend(susy.pseudo_verify(susy.pseudo_mirror(real), tol), prefix="mirror: ")
        data = {"family": real.family, "r": real.r.tolist()}
        return make_report("susy pseudo", opts, rpt, data)
    real = _ossqm(rep, opts)
    rpt = susy.ossqm_verify(real, tol)
    data = {"r": real.r.tolist(), "ground_energy": susy.ossqm_ground_energy(params, real.mu)}
    return make_report("susy ossqm", opts, rpt, data)


def cmd_deform_verify(opts: dict) -> dict:
    family = (opts["family"] or "a").upper()
    q = opts["q"]
    if q is None:
        raise UsageError("--q is required")
    tol = opts["tol"]
    if family == "A":
        defa = deform.make_cv_algebra(q, opts["alpha_hat"])
        opts["lam"] = 2
    else:
        if opts["lam"] is None or opts["alpha"] is None:
            raise UsageError(f"family {family} needs --lambda and --alpha")
        params = _algebra(opts)
        defa = deform.make_deformed(family, params.lam, params.alpha, q, k=opts["k"], B=opts["B"], b=opts["b"])
    dim = opts["dim"] if opts["dim"] is not None else 20 * defa.lam
    opts["dim"] = dim
    drep = deform.build_deformed_fock(defa, dim)
    rpt = deform.verify_deformed(drep, tol)
    b1 = deform.beta_from_functional(defa, 1)
    b2 = deform.beta_from_functional(defa, 5)
    rpt.add("beta_def independent of n", float(np.max(np.abs(b1 - b2))), tol)
    if family == "A" and q != 1:
        n0 = opts["n0"]
        lam0 = 0.0
        rec = deform.cv_lambda_recursion(q, opts["alpha_hat"], n0, lam0, 40)
        closed = np.array([deform.cv_lambda_closed_form(q, opts["alpha_hat"], n0, lam0, n) for n in range(41)])
        rel = np.abs(closed - rec) / np.maximum(1.0, np.abs(rec))
        rpt.add("CV lambda_n closed form=recursion", float(rel.max()), tol)
    return make_report("deform verify", opts, rpt, defa.to_dict())


def cmd_tables(opts: dict, lam: int) -> dict:
    rows = table_rows(lam)
    rng = np.random.default_rng(opts["seed"])
    rpt = RelationReport()
    for row in rows:
        bad = 0
        for _ in range(opts["samples"]):
            free = sample_row_alpha(row, rng)
            params = new_algebra(lam, free)
            n0 = lam * int(rng.integers(0, 4)) + row.residue
            got = classify_gdoa(params, n0)
            ok = (getattr(got, "label", None) == row.label
                  and abs(got.c - row.casimir(free, n0)) <= 1e-9)
            bad += not ok
        rpt.add(f"{row.label} n0={row.n0_pattern(lam)} [{'; '.join(c.text for c in row.conditions)}]",
                bad, 0)
    opts["lam"] = lam
    return make_report(f"tables {lam}", opts, rpt, table_report(lam))


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clext", description="C_lambda-extended oscillator algebra toolkit")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    alg = sub.add_parser("algebra", help="parameter tables")
    alg_sub = alg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _add_common(alg_sub.add_parser("info", help="alpha, beta, gamma, beta_bar and Fock existence"))

    _add_common(sub.add_parser("classify", help="unirrep classification per n0 residue"))

    spec = sub.add_parser("spectrum", help="closed-form spectra")
    spec_sub = spec.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for v in ("h0", "pssqm", "pseudo", "ossqm"):
        _add_common(spec_sub.add_parser(v))

    fock = sub.add_parser("fock", help="Fock-space relation checks")
    fock_sub = fock.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _add_common(fock_sub.add_parser("verify"))

    sus = sub.add_parser("susy", help="build and verify a SUSY-type realization")
    sus_sub = sus.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for v in ("pssqm", "pseudo", "ossqm"):
        _add_common(sus_sub.add_parser(v))

    dfm = sub.add_parser("deform", help="deformed algebras")
    dfm_sub = dfm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _add_common(dfm_sub.add_parser("verify"))

    tab = sub.add_parser("tables", help="classification tables for lambda = 2, 3, 4")
    tab.add_argument("table_lambda", type=int, choices=(2, 3, 4))
    _add_common(tab)
    return parser


def run(argv=None) -> tuple[int, str, str]:
    """Run the CLI and return (exit code, stdout text, stderr text)."""
    try:
        ns = build_parser().parse_args(argv)
        opts = _resolve(ns)
        group, action = ns.group, getattr(ns, "action", None)
        if group == "algebra":
            report = cmd_algebra_info(opts)
        elif group == "classify":
            report = cmd_classify(opts)
        elif group == "spectrum":
            report = cmd_spectrum(opts, action)
        elif group == "fock":
            report = cmd_fock_verify(opts)
        elif group == "susy":
            report = cmd_susy(opts, action)
        elif group == "deform":
            report = cmd_deform_verify(opts)
        else:
            report = cmd_tables(opts, ns.table_lambda)
    except UsageError as exc:
        return EXIT_USAGE, "", f"usage error: {exc}"
    except ClextError as exc:
        return EXIT_USAGE, "", f"{type(exc).__name__}: {exc}"
    except SystemExit as exc:  # --help
        return (EXIT_OK if not exc.code else EXIT_USAGE), "", ""
    code = EXIT_OK if report_passed(report) else EXIT_FAIL
    return code, render(report, opts["format"]), ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
