"""Command line workbench: ``deform-kernel run <scenario>`` and ``deform-kernel verify <report>``."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import dgla as dg
from .artin import make_truncated, tensor
from .deligne import def_over_dual_numbers, lift_order_by_order, mc_check
from .exactlin import ComplexError, GradedComplex, RatMatrix, cohomology_dims, frac
from .geom import DivisorData, Resolution, StabilizationError, WindowOverflow, line_bundle_resolution, tjurina_number
from . import triples as tr

VERSION = "0.1.0"
EXIT_OK, EXIT_SCHEMA, EXIT_STABILIZATION, EXIT_VERIFY = 0, 2, 3, 4


class SchemaError(ValueError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer


class VerificationError(RuntimeError):
    pass


# -- serialization ------------------------------------------------------------------------


def rat(x) -> str:
    x = frac(x)
    return f"{x.numerator}/{x.denominator}"


def rats(v) -> list:
    return [rat(x) for x in v]


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def sha256(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("scenario.schema.json").read_text())


def validate(scenario) -> None:
    v = jsonschema.Draft202012Validator(load_schema())
    errs = sorted(v.iter_errors(scenario), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errs:
        # the deepest error usually names the offending field
        e = max(errs, key=lambda e: len(e.absolute_path))
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise SchemaError(f"{pointer}: {e.message}", pointer)


# -- scenario builders --------------------------------------------------------------------


def _complex(data: dict) -> GradedComplex:
    dims = {int(k): v for k, v in data["dims"].items()}
    ds = {}
    for k, m in data.get("d", {}).items():
        k = int(k)
        ds[k] = RatMatrix([[frac(x) for x in r] for r in m], dims.get(k, 0))
    return GradedComplex(dims, ds)


def build_algebra(kind: str, payload: dict):
    if kind == "dgla_explicit":
        if "preset" in payload:
            return dg.sl2()
        return dg.from_json(payload)
    E = _complex(payload["E"])
    H = dg.hom_complex(E)
    if kind == "hom_complex":
        return H
    s = [frac(x) for x in payload["s"]]
    if len(s) != E.dim(0):
        raise SchemaError("/payload/s: length must equal dim E^0", "/payload/s")
    return dg.cocone(H, s)


def build_resolution(payload: dict) -> Resolution:
    if "resolution" in payload:
        r = payload["resolution"]
        return Resolution(r["twists"], r.get("d", {}), r.get("s", []))
    return line_bundle_resolution(payload["d"], payload["sigma"])


def build_feasibility(payload: dict):
    space = payload["space"]
    D = payload.get("D", 4)
    if space == "A1":
        return tr.gamma_problem(payload["Z"], D), None
    if space == "P1_chart":
        return tr.eval_problem(payload["d"], payload["sigma"], D)
    return tr.zero_problem(), None


# -- tasks --------------------------------------------------------------------------------


def _dims(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def _stab(rep: tr.TIReport) -> dict:
    return {"window": rep.window,
            "checked": {str(w): dict(sorted(h.items())) for w, h in sorted(rep.stabilization["history"].items())}}


def task_algebra(task: str, L, scenario: dict) -> dict:
    if task == "axioms":
        rep = dg.check_axioms(L)
        out = {"ok": rep.ok, "violations": [{"identity": v["identity"], "witness": [list(map(str, w)) for w in v["witness"]]}
                                              for v in rep.violations]}
        if isinstance(L, dg.CoconeDGLA):
            out["cocone_sequence"] = {"exact": not dg.cocone_sequence_violations(L)}
        return out
    if task == "cohomology":
        return {"dims": _dims(cohomology_dims(L.complex()))}
    if task == "tangent":
        r = def_over_dual_numbers(L)
        return {"dim": r["dim"], "cycles": r["cycles"], "boundaries": r["boundaries"],
                "basis": [rats(v) for v in r["basis"]]}
    if task == "lift":
        base = scenario.get("base", {"vars": ["t"], "degree": 3})
        A = make_truncated(base["vars"], total_degree=base["degree"])
        T = tensor(L, A)
        x1 = [frac(x) for x in scenario["payload"]["lift"]["x1"]]
        if len(x1) != L.dim(1):
            raise SchemaError("/payload/lift/x1: length must equal dim L^1", "/payload/lift/x1")
        reps = lift_order_by_order(T, T.pure(1, x1, 0))
        last = reps[-1] if reps else None
        out = {"orders": [{"order": r.order, "lifted": r.lifted,
                           "obstruction": {k: rats(v) for k, v in sorted(r.obstruction.items())}} for r in reps]}
        if last is not None and last.lifted:
            out["solution"] = rats(last.x)
            out["mc"] = mc_check(T, last.x)["ok"]
        return out
    raise SchemaError(f"/tasks: task {task} does not apply to this kind", "/tasks")


def _ti_json(rep: tr.TIReport, with_les: bool) -> dict:
    out = {"window": rep.window,
           "T_triple": _dims(rep.T_triple), "T_pair": _dims(rep.T_pair), "H_F": _dims(rep.H_F),
           "H_K": _dims(rep.H_K), "Ext_FF": _dims(rep.H_Hom), "H_Theta": _dims(rep.H_Theta),
           "stabilization": _stab(rep)}
    if with_les:
        for key in ("les_forget", "les_top", "les_bottom"):
            les = getattr(rep, key)
            out[key] = {"exact": les.exact, "euler": les.euler_ok, "nodes": les.table()}
    return out


def task_triple(task: str, R: Resolution, window: int | None, cache: dict) -> dict:
    if task == "axioms":
        cert = tr.exactness_certificate(R)
        return {"resolution_exact": cert["ok"],
                "ranks": {c: _dims(cert[c]["ranks"]) for c in ("t", "s")},
                "errors": cert["t"]["errors"] + cert["s"]["errors"]}
    need_les = task in ("les", "forgetful") or cache.get("les")
    if "ti" not in cache or (need_les and cache["ti"].les_forget is None):
        cache["ti"] = tr.compute_TI(R, window, les=bool(need_les))
    rep = cache["ti"]
    if task == "cohomology":
        return {"dims": _dims(rep.T_triple), "window": rep.window}
    if task == "ti":
        return _ti_json(rep, False)
    if task == "les":
        out = _ti_json(rep, True)
        sigma_zero = not any(R.s)
        if sigma_zero:
            out["split"] = tr.split_check(rep)
        return out
    if task == "forgetful":
        return tr.forgetful_analysis(rep)
    if task in ("tangent", "descent"):
        r = tr.descent_tangent_check(R, rep.window)
        return {k: r[k] for k in sorted(r)}
    raise SchemaError(f"/tasks: task {task} does not apply to this kind", "/tasks")


def task_feasibility(payload: dict) -> dict:
    P, cand = build_feasibility(payload)
    cert = tr.bracket_extension_feasibility(P, cand)
    out = {"verdict": cert.verdict, "rows": cert.rows_used,
           "verified": tr.verify_certificate(P, cert)}
    if cert.verdict == "INFEASIBLE":
        out["contradiction"] = rat(cert.contradiction)
        out["combination"] = [{"label": [str(x) for x in lab], "row": tr.describe_row(P, lab), "multiplier": rat(c)}
                              for lab, c in cert.combination]
        out["forced"] = {str(k): rat(v) for k, v in sorted(cert.forced.items())}
        out["derived"] = list(cert.derived)
        out["derived_values"] = {str(k): rat(v) for k, v in sorted(cert.derived_values.items())}
        if cert.reduced_row is not None:
            lab, res = cert.reduced_row
            out["contradiction_row"] = {"label": [str(x) for x in lab], "residual": rat(res[()])}
    elif cert.witness is not None:
        out["witness"] = {str(k): rat(v) for k, v in sorted(cert.witness.items()) if v}
    return out


def task_affine(task: str, payload: dict) -> dict:
    vars_ = payload.get("vars", ["t"])
    if task == "cohomology":
        if len(vars_) == 1:
            f = payload["f"].replace(vars_[0], "t") if vars_[0] != "t" else payload["f"]
            Z = DivisorData(f, space="A1")
            return {"O_Z_dim": Z.O["t"].dim, "T1_Z": Z.T1_dim("t", payload.get("D", 8))}
        st = tjurina_number(payload["f"], tuple(vars_))
        return {"T1_Z": st.dims.get(0, 0), "window": st.window}
    if task == "feasibility":
        if len(vars_) != 1:
            raise SchemaError("/payload/vars: feasibility needs one variable", "/payload/vars")
        return task_feasibility({"space": "A1", "Z": payload["f"], "D": payload.get("D", 4)})
    raise SchemaError(f"/tasks: task {task} does not apply to this kind", "/tasks")


# -- run ----------------------------------------------------------------------------------


def normalize(scenario: dict, window: int | None = None) -> dict:
    sc = json.loads(canonical(scenario))
    if window is not None:
        sc["window"] = window
    return sc


def compute_report(sc: dict) -> tuple[dict, dict]:
    """The report body (deterministic) and per-task timings (not part of the report)."""
    kind, tasks = sc["kind"], sc["tasks"]
    results, timing = {}, {}
    cache: dict = {"les": any(t in ("les", "forgetful") for t in tasks)}
    L = R = None
    for task in tasks:
        t0 = time.perf_counter()
        if kind in ("dgla_explicit", "hom_complex", "cocone"):
            if L is None:
                L = build_algebra(kind, sc["payload"])
            results[task] = task_algebra(task, L, sc)
        elif kind in ("p1_triple", "descent"):
            if R is None:
                R = build_resolution(sc["payload"])
            results[task] = task_triple(task, R, sc.get("window"), cache)
        elif kind == "affine_divisor":
            results[task] = task_affine(task, sc["payload"])
        elif kind == "bracket_extension":
            results[task] = task_feasibility(sc["payload"])
        timing[task] = time.perf_counter() - t0
    body = {"tool": "deform-kernel", "version": VERSION, "scenario_hash": sha256(sc),
            "scenario": sc, "results": results}
    body["digest"] = sha256(body)
    return body, timing


def report_bytes(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode()


def cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "deform-kernel"


def atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_scenario(scenario: dict, window: int | None = None, use_cache: bool = True) -> tuple[bytes, dict, bool]:
    """Validate, consult the cache, compute.  Returns ``(report bytes, timing, cache hit)``."""
    validate(scenario)
    sc = normalize(scenario, window)
    key = sha256(sc)
    path = cache_dir() / f"{key}.json"
    if use_cache and path.exists():
        return path.read_bytes(), {}, True
    try:
        report, timing = compute_report(sc)
    except (ComplexError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc), "/payload") from exc
    data = report_bytes(report)
    if use_cache:
        atomic_write(path, data)
    return data, timing, False


# -- verify -------------------------------------------------------------------------------


def _check_les(name: str, les: dict) -> list[str]:
    bad = []
    nodes = les["nodes"]
    for k, n in enumerate(nodes):
        if n["rank_in"] != n["dim"] - n["rank_out"]:
            bad.append(f"{name}: segment at {n['node']} is not exact")
        elif n["exact"] != (n["rank_in"] == n["dim"] - n["rank_out"]):
            bad.append(f"{name}: exactness flag at {n['node']} disagrees with ranks")
        if n["rank_in"] > n["dim"] or n["rank_out"] > n["dim"] or min(n["rank_in"], n["rank_out"]) < 0:
            bad.append(f"{name}: rank out of range at {n['node']}")
        if k + 1 < len(nodes) and n["rank_out"] != nodes[k + 1]["rank_in"]:
            bad.append(f"{name}: map {n['node']} -> {nodes[k + 1]['node']} has inconsistent ranks")
    euler = sum((-1) ** k * n["dim"] for k, n in enumerate(nodes))
    if les.get("euler") and euler != 0:
        bad.append(f"{name}: alternating sum of dimensions is {euler}")
    return bad


def _check_stab(task: str, stab: dict) -> list[str]:
    w = stab["window"]
    hist = stab.get("checked", {})
    runs = [hist.get(str(k)) for k in (w, w + 1, w + 2)]
    if any(r is None for r in runs) or not runs[0] == runs[1] == runs[2]:
        return [f"{task}: stabilization certificate does not agree at windows {w}..{w + 2}"]
    return []


def _check_ti(task: str, res: dict) -> list[str]:
    bad = _check_stab(task, res["stabilization"])
    stable = res["stabilization"]["checked"].get(str(res["stabilization"]["window"]), {})
    for k, v in res["T_triple"].items():
        if stable.get(f"triple:{k}", 0) != v:
            bad.append(f"{task}: T^{k} differs from the stabilization record")
    for key in ("les_forget", "les_top", "les_bottom"):
        if key in res:
            bad += _check_les(f"{task}.{key}", res[key])
            by = {n["node"]: n["dim"] for n in res[key]["nodes"]}
            if key == "les_forget":
                for k, v in res["T_triple"].items():
                    if by.get(f"T_triple^{k}", v) != v:
                        bad.append(f"{task}.{key}: T_triple^{k} disagrees with the reported T^{k}")
    return bad


def verify_report(report: dict) -> list[str]:
    """Re-derive certificates, then check the digest.  Returns the list of failures."""
    bad = []
    sc = report.get("scenario", {})
    try:
        validate(sc)
    except SchemaError as e:
        return [f"scenario: {e}"]
    for task, res in report.get("results", {}).items():
        if task in ("ti", "les"):
            bad += _check_ti(task, res)
        elif task == "forgetful":
            ok = res["tangent_rank"] == res["T1_pair"] and res["obstruction_rank"] == res["T2_triple"]
            if ok != (res["tangent_surjective"] and res["obstruction_injective"]):
                bad.append("forgetful: verdict disagrees with ranks")
            if res["H1_F"] == 0 and (res["verdict"] == "smooth") != (ok and res["sequence_exact"]):
                bad.append("forgetful: smoothness verdict disagrees with ranks")
        elif task == "feasibility":
            bad += _check_feasibility(sc, res)
        elif task in ("tangent", "descent") and "descent_classes" in res:
            if res["descent_classes"] != res["objects_dim"] - res["equivalences_dim"]:
                bad.append(f"{task}: class count is not objects minus equivalences")
            if res["match"] != (res["T1"] == res["descent_classes"]):
                bad.append(f"{task}: match flag disagrees with the counts")
    body = {k: v for k, v in report.items() if k != "digest"}
    if report.get("scenario_hash") != sha256(sc):
        bad.append("scenario hash mismatch")
    if report.get("digest") != sha256(body):
        bad.append("digest mismatch: report was modified")
    return bad


def _check_feasibility(sc: dict, res: dict) -> list[str]:
    payload = sc["payload"]
    if sc["kind"] == "affine_divisor":
        payload = {"space": "A1", "Z": payload["f"], "D": payload.get("D", 4)}
    P, _ = build_feasibility(payload)
    labels = {tuple(str(x) for x in lab): lab for lab, _ in P.rows()}
    if res["verdict"] == "INFEASIBLE":
        try:
            comb = [(labels[tuple(c["label"])], Fraction(c["multiplier"])) for c in res["combination"]]
        except KeyError as e:
            return [f"feasibility: unknown constraint row {e}"]
        red = res.get("contradiction_row")
        if red is not None:
            lab = labels.get(tuple(red["label"]))
            if lab is None:
                return [f"feasibility: unknown constraint row {red['label']}"]
            red = (lab, {(): Fraction(red["residual"])})
        cert = tr.FeasibilityCertificate("INFEASIBLE", comb, Fraction(res["contradiction"]),
                                         {int(k): Fraction(v) for k, v in res.get("forced", {}).items()},
                                         derived_values={int(k): Fraction(v)
                                                         for k, v in res.get("derived_values", {}).items()},
                                         reduced_row=red)
    elif res["verdict"] == "FEASIBLE":
        cert = tr.FeasibilityCertificate("FEASIBLE", witness={int(k): Fraction(v) for k, v in res["witness"].items()})
    else:
        return []
    if not tr.verify_certificate(P, cert):
        return [f"feasibility: {res['verdict'].lower()} certificate does not re-verify"]
    return []


# -- text tables --------------------------------------------------------------------------


def format_table(report: dict, timing: dict | None = None) -> str:
    lines = [f"scenario {report['scenario'].get('name', report['scenario']['kind'])}  hash {report['scenario_hash'][:12]}"]
    for task, res in report["results"].items():
        lines.append(f"[{task}]" + (f"  ({timing[task]:.2f}s)" if timing and task in timing else ""))
        if "T_triple" in res:
            degs = sorted(res["T_triple"], key=int)
            lines.append("  " + "i".ljust(10) + "".join(d.rjust(5) for d in degs))
            for key in ("T_triple", "T_pair", "H_F", "H_K", "Ext_FF", "H_Theta"):
                lines.append("  " + key.ljust(10) + "".join(str(res[key][d]).rjust(5) for d in degs))
            for key in ("les_forget", "les_top", "les_bottom"):
                if key in res:
                    lines.append(f"  {key}: exact={res[key]['exact']} euler={res[key]['euler']}")
                    for n in res[key]["nodes"]:
                        if n["dim"]:
                            lines.append(f"    {n['node']:<18}dim {n['dim']:>3}  in {n['rank_in']:>3}  out {n['rank_out']:>3}")
        else:
            for k, v in res.items():
                lines.append(f"  {k}: {json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------------------


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="deform-kernel", description="Exact deformation-theory workbench.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("file")
    r.add_argument("--window", type=int)
    r.add_argument("--out", help="directory for the JSON report")
    r.add_argument("--no-cache", action="store_true")
    r.add_argument("--format", choices=["json", "table"], default="json")
    v = sub.add_parser("verify", help="re-check the certificates of a report")
    v.add_argument("file")
    args = ap.parse_args(argv)

    if args.cmd == "run":
        try:
            scenario = json.loads(Path(args.file).read_text())
        except json.JSONDecodeError as e:
            print(f"schema error: invalid JSON: {e}", file=sys.stderr)
            return EXIT_SCHEMA
        try:
            data, timing, hit = run_scenario(scenario, args.window, not args.no_cache)
        except SchemaError as e:
            print(f"schema error at {e.pointer or '/'}: {e}", file=sys.stderr)
            return EXIT_SCHEMA
        except (StabilizationError, WindowOverflow) as e:
            w = (args.window or scenario.get("window") or 10) + 8
            print(f"stabilization failure: {e}; try --window {w}", file=sys.stderr)
            return EXIT_STABILIZATION
        report = json.loads(data)
        if args.out:
            out = Path(args.out) / (Path(args.file).stem + ".report.json")
            atomic_write(out, data)
        if args.format == "table":
            sys.stdout.write(format_table(report, timing))
        elif not args.out:
            sys.stdout.write(data.decode())
        bad = verify_report(report)
        if bad:
            for b in bad:
                print(f"verification failure: {b}", file=sys.stderr)
            return EXIT_VERIFY
        return EXIT_OK

    try:
        report = json.loads(Path(args.file).read_text())
    except json.JSONDecodeError as e:
        print(f"schema error: invalid JSON: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    bad = verify_report(report)
    if bad:
        for b in bad:
            print(f"rejected: {b}", file=sys.stderr)
        return EXIT_VERIFY
    print("verified")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
