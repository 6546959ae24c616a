"""Command-line front end: ``quasiq <command> [options]``.

Exit status is 0 on success, 1 when a verification fails (the witness is
printed) and 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from math import prod
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import QuasiqError
from .group import AbelianGroup, CocycleData, PhiTable, phi_tilde_eval, system_from_json, verify_cocycle

SCHEMA = "quasiq/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
AUTO_GROUP_BOUND = 32
AUTO_DIM_BOUND = 128


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    group: AbelianGroup
    cocycle: CocycleData
    rank: int | None = None
    up_to_perm: bool = False
    mode: str = "auto"
    seed: int | None = None
    samples: int = 10000
    dim_limit: int | None = None
    fmt: str = "text"
    out: Path | None = None
    extra: dict = field(default_factory=dict)

    @property
    def system(self) -> dict:
        d = {"schema": SCHEMA, "moduli": list(self.group.moduli)}
        d.update(self.cocycle.to_json())
        return d


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _indexed(items: Sequence[str], arity: int, flag: str) -> list[dict]:
    """Parse ``s:t=v`` (or ``r:s:t=v``) entries, 1-based, into schema dicts."""
    keys = ("s", "t") if arity == 2 else ("r", "s", "t")
    out = []
    for item in items:
        for part in item.split(","):
            if not part:
                continue
            try:
                lhs, v = part.split("=")
                idx = [int(t) for t in lhs.split(":")]
                val = int(v)
            except ValueError:
                raise UsageError(f"{flag}: cannot parse {part!r}") from None
            if len(idx) != arity:
                raise UsageError(f"{flag}: {part!r} needs {arity} indices")
            out.append(dict(zip(keys, idx), v=val))
    return out


def system_document(args: argparse.Namespace) -> dict:
    """The (group, cocycle) JSON document described by --config and flags."""
    doc: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        if doc.get("schema", SCHEMA) != SCHEMA:
            raise UsageError(f"unsupported schema {doc.get('schema')!r}")
    if args.group is not None:
        doc["moduli"] = _int_list(args.group, "--group")
    if "moduli" not in doc:
        raise UsageError("a group is required (--group or --config)")
    if args.a is not None:
        doc["a"] = _int_list(args.a, "--a")
    if args.a2:
        doc["a2"] = _indexed(args.a2, 2, "--a2")
    if args.a3:
        doc["a3"] = _indexed(args.a3, 3, "--a3")
    return doc


def make_config(args: argparse.Namespace) -> RunConfig:
    G, c = system_from_json(system_document(args))
    out = Path(args.out) if getattr(args, "out", None) else None
    if out is not None and args.config and out.resolve() == Path(args.config).resolve():
        raise UsageError("--out would overwrite the input config")
    return RunConfig(
        command=args.command,
        group=G,
        cocycle=c,
        rank=getattr(args, "rank", None),
        up_to_perm=getattr(args, "up_to_perm", False),
        mode=getattr(args, "mode", "auto"),
        seed=getattr(args, "seed", None),
        samples=getattr(args, "samples", 10000),
        dim_limit=getattr(args, "dim_limit", None),
        fmt="json" if args.json else "text",
        out=out,
    )


def apply_thread_cap(env: dict | None = None) -> int | None:
    """Honour QUASIQ_THREADS as an upper bound on compiled-kernel threads."""
    env = os.environ if env is None else env
    raw = env.get("QUASIQ_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"QUASIQ_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"QUASIQ_THREADS must be a positive integer, got {raw!r}")
    import numba

    n = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n


# -- emission ------------------------------------------------------------------


def _plain(obj):
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit(report, fmt: str = "json", render: Callable[[dict], str] | None = None) -> bytes:
    """Serialize a report: canonical JSON, or the text table from ``render``."""
    doc = _plain(report)
    if fmt == "json":
        return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    text = render(doc) if render else "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(doc.items()))
    return (text.rstrip("\n") + "\n").encode()


def parse(data: bytes | str) -> dict:
    return json.loads(data)


def _root(order: int, exp: int, M: int) -> str:
    k = (exp * (M // order)) % M
    return "1" if k == 0 else f"z^{k}"


def _legend(M: int) -> str:
    return f"z = exp(2*pi*i/{M})"


def _elem(g) -> str:
    return "(" + ",".join(str(v) for v in g) + ")"


def table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(c) for c in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _ambient(moduli) -> int:
    return AbelianGroup(tuple(moduli)).ambient


def _system_line(doc: dict) -> str:
    c = doc["cocycle"]
    parts = [f"group Z{' x Z'.join(str(m) for m in doc['group'])}", f"a={c['a']}"]
    if c["a2"]:
        parts.append("a2=" + ",".join(f"{e['s']}:{e['t']}={e['v']}" for e in c["a2"]))
    if c["a3"]:
        parts.append("a3=" + ",".join(f"{e['r']}:{e['s']}:{e['t']}={e['v']}" for e in c["a3"]))
    return "  ".join(parts)


def render_enumeration(doc: dict) -> str:
    M = _ambient(doc["group"])
    rows = []
    for k, e in enumerate(doc["entries"]):
        chars = " ".join("[" + ",".join(_root(v["order"], v["exp"], M) for v in ch) + "]" for ch in e["chars"])
        rows.append([k, " ".join(_elem(g) for g in e["alpha"]), ",".join(map(str, e["N"])), e["dim"],
                     "-" if e.get("family") is None else e["family"], chars])
    head = [_system_line(doc), f"rank {doc['rank']}: {doc['count']} admissible series", _legend(M)]
    if rows:
        head.append(table(["id", "degrees", "N", "dim", "family", "chi(e_l)"], rows))
    return "\n".join(head)


def render_census(doc: dict) -> str:
    lines = [f"Z2^3 census, ranks 3..{doc['max_rank']}" + ("  (up to permutation)" if doc["up_to_perm"] else "")]
    rows = []
    for block in doc["blocks"]:
        a = "".join(str(v) for v in block["cocycle"]["a"])
        for r in block["ranks"]:
            fams: dict[str, int] = {}
            for e in r["entries"]:
                if e.get("family") is not None:
                    fams[str(e["family"])] = fams.get(str(e["family"]), 0) + 1
            famtxt = " ".join(f"({k}):{v}" for k, v in sorted(fams.items())) or "-"
            rows.append([a, r["rank"], r["count"], famtxt])
    lines.append(table(["a", "rank", "count", "families"], rows))
    nz = doc["a2_nonzero_rank3"]
    total = sum(e["count"] for e in nz)
    lines.append(f"cocycles with a2 != 0: {len(nz)}, rank-3 series among them: {total}")
    return "\n".join(lines)


def render_presentation(doc: dict) -> str:
    M = _ambient(doc["group"])
    lines = [_system_line(doc), "generators: " + " ".join(doc["generators"]),
             "degrees: " + " ".join(f"X{i + 1}:{_elem(g)}" for i, g in enumerate(doc["degrees"])),
             _legend(M), "relations:"]
    for rel in doc["relations"]:
        if rel["kind"] == "nilpotent":
            lines.append(f"  {rel['lhs']} = 0")
        else:
            c = _root(rel["coeff"]["order"], rel["coeff"]["exp"], M)
            coeff = "" if c == "1" else c + " "
            lines.append(f"  {rel['lhs']} = {coeff}{rel['rhs']}")
    lines.append("coproducts:")
    for cp in doc["coproducts"]:
        lines.append(f"  Delta({cp['gen']}) = {cp['value']}")
    fam = doc.get("family")
    lines.append(f"dim {doc['dim']}" + ("" if fam is None else f"  family ({fam})"))
    return "\n".join(lines)


def render_checks(doc: dict) -> str:
    lines = [_system_line(doc), f"series degrees {' '.join(_elem(g) for g in doc['degrees'])}  dim M = {doc['dim']}",
             f"mode {doc['mode']}" + ("" if doc["seed"] is None else f"  seed {doc['seed']}")]
    rows = []
    for part in ("braided", "majid", "roundtrip"):
        for name, r in doc[part].items():
            rows.append([part, name, "ok" if r["ok"] else "FAIL", r["checked"],
                         "" if r["witness"] is None else json.dumps(r["witness"])])
    lines.append(table(["suite", "check", "status", "checked", "witness"], rows))
    lines.append("OK: all axioms hold" if doc["ok"] else "FAIL: axiom violation")
    return "\n".join(lines)


def render_chars(doc: dict) -> str:
    M = _ambient(doc["group"])
    lines = [_system_line(doc), _legend(M)]
    rows = []
    for d in doc["degrees"]:
        if d["obstructed"]:
            rows.append([_elem(d["degree"]), "-", "obstructed: induced 2-cocycle not symmetric "
                         + _elem_pair(d["witness"])])
            continue
        for ch in d["chars"]:
            vals = ",".join(_root(v["order"], v["exp"], M) for v in ch["values"])
            rows.append([_elem(d["degree"]), _root(ch["diag"]["order"], ch["diag"]["exp"], M), f"[{vals}]"])
    lines.append(table(["degree", "chi(g)", "chi(e_l)"], rows))
    return "\n".join(lines)


def _elem_pair(w) -> str:
    return "" if w is None else "at " + " ".join(_elem(g) for g in w)


# -- commands ------------------------------------------------------------------


def _resolve_mode(cfg: RunConfig, dim: int | None = None) -> str:
    if cfg.mode != "auto":
        mode = cfg.mode
    elif cfg.group.order <= AUTO_GROUP_BOUND and (dim is None or dim <= AUTO_DIM_BOUND):
        mode = "exhaustive"
    else:
        mode = "sampled"
    if mode == "sampled" and cfg.seed is None:
        raise UsageError("sampled verification needs an explicit --seed")
    return mode


def cmd_verify_cocycle(cfg: RunConfig) -> tuple[int, dict, Callable]:
    G, c = cfg.group, cfg.cocycle
    mode = _resolve_mode(cfg)
    exhaustive = mode == "exhaustive"
    seed = cfg.seed or 0
    res = verify_cocycle(G, PhiTable.build(G, c), 3, exhaustive=exhaustive, samples=cfg.samples, seed=seed)
    doc = {"schema": SCHEMA, "group": list(G.moduli), "cocycle": c.to_json(), "mode": mode, "seed": cfg.seed,
           "cocycle3": {"ok": res.ok, "checked": res.checked, "witness": res.witness}}
    ok = res.ok
    if cfg.extra.get("tilde"):
        tilde = []
        for g in G.elements:
            r = verify_cocycle(G, lambda e, f, g=g: phi_tilde_eval(G, c, g, e, f), 2,
                               exhaustive=exhaustive, samples=cfg.samples, seed=seed)
            tilde.append({"degree": list(g), "ok": r.ok, "checked": r.checked, "witness": r.witness})
            ok &= r.ok
        doc["tilde"] = tilde
    doc["ok"] = ok

    def render(d: dict) -> str:
        r = d["cocycle3"]
        how = f"{r['checked']} tuples" if d["mode"] == "exhaustive" else f"{r['checked']} sampled tuples, seed {d['seed']}"
        if r["ok"]:
            lines = [f"OK: 3-cocycle condition holds ({how})"]
        else:
            lines = [f"FAIL: 3-cocycle condition fails at {' '.join(_elem(g) for g in r['witness'])}"]
        for t in d.get("tilde", []):
            if not t["ok"]:
                lines.append(f"FAIL: induced 2-cocycle at degree {_elem(t['degree'])} fails at "
                             + " ".join(_elem(g) for g in t["witness"]))
        if "tilde" in d and all(t["ok"] for t in d["tilde"]):
            lines.append(f"OK: induced 2-cocycle condition holds at all {len(d['tilde'])} degrees "
                         f"({d['tilde'][0]['checked']} tuples each)")
        return "\n".join(lines)

    return (EXIT_OK if ok else EXIT_FAIL), doc, render


def cmd_solve_chars(cfg: RunConfig) -> tuple[int, dict, Callable]:
    from .errors import NonSymmetricCocycle
    from .qchar import solve_quasicharacters

    G, c = cfg.group, cfg.cocycle
    deg = cfg.extra.get("degree")
    if deg is not None:
        if len(deg) != G.rank:
            raise UsageError(f"--degree needs {G.rank} entries")
        degrees = [G.element(deg)]
    else:
        degrees = [g for g in G.elements if g != G.identity]
    out = []
    for g in degrees:
        try:
            sols = solve_quasicharacters(G, c, g)
        except NonSymmetricCocycle as exc:
            out.append({"degree": list(g), "obstructed": True, "witness": exc.witness, "chars": []})
            continue
        chars = []
        for ch in sols:
            d = ch.to_json()
            d["diag"] = {"order": ch.order, "exp": ch.value_exp(g, G)}
            chars.append(d)
        out.append({"degree": list(g), "obstructed": False, "witness": None, "chars": chars})
    doc = {"schema": SCHEMA, "group": list(G.moduli), "cocycle": c.to_json(), "degrees": out}
    return EXIT_OK, doc, render_chars


def _tag_families(cfg: RunConfig, rank: int) -> bool:
    return (cfg.group.moduli == (2, 2, 2) and cfg.cocycle == CocycleData((1, 1, 1))
            and rank >= 3 and not cfg.extra.get("all_degrees"))


def _enumerate(cfg: RunConfig, rank: int):
    from .classify import enumerate_admissible

    return enumerate_admissible(
        cfg.group, cfg.cocycle, rank, up_to_perm=cfg.up_to_perm, dim_limit=cfg.dim_limit,
        frame=not cfg.extra.get("all_degrees"), obstruction_scan=not cfg.cocycle.is_reduced,
        tag=_tag_families(cfg, rank),
    )


def cmd_enumerate(cfg: RunConfig) -> tuple[int, dict, Callable]:
    rank = cfg.rank if cfg.rank is not None else cfg.group.rank
    if rank < 1:
        raise UsageError("--rank must be positive")
    return EXIT_OK, _enumerate(cfg, rank).to_json(), render_enumeration


def _series(cfg: RunConfig):
    from .classify import series_from_entry

    ident = cfg.extra.get("series")
    if ident is None:
        raise UsageError("--series is required")
    rank = cfg.rank if cfg.rank is not None else cfg.group.rank
    try:
        if ":" in ident:
            r, k = ident.split(":")
            rank, idx = int(r), int(k)
        else:
            idx = int(ident)
    except ValueError:
        raise UsageError(f"--series expects INDEX or RANK:INDEX, got {ident!r}") from None
    if rank < 1:
        raise UsageError("rank must be positive")
    report = _enumerate(cfg, rank)
    if not 0 <= idx < report.count:
        raise UsageError(f"series {idx} out of range: rank {rank} has {report.count} admissible series")
    entry = report.entries[idx]
    series = series_from_entry(cfg.group, cfg.cocycle, entry)
    dim = cfg.group.order * prod(series.nilpotency)
    if cfg.dim_limit is not None and dim > cfg.dim_limit:
        raise UsageError(f"dim M = {dim} exceeds --dim-limit {cfg.dim_limit}")
    return series, entry


def cmd_present(cfg: RunConfig) -> tuple[int, dict, Callable]:
    from .bosonize import MajidAlgebra, present

    series, entry = _series(cfg)
    doc = present(MajidAlgebra.build(series))
    return EXIT_OK, doc, render_presentation


def _checks_json(checks: dict) -> dict:
    return {k: {"ok": r.ok, "checked": int(r.checked), "witness": _plain(r.witness)} for k, r in checks.items()}


def cmd_check_axioms(cfg: RunConfig) -> tuple[int, dict, Callable]:
    from .bosonize import MajidAlgebra, coinvariants_roundtrip, verify_majid_axioms
    from .nichols import CheckResult, verify_braided_hopf

    series, _ = _series(cfg)
    dim = cfg.group.order * prod(series.nilpotency)
    mode = _resolve_mode(cfg, dim)
    seed = cfg.seed or 0
    M = MajidAlgebra.build(series)
    braided = verify_braided_hopf(M.S, exhaustive=mode == "exhaustive", samples=cfg.samples, seed=seed)
    majid = verify_majid_axioms(M, mode=mode, seed=seed, samples=cfg.samples)
    rt = coinvariants_roundtrip(M)
    want = prod(series.nilpotency)
    round_checks = {
        "roundtrip": CheckResult(rt.ok, 1, None if rt.ok else rt.failures[:3]),
        "dim_R": CheckResult(rt.dim_R == want, 1, None if rt.dim_R == want else [rt.dim_R, want]),
    }
    ok = braided.ok and majid.ok and all(r.ok for r in round_checks.values())
    doc = {
        "schema": SCHEMA, "group": list(cfg.group.moduli), "cocycle": cfg.cocycle.to_json(),
        "degrees": [list(g) for g in series.degrees], "dim": M.dim, "mode": mode, "seed": cfg.seed,
        "braided": _checks_json(braided.checks), "majid": _checks_json(majid.checks),
        "roundtrip": _checks_json(round_checks), "ok": ok,
    }
    return (EXIT_OK if ok else EXIT_FAIL), doc, render_checks


def cmd_z2cubed_report(cfg: RunConfig) -> tuple[int, dict, Callable]:
    from .classify import z2cubed_report

    max_rank = cfg.extra.get("max_rank", 7)
    if max_rank < 3:
        raise UsageError("--max-rank must be at least 3")
    return EXIT_OK, z2cubed_report(max_rank=max_rank, up_to_perm=cfg.up_to_perm), render_census


COMMANDS = {
    "verify-cocycle": cmd_verify_cocycle,
    "solve-chars": cmd_solve_chars,
    "enumerate": cmd_enumerate,
    "present": cmd_present,
    "check-axioms": cmd_check_axioms,
    "z2cubed-report": cmd_z2cubed_report,
}


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quasiq", description="Finite quasi-quantum linear spaces over abelian groups.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, system: bool = True) -> None:
        if system:
            sp.add_argument("--group", help="moduli, e.g. 2,2,2")
            sp.add_argument("--a", help="a_l parameters, e.g. 1,1,1")
            sp.add_argument("--a2", action="append", default=[], metavar="S:T=V", help="a_st entries (1-based)")
            sp.add_argument("--a3", action="append", default=[], metavar="R:S:T=V", help="a_rst entries (1-based)")
            sp.add_argument("--config", help="JSON file with moduli and cocycle")
        sp.add_argument("--json", action="store_true", help="canonical JSON output")
        sp.add_argument("--out", help="write output here instead of stdout")

    def verify_opts(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int, default=10000)

    def series_opts(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--series", required=True, help="INDEX or RANK:INDEX into the enumeration")
        sp.add_argument("--rank", type=int)
        sp.add_argument("--up-to-perm", action="store_true")
        sp.add_argument("--all-degrees", action="store_true", help="do not pin the leading degrees to e_l")
        sp.add_argument("--dim-limit", type=int, default=4096)

    sp = sub.add_parser("verify-cocycle", help="check the 3-cocycle condition of Phi_a")
    common(sp)
    verify_opts(sp)
    sp.add_argument("--tilde", action="store_true", help="also check every induced 2-cocycle")

    sp = sub.add_parser("solve-chars", help="quasi-characters attached to a degree")
    common(sp)
    sp.add_argument("--degree", help="group element, e.g. 1,0,0 (default: all)")

    sp = sub.add_parser("enumerate", help="admissible series of a given rank")
    common(sp)
    sp.add_argument("--rank", type=int)
    sp.add_argument("--up-to-perm", action="store_true")
    sp.add_argument("--all-degrees", action="store_true", help="do not pin the leading degrees to e_l")
    sp.add_argument("--dim-limit", type=int)

    sp = sub.add_parser("present", help="generators and relations of the bosonization")
    common(sp)
    series_opts(sp)

    sp = sub.add_parser("check-axioms", help="verify S(V), its bosonization and the coinvariant roundtrip")
    common(sp)
    series_opts(sp)
    verify_opts(sp)

    sp = sub.add_parser("z2cubed-report", help="census of admissible series over Z2^3")
    common(sp, system=False)
    sp.add_argument("--max-rank", type=int, default=7)
    sp.add_argument("--up-to-perm", action="store_true")
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    if args.command == "z2cubed-report":
        G = AbelianGroup((2, 2, 2))
        cfg = RunConfig(args.command, G, CocycleData((1, 1, 1)), up_to_perm=args.up_to_perm,
                        fmt="json" if args.json else "text", out=Path(args.out) if args.out else None)
        cfg.extra["max_rank"] = args.max_rank
        return cfg
    cfg = make_config(args)
    for key in ("tilde", "all_degrees", "series", "max_rank"):
        if hasattr(args, key):
            cfg.extra[key] = getattr(args, key)
    if getattr(args, "degree", None) is not None:
        cfg.extra["degree"] = _int_list(args.degree, "--degree")
    if cfg.samples < 1:
        raise UsageError("--samples must be positive")
    return cfg


def dispatch(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        apply_thread_cap()
        cfg = _config(args)
        code, doc, render = COMMANDS[cfg.command](cfg)
        data = emit(doc, cfg.fmt, render)
    except (UsageError, QuasiqError) as exc:
        print(f"quasiq {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    if cfg.out is not None:
        try:
            cfg.out.write_bytes(data)
        except OSError as exc:
            print(f"quasiq: cannot write {cfg.out}: {exc}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(data.decode())
        stdout.flush()
    return code


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
