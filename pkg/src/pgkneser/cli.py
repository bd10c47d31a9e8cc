"""Command line front end: ``pgkneser <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .analysis import (
    Claim,
    Context,
    case_pattern,
    check_full_weight_biconditional,
    check_low_weight_bounds,
    check_pair_weights,
    check_weight_one,
    check_weight_structure,
    weight_spectrum,
)
from .constructions import FamilyParams, blowup, blowup_size, family_size, lineplane_family, verify_family
from .field import FieldError, prime_power
from .flags import chamber_count, coflag_count
from .geometry import GeometryError, ProjectiveSpace, decode, gaussian_binomial
from .kneser import (
    MAGIC,
    UsageError,
    VertexSet,
    build_graph,
    default_threads,
    exact_max_independent,
    greedy_complete,
    is_independent,
    is_maximal_independent,
    perturbation_search,
)
from .polynomials import bound_polynomials, dominance_checks, identity_checks, threshold_q

DEFAULT_MEMORY_CAP = 4 * 2**30
FLAVOR_ALIASES = {
    "gamma2": (2, "chambers"),
    "gamma3": (3, "chambers"),
    "gamma4": (4, "chambers"),
    "lineplane": (4, "coflags"),
}
CHECKS = ("independence", "maximality", "weights", "lemmas")


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    q: int | None = None
    family: str | None = None
    anchors: dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    explicit_threshold: int = 50_000
    exact_threshold: int = 2_000
    budget: float | None = None
    format: str = "json"
    out: str | None = None
    threads: int = 1
    deterministic: bool = False


class CliError(Exception):
    pass


def parse_budget(text: str | None) -> float | None:
    if text is None:
        return None
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([smh]?)\s*", text)
    if not m:
        raise CliError(f"bad budget {text!r}; use e.g. 30s, 10m, 1h")
    return float(m.group(1)) * {"": 1, "s": 1, "m": 60, "h": 3600}[m.group(2)]


def check_geometry_q(q: int):
    try:
        p, e = prime_power(q)
    except FieldError as exc:
        raise CliError(str(exc)) from None
    if q > 9:
        raise CliError(f"geometry commands support prime powers q <= 9 (got q={q})")


def estimate_bytes(d: int, q: int) -> int:
    """Rough peak memory for enumerating chambers of PG(d, q)."""
    counts = [gaussian_binomial(d + 1, k + 1, q) for k in range(d)]
    pairwise = max(a * b for a in counts for b in counts) * 12
    return chamber_count(d, q) * d * 8 + pairwise


# -- output -------------------------------------------------------------


def emit(cfg: RunConfig, payload: dict, text: str | None = None, rows: list[dict] | None = None):
    if not cfg.deterministic:
        payload = {**payload, "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    if cfg.format == "json":
        out = json.dumps(payload, indent=1, default=_default) + "\n"
    elif cfg.format == "csv":
        rows = rows if rows is not None else payload.get("claims", [])
        buf = io.StringIO()
        if rows:
            keys = list(dict.fromkeys(k for r in rows for k in r))
            w = csv.DictWriter(buf, fieldnames=keys)
            w.writeheader()
            for r in rows:
                w.writerow({k: json.dumps(v, default=_default) if isinstance(v, (dict, list)) else v for k, v in r.items()})
        out = buf.getvalue()
    else:
        out = (text if text is not None else _text_claims(payload)) + "\n"
    if cfg.out and cfg.command not in ("construct", "search"):
        Path(cfg.out).write_text(out)
    else:
        sys.stdout.write(out)


def _default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _text_claims(payload: dict) -> str:
    lines = []
    for c in payload.get("claims", []):
        lines.append(f"[{c['status']:>7}] {c['claim_id']}: computed={c['computed_value']} bound={c['bound_value']}")
    return "\n".join(lines)


def _claims(claims: list[Claim]) -> list[dict]:
    return [c.to_dict() for c in claims]


def _exit_code(claims: list[Claim]) -> int:
    return 1 if any(c.status == "fail" for c in claims) else 0


# -- commands -----------------------------------------------------------


def cmd_space_info(cfg: RunConfig, enumerate_: bool = True, memory_cap: int = DEFAULT_MEMORY_CAP) -> int:
    d, q = cfg.d, cfg.q
    check_geometry_q(q)
    if not 1 <= d <= 6:
        raise CliError("d must be between 1 and 6")
    names = {0: "points", 1: "lines", 2: "planes", 3: "solids"}
    counts = {names.get(k, f"dim{k}") if k < d - 1 or d <= 3 else ("hyperplanes" if k == d - 1 and d > 4 else names.get(k, f"dim{k}")): gaussian_binomial(d + 1, k + 1, q) for k in range(d)}
    info = {"d": d, "q": q, "subspaces": counts}
    if d >= 2:
        info["chambers"] = chamber_count(d, q)
    if d >= 3:
        info["coflags"] = coflag_count(d, q)
    est = estimate_bytes(d, q)
    info["estimated_bytes"] = est
    if enumerate_ and est <= memory_cap:
        from .flags import chamber_table, coflag_table

        S = ProjectiveSpace(d, q)
        enum = {"subspaces": [len(S.bases(k)) for k in range(d)]}
        if d >= 2:
            enum["chambers"] = len(chamber_table(S))
        if d >= 3:
            enum["coflags"] = len(coflag_table(S))
        info["enumerated"] = enum
        info["enumeration_matches"] = enum["subspaces"] == list(counts.values()) and enum.get("chambers") == info.get("chambers") and enum.get("coflags") == info.get("coflags")
    else:
        info["enumerated"] = None
        info["note"] = "enumeration refused: estimated memory above cap; counts from Gaussian binomials only"
    text = "\n".join(f"{k}: {v}" for k, v in {**counts, **{k: info[k] for k in ("chambers", "coflags") if k in info}}.items())
    if info["enumerated"] is None:
        text += "\n" + info["note"]
    else:
        text += "\nenumeration: " + ("matches counts" if info["enumeration_matches"] else "MISMATCH")
    emit(cfg, {"command": "space-info", **info}, text, rows=[{**counts, **{k: info.get(k) for k in ("chambers", "coflags")}}])
    return 0 if info.get("enumeration_matches", True) else 1


def _params(space: ProjectiveSpace, cfg: RunConfig) -> FamilyParams:
    vals = {}
    for name, text in cfg.anchors.items():
        if text is None:
            continue
        try:
            vals[name] = decode(text, space.d, space.q)
        except GeometryError as exc:
            raise CliError(f"cannot parse --anchor-{name}: {exc}") from None
    return FamilyParams(cfg.family, **vals).resolved(space)


def cmd_construct(cfg: RunConfig, verify: bool = False, binary: bool = False) -> int:
    q = cfg.q
    check_geometry_q(q)
    space = ProjectiveSpace(4, q)
    params = _params(space, cfg)
    N = lineplane_family(space, params)
    M = blowup(space, N)
    Gf = build_graph(space, "coflags", explicit_threshold=cfg.explicit_threshold, threads=cfg.threads)
    Gc = build_graph(space, "chambers", explicit_threshold=cfg.explicit_threshold, threads=cfg.threads)
    out_dir = Path(cfg.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    NS, MS = VertexSet.from_indices(Gf, N), VertexSet.from_indices(Gc, M)
    files = {}
    for name, S in (("family", NS), ("blowup", MS)):
        path = out_dir / f"{name}_{cfg.family}_q{q}.json"
        path.write_text(S.to_json())
        files[name] = str(path)
        if binary:
            bpath = path.with_suffix(".knset")
            bpath.write_bytes(S.to_bytes())
            files[name + "_binary"] = str(bpath)
    claims = [
        Claim("family_size", "|N| = (q^2+q+1)(q^3+2q^2+q+1)", {"q": q, "kind": cfg.family},
              len(N), family_size(q), "pass" if len(N) == family_size(q) else "fail"),
        Claim("blowup_size", "|M| = alpha = (q^2+q+1)(q^3+2q^2+q+1)(q+1)^2", {"q": q, "kind": cfg.family},
              len(M), blowup_size(q), "pass" if len(M) == blowup_size(q) else "fail"),
    ]
    if verify:
        rep = verify_family(space, params, coflag_graph=Gf, chamber_graph=Gc, family=N)
        for k, ok in rep.checks.items():
            claims.append(Claim(f"family_{k}", "blown-up family is a maximal independent set", {"q": q, "kind": cfg.family},
                                ok, True, "pass" if ok else "fail", rep.witnesses.get(k)))
    text = "\n".join(
        [f"flags: {len(N)} (formula {family_size(q)}: {'match formula' if len(N) == family_size(q) else 'MISMATCH'})",
         f"chambers: {len(M)} (formula {blowup_size(q)}: {'match formula' if len(M) == blowup_size(q) else 'MISMATCH'})"]
        + [f"wrote {v}" for v in files.values()]
        + ([_text_claims({"claims": _claims(claims[2:])})] if verify else [])
    )
    emit(cfg, {"command": "construct", "q": q, "kind": cfg.family, "files": files, "claims": _claims(claims)}, text)
    return _exit_code(claims)


def load_set(path: str, cfg: RunConfig):
    data = Path(path).read_bytes()
    if data[:5] == MAGIC:
        import struct

        _, q, d, flavor, _ = struct.unpack_from("<BBBBQ", data, 5)
        from .kneser import FLAVORS

        flavor = FLAVORS[flavor]
    else:
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise CliError(f"malformed set file {path}: {exc}") from None
        if isinstance(doc, dict):
            d, q, flavor = doc.get("d"), doc.get("q"), doc.get("flavor")
        else:
            d, q, flavor = cfg.d, cfg.q, None
            if flavor is None and doc:
                flavor = "chambers" if doc[0].count("|") == (d or 4) - 1 else "coflags"
        if d is None or q is None or flavor is None:
            raise CliError("set file lacks d/q/flavor; pass -d and -q")
    if cfg.q is not None and cfg.q != q or cfg.d is not None and cfg.d != d:
        raise CliError(f"set file is for PG({d},{q}), not PG({cfg.d},{cfg.q})")
    check_geometry_q(q)
    space = ProjectiveSpace(d, q)
    G = build_graph(space, flavor, explicit_threshold=cfg.explicit_threshold, threads=cfg.threads)
    try:
        S = VertexSet.from_bytes(G, data) if data[:5] == MAGIC else VertexSet.from_json(G, data.decode())
    except (KeyError, GeometryError, UsageError, ValueError) as exc:
        raise CliError(f"malformed set file {path}: {exc}") from None
    return space, G, S


def verify_claims(space: ProjectiveSpace, G, S: VertexSet, checks: set[str]) -> list[Claim]:
    q, d = space.q, space.d
    params = {"d": d, "q": q, "flavor": G.flavor, "size": len(S)}
    claims = []
    ok, pair = is_independent(S)
    if "independence" in checks or not ok:
        claims.append(Claim("independence", "no two members are opposite", params, ok, True,
                            "pass" if ok else "fail", [G.encode(v) for v in pair] if pair else None))
    if not ok:
        return claims
    maximal, ext = is_maximal_independent(S)
    if "maximality" in checks:
        claims.append(Claim("maximality", "every other vertex is opposite to a member", params, maximal, True,
                            "pass" if maximal else "fail", G.encode(ext) if ext is not None else None))
    if G.flavor != "chambers" or d != 4 or not ({"weights", "lemmas"} & checks):
        return claims
    if not maximal:
        claims.append(Claim("weights", "weight laws need a maximal independent set", params, None, None, "fail"))
        return claims
    ctx = Context(space, chambers=G)
    if "weights" in checks:
        rep = weight_spectrum(ctx, S)
        allowed = sorted({1, 2, q + 1, 2 * q + 1, (q + 1) ** 2})
        viol = [v for v in rep.violations if "weight" in v and v.get("check") is None]
        claims.append(Claim("weight_spectrum", "coflag weights lie in {1, 2, q+1, 2q+1, (q+1)^2}", params,
                            rep.spectrum, allowed, "fail" if viol else "pass", viol or None))
        claims.append(Claim("weight_sum", "sum of coflag weights = |M|", params, rep.total, len(S),
                            "pass" if rep.total == len(S) else "fail"))
        pv = check_pair_weights(ctx, S)
        claims.append(Claim("pair_weights", "point-coflag and coflag-solid weights lie in {0, 1, q+1}", params,
                            len(pv), 0, "fail" if pv else "pass", pv or None))
        bv = check_full_weight_biconditional(ctx, S)
        claims.append(Claim("full_weight_iff", "weight (q+1)^2 iff non-f-opposite to all M-coflags", params,
                            len(bv), 0, "fail" if bv else "pass", bv or None))
        sv = check_weight_structure(ctx, S)
        claims.append(Claim("weight_structure", "chambers on weight 2, q+1, 2q+1 coflags have the forced shape", params,
                            len(sv), 0, "fail" if sv else "pass", sv or None))
        smv = [v for v in rep.violations if v.get("check")]
        claims.append(Claim("sm_pm_pairs", "no two S_M-pairs (P_M-pairs) are f-opposite", params,
                            {"S_M": len(rep.s_pairs), "P_M": len(rep.p_pairs)}, None, "fail" if smv else "pass", smv or None))
        n1, ov = check_weight_one(ctx, S)
        claims.append(Claim("weight_one_witnesses", "weight-one coflags have both witness chambers", params,
                            {"checked": n1, "missing": len(ov)}, 0, "fail" if ov else "pass", ov or None))
    if "lemmas" in checks:
        pat = case_pattern(ctx, S)
        claims.append(Claim("case_pattern", "A1: all flags through a point P0 / A2: all flags in a solid S0 / else B",
                            params, {"case": pat.case, "full_weight_coflags": pat.full_weight}, None, "pass"))
        claims.extend(check_low_weight_bounds(ctx, S))
    return claims


def write_spectrum_csv(path: str, space: ProjectiveSpace, G, S: VertexSet):
    ctx = Context(space, chambers=G)
    rep = weight_spectrum(ctx, S)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["weight", "coflags", "chambers"])
        for weight, n in rep.spectrum.items():
            w.writerow([weight, n, weight * n])


def cmd_verify(cfg: RunConfig, path: str, checks: list[str], spectrum_csv: str | None = None) -> int:
    wanted = set(CHECKS) if "all" in checks else set(checks)
    space, G, S = load_set(path, cfg)
    claims = verify_claims(space, G, S, wanted)
    if spectrum_csv:
        if G.flavor != "chambers" or G.d != 4:
            raise CliError("weight spectra are defined for chamber sets of PG(4, q)")
        if _exit_code(claims) == 0:
            write_spectrum_csv(spectrum_csv, space, G, S)
    emit(cfg, {"command": "verify", "file": path, "claims": _claims(claims)})
    return _exit_code(claims)


def bounds_table(qs) -> list[dict]:
    B = bound_polynomials()
    names = ["alpha", "beta", "gamma", "delta", "z_A", "z_B", "y_A", "y_B", "x_A", "x_B", "W_A", "W_B"]
    return [{"q": t, **{n: B[n](t) for n in names}} for t in qs]


def identity_claims() -> list[Claim]:
    out = []
    for c in identity_checks():
        out.append(Claim(f"identity_{c.claim_id}", c.anchor, {}, str(c.computed), str(c.stated), c.status))
    for name, ok in dominance_checks().items():
        out.append(Claim(f"dominance_{name}", "case bound replaced by a larger one", {"q": "2..1000"}, ok, True,
                         "pass" if ok else "fail"))
    return out


def threshold_claim() -> Claim:
    t = threshold_q()
    return Claim("threshold", "alpha > max(beta, gamma) for q >= 749", {"verified_up_to": t.verified_up_to},
                 asdict(t), 749, "pass" if t.smallest_q <= 749 else "fail")


def cmd_bounds(cfg: RunConfig, qs: list[int], threshold: bool, identities: bool) -> int:
    rows = bounds_table(qs) if qs else []
    claims = []
    if threshold:
        claims.append(threshold_claim())
    if identities:
        claims.extend(identity_claims())
    lines = []
    for r in rows:
        lines.append("  ".join(f"{k}={v}" for k, v in r.items()))
    if claims:
        lines.append(_text_claims({"claims": _claims(claims)}))
    emit(cfg, {"command": "bounds", "values": rows, "claims": _claims(claims)}, "\n".join(lines), rows=rows or None)
    return _exit_code(claims)


def cmd_identities(cfg: RunConfig) -> int:
    claims = identity_claims() + [threshold_claim()]
    emit(cfg, {"command": "identities", "claims": _claims(claims)})
    return _exit_code(claims)


def cmd_search(cfg: RunConfig, flavor: str, mode: str, override: bool) -> int:
    if flavor not in FLAVOR_ALIASES:
        raise CliError(f"flavor must be one of {sorted(FLAVOR_ALIASES)}")
    d, kind = FLAVOR_ALIASES[flavor]
    q = cfg.q
    check_geometry_q(q)
    space = ProjectiveSpace(d, q)
    G = build_graph(space, kind, explicit_threshold=cfg.explicit_threshold, threads=cfg.threads)
    params = {"flavor": flavor, "q": q, "mode": mode, "seed": cfg.seed, "budget": cfg.budget}
    claims = []
    if mode == "greedy":
        order = "deterministic" if cfg.seed is None else cfg.seed
        S = greedy_complete(VertexSet.empty(G), order)
        status = "optimal"
    elif mode == "exact":
        try:
            res = exact_max_independent(G, budget=cfg.budget, exact_threshold=cfg.exact_threshold, override=override)
        except UsageError as exc:
            raise CliError(str(exc)) from None
        S = VertexSet.from_indices(G, res.witness)
        status = res.status
        claims.append(Claim("exact_max_independent", "independence number by branch and bound", params,
                            res.size, None, "pass" if res.status == "optimal" else "finding",
                            {"status": res.status, "nodes": res.nodes}))
    elif mode == "perturb":
        S, rounds = perturbation_search(G, budget=cfg.budget or 10.0, seed=cfg.seed or 0)
        status = "heuristic"
        if kind == "chambers" and d == 4:
            alpha = bound_polynomials()["alpha"](q)
            claims.append(Claim("no_set_above_alpha", "no independent set larger than alpha found (consistency, not proof)",
                                {**params, "rounds": rounds}, len(S), alpha,
                                "finding" if len(S) <= alpha else "fail",
                                "consistent" if len(S) <= alpha else "exceeds alpha"))
    else:
        raise CliError(f"unknown mode {mode!r}")
    maximal, _ = is_maximal_independent(S)
    claims.insert(0, Claim("search_result_maximal", "emitted set is maximal independent", params, len(S), None,
                           "pass" if maximal else "fail"))
    out = Path(cfg.out or ".") / f"search_{flavor}_q{q}_{mode}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(S.to_json())
    text = f"size {len(S)} ({status}); wrote {out}\n" + _text_claims({"claims": _claims(claims)})
    emit(cfg, {"command": "search", "size": len(S), "status": status, "file": str(out), "backend": kernels.BACKEND,
               "claims": _claims(claims)}, text)
    return _exit_code(claims)


# -- argument parsing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", type=int, help="projective dimension")
    common.add_argument("-q", type=int, help="field order")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="output file (directory for construct/search)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $PGKNESER_THREADS or cores)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--deterministic", action="store_true", help="omit timestamps for byte-identical output")
    common.add_argument("--explicit-threshold", type=int, default=50_000)
    common.add_argument("--exact-threshold", type=int, default=2_000)

    p = argparse.ArgumentParser(prog="pgkneser", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("space-info", parents=[common], help="subspace, chamber and coflag counts")
    s.add_argument("--no-enumerate", action="store_true")
    s.add_argument("--memory-cap", type=float, default=DEFAULT_MEMORY_CAP, help="bytes")

    s = sub.add_parser("construct", parents=[common], help="build a line-plane family and its blowup")
    s.add_argument("--family", choices=("a", "b", "c", "d"), required=True)
    for name in ("solid", "point", "plane", "line"):
        s.add_argument(f"--anchor-{name}", help="subspace encoding such as 10000;01000")
    s.add_argument("--verify", action="store_true", help="also run the exhaustive independence/maximality checks")
    s.add_argument("--binary", action="store_true", help="also write KNSET bitset files")

    s = sub.add_parser("verify", parents=[common], help="check a vertex set file")
    s.add_argument("set_file")
    s.add_argument("--checks", nargs="+", default=["all"], choices=CHECKS + ("all",))
    s.add_argument("--spectrum-csv", help="write the coflag weight spectrum (weight, coflags, chambers) as CSV")

    s = sub.add_parser("bounds", parents=[common], help="evaluate the bound polynomials")
    s.add_argument("--range", help="a:b inclusive range of q")
    s.add_argument("--threshold", action="store_true")
    s.add_argument("--identities", action="store_true")

    sub.add_parser("identities", parents=[common], help="polynomial identity audit")

    s = sub.add_parser("search", parents=[common], help="search for large independent sets")
    s.add_argument("--flavor", choices=sorted(FLAVOR_ALIASES), required=True)
    s.add_argument("--mode", choices=("greedy", "exact", "perturb"), default="greedy")
    s.add_argument("--budget", help="time budget, e.g. 30s, 10m, 1h")
    s.add_argument("--override", action="store_true", help="allow exact search above exact-threshold")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        d=args.d,
        q=args.q,
        seed=args.seed,
        explicit_threshold=args.explicit_threshold,
        exact_threshold=args.exact_threshold,
        format=args.format,
        out=args.out,
        threads=args.threads or default_threads(),
        deterministic=args.deterministic,
    )
    try:
        if args.command == "space-info":
            if cfg.d is None or cfg.q is None:
                raise CliError("space-info needs -d and -q")
            return cmd_space_info(cfg, not args.no_enumerate, int(args.memory_cap))
        if args.command == "construct":
            if cfg.q is None:
                raise CliError("construct needs -q")
            if cfg.d not in (None, 4):
                raise CliError("families live in PG(4, q)")
            cfg.d = 4
            cfg.family = args.family
            cfg.anchors = {n: getattr(args, f"anchor_{n}") for n in ("solid", "point", "plane", "line")}
            return cmd_construct(cfg, args.verify, args.binary)
        if args.command == "verify":
            return cmd_verify(cfg, args.set_file, args.checks, args.spectrum_csv)
        if args.command == "bounds":
            qs = []
            if args.range:
                a, b = (int(x) for x in args.range.split(":"))
                qs = list(range(a, b + 1))
            elif cfg.q is not None:
                qs = [cfg.q]
            if cfg.q is not None and cfg.q < 2 or any(t < 2 for t in qs):
                raise CliError("q must be at least 2")
            return cmd_bounds(cfg, qs, args.threshold, args.identities)
        if args.command == "identities":
            return cmd_identities(cfg)
        if args.command == "search":
            if cfg.q is None:
                raise CliError("search needs -q")
            cfg.budget = parse_budget(args.budget)
            return cmd_search(cfg, args.flavor, args.mode, args.override)
    except (CliError, UsageError, GeometryError, FieldError) as exc:
        print(f"pgkneser: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
