"""Command-line front end.

Subcommands: build, paras, normalizer, complement, verify, reflections,
lattice.  Groups are selected with compact selector strings or loaded from
previously saved group files; results are emitted as markdown, CSV or JSON.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input,
3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import random
import sys
from math import lcm

from . import catalog, engine, parabolics
from .engine import DEFAULT_CAP, MatGroup, SizeExceededError
from .quat import (HMatrix, fix_space, is_reflection, parse_quat, render_quat,
                   setwise_image)

GROUP_FORMAT = "qreflect-group"
GROUP_VERSION = 1


class SelectorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# selectors and group files

def _kspec(token: str) -> catalog.KleinianSpec:
    if token == "1":
        return catalog.KleinianSpec("C", 1)
    if token in ("T", "O", "I"):
        return catalog.KleinianSpec(token)
    if token and token[0] in "CD" and token[1:].isdigit():
        return catalog.KleinianSpec(token[0], int(token[1:]))
    raise SelectorError(f"not a Kleinian group label: {token!r}")


def resolve_group(selector: str, args) -> MatGroup:
    """Build a group from a selector string or load it from a file."""
    if os.path.exists(selector):
        return load_group(selector, cap=args.cap)
    tokens = selector.split(":")
    head = tokens[0]
    try:
        if head in ("T", "O", "I") and len(tokens) == 1:
            return catalog.build_kleinian(catalog.KleinianSpec(head))
        if head in ("C", "D") and len(tokens) == 2:
            return catalog.build_kleinian(catalog.KleinianSpec(head, int(tokens[1])))
        if head == "Gn" and len(tokens) == 4:
            spec = catalog.ImprimSpec(_kspec(tokens[1]), _kspec(tokens[2]),
                                      int(tokens[3]))
            return catalog.build_imprimitive(spec)
        if head == "Gexc" and len(tokens) == 4:
            phi = tokens[3]
            if phi == "psi":
                if None in (args.m, args.l, args.r):
                    raise SelectorError("Gexc:...:psi requires --m, --l and --r")
                spec = catalog.dihedral_series_spec(args.m, args.l, args.r)
            elif phi in ("identity", "id", "rho_gamma", "theta"):
                phi = "identity" if phi == "id" else phi
                spec = catalog.Rank2ExcSpec(_kspec(tokens[1]), _kspec(tokens[2]), phi)
            else:
                raise SelectorError(f"unknown twist {phi!r}")
            return catalog.build_rank2_exceptional(spec)
        if head == "EH" and len(tokens) in (2, 3):
            d = int(tokens[2]) if len(tokens) == 3 else 0
            return catalog.build_EH(catalog.EHSpec(int(tokens[1]), d))
        if head == "root" and len(tokens) == 2:
            if tokens[1] == "Q":
                spec = catalog.builtin_Q()
            else:
                spec = catalog.load_root_file(tokens[1])
            return catalog.build_root_system_group(spec, cap=args.cap)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, SelectorError):
            raise
        raise SelectorError(f"invalid selector {selector!r}: {exc}") from exc
    raise SelectorError(f"unknown selector: {selector!r}")


def _conductor_of(G: MatGroup) -> int:
    out = 1
    for g in G.generators:
        for row in g.rows:
            for q in row:
                out = lcm(out, q.z1.conductor, q.z2.conductor)
    return out


def save_group(G: MatGroup, path: str) -> None:
    gens = G.generators if G.generators else [G.elements[G.identity_pos]]
    payload = {
        "format": GROUP_FORMAT,
        "version": GROUP_VERSION,
        "ambient_rank": G.n,
        "conductor": _conductor_of(G),
        "order": G.order,
        "generators": [[";".join(render_quat(q) for q in row) for row in g.rows]
                       for g in gens],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_group(path: str, cap: int = DEFAULT_CAP) -> MatGroup:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != GROUP_FORMAT or payload.get("version") != GROUP_VERSION:
        raise SelectorError(f"{path}: not a group file of a supported version")
    gens = [HMatrix([[parse_quat(t) for t in row.split(";")] for row in rows])
            for rows in payload["generators"]]
    if any(g.n != payload["ambient_rank"] for g in gens):
        raise SelectorError(f"{path}: generator rank disagrees with ambient_rank")
    G = engine.closure(gens, cap=cap)
    if "order" in payload and G.order != payload["order"]:
        raise SelectorError(f"{path}: recomputed order {G.order} does not match "
                            f"stored order {payload['order']}")
    return G


# ---------------------------------------------------------------------------
# output helpers

def emit_rows(header: list[str], rows: list[list], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([dict(zip(header, r)) for r in rows],
                             indent=1, sort_keys=True, default=str) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        cells = [header] + [[str(c) for c in r] for r in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
        out.write("| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |\n")
        out.write("|" + "|".join("-" * (w + 2) for w in widths) + "|\n")
        for r in cells[1:]:
            out.write("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |\n")


def _open_out(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def _find_class(classes, token: str):
    def norm(s: str) -> str:
        return "".join(ch for ch in s if ch.isalnum())

    exact = [c for c in classes if c.label == token]
    if exact:
        return exact[0]
    matches = [c for c in classes if norm(c.type_label) == norm(token)]
    if not matches:
        raise SelectorError(f"no parabolic class labelled {token!r}")
    if len(matches) > 1:
        labels = ", ".join(c.label for c in matches)
        raise SelectorError(f"{token!r} is ambiguous (candidates: {labels})")
    return matches[0]


# ---------------------------------------------------------------------------
# subcommands

def cmd_build(args) -> int:
    G = resolve_group(args.group, args)
    if args.out:
        save_group(G, args.out)
        print(f"wrote {args.out} (rank {G.n}, order {G.order})")
    else:
        emit_rows(["ambient_rank", "order", "generators", "reflections"],
                  [[G.n, G.order, len(G.generators),
                    len(parabolics.reflections(G))]],
                  args.format, sys.stdout)
    return 0


def cmd_paras(args) -> int:
    G = resolve_group(args.group, args)
    classes = parabolics.classify_parabolics(G)
    rows = []
    for c in classes:
        qlabel = parabolics.orthogonal_parabolic(G, c).type_label
        rep = parabolics.complement_report(G, c)
        rows.append([c.label, c.type_label, c.length, c.rank, qlabel,
                     rep.normalizer_order,
                     "present" if rep.present else "absent",
                     rep.c_label, rep.c0_label])
    with _open_out(args) as out:
        emit_rows(["class", "type", "length", "rank", "Q", "N", "complement",
                   "C", "C0"], rows, args.format, out)
    return 0


def cmd_normalizer(args) -> int:
    G = resolve_group(args.group, args)
    classes = parabolics.classify_parabolics(G)
    c = _find_class(classes, args.cls)
    N = parabolics.normalizer_of_parabolic(G, c)
    rep = parabolics.complement_report(G, c)
    rows = [[c.label, c.type_label, len(c.rep), len(N),
             "present" if rep.present else "absent", rep.c_label]]
    with _open_out(args) as out:
        emit_rows(["class", "type", "P", "N", "split", "C"], rows,
                  args.format, out)
    return 0


def cmd_complement(args) -> int:
    G = resolve_group(args.group, args)
    classes = parabolics.classify_parabolics(G)
    c = _find_class(classes, args.cls)
    rep = parabolics.complement_report(G, c)
    if rep.present:
        rows = [[c.label, "present", len(rep.complement), rep.c_label,
                 rep.c0_label, rep.kernel_order, ""]]
    else:
        rows = [[c.label, "absent", 0, "none", "none", 0,
                 f"exhaustive over quotient of order {rep.certificate['quotient_order']}"]]
    with _open_out(args) as out:
        emit_rows(["class", "complement", "order", "C", "C0", "kernel",
                   "certificate"], rows, args.format, out)
    return 0


def cmd_reflections(args) -> int:
    G = resolve_group(args.group, args)
    refl = parabolics.reflections(G)
    gens = G.full_ref().small_gens()
    left = set(refl)
    rows = []
    idx = 0
    while left:
        seed = min(left)
        orbit = {seed}
        queue = [seed]
        while queue:
            x = queue.pop()
            for g in gens:
                y = G.conj_pos(g, x)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        mat = G.elements[seed]
        complex_entries = all(q.is_complex() for row in mat.rows for q in row)
        rows.append([idx, G.order_of(seed), len(orbit),
                     "complex" if complex_entries else "quaternionic"])
        left -= orbit
        idx += 1
    with _open_out(args) as out:
        emit_rows(["class", "order", "size", "entries"], rows, args.format, out)
    return 0


def cmd_lattice(args) -> int:
    G = resolve_group(args.group, args)
    lat = parabolics.fixed_space_lattice(G)
    by_dim: dict[int, int] = {}
    for U in lat.spaces:
        by_dim[U.dim] = by_dim.get(U.dim, 0) + 1
    rows = [[d, by_dim[d]] for d in sorted(by_dim, reverse=True)]
    with _open_out(args) as out:
        emit_rows(["dim", "count"], rows, args.format, out)
    return 0


# ---------------------------------------------------------------------------
# verify

_LIGHT_GRID = [("C4", "C2", 2), ("D2", "C2", 2), ("D2", "C4", 2), ("D3", "C3", 2)]
_DEEP_GRID = [(K, H, n)
              for K, H in [("C4", "C2"), ("D2", "C2"), ("D2", "C4"), ("D2", "D2"),
                           ("D3", "C3"), ("D3", "C6"), ("D3", "D3"), ("D4", "D2"),
                           ("T", "D2"), ("T", "T")]
              for n in (2, 3)]


def _partitions(m: int):
    if m == 0:
        yield ()
        return
    for first in range(m, 0, -1):
        for rest in _partitions(m - first):
            if not rest or rest[0] <= first:
                yield (first,) + rest


def _verify_imprim_criterion(deep: bool) -> parabolics.TableReport:
    rows = []
    grid = _DEEP_GRID if deep else _LIGHT_GRID
    for Klabel, Hlabel, n in grid:
        K, H = _kspec(Klabel), _kspec(Hlabel)
        spec = catalog.ImprimSpec(K, H, n)
        order = catalog.kleinian_order(K) ** (n - 1) * catalog.kleinian_order(H) * _fact(n)
        if n == 3 and order > 50000:
            continue
        G = catalog.build_imprimitive(spec)
        for m in range(1, n):
            for lam in _partitions(m):
                P = catalog.parabolic_rep(G, lam)
                N = engine.normalizer(G, P)
                found = engine.complement_search(N, P) is not None
                predicted = catalog.theorem_imprim_predicate(K, H, n, lam)
                status = "equal" if found == predicted else "mismatch"
                rows.append((f"G{n}({Klabel},{Hlabel}) lambda={lam}", status,
                             f"search={found} predicate={predicted}"))
    return parabolics.TableReport("imprim-criterion", rows)


def _fact(n: int) -> int:
    r = 1
    for i in range(2, n + 1):
        r *= i
    return r


def _verify_nosuchmap(args) -> parabolics.TableReport:
    if None in (args.p, args.q) or not args.K or not args.H:
        raise SelectorError("verify nosuchmap requires --p, --q, --K and --H")
    K, H = _kspec(args.K), _kspec(args.H)
    found = catalog.delta_compatible_hom_search(K, H, args.p, args.q)
    detail = "homomorphism found" if found else "no homomorphism found"
    return parabolics.TableReport("nosuchmap",
                                  [(f"p={args.p} q={args.q} K={args.K} H={args.H}",
                                    "equal", detail)])


def _verify_props(seed: int) -> parabolics.TableReport:
    """Randomized invariant spot checks on a few small groups."""
    rng = random.Random(seed)
    rows = []
    specs = [catalog.ImprimSpec(_kspec("D2"), _kspec("C2"), 2),
             catalog.ImprimSpec(_kspec("C4"), _kspec("C2"), 3),
             catalog.dihedral_series_spec(3, 1, 1)]
    for spec in specs:
        if isinstance(spec, catalog.ImprimSpec):
            G = catalog.build_imprimitive(spec)
            name = spec.label()
        else:
            G = catalog.build_rank2_exceptional(spec)
            name = spec.label()
        lat = parabolics.fixed_space_lattice(G)
        problems = []
        picks = rng.sample(range(len(lat.spaces)), min(4, len(lat.spaces)))
        for i in picks:
            U = lat.spaces[i]
            P = lat.parabolic(i)
            gen = engine.subgroup_closure(G, [p for p in P.positions
                                              if is_reflection(G.elements[p])])
            ok_steinberg = (gen == P or len(P) == 1)
            if not ok_steinberg:
                problems.append(f"lattice element {i}: not reflection-generated")
            if parabolics.fix_space_of(P) != U:
                problems.append(f"lattice element {i}: fixed space mismatch")
        g = G.elements[rng.randrange(len(G.elements))]
        for i in picks:
            img = setwise_image(g, lat.spaces[i])
            if img not in lat.index:
                problems.append(f"lattice not closed under element action at {i}")
        rows.append((name, "equal" if not problems else "mismatch",
                     "; ".join(problems)))
    return parabolics.TableReport("props", rows)


def cmd_verify(args) -> int:
    target = args.target
    reports = []
    if target == "list":
        print("targets: table2 table3 table4 all imprim-criterion nosuchmap props")
        return 0
    if target in ("table2", "table3", "table4"):
        reports.append(parabolics.verify_table(target, deep=args.deep))
    elif target == "all":
        for t in ("table2", "table3", "table4"):
            reports.append(parabolics.verify_table(t, deep=args.deep))
    elif target == "imprim-criterion":
        reports.append(_verify_imprim_criterion(args.deep))
    elif target == "nosuchmap":
        reports.append(_verify_nosuchmap(args))
    elif target == "props":
        reports.append(_verify_props(args.seed))
    else:
        raise SelectorError(f"unknown verify target: {target!r}")
    ok = True
    with _open_out(args) as out:
        for rep in reports:
            out.write(rep.render() + "\n")
            ok = ok and rep.ok
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qreflect",
                                description="exact computations with "
                                            "quaternionic reflection groups")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("group", help="group selector or saved group file")
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("md", "csv", "json"), default="md")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--deep", action="store_true")
        sp.add_argument("--m", type=int, default=None)
        sp.add_argument("--l", type=int, default=None)
        sp.add_argument("--r", type=int, default=None)

    sp = sub.add_parser("build", help="build a group and optionally save it")
    common(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("paras", help="classify parabolic subgroups")
    common(sp)
    sp.set_defaults(func=cmd_paras)

    sp = sub.add_parser("normalizer", help="normalizer of one parabolic class")
    common(sp)
    sp.add_argument("--class", dest="cls", required=True)
    sp.set_defaults(func=cmd_normalizer)

    sp = sub.add_parser("complement", help="complement analysis for one class")
    common(sp)
    sp.add_argument("--class", dest="cls", required=True)
    sp.set_defaults(func=cmd_complement)

    sp = sub.add_parser("reflections", help="reflection conjugacy classes")
    common(sp)
    sp.set_defaults(func=cmd_reflections)

    sp = sub.add_parser("lattice", help="fixed-space lattice summary")
    common(sp)
    sp.set_defaults(func=cmd_lattice)

    sp = sub.add_parser("verify", help="recompute golden data")
    sp.add_argument("target")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--K", default=None)
    sp.add_argument("--H", default=None)
    common(sp, group=False)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SelectorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
