"""Command-line entry point.

Subcommands:
    gen      dump constellation states and snapshot edges to CSV
    plan     relay-plan audit CSV for every pair and slot
    run      full scenario -> metrics CSVs + JSON summary
    goodput  header-overhead table for the four schemes
    baseline static-ground-relay comparison run
"""

import argparse
import sys
from pathlib import Path

from ..drsa import PlanInfeasible, select_relays
from ..riskmap import RiskTooLarge, compute_nlrp, risk_satellites
from ..topology import build_snapshot
from .config import load_config, parse_slots
from .metrics import fmt
from .scenario import (
    SCHEMES,
    alibi_baseline,
    field_length,
    goodput_ratio,
    run,
)


def _add_common(sub):
    sub.add_argument("--config", required=True, help="scenario YAML file")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--slots", default=None, help="slot range a..b")


def _load(args):
    slots = parse_slots(args.slots) if args.slots else None
    return load_config(args.config, seed=args.seed, slots=slots)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args):
    config = _load(args)
    out = _outdir(args)
    states_lines = ["t,p,n,x_km,y_km,z_km,lat_deg,lon_deg,direction"]
    edges_lines = ["t,node_a,node_b,delay_ms"]
    for slot in config.slots:
        snap, _ = build_snapshot(config.shell, float(slot), config.ground,
                                 min_elevation_deg=config.min_elevation_deg,
                                 cross_seam=config.cross_seam, on_gap="skip")
        block = snap.block
        for i in range(len(block)):
            c = block.coord_of(i)
            x, y, z = block.position[i]
            d = "NE" if block.ne_bound[i] else "SE"
            states_lines.append(
                f"{slot},{c.p},{c.n},{fmt(float(x))},{fmt(float(y))},"
                f"{fmt(float(z))},{fmt(float(block.lat_deg[i]))},"
                f"{fmt(float(block.lon_deg[i]))},{d}")
        for a, b, w in zip(snap.edge_u, snap.edge_v, snap.edge_w):
            edges_lines.append(
                f"{slot},{snap.label_of(int(a))},{snap.label_of(int(b))},"
                f"{fmt(float(w) * 1e3)}")
    (out / "states.csv").write_text("\n".join(states_lines) + "\n")
    (out / "edges.csv").write_text("\n".join(edges_lines) + "\n")
    print(f"wrote {out / 'states.csv'} and {out / 'edges.csv'}")
    return 0


def cmd_plan(args):
    config = _load(args)
    out = _outdir(args)
    lines = ["t,src,dst,relays,thresholds_ms,path_len,delay_ms"]
    for slot in config.slots:
        snap, gaps = build_snapshot(config.shell, float(slot), config.ground,
                                    min_elevation_deg=config.min_elevation_deg,
                                    cross_seam=config.cross_seam,
                                    on_gap="skip")
        rs = risk_satellites(snap, config.risk_area)
        nlrp = None
        if rs:
            try:
                nlrp = compute_nlrp(snap, rs, config.theta)
            except RiskTooLarge:
                nlrp = None
        for src, dst in config.pairs:
            if src in gaps or dst in gaps:
                lines.append(f"{slot},{src},{dst},COVERAGE_GAP,,0,")
                continue
            try:
                plan = select_relays(snap, snap.access[src], snap.access[dst],
                                     nlrp, rs, theta=config.theta,
                                     sigma=config.sigma,
                                     rel_tol=config.rel_tol)
            except PlanInfeasible:
                lines.append(f"{slot},{src},{dst},INFEASIBLE,,0,")
                continue
            relays = "|".join(f"{r.p}:{r.n}" for r in plan.relays)
            deltas = "|".join("inf" if d == float("inf") else fmt(d * 1e3)
                              for d in plan.thresholds)
            lines.append(
                f"{slot},{src},{dst},{relays},{deltas},"
                f"{len(plan.path.nodes)},{fmt(plan.path.total_delay * 1e3)}")
    (out / "plans.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {out / 'plans.csv'}")
    return 0


def cmd_run(args):
    config = _load(args)
    out = _outdir(args)
    report = run(config)
    (out / "pairs.csv").write_text(report.pairs_csv())
    (out / "thresholds.csv").write_text(report.thresholds_csv())
    (out / "variation.csv").write_text(report.variation_csv())
    (out / "summary.json").write_text(report.summary_json())
    print(report.summary_json(), end="")
    print(f"wrote pairs.csv, thresholds.csv, variation.csv, summary.json in {out}")
    return 0


def cmd_goodput(args):
    payload = args.payload
    sigma = args.sigma
    print("scheme,N,field_len_bytes,goodput_ratio")
    for scheme in SCHEMES:
        for n in (10, 20, 30):
            fl = field_length(scheme, n, sigma)
            gr = goodput_ratio(scheme, n, payload, sigma)
            print(f"{scheme},{n},{fl},{fmt(gr)}")
    return 0


def cmd_baseline(args):
    config = _load(args)
    out = _outdir(args)
    report = alibi_baseline(config)
    (out / "baseline.csv").write_text(report.csv())
    print(f"f={report.f} mean_fp={fmt(report.mean_fp())} "
          f"mean_fn={fmt(report.mean_fn())} "
          f"no_relay_rate={fmt(report.no_relay_rate)}")
    print(f"wrote {out / 'baseline.csv'}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="leoveri")
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn in (("gen", cmd_gen), ("plan", cmd_plan), ("run", cmd_run),
                     ("baseline", cmd_baseline)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)

    g = sub.add_parser("goodput")
    g.add_argument("--payload", type=int, default=1024)
    g.add_argument("--sigma", type=int, default=2)
    g.set_defaults(fn=cmd_goodput)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
