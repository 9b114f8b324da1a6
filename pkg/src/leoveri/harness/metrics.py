"""Metric accumulation and CSV/JSON reporting.

Ground truth for the error ratios comes from forwarding traces, never
from the verifier itself: a false positive is a slot whose clean packet
was rejected, a false negative a slot whose risk-traversing packet was
accepted. Ratios are slot fractions per communication pair.
"""

import json
from dataclasses import dataclass, field


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


@dataclass
class PairStats:
    src: str
    dst: str
    slots: int = 0                 # slots with at least one packet sent
    fp_slots: int = 0
    fn_slots: int = 0
    sent: int = 0
    accepted: int = 0
    rejected: int = 0
    lost: int = 0
    infeasible_slots: int = 0
    coverage_gap_slots: int = 0
    relay_hist: dict = field(default_factory=lambda: {0: 0, 1: 0, 2: 0})
    inflation_sum: float = 0.0
    inflation_n: int = 0
    replay_missed: int = 0
    replay_detected: int = 0

    @property
    def fp_ratio(self) -> float:
        return self.fp_slots / self.slots if self.slots else 0.0

    @property
    def fn_ratio(self) -> float:
        return self.fn_slots / self.slots if self.slots else 0.0

    @property
    def mean_inflation_pct(self) -> float:
        return self.inflation_sum / self.inflation_n if self.inflation_n else 0.0

    def rar(self, sigma: int) -> float:
        total = sum(self.relay_hist.values()) + self.infeasible_slots
        if not total:
            return 0.0
        return self.relay_hist.get(sigma, 0) / total

    @property
    def rar_infeasible(self) -> float:
        total = sum(self.relay_hist.values()) + self.infeasible_slots
        return self.infeasible_slots / total if total else 0.0


@dataclass
class MetricsReport:
    pairs: dict = field(default_factory=dict)   # (src, dst) -> PairStats
    thresholds: list = field(default_factory=list)  # (t, src, dst, [ms...])
    variation: list = field(default_factory=list)   # (win_start, rs, nlrp)
    risk_too_large_slots: int = 0

    def pair(self, src, dst) -> PairStats:
        key = (src, dst)
        if key not in self.pairs:
            self.pairs[key] = PairStats(src, dst)
        return self.pairs[key]

    def pairs_csv(self) -> str:
        lines = ["src,dst,slots,fp_ratio,fn_ratio,sent,accepted,rejected,"
                 "lost,infeasible_slots,coverage_gap_slots,mean_inflation_pct,"
                 "rar0,rar1,rar2,rar_infeasible"]
        for key in sorted(self.pairs):
            p = self.pairs[key]
            lines.append(",".join(fmt(x) for x in (
                p.src, p.dst, p.slots, p.fp_ratio, p.fn_ratio, p.sent,
                p.accepted, p.rejected, p.lost, p.infeasible_slots,
                p.coverage_gap_slots, p.mean_inflation_pct,
                p.rar(0), p.rar(1), p.rar(2), p.rar_infeasible)))
        return "\n".join(lines) + "\n"

    def thresholds_csv(self) -> str:
        lines = ["t,src,dst,segment,threshold_ms"]
        for t, src, dst, deltas in self.thresholds:
            for k, d in enumerate(deltas):
                ms = "inf" if d == float("inf") else fmt(d * 1e3)
                lines.append(f"{fmt(t)},{src},{dst},{k},{ms}")
        return "\n".join(lines) + "\n"

    def variation_csv(self) -> str:
        lines = ["window_start,rs_changes,nlrp_changes"]
        for start, rs, nlrp in self.variation:
            lines.append(f"{start},{rs},{nlrp}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        pair_list = [self.pairs[k] for k in sorted(self.pairs)]
        n = len(pair_list) or 1
        return {
            "pairs": len(pair_list),
            "mean_fp_ratio": sum(p.fp_ratio for p in pair_list) / n,
            "mean_fn_ratio": sum(p.fn_ratio for p in pair_list) / n,
            "mean_inflation_pct":
                sum(p.mean_inflation_pct for p in pair_list) / n,
            "total_sent": sum(p.sent for p in pair_list),
            "total_accepted": sum(p.accepted for p in pair_list),
            "total_rejected": sum(p.rejected for p in pair_list),
            "total_lost": sum(p.lost for p in pair_list),
            "infeasible_slots": sum(p.infeasible_slots for p in pair_list),
            "coverage_gap_slots": sum(p.coverage_gap_slots for p in pair_list),
            "risk_too_large_slots": self.risk_too_large_slots,
            "rs_changes": sum(v[1] for v in self.variation),
            "nlrp_changes": sum(v[2] for v in self.variation),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


@dataclass
class BaselinePairStats:
    src: str
    dst: str
    relay: str | None = None
    slots: int = 0
    fp_slots: int = 0
    fn_slots: int = 0
    mean_inflation_pct: float = 0.0

    @property
    def fp_ratio(self) -> float:
        return self.fp_slots / self.slots if self.slots else 0.0

    @property
    def fn_ratio(self) -> float:
        return self.fn_slots / self.slots if self.slots else 0.0


@dataclass
class BaselineReport:
    f: float
    pairs: dict = field(default_factory=dict)
    no_relay_pairs: list = field(default_factory=list)

    @property
    def no_relay_rate(self) -> float:
        total = len(self.pairs) + len(self.no_relay_pairs)
        return len(self.no_relay_pairs) / total if total else 0.0

    def mean_fp(self) -> float:
        vals = [p.fp_ratio for p in self.pairs.values()]
        return sum(vals) / len(vals) if vals else 0.0

    def mean_fn(self) -> float:
        vals = [p.fn_ratio for p in self.pairs.values()]
        return sum(vals) / len(vals) if vals else 0.0

    def csv(self) -> str:
        lines = ["src,dst,relay,slots,fp_ratio,fn_ratio,mean_inflation_pct"]
        for key in sorted(self.pairs):
            p = self.pairs[key]
            lines.append(",".join(fmt(x) for x in (
                p.src, p.dst, p.relay, p.slots, p.fp_ratio, p.fn_ratio,
                p.mean_inflation_pct)))
        for src, dst in sorted(self.no_relay_pairs):
            lines.append(f"{src},{dst},NO_RELAY,0,0,0,0")
        return "\n".join(lines) + "\n"
