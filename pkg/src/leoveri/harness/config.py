"""Scenario configuration: a flat YAML key-value file.

Schema (defaults in parentheses):

    shell: starlink1 | kuiper1            or a mapping with
      {orbit_count, sats_per_orbit, inclination_deg, altitude_km,
       phase_offset, epoch}
    ground_csv: builtin:ground_stations.csv | path
    pairs_csv: builtin:city_pairs.csv | path
    risk_csv: builtin:risk_egypt.csv | path
    theta: hop margin (1)
    sigma: relay budget (2)
    probing_period_s: (15.0)
    jitter: {kind: none|fixed|uniform|lognormal, per_hop_s, low_s,
             high_s, mu, sigma} ({kind: none})
    seed: (1)
    slots: "a..b"  (0..60, half-open)
    attacks: list of {kind, target, slot_lo, slot_hi} ([])
    baseline: bool (false)
    alibi_f: (0.0)
    alibi_slope: linear delay/great-circle factor (1.6)
    min_elevation_deg: (25.0)
    cross_seam: (true)
    alpha_s: per-packet source processing time (0.0)
    payload_len: (256)
    freshness_us: (2000000)
    rel_tol: equal-cost tolerance for planning (0.0)
    keys: optional {pair: {"src:dst": hex}, node: {"p:n": hex}}
"""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from ..adversary import AttackKind, AttackSpec
from ..constellation import KUIPER_SHELL1, STARLINK_SHELL1, ShellConfig
from ..riskmap import RiskArea, load_risk_csv
from ..topology import GroundEntity, load_ground_csv, load_pairs_csv
from ..veriproto.protocol import DEFAULT_FRESHNESS_US, JitterModel

SHELL_PRESETS = {
    "starlink1": STARLINK_SHELL1,
    "kuiper1": KUIPER_SHELL1,
}


@dataclass
class ScenarioConfig:
    shell: ShellConfig
    ground: list
    pairs: list
    risk_area: RiskArea
    theta: int = 1
    sigma: int = 2
    probing_period_s: float = 15.0
    jitter: JitterModel = field(default_factory=JitterModel)
    seed: int = 1
    slot_lo: int = 0
    slot_hi: int = 60
    attacks: list = field(default_factory=list)
    baseline: bool = False
    alibi_f: float = 0.0
    alibi_slope: float = 1.6
    min_elevation_deg: float = 25.0
    cross_seam: bool = True
    alpha_s: float = 0.0
    payload_len: int = 256
    freshness_us: int = DEFAULT_FRESHNESS_US
    rel_tol: float = 0.0
    key_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.slot_hi <= self.slot_lo:
            raise ValueError("empty slot range")
        if self.sigma > 2:
            raise ValueError("relay budget capped at 2")
        ids = {e.id for e in self.ground}
        for s, d in self.pairs:
            if s not in ids or d not in ids:
                raise ValueError(f"pair ({s}, {d}) references unknown entity")

    @property
    def slots(self):
        return range(self.slot_lo, self.slot_hi)


def _data_path(name: str) -> Path:
    return Path(str(resources.files("leoveri.data").joinpath(name)))


def resolve_input(value: str) -> Path:
    if value.startswith("builtin:"):
        return _data_path(value.split(":", 1)[1])
    return Path(value)


def _parse_shell(raw) -> ShellConfig:
    if isinstance(raw, str):
        try:
            return SHELL_PRESETS[raw]
        except KeyError:
            raise ValueError(f"unknown shell preset {raw!r}") from None
    return ShellConfig(
        orbit_count=int(raw["orbit_count"]),
        sats_per_orbit=int(raw["sats_per_orbit"]),
        inclination_deg=float(raw["inclination_deg"]),
        altitude_km=float(raw["altitude_km"]),
        phase_offset=raw.get("phase_offset"),
        epoch=float(raw.get("epoch", 0.0)),
    )


def parse_slots(text: str) -> tuple[int, int]:
    lo, hi = text.split("..")
    return int(lo), int(hi)


def _parse_attacks(raw) -> list[AttackSpec]:
    out = []
    for item in raw or []:
        out.append(AttackSpec(
            kind=AttackKind(item["kind"]),
            target=item.get("target"),
            slot_lo=int(item.get("slot_lo", 0)),
            slot_hi=int(item.get("slot_hi", 2 ** 31)),
        ))
    return out


def load_config(path, *, seed=None, slots=None) -> ScenarioConfig:
    """Read a scenario file; `seed` / `slots` override the file values."""
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    shell = _parse_shell(raw.get("shell", "starlink1"))
    ground = load_ground_csv(resolve_input(raw.get("ground_csv",
                                                   "builtin:ground_stations.csv")))
    pairs = load_pairs_csv(resolve_input(raw.get("pairs_csv",
                                                 "builtin:city_pairs.csv")))
    area = load_risk_csv(resolve_input(raw.get("risk_csv",
                                               "builtin:risk_egypt.csv")))
    jr = raw.get("jitter") or {}
    jitter = JitterModel(
        kind=jr.get("kind", "none"),
        per_hop_s=float(jr.get("per_hop_s", 0.0)),
        low_s=float(jr.get("low_s", 0.0)),
        high_s=float(jr.get("high_s", 0.0)),
        mu=float(jr.get("mu", -9.0)),
        sigma=float(jr.get("sigma", 0.5)),
    )
    lo, hi = parse_slots(raw.get("slots", "0..60"))
    if slots is not None:
        lo, hi = slots
    return ScenarioConfig(
        shell=shell,
        ground=ground,
        pairs=pairs,
        risk_area=area,
        theta=int(raw.get("theta", 1)),
        sigma=int(raw.get("sigma", 2)),
        probing_period_s=float(raw.get("probing_period_s", 15.0)),
        jitter=jitter,
        seed=int(raw.get("seed", 1)) if seed is None else int(seed),
        slot_lo=lo,
        slot_hi=hi,
        attacks=_parse_attacks(raw.get("attacks")),
        baseline=bool(raw.get("baseline", False)),
        alibi_f=float(raw.get("alibi_f", 0.0)),
        alibi_slope=float(raw.get("alibi_slope", 1.6)),
        min_elevation_deg=float(raw.get("min_elevation_deg", 25.0)),
        cross_seam=bool(raw.get("cross_seam", True)),
        alpha_s=float(raw.get("alpha_s", 0.0)),
        payload_len=int(raw.get("payload_len", 256)),
        freshness_us=int(raw.get("freshness_us", DEFAULT_FRESHNESS_US)),
        rel_tol=float(raw.get("rel_tol", 0.0)),
        key_overrides=raw.get("keys") or {},
    )
