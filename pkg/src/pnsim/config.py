"""Run configuration: presets, config files, validation.

Presets bind (node count, mean block interval, block size) to well-known
network profiles; every field can still be overridden individually. Config
files are INI, with sections named after the modules whose behavior they
control; command-line flags take precedence over file values.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .netmodel import UniformOverride
from .pns import ConfigurationError, FixedRandomPolicy, Policy, ProposedPolicy

# preset -> (nodes, mean interval ms, block size bytes)
PRESETS: dict[str, tuple[int, int, int]] = {
    "bitcoin": (6000, 600_000, 546_816),   # 10 min, 534 KiB
    "litecoin": (800, 150_000, 6_257),     # 2 min 30 s, 6.11 KiB
    "dogecoin": (600, 60_000, 8_192),      # 1 min, 8 KiB
}


@dataclass(frozen=True)
class RunConfig:
    nodes: int
    interval_ms: int
    block_size: int
    blocks: int
    seed: int
    policy: Policy
    preset: str = "custom"
    region_dataset: Optional[str] = None   # None -> packaged default
    uniform_network: Optional[UniformOverride] = None
    uniform_mining: bool = False

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ConfigurationError("node count must be >= 1")
        if self.interval_ms < 1:
            raise ConfigurationError("mean block interval must be >= 1 ms")
        if self.block_size < 1:
            raise ConfigurationError("block size must be >= 1 byte")
        if self.blocks < 0:
            raise ConfigurationError("block target must be >= 0")
        if self.preset != "custom" and self.preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {self.preset!r}")

    def describe(self) -> dict:
        """Flat JSON-friendly echo of every knob, for run summaries."""
        policy = self.policy
        if isinstance(policy, ProposedPolicy):
            policy_echo = {"variant": "proposed", "P": policy.score_weight,
                           "K": policy.random_slots,
                           "reselect_every": policy.reselect_every,
                           "outbound_slots": policy.outbound_slots,
                           "inbound_cap": policy.inbound_cap}
        else:
            policy_echo = {"variant": "fixed-random",
                           "outbound_slots": policy.outbound_slots,
                           "inbound_cap": policy.inbound_cap}
        override = self.uniform_network
        return {
            "preset": self.preset,
            "nodes": self.nodes,
            "interval_ms": self.interval_ms,
            "block_size": self.block_size,
            "blocks": self.blocks,
            "seed": self.seed,
            "policy": policy_echo,
            "region_dataset": self.region_dataset,
            "uniform_network": None if override is None else
                {"latency_ms": override.latency_ms, "bandwidth_bps": override.bandwidth_bps},
            "uniform_mining": self.uniform_mining,
        }


def preset_config(name: str, *, blocks: int, seed: int, policy: Policy,
                  nodes: Optional[int] = None, **kwargs) -> RunConfig:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}")
    preset_nodes, interval_ms, block_size = PRESETS[name]
    return RunConfig(nodes=nodes if nodes is not None else preset_nodes,
                     interval_ms=interval_ms, block_size=block_size,
                     blocks=blocks, seed=seed, policy=policy, preset=name,
                     **kwargs)


def with_policy(cfg: RunConfig, policy: Policy) -> RunConfig:
    return replace(cfg, policy=policy)


# Config-file keys, grouped by the module they configure. Values are parsed
# exactly like the equivalent command-line flag.
FILE_KEYS = {
    "cli": ("preset", "blocks", "seed", "out"),
    "p2p": ("nodes",),
    "chain": ("interval-ms", "block-size", "uniform-mining"),
    "pns": ("policy", "p", "k", "reselect-every", "outbound", "inbound-cap"),
    "netmodel": ("region-dataset", "uniform-network"),
}


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat {flag-name: raw value} from an INI file; unknown keys rejected."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file {path} not found")
    values: dict[str, str] = {}
    for section in parser.sections():
        if section not in FILE_KEYS:
            raise ConfigurationError(f"unknown config section [{section}]")
        allowed = FILE_KEYS[section]
        for key, value in parser.items(section):
            key = key.replace("_", "-")
            if key not in allowed:
                raise ConfigurationError(f"unknown key {key!r} in section [{section}]")
            values[key] = value
    return values
