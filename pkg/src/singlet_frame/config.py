"""Declarative experiment configuration: JSON schema, validation, canonical form.

A config file is a single JSON object.  Required keys: ``mode`` ("exact"
or "sampled"), exactly one of ``alice_direction`` / ``alice_frame``
(polar angles, radians), ``trials``, ``batch``.  Optional:
``refine_rounds`` (default 3), ``prior`` (default disabled), ``seed``
(required in sampled mode), ``stream`` (default 0), ``jitter_seed``,
``orthonormalize`` (frame runs only), ``out``.

Angles: {"theta": t, "phi": p}.  Prior: {"enabled": bool, "pole": angle}
or, for frame runs, {"enabled": bool, "poles": [angle, angle, angle]}.

``canonical_dict`` materializes defaults; parsing its output yields an
equal config (round-trip stability).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import Direction, direction_from_polar
from .protocol import HemispherePrior, ProtocolParams
from .sampler import SamplerConfig

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config", "canonical_dict"]

_U64_MAX = (1 << 64) - 1


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    alice_direction: tuple[float, float] | None
    alice_frame: tuple[tuple[float, float], ...] | None
    trials: int
    batch: int
    refine_rounds: int
    prior_enabled: bool
    prior_poles: tuple[tuple[float, float], ...] | None
    seed: int | None
    stream: int
    jitter_seed: int | None
    orthonormalize: bool
    out: str | None

    @property
    def is_frame(self) -> bool:
        return self.alice_frame is not None

    def truth_direction(self) -> Direction:
        return direction_from_polar(*self.alice_direction)

    def truth_frame(self) -> tuple[Direction, Direction, Direction]:
        return tuple(direction_from_polar(t, p) for t, p in self.alice_frame)

    def priors(self) -> tuple[HemispherePrior, ...]:
        """One prior per target axis (a single one for direction runs)."""
        n = 3 if self.is_frame else 1
        if not self.prior_enabled:
            return tuple(HemispherePrior.none() for _ in range(n))
        poles = self.prior_poles
        if len(poles) == 1:
            poles = poles * n
        return tuple(HemispherePrior.around(direction_from_polar(t, p)) for t, p in poles)

    def protocol_params(self) -> ProtocolParams:
        return ProtocolParams(
            n_trials=self.trials,
            batch_size=self.batch,
            refine_rounds=self.refine_rounds,
            prior=self.priors()[0],
            config=SamplerConfig(self.seed, self.stream) if self.mode == "sampled" else None,
            mode=self.mode,
            jitter_seed=self.jitter_seed,
        )


def _angle_pair(value, field: str) -> tuple[float, float]:
    if not isinstance(value, dict) or set(value) != {"theta", "phi"}:
        raise ConfigError(f"field '{field}': expected an object with keys 'theta' and 'phi'")
    out = []
    for key in ("theta", "phi"):
        v = value[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != v or v in (float("inf"), float("-inf")):
            raise ConfigError(f"field '{field}.{key}': must be a finite number")
        out.append(float(v))
    return tuple(out)


def _uint64(value, field: str):
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value <= _U64_MAX:
        raise ConfigError(f"field '{field}': must be an integer in [0, 2**64)")
    return value


def _positive_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"field '{field}': must be a positive integer")
    return value


def _bool(value, field: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"field '{field}': must be true or false")
    return value


_KNOWN_KEYS = {
    "mode", "alice_direction", "alice_frame", "trials", "batch", "refine_rounds",
    "prior", "seed", "stream", "jitter_seed", "orthonormalize", "out",
}


def parse_config(data) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root: must be a JSON object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"field '{unknown[0]}': unknown key")

    mode = data.get("mode")
    if mode not in ("exact", "sampled"):
        raise ConfigError("field 'mode': must be 'exact' or 'sampled'")

    has_dir = "alice_direction" in data
    has_frame = "alice_frame" in data
    if has_dir == has_frame:
        raise ConfigError("field 'alice_direction': exactly one of 'alice_direction'/'alice_frame' is required")

    alice_direction = _angle_pair(data["alice_direction"], "alice_direction") if has_dir else None
    alice_frame = None
    if has_frame:
        raw = data["alice_frame"]
        if not isinstance(raw, list) or len(raw) != 3:
            raise ConfigError("field 'alice_frame': must be a list of three angle pairs")
        alice_frame = tuple(_angle_pair(v, f"alice_frame[{i}]") for i, v in enumerate(raw))
        axes = [direction_from_polar(t, p) for t, p in alice_frame]
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(axes[i].dot(axes[j])) > 1e-10:
                    raise ConfigError("field 'alice_frame': axes must be orthonormal within 1e-10")

    if "trials" not in data:
        raise ConfigError("field 'trials': required")
    if "batch" not in data:
        raise ConfigError("field 'batch': required")
    trials = _positive_int(data["trials"], "trials")
    batch = _positive_int(data["batch"], "batch")

    refine_rounds = data.get("refine_rounds", 3)
    if isinstance(refine_rounds, bool) or not isinstance(refine_rounds, int) or refine_rounds < 0:
        raise ConfigError("field 'refine_rounds': must be a nonnegative integer")

    prior_enabled = False
    prior_poles = None
    if "prior" in data:
        prior = data["prior"]
        if not isinstance(prior, dict):
            raise ConfigError("field 'prior': must be an object")
        unknown = sorted(set(prior) - {"enabled", "pole", "poles"})
        if unknown:
            raise ConfigError(f"field 'prior.{unknown[0]}': unknown key")
        prior_enabled = _bool(prior.get("enabled", False), "prior.enabled")
        if "pole" in prior and "poles" in prior:
            raise ConfigError("field 'prior.pole': give either 'pole' or 'poles', not both")
        if prior_enabled:
            if "pole" in prior:
                prior_poles = (_angle_pair(prior["pole"], "prior.pole"),)
            elif "poles" in prior:
                raw = prior["poles"]
                if not isinstance(raw, list) or len(raw) != 3:
                    raise ConfigError("field 'prior.poles': must be a list of three angle pairs")
                prior_poles = tuple(_angle_pair(v, f"prior.poles[{i}]") for i, v in enumerate(raw))
                if not has_frame:
                    raise ConfigError("field 'prior.poles': only valid with 'alice_frame'")
            else:
                raise ConfigError("field 'prior.pole': required when the prior is enabled")

    seed = None
    if mode == "sampled":
        if "seed" not in data or data["seed"] is None:
            raise ConfigError("field 'seed': required when mode='sampled'")
        seed = _uint64(data["seed"], "seed")
    elif data.get("seed") is not None:
        seed = _uint64(data["seed"], "seed")

    stream = _uint64(data.get("stream", 0), "stream")

    jitter_seed = data.get("jitter_seed")
    if jitter_seed is not None:
        jitter_seed = _uint64(jitter_seed, "jitter_seed")

    orthonormalize = _bool(data.get("orthonormalize", False), "orthonormalize")
    if orthonormalize and not has_frame:
        raise ConfigError("field 'orthonormalize': only valid with 'alice_frame'")

    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'out': must be a string path")

    return ExperimentConfig(
        mode=mode,
        alice_direction=alice_direction,
        alice_frame=alice_frame,
        trials=trials,
        batch=batch,
        refine_rounds=refine_rounds,
        prior_enabled=prior_enabled,
        prior_poles=prior_poles,
        seed=seed,
        stream=stream,
        jitter_seed=jitter_seed,
        orthonormalize=orthonormalize,
        out=out,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"config file {path}: {e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path}: line {e.lineno}: {e.msg}") from None
    return parse_config(data)


def _angle_dict(pair: tuple[float, float]) -> dict:
    return {"theta": pair[0], "phi": pair[1]}


def canonical_dict(cfg: ExperimentConfig) -> dict:
    """Config as a plain dict with all defaults materialized."""
    out: dict = {"mode": cfg.mode}
    if cfg.alice_direction is not None:
        out["alice_direction"] = _angle_dict(cfg.alice_direction)
    else:
        out["alice_frame"] = [_angle_dict(p) for p in cfg.alice_frame]
    out["trials"] = cfg.trials
    out["batch"] = cfg.batch
    out["refine_rounds"] = cfg.refine_rounds
    prior: dict = {"enabled": cfg.prior_enabled}
    if cfg.prior_poles is not None:
        if len(cfg.prior_poles) == 1:
            prior["pole"] = _angle_dict(cfg.prior_poles[0])
        else:
            prior["poles"] = [_angle_dict(p) for p in cfg.prior_poles]
    out["prior"] = prior
    if cfg.seed is not None:
        out["seed"] = cfg.seed
    out["stream"] = cfg.stream
    if cfg.jitter_seed is not None:
        out["jitter_seed"] = cfg.jitter_seed
    out["orthonormalize"] = cfg.orthonormalize
    if cfg.out is not None:
        out["out"] = cfg.out
    return out
