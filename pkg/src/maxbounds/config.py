"""Sectioned ``key = value`` config files for the command line.

Recognized sections and keys::

    [process]      kind, hurst, n_steps, n_paths, horizon,
                   series_gamma, series_k_max, series_scale
    [spec]         p, theta, q, delta, alpha
    [experiment]   name, seed, confidence, threads, t_marginal,
                   marginal_two_sided, random_times_equal, suite_samples
    [band]         a, b
    [lambda_grid]  values, marginal        (comma-separated)

Lines starting with ``#`` are comments.  Unknown sections or keys are errors,
so a typo never silently falls back to a default.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .verify import ExperimentConfig

__all__ = ["LoadedConfig", "load_config", "parse_config"]


def _int(text: str) -> int:
    return int(text, 0)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


# (section, key) -> (ExperimentConfig field, parser)
_KEYS = {
    ("process", "kind"): ("process", str),
    ("process", "hurst"): ("hurst", float),
    ("process", "n_steps"): ("n_steps", _int),
    ("process", "n_paths"): ("n_paths", _int),
    ("process", "horizon"): ("horizon", float),
    ("process", "series_gamma"): ("series_gamma", float),
    ("process", "series_k_max"): ("series_k_max", _int),
    ("process", "series_scale"): ("series_scale", float),
    ("spec", "p"): ("p", float),
    ("spec", "theta"): ("theta", float),
    ("spec", "q"): ("q", float),
    ("spec", "delta"): ("delta", float),
    ("spec", "alpha"): ("alpha", float),
    ("experiment", "name"): ("experiment", str),
    ("experiment", "seed"): ("seed", _int),
    ("experiment", "confidence"): ("confidence", float),
    ("experiment", "threads"): ("threads", _int),
    ("experiment", "t_marginal"): ("t_marginal", float),
    ("experiment", "marginal_two_sided"): ("marginal_two_sided", _bool),
    ("experiment", "random_times_equal"): ("random_times_equal", _bool),
    ("experiment", "suite_samples"): ("suite_samples", _int),
    ("lambda_grid", "values"): ("lambdas", _floats),
    ("lambda_grid", "marginal"): ("marginal_lambdas", _floats),
}
_SECTIONS = {"process", "spec", "experiment", "band", "lambda_grid"}


@dataclass(frozen=True)
class LoadedConfig:
    """Parsed settings plus which of them the file set explicitly."""

    settings: dict
    path: str | None = None

    @property
    def has_seed(self) -> bool:
        return "seed" in self.settings

    @property
    def has_threads(self) -> bool:
        return "threads" in self.settings

    def experiment_config(self, **overrides) -> ExperimentConfig:
        kw = dict(self.settings)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig(**kw)


def parse_config(text: str, path: str | None = None) -> LoadedConfig:
    cp = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                   interpolation=None)
    try:
        cp.read_string(text, source=path or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    settings = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if section == "band":
                if key not in ("a", "b"):
                    raise ConfigError(f"unknown key {key!r} in [band]")
                continue
            try:
                name, parse = _KEYS[(section, key)]
            except KeyError:
                raise ConfigError(f"unknown key {key!r} in [{section}]") from None
            try:
                settings[name] = parse(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for {key} in [{section}]: {exc}") from exc
    if cp.has_section("band"):
        try:
            settings["band"] = (float(cp.get("band", "a")), float(cp.get("band", "b")))
        except (configparser.NoOptionError, ValueError) as exc:
            raise ConfigError(f"[band] needs numeric a and b: {exc}") from exc
    return LoadedConfig(settings, path)


def load_config(path: str | Path | None) -> LoadedConfig:
    if path is None:
        return LoadedConfig({}, None)
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config(p.read_text(encoding="utf-8"), str(p))
