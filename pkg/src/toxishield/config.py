"""Service configuration: plain INI-style file, environment overrides.

Precedence (lowest to highest): built-in defaults, config file,
``TOXISHIELD_<SECTION>_<KEY>`` environment variables, then the dedicated
``LLM_ENDPOINT`` / ``LLM_MODEL`` variables. Secrets never live in the
file: the LLM key is read from the environment variable named by
``llm.api_key_env`` at request time, and a literal key in the file is a
startup error.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ConfigError
from .filter import Backend, ClassifierHandle, Lexicon, DEFAULT_THRESHOLD
from .llm.client import GenParams, HttpChatClient
from .llm.prompts import PromptConfig, Stage
from .tokenizer import DEFAULT_MAX_LEN

KNOWN_SECTIONS = ("service", "filter", "tokenizer", "llm", "prompt")

ENV_PREFIX = "TOXISHIELD_"


@dataclass(frozen=True)
class FilterSettings:
    backend: Backend = Backend.LEXICON
    model_path: str = ""
    vocab_path: str = ""
    lexicon_path: str = ""
    threshold: float = DEFAULT_THRESHOLD


@dataclass(frozen=True)
class LlmSettings:
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "LLM_API_KEY"
    temperature: float = 0.0
    max_output_tokens: int = 256
    retries: int = 2
    timeout_s: float = 30.0

    def gen_params(self) -> GenParams:
        return GenParams(
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
            retries=self.retries,
            timeout_s=self.timeout_s,
        )


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    cors_origins: tuple[str, ...] = ()
    parallel_stages: bool = True
    llm_concurrency: int = 4
    coach_timeout_s: float = 30.0
    reframe_timeout_s: float = 30.0
    filter: FilterSettings = field(default_factory=FilterSettings)
    llm: LlmSettings = field(default_factory=LlmSettings)
    tokenizer_max_len: int = DEFAULT_MAX_LEN
    prompt_stage: Stage = Stage.S4

    def make_handle(self) -> ClassifierHandle:
        """Build the classifier handle this config describes."""
        if self.filter.backend is Backend.LEXICON:
            lexicon = (
                Lexicon.from_file(self.filter.lexicon_path)
                if self.filter.lexicon_path
                else Lexicon.bundled()
            )
            return ClassifierHandle.lexicon_backend(lexicon, self.filter.threshold)
        return ClassifierHandle.serialized_backend(
            self.filter.model_path,
            self.filter.vocab_path,
            threshold=self.filter.threshold,
            max_len=self.tokenizer_max_len,
        )

    def make_client(self) -> "HttpChatClient | None":
        """HTTP chat client, or None when no endpoint is configured."""
        if not self.llm.endpoint:
            return None
        return HttpChatClient(
            endpoint=self.llm.endpoint,
            model=self.llm.model,
            api_key_env=self.llm.api_key_env,
        )

    def make_prompt_config(self) -> PromptConfig:
        lexicon = (
            Lexicon.from_file(self.filter.lexicon_path)
            if self.filter.lexicon_path
            else Lexicon.bundled()
        )
        return PromptConfig.default(stage=self.prompt_stage, lexicon=lexicon)


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _parse_stage(value: str) -> Stage:
    name = value.strip().upper()
    if not name.startswith("S"):
        name = f"S{name}"
    try:
        return Stage[name]
    except KeyError:
        raise ConfigError(f"unknown prompt stage {value!r} (expected S1..S5)") from None


def _env_overrides(env: Mapping[str, str]) -> dict[str, dict[str, str]]:
    overrides: dict[str, dict[str, str]] = {}
    for name, value in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):].lower()
        section, _, key = rest.partition("_")
        if section in KNOWN_SECTIONS and key:
            overrides.setdefault(section, {})[key] = value
    return overrides


def load_config(
    path: "Path | str | None" = None,
    env: "Mapping[str, str] | None" = None,
) -> ServiceConfig:
    """Load, merge, and validate configuration.

    Raises:
        ConfigError: unreadable file, malformed values, or a secret
            stored in the file.
    """
    env = os.environ if env is None else env
    values: dict[str, dict[str, str]] = {s: {} for s in KNOWN_SECTIONS}

    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        for section in parser.sections():
            if section not in KNOWN_SECTIONS:
                continue  # unknown sections ignored for forward compatibility
            for key, value in parser.items(section):
                values[section][key] = value

    for section, pairs in _env_overrides(env).items():
        values[section].update(pairs)

    if "api_key" in values["llm"]:
        raise ConfigError(
            "llm.api_key must not be set in config; export the key via the "
            "environment variable named by llm.api_key_env"
        )

    for name in ("LLM_ENDPOINT", "LLM_MODEL"):
        if env.get(name):
            key = name.split("_", 1)[1].lower()
            values["llm"][key] = env[name]

    svc = values["service"]
    flt = values["filter"]
    llm = values["llm"]
    tok = values["tokenizer"]
    prm = values["prompt"]

    try:
        backend = Backend(flt.get("backend", Backend.LEXICON.value))
    except ValueError:
        raise ConfigError(
            f"unknown filter.backend {flt.get('backend')!r}; "
            f"expected one of {[b.value for b in Backend]}"
        ) from None

    try:
        config = ServiceConfig(
            host=svc.get("host", "127.0.0.1"),
            port=int(svc.get("port", "8765")),
            cors_origins=tuple(
                origin.strip()
                for origin in svc.get("cors_origins", "").split(",")
                if origin.strip()
            ),
            parallel_stages=_parse_bool(svc.get("parallel_stages", "true")),
            llm_concurrency=int(svc.get("llm_concurrency", "4")),
            coach_timeout_s=float(svc.get("coach_timeout_s", "30")),
            reframe_timeout_s=float(svc.get("reframe_timeout_s", "30")),
            filter=FilterSettings(
                backend=backend,
                model_path=flt.get("model_path", ""),
                vocab_path=flt.get("vocab_path", ""),
                lexicon_path=flt.get("lexicon_path", ""),
                threshold=float(flt.get("threshold", str(DEFAULT_THRESHOLD))),
            ),
            llm=LlmSettings(
                endpoint=llm.get("endpoint", ""),
                model=llm.get("model", ""),
                api_key_env=llm.get("api_key_env", "LLM_API_KEY"),
                temperature=float(llm.get("temperature", "0.0")),
                max_output_tokens=int(llm.get("max_output_tokens", "256")),
                retries=int(llm.get("retries", "2")),
                timeout_s=float(llm.get("timeout_s", "30")),
            ),
            tokenizer_max_len=int(tok.get("max_len", str(DEFAULT_MAX_LEN))),
            prompt_stage=_parse_stage(prm.get("stage", "S4")),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    _validate(config)
    return config


def _validate(config: ServiceConfig) -> None:
    if not 0 < config.port < 65536:
        raise ConfigError(f"port out of range: {config.port}")
    if not 0.0 <= config.filter.threshold <= 1.0:
        raise ConfigError(f"filter.threshold out of [0,1]: {config.filter.threshold}")
    if config.tokenizer_max_len < 3:
        raise ConfigError("tokenizer.max_len must be >= 3")
    if config.llm_concurrency < 1:
        raise ConfigError("service.llm_concurrency must be >= 1")
    if config.coach_timeout_s <= 0 or config.reframe_timeout_s <= 0:
        raise ConfigError("stage timeouts must be positive")
    if config.filter.backend is Backend.SERIALIZED_MODEL:
        if not config.filter.model_path or not config.filter.vocab_path:
            raise ConfigError(
                "serialized_model backend requires filter.model_path and filter.vocab_path"
            )
