"""Turn a use-case description into trade-off weights plus a justification.

A pluggable client queries an external language model; without one (or when
every query fails) a deterministic keyword lookup supplies the weights, so
the pipeline works fully offline.
"""
from __future__ import annotations

import json
import math
import os
import re
import time
from dataclasses import dataclass
from typing import Callable, Protocol

import httpx

from .core import ConfigError, MetricWeights, ModelPickError

METRICS = ("accuracy", "size", "complexity")

# Sent verbatim as the system message on every client call.
SYSTEM_TEMPLATE = (
    "You select evaluation trade-off weights for choosing a pretrained model. "
    "Given the use case below, return only a JSON object with numeric fields "
    "accuracy, size, complexity in [0,1] and a string field justification."
)

ENDPOINT_ENV = "MODELPICK_LLM_URL"
CREDENTIAL_ENV = "MODELPICK_LLM_TOKEN"

MAX_RETRIES = 2          # extra attempts per sample after the first
BACKOFF_CAP_SECONDS = 4.0

# Keyword classes scanned in priority order; first hit wins. The edge profile
# is pinned to the averaged weights observed for drone-style deployments.
FALLBACK_PROFILES = (
    ("edge", ("drone", "mobile", "embedded", "edge", "iot", "battery"), (0.63, 0.25, 0.21)),
    ("latency", ("autonomous", "vehicle", "real-time", "latency"), (0.70, 0.10, 0.40)),
    ("server", ("server", "datacenter", "cloud", "offline"), (0.80, 0.10, 0.10)),
)
BALANCED_PROFILE = (0.34, 0.33, 0.33)


class ResponseParseError(ModelPickError):
    """Client response carried no usable weights object."""


class ClientError(ModelPickError):
    """Transport-level client failure (after retries)."""


class LLMClient(Protocol):
    def complete(self, system: str, user: str) -> str:
        """Return the raw response body for one (system, user) request."""
        ...


class HttpLLMClient:
    """POSTs {system, user} as JSON to the endpoint named by environment.

    The endpoint URL and credential are configuration, never hard-coded:
    set MODELPICK_LLM_URL and (optionally) MODELPICK_LLM_TOKEN.
    """

    def __init__(self, url: str | None = None, token: str | None = None, timeout: float = 30.0):
        self.url = url if url is not None else os.environ.get(ENDPOINT_ENV, "")
        self.token = token if token is not None else os.environ.get(CREDENTIAL_ENV, "")
        self.timeout = timeout
        if not self.url:
            raise ClientError(f"no LLM endpoint configured (set {ENDPOINT_ENV})")

    def complete(self, system: str, user: str) -> str:
        headers = {"content-type": "application/json"}
        if self.token:
            headers["authorization"] = f"Bearer {self.token}"
        try:
            resp = httpx.post(
                self.url,
                json={"system": system, "user": user},
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise ClientError(f"LLM request failed: {exc}") from exc
        return resp.text


def client_from_env() -> HttpLLMClient | None:
    """Build the HTTP client if an endpoint is configured, else None."""
    if not os.environ.get(ENDPOINT_ENV):
        return None
    return HttpLLMClient()


@dataclass(frozen=True)
class WeightProposal:
    """Proposed trade-off weights plus how they were obtained."""

    weights: MetricWeights
    justification: str
    provenance: str  # "llm" or "fallback"
    samples_used: int
    per_metric_stddev: dict[str, float]
    clamped: bool = False

    def as_dict(self) -> dict:
        return {
            "kind": "weight_proposal",
            "weights": self.weights.as_dict(),
            "justification": self.justification,
            "provenance": self.provenance,
            "samples_used": self.samples_used,
            "per_metric_stddev": {k: float(v) for k, v in self.per_metric_stddev.items()},
            "clamped": self.clamped,
        }


def fallback_weights(prompt: str) -> MetricWeights:
    """Deterministic keyword-profile weights; the pure offline substitute."""
    text = prompt.lower()
    for _name, keywords, profile in FALLBACK_PROFILES:
        for kw in keywords:
            if re.search(rf"\b{re.escape(kw)}\b", text):
                return MetricWeights(*profile)
    return MetricWeights(*BALANCED_PROFILE)


def _fallback_profile_name(prompt: str) -> str:
    text = prompt.lower()
    for name, keywords, _profile in FALLBACK_PROFILES:
        for kw in keywords:
            if re.search(rf"\b{re.escape(kw)}\b", text):
                return name
    return "balanced"


def _fallback_justification(prompt: str, w: MetricWeights) -> str:
    profile = _fallback_profile_name(prompt)
    return (
        f"Offline keyword profile '{profile}'. "
        f"accuracy: weighted {w.accuracy:g} for correct predictions on the target data. "
        f"size: weighted {w.size:g} to favor smaller models. "
        f"complexity: weighted {w.complexity:g} to favor cheaper inference."
    )


def parse_llm_response(text: str) -> tuple[MetricWeights, str, bool]:
    """Extract (weights, justification, clamped) from a raw response body.

    Scans for the first JSON object carrying numeric accuracy/size/complexity
    fields; out-of-range weights are clamped into [0, 1] and flagged.
    """
    decoder = json.JSONDecoder()
    pos = text.find("{")
    while pos != -1:
        try:
            obj, _end = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            pos = text.find("{", pos + 1)
            continue
        if isinstance(obj, dict) and all(
            isinstance(obj.get(m), (int, float)) and not isinstance(obj.get(m), bool)
            for m in METRICS
        ):
            clamped = False
            vals = {}
            for m in METRICS:
                v = float(obj[m])
                cv = min(1.0, max(0.0, v))
                clamped = clamped or cv != v
                vals[m] = cv
            try:
                weights = MetricWeights(vals["accuracy"], vals["size"], vals["complexity"])
            except ConfigError as exc:
                raise ResponseParseError(f"weights object unusable after clamping: {exc}") from exc
            justification = obj.get("justification")
            return weights, str(justification) if isinstance(justification, str) else "", clamped
        pos = text.find("{", pos + 1)
    raise ResponseParseError("no weights object found in response")


def _mean_and_stddev(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def _query_with_retries(client: LLMClient, prompt: str, sleep: Callable[[float], None]) -> str:
    attempt = 0
    while True:
        try:
            return client.complete(SYSTEM_TEMPLATE, prompt)
        except Exception as exc:
            if attempt >= MAX_RETRIES:
                raise ClientError(f"client failed after {attempt + 1} attempts: {exc}") from exc
            sleep(min(BACKOFF_CAP_SECONDS, 2.0**attempt))
            attempt += 1


def _fallback_proposal(prompt: str, n_samples: int) -> WeightProposal:
    weights = fallback_weights(prompt)
    return WeightProposal(
        weights=weights,
        justification=_fallback_justification(prompt, weights),
        provenance="fallback",
        samples_used=n_samples,
        per_metric_stddev={m: 0.0 for m in METRICS},
    )


def propose_weights(
    prompt: str,
    n_samples: int = 1,
    client: LLMClient | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> WeightProposal:
    """Average n_samples client responses into one proposal.

    The response stream is non-deterministic, so each sample is parsed
    independently and the per-metric mean and sample standard deviation are
    reported; samples that fail to parse are dropped. With no client, or when
    every sample fails, the deterministic fallback supplies the weights.
    """
    if not prompt:
        raise ConfigError("prompt", "must be nonempty")
    if n_samples < 1:
        raise ConfigError("samples", "must be >= 1")
    if client is None:
        return _fallback_proposal(prompt, n_samples)

    parsed: list[MetricWeights] = []
    justification = ""
    clamped = False
    for _ in range(n_samples):
        try:
            body = _query_with_retries(client, prompt, sleep)
        except ClientError:
            continue
        try:
            weights, just, was_clamped = parse_llm_response(body)
        except ResponseParseError:
            continue
        if not parsed:
            justification = just
        parsed.append(weights)
        clamped = clamped or was_clamped

    if not parsed:
        return _fallback_proposal(prompt, n_samples)

    means = {}
    stddevs = {}
    for m in METRICS:
        mean, sd = _mean_and_stddev([getattr(w, m) for w in parsed])
        means[m] = mean
        stddevs[m] = sd
    return WeightProposal(
        weights=MetricWeights(means["accuracy"], means["size"], means["complexity"]),
        justification=justification,
        provenance="llm",
        samples_used=len(parsed),
        per_metric_stddev=stddevs,
        clamped=clamped,
    )
