"""Pipeline orchestration and the local HTTP API.

``analyze`` runs the three-stage flow: local filter first; only text the
filter judges toxic ever reaches the coach (subcategory classification)
and the rewriter, which run concurrently by default. A failed downstream
stage degrades the verdict instead of aborting it; only a filter failure
is fatal. Non-toxic text short-circuits with zero outbound LLM calls.

HTTP surface (versioned under /v1, unknown request fields ignored):
POST /v1/analyze, /v1/classify, /v1/detoxify; GET /v1/health.
"""
from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .config import ServiceConfig
from .core import BinaryLabel, TextSample
from .errors import (
    ClientError,
    EmptyInput,
    ExhaustedRetries,
    InternalError,
    ToxiShieldError,
)
from .filter import ClassifierHandle, decide, score
from .llm.client import ChatClient, GenParams
from .llm.ops import classify_subcategories, detoxify
from .llm.parsing import ClassificationResult, DetoxResult
from .llm.prompts import PromptConfig


@dataclass(frozen=True)
class DegradedFlags:
    """Which downstream stages failed, and why."""

    coach: bool = False
    reframer: bool = False
    reasons: tuple[str, ...] = ()

    @property
    def any(self) -> bool:
        return self.coach or self.reframer


@dataclass(frozen=True)
class AnalysisVerdict:
    """Everything the pipeline produced for one input.

    ``timings_ms`` holds non-overlapping spans: ``filter`` plus
    ``downstream`` (the coach/rewriter phase, zero on the short-circuit
    path) add up to ``total`` within bookkeeping error. ``coach`` and
    ``reframer`` are informational per-stage durations; they overlap when
    the stages run concurrently.
    """

    id: str
    score: float
    label: BinaryLabel
    classification: "ClassificationResult | None" = None
    detox: "DetoxResult | None" = None
    timings_ms: dict = field(default_factory=dict)
    degraded: DegradedFlags = DegradedFlags()


class Pipeline:
    """A configured, reusable analyzer; safe for concurrent use."""

    def __init__(
        self,
        handle: ClassifierHandle,
        coach_client: "ChatClient | None" = None,
        reframe_client: "ChatClient | None" = None,
        prompt_config: "PromptConfig | None" = None,
        gen_params: GenParams = GenParams(),
        parallel_stages: bool = True,
        coach_timeout_s: float = 30.0,
        reframe_timeout_s: float = 30.0,
        llm_concurrency: int = 4,
        model_id: str = "",
    ):
        self.handle = handle
        self.coach_client = coach_client
        self.reframe_client = reframe_client if reframe_client is not None else coach_client
        self.prompt_config = prompt_config
        self.gen_params = gen_params
        self.parallel_stages = parallel_stages
        self.coach_timeout_s = coach_timeout_s
        self.reframe_timeout_s = reframe_timeout_s
        self.model_id = model_id or handle.model_id
        self._llm_slots = threading.BoundedSemaphore(llm_concurrency)
        self._pool = ThreadPoolExecutor(max_workers=max(2, llm_concurrency))

    @classmethod
    def from_config(cls, config: ServiceConfig, **overrides) -> "Pipeline":
        client = config.make_client()
        kwargs = dict(
            handle=config.make_handle(),
            coach_client=client,
            reframe_client=client,
            prompt_config=config.make_prompt_config(),
            gen_params=config.llm.gen_params(),
            parallel_stages=config.parallel_stages,
            coach_timeout_s=config.coach_timeout_s,
            reframe_timeout_s=config.reframe_timeout_s,
            llm_concurrency=config.llm_concurrency,
        )
        kwargs.update(overrides)
        return cls(**kwargs)

    # -- single stages ------------------------------------------------

    def classify(self, sample: TextSample) -> ClassificationResult:
        if self.coach_client is None:
            raise ClientError("transport", "no chat client configured")
        if self.prompt_config is None:
            raise InternalError("no prompt config loaded")
        with self._llm_slots:
            return classify_subcategories(
                sample, self.coach_client, self.prompt_config, self.gen_params
            )

    def rewrite(self, sample: TextSample) -> DetoxResult:
        if self.reframe_client is None:
            raise ClientError("transport", "no chat client configured")
        with self._llm_slots:
            return detoxify(sample, self.reframe_client, self.gen_params)

    # -- full pipeline ------------------------------------------------

    def analyze(self, sample: TextSample) -> AnalysisVerdict:
        """Filter, then (only if toxic) coach + rewriter under timeouts."""
        started = time.perf_counter()
        if not sample.body.strip():
            raise EmptyInput(f"sample {sample.id!r} has empty body")
        try:
            toxicity = score(sample, self.handle)
        except EmptyInput:
            raise
        except Exception as exc:  # filter failure is the only fatal path
            raise InternalError(f"filter stage failed: {exc}") from exc
        label = decide(toxicity, self.handle.threshold)
        filter_ms = (time.perf_counter() - started) * 1000.0

        if label is BinaryLabel.NON_TOXIC:
            total_ms = (time.perf_counter() - started) * 1000.0
            return AnalysisVerdict(
                id=sample.id,
                score=toxicity.p,
                label=label,
                timings_ms={
                    "filter": filter_ms,
                    "downstream": 0.0,
                    "total": total_ms,
                },
            )

        downstream_started = time.perf_counter()
        classification, detox, coach_ms, reframer_ms, reasons = self._run_downstream(sample)
        downstream_ms = (time.perf_counter() - downstream_started) * 1000.0
        total_ms = (time.perf_counter() - started) * 1000.0
        degraded = DegradedFlags(
            coach=classification is None,
            reframer=detox is None,
            reasons=tuple(reasons),
        )
        return AnalysisVerdict(
            id=sample.id,
            score=toxicity.p,
            label=label,
            classification=classification,
            detox=detox,
            timings_ms={
                "filter": filter_ms,
                "downstream": downstream_ms,
                "coach": coach_ms,
                "reframer": reframer_ms,
                "total": total_ms,
            },
            degraded=degraded,
        )

    def _run_downstream(self, sample: TextSample):
        """Run coach and rewriter, isolated from each other's failures."""
        reasons: list[str] = []

        def timed(fn):
            t0 = time.perf_counter()
            result = fn(sample)
            return result, (time.perf_counter() - t0) * 1000.0

        if self.parallel_stages:
            submitted = time.perf_counter()
            coach_future = self._pool.submit(timed, self.classify)
            reframe_future = self._pool.submit(timed, self.rewrite)
            classification, coach_ms = self._collect(
                coach_future, submitted + self.coach_timeout_s, "coach", reasons
            )
            detox, reframer_ms = self._collect(
                reframe_future, submitted + self.reframe_timeout_s, "reframer", reasons
            )
        else:
            coach_future = self._pool.submit(timed, self.classify)
            classification, coach_ms = self._collect(
                coach_future, time.perf_counter() + self.coach_timeout_s, "coach", reasons
            )
            reframe_future = self._pool.submit(timed, self.rewrite)
            detox, reframer_ms = self._collect(
                reframe_future, time.perf_counter() + self.reframe_timeout_s, "reframer", reasons
            )
        return classification, detox, coach_ms, reframer_ms, reasons

    @staticmethod
    def _collect(future, deadline, stage, reasons):
        # deadline anchors each stage's budget to its own submit time, so
        # collecting the first stage never silently extends the second's
        wait_s = max(deadline - time.perf_counter(), 0.0)
        try:
            result, elapsed_ms = future.result(timeout=wait_s)
            return result, elapsed_ms
        except FutureTimeout:
            future.cancel()
            reasons.append(f"{stage}: timed out after {wait_s:.3f}s wait")
            return None, wait_s * 1000.0
        except Exception as exc:
            reasons.append(f"{stage}: {exc}")
            return None, 0.0

# ---------------------------------------------------------------------------
# HTTP layer


class AnalyzeRequest(BaseModel):
    text: str
    id: str = ""

    model_config = {"extra": "ignore"}


def _classification_json(result: "ClassificationResult | None"):
    if result is None:
        return None
    return {
        "labels": [label.value for label in result.labels],
        "rationale": result.rationale,
        "raw_response": result.raw_response,
        "retries_used": result.retries_used,
    }


def _detox_json(result: "DetoxResult | None"):
    if result is None:
        return None
    return {
        "detoxified": result.detoxified,
        "rationale": result.rationale,
        "raw_response": result.raw_response,
        "retries_used": result.retries_used,
    }


def verdict_json(verdict: AnalysisVerdict) -> dict:
    return {
        "id": verdict.id,
        "score": verdict.score,
        "label": verdict.label.value,
        "classification": _classification_json(verdict.classification),
        "detox": _detox_json(verdict.detox),
        "timings_ms": verdict.timings_ms,
        "degraded": {
            "coach": verdict.degraded.coach,
            "reframer": verdict.degraded.reframer,
            "reasons": list(verdict.degraded.reasons),
        },
    }


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, EmptyInput):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, ClientError):
        status = 504 if exc.kind == "timeout" else 502
        return HTTPException(status_code=status, detail=str(exc))
    if isinstance(exc, ExhaustedRetries):
        return HTTPException(status_code=502, detail=str(exc))
    return HTTPException(status_code=500, detail=str(exc))


_request_counter = threading.Lock()
_request_seq = 0


def _next_request_id() -> str:
    global _request_seq
    with _request_counter:
        _request_seq += 1
        return f"req-{_request_seq}"


def create_app(pipeline: Pipeline, cors_origins: tuple[str, ...] = ()) -> FastAPI:
    """Build the FastAPI app around a configured pipeline."""
    app = FastAPI(title="toxishield", version="1")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def to_sample(request: AnalyzeRequest) -> TextSample:
        return TextSample(id=request.id or _next_request_id(), body=request.text)

    @app.post("/v1/analyze")
    def analyze(request: AnalyzeRequest):
        try:
            verdict = pipeline.analyze(to_sample(request))
        except ToxiShieldError as exc:
            raise _http_error(exc) from exc
        return verdict_json(verdict)

    @app.post("/v1/classify")
    def classify(request: AnalyzeRequest):
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="text is empty")
        try:
            result = pipeline.classify(to_sample(request))
        except ToxiShieldError as exc:
            raise _http_error(exc) from exc
        return _classification_json(result)

    @app.post("/v1/detoxify")
    def run_detoxify(request: AnalyzeRequest):
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="text is empty")
        try:
            result = pipeline.rewrite(to_sample(request))
        except ToxiShieldError as exc:
            raise _http_error(exc) from exc
        return _detox_json(result)

    @app.get("/v1/health")
    def health():
        stage = pipeline.prompt_config.stage if pipeline.prompt_config else None
        return {
            "status": "ok",
            "backend": pipeline.handle.backend.value,
            "model_id": pipeline.model_id,
            "threshold": pipeline.handle.threshold,
            "prompt_stage": f"S{int(stage)}" if stage is not None else None,
        }

    return app


def serve(config: ServiceConfig) -> None:
    """Blocking entry point: build the pipeline and run uvicorn."""
    import uvicorn

    pipeline = Pipeline.from_config(config)
    app = create_app(pipeline, cors_origins=config.cors_origins)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
