"""HTTP surface over the triage engine.

All endpoints live under /v1. When an API token is configured every
request must carry it as a bearer token. The queue stream endpoint emits
server-sent events (enqueued / removed / closed) with keep-alive comments
while idle.
"""
from __future__ import annotations

import json
import queue
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from ..alerts import ActionKind, LabelKind, ResolutionEvent
from ..errors import DuplicateResolution, MalformedTimestamp, MissingField, UnknownAlert
from .engine import TriageService, entry_payload
from .schemas import (
    AlertIn,
    AlertStatusOut,
    DispositionOut,
    MetricsOut,
    QueueEntryOut,
    ResolutionAck,
    ResolutionIn,
    ThresholdBody,
    ThresholdOut,
)

SSE_HEARTBEAT_SECONDS = 15.0


def create_app(service: TriageService) -> FastAPI:
    app = FastAPI(title="alert triage service", version="1.0")
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def check_token(request: Request) -> None:
        token = service.config.api_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="invalid or missing token")

    guarded = Depends(check_token)

    @app.post("/v1/alerts", response_model=DispositionOut, dependencies=[guarded])
    def submit_alert(alert: AlertIn):
        try:
            disposition = service.score_record(alert.record())
        except (MissingField, MalformedTimestamp) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return DispositionOut(
            alert_id=disposition.alert_id,
            disposition=disposition.disposition,
            raw_probability=disposition.raw_probability,
            threat_score=disposition.threat_score,
            sampled_for_review=disposition.sampled_for_review,
            model_version=disposition.model_version,
        )

    @app.get("/v1/queue", response_model=list[QueueEntryOut], dependencies=[guarded])
    def queue_listing(tenant: Optional[str] = Query(default=None),
                      limit: Optional[int] = Query(default=None, ge=1)):
        entries = service.queue_listing(tenant=tenant, limit=limit)
        return [QueueEntryOut(**entry_payload(e)) for e in entries]

    @app.get("/v1/alerts/{alert_id}", response_model=AlertStatusOut, dependencies=[guarded])
    def alert_status(alert_id: str):
        status = service.get_status(alert_id)
        if status is None:
            raise HTTPException(status_code=404, detail="unknown alert")
        entry = status.get("entry")
        return AlertStatusOut(
            alert_id=alert_id,
            status=status["status"],
            entry=QueueEntryOut(**entry) if entry else None,
        )

    @app.post("/v1/alerts/{alert_id}/resolution", response_model=ResolutionAck,
              dependencies=[guarded])
    def resolve_alert(alert_id: str, body: ResolutionIn):
        try:
            action = ActionKind(body.action)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown action {body.action!r}")
        label = None
        if body.label is not None:
            try:
                label = LabelKind(body.label)
            except ValueError:
                raise HTTPException(status_code=422, detail=f"unknown label {body.label!r}")
        entry = service.queue.get(alert_id)
        resolved_at = body.resolved_at
        if resolved_at is None:
            watermark = service.store.watermark
            base = entry.created_at if entry else (
                watermark if watermark != float("-inf") else 0.0
            )
            resolved_at = max(base, watermark if watermark != float("-inf") else base)
        try:
            service.ingest_feedback(ResolutionEvent(
                alert_id=alert_id, action=action, resolved_at=resolved_at,
                label=label, analyst_id=body.analyst_id,
            ))
        except UnknownAlert:
            raise HTTPException(status_code=404, detail="unknown alert") from None
        except DuplicateResolution:
            raise HTTPException(status_code=409, detail="already resolved") from None
        return ResolutionAck(alert_id=alert_id, status="resolved")

    @app.get("/v1/metrics", response_model=MetricsOut, dependencies=[guarded])
    def metrics():
        return MetricsOut(**service.metrics())

    @app.get("/v1/config/threshold", response_model=ThresholdOut, dependencies=[guarded])
    def get_threshold():
        return ThresholdOut(threshold=service.config.close_threshold)

    @app.put("/v1/config/threshold", response_model=ThresholdOut, dependencies=[guarded])
    def put_threshold(body: ThresholdBody):
        service.set_threshold(body.threshold)
        return ThresholdOut(threshold=service.config.close_threshold)

    @app.get("/v1/queue/stream", dependencies=[guarded])
    def queue_stream():
        subscription = service.subscribe()

        def events():
            try:
                yield ": connected\n\n"
                while True:
                    try:
                        event = subscription.get(timeout=SSE_HEARTBEAT_SECONDS)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {json.dumps(event, sort_keys=True)}\n\n"
            finally:
                service.unsubscribe(subscription)

        return StreamingResponse(events(), media_type="text/event-stream")

    return app
