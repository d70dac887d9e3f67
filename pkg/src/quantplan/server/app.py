"""The planning service: REST surface over the core package."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..config import AppConfig
from ..domain import ValidationError
from ..planning import PlanningError, plan_round, select_clients
from ..profiling.builder import build_profile
from ..profiling.extraction import extract_factors
from ..profiling.interview import SessionFinishedError, interview_next, new_session
from ..store import CaseRecord, StoreError
from .schemas import (
    FeedbackRequest,
    FeedbackResponse,
    InterviewStartRequest,
    InterviewStartResponse,
    MessageRequest,
    MessageResponse,
    PlanRequest,
    RegisterRequest,
    RegisterResponse,
)
from .state import ServerState


def create_app(config: Optional[AppConfig] = None) -> FastAPI:
    state = ServerState(config or AppConfig())
    app = FastAPI(title="quantplan", version="0.1.0")
    app.state.ctx = state
    # Desk-scale demo service; the chat frontend may be served from any origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ValidationError)
    async def _domain_validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"detail": [{"loc": ["body"], "msg": str(exc)}]})

    @app.post("/clients", response_model=RegisterResponse)
    def register_client(body: RegisterRequest) -> RegisterResponse:
        hardware = body.hardware.to_domain()
        with state.lock:
            client_id = state.new_client_id()
            state.clients[client_id] = hardware
        return RegisterResponse(client_id=client_id)

    @app.post("/clients/{client_id}/interview", response_model=InterviewStartResponse)
    def start_interview(client_id: str, body: InterviewStartRequest) -> InterviewStartResponse:
        with state.lock:
            if client_id not in state.clients:
                raise HTTPException(status_code=404, detail=f"unknown client {client_id}")
            if body.hardware is not None:
                state.clients[client_id] = body.hardware.to_domain()
            session = new_session(client_id, body.scenario)
            message, _ = interview_next(session)
            session_id = state.new_session_id()
            state.sessions[session_id] = session
        return InterviewStartResponse(session_id=session_id, agent_message=message)

    def _complete_profile(session) -> None:
        llm = state.config.llm if state.config.llm.endpoint_url else None
        context, hints = extract_factors(session.transcript, session.scenario, llm=llm)
        session.extracted = context
        session.weight_hints = hints
        try:
            profile = build_profile(
                session.client_id,
                state.clients[session.client_id],
                context,
                hints,
                case_store=state.case_store,
                hwperf_store=state.hwperf_store,
                strategy=state.config.strategy,
                global_dist=state.config.global_dist,
                beta=state.config.beta,
                k=state.config.retrieval_k,
            )
        except StoreError as exc:
            raise HTTPException(status_code=409, detail=f"cannot build profile: {exc}") from exc
        state.profiles[session.client_id] = profile

    @app.post("/interview/{session_id}/message", response_model=MessageResponse)
    def interview_message(session_id: str, body: MessageRequest) -> MessageResponse:
        with state.lock:
            session = state.sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
            try:
                message, done = interview_next(session, body.text)
            except SessionFinishedError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            if done and session.scenario in ("initialization", "hardware_change"):
                _complete_profile(session)
        return MessageResponse(agent_message=message, done=done)

    @app.get("/clients/{client_id}/profile")
    def get_profile(client_id: str) -> JSONResponse:
        with state.lock:
            profile = state.profiles.get(client_id)
        if profile is None:
            raise HTTPException(status_code=404, detail=f"no profile for client {client_id}")
        return JSONResponse(profile.to_dict())

    @app.post("/rounds/plan")
    def plan(body: PlanRequest) -> JSONResponse:
        with state.lock:
            profiled = sorted(state.profiles)
            if not profiled:
                raise HTTPException(status_code=409, detail="no profiled clients to plan for")
            participation = min(state.config.participation, len(profiled))
            selected = select_clients(body.round, profiled, participation)
            try:
                plan = plan_round(
                    [state.profiles[cid] for cid in selected],
                    {cid: state.hwperf_store.lookup_performance(state.clients[cid]) for cid in selected},
                    state.config.slots,
                    epsilon=state.config.epsilon,
                    round=body.round,
                )
            except (PlanningError, StoreError) as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            state.last_plan = plan
        return JSONResponse(plan.to_dict())

    @app.post("/clients/{client_id}/feedback", response_model=FeedbackResponse)
    def submit_feedback(client_id: str, body: FeedbackRequest) -> FeedbackResponse:
        with state.lock:
            if client_id not in state.clients:
                raise HTTPException(status_code=404, detail=f"unknown client {client_id}")
            profile = state.profiles.get(client_id)
            if profile is None:
                raise HTTPException(status_code=404, detail=f"no profile for client {client_id}")
            record = body.to_domain(client_id)
            if record.client_id != client_id:
                raise HTTPException(status_code=422, detail="client_id in body does not match path")
            case = CaseRecord(
                id=0,
                context=profile.context,
                level=record.level,
                feedback=record,
                inferred_weights=profile.estimated_weights,
            )
            try:
                case_id = state.case_store.insert(case)
            except StoreError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            weights = profile.estimated_weights
            score = 2.0 * sum(weights[f] * record.ratings[f] for f in weights.weights) - 1.0
            state.satisfaction_log.append((record.round, client_id, score))
        return FeedbackResponse(case_id=case_id)

    @app.get("/metrics")
    def metrics() -> JSONResponse:
        with state.lock:
            payload = {
                "global_model": state.global_state.to_dict(),
                "satisfaction": state.satisfaction_summary(),
                "case_count": len(state.case_store),
                "last_plan": state.last_plan.to_dict() if state.last_plan else None,
            }
        return JSONResponse(payload)

    return app
