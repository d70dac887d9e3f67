"""Mutable server-side state behind the REST surface.

All mutations go through ``lock`` (a single-writer critical section); reads
hand out immutable domain objects. Stores persist under ``config.data_dir``
when one is configured; the hardware-performance store is seeded with the
default tier tables when empty, since profiles cannot be built without it.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from ..config import AppConfig
from ..domain import ClientProfile, HardwareSpec
from ..planning import GlobalModelState, RoundPlan
from ..profiling.interview import InterviewSession
from ..store import CASES_FILENAME, HWPERF_FILENAME, CaseStore, HwPerfStore
from ..sim.tiers import seed_default_tiers


class ServerState:
    def __init__(self, config: AppConfig):
        self.config = config
        data_dir = Path(config.data_dir) if config.data_dir else None
        self.case_store = CaseStore(data_dir / CASES_FILENAME if data_dir else None)
        self.hwperf_store = HwPerfStore(data_dir / HWPERF_FILENAME if data_dir else None)
        if config.seed_default_tiers and len(self.hwperf_store) == 0:
            seed_default_tiers(self.hwperf_store)

        self.lock = threading.RLock()
        self.clients: dict[str, HardwareSpec] = {}
        self.sessions: dict[str, InterviewSession] = {}
        self.profiles: dict[str, ClientProfile] = {}
        self.global_state = GlobalModelState.initial(config.accuracy_model)
        self.last_plan: Optional[RoundPlan] = None
        self.satisfaction_log: list[tuple[int, str, float]] = []  # (round, client, score)
        self._client_counter = 0
        self._session_counter = 0

    def new_client_id(self) -> str:
        self._client_counter += 1
        return f"c{self._client_counter:04d}"

    def new_session_id(self) -> str:
        self._session_counter += 1
        return f"s{self._session_counter:06d}"

    def satisfaction_summary(self) -> dict:
        scores = [s for _, _, s in self.satisfaction_log]
        by_round: dict[int, list[float]] = {}
        for rnd, _, score in self.satisfaction_log:
            by_round.setdefault(rnd, []).append(score)
        series = [
            {"round": rnd, "score": sum(vals) / len(vals)} for rnd, vals in sorted(by_round.items())
        ]
        return {
            "count": len(scores),
            "mean": (sum(scores) / len(scores)) if scores else None,
            "series": series,
        }
