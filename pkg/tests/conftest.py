from __future__ import annotations

import pytest

from quantplan.domain import (
    HardwareSpec,
    PerformanceEstimate,
    QuantizationLevel,
)
from quantplan.store import HwPerfRecord, HwPerfStore

Q = QuantizationLevel


@pytest.fixture
def premium_hw() -> HardwareSpec:
    return HardwareSpec(
        processor_class="t4-premium",
        ram_mb=4096,
        power_state="mains",
        available_levels=(Q.INT4, Q.INT8, Q.FP16, Q.FP32),
    )


@pytest.fixture
def premium_perf() -> dict:
    return {
        Q.INT4: PerformanceEstimate(accuracy=0.55, relative_energy=0.2, latency_norm=0.25),
        Q.INT8: PerformanceEstimate(accuracy=0.8, relative_energy=0.4, latency_norm=0.5),
        Q.FP16: PerformanceEstimate(accuracy=0.92, relative_energy=0.7, latency_norm=0.75),
        Q.FP32: PerformanceEstimate(accuracy=0.97, relative_energy=1.0, latency_norm=1.0),
    }


@pytest.fixture
def hwperf_store(premium_hw, premium_perf) -> HwPerfStore:
    store = HwPerfStore()
    store.insert(HwPerfRecord(id=0, hardware=premium_hw, table=premium_perf))
    return store
