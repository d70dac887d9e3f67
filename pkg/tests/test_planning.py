import itertools
import math
import random

import pytest

from quantplan.accuracy import AccuracyModel, accuracy_proxy
from quantplan.domain import (
    CATEGORIES,
    Factor,
    LEVELS,
    PerformanceEstimate,
    QuantizationLevel,
    RoundPlan,
    TaskCategory,
    ValidationError,
    validate_weights,
)
from quantplan.planning import (
    GlobalModelState,
    PlanningError,
    SlotConfig,
    aggregate_round,
    plan_round,
    precision_factor,
    select_clients,
)
from quantplan.satisfaction import build_reward_penalty, optimal_level, satisfaction_score

from .generators import gen_context, gen_inferred, gen_perf_table, gen_weights
from quantplan.domain import ClientProfile, HardwareSpec, InferredFactors

Q = QuantizationLevel


def make_profile(client_id, levels, weights, contribution=None, inferred=None, rng=None):
    rng = rng or random.Random(0)
    hw = HardwareSpec(processor_class=f"tier-{len(levels)}", ram_mb=1024,
                      power_state="mains", available_levels=tuple(levels))
    return ClientProfile(
        client_id=client_id,
        hardware=hw,
        context=gen_context(rng),
        inferred=inferred or gen_inferred(rng),
        estimated_weights=weights,
        contribution_estimate=contribution or {q: 1.0 for q in levels},
    )


class TestSelectClients:
    IDS = [f"c{i:03d}" for i in range(100)]

    def test_first_window(self):
        assert select_clients(0, self.IDS, 10) == self.IDS[0:10]

    def test_window_arithmetic(self):
        assert select_clients(3, self.IDS, 10) == self.IDS[30:40]

    def test_wraps_after_full_cycle(self):
        assert select_clients(10, self.IDS, 10) == self.IDS[0:10]

    def test_wrapping_window(self):
        got = select_clients(9, self.IDS[:95], 10)
        assert got == self.IDS[90:95] + self.IDS[0:5]

    def test_full_cycle_visits_everyone_once(self):
        seen = []
        for rnd in range(10):
            seen.extend(select_clients(rnd, self.IDS, 10))
        assert sorted(seen) == sorted(self.IDS)
        assert len(set(seen)) == len(self.IDS)

    def test_empty_population_rejected(self):
        with pytest.raises(PlanningError):
            select_clients(0, [], 1)

    def test_participation_bounds(self):
        with pytest.raises(ValidationError):
            select_clients(0, self.IDS, 0)
        with pytest.raises(ValidationError):
            select_clients(0, self.IDS, 101)


class TestPlanRound:
    def test_epsilon_zero_ample_capacity_reduces_to_argmax(self):
        rng = random.Random(5)
        for _ in range(50):
            profiles, tables = [], {}
            for i in range(6):
                n = rng.randint(1, 4)
                levels = LEVELS[:n]
                w = gen_weights(rng)
                perf = gen_perf_table(rng, levels)
                cid = f"c{i:02d}"
                profiles.append(make_profile(cid, levels, w, rng=rng))
                tables[cid] = perf
            slots = SlotConfig(capacity={q: 100 for q in LEVELS})
            plan = plan_round(profiles, tables, slots, epsilon=0.0)
            for profile in profiles:
                perf = tables[profile.client_id]
                table = build_reward_penalty(perf)
                expected = optimal_level(profile.estimated_weights, table,
                                         profile.contribution_estimate, perf)
                assert plan.assignments[profile.client_id] is expected

    def test_two_client_contention_matches_exhaustive_packing(self):
        # Both clients prefer FP16 (0.5) with INT8 close behind (0.45);
        # one FP16 slot and one INT8 slot exist and epsilon admits both levels.
        w = validate_weights({Factor.ACCURACY: 1.0})
        perf = {
            Q.INT8: PerformanceEstimate(accuracy=0.725, relative_energy=0.9, latency_norm=0.9),
            Q.FP16: PerformanceEstimate(accuracy=0.75, relative_energy=1.0, latency_norm=1.0),
        }
        levels = (Q.INT4, Q.INT8, Q.FP16)
        perf_full = dict(perf)
        perf_full[Q.INT4] = PerformanceEstimate(accuracy=0.2, relative_energy=0.5, latency_norm=0.5)
        profiles = [make_profile(cid, levels, w) for cid in ("a", "b")]
        tables = {"a": perf_full, "b": perf_full}
        slots = SlotConfig(capacity={Q.FP16: 1, Q.INT8: 1})
        plan = plan_round(profiles, tables, slots, epsilon=0.1)

        # Exhaustive oracle over all merit-filtered assignments: maximize the
        # number of clients served within capacity.
        def satisfaction(cid, q):
            table = build_reward_penalty(tables[cid])
            return satisfaction_score(w, table, {x: 1.0 for x in levels}, q).satisfaction

        merit = {}
        for cid in ("a", "b"):
            best = max(satisfaction(cid, q) for q in perf_full)
            merit[cid] = [q for q in perf_full if satisfaction(cid, q) >= best - 0.1]
        best_served = 0
        for combo in itertools.product(merit["a"], merit["b"]):
            remaining = {Q.FP16: 1, Q.INT8: 1}
            served = 0
            for q in combo:
                if remaining.get(q, 0) > 0:
                    remaining[q] -= 1
                    served += 1
            best_served = max(best_served, served)
        assert best_served == 2
        assert plan.utilization == pytest.approx(1.0)
        assert sorted(plan.assignments.values(), key=lambda q: q.bit_width) == [Q.INT8, Q.FP16]

    def test_large_epsilon_admits_all_levels(self):
        rng = random.Random(7)
        w = gen_weights(rng)
        levels = LEVELS
        perf = gen_perf_table(rng, levels)
        profile = make_profile("a", levels, w, rng=rng)
        # Single slot at the worst level forces the merit filter to decide.
        table = build_reward_penalty(perf)
        scores = {q: satisfaction_score(w, table, {x: 1.0 for x in levels}, q).satisfaction
                  for q in levels}
        worst = min(scores, key=lambda q: (scores[q], q.bit_width))
        slots = SlotConfig(capacity={worst: 1})
        plan = plan_round([profile], {"a": perf}, slots, epsilon=2.0)
        assert plan.assignments["a"] is worst  # admitted because scores span at most [-1, 1]

    def test_over_capacity_client_keeps_optimum(self):
        rng = random.Random(8)
        w = validate_weights({Factor.ACCURACY: 1.0})
        perf = {
            Q.INT4: PerformanceEstimate(accuracy=0.3, relative_energy=0.5, latency_norm=0.5),
            Q.INT8: PerformanceEstimate(accuracy=0.9, relative_energy=1.0, latency_norm=1.0),
        }
        profiles = [make_profile(cid, (Q.INT4, Q.INT8), w) for cid in ("a", "b")]
        tables = {"a": perf, "b": perf}
        slots = SlotConfig(capacity={Q.INT8: 1})  # no INT4 capacity, epsilon tight
        plan = plan_round(profiles, tables, slots, epsilon=0.0)
        assert sorted(plan.assignments.values(), key=lambda q: q.bit_width) == [Q.INT8, Q.INT8]
        assert plan.utilization == pytest.approx(1.0)  # one within capacity / capacity 1
        assert plan.slot_usage[Q.INT8] == 2  # histogram counts both

    def test_assignments_stay_within_available_levels(self):
        rng = random.Random(9)
        for _ in range(50):
            profiles, tables = [], {}
            for i in range(8):
                n = rng.randint(1, 4)
                levels = LEVELS[:n]
                cid = f"c{i:02d}"
                profiles.append(make_profile(cid, levels, gen_weights(rng), rng=rng))
                tables[cid] = gen_perf_table(rng, levels)
            slots = SlotConfig(capacity={q: rng.randint(0, 3) for q in LEVELS[:-1]} | {LEVELS[-1]: 1})
            plan = plan_round(profiles, tables, slots, epsilon=rng.random())
            histogram = {}
            for cid, q in plan.assignments.items():
                profile = next(p for p in profiles if p.client_id == cid)
                assert q in profile.hardware.available_levels
                histogram[q] = histogram.get(q, 0) + 1
            assert histogram == dict(plan.slot_usage)
            assert 0.0 <= plan.utilization <= 1.0

    def test_deterministic_given_inputs(self):
        rng = random.Random(10)
        profiles, tables = [], {}
        for i in range(6):
            levels = LEVELS[: rng.randint(1, 4)]
            cid = f"c{i}"
            profiles.append(make_profile(cid, levels, gen_weights(rng), rng=rng))
            tables[cid] = gen_perf_table(rng, levels)
        slots = SlotConfig(capacity={Q.INT4: 2, Q.INT8: 2, Q.FP16: 1, Q.FP32: 1})
        a = plan_round(profiles, tables, slots, epsilon=0.2)
        b = plan_round(list(reversed(profiles)), tables, slots, epsilon=0.2)
        assert a.assignments == b.assignments


class TestAggregateRound:
    MODEL = AccuracyModel(kappa=0.05, accuracy_max={c: 0.9 for c in CATEGORIES})

    def _state(self):
        return GlobalModelState.initial(self.MODEL)

    def test_empty_plan_only_advances_round(self):
        state = self._state()
        plan = RoundPlan(round=0, assignments={}, slot_usage={}, utilization=0.0)
        out = aggregate_round(plan, {}, state, {}, self.MODEL)
        assert out.round == 1
        assert out.class_mass == state.class_mass

    def test_unit_contribution_at_fp32(self):
        w = validate_weights({Factor.ACCURACY: 1.0})
        inferred = InferredFactors(noise_level="low", data_quantity="low",
                                   data_distribution={TaskCategory.ENTERTAINMENT: 1.0})
        profile = make_profile("a", LEVELS, w, inferred=inferred)
        plan = RoundPlan(round=0, assignments={"a": Q.FP32}, slot_usage={Q.FP32: 1}, utilization=1.0)
        out = aggregate_round(plan, {"a": profile}, self._state(), {"a": 1.0}, self.MODEL)
        assert out.class_mass[TaskCategory.ENTERTAINMENT] == pytest.approx(1.0)

    def test_precision_factor_quarter_at_int8(self):
        w = validate_weights({Factor.ACCURACY: 1.0})
        inferred = InferredFactors(noise_level="low", data_quantity="low",
                                   data_distribution={TaskCategory.ENTERTAINMENT: 1.0})
        profile = make_profile("a", LEVELS, w, inferred=inferred)
        plan = RoundPlan(round=0, assignments={"a": Q.INT8}, slot_usage={Q.INT8: 1}, utilization=1.0)
        out = aggregate_round(plan, {"a": profile}, self._state(), {"a": 1.0}, self.MODEL)
        assert out.class_mass[TaskCategory.ENTERTAINMENT] == pytest.approx(0.25)

    def test_mass_conservation(self):
        rng = random.Random(11)
        for _ in range(50):
            profiles, assignments, quantities = {}, {}, {}
            for i in range(6):
                cid = f"c{i}"
                levels = LEVELS[: rng.randint(1, 4)]
                profile = make_profile(cid, levels, gen_weights(rng), rng=rng)
                profiles[cid] = profile
                assignments[cid] = rng.choice(levels)
                quantities[cid] = rng.uniform(0.1, 3.0)
            histogram = {}
            for q in assignments.values():
                histogram[q] = histogram.get(q, 0) + 1
            plan = RoundPlan(round=0, assignments=assignments, slot_usage=histogram, utilization=0.5)
            state = self._state()
            out = aggregate_round(plan, profiles, state, quantities, self.MODEL)
            delta = sum(out.class_mass[c] - state.class_mass[c] for c in CATEGORIES)
            expected = sum(quantities[cid] * precision_factor(q) for cid, q in assignments.items())
            assert delta == pytest.approx(expected, abs=1e-9)

    def test_missing_profile_names_client(self):
        plan = RoundPlan(round=0, assignments={"ghost": Q.INT4}, slot_usage={Q.INT4: 1}, utilization=0.0)
        with pytest.raises(PlanningError, match="ghost"):
            aggregate_round(plan, {}, self._state(), {"ghost": 1.0}, self.MODEL)

    def test_missing_quantity_names_client(self):
        w = validate_weights({Factor.ACCURACY: 1.0})
        profile = make_profile("a", LEVELS, w)
        plan = RoundPlan(round=0, assignments={"a": Q.INT4}, slot_usage={Q.INT4: 1}, utilization=0.0)
        with pytest.raises(PlanningError, match="a"):
            aggregate_round(plan, {"a": profile}, self._state(), {}, self.MODEL)


class TestAccuracyProxy:
    MODEL = AccuracyModel(kappa=0.1, accuracy_max={c: 0.85 for c in CATEGORIES})

    def test_zero_mass_zero_accuracy(self):
        out = accuracy_proxy({c: 0.0 for c in CATEGORIES}, self.MODEL)
        assert all(v == 0.0 for v in out.values())

    def test_saturates_at_max(self):
        out = accuracy_proxy({c: 1e9 for c in CATEGORIES}, self.MODEL)
        for c in CATEGORIES:
            assert out[c] == pytest.approx(0.85)

    def test_monotone_in_mass(self):
        rng = random.Random(12)
        for _ in range(100):
            mass = {c: rng.uniform(0, 50) for c in CATEGORIES}
            doubled = {c: 2 * v for c, v in mass.items()}
            a = accuracy_proxy(mass, self.MODEL)
            b = accuracy_proxy(doubled, self.MODEL)
            for c in CATEGORIES:
                assert b[c] >= a[c]

    def test_matches_closed_form(self):
        mass = {c: 7.0 for c in CATEGORIES}
        out = accuracy_proxy(mass, self.MODEL)
        for c in CATEGORIES:
            assert out[c] == pytest.approx(0.85 * (1 - math.exp(-0.7)))

    def test_negative_mass_rejected(self):
        with pytest.raises(ValidationError):
            accuracy_proxy({TaskCategory.ENTERTAINMENT: -1.0}, self.MODEL)


class TestSlotConfig:
    def test_needs_positive_capacity(self):
        with pytest.raises(ValidationError):
            SlotConfig(capacity={Q.INT4: 0})
        with pytest.raises(ValidationError):
            SlotConfig(capacity={Q.INT4: -1, Q.INT8: 2})

    def test_round_trip(self):
        slots = SlotConfig(capacity={Q.INT4: 3, Q.FP32: 1})
        assert SlotConfig.from_dict(slots.to_dict()) == slots
