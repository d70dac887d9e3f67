import json
import math
import random
import threading

import pytest

from quantplan.domain import (
    ContextualFactors,
    Factor,
    HardwareSpec,
    PerformanceEstimate,
    QuantizationLevel,
    TaskCategory,
    ValidationError,
    validate_weights,
)
from quantplan.store import (
    CaseRecord,
    CaseStore,
    HwPerfRecord,
    HwPerfStore,
    NoPriorError,
    StoreError,
    encode_context,
    estimate_weights_from_cases,
)

from .generators import gen_context, gen_feedback, gen_weights

Q = QuantizationLevel


def make_case(rng: random.Random, context=None, weights=None) -> CaseRecord:
    return CaseRecord(
        id=0,
        context=context or gen_context(rng),
        level=rng.choice(list(Q)),
        feedback=gen_feedback(rng),
        inferred_weights=weights or gen_weights(rng),
    )


class TestEncodeContext:
    def test_bedroom_nighttime_low(self):
        ctx = ContextualFactors(
            device_location="bedroom", interaction_time="nighttime",
            interaction_frequency="low", task_type_mix={c: 0.25 for c in TaskCategory},
        )
        assert encode_context(ctx) == [1, 0, 0, 0, 0, 0, 1, 0, 0.0, 0.25, 0.25, 0.25, 0.25]

    def test_kitchen_daytime_high_point_mass(self):
        ctx = ContextualFactors(
            device_location="kitchen", interaction_time="daytime",
            interaction_frequency="high",
            task_type_mix={TaskCategory.ENTERTAINMENT: 1.0},
        )
        assert encode_context(ctx) == [0, 0, 1, 0, 0, 1, 0, 0, 1.0, 1.0, 0.0, 0.0, 0.0]

    def test_deterministic(self):
        rng = random.Random(2)
        for _ in range(50):
            ctx = gen_context(rng)
            assert encode_context(ctx) == encode_context(ctx)

    def test_length_and_range(self):
        rng = random.Random(4)
        for _ in range(200):
            vec = encode_context(gen_context(rng))
            assert len(vec) == 13
            assert all(0.0 <= v <= 1.0 for v in vec)


class TestRetrieveSimilar:
    def test_self_match_first_with_similarity_one(self):
        rng = random.Random(6)
        store = CaseStore()
        target = gen_context(rng)
        for _ in range(10):
            store.insert(make_case(rng))
        store.insert(make_case(rng, context=target))
        results = store.retrieve_similar(target, 1)
        assert results[0][0].context == target
        assert results[0][1] == pytest.approx(1.0)

    def test_empty_store(self):
        store = CaseStore()
        assert store.retrieve_similar(gen_context(random.Random(1)), 5) == []

    def test_k_below_one_rejected(self):
        store = CaseStore()
        with pytest.raises(ValidationError):
            store.retrieve_similar(gen_context(random.Random(1)), 0)

    def test_matches_brute_force_sort(self):
        rng = random.Random(8)
        store = CaseStore()
        for _ in range(100):
            store.insert(make_case(rng))
        query = gen_context(rng)

        # Brute-force oracle: plain-python cosine, stable sort by similarity.
        def cosine(a, b):
            dot = sum(x * y for x, y in zip(a, b))
            na = math.sqrt(sum(x * x for x in a))
            nb = math.sqrt(sum(y * y for y in b))
            return dot / (na * nb)

        qv = encode_context(query)
        expected = sorted(
            ((rec, cosine(list(rec.feature), qv)) for rec in store.records),
            key=lambda pair: -pair[1],
        )[:5]

        got = store.retrieve_similar(query, 5)
        assert [rec.id for rec, _ in got] == [rec.id for rec, _ in expected]
        for (_, sim), (_, exp) in zip(got, expected):
            assert sim == pytest.approx(exp, abs=1e-12)

    def test_sorted_similarities_match_cosine(self):
        rng = random.Random(9)
        store = CaseStore()
        for _ in range(60):
            store.insert(make_case(rng))
        query = gen_context(rng)
        results = store.retrieve_similar(query, 60)
        sims = [s for _, s in results]
        assert sims == sorted(sims, reverse=True)
        assert all(0.0 <= s <= 1.0 + 1e-12 for s in sims)
        qv = encode_context(query)
        for rec, sim in results:
            dot = sum(x * y for x, y in zip(rec.feature, qv))
            norm = math.sqrt(sum(x * x for x in rec.feature)) * math.sqrt(sum(x * x for x in qv))
            assert sim == pytest.approx(dot / norm, abs=1e-12)

    def test_ties_keep_insertion_order(self):
        rng = random.Random(10)
        store = CaseStore()
        ctx = gen_context(rng)
        first = store.insert(make_case(rng, context=ctx))
        second = store.insert(make_case(rng, context=ctx))
        results = store.retrieve_similar(ctx, 2)
        assert [rec.id for rec, _ in results] == [first, second]

    def test_fewer_than_k(self):
        rng = random.Random(11)
        store = CaseStore()
        store.insert(make_case(rng))
        assert len(store.retrieve_similar(gen_context(rng), 5)) == 1


class TestEstimateWeights:
    def test_singleton(self):
        rng = random.Random(12)
        w = validate_weights({Factor.ACCURACY: 0.5, Factor.ENERGY: 0.3, Factor.LATENCY: 0.2})
        case = make_case(rng, weights=w)
        out = estimate_weights_from_cases([(case, 0.7)])
        assert out.weights == pytest.approx(w.weights)

    def test_equal_similarity_midpoint(self):
        rng = random.Random(13)
        a = make_case(rng, weights=validate_weights({Factor.ACCURACY: 1.0}))
        b = make_case(rng, weights=validate_weights({Factor.ENERGY: 1.0}))
        out = estimate_weights_from_cases([(a, 0.5), (b, 0.5)])
        assert out[Factor.ACCURACY] == pytest.approx(0.5)
        assert out[Factor.ENERGY] == pytest.approx(0.5)
        assert out[Factor.LATENCY] == pytest.approx(0.0)

    def test_matches_weighted_average_oracle(self):
        rng = random.Random(14)
        for _ in range(50):
            cases = [(make_case(rng), rng.uniform(0.01, 1.0)) for _ in range(10)]
            total = sum(sim for _, sim in cases)
            expected = {
                f: sum(sim * rec.inferred_weights[f] for rec, sim in cases) / total
                for f in Factor
            }
            norm = sum(expected.values())
            expected = {f: v / norm for f, v in expected.items()}
            out = estimate_weights_from_cases(cases)
            for f in Factor:
                assert out[f] == pytest.approx(expected[f], abs=1e-12)

    def test_empty_signals_no_prior(self):
        with pytest.raises(NoPriorError):
            estimate_weights_from_cases([])

    def test_all_zero_similarity_signals_no_prior(self):
        rng = random.Random(15)
        with pytest.raises(NoPriorError):
            estimate_weights_from_cases([(make_case(rng), 0.0)])


class TestHwPerfLookup:
    def _record(self, name, ram, levels, rng) -> HwPerfRecord:
        accs = sorted(rng.uniform(0.4, 1.0) for _ in levels)
        table = {}
        for i, q in enumerate(levels):
            frac = (i + 1) / len(levels)
            table[q] = PerformanceEstimate(accuracy=accs[i], relative_energy=frac, latency_norm=frac)
        hw = HardwareSpec(processor_class=name, ram_mb=ram, power_state="mains",
                          available_levels=tuple(levels))
        return HwPerfRecord(id=0, hardware=hw, table=table)

    def _store(self) -> HwPerfStore:
        rng = random.Random(16)
        store = HwPerfStore()
        store.insert(self._record("small", 2048, [Q.INT4, Q.INT8], rng))
        store.insert(self._record("large", 4096, [Q.INT4, Q.INT8, Q.FP16, Q.FP32], rng))
        return store

    def _query(self, ram, levels=(Q.INT4, Q.INT8)) -> HardwareSpec:
        return HardwareSpec(processor_class="unknown", ram_mb=ram, power_state="battery_low",
                            available_levels=levels)

    def test_exact_class_match_verbatim(self):
        store = self._store()
        hw = HardwareSpec(processor_class="small", ram_mb=999, power_state="mains",
                          available_levels=(Q.INT4, Q.INT8))
        table = store.lookup_performance(hw)
        assert table == dict(store.records[0].table)

    def test_nearest_by_ram(self):
        store = self._store()
        # 3000 sits 952 from the 2048 tier and 1096 from the 4096 tier.
        table = store.lookup_performance(self._query(3000))
        assert table == dict(store.records[0].table)
        table = store.lookup_performance(self._query(3600))
        assert set(table) == {Q.INT4, Q.INT8}  # restricted to the query's levels

    def test_exact_tie_goes_to_lower_ram(self):
        store = self._store()
        table = store.lookup_performance(self._query(3072))
        assert table == dict(store.records[0].table)

    def test_restricts_to_available_levels(self):
        store = self._store()
        table = store.lookup_performance(self._query(5000, levels=(Q.INT4, Q.INT8, Q.FP16)))
        assert set(table) == {Q.INT4, Q.INT8, Q.FP16}

    def test_empty_store_rejected(self):
        with pytest.raises(StoreError):
            HwPerfStore().lookup_performance(self._query(1024))


class TestPersistence:
    def test_insert_assigns_monotone_ids(self):
        rng = random.Random(17)
        store = CaseStore()
        first = store.insert(make_case(rng))
        second = store.insert(make_case(rng))
        assert second > first

    def test_read_your_write(self):
        rng = random.Random(18)
        store = CaseStore()
        ctx = gen_context(rng)
        case_id = store.insert(make_case(rng, context=ctx))
        results = store.retrieve_similar(ctx, 1)
        assert results[0][0].id == case_id

    def test_reload_preserves_records_byte_exactly(self, tmp_path):
        rng = random.Random(19)
        path = tmp_path / "cases.ndjson"
        store = CaseStore(path)
        for _ in range(25):
            store.insert(make_case(rng))
        original_lines = path.read_text().splitlines()

        reloaded = CaseStore(path)
        assert reloaded.records == store.records
        assert [json.dumps(rec.to_dict()) for rec in reloaded.records] == original_lines

    def test_hwperf_reload(self, tmp_path, premium_hw, premium_perf):
        path = tmp_path / "hwperf.ndjson"
        store = HwPerfStore(path)
        store.insert(HwPerfRecord(id=0, hardware=premium_hw, table=premium_perf))
        reloaded = HwPerfStore(path)
        assert reloaded.records == store.records

    def test_serialized_inserts_from_threads(self, tmp_path):
        store = CaseStore(tmp_path / "cases.ndjson")
        rng = random.Random(20)
        cases = [make_case(rng) for _ in range(40)]

        def worker(chunk):
            for case in chunk:
                store.insert(case)

        threads = [threading.Thread(target=worker, args=(cases[i::4],)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        ids = [rec.id for rec in store.records]
        assert len(ids) == 40
        assert ids == sorted(ids)
        assert len(set(ids)) == 40


class TestRecordValidation:
    def test_feature_mismatch_rejected(self):
        rng = random.Random(21)
        ctx = gen_context(rng)
        with pytest.raises(ValidationError):
            CaseRecord(
                id=1, context=ctx, level=Q.INT8, feedback=gen_feedback(rng),
                inferred_weights=gen_weights(rng), feature=(9.0,) * 13,
            )

    def test_feature_autofilled(self):
        rng = random.Random(22)
        ctx = gen_context(rng)
        rec = make_case(rng, context=ctx)
        assert list(rec.feature) == encode_context(ctx)

    def test_hwperf_monotonicity_enforced(self, premium_hw):
        bad = {
            Q.INT4: PerformanceEstimate(accuracy=0.9, relative_energy=0.2, latency_norm=0.2),
            Q.INT8: PerformanceEstimate(accuracy=0.8, relative_energy=0.4, latency_norm=0.5),
            Q.FP16: PerformanceEstimate(accuracy=0.92, relative_energy=0.7, latency_norm=0.75),
            Q.FP32: PerformanceEstimate(accuracy=0.97, relative_energy=1.0, latency_norm=1.0),
        }
        with pytest.raises(ValidationError):
            HwPerfRecord(id=0, hardware=premium_hw, table=bad)

    def test_hwperf_exact_level_cover_enforced(self, premium_hw, premium_perf):
        partial = {q: v for q, v in premium_perf.items() if q is not Q.FP32}
        with pytest.raises(ValidationError):
            HwPerfRecord(id=0, hardware=premium_hw, table=partial)
