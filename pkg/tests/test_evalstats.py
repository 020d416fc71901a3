import json
import math

import numpy as np
import pytest
import scipy.stats as scipy_stats

from gruen.config import MetricConfig
from gruen.evalstats import (
    CorrelationError,
    CorrelationReport,
    JudgmentParseError,
    JudgmentRecord,
    correlate,
    kendall_tau_b,
    load_judgments,
    midranks,
    pearson,
    spearman,
    student_t_sf,
    system_level,
    tune_config,
    williams_compare,
    williams_test,
)


def kendall_definitional(x, y):
    """O(n^2) pair counting straight from the tau-b definition."""
    concordant = discordant = tx = ty = 0
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = x[j] - x[i], y[j] - y[i]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                tx += 1
            elif dy == 0:
                ty += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / math.sqrt(
        (concordant + discordant + tx) * (concordant + discordant + ty)
    )


class TestPearson:
    def test_perfect_linear(self):
        x = [1.0, 2.0, 3.0, 5.0]
        assert pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        x = [1.0, 2.0, 3.0]
        assert pearson(x, [-v for v in x]) == pytest.approx(-1.0)

    def test_frozen_oracle_value(self):
        # computed with an independent statistics package ahead of the build
        got = pearson([1, 2, 3, 4], [1, 3, 2, 5])
        assert got == pytest.approx(0.8315218406202999, abs=1e-10)

    def test_matches_scipy_on_random(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = rng.integers(3, 40)
            x, y = rng.normal(size=n), rng.normal(size=n)
            assert pearson(x, y) == pytest.approx(
                scipy_stats.pearsonr(x, y).statistic, abs=1e-12
            )

    def test_length_mismatch(self):
        with pytest.raises(CorrelationError):
            pearson([1, 2], [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(CorrelationError):
            pearson([1.0], [2.0])

    def test_constant_input(self):
        with pytest.raises(CorrelationError, match="undefined"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_affine_invariance(self):
        rng = np.random.default_rng(3)
        x, y = rng.normal(size=20), rng.normal(size=20)
        assert pearson(3.0 * x + 2.0, y) == pytest.approx(pearson(x, y), abs=1e-12)


class TestSpearman:
    def test_monotone_increasing(self):
        x = [1.0, 2.0, 5.0, 9.0]
        assert spearman(x, [math.exp(v) for v in x]) == pytest.approx(1.0)

    def test_monotone_decreasing(self):
        x = [1.0, 2.0, 5.0, 9.0]
        assert spearman(x, [-(v**3) for v in x]) == pytest.approx(-1.0)

    def test_tied_case_exact(self):
        assert spearman([1, 1, 2], [3, 5, 4]) == pytest.approx(0.0, abs=1e-15)

    def test_equals_pearson_of_midranks(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            n = int(rng.integers(3, 30))
            x = rng.integers(0, 6, size=n).astype(float)  # coarse grid forces ties
            y = rng.integers(0, 6, size=n).astype(float)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            assert spearman(x, y) == pearson(midranks(x), midranks(y))

    def test_matches_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(4, 50))
            x = rng.integers(0, 10, size=n).astype(float)
            y = rng.normal(size=n)
            if len(set(x)) < 2:
                continue
            assert spearman(x, y) == pytest.approx(
                scipy_stats.spearmanr(x, y).statistic, abs=1e-12
            )

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(13)
        x, y = rng.normal(size=25), rng.normal(size=25)
        assert spearman(np.exp(x), y) == pytest.approx(spearman(x, y), abs=1e-12)


class TestMidranks:
    def test_simple(self):
        assert midranks([10.0, 30.0, 20.0]) == [1.0, 3.0, 2.0]

    def test_ties_averaged(self):
        assert midranks([5.0, 5.0, 1.0]) == [2.5, 2.5, 1.0]

    def test_matches_scipy_rankdata(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            x = rng.integers(0, 5, size=int(rng.integers(2, 30))).astype(float)
            assert midranks(x) == scipy_stats.rankdata(x, method="average").tolist()


class TestKendall:
    def test_perfect_concordance(self):
        assert kendall_tau_b([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)

    def test_perfect_discordance(self):
        assert kendall_tau_b([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_matches_definitional_count(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            n = int(rng.integers(2, 9))
            x = rng.integers(0, 4, size=n).astype(float)
            y = rng.integers(0, 4, size=n).astype(float)
            try:
                got = kendall_tau_b(x, y)
            except CorrelationError:
                continue
            assert got == pytest.approx(kendall_definitional(list(x), list(y)), abs=1e-12)

    def test_matches_definitional_count_larger(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            n = int(rng.integers(50, 201))
            x = rng.integers(0, 12, size=n).astype(float)
            y = rng.integers(0, 12, size=n).astype(float)
            assert kendall_tau_b(x, y) == pytest.approx(
                kendall_definitional(list(x), list(y)), abs=1e-12
            )

    def test_matches_scipy_tau_b(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            n = int(rng.integers(4, 60))
            x = rng.integers(0, 8, size=n).astype(float)
            y = rng.integers(0, 8, size=n).astype(float)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            assert kendall_tau_b(x, y) == pytest.approx(
                scipy_stats.kendalltau(x, y, variant="b").statistic, abs=1e-12
            )

    def test_constant_input(self):
        with pytest.raises(CorrelationError):
            kendall_tau_b([2, 2, 2], [1, 2, 3])

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(37)
        x, y = rng.normal(size=30), rng.normal(size=30)
        assert kendall_tau_b(np.exp(x), y) == pytest.approx(
            kendall_tau_b(x, y), abs=1e-12
        )


class TestStudentTSF:
    def test_matches_scipy(self):
        for df in (1, 2, 5, 17, 97):
            for t in (-4.0, -1.2, 0.0, 0.3, 2.5, 8.0):
                assert student_t_sf(t, df) == pytest.approx(
                    float(scipy_stats.t.sf(t, df)), abs=1e-12
                )

    def test_zero_is_half(self):
        assert student_t_sf(0.0, 10) == pytest.approx(0.5)


class TestWilliams:
    def test_equal_correlations(self):
        t, p = williams_test(0.55, 0.55, 0.3, 50)
        assert t == 0.0 and p == pytest.approx(0.5)

    def test_equal_correlations_degenerate_r23(self):
        t, p = williams_test(0.55, 0.55, 1.0, 50)
        assert t == 0.0 and p == pytest.approx(0.5)

    def test_frozen_case(self):
        t, p = williams_test(0.6, 0.4, 0.5, 100)
        assert t == pytest.approx(2.448708947641017, abs=1e-9)
        assert p == pytest.approx(0.008066213825978314, abs=1e-9)

    def test_against_independent_oracle(self):
        # oracle: direct transcription of the dependent-correlation t statistic
        # evaluated with scipy's t distribution
        def oracle(r12, r13, r23, n):
            k = 1 - r12**2 - r13**2 - r23**2 + 2 * r12 * r13 * r23
            rbar = (r12 + r13) / 2
            t = (r12 - r13) * math.sqrt((n - 1) * (1 + r23)) / math.sqrt(
                2 * k * (n - 1) / (n - 3) + rbar**2 * (1 - r23) ** 3
            )
            return t, float(scipy_stats.t.sf(t, n - 3))

        rng = np.random.default_rng(41)
        checked = 0
        while checked < 50:
            r12, r13, r23 = rng.uniform(-0.9, 0.9, size=3)
            n = int(rng.integers(5, 500))
            k = 1 - r12**2 - r13**2 - r23**2 + 2 * r12 * r13 * r23
            if k <= 0:
                continue
            t_want, p_want = oracle(r12, r13, r23, n)
            t_got, p_got = williams_test(r12, r13, r23, n)
            assert t_got == pytest.approx(t_want, abs=1e-8)
            assert p_got == pytest.approx(p_want, abs=1e-8)
            checked += 1

    def test_antisymmetry(self):
        t_ab, _ = williams_test(0.7, 0.4, 0.2, 80)
        t_ba, _ = williams_test(0.4, 0.7, 0.2, 80)
        assert t_ab == pytest.approx(-t_ba, abs=1e-12)

    def test_small_n_rejected(self):
        with pytest.raises(CorrelationError):
            williams_test(0.5, 0.4, 0.3, 3)

    def test_inadmissible_triple(self):
        with pytest.raises(CorrelationError, match="inadmissible"):
            williams_test(0.9, -0.9, 0.9, 50)

    def test_boundary_correlations_rejected(self):
        with pytest.raises(CorrelationError):
            williams_test(1.0, 0.5, 0.2, 50)

    def test_two_sided(self):
        t, p1 = williams_test(0.6, 0.4, 0.5, 100)
        _, p2 = williams_test(0.6, 0.4, 0.5, 100, two_sided=True)
        assert p2 == pytest.approx(2 * p1)


def write_csv(path, rows, header):
    path.write_text("\n".join([",".join(header)] + [",".join(map(str, r)) for r in rows]) + "\n")


class TestLoadJudgments:
    def test_csv_three_rows(self, tmp_path):
        path = tmp_path / "j.csv"
        write_csv(
            path,
            [["a", 1.0, 0.5], ["b", 2.0, 0.7], ["c", 3.0, 0.9]],
            ["instance_id", "human:grammar", "metric:gruen"],
        )
        records = load_judgments(path)
        assert len(records) == 3
        assert records[0].human == {"grammar": 1.0}
        assert records[2].metrics == {"gruen": 0.9}

    def test_duplicate_id_names_both_lines(self, tmp_path):
        path = tmp_path / "j.csv"
        write_csv(
            path,
            [["a", 1.0], ["b", 2.0], ["a", 3.0]],
            ["instance_id", "human:grammar"],
        )
        with pytest.raises(JudgmentParseError, match="lines 2 and 4"):
            load_judgments(path)

    def test_unparseable_floats_name_lines(self, tmp_path):
        path = tmp_path / "j.csv"
        write_csv(
            path,
            [["a", "oops"], ["b", 2.0]],
            ["instance_id", "human:grammar"],
        )
        with pytest.raises(JudgmentParseError, match="line 2"):
            load_judgments(path)

    def test_missing_mandatory_column(self, tmp_path):
        path = tmp_path / "j.csv"
        write_csv(path, [["a", 1.0]], ["id", "human:grammar"])
        with pytest.raises(JudgmentParseError, match="instance_id"):
            load_judgments(path)

    def test_missing_values_allowed(self, tmp_path):
        path = tmp_path / "j.csv"
        path.write_text(
            "instance_id,human:grammar,metric:gruen\na,1.0,\nb,2.0,0.5\n"
        )
        records = load_judgments(path)
        assert "gruen" not in records[0].metrics

    def test_jsonl_equals_csv(self, tmp_path):
        csv_path = tmp_path / "j.csv"
        write_csv(
            csv_path,
            [["a", "s1", 1.0, 0.5], ["b", "s2", 2.0, 0.7]],
            ["instance_id", "system_id", "human:grammar", "metric:gruen"],
        )
        jsonl_path = tmp_path / "j.jsonl"
        jsonl_path.write_text(
            "\n".join(
                json.dumps(
                    {
                        "instance_id": i,
                        "system_id": s,
                        "human": {"grammar": h},
                        "metrics": {"gruen": m},
                    }
                )
                for i, s, h, m in [("a", "s1", 1.0, 0.5), ("b", "s2", 2.0, 0.7)]
            )
            + "\n"
        )
        assert load_judgments(csv_path) == load_judgments(jsonl_path)

    def test_explicit_format_overrides_extension(self, tmp_path):
        path = tmp_path / "data.txt"
        write_csv(path, [["a", 1.0]], ["instance_id", "human:g"])
        assert len(load_judgments(path, fmt="csv")) == 1


def make_records(n_systems=3, per_system=10, seed=0):
    rng = np.random.default_rng(seed)
    records = []
    for s in range(n_systems):
        lift = s * 0.3
        for k in range(per_system):
            human = rng.normal(loc=lift, scale=0.4)
            records.append(
                JudgmentRecord(
                    instance_id="s%d-i%d" % (s, k),
                    system_id="sys%d" % s,
                    human={"grammar": float(human)},
                    metrics={
                        "good": float(human + rng.normal(scale=0.2)),
                        "noise": float(rng.normal()),
                    },
                )
            )
    return records


class TestCorrelate:
    def test_perfect_column_pair(self):
        records = [
            JudgmentRecord("i%d" % k, human={"g": float(k)}, metrics={"m": 2.0 * k})
            for k in range(5)
        ]
        report = correlate(records)
        (cell,) = report.cells
        assert cell.spearman == pytest.approx(1.0)
        assert cell.pearson == pytest.approx(1.0)
        assert cell.n == 5

    def test_pairwise_deletion_reports_n(self):
        records = [
            JudgmentRecord("a", human={"g": 1.0}, metrics={"m": 1.0}),
            JudgmentRecord("b", human={"g": 2.0}, metrics={}),
            JudgmentRecord("c", human={"g": 3.0}, metrics={"m": 2.0}),
        ]
        (cell,) = correlate(records).cells
        assert cell.n == 2

    def test_too_few_pairs(self):
        records = [
            JudgmentRecord("a", human={"g": 1.0}, metrics={"m": 1.0}),
            JudgmentRecord("b", human={"g": 2.0}, metrics={}),
        ]
        with pytest.raises(CorrelationError, match="fewer than 2"):
            correlate(records)

    def test_report_round_trip(self):
        report = correlate(make_records())
        clone = CorrelationReport.from_dict(json.loads(json.dumps(report.to_dict())))
        assert clone == report

    def test_table_formatting(self):
        table = correlate(make_records()).format_table()
        assert "level: instance" in table
        assert "good" in table and "grammar" in table


class TestSystemLevel:
    def test_missing_system_id(self):
        records = [
            JudgmentRecord("a", human={"g": 1.0}, metrics={"m": 1.0}),
            JudgmentRecord("b", system_id="s", human={"g": 2.0}, metrics={"m": 2.0}),
        ]
        with pytest.raises(CorrelationError, match="system_id"):
            system_level(records)

    def test_needs_two_systems(self):
        records = [
            JudgmentRecord("a", system_id="s", human={"g": 1.0}, metrics={"m": 1.0}),
            JudgmentRecord("b", system_id="s", human={"g": 2.0}, metrics={"m": 2.0}),
        ]
        with pytest.raises(CorrelationError, match="2 systems"):
            system_level(records)

    def test_two_system_monotone(self):
        records = [
            JudgmentRecord("a", system_id="s1", human={"g": 1.0}, metrics={"m": 0.1}),
            JudgmentRecord("b", system_id="s1", human={"g": 2.0}, metrics={"m": 0.3}),
            JudgmentRecord("c", system_id="s2", human={"g": 3.0}, metrics={"m": 0.8}),
            JudgmentRecord("d", system_id="s2", human={"g": 4.0}, metrics={"m": 0.9}),
        ]
        report = system_level(records, metrics=["m"], dimensions=["g"])
        (cell,) = report.cells
        assert cell.spearman == pytest.approx(1.0)
        assert cell.n == 2

    def test_51_system_fixture_matches_oracle(self):
        records = make_records(n_systems=51, per_system=6, seed=9)
        report = system_level(records, metrics=["good"], dimensions=["grammar"])
        (cell,) = report.cells

        # oracle recomputation with numpy grouping + scipy coefficients
        by_system = {}
        for r in records:
            by_system.setdefault(r.system_id, []).append(r)
        metric_means, human_means = [], []
        for sys_id in sorted(by_system):
            group = by_system[sys_id]
            metric_means.append(np.mean([g.metrics["good"] for g in group]))
            human_means.append(np.mean([g.human["grammar"] for g in group]))
        assert cell.n == 51
        assert cell.pearson == pytest.approx(
            scipy_stats.pearsonr(metric_means, human_means).statistic, abs=1e-12
        )
        assert cell.spearman == pytest.approx(
            scipy_stats.spearmanr(metric_means, human_means).statistic, abs=1e-12
        )

        # and the instance-level view differs (computed both ways by the oracle)
        instance = correlate(records, metrics=["good"], dimensions=["grammar"])
        x = [r.metrics["good"] for r in records]
        y = [r.human["grammar"] for r in records]
        assert instance.cells[0].pearson == pytest.approx(
            scipy_stats.pearsonr(x, y).statistic, abs=1e-12
        )
        assert instance.cells[0].n == len(records)
        assert instance.cells[0].pearson != cell.pearson


class TestWilliamsCompare:
    def test_identical_metrics_tie(self):
        rng = np.random.default_rng(5)
        records = [
            JudgmentRecord(
                "i%d" % k,
                human={"g": float(rng.normal())},
                metrics={"a": float(k), "b": float(k)},
            )
            for k in range(20)
        ]
        # identical columns: zero numerator wins over the degenerate r23 = 1
        got = williams_compare(records, "a", "b", "g")
        assert got["t"] == 0.0 and got["p"] == pytest.approx(0.5)

    def test_spearman_mode_uses_ranks(self):
        records = make_records(seed=2)
        got = williams_compare(records, "good", "noise", "grammar", coef="spearman")
        a = [r.metrics["good"] for r in records]
        b = [r.metrics["noise"] for r in records]
        h = [r.human["grammar"] for r in records]
        assert got["r12"] == pytest.approx(pearson(midranks(a), midranks(h)))
        assert got["r13"] == pytest.approx(pearson(midranks(b), midranks(h)))
        assert got["r23"] == pytest.approx(pearson(midranks(a), midranks(b)))
        assert got["n"] == len(records)

    def test_dominant_metric_significant(self):
        records = make_records(n_systems=4, per_system=30, seed=12)
        got = williams_compare(records, "good", "noise", "grammar")
        assert got["p"] < 0.01


class TestTuneConfig:
    @staticmethod
    def fake_scorer(text, config):
        # metric that improves when the redundancy penalty is on: doubled
        # sentences get pushed down the ranking
        doubled = text.count("It rained.") > 1
        base = len(text) % 7 / 10.0
        return base - (config.redundancy_penalty * 4 if doubled else 0.0)

    def make_inputs(self):
        texts = {
            "a": "Sun rose early today.",
            "b": "It rained. It rained.",
            "c": "Wind calmed by evening, with clearing skies.",
            "d": "It rained. It rained. Again it rained.",
        }
        records = [
            JudgmentRecord("a", human={"overall": 3.0}),
            JudgmentRecord("b", human={"overall": 1.0}),
            JudgmentRecord("c", human={"overall": 2.8}),
            JudgmentRecord("d", human={"overall": 1.2}),
        ]
        return records, texts

    def test_singleton_grid(self):
        records, texts = self.make_inputs()
        result = tune_config(
            records, texts, {"redundancy_penalty": [0.1]}, self.fake_scorer
        )
        assert result.overrides == {"redundancy_penalty": 0.1}
        assert -1.0 <= result.spearman <= 1.0

    def test_dominant_grid_point_wins(self):
        records, texts = self.make_inputs()
        result = tune_config(
            records, texts, {"redundancy_penalty": [0.0, 0.1]}, self.fake_scorer
        )
        assert result.overrides == {"redundancy_penalty": 0.1}
        assert result.ties == 1

    def test_tie_keeps_first_and_reports(self):
        records, texts = self.make_inputs()

        def constant_ranking(text, config):
            return {"a": 0.9, "b": 0.1, "c": 0.8, "d": 0.2}[
                [k for k, v in texts.items() if v == text][0]
            ]

        result = tune_config(
            records, texts, {"focus_penalty": [0.1, 0.2, 0.3]}, constant_ranking
        )
        assert result.overrides == {"focus_penalty": 0.1}
        assert result.ties == 3

    def test_empty_search_space(self):
        records, texts = self.make_inputs()
        with pytest.raises(ValueError, match="empty"):
            tune_config(records, texts, {}, self.fake_scorer)
        with pytest.raises(ValueError, match="empty"):
            tune_config(records, texts, {"focus_penalty": []}, self.fake_scorer)

    def test_unscoreable_records_rejected(self):
        records, texts = self.make_inputs()
        del texts["a"]
        with pytest.raises(ValueError, match="scoreable"):
            tune_config(records, texts, {"focus_penalty": [0.1]}, self.fake_scorer)
