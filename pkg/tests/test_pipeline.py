import pytest

from vecmkit import Dataset, DgpSpec, generate, to_csv
from vecmkit.errors import ConfigError, StageError
from vecmkit.pipeline import STAGES, PipelineConfig, load_config, parse_config, run_pipeline

FAST = PipelineConfig(bootstrap_replications=0)


@pytest.fixture(scope="module")
def study_report(study):
    return run_pipeline(FAST, data=study)


class TestStudyRun:
    def test_all_stages_complete(self, study_report):
        assert study_report.ok
        assert study_report.completed == list(STAGES)
        assert study_report.skipped == {}

    def test_decision_chain(self, study_report):
        d = study_report.decisions
        assert d[0] == "integration order: all series I(1) by PP at 5%"
        assert "cointegrating rank 2 (trace test, 5%)" in d
        assert "weakly exogenous at 10%: TRADE, GOVCON; dropped" in d
        assert "restricted cointegrating rank 2 (trace test, 5%)" in d
        assert "Granger causality (5%): unidirectional GDP->FDI" in d

    def test_tables(self, study_report):
        t = study_report.tables
        assert len(t["table04_johansen"].rows) == 5
        assert len(t["table05_vecm_unrestricted"].rows) == 2
        assert [r[0] for r in t["appendix_a2_weak_exogeneity"].rows] == ["GDP", "FDI", "PRVT", "TRADE", "GOVCON"]
        assert {r[0] for r in t["table10_fevd"].rows} == {"GDP", "FDI", "PRVT"}
        assert len(t["table10_fevd"].rows) == 3 * 9
        assert len(t["irf"].rows) == 10 * 9

    def test_long_run_vectors(self, study_report):
        rows = study_report.tables["table07_longrun"].rows
        first = [r for r in rows if r[0] == 1]
        assert first[0][1] == "GDP"
        assert first[0][3] == pytest.approx(1.0)

    def test_log_prefix(self, study):
        shifted = Dataset.from_matrix(study.names, study.time_index, study.matrix + 100.0)
        cfg = PipelineConfig(bootstrap_replications=0, log=("GDP",))
        rep = run_pipeline(cfg, data=shifted)
        assert rep.tables["table01_descriptives"].rows[0][0] == "LGDP"

    def test_log_of_nonpositive_fails(self, study):
        rep = run_pipeline(PipelineConfig(log=("GDP",)), data=study)
        assert rep.failure["stage"] == "load"


class TestHalts:
    def test_independent_random_walks(self):
        d = generate(DgpSpec("random_walk", {"k": 3}, T=500, seed=4))
        rep = run_pipeline(FAST, data=d)
        assert rep.ok
        assert rep.decisions[-1] == "rank 0: no cointegration; VECM skipped"
        assert rep.completed[-1] == "johansen"
        assert rep.skipped["vecm"] == "rank 0: no cointegration; VECM skipped"
        assert "table04_johansen" in rep.tables and "table05_vecm_unrestricted" not in rep.tables

    def test_stationary_series(self):
        d = generate(DgpSpec("white_noise", {"k": 3}, T=100, seed=1))
        rep = run_pipeline(FAST, data=d)
        assert rep.completed == ["load", "describe", "unitroot"]
        assert "I(0)" in rep.decisions[-1]
        assert set(rep.skipped) == set(STAGES[3:])


class TestFailures:
    def test_missing_file(self, tmp_path):
        rep = run_pipeline(PipelineConfig(data=str(tmp_path / "absent.csv")))
        assert rep.failure["stage"] == "load"
        assert rep.tables == {} and rep.completed == []
        assert set(rep.skipped) == set(STAGES[1:])

    def test_raise_on_failure(self, tmp_path):
        with pytest.raises(StageError) as info:
            run_pipeline(PipelineConfig(data=str(tmp_path / "absent.csv")), raise_on_failure=True)
        assert info.value.stage == "load"
        assert str(info.value).startswith("[load]")

    def test_bad_ordering_fails_irf(self, study):
        cfg = PipelineConfig(bootstrap_replications=0, ordering=("GDP", "FDI", "XYZ"))
        rep = run_pipeline(cfg, data=study)
        assert rep.failure["stage"] == "irf"
        assert "table09_diagnostics" in rep.tables
        assert rep.skipped["fevd"] == "not run: stage 'irf' failed"

    def test_unknown_column(self, study):
        rep = run_pipeline(PipelineConfig(columns=("GDP", "NOPE")), data=study)
        assert rep.failure["stage"] == "load"


class TestConfig:
    def test_parse(self, tmp_path):
        text = """
        data = study.csv   # relative to the config file
        columns = GDP, FDI, PRVT
        log = GDP
        max_lag = 4
        significance = 0.05
        bootstrap_replications = 0
        """
        cfg = parse_config("\n".join(line.strip() for line in text.splitlines()), tmp_path)
        assert cfg.data == str(tmp_path / "study.csv")
        assert cfg.columns == ("GDP", "FDI", "PRVT")
        assert cfg.max_lag == 4 and cfg.significance == "5%"
        assert cfg.to_dict()["data"] == "study.csv"

    @pytest.mark.parametrize("text", [
        "colour = blue",
        "max_lag = many",
        "significance = 0.07",
        "bootstrap_replications = 50",
        "johansen_case = sideways",
        "granger_pair = A",
        "format = xml",
    ])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "none.cfg")

    def test_run_from_file(self, tmp_path, study):
        to_csv(study, tmp_path / "study.csv")
        (tmp_path / "study.cfg").write_text("data = study.csv\nbootstrap_replications = 0\n")
        rep = run_pipeline(load_config(tmp_path / "study.cfg"))
        assert rep.ok and rep.completed == list(STAGES)

    def test_to_dict_excludes_runtime_settings(self):
        d = PipelineConfig(workers=8, output="/tmp/x").to_dict()
        assert "workers" not in d and "output" not in d and "format" not in d
