"""Smoke tests for the python bindings: one pass over each exposed operation."""

import json

import pytest

import gamelab


def config_doc(languages=("en",)):
    langs = list(languages)
    return {
        "name": "smokegame",
        "nRounds": 4,
        "nRoundsIsKnown": True,
        "llm": "scripted:tit_for_tat,always_a",
        "languages": langs,
        "allAgentPermutations": False,
        "agents": {
            "names": ["agent1", "agent2"],
            "personalities": {
                lang: {
                    "cooperative": f"You are cooperative ({lang}).",
                    "selfish": f"You are selfish ({lang}).",
                }
                for lang in langs
            },
            "opponentPersonalityProb": [0, 0],
        },
        "payoffMatrix": {
            "weights": {"w1": 6, "w2": 0, "w3": 10, "w4": 2},
            "strategies": {
                lang: {"A": f"Option A [{lang}]", "B": f"Option B [{lang}]"}
                for lang in langs
            },
            "combinations": ["AA", "AB", "BA", "BB"],
            "matrix": {
                "AA": ["w1", "w1"],
                "AB": ["w2", "w3"],
                "BA": ["w3", "w2"],
                "BB": ["w4", "w4"],
            },
        },
        "stopGameWhen": [],
        "agentsCommunicate": False,
    }


TEMPLATE = (
    "Game {game_name}. {round_info} {personality} Options: {strategies}. "
    "{payoff_description}\nHistory:\n{history}\nChoose one."
)


def templates_for(languages=("en",)):
    return {lang: TEMPLATE for lang in languages}


def test_version_matches_package():
    assert gamelab.version().endswith(gamelab.__version__)


def test_validate_clean_and_findings():
    doc = config_doc()
    assert gamelab.validate(json.dumps(doc), templates_for()) == []

    broken = config_doc(["en", "fr"])
    broken["payoffMatrix"]["combinations"] = ["AA", "AB", "BA"]
    findings = gamelab.validate(json.dumps(broken), templates_for(["en"]))
    codes = {f["code"] for f in findings}
    assert "MISSING_COMBINATION" in codes
    assert "MISSING_TEMPLATE" in codes
    assert all(set(f) == {"code", "path", "message"} for f in findings)


def test_config_errors_are_value_errors():
    assert issubclass(gamelab.ConfigError, ValueError)
    with pytest.raises(gamelab.ConfigError):
        gamelab.normalize_config("{broken")
    reparsed = json.loads(gamelab.normalize_config(json.dumps(config_doc())))
    assert reparsed["name"] == "smokegame"
    assert reparsed["nRounds"] == 4


def test_builtin_payoffs():
    assert set(gamelab.builtin_variants()) >= {
        "pd_conventional",
        "pd_harsh",
        "pd_mild",
        "battle_of_sexes",
    }
    assert gamelab.preset_payoff("pd_conventional", "AB") == [0.0, 10.0]
    assert gamelab.preset_payoff("battle_of_sexes", "AA") == [10.0, 7.0]
    assert gamelab.dilemma_strength_gap("pd_conventional") == 4.0
    assert gamelab.dilemma_strength_gap("pd_harsh") == 3.0
    with pytest.raises(ValueError):
        gamelab.preset_payoff("no_such_variant", "AA")


def test_enumerate_setups_order_and_size():
    keys = gamelab.enumerate_setups(
        json.dumps(config_doc(["en", "fr"])),
        variants=["pd_harsh", "pd_mild"],
        repetitions=2,
    )
    assert len(keys) == 1 * 2 * 2 * 2  # assignments x languages x variants x reps
    assert len(set(keys)) == len(keys)
    assert keys[0].startswith("agent1=cooperative,agent2=selfish|en|pd_harsh")


def test_campaign_analytics_scorecard(tmp_path):
    doc = json.dumps(config_doc(["en", "fr"]))
    templates = templates_for(["en", "fr"])
    out_dir = str(tmp_path / "run")

    summary = gamelab.run_campaign(
        doc, templates, out_dir, variants=["pd_harsh", "pd_mild"], repetitions=2, seed=3
    )
    assert summary["games"] == 8
    assert summary["failures"] == 0
    assert summary["decisions"] == 8 * 4 * 2

    lines = gamelab.load_histories(summary["histories_path"])
    assert len(lines) == 8
    first = json.loads(lines[0])
    assert first["setup"]["llm"] == "scripted:tit_for_tat,always_a"
    assert len(first["rounds"]) == 4

    again = gamelab.run_campaign(
        doc,
        templates,
        out_dir,
        variants=["pd_harsh", "pd_mild"],
        repetitions=2,
        seed=3,
        resume=True,
    )
    assert again["newly_run"] == 0
    assert again["resumed"] == 8

    aggregates = gamelab.aggregates_csv(summary["histories_path"])
    assert aggregates.startswith(
        "model,language,personalities,agent_personality,rounds_known,disclosed,variant"
    )
    assert "pd_harsh" in aggregates

    trajectories = gamelab.trajectories_csv(summary["histories_path"])
    assert trajectories.startswith("variant,round,mean_encoded")
    assert "pd_mild" in trajectories

    scorecard = json.loads(gamelab.scorecard_json([summary["histories_path"]]))
    assert len(scorecard["models"]) == 1
    entry = scorecard["models"][0]
    assert entry["model"] == "scripted:tit_for_tat,always_a"
    assert "payoff_sensitivity" in entry["raw"]  # harsh and mild are both present
    for value in entry["normalized"].values():
        assert 0.0 <= value <= 1.0


def test_metric_primitives():
    assert gamelab.internal_variability([2, 4, 4, 4, 5, 5, 7, 9]) == 4.0
    assert gamelab.cross_language_inconsistency(
        [("en", "c1", 0.0), ("fr", "c1", 2.0), ("en", "c2", 0.0), ("fr", "c2", 4.0)]
    ) == 2.5
    assert gamelab.payoff_sensitivity([1.0, 1.0], [0.0, -1.0]) == 1.5
    assert gamelab.round_variability([[1.0, -1.0], [1.0, 1.0]]) == 0.5
