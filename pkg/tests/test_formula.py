"""Formula string emission and parsing."""

import pytest

from hetscan.formula import ParsedFormula, build_formula, parse_formula


class TestBuildFormula:
    def test_single_grouping_single_selection(self):
        out = build_formula("y", ["x1", "x2"], ["g1"], [(0,)])
        assert out == "y ~ x1 + x2 + (x1 | g1)"

    def test_no_selection_gives_intercept_only_term(self):
        out = build_formula("y", ["x1", "x2"], ["g1"], [()])
        assert out == "y ~ x1 + x2 + (1 | g1)"

    def test_many_groupings_full_and_empty(self):
        out = build_formula(
            "dailyuses",
            ["temperature", "humidity", "windspeed"],
            ["month", "day_of_week", "season", "weather", "holiday"],
            [(0, 1, 2), (), (), (), ()],
        )
        assert out == (
            "dailyuses ~ temperature + humidity + windspeed"
            " + (temperature + humidity + windspeed | month)"
            " + (1 | day_of_week) + (1 | season) + (1 | weather) + (1 | holiday)"
        )

    def test_selection_emitted_in_dataset_order(self):
        out = build_formula("y", ["x1", "x2", "x3"], ["g"], [(2, 0)])
        assert out == "y ~ x1 + x2 + x3 + (x1 + x3 | g)"

    def test_single_spaces_only(self):
        out = build_formula("y", ["x1"], ["g"], [(0,)])
        assert "  " not in out


class TestParseFormula:
    def test_round_trip_simple(self):
        text = "y ~ x1 + x2 + (x1 | g1)"
        parsed = parse_formula(text)
        assert parsed == ParsedFormula(
            response="y", fixed=("x1", "x2"), random=((("x1",), "g1"),)
        )

    def test_round_trip_intercept_only(self):
        parsed = parse_formula("y ~ x1 + (1 | g)")
        assert parsed.random == (((), "g"),)

    def test_build_then_parse_recovers_structure(self):
        predictors = ["x1", "x2", "x3", "x4"]
        groupings = ["ga", "gb"]
        selections = [(1, 3), ()]
        text = build_formula("resp", predictors, groupings, selections)
        parsed = parse_formula(text)
        assert parsed.response == "resp"
        assert parsed.fixed == tuple(predictors)
        assert parsed.random == ((("x2", "x4"), "ga"), ((), "gb"))

    def test_whitespace_tolerated(self):
        parsed = parse_formula("  y ~   x1 +  ( x1 | g )  ")
        assert parsed.fixed == ("x1",)
        assert parsed.random == ((("x1",), "g"),)

    def test_names_with_dots_and_underscores(self):
        parsed = parse_formula("y ~ day_of_week + (day_of_week | g.1)")
        assert parsed.fixed == ("day_of_week",)
        assert parsed.random[0][1] == "g.1"

    @pytest.mark.parametrize(
        "text",
        [
            "y x1 + x2",
            "y ~",
            "y ~ x1 + + x2",
            "y ~ x1 + (x1 | g",
            "y ~ x1 + x1 | g)",
            "y ~ (1 | g)",
            "y ~ x1 + (x1 & x2 | g)",
            "~ x1",
        ],
    )
    def test_malformed_rejected(self, text):
        with pytest.raises(ValueError):
            parse_formula(text)
