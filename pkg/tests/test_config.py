"""key=value configuration parsing for simulation and grid files."""

import pytest

from hetscan.config import (
    ConfigError,
    parse_grid,
    parse_sections,
    parse_sim_config,
    sim_config_from_items,
)

SIM_TEXT = """# simulation settings
family = bernoulli
n_obs = 120
n_predictors = 4
sparsity = 0.5
"""

GRID_TEXT = """family = gaussian
n_obs = 100

[small]
n_predictors = 5
n_groupings = 1

[large]
n_predictors = 10
n_groupings = 2
"""


class TestParseSections:
    def test_defaults_and_sections(self):
        defaults, sections = parse_sections(GRID_TEXT)
        assert defaults == {"family": "gaussian", "n_obs": "100"}
        assert [name for name, _ in sections] == ["small", "large"]
        assert sections[0][1] == {"n_predictors": "5", "n_groupings": "1"}

    def test_comments_and_blanks_ignored(self):
        defaults, sections = parse_sections("# hi\n\nfamily = gaussian\n")
        assert defaults == {"family": "gaussian"}
        assert sections == []

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_sections("family gaussian\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_sections("a = 1\na = 2\n")

    def test_duplicate_key_allowed_across_sections(self):
        _, sections = parse_sections("[a]\nn_obs = 1\n[b]\nn_obs = 2\n")
        assert sections[0][1] != sections[1][1]

    def test_empty_section_name(self):
        with pytest.raises(ConfigError, match="section"):
            parse_sections("[]\n")

    def test_empty_value(self):
        with pytest.raises(ConfigError, match="empty"):
            parse_sections("family =\n")


class TestSimConfigFromItems:
    def test_coercion(self):
        cfg = sim_config_from_items(
            {"family": "gaussian", "n_obs": "50", "sparsity": "0.25"}
        )
        assert cfg.n_obs == 50
        assert cfg.sparsity == 0.25

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            sim_config_from_items({"n_observations": "50"})

    def test_seed_not_accepted_in_config(self):
        # The seed comes from the command line so artifacts record it once.
        with pytest.raises(ConfigError, match="seed"):
            sim_config_from_items({"seed": "3"})

    def test_unparseable_value(self):
        with pytest.raises(ConfigError, match="n_obs"):
            sim_config_from_items({"n_obs": "many"})

    def test_domain_violation_wrapped(self):
        with pytest.raises(ConfigError, match="n_levels"):
            sim_config_from_items({"n_levels": "1"})


class TestParseSimConfig:
    def test_full_example(self):
        cfg = parse_sim_config(SIM_TEXT)
        assert cfg.family == "bernoulli"
        assert cfg.n_obs == 120
        assert cfg.n_predictors == 4
        assert cfg.sparsity == 0.5
        # Untouched values fall back to family defaults.
        assert cfg.slope_var == 2.0

    def test_sections_rejected(self):
        with pytest.raises(ConfigError, match="section"):
            parse_sim_config(GRID_TEXT)

    def test_empty_text_gives_defaults(self):
        cfg = parse_sim_config("")
        assert cfg.family == "gaussian"
        assert cfg.n_obs == 300


class TestParseGrid:
    def test_defaults_merged_into_cells(self):
        cells = parse_grid(GRID_TEXT)
        assert len(cells) == 2
        assert all(c.family == "gaussian" and c.n_obs == 100 for c in cells)
        assert cells[0].n_predictors == 5
        assert cells[1].n_groupings == 2

    def test_cell_overrides_default(self):
        text = "n_obs = 100\n[cell]\nn_obs = 40\n"
        cells = parse_grid(text)
        assert cells[0].n_obs == 40

    def test_requires_a_section(self):
        with pytest.raises(ConfigError, match="section"):
            parse_grid("family = gaussian\n")

    def test_bad_cell_names_the_section(self):
        with pytest.raises(ConfigError, match=r"cell \[bad\]"):
            parse_grid("[bad]\nn_levels = 0\n")
