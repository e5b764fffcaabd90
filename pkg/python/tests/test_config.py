"""Configuration loading tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import json
from pathlib import Path

import pytest

from pbs.config import (
    CONFIG_ENV,
    DEFAULT_TOLERANCES,
    Config,
    ConfigError,
    apply_overrides,
    load_config,
    parse_complex,
    substitute_k,
)


class TestDefaults:
    def test_values(self) -> None:
        config = load_config(environ={})
        assert config.s_a == "x^2/4"
        assert config.k == 0.5
        assert config.z_value == 1 + 0.5j
        assert config.tolerance("biorth") == DEFAULT_TOLERANCES["biorth"]
        assert config.quadrature.hermite_points == 200

    def test_family(self) -> None:
        family = Config().family()
        assert family.label == "config"
        assert family.k == 0.5

    def test_echo_is_stable(self) -> None:
        echo = Config().to_dict()
        assert list(echo)[:3] == ["s_A", "phi", "k"]
        assert echo["resolution"]["grid"] == [200, 128]


class TestOverrides:
    def test_scalars_and_nested(self) -> None:
        config = apply_overrides(
            Config(),
            [
                "k=1.25",
                "nmax=12",
                "quadrature.hermite_points=300",
                "tolerances.biorth=1e-8",
            ],
        )
        assert config.k == 1.25
        assert config.nmax == 12
        assert config.quadrature.hermite_points == 300
        assert config.tolerance("biorth") == 1e-8

    def test_expression_kept_verbatim(self) -> None:
        config = apply_overrides(Config(), ["s_A=x^2/2 + k*x", "z=2-1i"])
        assert config.s_a == "x^2/2 + k*x"
        assert config.z_value == 2 - 1j

    def test_phi_builds_bounded_family(self) -> None:
        family = apply_overrides(Config(), ["phi=cos(x)"]).family()
        assert family.phi is not None

    @pytest.mark.parametrize(
        ("override", "path"),
        [
            ("k=abc", "k"),
            ("k=100", "k"),
            ("nmax=0", "nmax"),
            ("norm_split=halves", "norm_split"),
            ("colour=red", "colour"),
            ("quadrature.nodes=3", "quadrature.nodes"),
            ("quadrature.hermite_points=4", "quadrature"),
            ("tolerances.biorth=-1", "tolerances.biorth"),
            ("z=one", "z"),
            ("no-equals-sign", "no-equals-sign"),
        ],
    )
    def test_errors_name_the_key(self, override: str, path: str) -> None:
        with pytest.raises(ConfigError) as info:
            apply_overrides(Config(), [override])
        assert info.value.path == path

    def test_bad_expression_reported_at_family(self) -> None:
        config = apply_overrides(Config(), ["s_A=x^"])
        with pytest.raises(ConfigError) as info:
            config.family()
        assert info.value.path == "s_A"


class TestFile:
    def test_env_file_then_overrides(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps(
                {"k": 2.0, "bump": {"center": 0.5}, "tolerances": {"resolution": 1e-4}}
            ),
            encoding="utf-8",
        )
        config = load_config(overrides=["k=3.0"], environ={CONFIG_ENV: str(path)})
        assert config.k == 3.0
        assert config.bump_center == 0.5
        assert config.tolerance("resolution") == 1e-4

    def test_explicit_path_wins_over_env(self, tmp_path: Path) -> None:
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        first.write_text('{"nmax": 5}', encoding="utf-8")
        second.write_text('{"nmax": 7}', encoding="utf-8")
        config = load_config(first, environ={CONFIG_ENV: str(second)})
        assert config.nmax == 5

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json", environ={})

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(path, environ={})

    def test_top_level_must_be_object(self, tmp_path: Path) -> None:
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path, environ={})


class TestHelpers:
    def test_substitute_k(self) -> None:
        assert substitute_k("x^2/2 + k*x + sinh(x)", 0.5) == "x^2/2 + (0.5)*x + sinh(x)"

    def test_parse_complex(self) -> None:
        assert parse_complex(" 1 + 0.5i ") == 1 + 0.5j
        with pytest.raises(ValueError):
            parse_complex("1 + ")
