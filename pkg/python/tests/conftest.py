"""Tests lifecycle and shared families."""

# pylint: disable=unused-argument,import-outside-toplevel
# pyright: reportUnusedParameter=false

from __future__ import annotations

import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import pytest

if TYPE_CHECKING:
    from pbs.superpotential import PbsFamily

_pbs_sys_entry: dict[str, Any] = {"inserted": False, "path": None}

# make the local package importable before collection imports it
_PKG_DIR = str(Path(__file__).resolve().parents[1])
if _PKG_DIR not in sys.path:
    sys.path.insert(0, _PKG_DIR)
    _pbs_sys_entry["inserted"] = True
    _pbs_sys_entry["path"] = _PKG_DIR


def pytest_sessionfinish(session: pytest.Session, exitstatus: int) -> None:
    """Remove the entry we inserted at session end (if any)."""
    if _pbs_sys_entry.get("inserted"):
        path = _pbs_sys_entry.get("path")
        while path in sys.path:
            sys.path.remove(path)


@pytest.fixture(scope="session")
def asymmetric() -> PbsFamily:
    """s_A = x^2/4 at k = 0.5."""
    from pbs.superpotential import preset_family

    return preset_family("asymmetric-k", 0.5)


@pytest.fixture(scope="session")
def bounded_cos() -> PbsFamily:
    """Phi = cos x at k = 0.5."""
    from pbs.superpotential import preset_family

    return preset_family("bounded-cos", 0.5)


@pytest.fixture(scope="session")
def quartic() -> PbsFamily:
    """s_A = x^2/2 + x^4 at k = 0.5 (Psi side not square integrable)."""
    from pbs.superpotential import preset_family

    return preset_family("quartic-nonL2", 0.5)
