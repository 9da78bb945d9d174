from __future__ import annotations

from pathlib import Path

PACKAGE_NAME = "crowdtrack"


def package_name() -> str:
    return PACKAGE_NAME


def package_path(*args: str) -> Path:
    """Path inside the installed package."""
    return Path(__file__).resolve().parent.parent.joinpath(*args)


def resources_path(*args: str) -> Path:
    """
    Path to the bundled resources, e.g. the example scene scripts
    shipped next to the package.
    """
    return package_path().parent.joinpath("scenes", *args)
