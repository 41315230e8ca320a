"""Shared fixtures: the bundled toy corpus and a session-trained model set."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

import reviewgen
from reviewgen import build_bundle, build_index, load_corpus, load_review_labels

TOY_DIR = Path(reviewgen.__file__).parent / "data" / "toy"
GOLDEN_DIR = Path(__file__).parent / "golden"


def run_cli(*args: object, cwd: str | None = None) -> subprocess.CompletedProcess:
    """Run the installed CLI in a fresh interpreter."""
    return subprocess.run(
        [sys.executable, "-m", "reviewgen.cli", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(TOY_DIR / "papers")


@pytest.fixture(scope="session")
def papers(corpus):
    return {p.paper_id: p for p in corpus}


@pytest.fixture(scope="session")
def labels():
    return {l.paper_id: l for l in load_review_labels(TOY_DIR / "labels.json")}


@pytest.fixture(scope="session")
def index2018(corpus):
    return build_index(corpus, 2018)


@pytest.fixture(scope="session")
def p12_bundle(papers, index2018):
    return build_bundle(papers["P12"], index2018)


@pytest.fixture(scope="session")
def trained(tmp_path_factory, toy_dir):
    """Background index and the seven models, trained once per session.

    The recipe (cutoff/epochs/seed) is read from the golden directory so
    golden regeneration and the tests can never drift apart.
    """
    recipe = json.loads(golden("recipe.json"))
    root = tmp_path_factory.mktemp("trained")
    index = root / "background.json"
    models = root / "models"
    result = run_cli(
        "build-background",
        "--corpus", toy_dir / "papers",
        "--cutoff", recipe["cutoff"],
        "--index", index,
    )
    assert result.returncode == 0, result.stderr
    result = run_cli(
        "train", toy_dir / "labels.json",
        "--corpus", toy_dir / "papers",
        "--index", index,
        "--models", models,
        "--epochs", recipe["epochs"],
        "--seed", recipe["seed"],
    )
    assert result.returncode == 0, result.stderr
    return {"index": index, "models": models, "recipe": recipe}
