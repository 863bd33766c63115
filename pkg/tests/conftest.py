import json

import pytest

from patentlab.cli import main


def run_cli(*argv) -> int:
    return main(list(argv))


TRAINED_WORLD_CONFIG = {
    "synthetic": {"n_firms": 30, "n_apps": 1500, "year_range": [2001, 2005], "seed": 19},
    "train": {
        "test_years": [2004, 2005],
        "hidden_dims": [16],
        "epochs": 2,
        "seed": 1,
        "runs": [
            ["acceptance", "full"],
            ["acceptance", "no_embedding"],
            ["acceptance", "embedding_only"],
            ["value", "full"],
            ["value", "no_embedding"],
        ],
    },
    "screen_worst_k": 150,
}


@pytest.fixture(scope="session")
def trained_world(tmp_path_factory):
    """Small corpus with artifacts through `train`: corpus files, cache,
    predictions, manifests, and service vintages for 2004-2005."""
    out = tmp_path_factory.mktemp("trained_world")
    cfg_path = out / "workflow.json"
    cfg_path.write_text(json.dumps(TRAINED_WORLD_CONFIG))
    for cmd in ("synth", "embed", "train"):
        rc = run_cli("--config", str(cfg_path), "--out-dir", str(out), cmd)
        assert rc == 0, f"{cmd} failed"
    return out, cfg_path
