import json

import pytest


def run_harness(tmp_path, config, out_name):
    """Produce a real aggregate CSV with the primary package's CLI."""
    from sqopt.cli import main as sqopt_main

    cfg = tmp_path / f"{out_name}.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / out_name
    assert sqopt_main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    return out / "aggregate.csv"


BASE = {
    "problem": {"type": "quadratic", "a": [1, 1, 1, 1], "b": [2, 1, -1, -2]},
    "x0": 5.0,
    "alpha": 0.015,
    "T": 120,
    "trials": 20,
    "seed": 20240817,
    "record_every": 2,
}


@pytest.fixture(scope="session")
def comparison_csv(tmp_path_factory):
    config = dict(BASE, algos=[
        {"kind": "sgd"}, {"kind": "ogq"}, {"kind": "sgq", "p": 0.3},
        {"kind": "saga"}, {"kind": "svrg", "snapshot_every": 10},
    ])
    return run_harness(tmp_path_factory.mktemp("cmp"), config, "cmp")


@pytest.fixture(scope="session")
def psweep_csv(tmp_path_factory):
    config = dict(BASE, algos=[
        {"kind": "sgq", "p": p, "label": f"sgq_p{p}"}
        for p in [0.1, 0.3, 0.7, 1.0]
    ])
    return run_harness(tmp_path_factory.mktemp("sweep"), config, "sweep")
