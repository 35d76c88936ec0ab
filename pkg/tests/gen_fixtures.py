"""Regenerate the shipped population fixtures and golden CLI outputs.

Run from the repository root:

    python tests/gen_fixtures.py

Only needed when the generator, the member-table format, or the fixture
recipes change; the outputs are committed.
"""

import pathlib

import surveykit as sk
from surveykit.cli import main

DATA = pathlib.Path(__file__).parent / "data"

RECIPES = {
    "pop_n24.csv": sk.SyntheticSpec(N=24, target_rho=0.9, mean_y=20, mean_x=10, cv_y=0.3, cv_x=0.2, seed=42),
    "pop_n12.csv": sk.SyntheticSpec(N=12, target_rho=0.9, mean_y=20, mean_x=10, cv_y=0.3, cv_x=0.2, seed=11),
    "pop_n10.csv": sk.SyntheticSpec(N=10, target_rho=0.9, mean_y=20, mean_x=10, cv_y=0.3, cv_x=0.2, seed=5),
}

GOLDENS = {
    "golden_members_t1_ratio.csv": ["members", "--n", "6", "--format", "csv"],
    "golden_members_t1_product.csv": ["members", "--n", "6", "--alpha", "-1", "--format", "csv"],
    "golden_members_t2.csv": ["members", "--n", "6", "--family", "t2", "--format", "csv"],
}


if __name__ == "__main__":
    for name, spec in RECIPES.items():
        sk.save_population(sk.generate_synthetic(spec), str(DATA / name))
        print(f"wrote {name}")
    pop24 = str(DATA / "pop_n24.csv")
    for name, argv in GOLDENS.items():
        code = main(argv + ["--pop", pop24, "--out", str(DATA / name)])
        assert code == 0, name
        print(f"wrote {name}")
