"""Regenerate the scenario files shipped under data/."""

from pathlib import Path

from teachbench.scenarios import (
    gen_figure1,
    gen_separable,
    gen_xor,
    save_scenario,
    scenario_from_doc,
    scenario_to_doc,
)


def xor_without_product():
    doc = scenario_to_doc(gen_xor())
    doc["feature_pool"] = [f for f in doc["feature_pool"] if f["id"] != "ab"]
    return scenario_from_doc(doc)


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "data"
    out.mkdir(exist_ok=True)
    save_scenario(gen_xor(), out / "xor.json")
    save_scenario(gen_figure1(), out / "figure1.json")
    save_scenario(gen_separable(16, 2, 0.5, seed=7), out / "separable.json")
    save_scenario(xor_without_product(), out / "xor_no_product.json")
    for name in ("xor", "figure1", "separable", "xor_no_product"):
        print(f"wrote {out / name}.json")


if __name__ == "__main__":
    main()
