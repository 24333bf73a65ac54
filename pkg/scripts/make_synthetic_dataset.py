"""Write a synthetic dataset in the public four-file layout.

    python3 scripts/make_synthetic_dataset.py data/synthetic --countries 170 --seed 7
"""

import argparse

from dietrisk.synthetic import write_synthetic_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[1])
    ap.add_argument("out_dir")
    ap.add_argument("--countries", type=int, default=170)
    ap.add_argument("--profiles", type=int, default=6)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--no-kcal-reference", action="store_true")
    args = ap.parse_args()
    paths = write_synthetic_dataset(
        args.out_dir, n_countries=args.countries, n_profiles=args.profiles, seed=args.seed,
        with_kcal_reference=not args.no_kcal_reference,
    )
    for key, path in paths.items():
        print(f"{key:15s} {path}")


if __name__ == "__main__":
    main()
