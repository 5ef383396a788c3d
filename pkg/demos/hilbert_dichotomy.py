#!/usr/bin/env python3
"""Classify random bundles: inner-product fibers vs. a certified violation.

For each generated bundle the worst fiberwise parallelogram defect decides
the branch.  Defect-free bundles must satisfy the integrated two-norm
parallelogram identity on random section pairs; a defective fiber yields a
pair of sections supported on a single atom whose integrated residual is
bounded below by the weighted fiber defect.
"""

import argparse

from bundlelab.generators import InstanceRecipe
from bundlelab.suites import suite_hilbert


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=12)
    parser.add_argument("--seed", type=int, default=29)
    args = parser.parse_args(argv)

    recipe = InstanceRecipe(seed=args.seed, instance_count=args.count,
                            atom_range=(2, 4), dim_range=(2, 3))
    reports = suite_hilbert(recipe)

    print(f"{'instance':<14} {'branch':<26} {'residual':>12} {'threshold':>12}  verdict")
    unexpected = 0
    for rep in reports:
        row = rep.checks[0]
        verdict = "ok" if not rep.unexpected else "UNEXPECTED"
        unexpected += int(rep.unexpected)
        print(f"{rep.instance[:12]:<14} {row.name:<26} {row.residual:12.3e} "
              f"{row.threshold:12.3e}  {verdict}")
    print(f"\n{len(reports)} bundles, {unexpected} unexpected verdicts")
    return 0 if unexpected == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
