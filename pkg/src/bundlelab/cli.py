"""Command-line entry point.

Four subcommands, all batch-style: read one JSON run configuration, compute,
write a summary plus CSV/plot-data reports into the output directory.

    bundlelab modulus    --config run.json [--out DIR] [--seed N] [--grid a:b:step]
    bundlelab suite      --config run.json ...
    bundlelab dual-check --config run.json ...
    bundlelab criterion  --config run.json ...

Exit codes: 0 all verdicts as expected, 1 an unexpected FAIL, 2 bad
configuration.  Reruns with an identical configuration produce byte-identical
CSV bodies (the summary header carries the only timestamp).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .bundles import pointwise_norm, section_lp_norm, section_modulus_curve
from .convexity import DEFAULT_EPS_GRID, modulus_curve
from .criterion import (
    induced_norm,
    mixed_max_norm,
    mixed_sum_norm,
    reconstruct_pointwise_norm,
    restriction_additivity_check,
    sup_over_atoms_norm,
    weak_star_continuity_check,
)
from .duality import (
    check_reflexivity_diagram,
    dual_operator_norm,
    dual_pointwise_norm,
    holder_maximizer,
    integrated_pairing,
    operator_norm,
)
from .generators import instance_rng, random_dual_section, random_section
from .measure import conjugate_exponent, lp_norm
from .norms import norm_spec_from_config
from .reportio import (
    ReportBundle,
    csv_table,
    plot_data,
    report_data_files,
    suite_reports_table,
    suite_summary_markdown,
)
from .serialize import (
    ConfigError,
    budget_from_config,
    bundle_digest,
    bundle_from_config,
    digest,
    section_from_config,
)
from .suites import SUITE_TAGS, default_recipe, run_suites
from .generators import recipe_from_config

_EXPLICIT_TOL = 1e-9
_SAMPLED_TOL = 1e-6


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ConfigError(f"grid must look like 'a:b:step', got {text!r}") from None
    if step <= 0 or a <= 0 or b < a or b > 2.0:
        raise ConfigError("grid bounds must satisfy 0 < a <= b <= 2 with step > 0")
    return np.round(np.arange(a, b + 0.5 * step, step), 12)


def _resolve_grid(cfg: dict, args) -> np.ndarray:
    if args.grid is not None:
        return _parse_grid(args.grid)
    grid = cfg.get("grid")
    if grid is None:
        return DEFAULT_EPS_GRID
    if isinstance(grid, str):
        return _parse_grid(grid)
    eps = np.asarray(grid, dtype=float)
    if eps.ndim != 1 or len(eps) == 0:
        raise ConfigError("grid must be a one-dimensional list of separations")
    return eps


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _run_digest(command: str, cfg: dict, seed, grid) -> str:
    payload = {"command": command, "config": cfg, "seed": seed,
               "grid": [float(e) for e in grid]}
    return digest(payload)


# -- modulus ---------------------------------------------------------------------


def cmd_modulus(cfg: dict, args) -> int:
    grid = _resolve_grid(cfg, args)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    budget = budget_from_config(cfg.get("budget"))
    if args.seed is not None:
        budget = dataclasses.replace(budget, seed=args.seed)

    if "norm" in cfg:
        spec = norm_spec_from_config(cfg["norm"])
        instance = spec.digest()
        curve = modulus_curve(spec, grid, budget)
        what = f"norm kind {spec.kind}, dimension {spec.dimension}"
    elif "bundle" in cfg:
        bundle = bundle_from_config(cfg["bundle"])
        p = cfg.get("p", 2)
        instance = bundle_digest(bundle)
        curve = section_modulus_curve(bundle, p, grid, budget)
        what = f"section space at exponent {p} over {bundle.space.atom_count} atoms"
    else:
        raise ConfigError("modulus config needs a 'norm' or 'bundle' entry")

    run = _run_digest("modulus", cfg, seed, grid)
    rows = [
        (instance, seed, float(e), float(d), float(r))
        for e, d, r in zip(curve.epsilons, curve.deltas, curve.raw_deltas)
    ]
    bundle_out = ReportBundle(Path(args.out))
    bundle_out.tables["modulus_curve.csv"] = csv_table(
        ("instance", "seed", "epsilon", "delta", "raw_delta"), rows
    )
    bundle_out.data_files["modulus_curve.dat"] = plot_data(
        {"epsilon": curve.epsilons, "delta": curve.deltas},
        comment=f"instance={instance}",
    )
    bundle_out.summary = "\n".join(
        [
            "# modulus run", "",
            f"run-config digest: `{run}`",
            f"instance: `{instance}` ({what})",
            f"seed: {seed}",
            f"grid: {len(grid)} separations in [{grid[0]:g}, {grid[-1]:g}]",
            f"max delta: {float(curve.deltas.max())!r}", "",
        ]
    )
    bundle_out.write()
    return 0


# -- suite -----------------------------------------------------------------------


def cmd_suite(cfg: dict, args) -> int:
    grid = _resolve_grid(cfg, args)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    budget = budget_from_config(cfg.get("budget")) if cfg.get("budget") else None

    tags = cfg.get("suites", "all")
    if isinstance(tags, str):
        tags = (tags,)
    for t in tags:
        if t != "all" and t not in SUITE_TAGS:
            raise ConfigError(
                f"unknown suite tag {t!r}; valid tags: {sorted(SUITE_TAGS)} or 'all'"
            )
    recipes = {}
    for name, rcfg in (cfg.get("recipes") or {}).items():
        if name not in SUITE_TAGS:
            raise ConfigError(
                f"recipe for unknown suite {name!r}; valid tags: {sorted(SUITE_TAGS)}"
            )
        recipes[name] = recipe_from_config(rcfg)
    if args.seed is not None:
        # --seed reseeds every recipe deterministically (fixed offset per suite)
        names = list(SUITE_TAGS) if "all" in tags else list(tags)
        for k, name in enumerate(sorted(names)):
            base = recipes.get(name, default_recipe(name))
            recipes[name] = dataclasses.replace(base, seed=args.seed + 1000 * k)

    reports = run_suites(tags, recipes, grid, budget, seed)
    run = _run_digest("suite", cfg, seed, grid)

    out = ReportBundle(Path(args.out))
    out.tables["suite_reports.csv"] = suite_reports_table(reports, seed)
    out.data_files.update(report_data_files(reports))
    out.summary = suite_summary_markdown("suite run", run, seed, reports)
    out.write()
    unexpected = sum(r.unexpected for r in reports)
    if unexpected:
        print(f"{unexpected} unexpected verdict(s); see summary.md", file=sys.stderr)
        return 1
    return 0


# -- dual-check ------------------------------------------------------------------


def cmd_dual_check(cfg: dict, args) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if "bundle" not in cfg:
        raise ConfigError("dual-check config needs a 'bundle' entry")
    bundle = bundle_from_config(cfg["bundle"])
    p = cfg.get("p", 2)
    try:
        pf = float(p)
    except (TypeError, ValueError):
        raise ConfigError(f"exponent p must be numeric, got {p!r}") from None
    if not 1.0 < pf < float("inf"):
        raise ConfigError("exponent must lie in (1, inf) for duality operations")
    q = conjugate_exponent(p)
    instance = bundle_digest(bundle)

    explicit = []
    if "dual_section" in cfg:
        omega = section_from_config(bundle, {"vectors": cfg["dual_section"]}, dual=True)
        explicit.append(("explicit", omega, None))
    if "section" in cfg:
        v = section_from_config(bundle, {"vectors": cfg["section"]})
        if explicit:
            explicit[0] = ("explicit", explicit[0][1], v)
        else:
            explicit.append(("explicit", None, v))

    samples = int(cfg.get("samples", 100))
    rng = instance_rng(seed, 0, stream=5)
    rows = []

    def check(sample, quantity, value, reference, tol):
        residual = abs(value - reference)
        rows.append((instance, seed, sample, quantity, value, reference,
                     residual, tol, residual <= tol))

    for label, omega, v in explicit:
        if omega is not None:
            check(label, "operator-norm-vs-dual-lq", operator_norm(omega, p),
                  lp_norm(dual_pointwise_norm(omega), q), _EXPLICIT_TOL)
            vstar = holder_maximizer(omega, p)
            check(label, "holder-attainment", integrated_pairing(omega, vstar),
                  operator_norm(omega, p), _EXPLICIT_TOL)
        if v is not None:
            check(label, "swapped-operator-norm-vs-lp", dual_operator_norm(v, q),
                  section_lp_norm(v, p), _EXPLICIT_TOL)
        if omega is not None and v is not None:
            lhs = integrated_pairing(omega, v)
            bound = operator_norm(omega, p) * section_lp_norm(v, p)
            rows.append((instance, seed, label, "holder-inequality-slack", lhs,
                         bound, max(0.0, lhs - bound), _EXPLICIT_TOL,
                         lhs <= bound + _EXPLICIT_TOL))

    if not bundle.degenerate:
        for s in range(samples):
            omega = random_dual_section(bundle, rng)
            v = random_section(bundle, rng)
            check(f"s{s}", "operator-norm-vs-dual-lq", operator_norm(omega, p),
                  lp_norm(dual_pointwise_norm(omega), q), _SAMPLED_TOL)
            check(f"s{s}", "swapped-operator-norm-vs-lp", dual_operator_norm(v, q),
                  section_lp_norm(v, p), _SAMPLED_TOL)

    diagram = check_reflexivity_diagram(bundle, p, samples=max(4, samples // 4),
                                        seed=seed)
    rows.append((instance, seed, "diagram", "max-pairing-residual",
                 diagram.max_pairing_residual, 0.0, diagram.max_pairing_residual,
                 _EXPLICIT_TOL, diagram.max_pairing_residual <= _EXPLICIT_TOL))
    rows.append((instance, seed, "diagram", "max-bidual-norm-gap",
                 diagram.max_bidual_norm_gap, 0.0, diagram.max_bidual_norm_gap,
                 _SAMPLED_TOL, diagram.max_bidual_norm_gap <= _SAMPLED_TOL))

    run = _run_digest("dual-check", cfg, seed, [])
    out = ReportBundle(Path(args.out))
    out.tables["dual_residuals.csv"] = csv_table(
        ("instance", "seed", "sample", "quantity", "value", "reference",
         "residual", "threshold", "passed"),
        rows,
    )
    failed = [r for r in rows if not r[-1]]
    out.summary = "\n".join(
        [
            "# dual-check run", "",
            f"run-config digest: `{run}`",
            f"instance: `{instance}`",
            f"seed: {seed}", f"exponent: {p} (conjugate {float(q)!r})",
            f"rows: {len(rows)}, failing: {len(failed)}", "",
            "overall: " + ("**FAIL**" if failed else "all residuals within tolerance"),
            "",
        ]
    )
    out.write()
    return 1 if failed else 0


# -- criterion -------------------------------------------------------------------


_CATALOGUE_EXPECT = {"induced": "PASS", "sup-over-atoms": "FAIL",
                     "mixed-sum": "FAIL", "mixed-max": "FAIL"}


def _catalogue_entry(bundle, entry: dict):
    if not isinstance(entry, dict) or "tag" not in entry:
        raise ConfigError("each norms entry needs a 'tag' field")
    tag = entry["tag"]
    if tag == "induced":
        norm = induced_norm(bundle, entry.get("p", 2))
    elif tag == "sup-over-atoms":
        norm = sup_over_atoms_norm(bundle)
    elif tag == "mixed-sum":
        norm = mixed_sum_norm(bundle, entry.get("p1", 1.5), entry.get("p2", 3))
    elif tag == "mixed-max":
        norm = mixed_max_norm(bundle, entry.get("p1", 1.5), entry.get("p2", 3))
    else:
        raise ConfigError(
            f"unknown norm tag {tag!r}; valid tags: {sorted(_CATALOGUE_EXPECT)}"
        )
    expect = entry.get("expect", _CATALOGUE_EXPECT[tag])
    if expect not in ("PASS", "FAIL"):
        raise ConfigError("expect must be 'PASS' or 'FAIL'")
    p_check = entry.get("p_check", entry.get("p", 2))
    return norm, p_check, expect


def cmd_criterion(cfg: dict, args) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if "bundle" not in cfg:
        raise ConfigError("criterion config needs a 'bundle' entry")
    bundle = bundle_from_config(cfg["bundle"])
    instance = bundle_digest(bundle)
    entries = cfg.get("norms") or [
        {"tag": "induced", "p": 2},
        {"tag": "sup-over-atoms"},
        {"tag": "mixed-sum"},
        {"tag": "mixed-max"},
    ]
    probes = int(cfg.get("probes", 6))

    add_rows = []
    verdict_rows = []
    unexpected = 0
    rng = instance_rng(seed, 0, stream=9)
    for entry in entries:
        norm, p_check, expect = _catalogue_entry(bundle, entry)
        rep = restriction_additivity_check(norm, p_check, probes=probes, seed=seed)
        verdict = "PASS" if rep.passed else "FAIL"
        unexpected += verdict != expect
        mask = "|".join(str(a) for a in rep.witness_subset) if rep.witness_subset else ""
        add_rows.append((instance, seed, norm.name, p_check, "restriction-additivity",
                         rep.witness_probe, mask, rep.max_residual, verdict, expect))
        cont = weak_star_continuity_check(norm, probes=max(2, probes // 2), seed=seed)
        add_rows.append((instance, seed, norm.name, p_check, "weak-star-continuity",
                         "", "", cont.max_limit_proxy,
                         "PASS" if cont.passed else "FAIL", "PASS"))
        unexpected += not cont.passed

        if rep.passed:
            v = random_section(bundle, rng)
            rec = reconstruct_pointwise_norm(norm, p_check, v)
            gap = float(np.max(np.abs(rec.values - pointwise_norm(v).values)))
            ok = gap <= 1e-9
            add_rows.append((instance, seed, norm.name, p_check,
                             "pointwise-reconstruction", "", "", gap,
                             "PASS" if ok else "FAIL", "PASS"))
            unexpected += not ok
        else:
            try:
                reconstruct_pointwise_norm(norm, p_check, random_section(bundle, rng))
                refused = False
            except ValueError:
                refused = True
            add_rows.append((instance, seed, norm.name, p_check,
                             "reconstruction-refusal", "", "",
                             0.0 if refused else 1.0,
                             "PASS" if refused else "FAIL", "PASS"))
            unexpected += not refused
        verdict_rows.append((norm.name, p_check, verdict, expect))

    run = _run_digest("criterion", cfg, seed, [])
    out = ReportBundle(Path(args.out))
    out.tables["criterion_rows.csv"] = csv_table(
        ("instance", "seed", "norm", "exponent", "check", "probe",
         "subset", "residual", "verdict", "expected"),
        add_rows,
    )
    lines = [
        "# criterion run", "",
        f"run-config digest: `{run}`",
        f"instance: `{instance}`",
        f"seed: {seed}", "",
        "| norm | exponent | additivity | expected |",
        "| --- | --- | --- | --- |",
    ]
    lines += [f"| {n} | {p} | {v} | {e} |" for n, p, v, e in verdict_rows]
    lines += ["", "overall: " + ("**UNEXPECTED VERDICTS PRESENT**" if unexpected
                                 else "all verdicts as expected"), ""]
    out.summary = "\n".join(lines)
    out.write()
    return 1 if unexpected else 0


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundlelab",
        description="measurable-bundle numerics: modulus curves, duality and "
                    "norm-criterion verification suites",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("modulus", cmd_modulus), ("suite", cmd_suite),
                     ("dual-check", cmd_dual_check), ("criterion", cmd_criterion)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default="reports", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--grid", default=None,
                       help="separation grid as 'a:b:step' (overrides config)")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.fn(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # constructor-level validation failures are configuration errors too
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
