"""Command-line entry point: ``localize <subcommand> [flags]``.

Exit status: 0 when every converged/passed flag is true, 2 on invalid input
(unknown config key, bad value), 3 when a computation did not converge.
Artifacts (``result.json``, ``manifest.json`` and CSV grids) are written in
both the 0 and 3 cases.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .config import SCHEMAS, ConfigError, config_to_dict, load_config

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 2, 3


class InputError(ValueError):
    pass


def _fr(x) -> str:
    return str(Fraction(x))


class Outcome:
    """What a subcommand hands back to the dispatcher."""

    def __init__(self, result: dict, converged: bool, provenance: dict | None = None,
                 grids: dict[str, tuple[list[str], list[list]]] | None = None, texts: dict[str, str] | None = None):
        self.result = result
        self.converged = converged
        self.provenance = provenance or {}
        self.grids = grids or {}
        self.texts = texts or {}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def run_genus(cfg) -> Outcome:
    from .genera import (CharacteristicSeries, GenusError, ManifoldData, a_hat_series, genus_value, l_series,
                         solve_cancellation_dim12, witten_genus_qexp)

    if cfg.genus == "cancellation":
        res = solve_cancellation_dim12()
        return Outcome({"genus": "cancellation", "a": _fr(res.a), "b": _fr(res.b), "rank": res.rank,
                        "residual_zero": res.residual.is_zero(), "L": str(res.L)}, res.residual.is_zero())
    try:
        M = ManifoldData.from_sequence(cfg.dimension, cfg.pontryagin, spin=cfg.spin)
        out: dict[str, Any] = {}
        if cfg.genus == "a_hat":
            out["genus_value"] = _fr(genus_value(M, a_hat_series()))
        elif cfg.genus == "l":
            out["genus_value"] = _fr(genus_value(M, l_series()))
        elif cfg.genus == "custom":
            try:
                coeffs = [Fraction(c) for c in cfg.q_coefficients]
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"q_coefficients: {exc}") from exc
            out["genus_value"] = _fr(genus_value(M, CharacteristicSeries.from_coefficients(coeffs)))
        elif cfg.genus == "witten":
            series = witten_genus_qexp(M, cfg.order, reduced=cfg.reduced)
            out["q_series"] = [_fr(series[n]) for n in range(cfg.order)]
            out["genus_value"] = out["q_series"][0] if cfg.reduced else _fr(genus_value(M, a_hat_series()))
            out["reduced"] = cfg.reduced
        else:
            raise InputError(f"genus: unknown genus '{cfg.genus}' (a_hat, l, witten, custom, cancellation)")
    except GenusError as exc:
        raise InputError(str(exc)) from exc
    return Outcome({"genus": cfg.genus, "dimension": cfg.dimension, "pontryagin": cfg.pontryagin, **out}, True)


def _group(name: str):
    from .liegroups import LieError, build_root_system

    try:
        return build_root_system(name)
    except (LieError, ValueError, IndexError) as exc:
        raise InputError(f"group: cannot build root system '{name}': {exc}") from exc


def _torus(rs, coords, key="holonomy"):
    from .liegroups import LieError, TorusElement

    try:
        return TorusElement.from_alcove(rs, coords)
    except LieError as exc:
        raise InputError(f"{key}: {exc}") from exc


def run_heatkernel(cfg) -> Outcome:
    from .liegroups import LieError, heat_kernel

    rs = _group(cfg.group)
    c = _torus(rs, cfg.point, "point")
    if cfg.t <= 0:
        raise InputError("t: must be positive")
    try:
        hk = heat_kernel(rs, cfg.t, c, cutoff=cfg.cutoff, tol=cfg.tol, strict=False)
    except LieError as exc:
        raise InputError(str(exc)) from exc
    return Outcome({"value": hk.value, "tail_bound": hk.tail_bound, "converged": hk.converged},
                   hk.converged, {"cutoff": hk.cutoff, "n_weights": hk.n_weights, "tail_bound": hk.tail_bound})


def _query(cfg, rs, holonomies):
    from .moduli import Insertion, ModuliError, ModuliQuery

    try:
        ins = Insertion.parse(cfg.insertion, rs.rank)
        return ModuliQuery(rs, cfg.genus, holonomies, ins, tuple(cfg.schedule.t_grid), cfg.schedule.cutoff,
                           tuple(cfg.schedule.eps_grid), cfg.tol, getattr(cfg, "wall_adaptive_t", False))
    except ModuliError as exc:
        raise InputError(str(exc)) from exc


def run_moduli_volume(cfg) -> Outcome:
    from .moduli import ModuliError, piecewise_poly_fit, volume

    rs = _group(cfg.group)
    q = _query(cfg, rs, [_torus(rs, cfg.holonomy)])
    try:
        res = volume(q)
    except ModuliError as exc:
        raise InputError(str(exc)) from exc
    grid = (["t", "value"], [[repr(t), repr(v)] for t, v in res.partial_values.items()])
    out = {"value": res.extrapolated_value, "tail_bound": res.tail_bound, "converged": res.converged,
           "error_estimate": res.error_estimate}
    if len(res.partial_values) < 2:
        out["note"] = "t-grid has one point; cannot extrapolate t -> 0"
    converged = res.converged
    if cfg.fit_points:
        try:
            pieces = piecewise_poly_fit(rs, cfg.genus, n_points=cfg.fit_points, insertion=q.insertion)
        except ModuliError as exc:
            raise InputError(str(exc)) from exc
        out["fit"] = [{"interval": p.interval, "degree": p.degree, "residual": p.residual,
                       "coefficients": [float(c) for c in p.coefficients]} for p in pieces]
        converged = converged and all(p.residual < 1e-6 for p in pieces)
    return Outcome(out, converged, {"t_grid": list(q.t_grid), "cutoff": q.cutoff, "tail_bound": res.tail_bound,
                                    "converged": res.converged}, {"values.csv": grid})


def run_moduli_intersect(cfg) -> Outcome:
    from .moduli import ModuliError, derivative_insertion, intersection_number

    rs = _group(cfg.group)
    q = _query(cfg, rs, [_torus(rs, cfg.holonomy)])
    try:
        if cfg.derivative_order:
            res = derivative_insertion(q, None, cfg.derivative_order, form=cfg.derivative_form)
        else:
            res = intersection_number(q)
    except ModuliError as exc:
        raise InputError(str(exc)) from exc
    d = res.as_dict()
    rows = [[repr(k), json.dumps(v)] for k, v in d["partial_values"].items()]
    label = "t" if cfg.derivative_order else "eps"
    return Outcome({k: v for k, v in d.items() if k != "partial_values"}, res.converged,
                   {"t_grid": list(q.t_grid), "eps_grid": list(q.eps_grid), "tail_bound": res.tail_bound,
                    "converged": res.converged}, {"values.csv": ([label, "value"], rows)})


def run_moduli_mc(cfg) -> Outcome:
    from .moduli import ModuliError, holonomy_integral_mc

    rs = _group(cfg.group)
    c = _torus(rs, cfg.holonomy)
    rows, results, ok = [], [], True
    for t in cfg.t:
        try:
            r = holonomy_integral_mc(rs, cfg.genus, c, t, cfg.samples, cfg.seed)
        except ModuliError as exc:
            raise InputError(str(exc)) from exc
        agree = abs(r.z_score) <= cfg.sigmas
        ok = ok and agree
        results.append({"t": t, **r.as_dict(), "agrees": agree})
        rows.append([repr(t), repr(r.estimate), repr(r.standard_error), repr(r.exact)])
    return Outcome({"results": results, "sigmas": cfg.sigmas}, ok, {"seed": cfg.seed, "samples": cfg.samples},
                   {"values.csv": (["t", "estimate", "standard_error", "character_sum"], rows)})


def _conventions(conv: str):
    if conv == "auto":
        return ("minus", "plus")
    if conv not in ("minus", "plus"):
        raise InputError(f"convention: expected auto, minus or plus, got '{conv}'")
    return (conv,)


def _gw_payload(gw, check) -> dict:
    return {
        **gw.as_dict(),
        "identity_check": {
            "convention": check.convention,
            "passed": check.passed,
            "residual_nonzero_terms": {c: sum(1 for j in range(r.order) if r[j]) for c, r in check.residuals.items()},
        },
    }


def run_mirror_quintic(cfg) -> Outcome:
    from .mirror import MirrorError, quintic_pipeline, quintic_target, toric_identity_check
    from .oracles import graph_sum_invariant, schubert_lines_on_hypersurface

    convs = _conventions(cfg.convention)
    try:
        gw = quintic_pipeline(cfg.order)
        X, V = quintic_target()
        check = toric_identity_check(X, V, cfg.order, conventions=convs)
    except MirrorError as exc:
        raise InputError(str(exc)) from exc
    out = _gw_payload(gw, check)
    ok = gw.integral and gw.structure_ok and check.passed
    if cfg.oracles:
        oracle = {"n1_schubert": schubert_lines_on_hypersurface(5, 4)}
        if cfg.order > 2:
            oracle["K2_graph_sum"] = _fr(graph_sum_invariant(4, [5], 2))
        oracle["n1_match"] = Fraction(oracle["n1_schubert"]) == gw.n[1]
        if "K2_graph_sum" in oracle:
            oracle["K2_match"] = Fraction(oracle["K2_graph_sum"]) == gw.K[2]
        out["oracles"] = oracle
        ok = ok and oracle["n1_match"] and oracle.get("K2_match", True)
    return Outcome(out, ok, {"q_order": cfg.order, "exact": True}, texts={"table.txt": _table(gw)})


def run_mirror_local(cfg) -> Outcome:
    from .mirror import BundleSpec, MirrorError, one_parameter_pipeline, projective_space, toric_identity_check
    from .oracles import graph_sum_invariant

    targets = {"conifold": (1, [-1, -1]), "local_p2": (2, [-3])}
    if cfg.target not in targets:
        raise InputError(f"target: expected one of {sorted(targets)}, got '{cfg.target}'")
    n, bundle = targets[cfg.target]
    X, V = projective_space(n), BundleSpec(tuple((k,) for k in bundle))
    try:
        gw = one_parameter_pipeline(X, V, cfg.order)
        check = toric_identity_check(X, V, cfg.order, conventions=_conventions(cfg.convention))
    except MirrorError as exc:
        raise InputError(str(exc)) from exc
    out = _gw_payload(gw, check)
    out["K_d_times_d3"] = {str(d): _fr(k * d**3) for d, k in gw.K.items()}
    ok = check.passed
    if cfg.target == "conifold":
        out["multiple_cover_law"] = all(k * d**3 == 1 for d, k in gw.K.items())
        ok = ok and out["multiple_cover_law"]
    if cfg.oracles:
        oracle = {}
        for d in (1, 2):
            if d in gw.K:
                val = graph_sum_invariant(n, bundle, d)
                oracle[f"K{d}_graph_sum"] = _fr(val)
                oracle[f"K{d}_match"] = val == gw.K[d]
                ok = ok and oracle[f"K{d}_match"]
        out["oracles"] = oracle
    return Outcome(out, ok, {"q_order": cfg.order, "target": cfg.target, "exact": True},
                   texts={"table.txt": _table(gw)})


def _toric_data(cfg):
    from .mirror import BundleSpec, MirrorError, ToricTarget, projective_space

    try:
        if cfg.projective_dim > 0:
            if cfg.divisors or cfg.relations or cfg.pairing or cfg.line_bundles:
                raise InputError("projective_dim: set it to 0 when giving explicit toric data")
            return projective_space(cfg.projective_dim), BundleSpec(tuple((k,) for k in cfg.bundle))
        if not (cfg.divisors and cfg.pairing and cfg.line_bundles):
            raise InputError("divisors: explicit toric data needs divisors, pairing and line_bundles")
        pairing = {tuple(row[:-1]): row[-1] for row in cfg.pairing}
        X = ToricTarget(len(cfg.divisors[0]), tuple(map(tuple, cfg.divisors)), tuple(map(tuple, cfg.relations)),
                        pairing, name="X")
        return X, BundleSpec(tuple(map(tuple, cfg.line_bundles)))
    except MirrorError as exc:
        raise InputError(f"divisors: {exc}") from exc


def _table(gw) -> str:
    lines = [f"{'d':>3}  {'K_d':>28}  {'n_d':>28}"]
    for d in sorted(gw.K):
        lines.append(f"{d:>3}  {str(gw.K[d]):>28}  {str(gw.n[d]):>28}")
    return "\n".join(lines) + "\n"


def run_mirror_toric(cfg) -> Outcome:
    from .mirror import DegreeMismatchError, MirrorError, hg_series, one_parameter_pipeline, toric_identity_check

    X, V = _toric_data(cfg)
    convs = _conventions(cfg.convention)
    try:
        hg = hg_series(X, V, cfg.cutoff, convention=convs[0])
    except MirrorError as exc:
        raise InputError(f"divisors: {exc}") from exc
    summands = {",".join(map(str, d)): {",".join(map(str, m)): _fr(c) for m, c in sorted(p.terms().items())}
                for d, p in hg.summands.items()}
    out: dict[str, Any] = {"target": X.name, "kahler_rank": X.kahler_rank, "hg_summands": summands,
                           "hg_convention": convs[0]}
    if X.kahler_rank != 1:
        out["note"] = "instanton extraction and the identity check need one Kähler parameter"
        return Outcome(out, True, {"cutoff": cfg.cutoff, "exact": True})
    try:
        gw = one_parameter_pipeline(X, V, cfg.order)
        check = toric_identity_check(X, V, cfg.order, conventions=convs)
    except DegreeMismatchError as exc:
        raise InputError(f"bundle: {exc}") from exc
    except MirrorError as exc:
        raise InputError(str(exc)) from exc
    out.update(_gw_payload(gw, check))
    return Outcome(out, check.passed and gw.structure_ok, {"q_order": cfg.order, "exact": True},
                   texts={"table.txt": _table(gw)})


RUNNERS: dict[str, Callable] = {
    "genus": run_genus,
    "heatkernel": run_heatkernel,
    "moduli-volume": run_moduli_volume,
    "moduli-intersect": run_moduli_intersect,
    "moduli-mc": run_moduli_mc,
    "mirror-quintic": run_mirror_quintic,
    "mirror-local": run_mirror_local,
    "mirror-toric": run_mirror_toric,
}


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localize", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML file; unknown keys are rejected")
        p.add_argument("--out", help="output directory (default: out/<subcommand>)")
        p.add_argument("--order", type=int, help="series order (q-order, genus q-expansion length)")
        p.add_argument("--cutoff", type=float, help="Casimir cutoff (moduli, heatkernel) or degree cutoff")
        p.add_argument("--tol", type=float, help="tolerance")
        p.add_argument("--seed", type=int, help="random seed (moduli-mc)")
        p.add_argument("--convention", help="auto, minus or plus (mirror)")
    return parser


def _flag_overrides(name: str, args) -> dict:
    cls = SCHEMAS[name]
    fields = {f.name for f in cls.__dataclass_fields__.values()}
    out: dict = {}
    for flag in ("order", "cutoff", "tol", "seed", "convention"):
        value = getattr(args, flag)
        if value is None:
            continue
        if flag == "cutoff" and "cutoff" not in fields and "schedule" in fields:
            out.setdefault("schedule", {})["cutoff"] = value
        elif flag == "cutoff" and name == "mirror-toric":
            out["cutoff"] = int(value)
        else:
            if flag not in fields:
                raise ConfigError(f"flag --{flag} is not accepted by '{name}' (unknown configuration key '{flag}')",
                                  flag)
            out[flag] = value
    return out


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonify(obj.item())
    return obj


def _write(out_dir: Path, outcome: Outcome, manifest: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    for fname, (header, rows) in outcome.grids.items():
        with open(out_dir / fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    for fname, text in outcome.texts.items():
        (out_dir / fname).write_text(text)
    (out_dir / "result.json").write_text(json.dumps(_jsonify(outcome.result), indent=2, sort_keys=True) + "\n")
    (out_dir / "manifest.json").write_text(json.dumps(_jsonify(manifest), indent=2, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.subcommand
    try:
        cfg = load_config(name, args.config, _flag_overrides(name, args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = Path(args.out) if args.out else Path("out") / name
    start = time.perf_counter()
    try:
        outcome = RUNNERS[name](cfg)
    except (InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    wall = time.perf_counter() - start
    manifest = {
        "subcommand": name,
        "config": config_to_dict(cfg),
        "version": __version__,
        "python": platform.python_version(),
        "wall_time_seconds": wall,
        "provenance": {**outcome.provenance, "converged": outcome.converged},
        "artifacts": ["result.json", *outcome.grids, *outcome.texts],
    }
    _write(out_dir, outcome, manifest)
    print(json.dumps(_jsonify({"subcommand": name, "converged": outcome.converged, "out": str(out_dir),
                               "result": outcome.result}), sort_keys=True))
    return EXIT_OK if outcome.converged else EXIT_NOT_CONVERGED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
