"""
Quadrisecant Toolkit - command line

Subcommands:
- quadrisecants: all lines meeting a polygonal link in four or more points
- obstruction:   trisecant atlas of one component, clear apex and chord disk
- winding:       winding numbers of closed trisecant families
- degree8:       degree bound for the surface of two linked tori
- roots:         exact real-root counts of a polynomial (or its restriction to a line)
- presets:       list or export the built-in links
- validate:      link validation and general-position diagnosis

Exit codes: 0 ok, 2 usage, 3 input/validation, 4 degeneracy under --strict,
5 internal consistency, 6 numerical failure.
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

sys.path.insert(0, str(Path(__file__).parent))

from config import (CATALOG_PATH, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_WORKERS, DIAGONAL_MARGIN,
                    KEY_DIGITS, OUTPUT_DIR, PERTURB_FRACTION, PREFILTER_SLACK, REPORT_SCHEMA_VERSION,
                    RunConfig)
from core.algebra import (PolynomialParseError, UniPoly, ZeroPolynomialError, count_with_multiplicity,
                          parse_tripoly, restrict_to_line, sturm_count)
from core.link_model import (LinkParseError, LinkValidationError, PerturbationError, default_magnitude,
                             gp_diagnose, perturb, read_link, write_link)
from core.obstruction import (ChainNotClosedError, ChordVerificationError, StepSizeError,
                              build_chord_disk, find_clear_arc, trace_obstruction)
from core.predicates import Point3
from core.presets import PresetError, list_presets, preset
from core.stabbing import DegenerateConfigurationError, EnumerationOptions, run_enumeration
from core.surfaces import (ConsistencyError, TorusConfigurationError, auto_piercing_line, check_samples,
                           linked_pair_specs, linked_pair_surface, torus_quartic, torus_sample_points,
                           verify_degree_bound)
from core.utils import get_logger, parse_rational
from core.winding import (IntegralityError, build_normal_frame, extract_families, middle_points_between,
                          winding_details)
from output import report as reports

logger = get_logger("cli", "cli.log")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DEGENERATE = 4
EXIT_CONSISTENCY = 5
EXIT_NUMERICAL = 6

# Checked in order: numerical and consistency errors subclass ValueError/RuntimeError too
_EXIT_CODES = (
    ((StepSizeError, IntegralityError, ChainNotClosedError), EXIT_NUMERICAL),
    ((ConsistencyError, ChordVerificationError), EXIT_CONSISTENCY),
    ((DegenerateConfigurationError,), EXIT_DEGENERATE),
    ((LinkParseError, LinkValidationError, PerturbationError, PresetError, PolynomialParseError,
      ZeroPolynomialError, TorusConfigurationError, OSError, ValueError, IndexError), EXIT_INPUT),
)

_GLOBAL_FLAGS = ("command", "seed", "workers", "out", "strict", "catalog", "key_digits",
                 "prefilter_slack", "diagonal_margin")


class Outcome:
    """What a subcommand produced: the report plus rows for the catalogue"""

    def __init__(self, document: dict, count: int = 0, quadrisecants=()):
        self.document = document
        self.count = count
        self.quadrisecants = quadrisecants


# ============ Argument parsing ============

def _parse_line(text: str) -> Tuple[Point3, Point3]:
    """'x,y,z:dx,dy,dz' with exact decimal or p/q entries"""
    try:
        anchor_text, direction_text = text.split(":")
        anchor = [parse_rational(v) for v in anchor_text.split(",")]
        direction = [parse_rational(v) for v in direction_text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"bad line {text!r}: expected 'x,y,z:dx,dy,dz'") from e
    if len(anchor) != 3 or len(direction) != 3:
        raise ValueError(f"bad line {text!r}: need three coordinates on each side")
    return Point3(*anchor), Point3(*direction)


def _add_link_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--link", help="link file")
    src.add_argument("--preset", help="built-in link name")
    p.add_argument("--edges", type=int, default=24, help="vertices per component for --preset")
    p.add_argument("--perturb", default=None,
                   help="jitter magnitude (decimal or p/q), or 'auto' for the default fraction of the diameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadrisecants", description="Quadrisecants of polygonal links")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    parser.add_argument("--out", default=None, help="output directory (default runs/<subcommand>)")
    parser.add_argument("--strict", action="store_true", help="abort on any degenerate configuration")
    parser.add_argument("--catalog", default=CATALOG_PATH or None, help="SQLite run catalogue")
    parser.add_argument("--key-digits", type=int, default=KEY_DIGITS)
    parser.add_argument("--prefilter-slack", type=float, default=PREFILTER_SLACK)
    parser.add_argument("--diagonal-margin", type=float, default=DIAGONAL_MARGIN)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quadrisecants", help="enumerate quadrisecants")
    _add_link_args(p)
    p.add_argument("--no-prune", action="store_true", help="solve every edge quadruple")
    p.add_argument("--csv", default=None, help="also write a per-hit CSV table")

    p = sub.add_parser("obstruction", help="trace the trisecant atlas of a component")
    _add_link_args(p)
    p.add_argument("--component", type=int, default=0)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--svg", default=None, help="chart rendering")
    p.add_argument("--mesh", default=None, help="chord disk as OBJ (implies --clear-arc)")
    p.add_argument("--clear-arc", action="store_true", help="search for a clear apex")

    p = sub.add_parser("winding", help="winding numbers of trisecant families")
    _add_link_args(p)
    p.add_argument("--K", type=int, default=0, help="component carrying the endpoints")
    p.add_argument("--H", type=int, default=1, help="component carrying the middle points")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--twist", type=int, default=0, help="extra turns of the normal frame")
    p.add_argument("--csv", default=None, help="angle accumulations per family")

    p = sub.add_parser("degree8", help="degree bound for two linked tori")
    p.add_argument("--r1", default="2")
    p.add_argument("--r2", default="1/2")
    line = p.add_mutually_exclusive_group()
    line.add_argument("--line", default=None, help="'x,y,z:dx,dy,dz'")
    line.add_argument("--auto", action="store_true", help="piercing line through both tori (default)")

    p = sub.add_parser("roots", help="exact real-root counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", help="trivariate polynomial file, restricted to --line")
    src.add_argument("--coeffs", help="univariate coefficients, ascending, comma separated")
    p.add_argument("--line", default=None, help="'x,y,z:dx,dy,dz' for --poly")
    p.add_argument("--lo", default=None)
    p.add_argument("--hi", default=None)

    p = sub.add_parser("presets", help="built-in links")
    p.add_argument("--list", action="store_true")
    p.add_argument("--name", default=None)
    p.add_argument("--edges", type=int, default=24)
    p.add_argument("--write", default=None, help="save the preset as a link file")

    p = sub.add_parser("validate", help="validate a link and diagnose general position")
    _add_link_args(p)
    return parser


# ============ Subcommands ============

def _load(args, config: RunConfig):
    if args.link:
        link = read_link(args.link)
    else:
        link = preset(args.preset, args.edges, args.seed)
    if args.perturb:
        magnitude = (default_magnitude(link, PERTURB_FRACTION) if args.perturb == "auto"
                     else parse_rational(args.perturb))
        link = perturb(link, magnitude, config.seed)
    print(f"[INFO] Link: {link.n_components} component(s), {len(link.edges)} edges")
    return link


def cmd_quadrisecants(args, config: RunConfig) -> Outcome:
    link = _load(args, config)
    options = EnumerationOptions(strict=config.strict, workers=config.workers, prune=not args.no_prune,
                                 key_digits=config.key_digits, prefilter_slack=config.prefilter_slack)
    result = run_enumeration(link, options)
    print(f"[INFO] {len(result.quadrisecants)} quadrisecant(s), {len(result.degeneracies)} degeneracies")
    if args.csv:
        reports.write_csv(Path(args.csv), reports.QUADRISECANT_HEADER,
                          reports.quadrisecant_rows(result.quadrisecants, link))
    document = reports.quadrisecant_report(link, result.quadrisecants, result.degeneracies, result.stats)
    return Outcome(document, len(result.quadrisecants), result.quadrisecants)


def cmd_obstruction(args, config: RunConfig) -> Outcome:
    link = _load(args, config)
    atlas = trace_obstruction(link, args.component, args.samples, workers=config.workers,
                              margin=config.diagonal_margin, digits=config.key_digits)
    print(f"[INFO] {len(atlas.arcs)} arc(s), {len(atlas.crossings)} crossing(s), {len(atlas.chains)} chain(s)")
    apex = disk = None
    if args.clear_arc or args.mesh:
        apex = find_clear_arc(atlas, link, args.component)
        if apex is None:
            print("[WARN] No clear apex at the sweep resolution")
        else:
            disk = build_chord_disk(link, args.component, apex)
            print(f"[INFO] Clear apex on edge {apex.edge}; chord disk of {len(disk.triangles)} triangles")
            if args.mesh:
                from output.mesh import write_obj
                write_obj(disk, args.mesh)
    if args.svg:
        from output.chart import write_chart
        write_chart(atlas, args.svg)
    return Outcome(reports.atlas_report(atlas, link, apex, disk), len(atlas.arcs),
                   [c.quadrisecant for c in atlas.crossings])


def cmd_winding(args, config: RunConfig) -> Outcome:
    link = _load(args, config)
    atlas = trace_obstruction(link, args.K, args.samples, workers=config.workers,
                              margin=config.diagonal_margin, digits=config.key_digits)
    families = extract_families(atlas, link, args.K, args.H)
    if not 0 <= args.H < link.n_components:
        print(f"[WARN] Component {args.H} does not exist; no families")
        return Outcome(reports.winding_report(args.K, args.H, None, [], []))
    frame = build_normal_frame(link, args.H, twist=args.twist)
    results = [winding_details(f, frame) for f in families]
    # a family winding around H puts every point of H between two points of K
    between = [middle_points_between(f, link) if r.omega2 != 0 else None for f, r in zip(families, results)]
    for f, r, b in zip(families, results, between):
        print(f"[INFO] family of {r.samples} samples: (w1, w2) = ({r.omega1}, {r.omega2}), {f.surface}")
        if b is False:
            print(f"[WARN] family with w2 = {r.omega2} leaves points of component {args.H} outside the secants")
    if args.csv:
        reports.write_csv(Path(args.csv), reports.ANGLE_HEADER, reports.angle_rows(results))
    return Outcome(reports.winding_report(args.K, args.H, frame, families, results, between), len(families))


def cmd_degree8(args, config: RunConfig) -> Outcome:
    r1, r2 = parse_rational(args.r1), parse_rational(args.r2)
    for spec in linked_pair_specs(r1, r2):
        check_samples(torus_quartic(spec), torus_sample_points(spec))
    surface = linked_pair_surface(r1, r2)
    if surface.total_degree != 8:
        raise ConsistencyError(f"linked pair has total degree {surface.total_degree}, expected 8")
    anchor, direction = _parse_line(args.line) if args.line else auto_piercing_line(r1, r2)
    result = verify_degree_bound(surface, anchor, direction)
    print(f"[INFO] {result.conclusion}")
    return Outcome(reports.degree8_report(result), result.root_count or 0)


def cmd_roots(args, config: RunConfig) -> Outcome:
    if args.poly:
        if not args.line:
            raise ValueError("--poly needs --line")
        anchor, direction = _parse_line(args.line)
        poly = restrict_to_line(parse_tripoly(Path(args.poly).read_text(encoding="utf-8")), anchor, direction)
    else:
        poly = UniPoly(tuple(parse_rational(c) for c in args.coeffs.split(",")))
    lo = None if args.lo is None else parse_rational(args.lo)
    hi = None if args.hi is None else parse_rational(args.hi)
    distinct = sturm_count(poly, lo, hi)
    total = count_with_multiplicity(poly) if lo is None and hi is None else None
    print(f"[INFO] {poly}: {distinct} distinct real root(s)"
          + (f", {total} with multiplicity" if total is not None else ""))
    return Outcome(reports.roots_report(poly, lo, hi, distinct, total), distinct)


def cmd_presets(args, config: RunConfig) -> Outcome:
    specs = list_presets()
    if args.name:
        link = preset(args.name, args.edges, args.seed)
        if args.write:
            write_link(link, args.write)
            print(f"[INFO] Wrote {args.name} ({args.edges} edges per component) to {args.write}")
    else:
        for s in specs:
            print(f"  {s.name:<14} {s.isotopy_class:<40} min edges {s.min_edges}")
    document = {"schema_version": REPORT_SCHEMA_VERSION, "kind": "presets",
                "presets": [{"name": s.name, "isotopy_class": s.isotopy_class,
                             "min_edges": s.min_edges, "description": s.description} for s in specs]}
    return Outcome(document, len(specs))


def cmd_validate(args, config: RunConfig) -> Outcome:
    link = _load(args, config)
    gp = gp_diagnose(link, workers=config.workers)
    state = "passes" if gp.passed else "fails"
    print(f"[INFO] Link is valid and {state} the general-position diagnosis")
    document = {"schema_version": REPORT_SCHEMA_VERSION, "kind": "validate", "valid": True,
                "general_position": gp.to_dict()}
    return Outcome(document, int(gp.passed))


COMMANDS = {
    "quadrisecants": cmd_quadrisecants,
    "obstruction": cmd_obstruction,
    "winding": cmd_winding,
    "degree8": cmd_degree8,
    "roots": cmd_roots,
    "presets": cmd_presets,
    "validate": cmd_validate,
}


# ============ Entry point ============

def _exit_code(error: BaseException) -> int:
    for kinds, code in _EXIT_CODES:
        if isinstance(error, kinds):
            return code
    raise error


def _record(config: RunConfig, catalog_path: Optional[str], code: int, outcome: Optional[Outcome]):
    if not catalog_path:
        return
    from database.db import Catalog
    catalog = Catalog(catalog_path)
    try:
        catalog.record_run(config, code, outcome.count if outcome else 0,
                           outcome.quadrisecants if outcome else ())
    finally:
        catalog.close()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    out_dir = Path(args.out) if args.out else OUTPUT_DIR / args.command
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _GLOBAL_FLAGS}
    config = RunConfig(subcommand=args.command, flags=flags, seed=args.seed, workers=args.workers,
                       output_dir=str(out_dir), strict=args.strict, key_digits=args.key_digits,
                       prefilter_slack=args.prefilter_slack, diagonal_margin=args.diagonal_margin)
    logger.info(f"run {args.command}: {flags}")
    config.write(out_dir)

    outcome = None
    try:
        outcome = COMMANDS[args.command](args, config)
        code = EXIT_OK
    except Exception as e:
        code = _exit_code(e)
        witness = next((getattr(e, name) for name in ("witness", "chord", "location", "degeneracies")
                        if getattr(e, name, None)), None)
        print(f"[ERROR] {type(e).__name__}: {e}")
        if witness:
            print(f"[ERROR] witness: {witness}")
        logger.error(f"{args.command} failed with exit {code}: {type(e).__name__}: {e}")

    if outcome is not None:
        reports.write_json(outcome.document, out_dir / "report.json")
        print(f"[INFO] Report written to {out_dir / 'report.json'}")
    _record(config, args.catalog, code, outcome)
    return code


if __name__ == "__main__":
    sys.exit(main())
