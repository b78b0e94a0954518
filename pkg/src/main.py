import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

load_dotenv()

import yaml  # noqa: E402

from bench import (build_command, emit_report, gen_mesh_command, locate_command,  # noqa: E402
                   run_suite)
from config.config import LOG_FORMAT, LOG_LEVEL, OUTPUT_DIR, REPORT_FORMATS  # noqa: E402
from config.locator_config import BENCH_SETTINGS, BuildConfig, WalkConfig  # noqa: E402

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _names(text: str) -> List[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _add_build_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--w-star", type=float, help="Patch radius override")
    group.add_argument("--w-star-margin", type=float, help="Patch radius as w minus this margin")
    parser.add_argument("--tau", type=float, help="Background box padding")


def _build_config(args) -> BuildConfig:
    return BuildConfig(w_star=args.w_star, w_star_margin=args.w_star_margin, padding=args.tau)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Patch-searching particle locator for unstructured meshes.")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-mesh", help="Generate a structured or mixed mesh")
    gen.add_argument("--dim", type=int, default=2, choices=(2, 3))
    gen.add_argument("--n", type=int, default=10, help="Cells per axis")
    gen.add_argument("--domain", type=_floats, help="lo,hi of the box domain")
    gen.add_argument("--mixed", action="store_true", help="Checkerboard of quads and triangle pairs")
    gen.add_argument("--l-shape", action="store_true", help="Drop the upper-right quadrant")
    gen.add_argument("--out", required=True, help="Mesh file (.msh, .node or native)")

    build = commands.add_parser("build", help="Build a locator index and report its stats")
    build.add_argument("--mesh", required=True)
    _add_build_flags(build)
    build.add_argument("--out", help="Build stats JSON")
    build.add_argument("--dump", help="Cell table text dump")

    locate = commands.add_parser("locate", help="Locate the points of a points file")
    locate.add_argument("--mesh", required=True)
    locate.add_argument("--points", required=True, help="One point per line")
    locate.add_argument("--out", help="Outcome file, one id per line (-1 outside)")
    locate.add_argument("--workers", type=int, default=1)
    _add_build_flags(locate)

    bench = commands.add_parser("bench", help="Random-walk locate experiments")
    bench.add_argument("--config", help="YAML file with experiment settings")
    bench.add_argument("--mesh", help="Mesh file; a structured mesh is generated otherwise")
    bench.add_argument("--dim", type=int, choices=(2, 3))
    bench.add_argument("--n", type=int)
    bench.add_argument("--domain", type=_floats)
    bench.add_argument("--mixed", action="store_true", default=None)
    bench.add_argument("--delta", type=_floats, help="Comma-separated step scales")
    bench.add_argument("--steps", type=int)
    bench.add_argument("--particles", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--method", type=_names, help="Comma-separated methods")
    bench.add_argument("--workers", type=int)
    bench.add_argument("--format", default="table", choices=REPORT_FORMATS)
    bench.add_argument("--out", help="Report file; stdout otherwise")
    bench.add_argument("--save", action="store_true", help="Write the report under the output directory")
    bench.add_argument("--progress", action="store_true")
    _add_build_flags(bench)
    return parser


def load_bench_settings(args) -> dict:
    """YAML settings overridden by whichever flags were given."""
    settings = {}
    if args.config:
        config_path = Path(args.config)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")
        with open(config_path) as f:
            settings = yaml.safe_load(f) or {}
    flags = {
        "mesh_path": args.mesh, "dim": args.dim, "n": args.n, "domain": args.domain, "mixed": args.mixed,
        "steps": args.steps, "particles": args.particles, "seed": args.seed, "workers": args.workers,
    }
    settings.update({key: value for key, value in flags.items() if value is not None})
    build = dict(settings.get("build") or {})
    build.update({key: value for key, value in (("w_star", args.w_star), ("w_star_margin", args.w_star_margin),
                                                  ("padding", args.tau)) if value is not None})
    settings["build"] = build
    if "method" in settings:
        settings.setdefault("methods", [settings.pop("method")])
    if "delta" in settings:
        settings.setdefault("deltas", [settings.pop("delta")])
    settings.setdefault("methods", BENCH_SETTINGS["methods"])
    settings.setdefault("deltas", BENCH_SETTINGS["deltas"])
    if args.method:
        settings["methods"] = args.method
    if args.delta:
        settings["deltas"] = args.delta
    return settings


def run_bench(args) -> bytes:
    settings = load_bench_settings(args)
    methods = settings.pop("methods")
    deltas = settings.pop("deltas")
    config = WalkConfig(method=methods[0], delta=deltas[0], **settings)
    report = run_suite(config, methods, deltas, progress=args.progress)
    data = emit_report(report, args.format)
    out = args.out
    if out is None and args.save:
        suffix = "txt" if args.format == "table" else args.format
        out = OUTPUT_DIR / f"bench_dim{report.dim}_ne{report.n_e}_seed{report.seed}.{suffix}"
    if out:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(data)
        logger.info(f"Wrote {args.format} report to {out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return data


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT)
    try:
        if args.command == "gen-mesh":
            gen_mesh_command(args.dim, args.n, args.out, args.domain, args.mixed, args.l_shape)
        elif args.command == "build":
            stats = build_command(args.mesh, _build_config(args), args.out, args.dump)
            if not args.out:
                sys.stdout.write(stats.model_dump_json(indent=2) + "\n")
        elif args.command == "locate":
            ids = locate_command(args.mesh, args.points, args.out, _build_config(args), args.workers)
            if not args.out:
                sys.stdout.writelines(f"{int(k)}\n" for k in ids)
        else:
            run_bench(args)
        return 0
    except Exception as e:
        logger.error(f"Error in {args.command}: {str(e)}", exc_info=True)
        raise


if __name__ == "__main__":
    sys.exit(main())
