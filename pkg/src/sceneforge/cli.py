"""Command-line entry point: ``sceneforge models|generate|plot``.

Exit codes: 0 success, 1 unsatisfiable scenario or sampling failure,
2 usage or parse error, 3 I/O or network error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .emit import model_path_hint
from .errors import SceneForgeError
from .pipeline import RunConfig, build_models, generate, load_or_build_registry, new_seed, prepare, replot
from .sampler import DEFAULT_MAX_ATTEMPTS

EXIT_OK, EXIT_SAMPLING, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} must be >= 1")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-d", "--descriptor", required=True, help="model descriptor YAML")
    p.add_argument("--cache-dir", help="model cache and registry directory (default: next to the descriptor)")
    p.add_argument(
        "--model-db",
        action="append",
        default=[],
        metavar="SRC",
        help="model database: a directory or an archive URL template with {name}; repeatable",
    )
    p.add_argument("--offline", action="store_true", help="never download; use local directories and the cache only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sceneforge", description="Compile probabilistic scenarios into Gazebo worlds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("models", help="resolve models and build the placement registry")
    _common(m)

    g = sub.add_parser("generate", help="sample scenes and emit worlds")
    _common(g)
    g.add_argument("-s", "--scenario", required=True, help="scenario program")
    g.add_argument("-o", "--out", required=True, help="output directory")
    g.add_argument("--seed", type=_seed, help="base seed (default: random, always printed)")
    g.add_argument("--num-scenes", type=_positive_int, default=1, help="scenes to generate; scene k uses seed + k")
    g.add_argument("--max-attempts", type=_positive_int, default=DEFAULT_MAX_ATTEMPTS, help="rejection-sampling attempts per scene (default: %(default)s)")
    g.add_argument("--jobs", type=_positive_int, default=1, help="scenes sampled in parallel")
    g.add_argument("--force", action="store_true", help="overwrite outputs in a non-empty directory")
    g.add_argument("--json", action="store_true", help="print one JSON summary line per scene")

    p = sub.add_parser("plot", help="redraw scene.svg from a generated scene directory")
    p.add_argument("scene_dir")
    return parser


def _err(msg: str) -> None:
    print(f"sceneforge: {msg}", file=sys.stderr)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def cmd_models(args) -> int:
    config = RunConfig(args.descriptor, cache_dir=args.cache_dir, model_db=args.model_db, offline=args.offline)
    registry = build_models(config)
    rows = [("type", "entry", "kind", "width", "length", "height", "resizable")]
    for s in registry:
        rows.append(
            (s.name, s.entry_name, s.kind.value, _fmt(s.width), _fmt(s.length), _fmt(s.height), "yes" if s.dynamic_size else "no")
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    _err(f"registry written to {config.registry_path}")
    return EXIT_OK


def cmd_generate(args) -> int:
    config = RunConfig(
        args.descriptor,
        scenario_path=args.scenario,
        out_dir=args.out,
        seed=args.seed,
        num_scenes=args.num_scenes,
        max_attempts=args.max_attempts,
        offline=args.offline,
        force=args.force,
        cache_dir=args.cache_dir,
        model_db=args.model_db,
        jobs=args.jobs,
    )
    inputs = prepare(config)
    registry = load_or_build_registry(config, inputs)
    if config.seed is None:
        config.seed = new_seed()
    _err(f"seed {config.seed}")
    results = generate(config, registry=registry, inputs=inputs)
    code = EXIT_OK
    for r in results:
        if r.ok:
            _err(f"scene {r.index}: seed {r.seed}, {r.objects} objects -> {r.out_dir}")
        else:
            _err(f"scene {r.index}: seed {r.seed}: {r.error}")
            if code == EXIT_OK:
                code = r.error.exit_code
        if args.json:
            line = {"index": r.index, "seed": r.seed, "ok": r.ok, "objects": r.objects, "path": str(r.out_dir)}
            if not r.ok:
                line["error"] = str(r.error)
            print(json.dumps(line), flush=True)
    if any(r.ok for r in results):
        _err("to load the generated models in Gazebo: " + model_path_hint(next(r for r in results if r.ok).out_dir))
    return code


def cmd_plot(args) -> int:
    target = replot(args.scene_dir)
    _err(f"wrote {target}")
    return EXIT_OK


COMMANDS = {"models": cmd_models, "generate": cmd_generate, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except SceneForgeError as exc:
        _err(str(exc))
        return exc.exit_code
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
