"""Command-line entry point.

One process runs one command: synth, train-vae, train-denoiser, remove,
extract, compose, eval, or ablate. Options resolve in three layers: built-in
defaults, then the config-file section named after the command, then explicit
CLI flags. Every flag has a config-file key of the same name (underscores for
hyphens); --config itself is the one exception since it locates the file.

All outputs land under --out. Exit codes: 0 success, 2 usage/flag errors,
1 any other structured failure.
"""

import argparse
import configparser
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, LatentMatteError, UsageError
from .evalkit import (
    ABLATION_KINDS,
    report_to_csv,
    report_to_summary_csv,
    report_to_text,
    run_ablation,
    run_benchmark,
)
from .model import LatentModel, ModelConfig, load_checkpoint, save_checkpoint
from .model.train import train_denoiser, train_vae
from .numerics import load_tensor, save_tensor
from .pipeline import (
    RemovalRequest,
    compose_latent,
    compose_layers,
    extract_layers,
    remove_objects,
)
from .scene import (
    load_bundle,
    load_mask_video,
    load_suite,
    load_video,
    make_default_suite,
    make_holdout_suite,
    make_training_suite,
    save_soft_mask_video,
    save_suite,
    save_video,
    synthesize,
)


@dataclass(frozen=True)
class Opt:
    """One command option: a CLI flag and its config-file key."""

    name: str
    kind: str  # int | float | str | bool | paths | ints
    default: object = None
    help: str = ""
    required: bool = False
    choices: tuple = ()


def _opt_out():
    return Opt("out", "str", help="output directory; nothing is written outside it",
               required=True)


def _opt_seed():
    return Opt("seed", "int", 0, "seed threaded through every stochastic component")


def _opt_checkpoint():
    return Opt("checkpoint", "str", help="model checkpoint directory", required=True)


def _removal_opts():
    return [
        Opt("steps", "int", 30, "denoising steps"),
        Opt("density", "float", 0.6, "fraction of masked pixels used as track queries"),
        Opt("tracker", "str", "blockmatch", "point tracker",
            choices=("blockmatch", "oracle")),
        Opt("use_temporal", "bool", True, "steer attention with cross-frame matches"),
        Opt("use_spatial", "bool", True, "steer attention with in-frame surrounds"),
        Opt("use_effect_mask", "bool", True, "grow masks to cover shadows/reflections"),
    ]


COMMANDS = {
    "synth": (
        "render a synthetic scene suite to frame directories",
        [
            _opt_out(),
            Opt("suite", "str", "default", "which built-in suite to render",
                choices=("default", "training", "holdout")),
            Opt("count", "int", help="number of scenes (default: the suite's own)"),
            _opt_seed(),
        ],
    ),
    "train-vae": (
        "train the video autoencoder and write a checkpoint",
        [
            _opt_out(),
            Opt("data", "str", help="scene-suite directory (default: built-in training suite)"),
            Opt("budget", "int", 12000, "optimizer steps; 0 keeps the seeded init"),
            Opt("batch_size", "int", 16, "training batch size"),
            Opt("lr", "float", 2e-3, "learning rate"),
            _opt_seed(),
        ],
    ),
    "train-denoiser": (
        "train the latent denoiser on top of a VAE checkpoint",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("data", "str", help="scene-suite directory (default: built-in training suite)"),
            Opt("budget", "int", 12000, "optimizer steps; 0 keeps the seeded init"),
            Opt("batch_size", "int", 4, "training batch size"),
            Opt("lr", "float", 1e-3, "learning rate"),
            _opt_seed(),
        ],
    ),
    "remove": (
        "remove masked objects (and their effects) from a video",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("video", "str", help="input frame directory", required=True),
            Opt("mask", "paths", (), "object mask frame directory (repeatable)"),
            Opt("scene", "str", help="scene bundle directory (oracle tracker only)"),
            *_removal_opts(),
            _opt_seed(),
        ],
    ),
    "extract": (
        "split a video into a background plus per-object RGBA layers",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("video", "str", help="input frame directory", required=True),
            Opt("mask", "paths", (), "object mask frame directory (repeatable)"),
            Opt("scene", "str", help="scene bundle directory (oracle tracker only)"),
            Opt("tau", "float", help="layer sparsity threshold (default: half the layer std)"),
            *_removal_opts(),
            _opt_seed(),
        ],
    ),
    "compose": (
        "place extracted object layers onto a new background",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("background", "str", required=True,
                help="new background: frame directory or .vt latent file"),
            Opt("layer", "paths", (), "object layer .vt latent (repeatable)"),
            Opt("refine_steps", "int", 3, "denoising steps to blend the seams; 0 decodes as-is"),
            _opt_seed(),
        ],
    ),
    "eval": (
        "benchmark removal methods over a scene suite",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("data", "str", help="scene-suite directory", required=True),
            Opt("methods", "paths", ("none", "temporal_spatial"),
                "comma-separated method labels"),
            Opt("seeds", "ints", (0,), "comma-separated seeds"),
            Opt("steps", "int", 30, "denoising steps"),
            Opt("density", "float", 0.6, "fraction of masked pixels used as track queries"),
            Opt("tracker", "str", "blockmatch", "point tracker",
                choices=("blockmatch", "oracle")),
            Opt("use_effect_mask", "bool", True, "grow masks to cover shadows/reflections"),
            Opt("jobs", "int", 1, "scene-level parallelism"),
        ],
    ),
    "ablate": (
        "run one ablation grid (attention | density | effectmask)",
        [
            _opt_out(),
            _opt_checkpoint(),
            Opt("data", "str", help="scene-suite directory", required=True),
            Opt("seeds", "ints", (0,), "comma-separated seeds"),
            Opt("steps", "int", 30, "denoising steps"),
            Opt("tracker", "str", "blockmatch", "point tracker",
                choices=("blockmatch", "oracle")),
            Opt("jobs", "int", 1, "scene-level parallelism"),
        ],
    ),
}


@dataclass
class RunConfig:
    """Resolved options for one command invocation."""

    command: str
    options: dict

    def __getitem__(self, key: str):
        return self.options[key]


class _Parser(argparse.ArgumentParser):
    # argparse prints + exits on bad flags; surface a structured error instead
    def error(self, message):
        raise UsageError(message)


def _command_list() -> str:
    return "\n".join(f"  {name:<15} {blurb}" for name, (blurb, _) in COMMANDS.items())


def build_parser() -> _Parser:
    parser = _Parser(prog="latentmatte", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (blurb, opts) in COMMANDS.items():
        p = sub.add_parser(name, help=blurb, description=blurb)
        p.add_argument("--config", default=None, help="sectioned key=value config file")
        if name == "ablate":
            p.add_argument("kind", choices=ABLATION_KINDS, help="which grid to run")
        for opt in opts:
            flag = "--" + opt.name.replace("_", "-")
            # defaults stay None here so the config-file layer can see what
            # was explicitly given; real defaults apply in _resolve
            if opt.kind == "bool":
                p.add_argument(flag, dest=opt.name, default=None,
                               action=argparse.BooleanOptionalAction, help=opt.help)
            elif opt.kind == "paths":
                p.add_argument(flag, dest=opt.name, default=None, action="append",
                               metavar="PATH", help=opt.help + " (repeatable)")
            elif opt.kind == "int":
                p.add_argument(flag, dest=opt.name, default=None, type=int, help=opt.help)
            elif opt.kind == "float":
                p.add_argument(flag, dest=opt.name, default=None, type=float, help=opt.help)
            elif opt.kind == "ints":
                p.add_argument(flag, dest=opt.name, default=None, help=opt.help)
            else:
                kw = {"choices": opt.choices} if opt.choices else {}
                p.add_argument(flag, dest=opt.name, default=None, help=opt.help, **kw)
    return parser


_BOOLEAN_STATES = configparser.ConfigParser.BOOLEAN_STATES


def _from_string(opt: Opt, raw: str):
    try:
        if opt.kind == "int":
            return int(raw)
        if opt.kind == "float":
            return float(raw)
        if opt.kind == "bool":
            state = _BOOLEAN_STATES.get(raw.strip().lower())
            if state is None:
                raise ConfigError(f"bad boolean for {opt.name!r}: {raw!r}")
            return state
        if opt.kind == "paths":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
        if opt.kind == "ints":
            return tuple(int(p.strip()) for p in raw.split(",") if p.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {opt.name!r}: {raw!r}") from exc


def _read_config(path: str, command: str, opts: list) -> dict:
    cp = configparser.ConfigParser()
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from exc
    known = set(COMMANDS) | {"model"}
    for section in cp.sections():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
    if not cp.has_section(command):
        return {}
    by_name = {o.name: o for o in opts}
    values = {}
    for key, raw in cp[command].items():
        if key not in by_name:
            raise ConfigError(f"unknown key {key!r} in [{command}]")
        values[key] = _from_string(by_name[key], raw)
    return values


def _model_config_from(path: str | None) -> ModelConfig | None:
    """Architecture override from the config file's [model] section."""
    if path is None:
        return None
    cp = configparser.ConfigParser()
    cp.read(path)
    if not cp.has_section("model"):
        return None
    try:
        return ModelConfig.from_dict(dict(cp["model"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [model] section: {exc}") from exc


def _resolve(ns: argparse.Namespace) -> RunConfig:
    command = ns.command
    opts = COMMANDS[command][1]
    file_values = _read_config(ns.config, command, opts) if ns.config else {}
    resolved = {}
    for opt in opts:
        cli = getattr(ns, opt.name)
        if opt.kind == "paths" and cli is not None:
            # repeatable flag; each occurrence may also be comma-separated
            cli = tuple(p.strip() for item in cli for p in item.split(",") if p.strip())
        if opt.kind == "ints" and cli is not None:
            cli = _from_string(opt, cli)
        if cli is not None:
            value = cli
        elif opt.name in file_values:
            value = file_values[opt.name]
        else:
            value = opt.default
        if value is None and opt.required:
            raise UsageError(f"missing --{opt.name.replace('_', '-')}")
        if opt.choices and value not in opt.choices:
            raise ConfigError(
                f"{opt.name} must be one of {list(opt.choices)}, got {value!r}")
        resolved[opt.name] = value
    if command == "ablate":
        resolved["kind"] = ns.kind
    resolved["config"] = ns.config
    return RunConfig(command, resolved)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_bundles(cfg: RunConfig) -> list:
    if cfg["data"]:
        return load_suite(cfg["data"])
    return [synthesize(s) for s in make_training_suite(seed=cfg["seed"])]


def _write_manifest(out: Path, entries: list[tuple[str, str]]) -> None:
    lines = [f"{name}\t{rel}" for name, rel in entries]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def cmd_synth(cfg: RunConfig) -> int:
    makers = {
        "default": make_default_suite,
        "training": make_training_suite,
        "holdout": make_holdout_suite,
    }
    maker = makers[cfg["suite"]]
    if cfg["count"] is None:
        specs = maker(seed=cfg["seed"])
    else:
        specs = maker(seed=cfg["seed"], count=cfg["count"])
    paths = save_suite(_out_dir(cfg), specs)
    print(f"wrote {len(paths)} scenes under {cfg['out']}")
    return 0


def cmd_train_vae(cfg: RunConfig) -> int:
    bundles = _load_bundles(cfg)
    config = _model_config_from(cfg["config"]) or ModelConfig()
    weights, meta = train_vae(
        bundles, budget=cfg["budget"], seed=cfg["seed"], config=config,
        batch_size=cfg["batch_size"], lr=cfg["lr"], log=print,
    )
    out = _out_dir(cfg)
    save_checkpoint(out, weights, config, meta)
    print(f"checkpoint written to {out}")
    return 0


def cmd_train_denoiser(cfg: RunConfig) -> int:
    vae_weights, config, vae_meta = load_checkpoint(cfg["checkpoint"])
    bundles = _load_bundles(cfg)
    weights, meta = train_denoiser(
        bundles, vae_weights, budget=cfg["budget"], seed=cfg["seed"], config=config,
        batch_size=cfg["batch_size"], lr=cfg["lr"], log=print,
    )
    meta["vae_steps"] = vae_meta.get("steps", "0")
    out = _out_dir(cfg)
    save_checkpoint(out, weights, config, meta)
    print(f"checkpoint written to {out}")
    return 0


def _removal_request(cfg: RunConfig) -> RemovalRequest:
    video = load_video(cfg["video"])
    masks = [load_mask_video(d) for d in cfg["mask"]]
    scene = load_bundle(cfg["scene"]) if cfg["scene"] else None
    return RemovalRequest(
        video=video,
        masks=masks,
        use_effect_mask=cfg["use_effect_mask"],
        use_temporal=cfg["use_temporal"],
        use_spatial=cfg["use_spatial"],
        tracker=cfg["tracker"],
        density=cfg["density"],
        steps=cfg["steps"],
        seed=cfg["seed"],
        scene=scene,
    )


def cmd_remove(cfg: RunConfig) -> int:
    model = LatentModel.load(cfg["checkpoint"])
    req = _removal_request(cfg)
    v_bg, z_bg = remove_objects(model, req)
    out = _out_dir(cfg)
    save_video(out / "background", v_bg)
    save_tensor(out / "background_latent.vt", z_bg)
    _write_manifest(out, [
        ("background", "background"),
        ("background_latent", "background_latent.vt"),
    ])
    print(f"background written to {out / 'background'}")
    return 0


def cmd_extract(cfg: RunConfig) -> int:
    model = LatentModel.load(cfg["checkpoint"])
    req = _removal_request(cfg)
    layers = extract_layers(model, req, tau=cfg["tau"])
    out = _out_dir(cfg)
    save_video(out / "background", layers.background_video)
    save_tensor(out / "background_latent.vt", layers.background_latent)
    entries = [
        ("background", "background"),
        ("background_latent", "background_latent.vt"),
    ]
    for k, layer in enumerate(layers.layers):
        sub = f"object_{k:02d}"
        save_video(out / sub / "video", layer.video)
        save_soft_mask_video(out / sub / "alpha", layer.alpha)
        save_tensor(out / sub / "latent.vt", layer.latent)
        entries += [
            (f"{sub}_video", f"{sub}/video"),
            (f"{sub}_alpha", f"{sub}/alpha"),
            (f"{sub}_latent", f"{sub}/latent.vt"),
        ]
    _write_manifest(out, entries)
    print(f"background + {len(layers.layers)} layers written to {out}")
    return 0


def cmd_compose(cfg: RunConfig) -> int:
    model = LatentModel.load(cfg["checkpoint"])
    bg = Path(cfg["background"])
    if bg.is_dir():
        model.require_vae()
        z_bg = model.encode(load_video(bg))
    else:
        z_bg = load_tensor(bg)
    z_obj = np.zeros_like(z_bg)
    for path in cfg["layer"]:
        z_obj = compose_latent(z_obj, load_tensor(path))
    video = compose_layers(model, z_bg, z_obj,
                           refine_steps=cfg["refine_steps"], seed=cfg["seed"])
    out = _out_dir(cfg)
    save_video(out / "composite", video)
    save_tensor(out / "composite_latent.vt", compose_latent(z_bg, z_obj))
    print(f"composite written to {out / 'composite'}")
    return 0


def _write_report(report, out: Path, stem: str) -> None:
    (out / f"{stem}.csv").write_text(report_to_summary_csv(report))
    (out / f"{stem}_scenes.csv").write_text(report_to_csv(report))
    text = report_to_text(report)
    (out / f"{stem}.txt").write_text(text)
    print(text, end="")


def cmd_eval(cfg: RunConfig) -> int:
    model = LatentModel.load(cfg["checkpoint"])
    bundles = load_suite(cfg["data"])
    report = run_benchmark(
        model, bundles, methods=cfg["methods"], seeds=cfg["seeds"],
        tracker=cfg["tracker"], steps=cfg["steps"], density=cfg["density"],
        use_effect_mask=cfg["use_effect_mask"], jobs=cfg["jobs"],
    )
    _write_report(report, _out_dir(cfg), "report")
    return 0


def cmd_ablate(cfg: RunConfig) -> int:
    model = LatentModel.load(cfg["checkpoint"])
    bundles = load_suite(cfg["data"])
    report = run_ablation(
        model, bundles, cfg["kind"], seeds=cfg["seeds"],
        tracker=cfg["tracker"], steps=cfg["steps"], jobs=cfg["jobs"],
    )
    _write_report(report, _out_dir(cfg), f"ablation_{cfg['kind']}")
    return 0


_HANDLERS = {
    "synth": cmd_synth,
    "train-vae": cmd_train_vae,
    "train-denoiser": cmd_train_denoiser,
    "remove": cmd_remove,
    "extract": cmd_extract,
    "compose": cmd_compose,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
}


def dispatch(argv: list[str]) -> int:
    try:
        if not argv:
            raise UsageError("no command given; commands:\n" + _command_list())
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise UsageError("no command given; commands:\n" + _command_list())
        return _HANDLERS[ns.command](_resolve(ns))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except LatentMatteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
