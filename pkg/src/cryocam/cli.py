"""Command-line surface binding all modules into reproducible runs.

Subcommands: device iv | fe sweep | tcam search | tcam calibrate |
hdc train | hdc infer | hdc sweep.  Every run writes its artifacts plus
``run_manifest.json`` (resolved config, seed, version, wall time) into
the output directory; files are written atomically so interrupted runs
never leave corrupt artifacts.

Exit codes: 0 success, 2 usage, 3 validation failure, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULTS, RunConfig, build_config, parse_config
from .errors import ConfigError, CryocamError, DomainError, NumericError, UsageError
from .fesquid import FeSquidDevice, branch_voltage, simulate_rcsj_iv
from .ferroelectric import apply_voltage, apply_waveform
from .hdc import (
    BlockPlan,
    accuracy_eval,
    encode_text,
    energy_sweep,
    infer_exact,
    infer_tcam,
    load_model,
    save_model,
    synthetic_corpus,
    train,
)
from .tcam import SearchKey, invert_energy_targets, search_exact, search_hd, store_word

OUTPUT_DIR_ENV = "CRYOCAM_OUT"


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    def fmt(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return format(x, ".9g")
        return str(x)

    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def _write_json(path: Path, payload: dict) -> Path:
    _atomic_write(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return path


def _write_manifest(out_dir: Path, command: str, argv, cfg: RunConfig, outputs,
                    started: float):
    _write_json(
        out_dir / "run_manifest.json",
        {
            "command": command,
            "argv": list(argv),
            "config": cfg.values,
            "seed": cfg["seed"],
            "cryocam_version": __version__,
            "python_version": sys.version.split()[0],
            "wall_time_s": round(time.monotonic() - started, 6),
            "utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": [p.name for p in outputs],
        },
    )


def _load_config(args) -> RunConfig:
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError([f"--set expects key=value, got {item!r}"])
        key, raw = item.split("=", 1)
        overrides[key.strip()] = raw.strip()
    if args.config:
        return parse_config(args.config, overrides)
    return build_config(overrides)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUTPUT_DIR_ENV) or "cryocam_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _saturated_device(cfg: RunConfig, state: str) -> FeSquidDevice:
    fe = cfg.fe_model().initial_state()
    span = cfg.fe_model().v_span
    apply_voltage(fe, span if state == "low" else -span)
    apply_voltage(fe, 0.0)
    return FeSquidDevice(
        fe=fe,
        sc=cfg.superconductor(),
        t_op=cfg["t_op_K"],
        r_low_state=cfg["r_low_state_ohm"],
        r_high_state=cfg["r_high_state_ohm"],
    )


def cmd_device_iv(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    dev = _saturated_device(cfg, args.state)
    i_points = np.linspace(0.0, args.i_max_uA * 1e-6, args.points)
    label = f"ic_{args.state}"
    if args.model == "behavioral":
        v = np.array([branch_voltage(dev, i) for i in i_points])
    else:
        v = simulate_rcsj_iv(dev, i_points, cfg.rcsj()).v_avg
    rows = [[i, float(vv), label, args.model] for i, vv in zip(i_points, v)]
    return [
        _write_csv(
            out_dir / "device_iv.csv",
            ["i_bias_A", "v_avg_V", "state_label", "model"],
            rows,
        )
    ]


def cmd_fe_sweep(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    model = cfg.fe_model()
    state = model.initial_state()
    leg = args.points_per_leg
    v_max = args.v_max_V
    up = np.linspace(-v_max, v_max, leg)
    down = np.linspace(v_max, -v_max, leg)
    samples = [np.linspace(0.0, -v_max, leg)]  # entry leg to negative tip
    for _ in range(args.cycles):
        samples.extend([up, down])
    waveform = np.concatenate(samples)
    trace = apply_waveform(state, waveform)
    rows = []
    prev = waveform[0]
    for v, p in zip(waveform, trace):
        branch = "up" if v >= prev else "down"
        rows.append([float(v), float(p), branch])
        prev = v
    return [
        _write_csv(out_dir / "fe_sweep.csv", ["v_V", "p_C_m2", "branch"], rows)
    ]


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


def cmd_tcam_search(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    words = _read_lines(args.store)
    keys = _read_lines(args.keys)
    if not words:
        raise UsageError(f"{args.store}: no stored words")
    if not keys:
        raise UsageError(f"{args.keys}: no search keys")
    width = len(words[0])
    array = cfg.make_array(len(words), width)
    for r, word in enumerate(words):
        store_word(array, r, word)
    search = search_exact if args.mode == "exact" else search_hd
    rows = []
    for key in keys:
        for r, res in enumerate(search(array, SearchKey(key))):
            rows.append(
                [key, r, res.v_ml * 1e3, res.n_match, res.power * 1e9,
                 res.energy * 1e18]
            )
    return [
        _write_csv(
            out_dir / "tcam_search.csv",
            ["key", "row", "v_ml_mV", "n_match", "power_nW", "energy_aJ"],
            rows,
        )
    ]


def cmd_tcam_calibrate(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    t_search = cfg["t_search_ns"] * 1e-9
    i_rwl, r_fs = invert_energy_targets(
        args.binary_aJ * 1e-18, args.ternary_aJ * 1e-18, t_search
    )
    ic_low, ic_high = cfg.critical_window()
    if not ic_low < i_rwl < ic_high:
        raise ConfigError(
            [
                f"calibrated I_RWL={i_rwl:.4g} A falls outside the exact-mode "
                f"window ({ic_low:.4g}, {ic_high:.4g}) A"
            ]
        )
    r_gate = cfg["ht_r_off_kohm"] * 1e3
    r_par = r_fs * r_gate / (r_fs + r_gate)
    e_match = i_rwl**2 * r_par * t_search
    e_dontcare = i_rwl**2 * (r_gate / 2.0) * t_search
    payload = {
        "i_rwl_exact_uA": i_rwl * 1e6,
        "r_fs_exact_ohm": r_fs,
        "binary_avg_aJ": e_match / 2.0 * 1e18,
        "ternary_avg_aJ": (2 * e_match + 2 * e_dontcare) / 6.0 * 1e18,
        "window_ic_low_uA": ic_low * 1e6,
        "window_ic_high_uA": ic_high * 1e6,
    }
    print(
        f"calibrated: I_RWL = {i_rwl * 1e6:.4f} uA, r_fs = {r_fs:.2f} ohm "
        f"(window {ic_low * 1e6:.3f}..{ic_high * 1e6:.3f} uA)"
    )
    return [_write_json(out_dir / "tcam_calibrate.json", payload)]


def _load_corpus_dir(root) -> dict:
    root = Path(root)
    if not root.is_dir():
        raise UsageError(f"corpus directory {root} does not exist")
    corpus = {}
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        texts = [
            f.read_text(encoding="utf-8")
            for f in sorted(class_dir.glob("*.txt"))
        ]
        if texts:
            corpus[class_dir.name] = texts
    if not corpus:
        raise UsageError(f"corpus directory {root} has no <label>/*.txt files")
    return corpus


def _corpus_from_args(args, cfg: RunConfig) -> dict:
    if args.corpus:
        return _load_corpus_dir(args.corpus)
    return synthetic_corpus(
        n_classes=args.classes,
        texts_per_class=args.texts_per_class,
        text_len=args.text_len,
        seed=cfg["seed"],
    )


def cmd_hdc_train(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    corpus = _corpus_from_args(args, cfg)
    model = train(corpus, d=cfg["hdc_d_bits"], n_gram=cfg["hdc_n_gram"],
                  seed=cfg["seed"])
    model_path = Path(args.model_out) if args.model_out else out_dir / "hdc_model.json"
    save_model(model, model_path)
    train_acc = accuracy_eval(model, corpus, engine="exact")
    print(
        f"trained {len(model.labels)} classes at D={model.d}, "
        f"n_gram={model.n_gram}; training accuracy {train_acc:.3f}"
    )
    return [model_path]


def cmd_hdc_infer(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    model = load_model(args.model)
    text = Path(args.text).read_text(encoding="utf-8")
    query = encode_text(text, model.item_memory(), model.n_gram)
    if args.engine == "exact":
        label, distances = infer_exact(model, query)
        energies = None
    else:
        plan = BlockPlan(block_size=cfg["hdc_block_size"])
        label, distances, energies = infer_tcam(model, query, plan)
    payload = {
        "label": label,
        "engine": args.engine,
        "distances": distances,
        "energies_J": energies,
    }
    print(f"label: {label}")
    return [_write_json(out_dir / "hdc_infer.json", payload)]


def cmd_hdc_sweep(args, cfg: RunConfig, out_dir: Path) -> list[Path]:
    rows = []
    for d in args.d:
        table = energy_sweep(
            d_bits=d,
            block_sizes=args.block,
            match_fraction=args.match,
            i_rwl_per_bit=cfg["i_rwl_hd_uA"] * 1e-6,
            t_search=cfg["t_search_ns"] * 1e-9,
        )
        accuracy = None
        if args.accuracy:
            corpus = synthetic_corpus(
                n_classes=args.classes,
                texts_per_class=args.texts_per_class,
                text_len=args.text_len,
                seed=cfg["seed"],
            )
            split = max(1, args.texts_per_class // 4)
            train_set = {lb: t[:-split] for lb, t in corpus.items()}
            test_set = {lb: t[-split:] for lb, t in corpus.items()}
            model = train(train_set, d=d, n_gram=cfg["hdc_n_gram"],
                          seed=cfg["seed"])
            accuracy = accuracy_eval(model, test_set, engine="exact")
        for entry in table:
            rows.append(
                [
                    entry["d_bits"],
                    entry["block_size"],
                    entry["energy_J_fesquid"],
                    entry["energy_J_sram_ref"],
                    accuracy,
                ]
            )
    return [
        _write_csv(
            out_dir / "hdc_sweep.csv",
            ["d_bits", "block_size", "energy_J_fesquid", "energy_J_sram_ref",
             "accuracy"],
            rows,
        )
    ]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryocam",
        description="Cryogenic FeSQUID/hTron TCAM simulator",
    )
    parser.add_argument("--config", help="config file (key = value lines)")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (repeatable; wins over the file)",
    )
    parser.add_argument(
        "--out",
        help=f"output directory (default ${OUTPUT_DIR_ENV} or ./cryocam_out)",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    device = sub.add_parser("device", help="FeSQUID device characterization")
    device_sub = device.add_subparsers(dest="command", required=True)
    iv = device_sub.add_parser("iv", help="I-V curve of one stored state")
    iv.add_argument("--state", choices=["low", "high"], default="high",
                    help="stored critical-current state")
    iv.add_argument("--model", choices=["behavioral", "rcsj"],
                    default="behavioral")
    iv.add_argument("--i-max-uA", type=float, default=6.0)
    iv.add_argument("--points", type=int, default=61)
    iv.set_defaults(func=cmd_device_iv, name="device iv")

    fe = sub.add_parser("fe", help="ferroelectric characterization")
    fe_sub = fe.add_subparsers(dest="command", required=True)
    sweep = fe_sub.add_parser("sweep", help="polarization-voltage loop")
    sweep.add_argument("--v-max-V", type=float, default=2.0)
    sweep.add_argument("--points-per-leg", type=int, default=101)
    sweep.add_argument("--cycles", type=int, default=2)
    sweep.set_defaults(func=cmd_fe_sweep, name="fe sweep")

    tcam = sub.add_parser("tcam", help="TCAM array operations")
    tcam_sub = tcam.add_subparsers(dest="command", required=True)
    search = tcam_sub.add_parser("search", help="search stored words")
    search.add_argument("--mode", choices=["exact", "hd"], required=True)
    search.add_argument("--store", required=True,
                        help="file of stored words, one 0/1 word per line")
    search.add_argument("--keys", required=True,
                        help="file of search keys, one 0/1/d word per line")
    search.set_defaults(func=cmd_tcam_search, name="tcam search")
    calibrate = tcam_sub.add_parser(
        "calibrate", help="recover exact-mode bias from energy targets"
    )
    calibrate.add_argument("--binary-aJ", type=float, default=1.36)
    calibrate.add_argument("--ternary-aJ", type=float, default=26.5)
    calibrate.set_defaults(func=cmd_tcam_calibrate, name="tcam calibrate")

    hdc = sub.add_parser("hdc", help="hyperdimensional-computing workload")
    hdc_sub = hdc.add_subparsers(dest="command", required=True)

    def corpus_flags(p):
        p.add_argument("--corpus",
                       help="directory with one subdirectory of *.txt per label")
        p.add_argument("--classes", type=int, default=3,
                       help="synthetic corpus classes (no --corpus)")
        p.add_argument("--texts-per-class", type=int, default=20)
        p.add_argument("--text-len", type=int, default=2000)

    train_p = hdc_sub.add_parser("train", help="train class vectors")
    corpus_flags(train_p)
    train_p.add_argument("--model-out", help="model path (default in --out)")
    train_p.set_defaults(func=cmd_hdc_train, name="hdc train")

    infer_p = hdc_sub.add_parser("infer", help="classify one text")
    infer_p.add_argument("--model", required=True)
    infer_p.add_argument("--text", required=True)
    infer_p.add_argument("--engine", choices=["tcam", "exact"], default="tcam")
    infer_p.set_defaults(func=cmd_hdc_infer, name="hdc infer")

    sweep_p = hdc_sub.add_parser("sweep", help="energy/accuracy sweep")
    sweep_p.add_argument("--d", type=int, nargs="+", default=[10000])
    sweep_p.add_argument("--block", type=int, nargs="+",
                         default=[10, 50, 100, 500])
    sweep_p.add_argument("--match", type=float, default=0.5)
    sweep_p.add_argument("--accuracy", action="store_true",
                         help="also train/evaluate on the synthetic corpus")
    corpus_flags(sweep_p)
    sweep_p.set_defaults(func=cmd_hdc_sweep, name="hdc sweep")

    return parser


def _fail(category: str, messages: list[str], code: int) -> int:
    print(
        json.dumps({"error_category": category, "messages": messages}),
        file=sys.stderr,
    )
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        cfg = _load_config(args)
        out_dir = _out_dir(args)
        outputs = args.func(args, cfg, out_dir)
        _write_manifest(out_dir, args.name, argv, cfg, outputs, started)
    except ConfigError as exc:
        return _fail("validation", exc.violations, 3)
    except (UsageError, DomainError) as exc:
        return _fail("validation", [str(exc)], 3)
    except NumericError as exc:
        return _fail("numeric", [str(exc)], 4)
    except CryocamError as exc:
        return _fail("error", [str(exc)], 3)
    except FileNotFoundError as exc:
        return _fail("validation", [str(exc)], 3)
    for path in outputs:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
