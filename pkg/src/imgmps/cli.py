"""Command-line front end: ``imgmps <subcommand> [options]``.

Exit codes: 0 on success, 1 if some items failed (the rest are still
written), 2 for invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import ansatz_mera, ansatz_seq1d, ansatz_seq2d, default_layout, mps_to_circuit, param_count
from .encode import EncodingSpec, StateVector, decode_image, encode_state
from .imageio import ImageGrid, grid_to_json, is_image_file, load_grid, write_pgm
from .spectral import (
    DecayModel,
    Spectrum,
    TruncationSpec,
    alias_fold,
    bound,
    dft2,
    hard_cutoff_image,
    idft2,
    master_spectrum,
    spectrum_to_mps,
    synthetic_corpus,
    truncate_spectrum,
)
from .tensnet import REPORT_COLUMNS, entanglement_profile, mps_from_state, two_norm_distance
from .varopt import OptimizerConfig, optimize, write_trace_csv

log = logging.getLogger("imgmps")

SCHEMA_VERSION = "1"
BOUND_COLUMNS = ("model", "C", "alpha", "beta", "n", "lambda", "chi", "bound", "fourier_error", "svd_error")
OPTIMIZE_COLUMNS = ("image_id", "encoding", "indexing", "ansatz", "layers", "seed", "params", "infidelity", "steps")


class UsageError(Exception):
    """Invalid command-line arguments detected after parsing."""


# helpers ------------------------------------------------------------------

def _int_list(text: str) -> list:
    """Parse ``"5,6,8"`` or ranges like ``"5-8"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def _str_list(text: str) -> list:
    return [s.strip() for s in text.split(",") if s.strip()]


def _write_rows(rows, columns, path: Path, fmt: str, kind: str, key):
    rows = sorted(rows, key=key)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(json.dumps({"schema": f"{kind} v{SCHEMA_VERSION}", "rows": rows}, indent=1))
        return
    with open(path, "w", newline="") as fh:
        fh.write(f"# imgmps {kind} schema v{SCHEMA_VERSION}\n")
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def _map(func, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _model_from_args(args) -> DecayModel:
    kind = getattr(args, "model", None) or args.synthetic
    try:
        return DecayModel(kind, args.C, args.alpha, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _image_sources(args) -> list:
    """List of ``(image_id, loader)`` descriptors; loaders are picklable tuples."""
    sources = []
    for raw in args.input or []:
        p = Path(raw)
        if p.is_dir():
            sources += [("file", str(f)) for f in sorted(p.iterdir()) if is_image_file(f)]
        elif p.exists():
            sources.append(("file", str(p)))
        else:
            raise UsageError(f"input {raw!r} does not exist")
    if getattr(args, "synthetic", None):
        for i in range(args.count):
            sources.append(("synthetic", i))
    if not sources:
        raise UsageError("no inputs: pass --input and/or --synthetic")
    return sources


def _load_images(args, sources, n: int) -> dict:
    """Images at resolution ``n`` keyed by id; failures map to exceptions."""
    out = {}
    synth = [s for s in sources if s[0] == "synthetic"]
    if synth:
        if args.synthetic == "cutoff":
            for _, i in synth:
                out[f"synthetic-{i:03d}"] = hard_cutoff_image(args.cutoff, n, seed=(args.seed, i))
        else:
            corpus = synthetic_corpus(_model_from_args(args), [n], args.count, seed=args.seed)[n]
            for (_, i), g in zip(synth, corpus):
                out[f"synthetic-{i:03d}"] = g
    for kind, path in sources:
        if kind == "file":
            try:
                out[Path(path).name] = load_grid(path, n)
            except ValueError as exc:
                out[Path(path).name] = exc
    return out


def _encodings(args) -> list:
    try:
        return [EncodingSpec.parse(e, ix) for e in args.encoding for ix in args.indexing]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# subcommands --------------------------------------------------------------

def _compress_item(item):
    image_id, grid, spec, chi = item
    state = encode_state(grid, spec)
    _, report = mps_from_state(state, chi)
    _, max_ent = entanglement_profile(state)
    return {
        "image_id": image_id,
        "encoding": spec.label,
        "indexing": spec.indexing,
        "n": grid.n,
        "chi": chi,
        "infidelity": report.infidelity,
        "two_norm": report.two_norm_distance,
        "max_entropy": max_ent,
    }


def _safe(func):
    def run(item):
        try:
            return func(item)
        except Exception as exc:  # reported per item, sweep continues
            return exc

    return run


def _safe_compress(item):
    return _safe(_compress_item)(item)


def cmd_compress(args) -> int:
    sources = _image_sources(args)
    specs = _encodings(args)
    items, failures = [], 0
    for n in args.n:
        for image_id, grid in sorted(_load_images(args, sources, n).items()):
            if isinstance(grid, Exception):
                log.error("skipping %s: %s", image_id, grid)
                failures += 1
                continue
            items += [(image_id, grid, spec, chi) for spec in specs for chi in args.chi]
    rows = []
    for item, res in zip(items, _map(_safe_compress, items, args.jobs)):
        if isinstance(res, Exception):
            log.error("compress failed for %s: %s", item[0], res)
            failures += 1
        else:
            rows.append(res)
    out = Path(args.out) / f"compress.{args.format}"
    _write_rows(rows, REPORT_COLUMNS, out, args.format, "compress", key=lambda r: tuple(r[c] for c in REPORT_COLUMNS[:5]))
    log.info("wrote %d rows to %s", len(rows), out)
    return 1 if failures else 0


def _bound_cell(item):
    model, master, n, lams = item
    spec = alias_fold(master, n)
    f = idft2(spec)
    f_vec = f.ravel() / np.linalg.norm(f)
    rows = []
    for lam in lams:
        if 2 * lam + 1 > 1 << n:
            continue
        trunc, _ = truncate_spectrum(spec, TruncationSpec(lam, n))
        g_norm = trunc.norm
        g = idft2(trunc).ravel()
        g_vec = g / np.linalg.norm(g)
        chi = 2 * lam + 1
        _, rep = mps_from_state(f_vec, chi)
        rows.append(
            {
                "model": model.kind,
                "C": model.C,
                "alpha": model.alpha,
                "beta": model.beta,
                "n": n,
                "lambda": lam,
                "chi": chi,
                "bound": bound(model, n, lam, g_norm),
                "fourier_error": two_norm_distance(f_vec, g_vec),
                "svd_error": rep.two_norm_distance,
            }
        )
    return rows


def bound_sweep(model: DecayModel, n_values, lams, master_log: int = 9, seed=0, jobs: int = 1) -> list:
    """Rows of (bound, Fourier-truncation error, SVD error) for every ``(n, lam)``."""
    if master_log < max(n_values) + 1:
        raise ValueError("master must be at least twice the largest grid side")
    master = master_spectrum(model, master_log, seed)
    items = [(model, master, n, list(lams)) for n in n_values]
    return [row for rows in _map(_bound_cell, items, jobs) for row in rows]


def cmd_bound(args) -> int:
    model = _model_from_args(args)
    if args.master_log < max(args.n) + 1:
        raise UsageError("--master-log must exceed the largest --n")
    rows = bound_sweep(model, args.n, args.lam, args.master_log, args.seed, args.jobs)
    out = Path(args.out) / f"bound.{args.format}"
    _write_rows(rows, BOUND_COLUMNS, out, args.format, "bound", key=lambda r: (r["model"], r["n"], r["lambda"]))
    log.info("wrote %d rows to %s", len(rows), out)
    return 0


def cmd_encode(args) -> int:
    sources = _image_sources(args)
    specs = _encodings(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for image_id, grid in sorted(_load_images(args, sources, args.n[0]).items()):
        if isinstance(grid, Exception):
            log.error("skipping %s: %s", image_id, grid)
            failures += 1
            continue
        for spec in specs:
            try:
                state = encode_state(grid, spec)
            except ValueError as exc:
                log.error("encode failed for %s: %s", image_id, exc)
                failures += 1
                continue
            stem = Path(image_id).stem
            (out / f"{stem}.{spec.label}.{spec.indexing}.state.json").write_text(state.to_json())
    return 1 if failures else 0


def cmd_spectrum(args) -> int:
    sources = _image_sources(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for image_id, grid in sorted(_load_images(args, sources, args.n[0]).items()):
        if isinstance(grid, Exception):
            log.error("skipping %s: %s", image_id, grid)
            failures += 1
            continue
        spec = dft2(grid)
        stem = Path(image_id).stem
        if args.lam is not None:
            try:
                spec, weight = truncate_spectrum(spec, TruncationSpec(args.lam[0], grid.n))
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            log.info("%s: discarded weight %.3e", image_id, weight)
            mps = spectrum_to_mps(spec)
            (out / f"{stem}.mps.json").write_text(mps.to_json())
        (out / f"{stem}.spectrum.json").write_text(spec.to_json())
    return 1 if failures else 0


def cmd_synth(args) -> int:
    sources = [("synthetic", i) for i in range(args.count)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in args.n:
        for image_id, grid in sorted(_load_images(args, sources, n).items()):
            stem = f"{image_id}-n{n}"
            write_pgm(grid, out / f"{stem}.pgm")
            if args.format == "json":
                (out / f"{stem}.json").write_text(grid_to_json(grid))
    return 0


def _build_ansatz(kind: str, m: int, layers: int, seed):
    if kind == "seq1d":
        return ansatz_seq1d(m, layers, seed)
    if kind == "seq2d":
        return ansatz_seq2d(default_layout(m), layers, seed)
    if kind == "mera":
        return ansatz_mera(m, seed)
    raise ValueError(f"unknown ansatz {kind!r}")


def _optimize_item(item):
    image_id, grid, spec, kind, layers, seed, config, out_dir = item
    target = encode_state(grid, spec)
    circuit = _build_ansatz(kind, target.m, layers, seed)
    cfg = OptimizerConfig(**{**config, "seed": seed})
    best, trace = optimize(circuit, target, cfg)
    if out_dir is not None:
        stem = f"{Path(image_id).stem}.{spec.label}.{kind}{layers}.s{seed}"
        Path(out_dir, f"{stem}.circuit.json").write_text(best.to_json())
        write_trace_csv(trace, Path(out_dir, f"{stem}.trace.csv"))
    return {
        "image_id": image_id,
        "encoding": spec.label,
        "indexing": spec.indexing,
        "ansatz": kind,
        "layers": layers if kind != "mera" else 1,
        "seed": seed,
        "params": param_count(best),
        "infidelity": trace.final,
        "steps": len(trace.infidelity),
    }


def _safe_optimize(item):
    return _safe(_optimize_item)(item)


def cmd_optimize(args) -> int:
    sources = _image_sources(args)
    specs = _encodings(args)
    for kind in args.ansatz:
        if kind not in ("seq1d", "seq2d", "mera"):
            raise UsageError(f"unknown ansatz {kind!r}")
    try:
        config = OptimizerConfig(steps=args.steps, lr=args.lr, patience=args.patience, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config = {k: getattr(config, k) for k in ("steps", "lr", "beta1", "beta2", "eps", "tol", "patience", "retraction")}
    out = Path(args.out)
    circuits_dir = out / "circuits"
    circuits_dir.mkdir(parents=True, exist_ok=True)
    items, failures = [], 0
    for image_id, grid in sorted(_load_images(args, sources, args.n[0]).items()):
        if isinstance(grid, Exception):
            log.error("skipping %s: %s", image_id, grid)
            failures += 1
            continue
        for spec in specs:
            for kind in args.ansatz:
                for layers in ([1] if kind == "mera" else args.layers):
                    for s in args.seeds:
                        items.append((image_id, grid, spec, kind, layers, s, config, str(circuits_dir)))
    rows = []
    for item, res in zip(items, _map(_safe_optimize, items, args.jobs)):
        if isinstance(res, Exception):
            log.error("optimize failed for %s: %s", item[0], res)
            failures += 1
        else:
            rows.append(res)
    _write_rows(
        rows,
        OPTIMIZE_COLUMNS,
        out / f"optimize.{args.format}",
        args.format,
        "optimize",
        key=lambda r: (r["image_id"], r["encoding"], r["indexing"], r["ansatz"], r["layers"], r["seed"]),
    )
    return 1 if failures else 0


def cmd_decode(args) -> int:
    try:
        spec = EncodingSpec.parse(args.encoding[0], args.indexing[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for raw in args.state:
        path = Path(raw)
        try:
            state = StateVector.from_json(path.read_text())
            n = (state.m - spec.color_qubits) // 2
            grid = decode_image(state, spec, n)
        except (OSError, ValueError, KeyError) as exc:
            log.error("decode failed for %s: %s", raw, exc)
            failures += 1
            continue
        stem = path.name.split(".")[0]
        write_pgm(grid, out / f"{stem}.decoded.pgm")
        if args.format == "json":
            (out / f"{stem}.decoded.json").write_text(grid_to_json(grid))
    return 1 if failures else 0


# parser -------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_inputs(p, n_default="6"):
    p.add_argument("--input", action="append", help="image file or directory (PNG, PGM); repeatable")
    p.add_argument("--synthetic", choices=("exp", "alg", "cutoff"), help="add a synthetic corpus")
    p.add_argument("--count", type=int, default=20, help="synthetic images")
    p.add_argument("--cutoff", type=int, default=2, help="frequency cutoff of --synthetic cutoff")
    _add_model(p)
    p.add_argument("--n", type=_int_list, default=_int_list(n_default), help="log2 side lengths, e.g. 5-8")


def _add_model(p):
    """Decay parameters; the kind comes from ``--model`` or ``--synthetic``."""
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--beta", type=float, default=1.2)


def _add_encoding(p):
    p.add_argument("--encoding", type=_str_list, default=["amplitude"], help="amplitude,frqi,neqr3,...")
    p.add_argument("--indexing", type=_str_list, default=["row"], help="row,hierarchical,snake")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imgmps", description="Image encodings, MPS compression and circuit synthesis.")
    parser.add_argument("--version", action="version", version=f"imgmps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode images as state vectors (JSON)")
    _add_inputs(p)
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("compress", help="truncated-SVD MPS compression sweep")
    _add_inputs(p)
    _add_encoding(p)
    p.add_argument("--chi", type=_int_list, default=[16])
    _add_common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("spectrum", help="DFT spectrum (and MPS of a truncation) of images")
    _add_inputs(p)
    p.add_argument("--lam", type=_int_list, default=None, help="cutoff; also writes the spectrum MPS")
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound", help="error bound vs Fourier and SVD truncation errors")
    p.add_argument("--model", choices=("exp", "alg"), required=True)
    _add_model(p)
    p.add_argument("--n", type=_int_list, default=_int_list("5-8"))
    p.add_argument("--lam", type=_int_list, default=_int_list("0-31"))
    p.add_argument("--master-log", type=int, default=9)
    _add_common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("synth", help="write a synthetic corpus as PGM (and JSON)")
    p.add_argument("--synthetic", choices=("exp", "alg", "cutoff"), default="alg")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--cutoff", type=int, default=2)
    _add_model(p)
    p.add_argument("--n", type=_int_list, default=_int_list("6"))
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("optimize", help="variational circuit fits")
    _add_inputs(p, n_default="3")
    _add_encoding(p)
    p.add_argument("--ansatz", type=_str_list, default=["seq1d"], help="seq1d,seq2d,mera")
    p.add_argument("--layers", type=_int_list, default=[1])
    p.add_argument("--seeds", type=_int_list, default=[0])
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--lr", type=float, default=5e-3)
    p.add_argument("--patience", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("decode", help="render encoded states back to images")
    p.add_argument("state", nargs="+", help="StateVector JSON files")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_decode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if hasattr(args, "count") and args.count < 0:
        parser.error("--count must be >= 0")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"imgmps {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
