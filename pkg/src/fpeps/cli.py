"""Command-line driver: verification suites and data generation.

Machine-readable results (JSON/CSV) go to --out or stdout; human summaries
go to stderr.  Exit codes: 0 all checks passed / data written, 1 at least
one check failed, 2 configuration or precondition error.  FPEPS_THREADS
caps the worker threads used for independent checks.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as fio
from .build import build_fpeps
from .contraction import contract_peps
from .critical import (
    closed_form_ratios,
    entropy_scan,
    example_channel,
    gap_scan,
    hcrit_coefficients,
    norm_zero_locator,
)
from .correlators import correlation_scan
from .errors import FpepsError, ZeroNormError
from .gaussian import (
    apply_channel,
    gamma_out_hat,
    lattice_bond_cm,
    physical_cm_from_blocks,
    purity_check,
)
from .lattice import LatticeSpec, parse_lattice
from .mapping import map_tensor_set
from .quadratic import ground_state_cm_consistency
from .tensors import FPEPSTensor

MAPPING_LATTICES = (LatticeSpec(1, 2), LatticeSpec(2, 1), LatticeSpec(2, 2))


def _thread_count() -> int:
    raw = os.environ.get("FPEPS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    workers = _thread_count()
    items = list(items)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify


def _mapping_checks(seed: int, n_sets: int, tolerance: float):
    jobs = []
    for i in range(n_sets):
        lattice = MAPPING_LATTICES[i % len(MAPPING_LATTICES)]
        jobs.append((i, lattice, seed + i))

    def run(job):
        i, lattice, sub_seed = job
        rng = np.random.default_rng(sub_seed)
        tensors = {s: FPEPSTensor.random(rng, parity=0) for s in lattice.sites()}
        oracle = build_fpeps(lattice, tensors)
        mapped = map_tensor_set(lattice, tensors)
        contracted = contract_peps(lattice, mapped)
        residual = abs(oracle.normalized_overlap(contracted) - 1.0)
        return {
            "name": f"mapping-overlap-{lattice.n_h}x{lattice.n_v}-{i}",
            "seed": sub_seed,
            "residual": residual,
            "tolerance": tolerance,
            "passed": bool(residual <= tolerance),
        }

    return _parallel_map(run, jobs)


def _gaussian_checks(lattice: LatticeSpec, seed: int, tolerance: float):
    channel = example_channel()
    checks = []
    rng = np.random.default_rng(seed)

    residual = 0.0
    for _ in range(100):
        phi = tuple(rng.uniform(0, 2 * np.pi, 2))
        fb = gamma_out_hat(channel, phi)
        rp, rq = closed_form_ratios(phi)
        residual = max(
            residual, abs(fb.p / fb.d - rp), abs(fb.q / fb.d - rq)
        )
    checks.append({
        "name": "closed-form-ratios",
        "residual": residual,
        "tolerance": tolerance,
        "passed": bool(residual <= tolerance),
    })

    report = norm_zero_locator(lattice)
    if not report.state_defined:
        checks.append({
            "name": f"fourier-equivalence-{lattice.n_h}x{lattice.n_v}",
            "passed": False,
            "zero_norm_momenta": [list(p) for p in report.essential],
            "error": "state undefined: essential zero-norm momenta on this lattice",
        })
        return checks

    purity = 0.0
    for phi in lattice.momenta():
        fb = gamma_out_hat(channel, phi)
        if not fb.zero_norm:
            purity = max(purity, purity_check(fb))
    checks.append({
        "name": f"momentum-purity-{lattice.n_h}x{lattice.n_v}",
        "residual": purity,
        "tolerance": tolerance,
        "passed": bool(purity <= tolerance),
    })

    try:
        big = channel.expand_to_lattice(lattice.n_sites)
        direct = apply_channel(big, lattice_bond_cm(lattice))
        assembled = physical_cm_from_blocks(channel, lattice)
        res = float(np.max(np.abs(direct.matrix - assembled.matrix)))
        checks.append({
            "name": f"fourier-equivalence-{lattice.n_h}x{lattice.n_v}",
            "residual": res,
            "tolerance": tolerance,
            "passed": bool(res <= tolerance),
        })
    except ZeroNormError as exc:
        checks.append({
            "name": f"fourier-equivalence-{lattice.n_h}x{lattice.n_v}",
            "passed": False,
            "zero_norm_momenta": [list(p) for p in exc.momenta],
            "error": str(exc),
        })

    try:
        res = ground_state_cm_consistency(channel, lattice)
        checks.append({
            "name": f"parent-consistency-{lattice.n_h}x{lattice.n_v}",
            "residual": res,
            "tolerance": tolerance,
            "passed": bool(res <= tolerance),
        })
    except ZeroNormError as exc:
        checks.append({
            "name": f"parent-consistency-{lattice.n_h}x{lattice.n_v}",
            "passed": False,
            "zero_norm_momenta": [list(p) for p in exc.momenta],
            "error": str(exc),
        })
    return checks


def cmd_verify(args) -> int:
    lattice = parse_lattice(args.lattice)
    checks = []
    if args.suite in ("mapping", "all"):
        checks.extend(_mapping_checks(args.seed, args.sets, args.tolerance))
    if args.suite in ("gaussian", "all"):
        checks.extend(_gaussian_checks(lattice, args.seed, args.tolerance))
    passed = all(c["passed"] for c in checks)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "lattice": [lattice.n_h, lattice.n_v],
        "tolerance": args.tolerance,
        "checks": checks,
        "passed": passed,
    }
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    n_pass = sum(1 for c in checks if c["passed"])
    print(f"verify: {n_pass}/{len(checks)} checks passed", file=sys.stderr)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# data generation


def cmd_correlations(args) -> int:
    rows = []
    for direction in args.dir:
        rows.extend(correlation_scan(direction, args.max_n, args.grid))
    text = "n1,n2,kind,numeric,residue,asymptotic\n"
    for n1, n2, kind, numeric, residue, asym in rows:
        text += f"{n1},{n2},{kind},{numeric!r},{residue!r},{asym!r}\n"
    _emit(text, args.out)
    print(f"correlations: wrote {len(rows)} rows", file=sys.stderr)
    return 0


def cmd_hamiltonian(args) -> int:
    lattice = parse_lattice(args.lattice) if args.lattice else None
    table = hcrit_coefficients(lattice)
    lines = ["term,dh,dv,re,im"]
    for (dh, dv), c in sorted(table.pairing.items()):
        lines.append(f"pairing,{dh},{dv},{c.real + 0.0!r},{c.imag + 0.0!r}")
    for (dh, dv), c in sorted(table.hopping.items()):
        lines.append(f"hopping,{dh},{dv},{c.real + 0.0!r},{c.imag + 0.0!r}")
    lines.append(f"mu,0,0,{table.mu + 0.0!r},0.0")
    _emit("\n".join(lines) + "\n", args.out)
    print("hamiltonian: coefficient table written", file=sys.stderr)
    return 0


def cmd_spectrum(args) -> int:
    if args.sizes:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok]
        rows = gap_scan(sizes)
        text = "N,gap\n" + "".join(f"{n},{g!r}\n" for n, g in rows)
        _emit(text, args.out)
        print(f"spectrum: gap scan over {len(rows)} sizes", file=sys.stderr)
        return 0
    from .quadratic import parent_hamiltonian, single_particle_spectrum

    lattice = parse_lattice(args.lattice)
    if lattice.n_h % 2 == 0 or lattice.n_v % 2 == 0:
        raise FpepsError(f"spectrum needs odd torus dimensions, got {args.lattice}")
    ham = parent_hamiltonian(example_channel(), radius_cap=2)
    spectrum, _gap = single_particle_spectrum(ham, lattice)
    text = "phi1,phi2,energy\n"
    for (p1, p2), eps in spectrum:
        text += f"{p1!r},{p2!r},{eps!r}\n"
        text += f"{p1!r},{p2!r},{-eps!r}\n"
    _emit(text, args.out)
    print(f"spectrum: {2 * len(spectrum)} levels written", file=sys.stderr)
    return 0


def cmd_entropy(args) -> int:
    if ".." in args.blocks:
        lo, hi = args.blocks.split("..")
        lengths = list(range(int(lo), int(hi) + 1))
    else:
        lengths = [int(tok) for tok in args.blocks.split(",") if tok]
    rows = entropy_scan(args.torus, lengths)
    text = "L,entropy_bits\n" + "".join(f"{l},{s!r}\n" for l, s in rows)
    _emit(text, args.out)
    print(f"entropy: scan over {len(rows)} block sizes", file=sys.stderr)
    return 0


def cmd_convert(args) -> int:
    lattice, parity, tensors = fio.load_tensor_set(args.input)
    mapped = map_tensor_set(lattice, tensors, parity)
    text = fio.dump_peps_set(lattice, mapped) + "\n"
    _emit(text, args.output)
    print(f"convert: mapped {lattice.n_sites} tensors", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpeps",
        description="fermionic PEPS: verification suites and model data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=("mapping", "gaussian", "all"), default="all")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--sets", type=int, default=51,
                   help="number of random tensor sets for the mapping suite")
    p.add_argument("--lattice", default="3x3")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("correlations", help="two-point correlator tables")
    p.add_argument("--dir", action="append", required=True,
                   choices=("axis", "diagonal", "n-2n"))
    p.add_argument("--max-n", type=int, default=40)
    p.add_argument("--grid", type=int, default=401)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("hamiltonian", help="parent-model coupling table")
    p.add_argument("--model", choices=("example",), default="example")
    p.add_argument("--lattice", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("spectrum", help="single-particle spectra and gaps")
    p.add_argument("--sizes", default=None,
                   help="comma-separated odd torus sizes for a gap scan")
    p.add_argument("--lattice", default="5x5")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("entropy", help="block entanglement entropy scan")
    p.add_argument("--torus", type=int, default=41)
    p.add_argument("--blocks", default="3..8")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("convert", help="map a fermionic tensor set to spin tensors")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FpepsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
