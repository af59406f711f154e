"""Command-line surface binding the analysis and PDE engines.

Subcommands: stability-map, accuracy-map, amp-surface, speedup-table,
nls-run, nls-sweep and self-test.  Every run writes a JSON manifest
echoing the fully resolved configuration next to its artifacts.

Exit status: 0 on success, 1 on a validation error (bad flags or an
inconsistent block structure), 2 on a numerical failure (blow-up or a
stalled iteration).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import cost, pde, regions
from .parareal_matrix import (
    PowerIterationStalledError,
    appendix_lemma_oracle,
    build_matrices,
    e_norm_inf_closed,
    parareal_amp,
    parareal_amp_recursive,
)
from .dahlquist import PropagatorFactors
from .tableaux import UnknownMethodError, builtin_tableau, normalize_method_id

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

PROG = "parareal-lab"


class CLIValidationError(ValueError):
    """Raised for unparsable or inconsistent command-line input."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through the
    # validation path (exit 1) instead.
    def error(self, message):
        raise CLIValidationError(message)


def _add_window_flags(p, z1_range, z2_range):
    p.add_argument("--z1-min", type=float, default=z1_range[0])
    p.add_argument("--z1-max", type=float, default=z1_range[1])
    p.add_argument("--z2-min", type=float, default=z2_range[0])
    p.add_argument("--z2-max", type=float, default=z2_range[1])
    p.add_argument("--res", type=int, default=201, help="grid points per axis")


def _add_block_flags(p, with_nb=False):
    p.add_argument("--coarse", required=True, help="coarse method (rk1..rk4)")
    p.add_argument("--fine", required=True, help="fine method (rk1..rk4)")
    p.add_argument("--np", type=int, default=None, dest="np_", help="processors per block")
    p.add_argument("--nt", type=int, default=None, help="fine steps per block (Np*Nf)")
    p.add_argument("--nf", type=int, required=True, help="fine steps per processor")
    p.add_argument("--ng", type=int, default=1, help="coarse steps per processor")
    if with_nb:
        p.add_argument("--nb", type=int, default=1, help="number of blocks")


def _add_common_flags(p):
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _resolve_np(args) -> int:
    """Resolve Np from --np/--nt with the NT = Np*Nf cross-check."""
    if args.np_ is None and args.nt is None:
        raise CLIValidationError("one of --np or --nt is required")
    if args.nt is not None:
        if args.nt % args.nf != 0:
            raise CLIValidationError(f"--nt {args.nt} is not a multiple of --nf {args.nf}")
        np_from_nt = args.nt // args.nf
        if args.np_ is not None and args.np_ != np_from_nt:
            raise CLIValidationError(
                f"inconsistent block structure: NT={args.nt} != Np*Nf={args.np_ * args.nf}"
            )
        return np_from_nt
    return args.np_


def _axes(args):
    if args.res < 2:
        raise CLIValidationError("--res must be >= 2")
    z1 = np.linspace(args.z1_min, args.z1_max, args.res)
    z2 = np.linspace(args.z2_min, args.z2_max, args.res)
    return z1, z2


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_manifest(path, command, config, outputs) -> None:
    doc = {"command": command, "config": config, "seeds": None, "outputs": outputs}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_grid_json(grid: regions.RegionGrid, path) -> None:
    doc = {
        "columns": regions.CSV_HEADER.split(","),
        "z1": [format(float(v), ".17g") for v in grid.z1_axis],
        "z2": [format(float(v), ".17g") for v in grid.z2_axis],
        "abs_R": [[format(float(v), ".17g") for v in row] for row in grid.abs_R],
        "norm_E_inf": [[format(float(v), ".17g") for v in row] for row in grid.norm_E_inf],
        "accuracy_err": [[format(float(v), ".17g") for v in row] for row in grid.accuracy_err],
        "class": [[str(v) for v in row] for row in grid.cls],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _emit_grid(args, name, spec, grid):
    out = _outdir(args)
    ext = "json" if args.format == "json" else "csv"
    data_path = os.path.join(out, f"{name}.{ext}")
    if args.format == "json":
        _write_grid_json(grid, data_path)
    else:
        regions.write_grid_csv(grid, data_path)
    sidecar_path = os.path.join(out, f"{name}_sidecar.json")
    S = E = None
    config = {
        "window": {
            "z1": [args.z1_min, args.z1_max],
            "z2": [args.z2_min, args.z2_max],
            "res": args.res,
        },
        "format": args.format,
    }
    if spec is not None:
        coarse_t, fine_t = spec.tableaus()
        cg, cf = cost.default_step_costs(coarse_t, fine_t)
        m = cost.CostModel(
            cf=cf, cg=cg, Ns=spec.NT, Np=spec.Np, Nf=spec.Nf, Ng=spec.Ng, Nb=1,
            Kbar=float(spec.K),
        )
        S = cost.speedup(m)
        E = cost.efficiency(m)
        config["spec"] = spec.as_dict()
    regions.write_grid_sidecar(grid, sidecar_path, spec=spec, speedup=S, efficiency=E)
    manifest_path = os.path.join(out, f"{name}_manifest.json")
    _write_manifest(
        manifest_path, name, config, {"data": data_path, "sidecar": sidecar_path}
    )
    counts = grid.class_counts()
    print(f"{name}: wrote {data_path}")
    print("  " + "  ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def _cmd_stability_map(args) -> int:
    spec = regions.MethodPairSpec(
        coarse=args.coarse, fine=args.fine, Np=_resolve_np(args), Nf=args.nf,
        Ng=args.ng, K=args.k,
    )
    z1, z2 = _axes(args)
    grid = regions.compute_grid(spec, z1, z2, threads=args.threads)
    return _emit_grid(args, "stability_map", spec, grid)


def _cmd_accuracy_map(args) -> int:
    spec = regions.MethodPairSpec(
        coarse=args.coarse, fine=args.fine, Np=_resolve_np(args), Nf=args.nf,
        Ng=args.ng, K=args.k,
    )
    z1, z2 = _axes(args)
    grid = regions.accuracy_grid(
        spec, z1, z2, for_fine_only=args.fine_only, threads=args.threads
    )
    return _emit_grid(args, "accuracy_map", spec, grid)


def _cmd_amp_surface(args) -> int:
    t = builtin_tableau(args.method)
    z1, z2 = _axes(args)
    grid = regions.imexrk_amplitude_grid(t, z1, z2, threads=args.threads)
    return _emit_grid(args, f"amp_surface_{t.id}", None, grid)


def _cmd_speedup_table(args) -> int:
    Np = _resolve_np(args)
    NT = Np * args.nf
    if args.ns:
        ns_values = [int(v) for v in args.ns.split(",") if v.strip()]
    else:
        ns_values = [NT * args.nb]
    rows = cost.speedup_table(
        args.coarse, args.fine, Np, args.nf, args.ng, args.k, ns_values,
        cf=args.cf, cg=args.cg,
    )
    print("Ns S E")
    for Ns, S, E in rows:
        print(f"{Ns} {S:.2f} {E:.4f}")
    out = _outdir(args)
    table_path = os.path.join(out, "speedup_table.csv")
    with open(table_path, "w") as fh:
        fh.write("Ns,S,E\n")
        for Ns, S, E in rows:
            fh.write(f"{Ns},{format(S, '.17g')},{format(E, '.17g')}\n")
    config = {
        "coarse": normalize_method_id(args.coarse),
        "fine": normalize_method_id(args.fine),
        "Np": Np, "Nf": args.nf, "Ng": args.ng, "K": args.k,
        "ns_values": ns_values, "cf": args.cf, "cg": args.cg,
    }
    _write_manifest(
        os.path.join(out, "speedup_table_manifest.json"),
        "speedup-table", config, {"table": table_path},
    )
    return EXIT_OK


def _run_config(args, Np) -> pde.PararealRunConfig:
    if args.k is not None and (args.tol is not None or args.kmax is not None):
        raise CLIValidationError("use either --k or --tol/--kmax, not both")
    threads = regions._default_threads(args.threads)
    return pde.PararealRunConfig(
        coarse=args.coarse, fine=args.fine, Np=Np, Nf=args.nf, Ng=args.ng,
        Nb=args.nb, K=args.k, tol=args.tol, Kmax=args.kmax, threads=threads,
    )


def _cmd_nls_run(args) -> int:
    prob = pde.NLSProblem(M=args.m, t_final=args.t_final)
    cfg = _run_config(args, _resolve_np(args))
    out = _outdir(args)
    t0 = time.perf_counter()
    state, stats = pde.parareal_integrate(cfg, prob)
    runtime = time.perf_counter() - t0
    state_path = os.path.join(out, "final_state.bin")
    pde.save_state(state, state_path)
    config = cfg.as_dict()
    config["runtime_s"] = runtime
    config["K_bar"] = stats.K_bar
    config["residuals"] = stats.residuals
    _write_manifest(
        os.path.join(out, "nls_run_manifest.json"),
        "nls-run",
        {"problem": {"M": prob.M, "L": prob.L, "t_final": prob.t_final}, "run": config},
        {"final_state": state_path},
    )
    print(f"nls-run: Ns={cfg.Ns} K_bar={stats.K_bar:.3f} runtime={runtime:.3f}s")
    return EXIT_OK


def _cmd_nls_sweep(args) -> int:
    prob = pde.NLSProblem(M=args.m, t_final=args.t_final)
    Np = _resolve_np(args)
    NT = Np * args.nf
    ns_values = [int(v) for v in args.ns.split(",") if v.strip()]
    if not ns_values:
        raise CLIValidationError("--ns must list at least one step count")
    out = _outdir(args)

    fine_t = builtin_tableau(args.fine)
    ref = pde.serial_integrate(fine_t, prob, args.ref_ns)

    rows = []
    for Ns in ns_values:
        if Ns % NT != 0:
            raise CLIValidationError(f"Ns={Ns} is not a multiple of the block size NT={NT}")
        Nb = Ns // NT
        cfg = pde.PararealRunConfig(
            coarse=args.coarse, fine=args.fine, Np=Np, Nf=args.nf, Ng=args.ng,
            Nb=Nb, K=args.k, tol=args.tol, Kmax=args.kmax,
            threads=regions._default_threads(args.threads),
        )
        t0 = time.perf_counter()
        try:
            state, stats = pde.parareal_integrate(cfg, prob)
            err = pde.relative_error(state, ref)
            k_bar = stats.K_bar
        except pde.BlowUpError:
            err = float("inf")
            k_bar = float(cfg.K if cfg.K is not None else cfg.Kmax)
        runtime = time.perf_counter() - t0

        t0 = time.perf_counter()
        pde.serial_integrate(fine_t, prob, Ns)
        serial_runtime = time.perf_counter() - t0
        coarse_t = builtin_tableau(args.coarse)
        cg, cf = cost.default_step_costs(coarse_t, fine_t)
        m = cost.CostModel(cf=cf, cg=cg, Ns=Ns, Np=Np, Nf=args.nf, Ng=args.ng,
                           Nb=Nb, Kbar=k_bar)
        theo = serial_runtime / cost.speedup(m)
        rows.append((Ns, err, runtime, theo, k_bar))
        print(f"Ns={Ns} error={err:.3e} runtime={runtime:.3f}s "
              f"theoretical={theo:.3f}s K_bar={k_bar:.3f}")

    sweep_path = os.path.join(out, "nls_sweep.csv")
    pde.write_sweep_csv(sweep_path, rows)
    config = {
        "coarse": normalize_method_id(args.coarse),
        "fine": normalize_method_id(args.fine),
        "Np": Np, "Nf": args.nf, "Ng": args.ng, "K": args.k,
        "tol": args.tol, "Kmax": args.kmax,
        "ns_values": ns_values, "ref_ns": args.ref_ns,
        "problem": {"M": prob.M, "L": prob.L, "t_final": prob.t_final},
    }
    _write_manifest(
        os.path.join(out, "nls_sweep_manifest.json"),
        "nls-sweep", config, {"sweep": sweep_path},
    )
    return EXIT_OK


def _cmd_self_test(args) -> int:
    rng = np.random.default_rng(2024)
    checks = []

    passed = 0
    trials = 100
    for _ in range(trials):
        # unit-disc samples keep the Toeplitz powers bounded so the
        # absolute 1e-12 deviation budget is meaningful up to n = 64
        gamma = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        omega = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        n = int(rng.integers(1, 65))
        devs = appendix_lemma_oracle(gamma, omega, n)
        if max(devs.values()) < 1e-12:
            passed += 1
    checks.append(("bidiagonal-lemmas", passed, trials))

    passed = 0
    trials = 100
    for _ in range(trials):
        Np = int(rng.integers(1, 33))
        absG = rng.uniform(0.05, 0.95)
        G = absG * np.exp(1j * rng.uniform(0, 2 * np.pi))
        radius = (1.0 - absG) / (1.0 - absG**Np) * (1.0 - 1e-6)
        F = G + radius * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        K = int(rng.integers(0, Np + 1))
        factors = PropagatorFactors(F=F, G=G, Nf=1, Ng=1)
        fast = parareal_amp(factors, Np, K).R
        literal = parareal_amp_recursive(factors, Np, K)
        if abs(fast - literal) <= 1e-12 * max(1.0, abs(literal)):
            passed += 1
    checks.append(("matrix-vs-recursion", passed, trials))

    passed = 0
    trials = 100
    for _ in range(trials):
        Np = int(rng.integers(1, 33))
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        factors = PropagatorFactors(F=F, G=G, Nf=1, Ng=1)
        m = build_matrices(factors, Np)
        brute = float(np.max(np.sum(np.abs(m.E), axis=1)))
        closed = e_norm_inf_closed(factors, Np)
        if abs(brute - closed) <= 1e-12 * max(1.0, brute):
            passed += 1
    checks.append(("inf-norm-closed-form", passed, trials))

    ok = True
    for name, got, want in checks:
        status = "PASS" if got == want else "FAIL"
        ok = ok and got == want
        print(f"{status} {name} {got}/{want}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("stability-map", help="block stability/convergence overlay grid")
    _add_block_flags(p)
    p.add_argument("--k", type=int, required=True, help="Parareal iterations")
    _add_window_flags(p, (0.0, 0.1), (-0.1, 0.1))
    _add_common_flags(p)
    p.set_defaults(func=_cmd_stability_map)

    p = sub.add_parser("accuracy-map", help="|R_hat - exact| accuracy grid")
    _add_block_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fine-only", action="store_true",
                   help="reference grid of NT fine steps instead of Parareal")
    _add_window_flags(p, (0.0, 0.1), (-0.1, 0.1))
    _add_common_flags(p)
    p.set_defaults(func=_cmd_accuracy_map)

    p = sub.add_parser("amp-surface", help="one-step log-amplitude surface of a method")
    p.add_argument("--method", required=True, help="method (rk1..rk4)")
    _add_window_flags(p, (-10.0, 10.0), (-10.0, 10.0))
    _add_common_flags(p)
    p.set_defaults(func=_cmd_amp_surface)

    p = sub.add_parser("speedup-table", help="theoretical speedup/efficiency table")
    _add_block_flags(p, with_nb=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ns", default=None, help="comma-separated total step counts")
    p.add_argument("--cf", type=float, default=None, help="fine per-step cost override")
    p.add_argument("--cg", type=float, default=None, help="coarse per-step cost override")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_speedup_table)

    p = sub.add_parser("nls-run", help="one Parareal integration of the NLS benchmark")
    _add_block_flags(p, with_nb=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="adaptive residual tolerance")
    p.add_argument("--kmax", type=int, default=None, help="adaptive iteration cap")
    p.add_argument("--m", type=int, default=1024, help="Fourier modes")
    p.add_argument("--t-final", type=float, default=15.0)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_nls_run)

    p = sub.add_parser("nls-sweep", help="error/runtime sweep over total step counts")
    _add_block_flags(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--ns", required=True, help="comma-separated total step counts")
    p.add_argument("--ref-ns", type=int, default=65536, help="reference serial step count")
    p.add_argument("--m", type=int, default=1024)
    p.add_argument("--t-final", type=float, default=15.0)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_nls_sweep)

    p = sub.add_parser("self-test", help="run the built-in cross-oracle checks")
    p.set_defaults(func=_cmd_self_test)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CLIValidationError, UnknownMethodError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (pde.BlowUpError, PowerIterationStalledError) as exc:
        print(f"{PROG}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
