"""``ftgadgets`` command-line interface.

Exit codes: 0 success / gadget passes, 2 property failure (invalid code,
parity failure, gadget not fault tolerant), 1 malformed input or tool error.

Settings precedence: flag > ``FTGADGET_*`` environment variable > config file > default.
Recognised variables: FTGADGET_BACKEND, FTGADGET_WORKERS, FTGADGET_SEED,
FTGADGET_MAX_COUNTEREXAMPLES, FTGADGET_OUT, FTGADGET_N_RANDOM.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import __version__
from .circuit import circuit_from_jsonl, circuit_to_jsonl
from .codes import (
    CodeFormatError,
    StabilizerCode,
    check_parity_property,
    load_code,
    restricted_parity_support,
    validate,
)
from .config import ConfigError, apply_overrides, effective_workers, load_run_config
from .faults import FaultEvent, enumerate_single_faults
from .gadgets import GadgetError, algebraic_identities, build, verify_logical_cz
from .statevector import CapacityError
from .tableau import BackendUnsupported, propagate_frame
from .verifier import (
    FIDELITY_TOL,
    BackendDisagreement,
    choose_backend,
    cross_check,
    run_ideal,
    tableau_ideal_check,
    verify_ft,
)

EXIT_OK, EXIT_ERROR, EXIT_PROPERTY = 0, 1, 2


def _out(msg: str = "") -> None:
    print(msg)


# ---------------------------------------------------------------------------
# codes


def cmd_codes(args) -> int:
    code = load_code(args.file)
    if args.action == "validate":
        rep = validate(code)
        _out(str(rep))
        return EXIT_OK if rep.valid else EXIT_PROPERTY
    if args.action == "parity":
        rep = check_parity_property(code)
        _out(f"code {code.name}: parity property {'holds' if rep.holds else 'FAILS'}")
        _out(f"  |0_L> support: {rep.zero_support} strings, |1_L> support: {rep.one_support} strings")
        for bit, s in rep.witnesses[: args.max_witnesses]:
            _out(f"  witness |{bit}_L> has {'odd' if bit == 0 else 'even'}-weight string {s}")
        return EXIT_OK if rep.holds else EXIT_PROPERTY
    # min-logical
    if not isinstance(code, StabilizerCode):
        _out(f"code {code.name}: minimum Z-type logical search needs a stabilizer code")
        return EXIT_ERROR
    res = restricted_parity_support(code)
    if res is None:
        _out(f"code {code.name}: no Z-type logical found")
        return EXIT_PROPERTY
    _out(f"code {code.name}: minimum-weight Z-type logical {res.operator.letters} (weight {res.weight})")
    _out(f"  support: {list(res.support)}  parity on support: {'holds' if res.parity_holds else 'fails'}")
    return EXIT_OK if res.parity_holds else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# gadget


def _run_config(args):
    cfg = load_run_config(args.config)
    flags = {
        "backend": args.backend,
        "workers": args.workers,
        "seed": args.seed,
        "max_counterexamples": args.max_counterexamples,
        "out": args.out,
    }
    return apply_overrides(cfg, flags)


def cmd_gadget(args) -> int:
    rc = _run_config(args)
    gcfg = rc.gadget_config()
    if args.action == "build":
        circ = build(gcfg)
        _out(f"# {gcfg.describe()}  width={circ.width}  locations={len(circ)}")
        _out(circ.text())
        _out("# counts: " + ", ".join(f"{k}={v}" for k, v in circ.counts().items()))
        for w in circ.meta.get("warnings", []):
            _out(f"# warning: {w}")
        if rc.out:
            Path(rc.out).write_text(circuit_to_jsonl(circ))
            _out(f"# circuit written to {rc.out}")
        return EXIT_OK
    if args.action == "faults":
        circ = build(gcfg)
        lines = [str(f) for f in enumerate_single_faults(circ, rc.fault_model())]
        text = "\n".join(lines) + "\n"
        if rc.out:
            Path(rc.out).write_text(text)
            _out(f"{len(lines)} faults written to {rc.out}")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.action == "run":
        circ = build(gcfg)
        backend = choose_backend(circ, rc.backend)
        if backend == "tableau":
            rows = tableau_ideal_check(circ, gcfg.kind)
            for r in rows:
                _out(f"{r['input']:<10s} records={r['records']} p={r['probability']:.3f} ok={r['ok']}")
            return EXIT_OK if all(r["ok"] for r in rows) else EXIT_PROPERTY
        rows = run_ideal(gcfg, rc.n_random, rc.seed)
        for r in rows:
            _out(f"{r['input']:<10s} records={r['records']} p={r['probability']:.4f} fidelity={r['fidelity']:.12f}")
        return EXIT_OK if all(r["fidelity"] >= 1 - FIDELITY_TOL for r in rows) else EXIT_PROPERTY
    if args.action == "cz":
        ok = verify_logical_cz(gcfg, n_random=rc.n_random, seed=rc.seed)
        _out(f"{gcfg.describe()}: coupling rounds {'act' if ok else 'do NOT act'} as logical CZ")
        return EXIT_OK if ok else EXIT_PROPERTY
    if args.action == "cross-check":
        try:
            rep = cross_check(gcfg, model=rc.fault_model(), n_random=rc.n_random, seed=rc.seed,
                              criterion=rc.ft_criterion())
        except BackendDisagreement as exc:
            _out(str(exc))
            return EXIT_PROPERTY
        _out(f"{gcfg.describe()}: statevector and tableau agree on {rep.agreements}/{rep.n_faults} faults")
        return EXIT_OK
    # verify
    rep = verify_ft(
        gcfg, rc.fault_model(), rc.ft_criterion(), backend=rc.backend,
        workers=effective_workers(rc.workers), seed=rc.seed, n_random=rc.n_random,
        max_counterexamples=rc.max_counterexamples, config_echo=rc.echo(),
    )
    _out(rep.text())
    if rc.out:
        out = Path(rc.out)
        out.write_text(rep.to_json())
        out.with_suffix(".txt").write_text(rep.text() + "\n")
        _out(f"report written to {out}")
    return EXIT_OK if rep.passed else EXIT_PROPERTY


def cmd_identities(args) -> int:
    rows = algebraic_identities(args.tol)
    for name, ok, detail in rows:
        _out(f"[{'PASS' if ok else 'FAIL'}] {name}  ({detail})")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# propagate


def cmd_propagate(args) -> int:
    circ = circuit_from_jsonl(Path(args.circuit).read_text())
    if not circ.is_clifford:
        _out("circuit is not Clifford; Pauli frames cannot track it (use `gadget verify --backend statevector`)")
        return EXIT_ERROR
    if args.fault in ("none", "identity", ""):
        frame, flips = "I" * circ.width, []
    else:
        f = propagate_frame(circ, FaultEvent.parse(args.fault))
        frame, flips = f.frame.letters, sorted(f.classical_flips)
    _out(f"frame: {frame}")
    nontrivial = [f"{c}{q}" for q, c in enumerate(frame) if c != "I"]
    _out(f"support: {' '.join(nontrivial) if nontrivial else '(empty)'}")
    _out(f"flipped records: {flips}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ftgadgets", description="Build and verify ancilla-based gate gadgets.")
    p.add_argument("--version", action="version", version=f"ftgadgets {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("codes", help="inspect a code file (or builtin:<name>)")
    pc.add_argument("action", choices=["validate", "parity", "min-logical"])
    pc.add_argument("file")
    pc.add_argument("--max-witnesses", type=int, default=4)
    pc.set_defaults(func=cmd_codes)

    pg = sub.add_parser("gadget", help="build, run or verify a gadget from a run config")
    pg.add_argument("action", choices=["build", "run", "verify", "faults", "cz", "cross-check"])
    pg.add_argument("--config", required=True)
    pg.add_argument("--backend", choices=["auto", "statevector", "tableau"])
    pg.add_argument("--workers", type=int)
    pg.add_argument("--seed", type=int)
    pg.add_argument("--max-counterexamples", type=int)
    pg.add_argument("--out")
    pg.set_defaults(func=cmd_gadget)

    pi = sub.add_parser("identities", help="check the 2x2 gate identities the gadgets rely on")
    pi.add_argument("--tol", type=float, default=1e-12)
    pi.set_defaults(func=cmd_identities)

    pp = sub.add_parser("propagate", help="push one fault through an exported circuit")
    pp.add_argument("--circuit", required=True)
    pp.add_argument("--fault", required=True, help="loc:q0,q1:PAULI, loc:flip or none")
    pp.set_defaults(func=cmd_propagate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except (CodeFormatError, ConfigError, GadgetError, BackendUnsupported, CapacityError,
            FileNotFoundError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
