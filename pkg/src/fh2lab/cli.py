"""Command-line front end.

Every subcommand prints one JSON document::

    {"result": ..., "seed": ..., "parameters": {...}, "version": ..., "generator": ...}

plus a ``timestamp`` unless ``--deterministic`` is given.  Exit status is 0 on
success, 2 on invalid input or a missing file and 3 when a resource cap
refuses the job.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from . import marginal as _marginal
from . import pdd as _pdd
from . import postselect as _post
from .circuit import BitString, as_bitstring, read_circuit, serialize_circuit, write_circuit
from .errors import ResourceLimitError
from .pathsum import chernoff_T, prob_estimate, prob_exact
from .rng import GENERATOR_ID, derive_seed
from .statevector import ZERO_PROBABILITY, simulate

SEED_LIMIT = 1 << 64


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positions(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _rel(path: str, start: str) -> str:
    return os.path.relpath(os.path.abspath(path), os.path.abspath(start))


# --------------------------------------------------------------------------
# subcommands; each returns the result payload

def cmd_sim(args):
    c = read_circuit(args.circuit)
    psi = simulate(c)
    probs = psi.probabilities()
    result = {"width": c.width, "family": c.family,
              "probabilities": {str(BitString.from_int(i, c.width)): float(p)
                                for i, p in enumerate(probs) if p > ZERO_PROBABILITY}}
    if args.amplitudes:
        result["amplitudes"] = [[float(a.real), float(a.imag)] for a in psi.amplitudes]
    return result


def cmd_prob(args):
    c = read_circuit(args.circuit)
    return {"p": prob_exact(c, as_bitstring(args.z, c.width))}


def cmd_estimate(args):
    c = read_circuit(args.circuit)
    plan = chernoff_T(args.epsilon, args.delta)
    est = prob_estimate(c, as_bitstring(args.z, c.width), plan, args.seed, args.threads)
    return {"p": est.value, "imag": est.imag, "epsilon": est.epsilon,
            "confidence": est.confidence, "T": est.T, "estimator_seed": est.seed}


def cmd_marginal(args):
    c = read_circuit(args.circuit)
    samples, q, est = _marginal.sample_marginal(
        c, args.k, args.r, args.samples, args.seed, positions=args.positions, m=args.m,
        delta=args.delta, budget=args.budget, threads=args.threads)
    if not args.table:
        return [str(z) for z in samples]
    return {"q": q.as_floats(), "p_tilde": est.table, "positions": list(est.positions),
            "epsilon": est.epsilon, "T": est.T, "samples": [str(z) for z in samples]}


def cmd_compile(args):
    comp = _post.compile(read_circuit(args.circuit))
    circuit_text = serialize_circuit(comp.circuit)
    sidecar_text = _post.serialize_sidecar(comp)
    result = {"h": comp.h, "n": comp.n, "width": comp.width, "outputs": list(comp.outputs),
              "success_probability": _post.analytic_postselection_probability(comp)}
    if args.out:
        write_circuit(comp.circuit, args.out)
        with open(args.out + ".post", "w", encoding="utf-8") as fh:
            fh.write(sidecar_text)
        result["files"] = [args.out, args.out + ".post"]
    else:
        result["circuit"] = circuit_text
        result["sidecar"] = sidecar_text
    return result


def cmd_paths(args):
    c = read_circuit(args.circuit)
    uprime = c if args.no_append else _post.append_hadamard_layer(c)
    if args.y is not None:
        out = _post.enumerate_path(uprime, args.y)
        return {"s": out.s, "z": str(out.z)}
    outcomes = _post.path_outcomes(uprime)
    state = _post.reconstruct_state(uprime)
    return {"h": uprime.hadamard_count(),
            "paths": [{"y": str(o.y), "s": o.s, "z": str(o.z)} for o in outcomes],
            "state": [[float(a.real), float(a.imag)] for a in state.amplitudes]}


def cmd_pdd_make(args):
    u1, u2 = read_circuit(args.u1), read_circuit(args.u2)
    inst = _pdd.make_instance(u1, u2, args.a, args.b, args.min_gap)
    base = os.path.dirname(os.path.abspath(args.out)) if args.out else os.getcwd()
    doc = _pdd.instance_document(_rel(args.u1, base), _rel(args.u2, base), inst.a, inst.b)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return {"instance": doc, "families": list(inst.families), "width": inst.width,
            "threshold": inst.threshold}


def _trials(args, run):
    if args.trials == 1:
        return run(args.seed).to_dict()
    accepted = sum(run(derive_seed(args.seed, "trial", i)).accepted for i in range(args.trials))
    return {"trials": args.trials, "accepted": accepted, "frequency": accepted / args.trials,
            "trial_seeds": "derive_seed(seed, 'trial', i)"}


def cmd_pdd_merlin(args):
    inst = _pdd.load_instance(args.instance)
    s, z = _pdd.honest_merlin_draw(inst, args.seed)
    return {"z": str(z), "coin": s}


def cmd_pdd_arthur(args):
    inst = _pdd.load_instance(args.instance)
    return _pdd.arthur_verify(inst, args.z, args.k, args.seed, args.threads).to_dict()


def cmd_pdd_run(args):
    inst = _pdd.load_instance(args.instance)
    out = _trials(args, lambda s: _pdd.run_ma(inst, args.k, s, args.threads))
    out.update(alpha=_pdd.completeness_bound(inst.a, args.k), beta=_pdd.soundness_bound(args.k))
    return out


def cmd_pdd_decide(args):
    inst = _pdd.load_instance(args.instance)
    out = _trials(args, lambda s: _pdd.bqp_decider(inst, args.k, s))
    out.update(alpha=_pdd.completeness_bound(inst.a, args.k), beta=_pdd.soundness_bound(args.k))
    return out


def cmd_pdd_reduce(args):
    inst = _pdd.bqp_reduction(read_circuit(args.circuit), args.r, args.m)
    os.makedirs(args.out_dir, exist_ok=True)
    write_circuit(inst.u1, os.path.join(args.out_dir, "u1.gen"))
    write_circuit(inst.u2, os.path.join(args.out_dir, "u2.gen"))
    doc = _pdd.instance_document("u1.gen", "u2.gen", inst.a, inst.b)
    with open(os.path.join(args.out_dir, "instance.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"a": inst.a, "b": inst.b, "width": inst.width, "instance": doc}


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="unsigned 64-bit seed (default 0)")
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: FH2LAB_THREADS or 1)")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp")

    p = argparse.ArgumentParser(prog="fh2lab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("sim", cmd_sim, "statevector simulation and output distribution")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--amplitudes", action="store_true")

    sp = add("prob", cmd_prob, "exact path-sum probability")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--z", required=True)

    sp = add("estimate", cmd_estimate, "Monte-Carlo path-sum estimate")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--epsilon", type=float, default=0.02)
    sp.add_argument("--delta", type=float, default=0.01)

    sp = add("marginal", cmd_marginal, "sample a few-qubit marginal")
    sp.add_argument("--circuit", required=True)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--k", type=_positive)
    grp.add_argument("--positions", type=_positions, help="comma-separated positions")
    sp.add_argument("--r", type=_positive, default=10)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--m", type=_positive, default=_marginal.DEFAULT_PRECISION)
    sp.add_argument("--delta", type=float, default=_marginal.DEFAULT_DELTA)
    sp.add_argument("--budget", type=int, default=_marginal.DEFAULT_BUDGET)
    sp.add_argument("--table", action="store_true", help="emit the q-table as JSON")

    sp = add("compile", cmd_compile, "compile to HC1Q with postselection")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--out", help="write the circuit here and the sidecar to OUT.post")

    sp = add("paths", cmd_paths, "nondeterministic path trace")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--y")
    sp.add_argument("--no-append", action="store_true",
                    help="the circuit already ends with its H layer")

    sp = add("pdd-make", cmd_pdd_make, "validate and write a PDD-Max instance")
    sp.add_argument("--u1", required=True)
    sp.add_argument("--u2", required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--min-gap", type=float, default=0.0)
    sp.add_argument("--out")

    sp = add("pdd-merlin", cmd_pdd_merlin, "honest Merlin's witness")
    sp.add_argument("--instance", required=True)

    sp = add("pdd-arthur", cmd_pdd_arthur, "Arthur's classical check of a witness")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--k", type=_positive, required=True)

    for name, fn, help_ in (("pdd-run", cmd_pdd_run, "Merlin-Arthur protocol"),
                            ("pdd-decide", cmd_pdd_decide, "measurement-based decider")):
        sp = add(name, fn, help_)
        sp.add_argument("--instance", required=True)
        sp.add_argument("--k", type=_positive, required=True)
        sp.add_argument("--trials", type=_positive, default=1)

    sp = add("pdd-reduce", cmd_pdd_reduce, "reduce an acceptance problem to PDD-Max")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--r", type=_positive, required=True)
    sp.add_argument("--m", type=_positive, required=True)
    sp.add_argument("--out-dir", required=True)
    return p


def _document(args, result) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "deterministic")}
    doc = {"result": result, "seed": args.seed, "parameters": params,
           "version": __version__, "generator": GENERATOR_ID}
    if not args.deterministic:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    return doc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except ResourceLimitError as exc:
        print(f"fh2lab: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"fh2lab: {exc}", file=sys.stderr)
        return 2
    if args.command == "marginal" and not args.table:
        sys.stdout.write("".join(z + "\n" for z in result))
        return 0
    json.dump(_document(args, result), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
