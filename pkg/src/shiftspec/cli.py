"""Command line interface.

Exit codes: 0 decided, 2 input error (including a refused witness request),
3 Unknown verdict or exhausted budget, 4 internal invariant failure.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Optional

import click

from shiftspec import builtins as bi
from shiftspec import fort, oracle, specification, strobo
from shiftspec.config import ConfigError, SystemConfig, load_path, parse_sequence_arg
from shiftspec.errors import BudgetError, InvariantError, PreconditionError, ShiftSpecError
from shiftspec.index_maps import sort_key
from shiftspec.verdicts import Conjunction, Verdict

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_INVARIANT = 0, 2, 3, 4


class Refusal(ShiftSpecError):
    """A witness was requested for a property that was decided No."""


def _jsonable(obj):
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return {"type": type(obj).__name__, **{k: _jsonable(v) for k, v in asdict(obj).items()}}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=sort_key) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    return obj


def _verdict_json(v: Verdict) -> dict:
    return {"value": v.value.value, "certificate": _jsonable(v.certificate)}


def _certificate_text(v) -> str:
    cert = v.certificate if isinstance(v, Verdict) else v
    if isinstance(cert, Conjunction):
        return " and ".join(_certificate_text(p) for p in cert.parts)
    fields = ", ".join(f"{k}={val!r}" for k, val in asdict(cert).items()) if is_dataclass(cert) else str(cert)
    return f"{type(cert).__name__}({fields})"


def guarded(fn):
    """Map library exceptions onto exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, PreconditionError, Refusal, KeyError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except BudgetError as exc:
            click.echo(f"unknown: {exc}", err=True)
            sys.exit(EXIT_UNKNOWN)
        except (InvariantError, AssertionError) as exc:
            click.echo(f"internal invariant failed: {exc}", err=True)
            sys.exit(EXIT_INVARIANT)
        except ShiftSpecError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _load(ctx, target: str) -> SystemConfig:
    if target.startswith("builtin:"):
        name = target.split(":", 1)[1]
        if name not in bi.DIAGRAM:
            raise ConfigError(f"unknown builtin {name!r}; choose from {', '.join(sorted(bi.DIAGRAM))}")
        cfg = bi.builtin_config(name)
    else:
        cfg = load_path(target)
    budget = ctx.obj.get("budget")
    return cfg.with_budget(magnitude=budget) if budget else cfg


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized checks.")
@click.option("--budget", type=click.IntRange(min=1), default=None, help="Magnitude budget B for integer searches.")
@click.pass_context
def main(ctx, seed: int, budget: Optional[int]):
    """Decide specification and stroboscopical properties of generalized
    shifts and Fort-space systems, and build their witnesses."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, budget=budget)


# ---------------------------------------------------------------------------
# analyze


@main.command()
@click.argument("target")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
@guarded
def analyze(ctx, target: str, as_json: bool):
    """Print verdicts for TARGET (a config path or builtin:NAME)."""
    cfg = _load(ctx, target)
    verdicts = bi.verdicts_for(cfg)
    extra = {}
    if cfg.is_fort:
        sys_ = cfg.fort_system()
        verdicts = {"continuity": fort.validate_continuity(sys_), **verdicts}
        if verdicts["continuity"].is_yes:
            img, _ = fort.eventual_image(sys_)
            extra["eventual_image"] = img.describe() if img is not None else "unknown"
    if cfg.name in bi.DIAGRAM:
        computed = {k: (None if v.is_unknown else v.is_yes) for k, v in verdicts.items() if k in bi.PROPERTIES}
        diff = bi.discrepancies({cfg.name: computed})
        if diff:
            extra["discrepancy"] = {k: {"computed": c, "diagram": d} for k, (c, d) in diff[cfg.name].items()}
    if as_json:
        doc = {
            "system": cfg.name or target,
            "kind": cfg.kind,
            "verdicts": {k: _verdict_json(v) for k, v in verdicts.items()},
            **extra,
        }
        click.echo(json.dumps(doc, indent=2))
    else:
        label = cfg.name or target
        desc = bi.DESCRIPTIONS.get(cfg.name, "")
        click.echo(f"system: {label} ({cfg.kind.replace('_', ' ')}{', ' + desc if desc else ''})")
        for k, v in verdicts.items():
            click.echo(f"  {k:<14} {v.value.value:<8} {_certificate_text(v)}")
        if "eventual_image" in extra:
            click.echo(f"  eventual image: {extra['eventual_image']}")
        for k, cd in extra.get("discrepancy", {}).items():
            click.echo(f"  DISCREPANCY {k}: computed {cd['computed']}, diagram {cd['diagram']}")
    if any(v.is_unknown for v in verdicts.values()):
        sys.exit(EXIT_UNKNOWN)


# ---------------------------------------------------------------------------
# witness


def _require_yes(v: Verdict, what: str) -> None:
    if v.is_unknown:
        raise BudgetError(f"{what} is Unknown: {_certificate_text(v)}")
    if v.is_no:
        raise Refusal(f"{what} does not hold; certificate {_certificate_text(v)}")


def _trace_shift(cfg: SystemConfig, instance_path: Optional[str]) -> dict:
    inst, fill = cfg.instance, cfg.fill
    if instance_path:
        other = load_path(instance_path) if not instance_path.startswith("builtin:") else bi.builtin_config(instance_path[8:])
        inst, fill = other.instance, other.fill
    if inst is None:
        raise ConfigError("no [instance] block in the config; pass --instance")
    if len(inst.segments) > 1:
        _require_yes(specification.decide_weak_spec(cfg.map), "weak specification")
    report = specification.build_tracing_point(cfg.map, inst, fill)
    independent = specification.verify_tracer(cfg.map, inst, report.tracer)
    support = oracle.relevant_coordinates(cfg.map, inst)
    found = None
    if inst.alphabet.size ** len(support) <= 2**16:
        found = oracle.exhaustive_tracer_search(cfg.map, inst, support, fill) is not None
    return {
        "kind": "trace",
        "gap_bound": report.gap_bound_used,
        "degenerate": report.degenerate,
        "tracer": {"default": report.tracer.default, "overrides": _jsonable(list(report.tracer.overrides))},
        "assigned": _jsonable(sorted(report.assigned.items(), key=lambda kv: sort_key(kv[0]))),
        "checks": [{"segment": s, "time": t, "ok": ok} for s, t, ok in report.checks],
        "verified": report.accepted and independent and found is not False,
        "oracle_found_tracer": found,
    }


def _rho_summary(rho: strobo.RhoMap) -> dict:
    doc = {
        "rho_kind": rho.kind,
        "threshold": rho.threshold,
        "bound": rho.bound,
        "subsequence_head": list(rho.subsequence[:20]),
        "subsequence_length": len(rho.subsequence),
    }
    if rho.residues is not None:
        doc["residues"] = {str(m): f for m, f in rho.residues.f.items()}
    if rho.periodic:
        doc["cycles"] = [{"cycle": _jsonable(c.cycle), "period": c.period} for c in rho.periodic]
    if rho.chains:
        doc["chains"] = [{"anchor": c.anchor, "type": c.kind} for c in rho.chains]
        doc["offsets"] = _jsonable(rho.offsets)
    if rho.parts:
        doc["parts"] = [_rho_summary(p) for p in rho.parts]
    return doc


def _rho_shift(cfg: SystemConfig, seq: strobo.SequenceSpec, seed: int) -> dict:
    _require_yes(strobo.decide_strobo(cfg.map), "injectivity (stroboscopical property)")
    window = cfg.window or (0,)
    rho = strobo.build_rho(cfg.map, seq, window)
    conv = strobo.verify_uniform_convergence(cfg.map, rho, seq, window, trials=50, seed=seed)
    return {
        "kind": "rho",
        "window": _jsonable(list(window)),
        **_rho_summary(rho),
        "guarantee_holds": strobo.verify_guarantee(rho),
        "convergence_verified": bool(conv),
        "configurations_checked": conv.checked,
        "verified": bool(conv) and strobo.verify_guarantee(rho),
    }


def _trace_fort(cfg: SystemConfig) -> dict:
    sys_ = cfg.fort_system()
    _require_yes(fort.decide_fort_weak_spec(sys_), "weak specification")
    window = [w for w in (cfg.window or ()) if w != sys_.b] or None
    m = fort.fort_gap_constant(sys_, window)
    return {"kind": "trace", "gap_constant": m, "window": window, "verified": fort.check_fort_gap(sys_, window, m)}


def _rho_fort(cfg: SystemConfig, seq: strobo.SequenceSpec) -> dict:
    sys_ = cfg.fort_system()
    _require_yes(fort.decide_fort_strobo(sys_), "every point periodic (stroboscopical property)")
    window = [w for w in (cfg.window or ()) if w != sys_.b]
    rho = fort.build_fort_rho(sys_, seq, window)
    return {
        "kind": "rho",
        "window": _jsonable(window),
        "N": rho.N,
        "threshold": rho.threshold,
        "periods": _jsonable(rho.periods),
        "residues": {str(t): rho.residues.f[t] % t for t in rho.residues.f},
        "subsequence_head": list(rho.subsequence[:20]),
        "verified": fort.verify_fort_rho(rho),
    }


@main.command()
@click.argument("target")
@click.option("--kind", type=click.Choice(["trace", "rho"]), required=True)
@click.option("--instance", "instance_path", default=None, help="Config file whose [instance] block to trace.")
@click.option("--sequence", default=None, help="naturals[:prefix] | arithmetic:start:step[:prefix] | explicit:1,4,9")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the witness JSON here.")
@click.pass_context
@guarded
def witness(ctx, target: str, kind: str, instance_path, sequence, out):
    """Build and verify a witness for TARGET."""
    cfg = _load(ctx, target)
    seq = parse_sequence_arg(sequence) if sequence else (cfg.sequence or strobo.SequenceSpec.naturals())
    if cfg.is_fort:
        doc = _trace_fort(cfg) if kind == "trace" else _rho_fort(cfg, seq)
    else:
        doc = _trace_shift(cfg, instance_path) if kind == "trace" else _rho_shift(cfg, seq, ctx.obj["seed"])
    doc = {"system": cfg.name or target, **doc}
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"witness written to {out}; verified={doc['verified']}")
    else:
        click.echo(text)
    if not doc["verified"]:
        raise InvariantError("constructed witness failed verification")


# ---------------------------------------------------------------------------
# table-a


CRITERIA = [
    ("(almost) weak specification", "Per(phi) is empty", "eventual image of h is a singleton"),
    ("(uniform) stroboscopical", "phi is one-to-one", "Per(h) = F"),
    ("specification / strongly stroboscopical", "phi is one-to-one and Per(phi) is empty", "F = {b}"),
]
_ROW_KEYS = [("weak_spec",), ("strobo",), ("spec", "strong_strobo")]


@main.command("table-a")
@click.option("--json", "as_json", is_flag=True)
@click.option("--no-builtins", is_flag=True, help="Print the criteria only.")
@guarded
def table_a(as_json: bool, no_builtins: bool):
    """Criteria per property with the builtin systems classified."""
    cls = {} if no_builtins else bi.classify_all()
    disc = bi.discrepancies(cls)
    rows = []
    for (prop, shift_c, fort_c), keys in zip(CRITERIA, _ROW_KEYS):
        have = [n for n, row in cls.items() if all(row[k] for k in keys)]
        rows.append({"property": prop, "generalized_shift": shift_c, "fort": fort_c, "builtins_with_property": have})
    if as_json:
        doc = {
            "rows": rows,
            "builtins": {
                n: {**row, "diagram": bi.DIAGRAM[n], "discrepancy": n in disc} for n, row in cls.items()
            },
        }
        click.echo(json.dumps(doc, indent=2))
        return
    w = (42, 42, 36)
    click.echo(f"{'property':<{w[0]}} {'generalized shift':<{w[1]}} {'Fort space':<{w[2]}}")
    click.echo("-" * (sum(w) + 2))
    for r in rows:
        click.echo(f"{r['property']:<{w[0]}} {r['generalized_shift']:<{w[1]}} {r['fort']:<{w[2]}}")
        if r["builtins_with_property"]:
            click.echo(f"{'':<{w[0]}} exhibited by: {', '.join(r['builtins_with_property'])}")
    if not cls:
        return
    click.echo("")
    yn = {True: "yes", False: "no", None: "?"}
    click.echo(f"{'system':<8}{'weak spec':<11}{'strobo':<9}{'spec':<7}{'strong':<9}note")
    for n, row in cls.items():
        note = ""
        if n in disc:
            parts = [f"{k}: computed {yn[c]}, diagram {yn[d]}" for k, (c, d) in disc[n].items()]
            note = "DISCREPANCY (" + "; ".join(parts) + ")"
        if "eventual_image" in row:
            note = (note + " " if note else "") + f"eventual image {row['eventual_image']}"
        click.echo(
            f"{n:<8}{yn[row['weak_spec']]:<11}{yn[row['strobo']]:<9}{yn[row['spec']]:<7}{yn[row['strong_strobo']]:<9}{note}"
        )


# ---------------------------------------------------------------------------
# crosscheck


@main.command()
@click.option("--atoms", type=click.IntRange(1, 5), default=4, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
@guarded
def crosscheck(ctx, atoms: int, as_json: bool):
    """Compare decisions, witnesses and brute-force oracles on small systems."""
    report = oracle.crosscheck(atoms, seed=ctx.obj["seed"])
    if as_json:
        click.echo(json.dumps({
            "checked": report.checked,
            "disagreements": report.disagreements,
            "notes": report.notes,
            "counts": report.counts,
        }, indent=2))
    else:
        click.echo(f"checks run: {report.checked}")
        for k, v in report.counts.items():
            click.echo(f"  {k}: {v}")
        for note in report.notes:
            click.echo(f"note: {note}")
        click.echo(f"disagreements: {len(report.disagreements)}")
        for d in report.disagreements:
            click.echo(f"  {d}")
    if not report.ok:
        sys.exit(EXIT_INVARIANT)


if __name__ == "__main__":
    main()
