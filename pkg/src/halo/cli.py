"""Command-line interface.

Exit status: 0 on success, 2 when an input violates a precondition, 3 when
the computed verdict is inconclusive.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import flat, hyperbolic, roof, words
from .numeric import contfrac
from .numeric.logmag import LogMagnitude
from .numeric.quadratic import QuadraticNumber, format_exact, parse_real

EXIT_OK, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 2, 3
FLOAT_TOL = "float±1e-12"

_EXACT_STR = re.compile(r"^-?\d+(/\d+)?$|^\(?-?\d*[+-]?\d*√\d+\)?(/\d+)?$")


class Inconclusive(Exception):
    pass


# -- exactness tags --------------------------------------------------------------


def _tag_of(v: Any) -> Optional[str]:
    if isinstance(v, bool) or v is None:
        return None
    if isinstance(v, int):
        return "exact"
    if isinstance(v, float):
        return FLOAT_TOL
    if isinstance(v, str) and _EXACT_STR.match(v):
        return "exact"
    if _is_log_domain(v):
        return "log-domain"
    if isinstance(v, list) and v:
        tags = {_tag_of(x) for x in v} - {None}
        if len(tags) == 1:
            return tags.pop()
        if tags:
            return "mixed"
    return None


def _is_log_domain(obj: Any) -> bool:
    return isinstance(obj, dict) and any(k in obj for k in ("ln_lower", "ln_upper", "ln_upper_negated"))


def tagged(obj: Any) -> Any:
    """Add a "<key>_tag" sibling to every numeric field of every object.
    Floats inside a log-domain enclosure are tagged "log-domain"."""
    if isinstance(obj, dict):
        inner = _is_log_domain(obj)
        out = {}
        for k, v in obj.items():
            out[k] = tagged(v)
            t = _tag_of(v)
            if inner and isinstance(v, float):
                t = "log-domain"
            if t is not None and not k.endswith("_tag") and f"{k}_tag" not in obj:
                out[f"{k}_tag"] = t
        return out
    if isinstance(obj, list):
        return [tagged(x) for x in obj]
    return obj


def _json(obj: Any) -> str:
    return json.dumps(tagged(obj), indent=2, ensure_ascii=False, default=_default)


def _default(o: Any) -> Any:
    if isinstance(o, (QuadraticNumber, Fraction)):
        return format_exact(o)
    if isinstance(o, LogMagnitude):
        return o.to_json()
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"not serializable: {type(o).__name__}")


# -- argument helpers ------------------------------------------------------------


def _ints(text: str) -> list[int]:
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        return list(range(int(m[1]), int(m[2]) + 1))
    return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _slope(args) -> Any:
    if getattr(args, "slope", None) is None:
        raise ValueError("--slope is required")
    return parse_real(args.slope)


def _cf_of(args) -> contfrac.ContinuedFraction:
    given = [x for x in (args.slope, args.digits, args.rule) if x]
    if len(given) != 1:
        raise ValueError("give exactly one of --slope, --digits, --rule")
    if args.slope:
        return contfrac.cf_expand(parse_real(args.slope))
    if args.digits:
        return contfrac.cf_from_digits(_ints(args.digits))
    return contfrac.well_approximated_cf(args.rule, _ints(args.prefix))


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        path = Path(out)
        if not path.is_absolute():
            path = Path(os.environ.get("HALO_OUTPUT_DIR", ".")) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- subcommands -----------------------------------------------------------------


def cmd_cf(args) -> int:
    cf = _cf_of(args)
    n = args.convergents
    out: dict[str, Any] = {"cf": cf.to_json(n + 1 if not cf.is_finite else None)}
    convs = contfrac.convergents(cf, n if not cf.is_finite else min(n, len(cf) - 1))
    out["convergents"] = [c.to_json() for c in convs]
    status = EXIT_OK
    if args.check_C:
        rep = contfrac.check_well_approximated(cf, _floats(args.check_C), k_max=args.k_max)
        out["well_approximated"] = rep.to_json()
    if args.se_d is not None:
        v = contfrac.is_in_SE_d(cf, args.se_d, args.k_max)
        out["se_d"] = v.to_json()
        if v.inconclusive:
            status = EXIT_INCONCLUSIVE
    if args.truncate is not None:
        out["truncated"] = contfrac.se_density_truncate(cf, args.truncate).to_json(args.truncate + 3)
    _emit(args, _json(out))
    return status


def cmd_word(args) -> int:
    theta = _slope(args)
    if args.cutting is not None:
        s = parse_real(args.start)
        letters = words.cutting_sequence(theta, s, args.cutting)
        _emit(args, _json({"letters": letters, "slope": format_exact(theta), "start": format_exact(s)}))
        return EXIT_OK
    if isinstance(theta, QuadraticNumber) and not theta.is_rational:
        if args.k is None:
            raise ValueError("irrational slopes need --k")
        w = words.theta_prefix(theta, args.k)
        _emit(args, _json({**w.to_json(), "letters": w.letters(), "k": args.k}))
        return EXIT_OK
    w = words.rational_word(Fraction(theta.a if isinstance(theta, QuadraticNumber) else theta), args.l1)
    _emit(args, _json({**w.to_json(), "letters": w.letters()}))
    return EXIT_OK


def cmd_admissible(args) -> int:
    theta = _slope(args)
    if args.blocks:
        w: Any = words.BlockWord(math.floor(theta), tuple(_ints(args.blocks)))
    elif args.letters is not None:
        w = args.letters
    else:
        raise ValueError("give --blocks or --letters")
    _emit(args, _json(words.is_admissible(w, theta).to_json()))
    return EXIT_OK


def cmd_inadmissible(args) -> int:
    theta = _slope(args)
    w = words.inadmissible_word(theta, args.k)
    _emit(args, _json(w.to_json()))
    return EXIT_OK


def cmd_exotic_ray(args) -> int:
    theta = _slope(args)
    ray = flat.assemble_exotic_ray(theta, _ints(args.indices), kappa=Fraction(args.kappa))
    if args.format == "csv":
        lines = ["n,d,alpha,epsilon"]
        for n, a in zip(ray.labels, ray.pieces):
            d = a.d if isinstance(a.d, float) else math.inf
            lines.append(f"{n},{d!r},{float(a.alpha)!r},{a.epsilon!r}")
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    out = {
        "labels": ray.labels,
        "convergent_indices": [a.k for a in ray.pieces],
        "total_measure_raw": format_exact(ray.total_raw),
        "total_measure": float(ray.total_measure),
        "measure_bound": format_exact(ray.measure_bound()),
        "below_bound": ray.total_measure.less_than(ray.measure_bound()) if ray.labels else True,
        "crossings": ray.crossings(),
        "markers": [str(m) for m in ray.markers()],
        "tail_windows_marked": ray.tail_windows_marked(),
    }
    if args.segments:
        out["segments"] = ray.polygon().to_json()
    _emit(args, _json(out))
    return EXIT_OK


def cmd_growth(args) -> int:
    if args.mode == "sweep":
        fol = flat.Foliation(float(parse_real(args.slope)) if args.slope else 2 ** 0.5, args.kappa)
        res = flat.crossing_rate_sweep(args.rays, fol, seed=args.seed)
        if args.format == "csv":
            _emit(args, "ray,rate\n" + "".join(f"{i},{r!r}\n" for i, r in enumerate(res.rates)))
        else:
            _emit(args, _json({"rays": res.n_rays, "mean_rate": res.mean_rate, "target": res.target,
                               "relative_error": res.relative_error, "seed": args.seed}))
        return EXIT_OK
    sub = flat.sublinear_ray(args.rule, args.T)
    series = flat.growth_series(sub.ray, sub.ray.fol, min(args.T, sub.ray.length), grid=args.grid)
    if args.format == "csv":
        _emit(args, series.to_csv())
    else:
        _emit(args, _json({"rule": sub.rule, "bounds": list(sub.bounds), "t0": sub.t0, "T": sub.T,
                           "d": sub.d[:50], "lipschitz": series.lipschitz, "certified": series.certified}))
    return EXIT_OK


def cmd_leaf_approx(args) -> int:
    ks = _ints(args.k)
    if args.slope:
        theta = _slope(args)
        seq = [flat.build_leaf_approx(theta, k, with_word=not args.no_words) for k in ks]
    elif args.rule:
        cf = contfrac.well_approximated_cf(args.rule, _ints(args.prefix))
        seq = [flat.leaf_approx_from_cf(cf, k) for k in ks]
    else:
        raise ValueError("give --slope or --rule")
    rep = flat.classify_cesag(seq, args.f)
    _emit(args, _json({"approximations": [a.to_json() for a in seq], "cesag": rep.to_json()}))
    return EXIT_INCONCLUSIVE if rep.verdict == "inconclusive" else EXIT_OK


def _schedule(args) -> roof.BendingSchedule:
    if args.schedule:
        return roof.schedule_from_csv(Path(args.schedule).read_text())
    if args.constant:
        a, d, e = _floats(args.constant)
        return roof.constant_schedule(a, d, e, args.steps)
    if args.rule:
        cf = contfrac.well_approximated_cf(args.rule, _ints(args.prefix))
        return roof.schedule_from_cf(cf, 2, args.steps + args.slack, length_scale=args.length_scale)
    raise ValueError("give --schedule, --constant or --rule")


def cmd_roof(args) -> int:
    sched = _schedule(args)
    sel = None if args.no_selector else "doubling"
    tr = roof.run_roof(sched, args.steps, selector=sel, mode=args.beta_mode, D=args.D, budget=args.budget)
    _emit(args, tr.to_csv() if args.format == "csv" else _json(tr.to_json()))
    return EXIT_INCONCLUSIVE if tr.verdict == "inconclusive" else EXIT_OK


def cmd_render(args) -> int:
    from . import render

    if args.what == "cutting":
        svg = render.cutting_svg(_slope(args), parse_real(args.start), args.n)
    else:
        sched = _schedule(args)
        tr = roof.run_roof(sched, args.steps, selector=None if args.no_selector else "doubling")
        svg = render.chain_svg([tr.r1] + [r.r for r in tr.records])
    _emit(args, svg)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json",)):
        sp.add_argument("--out", help="write here instead of stdout (relative to $HALO_OUTPUT_DIR)")
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("cf", help="expansion, convergents, growth checks")
    s.add_argument("--slope")
    s.add_argument("--digits")
    s.add_argument("--rule")
    s.add_argument("--prefix", default="1,1")
    s.add_argument("--convergents", type=int, default=6)
    s.add_argument("--check-C", dest="check_C")
    s.add_argument("--se-d", dest="se_d", type=int)
    s.add_argument("--k-max", dest="k_max", type=int, default=10)
    s.add_argument("--truncate", type=int)
    common(s)
    s.set_defaults(func=cmd_cf)

    s = sub.add_parser("word", help="rational word, prefix of an irrational leaf, or cutting sequence")
    s.add_argument("--slope", required=True)
    s.add_argument("--l1", type=int, default=1)
    s.add_argument("--k", type=int)
    s.add_argument("--cutting", type=int, metavar="N")
    s.add_argument("--start", default="1/3")
    common(s)
    s.set_defaults(func=cmd_word)

    s = sub.add_parser("admissible", help="decide admissibility with a witness")
    s.add_argument("--slope", required=True)
    s.add_argument("--blocks")
    s.add_argument("--letters")
    common(s)
    s.set_defaults(func=cmd_admissible)

    s = sub.add_parser("inadmissible", help="flipped extreme-start word")
    s.add_argument("--slope", required=True)
    s.add_argument("--k", type=int, required=True)
    common(s)
    s.set_defaults(func=cmd_inadmissible)

    s = sub.add_parser("exotic-ray", help="assemble a ray of finite transverse measure")
    s.add_argument("--slope", required=True)
    s.add_argument("--indices", default="1..20")
    s.add_argument("--kappa", default="1")
    s.add_argument("--segments", action="store_true")
    common(s, ("json", "csv"))
    s.set_defaults(func=cmd_exotic_ray)

    s = sub.add_parser("growth", help="random-direction sweep or sublinear ray")
    s.add_argument("--mode", choices=("sweep", "sublinear"), default="sweep")
    s.add_argument("--slope")
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--rays", type=int, default=10_000)
    s.add_argument("--rule", default="sqrt")
    s.add_argument("--T", type=float, default=1e5)
    s.add_argument("--grid", type=int, default=200)
    common(s, ("json", "csv"))
    s.set_defaults(func=cmd_growth)

    s = sub.add_parser("leaf-approx", help="leaf approximations and CESAG classification")
    s.add_argument("--slope")
    s.add_argument("--rule")
    s.add_argument("--prefix", default="1,1")
    s.add_argument("--k", default="2..6")
    s.add_argument("--f", default="exp:0.2")
    s.add_argument("--no-words", action="store_true")
    common(s)
    s.set_defaults(func=cmd_leaf_approx)

    def roof_args(s):
        s.add_argument("--schedule", help="CSV with columns n,d,alpha,epsilon")
        s.add_argument("--constant", help="alpha,d,epsilon")
        s.add_argument("--rule")
        s.add_argument("--prefix", default="1,1")
        s.add_argument("--steps", type=int, default=1000)
        s.add_argument("--slack", type=int, default=200)
        s.add_argument("--length-scale", dest="length_scale", type=float, default=1.0)
        s.add_argument("--no-selector", action="store_true")

    s = sub.add_parser("roof", help="support-plane radius recursion")
    roof_args(s)
    s.add_argument("--beta-mode", dest="beta_mode", choices=("equal", "capped", "custom"), default="equal")
    s.add_argument("--D", type=float, default=2.0)
    s.add_argument("--budget", type=int)
    common(s, ("json", "csv"))
    s.set_defaults(func=cmd_roof)

    s = sub.add_parser("render", help="SVG figures")
    s.add_argument("what", choices=("cutting", "chain"))
    s.add_argument("--slope")
    s.add_argument("--start", default="1/3")
    s.add_argument("--n", type=int, default=20)
    roof_args(s)
    common(s, ("svg",))
    s.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, ArithmeticError, OverflowError, FileNotFoundError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
