"""Command-line entry point.

Exit codes: 0 success, 1 experiment below its success floor, 2 usage error,
3 self-test failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (ConfigError, ExperimentConfig, fa_report, run_attack_experiment,
                          run_prob_curve)
from .selftest import run_checks

EXIT_OK, EXIT_BELOW, EXIT_USAGE, EXIT_SELFTEST = 0, 1, 2, 3

HELP = {
    "attack-otr": "existential forgery on OTR, d = 5 ciphertexts",
    "attack-otr-d4": "existential forgery on OTR, d = 4 ciphertexts",
    "attack-prost": "key recovery and universal forgery on Prost-OTR-EM",
    "simon-demo": "period recovery on planted 2-to-1 functions",
}

ATTACK_COMMANDS = {
    "attack-otr": "otr",
    "attack-otr-d4": "otr-d4",
    "attack-prost": "prost",
    "simon-demo": "simon-demo",
}

# key=value config file keys -> (dest, type)
CONFIG_KEYS = {
    "bits": ("bits", str), "blocks": ("blocks", int), "trials": ("trials", int),
    "c": ("c", str), "seed": ("seed", str), "poly": ("poly", str), "out": ("out", str),
    "retries": ("retries", int), "first-trial": ("first_trial", int),
    "forge-messages": ("forge_messages", int), "floor": ("floor", float),
    "timing": ("timing", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
}


def _int(text: str) -> int:
    return int(str(text), 0)


def _int_list(text: str) -> list[int]:
    return [_int(t) for t in str(text).split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t.strip()]


def read_config(path: str) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (p.strip() for p in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            dest, conv = CONFIG_KEYS[key]
            try:
                values[dest] = conv(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="otrsimon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lists=False):
        sp.add_argument("--config", help="key=value file; flags override it")
        sp.add_argument("--bits", help="block width n" + (" (comma list)" if lists else ""))
        sp.add_argument("--c", help="query budget factor c, budget ceil(c*n)" + (" (comma list)" if lists else ""))
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", help="master seed (decimal or 0x hex)")
        sp.add_argument("--out", help="CSV output path (default: stdout)")

    for name in ATTACK_COMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        common(sp)
        sp.add_argument("--blocks", type=int, help="message length d in blocks")
        sp.add_argument("--poly", help="reduction polynomial, e.g. 0x11b")
        sp.add_argument("--retries", type=int)
        sp.add_argument("--first-trial", type=int, dest="first_trial")
        sp.add_argument("--forge-messages", type=int, dest="forge_messages")
        sp.add_argument("--floor", type=float, help="success-rate floor for exit code 1")
        sp.add_argument("--timing", action="store_const", const=True, default=None,
                        help="write wall-clock millis (output is then not reproducible)")

    sp = sub.add_parser("prob-curve", help="success bound over (n, c), with live rates for small n")
    common(sp, lists=True)

    sp = sub.add_parser("fa-verdict", help="exhaustive period scan of f_a on random instances")
    common(sp)

    sub.add_parser("selftest", help="fast internal consistency checks")
    return p


def _merged(args) -> dict:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command"):
            values[k] = v
    return values


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    if args.command == "selftest":
        return EXIT_OK if run_checks(sys.stdout, sys.stderr) else EXIT_SELFTEST

    try:
        v = _merged(args)
        if args.command == "prob-curve":
            text = run_prob_curve(_int_list(v.get("bits", "8,16,32,64,128")),
                                  _float_list(v.get("c", "1,1.5,2,2.5,3,3.5,4,5,6")),
                                  None, v.get("trials", 100), _int(v.get("seed", 0)))
            _write(text, v.get("out"))
            return EXIT_OK
        if args.command == "fa-verdict":
            lines = fa_report(_int(v.get("bits", 8)), v.get("trials", 100), _int(v.get("seed", 0)))
            with_period = sum("periods=none" not in ln for ln in lines)
            total = len(lines)
            odd5 = sum("odd_swap_forgery_d5=yes" in ln for ln in lines)
            odd4 = sum("odd_swap_forgery_d4=yes" in ln for ln in lines)
            lines.append(f"odd-position swap forgery verifies on {odd5}/{total} (d=5) and {odd4}/{total} (d=4)")
            lines.append(f"f_a has a period on {with_period}/{total} instances")
            _write("\n".join(lines) + "\n", v.get("out"))
            return EXIT_OK
        cfg = ExperimentConfig(
            attack=ATTACK_COMMANDS[args.command],
            n=_int(v.get("bits", 8)),
            d=v.get("blocks"),
            trials=v.get("trials", 100),
            c_factor=float(v.get("c", 4.0)),
            seed=_int(v.get("seed", 0)),
            poly=_int(v["poly"]) if v.get("poly") else None,
            output=v.get("out"),
            first_trial=v.get("first_trial", 0),
            retries=v.get("retries", 3),
            forge_messages=v.get("forge_messages", 100),
            timing=bool(v.get("timing", False)),
            floor=v.get("floor"),
        )
    except (ConfigError, ValueError, OSError) as exc:
        print(f"otrsimon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    summary, text = run_attack_experiment(cfg)
    _write(text, cfg.output)
    print(summary.text(), file=sys.stderr)
    return EXIT_OK if summary.passed else EXIT_BELOW


if __name__ == "__main__":
    sys.exit(main())
