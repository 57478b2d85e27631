"""Command-line surface: tables, ground states, verification suites.

    fplrs enumerate   --n 4 --sign + [--out psi4.json] [--threads K]
    fplrs groundstate --n 4 [--out gs4.json]
    fplrs verify <rs|wieland|orbits|identities|tl|gyration-general>
                 [--n-max N] [--format csv] [--seed S]
    fplrs orbit-report --n 4 [--out orbits.csv]

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 resource limit (size above the default cap without --allow-large).

Results are cached when a cache directory is configured (--cache-dir or
FPLRS_CACHE_DIR); entries are keyed by command, parameters and package
version, payloads are checksummed, and writes go through a temp file
and rename so concurrent runs cannot corrupt each other.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import FplrsError
from .fplcore import (
    asm_count_formula,
    enumerate_configs,
    link_data,
    plaquette_indicator,
    refined_counts,
)
from .gyration import (
    apply_h,
    generalized_gyration_check,
    orbit_partition,
    pair_link_data,
    square_rotation_direction,
)
from .groundstate import stationary_vector, verify_rs
from .identities import (
    run_identity_suite,
    shat_c_rectangle,
)
from .lattice import build_square, glue_and_gamma
from .linkpat import (
    LinkPattern,
    all_patterns,
    add_a,
    close_c,
    lp_vector_to_json,
    rotate,
    rotation_class_of,
    tl_e,
)
from .sampling import random_glueable

DEFAULT_MAX_N = 7
SUITES = ("rs", "wieland", "orbits", "identities", "tl", "gyration-general")


# ---------------------------------------------------------------------------
# Cache


@dataclass(frozen=True)
class CacheEntry:
    key: str
    payload_path: Path
    checksum: str


class Cache:
    """Content-addressed JSON payload store with atomic writes."""

    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)

    def _paths(self, key: str) -> tuple[Path, Path]:
        digest = hashlib.sha256(key.encode()).hexdigest()[:24]
        return self.root / f"{digest}.json", self.root / f"{digest}.meta"

    def get(self, key: str) -> str | None:
        payload_path, meta_path = self._paths(key)
        if not payload_path.exists() or not meta_path.exists():
            return None
        meta = json.loads(meta_path.read_text())
        entry = CacheEntry(meta["key"], payload_path, meta["checksum"])
        if entry.key != key:
            return None
        text = payload_path.read_text()
        if hashlib.sha256(text.encode()).hexdigest() != entry.checksum:
            return None
        return text

    def put(self, key: str, text: str) -> CacheEntry:
        payload_path, meta_path = self._paths(key)
        checksum = hashlib.sha256(text.encode()).hexdigest()
        for path, body in (
            (payload_path, text),
            (meta_path, json.dumps({"key": key, "checksum": checksum})),
        ):
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_text(body)
            os.replace(tmp, path)
        return CacheEntry(key, payload_path, checksum)


def _cache_from(args) -> Cache | None:
    root = args.cache_dir or os.environ.get("FPLRS_CACHE_DIR")
    return Cache(Path(root)) if root else None


def _cache_key(command: str, **params) -> str:
    body = json.dumps(params, sort_keys=True)
    return f"{command}:{__version__}:{body}"


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# Check lines shared by the verify suites


@dataclass(frozen=True)
class CheckLine:
    suite: str
    check: str
    status: bool
    detail: str = ""


def _report(lines: list[CheckLine], fmt: str, out: str | None) -> int:
    ok = all(line.status for line in lines)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["suite", "check", "status", "detail"])
        for line in lines:
            writer.writerow(
                [line.suite, line.check, "pass" if line.status else "fail", line.detail]
            )
        _emit(buf.getvalue(), out)
    else:
        chunks = [
            f"[{'PASS' if line.status else 'FAIL'}] {line.suite}: {line.check}"
            + (f" ({line.detail})" if line.detail else "")
            for line in lines
        ]
        chunks.append(
            f"{'OK' if ok else 'FAILED'}: {sum(l.status for l in lines)}/{len(lines)} checks passed"
        )
        _emit("\n".join(chunks), out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Suites


def _suite_rs(n_max: int) -> list[CheckLine]:
    lines = []
    for n in range(1, n_max + 1):
        r = verify_rs(n)
        lines.append(
            CheckLine(
                "rs",
                f"(H-2n) kills the count vector, n={n}",
                r.rs_is_zero,
                r.first_violation,
            )
        )
        lines.append(
            CheckLine("rs", f"kernel equals counts, n={n}", r.kernel_matches_counts)
        )
        lines.append(
            CheckLine(
                "rs",
                f"component sum, n={n}",
                r.total == r.expected_total,
                f"{r.total} vs {r.expected_total}",
            )
        )
    return lines


def _suite_wieland(n_max: int) -> list[CheckLine]:
    lines = []
    for n in range(1, n_max + 1):
        plus = refined_counts(n, "+")
        minus = refined_counts(n, "-")
        lines.append(
            CheckLine("wieland", f"plus table equals minus table, n={n}", plus.counts == minus.counts)
        )
        rotated = {
            rotate(LinkPattern.from_word(w), 1).word: v for w, v in plus.counts.items()
        }
        lines.append(
            CheckLine("wieland", f"table invariant under rotation, n={n}", rotated == plus.counts)
        )
    k = square_rotation_direction()
    lines.append(
        CheckLine("wieland", f"gyration rotates patterns by R^{k}", k in (1, -1))
    )
    return lines


def _suite_orbits(n_max: int) -> list[CheckLine]:
    lines = []
    for n in range(1, n_max + 1):
        d, _t = build_square(n, "+")
        orbits = orbit_partition(n)
        total = sum(o.period for o in orbits)
        lines.append(
            CheckLine(
                "orbits",
                f"orbits partition the ensemble, n={n}",
                total == asm_count_formula(n),
                f"{len(orbits)} orbits, {total} configs",
            )
        )
        bad_sum = 0
        class_sums: dict[tuple[str, tuple[int, int]], int] = {}
        class_pm: dict[tuple[str, tuple[int, int]], list[int]] = {}
        coherent = True
        for o in orbits:
            configs = list(o.configs())
            reps = {rotation_class_of(link_data(phi).black).word for phi in configs}
            if len(reps) != 1:
                coherent = False
            cls = min(reps)
            for alpha in d.faces:
                total = 0
                pm = class_pm.setdefault((cls, alpha), [0, 0])
                for phi in configs:
                    v = plaquette_indicator(phi, alpha)
                    total += v
                    if v == 1:
                        pm[0] += 1
                    elif v == -1:
                        pm[1] += 1
                if total != 0:
                    bad_sum += 1
                key = (cls, alpha)
                class_sums[key] = class_sums.get(key, 0) + total
        bad_class = sum(1 for v in class_sums.values() if v != 0)
        lines.append(
            CheckLine("orbits", f"orbit face sums vanish, n={n}", bad_sum == 0)
        )
        lines.append(
            CheckLine("orbits", f"class face sums vanish, n={n}", bad_class == 0)
        )
        lines.append(
            CheckLine("orbits", f"orbits stay in one rotation class, n={n}", coherent)
        )
        if n == 4:
            balanced = all(
                pm[0] == pm[1]
                for (word, alpha), pm in class_pm.items()
                if alpha == (3, 2)
            )
            lines.append(
                CheckLine("orbits", "per-class +1/-1 counts balance at face (3,2), n=4", balanced)
            )
    return lines


def _suite_identities(n_max: int) -> list[CheckLine]:
    results = run_identity_suite(range(1, n_max + 1))
    return [
        CheckLine(
            "identities",
            f"{r.identity} n={r.n}" + (f" j={r.j}" if r.j is not None else ""),
            r.status,
            r.witness,
        )
        for r in results
    ]


def _check_tl_relations(n: int, samples, lines: list[CheckLine], label: str) -> None:
    size = 2 * n
    wrap = lambda j: ((j - 1) % size) + 1
    ok_a = ok_b = ok_c = ok_d = True
    ok_ca = ok_ac = ok_comm = True
    for p, i, j in samples:
        ei = tl_e(p, i)
        ok_a &= ei == rotate(tl_e(rotate(p, -1), wrap(i + 1)), 1)
        ok_b &= tl_e(ei, i) == ei
        dist = min((i - j) % size, (j - i) % size)
        if dist > 1:
            ok_c &= tl_e(tl_e(p, j), i) == tl_e(ei, j)
        ok_d &= tl_e(tl_e(tl_e(p, i), wrap(i + 1)), i) == ei
        ok_d &= tl_e(tl_e(tl_e(p, i), wrap(i - 1)), i) == ei
        if i <= size - 1:
            ok_ca &= close_c(add_a(p, i), i) == p
            ok_ac &= add_a(close_c(p, i), i) == tl_e(p, i)
        if j - i >= 2:
            if j <= size - 1 and i <= size - 3:
                ok_comm &= close_c(tl_e(p, i), j) == tl_e(close_c(p, j), i)
            if j <= size + 1:
                ok_comm &= add_a(tl_e(p, i), j) == tl_e(add_a(p, j), i)
    lines.append(CheckLine("tl", f"conjugation by rotation shifts indices, {label}", ok_a))
    lines.append(CheckLine("tl", f"generators are idempotent, {label}", ok_b))
    lines.append(CheckLine("tl", f"distant generators commute, {label}", ok_c))
    lines.append(CheckLine("tl", f"braid-like contraction, {label}", ok_d))
    lines.append(CheckLine("tl", f"cap after add is the identity, {label}", ok_ca))
    lines.append(CheckLine("tl", f"add after cap is the generator, {label}", ok_ac))
    lines.append(CheckLine("tl", f"caps commute with distant generators, {label}", ok_comm))


def _nonconsecutive_sets(size: int):
    """All subsets of 1..size-1 with no two consecutive members."""
    out = [()]
    for j in range(1, size):
        out += [s + (j,) for s in out if not s or s[-1] < j - 1]
    return out


def _suite_tl(n_max: int, seed: int) -> list[CheckLine]:
    lines: list[CheckLine] = []
    for n in range(1, min(n_max, 4) + 1):
        size = 2 * n
        samples = [
            (p, i, j)
            for p in all_patterns(n)
            for i in range(1, size + 1)
            for j in range(1, size + 1)
        ]
        _check_tl_relations(n, samples, lines, f"exhaustive n={n}")
        ok_prod = True
        for p in all_patterns(n):
            for js in _nonconsecutive_sets(size):
                lhs = p
                for j in sorted(js, reverse=True):
                    lhs = close_c(lhs, j)
                for j in sorted(js):
                    lhs = add_a(lhs, j)
                rhs = p
                for j in js:
                    rhs = tl_e(rhs, j)
                ok_prod &= lhs == rhs
        lines.append(
            CheckLine("tl", f"add/cap ladders reproduce generator products, exhaustive n={n}", ok_prod)
        )
    if n_max >= 5:
        rng = random.Random(seed)
        for n in range(5, min(n_max, 7) + 1):
            pats = all_patterns(n)
            size = 2 * n
            samples = [
                (rng.choice(pats), rng.randint(1, size), rng.randint(1, size))
                for _ in range(10_000)
            ]
            _check_tl_relations(n, samples, lines, f"10^4 samples n={n}")
    return lines


def _conservation_lines(d, t, parity, lines, label) -> None:
    g = glue_and_gamma(d, t, parity, allow_swaps=True)
    ok_inv = ok_triplet = ok_bc = True
    count = 0
    for phi in enumerate_configs(d, t):
        count += 1
        psi = apply_h(phi, g)
        ok_bc &= psi.boundary() == t.complemented()
        ok_inv &= apply_h(psi, g).bits == phi.bits
        ok_triplet &= pair_link_data(phi, g) == pair_link_data(psi, g)
    lines.append(
        CheckLine(
            "gyration-general",
            f"pass is an involution onto the complement, {label}",
            ok_inv and ok_bc,
            f"{count} configs, swaps={g.swaps}",
        )
    )
    lines.append(
        CheckLine(
            "gyration-general",
            f"glued link data conserved, {label}",
            ok_triplet,
        )
    )


def _suite_gyration_general(n_max: int, seed: int) -> list[CheckLine]:
    lines: list[CheckLine] = []
    for n in range(1, min(n_max, 4) + 1):
        d, t = build_square(n, "+")
        for parity in ("plus", "minus"):
            _conservation_lines(d, t, parity, lines, f"square n={n} {parity}")
    rng = random.Random(seed)
    for k in range(50):
        n_cells = rng.randint(6, 24)
        parity = "plus" if k % 2 == 0 else "minus"
        d, t = random_glueable(rng, n_cells, parity)
        _conservation_lines(d, t, parity, lines, f"random domain #{k} ({len(d.cells)} cells, {parity})")
    for n in range(3, min(n_max, 5) + 1):
        for j in range(2, (n + 1) // 2 + 1):
            d, t = shat_c_rectangle(n, j)
            for parity in ("plus", "minus"):
                r = generalized_gyration_check(d, t, parity)
                lines.append(
                    CheckLine(
                        "gyration-general",
                        f"capped tables agree on the c-state rectangle n={n} j={j} {parity}",
                        r.passed,
                        f"J1={list(r.j_left)} J2={list(r.j_right)}",
                    )
                )
    for k in range(15):
        d, t = random_glueable(rng, rng.randint(6, 16), "plus")
        r = generalized_gyration_check(d, t, "plus")
        lines.append(
            CheckLine(
                "gyration-general",
                f"capped tables agree on random domain #{k} ({len(d.cells)} cells)",
                r.passed,
                f"J1={list(r.j_left)} J2={list(r.j_right)} swaps={list(r.swaps)}",
            )
        )
    return lines


# ---------------------------------------------------------------------------
# Commands


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("FPLRS_THREADS")
    return max(1, int(env)) if env else 1


def cmd_enumerate(args) -> int:
    if args.n > args.max_n and not args.allow_large:
        print(
            f"n={args.n} exceeds the default cap {args.max_n}; pass --allow-large",
            file=sys.stderr,
        )
        return 3
    cache = _cache_from(args)
    key = _cache_key("enumerate", n=args.n, sign=args.sign)
    text = cache.get(key) if cache else None
    if text is None:
        table = refined_counts(args.n, args.sign, jobs=_threads(args))
        text = json.dumps(table.to_json(), indent=0, sort_keys=True)
        if cache:
            cache.put(key, text)
    _emit(text, args.out)
    return 0


def cmd_groundstate(args) -> int:
    if args.n > args.max_n and not args.allow_large:
        print(
            f"n={args.n} exceeds the default cap {args.max_n}; pass --allow-large",
            file=sys.stderr,
        )
        return 3
    cache = _cache_from(args)
    key = _cache_key("groundstate", n=args.n)
    text = cache.get(key) if cache else None
    if text is None:
        vec = stationary_vector(args.n)
        text = json.dumps(lp_vector_to_json(vec), indent=0, sort_keys=True)
        if cache:
            cache.put(key, text)
    _emit(text, args.out)
    data = json.loads(text)
    values = [int(v.split("/")[0]) for v in data["entries"].values()]
    print(
        f"n={args.n}: max component {max(values)}, sum {sum(values)}"
        f" (product formula {asm_count_formula(args.n)})",
        file=sys.stderr,
    )
    return 0


def cmd_verify(args) -> int:
    n_max = args.n_max
    if args.suite == "rs":
        lines = _suite_rs(n_max)
    elif args.suite == "wieland":
        lines = _suite_wieland(n_max)
    elif args.suite == "orbits":
        lines = _suite_orbits(n_max)
    elif args.suite == "identities":
        lines = _suite_identities(n_max)
    elif args.suite == "tl":
        lines = _suite_tl(n_max, args.seed)
    elif args.suite == "gyration-general":
        lines = _suite_gyration_general(n_max, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        return 2
    return _report(lines, args.format, args.out)


def cmd_orbit_report(args) -> int:
    if args.n > args.max_n and not args.allow_large:
        print(f"n={args.n} exceeds the default cap; pass --allow-large", file=sys.stderr)
        return 3
    d, _t = build_square(args.n, args.sign)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["orbit_id", "period", "link_class", "plaquette", "sum"])
    for oid, o in enumerate(orbit_partition(args.n, args.sign)):
        configs = list(o.configs())
        link_class = rotation_class_of(link_data(configs[0]).black).word
        for alpha in d.faces:
            total = sum(plaquette_indicator(phi, alpha) for phi in configs)
            writer.writerow([oid, o.period, link_class, f"{alpha[0]},{alpha[1]}", total])
    _emit(buf.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fplrs",
        description="Exact loop-model combinatorics: tables, ground states, verification.",
    )
    parser.add_argument("--version", action="version", version=f"fplrs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_sign=True):
        p.add_argument("--n", type=int, required=True, help="system size")
        if needs_sign:
            p.add_argument("--sign", choices=["+", "-"], default="+")
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--threads", type=int, help="worker count (FPLRS_THREADS)")
        p.add_argument("--cache-dir", help="cache directory (FPLRS_CACHE_DIR)")
        p.add_argument("--allow-large", action="store_true")
        p.add_argument(
            "--max-n",
            type=int,
            default=DEFAULT_MAX_N,
            help=f"soft size cap (default {DEFAULT_MAX_N})",
        )

    p_enum = sub.add_parser("enumerate", help="write a per-pattern count table")
    common(p_enum)
    p_enum.set_defaults(func=cmd_enumerate)

    p_gs = sub.add_parser("groundstate", help="write the exact stationary vector")
    common(p_gs, needs_sign=False)
    p_gs.set_defaults(func=cmd_groundstate)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite", choices=SUITES)
    p_ver.add_argument("--n-max", type=int, default=4)
    p_ver.add_argument("--format", choices=["text", "csv"], default="text")
    p_ver.add_argument("--out", help="report path (stdout when omitted)")
    p_ver.add_argument("--seed", type=int, default=20100615)
    p_ver.set_defaults(func=cmd_verify)

    p_orb = sub.add_parser("orbit-report", help="CSV of orbit/plaquette sums")
    common(p_orb)
    p_orb.set_defaults(func=cmd_orbit_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FplrsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
