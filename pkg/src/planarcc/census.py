"""Exhaustive-by-saturation search for the central configurations of given masses."""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial
from typing import Iterator

import numpy as np

from . import kernels
from .bounds import (IndexPolynomial, ParityError, bound_table, equivariant_morse_check,
                     morse_inequality_check)
from .config import (COLLINEAR_TOL, KEY_TOL, Classification, ConfigKey, Configuration,
                     MassVector, classify, config_key, pair_distances, reflect, relabel,
                     signed_areas, _orientation)
from .solver import (SolveOptions, moulton_orderings, moulton_solve, newton_polish,
                     random_start, structured_starts)
from .spectral import IndexReport, TOL_DEGENERATE, TOL_EIG, morse_index

log = logging.getLogger(__name__)

SIMO_RANGE = (294, 450)


@dataclass(frozen=True)
class CensusOptions:
    seed: int = 0
    starts_budget: int = 2_000_000
    window_factor: int = 500
    window_min: int = 2000
    workers: int = 1
    batch_size: int = 1000
    solve: SolveOptions = field(default_factory=SolveOptions)
    tol_eig: float = TOL_EIG
    tol_degenerate: float = TOL_DEGENERATE
    structured: bool = True

    def window(self, count: int) -> int:
        return max(self.window_min, self.window_factor * count)


@dataclass(frozen=True, eq=False)
class CensusRecord:
    configuration: Configuration
    key: ConfigKey
    index_report: IndexReport
    classification: Classification
    residual_norm: float
    lam: float
    source: str


@dataclass(eq=False)
class CensusResult:
    masses: MassVector
    records: list[CensusRecord]
    morse_poly: IndexPolynomial
    saturated: bool
    starts_used: int
    degenerate_found: bool
    polishes: int
    converged: int
    comparisons: dict = field(default_factory=dict)
    mcmillan_bartky: dict | None = None

    @property
    def n(self) -> int:
        return self.masses.n

    def counts(self) -> list[int]:
        return self.morse_poly.padded(max(self.n - 1, len(self.morse_poly)))

    def noncollinear_counts(self) -> list[int]:
        out = [0] * max(self.n - 1, len(self.morse_poly))
        for r in self.records:
            if not r.classification.collinear:
                out[r.index_report.index] += 1
        return out

    @property
    def collinear_count(self) -> int:
        return sum(r.classification.collinear for r in self.records)


class KeyStore:
    """Tolerance-based set of configuration keys with O(1) expected lookup.

    Keys are bucketed by the sum of their distances; equal keys differ in
    that sum by far less than a bucket width, so neighbouring buckets suffice.
    """

    BUCKET = 1e-6

    def __init__(self, tol: float = KEY_TOL):
        self.tol = tol
        self.keys: list[ConfigKey] = []
        self._buckets: dict[tuple[int, int], list[int]] = {}

    def _slot(self, key: ConfigKey) -> int:
        return int(np.floor(float(key.distances.sum()) / self.BUCKET))

    def find(self, key: ConfigKey) -> int | None:
        slot = self._slot(key)
        for s in (slot - 1, slot, slot + 1):
            for i in self._buckets.get((key.orientation, s), ()):
                if self.keys[i].matches(key, self.tol):
                    return i
        return None

    def add(self, key: ConfigKey) -> bool:
        """Insert ``key``; False if an equal key is already present."""
        if self.find(key) is not None:
            return False
        self._buckets.setdefault((key.orientation, self._slot(key)), []).append(len(self.keys))
        self.keys.append(key)
        return True

    def __contains__(self, key: ConfigKey) -> bool:
        return self.find(key) is not None

    def __len__(self) -> int:
        return len(self.keys)


def _key_from_positions(x: np.ndarray) -> ConfigKey:
    d = pair_distances(x)
    d.setflags(write=False)
    return ConfigKey(d, _orientation(signed_areas(x), COLLINEAR_TOL))


def _polish_batch(mass_values, seed, start, stop, solve):
    """Polish random starts ``start..stop-1``; return the converged ones in order."""
    masses = MassVector(mass_values)
    m = masses.array
    tol = solve.tol_residual * masses.residual_scale
    out = []
    for k in range(start, stop):
        c0 = random_start(masses, (seed, k), solve.min_sep)
        x, status, _, _ = kernels.polish(c0.positions, m, tol, solve.max_iter,
                                         solve.max_halvings, solve.collapse_tol)
        if status == kernels.CONVERGED:
            out.append((k, x))
    return out


def _batches(opts: CensusOptions, masses: MassVector) -> Iterator[list]:
    ranges = [(s, min(s + opts.batch_size, opts.starts_budget))
              for s in range(0, opts.starts_budget, opts.batch_size)]
    if opts.workers <= 1:
        for a, b in ranges:
            yield _polish_batch(masses.values, opts.seed, a, b, opts.solve)
        return
    with ProcessPoolExecutor(max_workers=opts.workers) as pool:
        pending: deque = deque()
        it = iter(ranges)
        try:
            for _ in range(2 * opts.workers):
                a, b = next(it)
                pending.append(pool.submit(_polish_batch, masses.values, opts.seed, a, b, opts.solve))
        except StopIteration:
            pass
        while pending:
            batch = pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(_polish_batch, masses.values, opts.seed,
                                           nxt[0], nxt[1], opts.solve))
            try:
                yield batch
            except GeneratorExit:
                for f in pending:
                    f.cancel()
                raise


class _Search:
    def __init__(self, masses: MassVector, opts: CensusOptions):
        self.masses = masses
        self.opts = opts
        self.store = KeyStore()
        self.found: list[tuple[Configuration, str]] = []
        self.perms = [p for p in masses.preserving_permutations() if list(p) != sorted(p)]
        self.polishes = 0
        self.converged = 0

    def offer(self, c: Configuration, source: str) -> bool:
        """Add an already-converged configuration if its key is new, then close it."""
        key = _key_from_positions(c.positions)
        if not self.store.add(key):
            return False
        self.found.append((c, source))
        if key.orientation != 0:
            self._close(c)
        return True

    def polish_and_offer(self, c0: Configuration, source: str) -> bool:
        self.polishes += 1
        report = newton_polish(c0, self.opts.solve)
        if not report.converged:
            return False
        self.converged += 1
        return self.offer(report.configuration, source)

    def _close(self, c: Configuration) -> None:
        # mirror images and mass-preserving relabelings, breadth first
        queue = deque([c])
        while queue:
            cur = queue.popleft()
            images = [reflect(cur)] + [relabel(cur, p) for p in self.perms]
            for img in images:
                if _key_from_positions(img.positions) in self.store:
                    continue
                self.polishes += 1
                report = newton_polish(img, self.opts.solve)
                if not report.converged:
                    continue
                self.converged += 1
                key = _key_from_positions(report.configuration.positions)
                if self.store.add(key):
                    self.found.append((report.configuration, "closure"))
                    queue.append(report.configuration)


def run_census(masses: MassVector | list, opts: CensusOptions = CensusOptions()) -> CensusResult:
    """Find the central configurations of ``masses`` until no new one turns up.

    Order: Moulton lines, structured starts, then seeded random starts merged
    in seed order; each new non-collinear configuration is immediately closed
    under reflection and mass-preserving relabeling. The result depends only
    on (masses, options minus workers).
    """
    if not isinstance(masses, MassVector):
        masses = MassVector(masses)
    n = masses.n
    if n < 3:
        raise ValueError("a census needs at least 3 bodies")
    search = _Search(masses, opts)

    lines = []
    for order in moulton_orderings(n):
        c = moulton_solve(masses, order)
        lines.append(c)
        search.offer(c, "moulton")
    if opts.structured:
        for c0 in structured_starts(masses, opts.seed, lines=lines):
            search.polish_and_offer(c0, "structured")

    since_new = 0
    starts_used = 0
    saturated = False
    batches = _batches(opts, masses)
    try:
        for batch in batches:
            starts_used = min(starts_used + opts.batch_size, opts.starts_budget)
            for k, x in batch:
                search.converged += 1
                if search.offer(Configuration(x, masses), "random"):
                    since_new = 0
                else:
                    since_new += 1
                if since_new >= opts.window(len(search.store)):
                    saturated = True
                    starts_used = k + 1
                    break
            if saturated:
                break
    finally:
        batches.close()
    search.polishes += starts_used
    if not saturated:
        log.warning("census for masses %s not saturated after %d starts",
                    list(masses.values), starts_used)

    records = [_make_record(c, src, opts) for c, src in search.found]
    result = _assemble(masses, records, saturated, starts_used, search.polishes, search.converged)
    return result


def _make_record(c: Configuration, source: str, opts: CensusOptions) -> CensusRecord:
    f, lam = kernels.residual(c.positions, c.masses.array)
    report = morse_index(c, opts.tol_eig, opts.tol_degenerate)
    return CensusRecord(
        configuration=c,
        key=config_key(c),
        index_report=report,
        classification=classify(c),
        residual_norm=float(np.abs(f).max()),
        lam=float(lam),
        source=source,
    )


def _assemble(masses, records, saturated, starts_used, polishes, converged) -> CensusResult:
    n = masses.n
    counts = [0] * (n - 1)
    for r in records:
        k = r.index_report.index
        if k >= len(counts):
            counts += [0] * (k + 1 - len(counts))
        counts[k] += 1
    result = CensusResult(
        masses=masses,
        records=records,
        morse_poly=IndexPolynomial(counts),
        saturated=saturated,
        starts_used=starts_used,
        degenerate_found=any(r.index_report.degenerate for r in records),
        polishes=polishes,
        converged=converged,
    )
    result.comparisons = compare_with_bounds(result)
    result.mcmillan_bartky = mcmillan_bartky_check(result) if n == 4 else None
    return result


def reflection_pairs_complete(result: CensusResult) -> tuple[bool, list[int]]:
    """Every non-collinear record has its mirror image; returns (ok, orphan ids)."""
    store = KeyStore()
    for r in result.records:
        store.add(r.key)
    orphans = [i for i, r in enumerate(result.records)
               if r.key.orientation != 0 and r.key.mirrored() not in store]
    return not orphans, orphans


def hard_checks(result: CensusResult) -> dict:
    n = result.n
    moulton = result.collinear_count
    pairs_ok, orphans = reflection_pairs_complete(result)
    comp = result.comparisons
    return {
        "moulton_count": {"expected": factorial(n) // 2, "found": moulton,
                          "pass": moulton == factorial(n) // 2},
        "reflection_parity": {"pass": pairs_ok, "orphans": orphans},
        "morse_inequalities": {"pass": bool(comp["bouquet_morse"]["pass"]
                                            and comp["equivariant"]["pass"])},
    }


def compare_with_bounds(result: CensusResult) -> dict:
    """Confront the census counts with the four lower-bound families.

    The ignored Palmore row is reported, never enforced.
    """
    n = result.n
    table = bound_table(n)
    size = max(n - 1, len(result.morse_poly))
    counts = result.morse_poly.padded(size)

    bouquet = morse_inequality_check(counts, table.bouquet)
    try:
        eq = equivariant_morse_check(result.noncollinear_counts(), n)
        equivariant = {"pass": eq.passed, "parity": True,
                       "s_poly": list(eq.s_poly) if eq.s_poly else None}
    except ParityError as exc:
        equivariant = {"pass": False, "parity": False, "s_poly": None, "error": str(exc)}

    def per_index(row):
        ref = row.padded(size)
        margins = [c - b for c, b in zip(counts, ref)]
        return {"bound": ref, "margins": margins, "pass": all(x >= 0 for x in margins)}

    mccord = per_index(table.mccord)
    ignored = per_index(table.ignored_palmore)
    total = sum(counts)
    out = {
        "binding": bool(result.saturated and not result.degenerate_found),
        "bouquet_morse": {"pass": bouquet.passed,
                          "s_poly": list(bouquet.s_poly) if bouquet.s_poly else None},
        "equivariant": equivariant,
        "mccord": mccord,
        "first_palmore_total": {"bound": table.first_palmore.total,
                                "margin": total - table.first_palmore.total,
                                "pass": total >= table.first_palmore.total},
        "ignored_palmore": {"bound": ignored["bound"], "margins": ignored["margins"],
                            "consistent": ignored["pass"], "asserted": False},
    }
    if n == 5:
        lo, hi = SIMO_RANGE
        inside = lo <= total <= hi
        out["simo_range"] = {"range": [lo, hi], "total": total, "inside": inside,
                             "asserted": False}
        if not inside and out["binding"]:
            log.warning("n=5 total %d outside the expected range [%d, %d]", total, lo, hi)
    return out


def mcmillan_bartky_check(result: CensusResult) -> dict:
    """For n = 4: is there a convex local minimum for every oriented cyclic ordering?"""
    if result.n != 4:
        return {"applicable": False}
    found = {r.classification.cyclic_order for r in result.records
             if r.index_report.index == 0 and r.classification.convex}
    orderings = {"-".join(map(str, (1,) + p)): (1,) + p in found
                 for p in permutations((2, 3, 4))}
    return {"applicable": True, "orderings": orderings,
            "all_satisfied": all(orderings.values()),
            "minima": result.morse_poly[0]}


def epsilon_masses(pattern: list, epsilon: float) -> MassVector:
    """Substitute ``epsilon`` for every ``"eps"`` entry of a mass pattern."""
    return MassVector([epsilon if v == "eps" else float(v) for v in pattern])
