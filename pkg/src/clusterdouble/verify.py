"""Randomized and exhaustive property checks shared by the CLI and the tests.

Every check returns a list of human-readable problems; an empty list means
the property held.  Runners wrap the checks in a :class:`VerificationReport`
and draw inputs from :class:`~clusterdouble.rng.SplitMix64`, so a report is
reproducible from its seed alone.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

from .cluster_maps import (
    a_mutation,
    a_name,
    a_torus,
    aa_mutation,
    b_name,
    compose,
    compose_all,
    d_mutation,
    identity_map,
    iota_map,
    is_identity_up_to_permutation,
    j_map,
    phi_map,
    pi_map,
    pp_map,
    swap_map,
    x_mutation,
    x_name,
    xo_name,
    xx_mutation,
)
from .flagconfig import (
    DegenerateConfigurationError,
    DoubleConfig,
    a_coords,
    double_coords,
    h_rescale,
    mirror_x_coords,
    reconstruct_double,
)
from .ratfunc import PoleError, format_rational, rf_is_laurent
from .rng import SplitMix64
from .seed import Seed, a_n_seed, mutate_seed
from .surface import (
    IdealTriangulation,
    expected_label_count,
    flip,
    flip_mutation_check,
    m_triangulation_seed,
)

__all__ = [
    "VerificationReport",
    "random_seed",
    "SEED_PROPERTIES",
    "check_involutivity",
    "check_phi_pi",
    "check_j_diagonal",
    "check_iota",
    "check_pi_iota",
    "check_naturality",
    "check_pentagon",
    "check_laurent",
    "check_flips",
    "check_label_counts",
    "random_double",
    "roundtrip_trial",
    "rescale_trial",
    "naturality_trial",
    "mirror_trial",
    "run_seed_property",
    "run_pentagon",
    "run_coords_property",
    "COORD_PROPERTIES",
]


@dataclass
class VerificationReport:
    """Outcome of one property run.

    ``failures`` holds serialized counterexamples ordered by trial index;
    ``counterexample`` picks the smallest of them.
    """

    property: str
    fingerprint: str
    trials: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def counterexample(self):
        if not self.failures:
            return None
        return min(self.failures, key=lambda f: (len(json.dumps(f, sort_keys=True)), f.get("trial", 0)))

    def verdict(self) -> dict:
        return {
            "property": self.property,
            "verdict": "pass" if self.passed else "fail",
            "fingerprint": self.fingerprint,
            "trials": self.trials,
            "skipped": self.skipped,
            "failures": len(self.failures),
            "counterexample": self.counterexample,
        }

    def verdict_line(self) -> str:
        return json.dumps(self.verdict(), sort_keys=True)

    def summary(self) -> str:
        ok = self.trials - self.skipped - len(self.failures)
        line = f"{self.property}: {'PASS' if self.passed else 'FAIL'} ({ok}/{self.trials} trials passed"
        if self.skipped:
            line += f", {self.skipped} degenerate draws skipped"
        return line + ")"


# -- random seeds --------------------------------------------------------------


def random_seed(rng: SplitMix64, max_rank: int, lo: int = -2, hi: int = 2, frozen: bool = False) -> Seed:
    """Rank drawn uniformly from ``1..max_rank``; upper entries from ``lo..hi``.

    With ``frozen``, each index is frozen on a draw ``== 0 mod 4``; at least
    one index stays mutable.
    """
    n = rng.randint(1, max_rank)
    eps = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            v = rng.randint(lo, hi)
            eps[a][b], eps[b][a] = v, -v
    labels = [str(k + 1) for k in range(n)]
    fz = []
    if frozen:
        fz = [lab for lab in labels if rng.next_u64() % 4 == 0]
        if len(fz) == n:
            fz = fz[1:]
    return Seed.from_matrix(eps, fz, labels)


# -- seed-level properties ----------------------------------------------------


def check_involutivity(s: Seed) -> list[str]:
    problems = []
    for k in s.mutable:
        t = mutate_seed(s, k)
        if mutate_seed(t, k) != s:
            problems.append(f"seed: mu_{k} mu_{k} != id")
        for kind, build in (("A", a_mutation), ("X", x_mutation), ("D", d_mutation)):
            m = build(s, k)
            if not compose(m, build(t, k)).is_identity():
                problems.append(f"{kind}: mu_{k} mu_{k} != id")
    return problems


def check_phi_pi(s: Seed) -> list[str]:
    return [] if compose(phi_map(s), pi_map(s)) == pp_map(s) else ["pi . phi != p x p"]


def check_j_diagonal(s: Seed) -> list[str]:
    f = compose(j_map(s), pi_map(s))
    bad = [i for i in s.mutable if f.pullback[x_name(i)] != f.pullback[xo_name(i)]]
    return [f"pi . j leaves the diagonal at {i}" for i in bad]


def check_iota(s: Seed) -> list[str]:
    return [] if compose(iota_map(s), iota_map(s)).is_identity() else ["iota . iota != id"]


def check_pi_iota(s: Seed) -> list[str]:
    return [] if compose(iota_map(s), pi_map(s)) == compose(pi_map(s), swap_map(s)) else ["pi . iota != swap . pi"]


def check_naturality(s: Seed) -> list[str]:
    """phi, pi, iota and j commute with one mutation step at every k."""
    problems = []
    for k in s.mutable:
        t = mutate_seed(s, k)
        dm = d_mutation(s, k)
        pairs = {
            "phi": (compose(aa_mutation(s, k), phi_map(t)), compose(phi_map(s), dm)),
            "pi": (compose(dm, pi_map(t)), compose(pi_map(s), xx_mutation(s, k))),
            "iota": (compose(dm, iota_map(t)), compose(iota_map(s), dm)),
            "j": (compose(x_mutation(s, k), j_map(t)), compose(j_map(s), dm)),
        }
        problems += [f"{name} not natural under mu_{k}" for name, (lhs, rhs) in pairs.items() if lhs != rhs]
    return problems


SEED_PROPERTIES: dict[str, tuple[Callable[[Seed], list[str]], bool]] = {
    # name -> (check, frozen indices allowed)
    "involutivity": (check_involutivity, True),
    "phi-pi": (check_phi_pi, False),
    "j-diagonal": (check_j_diagonal, False),
    "iota": (check_iota, False),
    "pi-iota": (check_pi_iota, False),
    "naturality": (check_naturality, False),
}


def check_pentagon(rng: SplitMix64, points: int = 20) -> list[str]:
    """Five alternating D-mutations on A_2 swap ``(B1, X1)`` and ``(B2, X2)``."""
    s = a_n_seed(2)
    maps = []
    for k in "12121":
        maps.append(d_mutation(s, k))
        s = maps[-1].target_seed
    total = compose_all(*maps)
    expected = {b_name("1"): b_name("2"), b_name("2"): b_name("1"), x_name("1"): x_name("2"), x_name("2"): x_name("1")}
    problems = []
    if is_identity_up_to_permutation(total) != expected:
        problems.append("symbolic composite is not the transposition")
    names = list(expected)
    for _ in range(points):
        pt = {n: rng.rational(positive=True) for n in names}
        cur = pt
        for m in maps:
            cur = m.evaluate(cur)
        if cur != {t: pt[src] for t, src in expected.items()}:
            problems.append("numeric mismatch at " + json.dumps({n: format_rational(v) for n, v in pt.items()}))
    return problems


def check_laurent(s: Seed, max_length: int) -> tuple[int, list[str]]:
    """A-coordinates along every mutation sequence of length ``<= max_length``.

    Returns the number of coordinates examined and the problems found.
    Immediate repeats are skipped since ``mu_k mu_k = id``.
    """
    stack = [(identity_map(a_torus(s), s), s, None, 0, ())]
    checked, problems = 0, []
    while stack:
        cur, seed, last, depth, path = stack.pop()
        if depth == max_length:
            continue
        for k in seed.mutable:
            if k == last:
                continue
            m = a_mutation(seed, k)
            nxt = compose(cur, m)
            rep = rf_is_laurent(nxt.pullback[a_name(k)])
            checked += 1
            if not rep.is_laurent:
                problems.append(f"A_{k} after {'.'.join(path + (k,))} is not Laurent")
            elif not rep.positive:
                problems.append(f"A_{k} after {'.'.join(path + (k,))} has a negative coefficient")
            stack.append((nxt, m.target_seed, k, depth + 1, path + (k,)))
    return checked, problems


def run_seed_property(name: str, rank: int, trials: int, seed: int) -> VerificationReport:
    check, frozen = SEED_PROPERTIES[name]
    rng = SplitMix64(seed)
    rep = VerificationReport(name, f"random seeds rank<={rank} entries[-2,2] seed={seed}")
    start = time.perf_counter()
    for trial in range(trials):
        s = random_seed(rng, rank, frozen=frozen)
        rep.trials += 1
        problems = check(s)
        if problems:
            rep.failures.append({"trial": trial, "seed": s.to_json(), "problems": problems})
    rep.duration = time.perf_counter() - start
    return rep


def run_pentagon(points: int, seed: int) -> VerificationReport:
    rep = VerificationReport("pentagon", f"A2 seed, mutations 1.2.1.2.1, seed={seed}")
    start = time.perf_counter()
    rep.trials = points
    problems = check_pentagon(SplitMix64(seed), points)
    rep.failures = [{"problem": p} for p in problems]
    rep.duration = time.perf_counter() - start
    return rep


# -- surfaces -----------------------------------------------------------------


def check_flips(t: IdealTriangulation, m: int = 2) -> list[str]:
    """Flip/mutation agreement at every internal edge."""
    problems = []
    for e in t.internal_edges:
        v = flip_mutation_check(t, e, m)
        if not v.equal:
            problems.append(f"flip at {e}: entry {v.discrepancy} differs")
    return problems


def check_label_counts(t: IdealTriangulation, ms=(2, 3, 4)) -> list[str]:
    """Skew-symmetry (enforced by Seed) and the label-count formula."""
    problems = []
    for m in ms:
        s = m_triangulation_seed(t, m)
        if len(s.indices) != expected_label_count(t, m):
            problems.append(f"m={m}: {len(s.indices)} labels, expected {expected_label_count(t, m)}")
    return problems


# -- flag configurations -------------------------------------------------------


def random_double(t: IdealTriangulation, rng: SplitMix64, positive: bool = False):
    bs = {e: rng.rational(positive=positive) for e in t.internal_edges}
    xs = {e: rng.rational(positive=positive) for e in t.internal_edges}
    return bs, xs


def _q(d: dict) -> dict:
    return {k: format_rational(v) for k, v in d.items()}


def roundtrip_trial(t: IdealTriangulation, rng: SplitMix64):
    """``None`` on success, ``"skip"`` on a degenerate draw, else a problem dict."""
    bs, xs = random_double(t, rng)
    try:
        d = reconstruct_double(t, bs, xs)
        c = double_coords(d)
    except DegenerateConfigurationError:
        return "skip"
    if c.B != bs or c.X != xs:
        return {"B": _q(bs), "X": _q(xs), "got": c.to_json()}
    return None


def rescale_trial(d: DoubleConfig, rng: SplitMix64):
    lam = {v: rng.rational() for v in d.triangulation.vertices}
    before = double_coords(d)
    after = double_coords(h_rescale(d, lam))
    if before != after:
        return {"lambda": _q(lam)}
    return None


def mirror_trial(t: IdealTriangulation, rng: SplitMix64):
    bs, xs = random_double(t, rng)
    try:
        d = reconstruct_double(t, bs, xs)
        got = mirror_x_coords(d)
    except DegenerateConfigurationError:
        return "skip"
    s = m_triangulation_seed(t, 2)
    for i in t.internal_edges:
        want = xs[i]
        for j in t.internal_edges:
            want *= bs[j] ** s.e(i, j)
        if got[i] != want:
            return {"B": _q(bs), "X": _q(xs), "edge": i}
    return None


def naturality_trial(t: IdealTriangulation, rng: SplitMix64):
    """Flip every internal edge of a random DoubleConfig and compare coordinates.

    Checks the D-, X- and A-mutation pullbacks.  Returns ``(skipped, problem)``
    where ``skipped`` counts flips landing on the degeneracy locus.
    """
    bs, xs = random_double(t, rng)
    d = reconstruct_double(t, bs, xs)
    s = m_triangulation_seed(t, 2)
    dc = double_coords(d)
    a_old = a_coords(d.front)
    skipped = 0
    for e in t.internal_edges:
        t2, corr = flip(t, e)
        try:
            d2 = d.with_triangulation(t2)
            new = double_coords(d2)
            a_new = a_coords(d2.front)
        except DegenerateConfigurationError:
            skipped += 1
            continue
        try:
            img_d = d_mutation(s, e).evaluate(dc.as_point())
            img_x = x_mutation(s, e).evaluate({x_name(k): v for k, v in dc.X.items()})
            img_a = a_mutation(s, e).evaluate({a_name(k): v for k, v in a_old.items()})
        except PoleError:
            return skipped, {"B": _q(bs), "X": _q(xs), "edge": e, "problem": "pullback has a pole where the flip is defined"}
        for old, nw in corr.items():
            ok = img_a[a_name(old)] == a_new[nw]
            if old in dc.X:
                ok = ok and img_d[b_name(old)] == new.B[nw] and img_d[x_name(old)] == new.X[nw]
                ok = ok and img_x[x_name(old)] == new.X[nw]
            if not ok:
                return skipped, {"B": _q(bs), "X": _q(xs), "edge": e, "coordinate": old}
    return skipped, None


def _run_trials(name: str, t: IdealTriangulation, trials: int, seed: int, trial) -> VerificationReport:
    rng = SplitMix64(seed)
    rep = VerificationReport(name, f"{t.fingerprint()} seed={seed}")
    start = time.perf_counter()
    for k in range(trials):
        rep.trials += 1
        out = trial(t, rng)
        if out == "skip":
            rep.skipped += 1
        elif out is not None:
            out = dict(out, trial=k)
            rep.failures.append(out)
    rep.duration = time.perf_counter() - start
    return rep


def _rescale_on(t, rng):
    bs, xs = random_double(t, rng)
    try:
        d = reconstruct_double(t, bs, xs)
    except DegenerateConfigurationError:
        return "skip"
    return rescale_trial(d, rng)


def _naturality_on(t, rng):
    skipped, problem = naturality_trial(t, rng)
    if problem is not None:
        return problem
    return "skip" if skipped == len(t.internal_edges) and skipped else None


COORD_PROPERTIES = {
    "roundtrip": roundtrip_trial,
    "h-invariance": _rescale_on,
    "mirror": mirror_trial,
    "naturality": _naturality_on,
}


def run_coords_property(name: str, t: IdealTriangulation, trials: int, seed: int) -> VerificationReport:
    return _run_trials(name, t, trials, seed, COORD_PROPERTIES[name])
