"""Invariant suites run by ``quatsystole selftest``.

Each suite draws from a seeded generator, so runs are reproducible.  The summary
line per suite names the property family it covers.
"""

from __future__ import annotations

import math
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .hyperbolic import (
    Isometry,
    ProjectivePoint,
    apply,
    classify,
    distance,
    random_isometry,
    random_unitary,
    to_unit_model,
    trace_length_bound,
    translation_length,
)
from .lattice import (
    AdmissibleGroupSpec,
    bad_places,
    check_trace_congruence,
    congruence_index,
    hilbert_symbol_odd,
    index_upper_bound,
    local_index,
    trace_lower_bound,
)
from .matrixfile import MatrixFile, parse, serialize
from .numberfield import IdealSpec, RealQuadraticField, ResidueRing, classify_prime
from .quaternion import QuaternionAlgebra, qconj, qinv, qmul, qnorm, similar_to_complex
from .quatlinalg import (
    QuatMatrix,
    complexify,
    form_inverse,
    is_conjugation_closed,
    is_inversion_closed,
    mul,
    real_trace,
    right_eigenvalues,
    star,
)
from .systole import (
    congruence_witness,
    exceeds_exactly,
    find_witness,
    index_slope,
    primes_in,
    systole_lower_bound_norm,
)


@dataclass
class Suite:
    name: str
    anchor: str
    checks: int = 0
    failures: list = field(default_factory=list)

    def check(self, cond, label: str) -> None:
        self.checks += 1
        if not cond:
            self.failures.append(label)


def _rand_el(rng: random.Random, k: RealQuadraticField, h: int = 9, rational: bool = False):
    if rational:
        return k(Fraction(rng.randint(-h, h), rng.randint(1, 4)), Fraction(rng.randint(-h, h), rng.randint(1, 4)))
    return k(rng.randint(-h, h), rng.randint(-h, h))


def suite_field(s: Suite, quick: bool) -> None:
    rng = random.Random(1)
    for d in (2, 3, 6, 7):
        k = RealQuadraticField(d)
        for _ in range(50 if quick else 500):
            x, y, z = (_rand_el(rng, k, rational=True) for _ in range(3))
            s.check((x + y) * z == x * z + y * z, "distributive")
            s.check((x * y).norm() == x.norm() * y.norm(), "norm multiplicative")
            s.check(k.parse(str(x)) == x, "parse/format round trip")
            if x:
                s.check(x * x.inverse() == 1, "inverse")
        for p in (3, 5, 7, 11, 13, 17, 19, 23):
            kinds = {P.kind for P in classify_prime(p, k)}
            qr = pow(d % p, (p - 1) // 2, p) == 1 if d % p else None
            expected = "ramified" if qr is None else ("split" if qr else "inert")
            s.check(kinds == {expected}, f"splitting of {p} in Q(sqrt {d})")


def suite_residue(s: Suite, quick: bool) -> None:
    rng = random.Random(2)
    for d in (2, 3):
        k = RealQuadraticField(d)
        for p in (2, 3, 5, 7):
            for P in classify_prime(p, k):
                for e in (1, 2, 3):
                    ring = ResidueRing(P, e)
                    s.check(ring.size == P.q**e, f"|O/P^e| for {P}^{e}")
                    for _ in range(20 if quick else 200):
                        x, y = _rand_el(rng, k, 50), _rand_el(rng, k, 50)
                        rx, ry = ring.reduce(x), ring.reduce(y)
                        s.check(ring.reduce(x + y) == ring.add(rx, ry), "reduction additive")
                        s.check(ring.reduce(x * y) == ring.mul(rx, ry), "reduction multiplicative")
                        s.check(ring.contains(x - ring.lift(x)), "lift congruent")


def suite_quaternion(s: Suite, quick: bool) -> None:
    rng = random.Random(3)
    k = RealQuadraticField(2)
    for D in (QuaternionAlgebra.default(k), QuaternionAlgebra(k, k(-3), k(-1, 1)), QuaternionAlgebra(k, k(7), k(3))):
        for _ in range(30 if quick else 300):
            x = D(*(_rand_el(rng, k, 5) for _ in range(4)))
            y = D(*(_rand_el(rng, k, 5) for _ in range(4)))
            s.check((x * y).rnorm() == x.rnorm() * y.rnorm(), "reduced norm multiplicative")
            s.check((x * y).conj() == y.conj() * x.conj(), "conjugation reverses products")
            if x.rnorm():
                s.check(x * x.inverse() == D.one(), "inverse")
    nrng = np.random.default_rng(3)
    for t in range(200 if quick else 10_000):
        q = nrng.standard_normal(4)
        if t % 20 == 0:
            q[2:] = 0.0
            q[1] = -abs(q[1])
        c, r = similar_to_complex(q)
        back = qmul(qmul(r, np.array([c.real, c.imag, 0.0, 0.0])), qinv(r))
        s.check(np.max(np.abs(back - q)) <= 1e-12 * max(1.0, qnorm(q)), "similarity r c r^-1 = q")
        s.check(abs(abs(c) - qnorm(q)) <= 1e-12 * max(1.0, qnorm(q)), "similarity |c| = |q|")


def suite_complexify(s: Suite, quick: bool) -> None:
    rng = np.random.default_rng(4)
    for _ in range(100 if quick else 1000):
        m = int(rng.integers(1, 5))
        A, B = rng.standard_normal((2, m, m, 4))
        s.check(np.max(np.abs(complexify(mul(A, B)) - complexify(A) @ complexify(B))) <= 1e-12, "f(AB) = f(A) f(B)")
        s.check(np.array_equal(complexify(star(A)), complexify(A).conj().T), "f(A*) = f(A)*")
        s.check(abs(real_trace(A) - np.trace(complexify(A)).real / 2) <= 1e-13, "Re tr A = tr f(A) / 2")


def suite_spectrum(s: Suite, quick: bool) -> None:
    rng = np.random.default_rng(5)
    for _ in range(50 if quick else 500):
        m = int(rng.integers(1, 5))
        s.check(is_conjugation_closed(right_eigenvalues(rng.standard_normal((m, m, 4))), 1e-8), "conjugation closure")
    for _ in range(30 if quick else 200):
        m = int(rng.integers(1, 5))
        ev = right_eigenvalues(random_unitary(rng, m))
        s.check(np.max(np.abs(np.abs(ev) - 1.0)) <= 1e-8, "unitary spectrum on the unit circle")
    spec = AdmissibleGroupSpec.build()
    a = spec.a.embed("trivial")
    W = find_witness(spec).matrix().to_float()
    for _ in range(30 if quick else 200):
        g = Isometry(random_isometry(rng, 2, a, 0.5), a).mat
        C = mul(mul(g, W), form_inverse(g, a))
        s.check(is_inversion_closed(right_eigenvalues(C), 1e-6), "isometry spectrum closed under inversion")


def suite_hyperbolic(s: Suite, quick: bool) -> None:
    rng = np.random.default_rng(6)
    for _ in range(100 if quick else 1000):
        n = int(rng.integers(1, 4))
        a = float(rng.uniform(0.2, 5.0))
        pts = []
        for _ in range(2):
            rep = rng.standard_normal((n + 1, 4)) * 0.3
            rep[0] = rng.standard_normal(4)
            rep[0] *= 2.0 * math.sqrt(float(np.sum(rep[1:] ** 2)) / a + 1e-3) / np.linalg.norm(rep[0])
            pts.append(ProjectivePoint(rep, a))
        z, w = pts
        dz = distance(z, w)
        s.check(abs(dz - distance(to_unit_model(z), to_unit_model(w))) <= 1e-10, "distance independent of a")
        lam = rng.standard_normal(4)
        s.check(abs(dz - distance(z.scaled(lam), w)) <= 1e-9 * max(1.0, dz), "distance on projective classes")
        g = Isometry(random_isometry(rng, n + 1, a, 0.3), a)
        s.check(abs(dz - distance(apply(g, z), apply(g, w))) <= 1e-8 * max(1.0, dz), "isometry invariance")
    spec = AdmissibleGroupSpec.build()
    M = Isometry.from_exact(find_witness(spec).matrix(), spec.a)
    c = classify(M)
    s.check(c.kind == "loxodromic" and len(c.off_circle) == 4, "witness has 4 off-circle eigenvalues")
    ell = translation_length(M)
    s.check(abs(ell - 2 * math.acosh(1 + math.sqrt(2))) <= 1e-9, "witness length")
    o = ProjectivePoint.origin(1, M.a)
    s.check(abs(distance(o, apply(M, o)) - ell) <= 1e-9, "axis through the origin")
    Mk = M
    for k in range(2, 11):
        Mk = Mk @ M
        s.check(abs(translation_length(Mk) - k * ell) <= 1e-9 * k, "length additive on powers")
        s.check(trace_length_bound(Mk) <= k * ell + 1e-6, "trace bound below length")


def suite_index(s: Suite, quick: bool) -> None:
    s.check(local_index(2, 1, 1) == 720, "|Sp4(F2)|")
    s.check(local_index(3, 1, 1) == 51840, "|Sp4(F3)|")
    s.check(local_index(2, 1, 2) == 1451520, "|Sp6(F2)|")
    s.check(local_index(3, 2, 1) == 3**10 * 51840, "level-2 kernel adds q^dim")
    k = RealQuadraticField(2)
    for n in (1, 2):
        spec = AdmissibleGroupSpec.build(n=n)
        S = bad_places(spec, 200)
        for p in primes_in(2, 200):
            for P in classify_prime(p, k):
                if P in S:
                    continue
                e = 1
                while P.q**e <= 200:
                    I = IdealSpec.prime_power(P, e)
                    s.check(congruence_index(I, spec, S) <= index_upper_bound(I, n), "index <= N(I)^dim")
                    e += 1
    P3 = classify_prime(3, k)[0]
    P7 = classify_prime(7, k)[0]
    s.check(hilbert_symbol_odd(k(-1), k(-1), P3) == 1, "(-1,-1) at inert 3")
    s.check(hilbert_symbol_odd(k(7), k(3), P7) == -1, "(7,3) at a prime above 7")
    spec = AdmissibleGroupSpec.build()
    s.check(sorted(str(P) for P in bad_places(spec).primes()) == ["(2, s2)"], "bad places of the base case")


def suite_systole(s: Suite, quick: bool) -> None:
    spec = AdmissibleGroupSpec.build()
    W = find_witness(spec)
    for p in (7, 17, 23, 31, 41) if not quick else (7, 17):
        P = classify_prime(p, spec.field)[0]
        I = IdealSpec.prime_power(P)
        cw = congruence_witness(W, I)
        low = systole_lower_bound_norm(I, spec)
        s.check(low.value <= cw.length, f"sandwich at {P}")
        tr = cw.element.real_trace()
        s.check(exceeds_exactly(tr, trace_lower_bound(I, spec)), f"trace bound at {P}")
        s.check(check_trace_congruence(cw.element, I, spec), f"trace congruence at {P}")
        s.check(trace_length_bound(cw.element) <= cw.length + 1e-6, f"trace-length chain at {P}")
    for n in (1, 2, 3):
        s.check(index_slope(n) * (n + 1) * (2 * n + 3) == 4, "slope times dimension is 4")


def suite_matrixfile(s: Suite, quick: bool) -> None:
    rng = random.Random(9)
    spec = AdmissibleGroupSpec.build()
    k, D = spec.field, spec.algebra
    for _ in range(20 if quick else 100):
        rows = [[D(*(_rand_el(rng, k, 20, rational=True) for _ in range(4))) for _ in range(2)] for _ in range(2)]
        mf = MatrixFile(spec, QuatMatrix(tuple(map(tuple, rows)), D))
        s.check(parse(serialize(mf)) == mf, "matrix file round trip")


SUITES: list[tuple[str, str, Callable]] = [
    ("field", "quadratic field arithmetic and prime splitting", suite_field),
    ("residue", "residue rings O/P^e", suite_residue),
    ("quaternion", "quaternion norms, conjugation, similarity to C", suite_quaternion),
    ("complexify", "complex embedding of quaternionic matrices", suite_complexify),
    ("spectrum", "right-eigenvalue symmetries", suite_spectrum),
    ("hyperbolic", "distance, isometries and translation lengths", suite_hyperbolic),
    ("index", "local indices, Hilbert symbols, bad places", suite_index),
    ("systole", "congruence witnesses against lower bounds", suite_systole),
    ("matrixfile", "matrix file serialization", suite_matrixfile),
]


def run_all(out=None, quick: bool = True) -> bool:
    out = out or sys.stdout
    ok = True
    for name, anchor, fn in SUITES:
        s = Suite(name, anchor)
        t0 = time.perf_counter()
        try:
            fn(s, quick)
        except Exception as exc:  # a crash is a failure of the suite, not of the runner
            s.failures.append(f"raised {type(exc).__name__}: {exc}")
        dt = time.perf_counter() - t0
        status = "PASS" if not s.failures else "FAIL"
        ok &= not s.failures
        print(f"{status} {name:<11} {s.checks:6d} checks {dt:7.2f}s  [{anchor}]", file=out)
        for f in sorted(set(s.failures))[:5]:
            print(f"     - {f}", file=out)
    print("selftest: " + ("all suites passed" if ok else "FAILURES"), file=out)
    return ok
