"""Property suites comparing every closed form against a brute-force oracle.

Suite parameters ship in ``configs/verify.json``. Random inputs are drawn from
``numpy.random.Generator`` streams keyed by the job seed and the suite index,
so a run is reproducible and suites are independent of one another.
"""

import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np
from scipy.linalg import expm

from .bargmann import (
    LinearSymbol,
    displacement,
    toeplitz_linear,
    toeplitz_quadrature,
    weyl_commutation_residual,
    weyl_operator,
    weyl_symbol,
)
from .errors import ConfigError
from .fock import (
    TruncatedBasis,
    annihilation_matrix,
    annihilation_smeared,
    compressed_norm,
    creation_matrix,
    creation_smeared,
)
from .gibbs import (
    GibbsContext,
    gibbs_expectation,
    gibbs_weyl_direct,
    partition_closed,
    partition_sqrt_variant,
    partition_truncated,
    product_gibbs_closed,
    two_point,
    weyl_gibbs_closed,
)
from .hermite import gauss_hermite, hermite_derivative_check, hermite_table
from .quantization import d_gamma, gamma_substitution, thermal_spectrum
from .sobolev import (
    bargmann_transform_map,
    chain_sums,
    falling_factorial,
    inverse_bargmann_transform_map,
    real_side_chain_norm,
    sobolev_norm_chain,
    toeplitz_level_bound_check,
)
from .trace import (
    coherent_integral_moments,
    coherent_integral_quadrature,
    trace_coherent_mc_batch,
)


@dataclass
class Check:
    """One comparison: ``passed`` is ``value <= tolerance``."""

    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)

    def add(self, name, value, tolerance):
        self.checks.append(Check(name, float(value), float(tolerance)))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def worst(self):
        """Check with the largest value-to-tolerance ratio."""
        return max(self.checks, key=lambda c: c.value / c.tolerance if c.tolerance else np.inf)

    def summary(self):
        return {
            "passed": self.passed,
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
        }


# Random inputs


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_unit_ball(rng, n, radius=1.0):
    """Uniform point of the complex ball ``|x| <= radius`` in ``C**n``."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return radius * rng.uniform() ** (1.0 / (2 * n)) * v


def random_thermal(rng, n, lambda_max, beta=1.0):
    """Random Hamiltonian and ``mu`` whose largest thermal weight is ``lambda_max``."""
    h = random_hermitian(rng, n)
    mu = float(np.linalg.eigvalsh(h).min()) + np.log(lambda_max) / beta
    return thermal_spectrum(h, beta, mu)


def single_mode_thermal(lam):
    """One mode with ``H = 1``, ``beta = 1`` and weight ``lam``."""
    return thermal_spectrum(np.eye(1), 1.0, 1.0 + np.log(lam))


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# Suites


def suite_ccr(p, rng):
    """Canonical commutation relations on levels below the cutoff."""
    res = SuiteResult("ccr")
    for n in p["modes"]:
        for cutoff in p["cutoffs"]:
            basis = TruncatedBasis(n, cutoff)
            ann = [annihilation_matrix(basis, j) for j in range(n)]
            cre = [creation_matrix(basis, j) for j in range(n)]
            eye = np.eye(basis.dim)
            worst = 0.0
            for i in range(n):
                for j in range(n):
                    comm = (ann[i] @ cre[j] - cre[j] @ ann[i]).toarray() - (i == j) * eye
                    worst = max(worst, compressed_norm(basis, comm, cutoff - 1))
                    worst = max(worst, compressed_norm(basis, (ann[i] @ ann[j] - ann[j] @ ann[i]), cutoff))
            res.add(f"n={n} D={cutoff}", worst, p["tol"])
    return res


def suite_toeplitz_ladder(p, rng):
    """Quadrature Toeplitz matrices of ``z`` and ``conj(z)`` against the ladder matrices."""
    res = SuiteResult("toeplitz-ladder")
    cutoff, order = p["cutoff"], p["quad_order"]
    basis = TruncatedBasis(1, cutoff)
    cre = creation_matrix(basis, 0).toarray()
    pairs = {
        "z vs sqrt2 adag": (lambda z: z, np.sqrt(2) * cre),
        "conj(z) vs sqrt2 a": (np.conj, np.sqrt(2) * cre.conj().T),
        "e1 vs adag": (LinearSymbol([1.0]), cre),
        "conj(e1) vs a": (LinearSymbol([1.0], conjugated=True), cre.conj().T),
    }
    for name, (symbol, ref) in pairs.items():
        t = toeplitz_quadrature(symbol, cutoff, order=order).toarray()
        res.add(name, np.linalg.norm(t - ref, 2), p["tol"])
    return res


def _parse_points(values):
    return [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in values]


def suite_weyl_three_way(p, rng):
    """``exp(i Phi(x))``, the displacement at ``-i conj(x)`` and the quadrature Toeplitz matrix."""
    res = SuiteResult("weyl-three-way")
    cutoff, guard = p["cutoff"], p["level_guard"]
    basis = TruncatedBasis(1, cutoff)
    for x in _parse_points(p["points"]):
        xv = np.array([x])
        w = weyl_operator(basis, xv).toarray()
        u = displacement(basis, -1j * np.conj(xv)).toarray()
        t = toeplitz_quadrature(weyl_symbol(xv), cutoff, order=p["quad_order"]).toarray()
        label = f"x={x:.6g}"
        res.add(f"{label} W-U", compressed_norm(basis, w - u, guard), p["tol"])
        res.add(f"{label} W-T", compressed_norm(basis, w - t, guard), p["tol"])
        res.add(f"{label} U-T", compressed_norm(basis, u - t, guard), p["tol"])
    return res


def suite_weyl_commutation(p, rng):
    """``U_y U_x = exp(-(i/2) Im<x,y>) U_{x+y}`` on the guarded level block."""
    res = SuiteResult("weyl-commutation")
    for n in p["modes"]:
        basis = TruncatedBasis(n, p["cutoff"])
        worst = 0.0
        for _ in range(p["pairs"]):
            x = random_unit_ball(rng, n, p["radius"])
            y = random_unit_ball(rng, n, p["radius"])
            worst = max(worst, weyl_commutation_residual(basis, x, y, p["level_guard"]))
        res.add(f"n={n} pairs={p['pairs']} guard={p['level_guard']}", worst, p["tol"])
    return res


def suite_substitution(p, rng):
    """``Gamma(exp(itH)) = exp(it dGamma(H))`` for random Hermitian ``H``."""
    res = SuiteResult("substitution")
    basis = TruncatedBasis(p["modes"], p["cutoff"])
    worst = 0.0
    for _ in range(p["hamiltonians"]):
        h = random_hermitian(rng, p["modes"])
        dg = d_gamma(basis, h).toarray()
        for t in p["times"]:
            lhs = gamma_substitution(basis, expm(1j * t * h)).toarray()
            rhs = expm(1j * t * dg)
            worst = max(worst, compressed_norm(basis, lhs - rhs, p["cutoff"]))
    res.add(f"n={p['modes']} D={p['cutoff']} H={p['hamiltonians']} t={p['times']}", worst, p["tol"])
    return res


def _random_operators(rng, dim, count):
    return [
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)) for _ in range(count)
    ]


def suite_coherent_trace(p, rng, seed=0, samples=100_000, workers=1):
    """Coherent-state integrals against the diagonal sum, exactly and by Monte Carlo."""
    res = SuiteResult("coherent-trace")
    n = p["modes"]
    basis = TruncatedBasis(n, p["cutoff"])
    ops = _random_operators(rng, basis.dim, p["operators"])
    exact = [complex(np.trace(x)) for x in ops]
    res.add(
        "moments vs diagonal",
        max(abs(coherent_integral_moments(basis, x, n) - e) for x, e in zip(ops, exact)),
        p["exact_tol"],
    )
    res.add(
        "quadrature vs diagonal",
        max(abs(coherent_integral_quadrature(basis, x, n) - e) for x, e in zip(ops, exact)),
        p["exact_tol"],
    )
    seeds = [seed * p["seeds"] + s for s in range(p["seeds"])]
    runs = [
        trace_coherent_mc_batch(basis, ops, n, samples, s, workers=workers) for s in seeds
    ]
    worst = 0.0
    for i, e in enumerate(exact):
        est = np.array([r[i].estimate for r in runs])
        se = np.array([r[i].std_error for r in runs])
        pooled = np.sqrt(np.sum(se**2)) / len(seeds)
        worst = max(worst, abs(est.mean() - e) / pooled)
    res.add(f"MC pooled z over {len(seeds)} seeds x {samples} samples", worst, p["z_max"])
    return res


def suite_partition(p, rng):
    """Truncated partition function against the product closed form and its tail bound."""
    res = SuiteResult("partition")
    cutoff = p["cutoff"]
    thermal = single_mode_thermal(0.5)
    ctx = GibbsContext(TruncatedBasis(1, cutoff), thermal)
    res.add("n=1 lambda=1/2 value 2", abs(partition_truncated(ctx) - 2.0), p["exact_tol"])
    for n in p["modes"]:
        for lmax in p["lambda_max"]:
            thermal = random_thermal(rng, n, lmax)
            basis = TruncatedBasis(n, cutoff)
            ctx = GibbsContext(basis, thermal)
            z = partition_truncated(ctx)
            gap = partition_closed(thermal) - z
            tail = ctx.truncation_tail()
            # within the geometric tail: 0 <= closed - truncated <= tail
            res.add(f"n={n} lmax={lmax} tail excess", max(-gap, gap - tail, 0.0), 1e-12 * z)
            sqrt_gap = abs(partition_sqrt_variant(thermal) - z)
            # the square-root variant is a deviation: its gap must dwarf the tail
            res.add(f"n={n} lmax={lmax} tail / sqrt-variant gap", tail / sqrt_gap, 1e-3)
            if n <= p["rho_check_max_modes"]:
                trace_rho = float(ctx.rho.diagonal().sum().real)
                res.add(f"n={n} lmax={lmax} Tr(rho) vs eigen sum", _rel(trace_rho, z), 1e-12)
    return res


def suite_weyl_gibbs(p, rng):
    """Truncated thermal expectation of ``W(f)`` against the Gaussian closed form."""
    res = SuiteResult("weyl-gibbs")
    cutoff = p["cutoff"]
    thermal = single_mode_thermal(0.5)
    ctx = GibbsContext(TruncatedBasis(1, cutoff), thermal)
    direct = gibbs_weyl_direct(ctx, [1.0])
    res.add("n=1 lambda=1/2 |f|=1 direct vs exp(-3/4)", abs(direct - np.exp(-0.75)), p["tol"])
    res.add("n=1 closed vs exp(-3/4)", abs(weyl_gibbs_closed(thermal, [1.0]) - np.exp(-0.75)), 1e-15)
    for n in p["modes"]:
        basis = TruncatedBasis(n, cutoff)
        for _ in range(p["cases"]):
            thermal = random_thermal(rng, n, p["lambda_max"])
            ctx = GibbsContext(basis, thermal)
            f = random_unit_ball(rng, n, p["radius"])
            err = abs(gibbs_weyl_direct(ctx, f) - weyl_gibbs_closed(thermal, f))
            res.add(f"n={n} |f|={np.linalg.norm(f):.3f}", err, p["tol"])
    return res


def _product_direct(ctx, fs, gs):
    op = None
    for f in fs:
        m = creation_smeared(ctx.basis, f)
        op = m if op is None else op @ m
    for g in gs:
        op = op @ annihilation_smeared(ctx.basis, g)
    return gibbs_expectation(ctx, op)


def suite_product_gibbs(p, rng):
    """Permanent formula for ``omega(adag(f_1)..adag(f_m) a(g_1)..a(g_m))`` against direct traces."""
    res = SuiteResult("product-gibbs")
    cutoff = p["cutoff"]
    thermal = single_mode_thermal(0.5)
    ctx = GibbsContext(TruncatedBasis(1, cutoff), thermal)
    one = [np.array([1.0])]
    res.add("m=2 f=g=h1 lambda=1/2 closed vs 2", abs(product_gibbs_closed(thermal, one * 2, one * 2) - 2.0), 1e-12)
    res.add("m=2 f=g=h1 lambda=1/2 direct vs 2", abs(_product_direct(ctx, one * 2, one * 2) - 2.0), 2.0 * p["tol"])
    for n in p["modes"]:
        basis = TruncatedBasis(n, cutoff)
        thermal = random_thermal(rng, n, p["lambda_max"])
        ctx = GibbsContext(basis, thermal)
        for m in range(1, p["max_order"] + 1):
            fs = [random_unit_ball(rng, n) for _ in range(m)]
            gs = [random_unit_ball(rng, n) for _ in range(m)]
            closed = product_gibbs_closed(thermal, fs, gs)
            direct = _product_direct(ctx, fs, gs)
            res.add(f"n={n} m={m} relative", _rel(direct, closed), p["tol"])
        f, g = random_unit_ball(rng, n), random_unit_ball(rng, n)
        res.add(
            f"n={n} two-point",
            abs(_product_direct(ctx, [f], [g]) - two_point(thermal, f, g)),
            p["two_point_tol"],
        )
    return res


def _homogeneous_state(rng, basis, k):
    p = np.zeros(basis.dim, dtype=np.complex128)
    sl = basis.level_slice(k)
    size = sl.stop - sl.start
    p[sl] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return p / np.linalg.norm(p)


def suite_hermite_sobolev(p, rng):
    """Hermite orthonormality and derivative identity, Sobolev identities, Toeplitz level bound."""
    res = SuiteResult("hermite-sobolev")
    deg = p["max_degree"]
    t, w = gauss_hermite(p["quad_order"])
    tab = hermite_table(deg, t)
    res.add(f"orthonormality degrees<={deg}", np.abs((tab * w) @ tab.T - np.eye(deg + 1)).max(), p["ortho_tol"])
    grid = np.linspace(-p["t_max"], p["t_max"], 81)
    res.add(
        f"derivative identity k<={p['derivative_max_degree']}",
        max(np.max(hermite_derivative_check(k, grid)) for k in range(1, p["derivative_max_degree"] + 1)),
        p["derivative_tol"],
    )
    worst = 0.0
    for n in p["chain_modes"]:
        basis = TruncatedBasis(n, p["chain_max_level"])
        for k in range(p["chain_max_level"] + 1):
            state = _homogeneous_state(rng, basis, k)
            sums = chain_sums(basis, state, p["chain_max_length"])
            for m, s in enumerate(sums):
                ff = falling_factorial(k, m)
                worst = max(worst, abs(s - ff) / max(1, ff))
    res.add("chain sums = falling factorials", worst, p["chain_tol"])
    worst = 0.0
    for n in p["isometry_modes"]:
        basis = TruncatedBasis(n, p["isometry_cutoff"])
        state = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        coeffs = inverse_bargmann_transform_map(basis, state)
        if np.abs(bargmann_transform_map(basis, coeffs) - state).max() != 0.0:
            worst = np.inf
        for r in range(p["isometry_max_order"] + 1):
            fock = sobolev_norm_chain(basis, state, r)
            worst = max(worst, _rel(fock, real_side_chain_norm(coeffs, r)))
    res.add("Bargmann isometry of Sobolev norms", worst, p["isometry_tol"])
    cutoff = p["bound_cutoff"]
    basis = TruncatedBasis(1, cutoff)
    tight = 0.0
    for k in range(cutoff):
        norm, bound = toeplitz_level_bound_check(basis, LinearSymbol([1.0]), k)
        tight = max(tight, abs(norm - bound))
    res.add(f"single-mode equality k<{cutoff}", tight, p["bound_tol"])
    excess = 0.0
    for n in p["bound_modes"]:
        basis = TruncatedBasis(n, cutoff)
        for k in range(cutoff):
            c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            norm, bound = toeplitz_level_bound_check(basis, LinearSymbol(c), k)
            excess = max(excess, norm - bound)
            # argmax case: symbol on one mode, state e_{k delta_j}
            c1 = np.zeros(n, dtype=complex)
            c1[n - 1] = 1.0
            op = toeplitz_linear(basis, LinearSymbol(c1))
            idx = basis.rank((0,) * (n - 1) + (k,))
            image = np.linalg.norm(op[:, idx].toarray())
            tight = max(tight, abs(image - np.sqrt(k + 1)))
    res.add("level bound excess", max(excess, 0.0), p["bound_tol"])
    res.add("argmax equality", tight, p["bound_tol"])
    return res


SUITES = {
    "ccr": suite_ccr,
    "toeplitz-ladder": suite_toeplitz_ladder,
    "weyl-three-way": suite_weyl_three_way,
    "weyl-commutation": suite_weyl_commutation,
    "substitution": suite_substitution,
    "coherent-trace": suite_coherent_trace,
    "partition": suite_partition,
    "weyl-gibbs": suite_weyl_gibbs,
    "product-gibbs": suite_product_gibbs,
    "hermite-sobolev": suite_hermite_sobolev,
}


def load_verify_params(path=None):
    """Suite parameters from ``path`` or the shipped ``configs/verify.json``."""
    if path is None:
        text = resources.files("bosefock").joinpath("configs/verify.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    params = json.loads(text)
    unknown = sorted(set(params) - set(SUITES))
    if unknown:
        raise ConfigError(f"unknown verification suites: {', '.join(unknown)}")
    return params


def suite_rng(seed, name):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(list(SUITES).index(name),)))


def run_suite(name, params, seed=0, samples=100_000, workers=1):
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = suite_rng(seed, name)
    if name == "coherent-trace":
        return suite_coherent_trace(params[name], rng, seed=seed, samples=samples, workers=workers)
    return SUITES[name](params[name], rng)


def run_verify(cfg, params=None):
    """Run the selected suites and return a report whose ``value`` is the failure count."""
    from .jobs import make_report

    params = params or load_verify_params()
    names = cfg.suites or list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites: {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    results = {s: run_suite(s, params, cfg.seed, cfg.samples, cfg.workers) for s in names}
    failed = [s for s, r in results.items() if not r.passed]
    return make_report(
        "verify", cfg, len(failed), truncation_tail=0.0, dim=0,
        details={
            "passed": len(results) - len(failed),
            "failed": len(failed),
            "failed_suites": failed,
            "suites": {s: r.summary() for s, r in results.items()},
        },
    )
