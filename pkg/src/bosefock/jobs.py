"""Job configurations and report generation behind the command line.

A job is a JSON object; complex numbers are written either as plain reals or
as ``[re, im]`` pairs. Unknown keys are rejected. Every report carries
``value``, ``closed_form``, ``std_error``, ``truncation_tail``, ``seed`` and
``basis``; command-specific extras live under ``details``.
"""

import csv
import io
import json
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.special import gammainc

from .bargmann import displacement, toeplitz_quadrature, weyl_operator, weyl_symbol
from .errors import ConfigError
from .expr import (
    Annihilate,
    Create,
    Identity,
    Weyl,
    eval_expr,
    factors,
    parse_expr,
    references,
)
from .fock import TruncatedBasis, as_mode_vector, compressed_norm
from .gibbs import (
    GibbsContext,
    gibbs_expectation,
    gibbs_weyl_direct,
    partition_closed,
    partition_sqrt_variant,
    partition_truncated,
    product_gibbs_closed,
    tail_weight,
    weyl_gibbs_closed,
)
from .hermite import gauss_hermite, hermite_derivative_check, hermite_table
from .quantization import thermal_spectrum
from .sobolev import (
    bargmann_transform_map,
    inverse_bargmann_transform_map,
    real_side_chain_norm,
    sobolev_equivalence_bounds,
    sobolev_norm_chain,
    sobolev_norm_level,
)
from .trace import coherent_integral_moments, trace_coherent_mc, trace_mode_convergence

COMMANDS = ("partition", "gibbs", "weyl", "trace-mc", "sobolev", "hermite", "verify")


def parse_complex(value, where="value"):
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def _vector(value, where):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}: expected a non-empty list of components")
    return np.array([parse_complex(v, f"{where}[{i}]") for i, v in enumerate(value)])


def _matrix(value, where):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ConfigError(f"{where}: expected a list of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(value)]
    if any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"{where}: matrix must be square")
    return np.array(rows)


def _int(value, where, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{where}: must be >= {lo}, got {value}")
    return value


def _float(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class JobConfig:
    """Validated job parameters.

    Attributes
    ----------
    command : str or None
        Default subcommand; the command line can override it.
    modes, cutoff : int
        Truncated basis shape.
    hamiltonian : ndarray or None
        One-body Hermitian matrix; defaults to the identity.
    beta, mu : float
    vectors : dict
        Named mode vectors used by expressions.
    expression : str or None
    samples, seed, workers : int
    antithetic : bool
    m_modes : int or None
        Modes sampled by ``trace-mc`` (all modes by default).
    mode_list : list of int or None
    vector : str or None
        Vector name for the ``weyl`` command.
    level_guard : int or None
        Levels checked by ``weyl`` (cutoff - 10 by default).
    quad_order : int
    sobolev_order : int
    state : dict or None
        Occupation string such as ``"2,1"`` to coefficient, for ``sobolev``.
    hermite_degree : int
    points : list of float
    suites : list of str or None
        Subset of verification suites.
    """

    command: str = None
    modes: int = 1
    cutoff: int = 10
    hamiltonian: np.ndarray = None
    beta: float = 1.0
    mu: float = 0.0
    vectors: dict = field(default_factory=dict)
    expression: str = None
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    antithetic: bool = False
    m_modes: int = None
    mode_list: list = None
    vector: str = None
    level_guard: int = None
    quad_order: int = 64
    sobolev_order: int = 2
    state: dict = None
    hermite_degree: int = 10
    points: list = field(default_factory=lambda: [0.0])
    suites: list = None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("job configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        kw = {}
        if "command" in data:
            if data["command"] not in COMMANDS:
                raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
            kw["command"] = data["command"]
        for key, lo in (("modes", 1), ("cutoff", 0), ("samples", 2), ("seed", 0),
                        ("workers", 1), ("m_modes", 1), ("level_guard", 0),
                        ("quad_order", 1), ("sobolev_order", 0), ("hermite_degree", 0)):
            if key in data and data[key] is not None:
                kw[key] = _int(data[key], key, lo)
        for key in ("beta", "mu"):
            if key in data:
                kw[key] = _float(data[key], key)
        if "antithetic" in data:
            if not isinstance(data["antithetic"], bool):
                raise ConfigError("antithetic: expected true or false")
            kw["antithetic"] = data["antithetic"]
        if "hamiltonian" in data and data["hamiltonian"] is not None:
            kw["hamiltonian"] = _matrix(data["hamiltonian"], "hamiltonian")
        if "vectors" in data:
            if not isinstance(data["vectors"], dict):
                raise ConfigError("vectors: expected an object of name -> components")
            kw["vectors"] = {k: _vector(v, f"vectors.{k}") for k, v in data["vectors"].items()}
        for key in ("expression", "vector"):
            if key in data and data[key] is not None:
                if not isinstance(data[key], str):
                    raise ConfigError(f"{key}: expected a string")
                kw[key] = data[key]
        if "mode_list" in data and data["mode_list"] is not None:
            if not isinstance(data["mode_list"], list):
                raise ConfigError("mode_list: expected a list of integers")
            kw["mode_list"] = [_int(m, "mode_list", 1) for m in data["mode_list"]]
        if "points" in data:
            if not isinstance(data["points"], list) or not data["points"]:
                raise ConfigError("points: expected a non-empty list of numbers")
            kw["points"] = [_float(t, "points") for t in data["points"]]
        if "state" in data and data["state"] is not None:
            if not isinstance(data["state"], dict):
                raise ConfigError("state: expected an object of occupation -> coefficient")
            state = {}
            for key, value in data["state"].items():
                try:
                    occ = tuple(int(s) for s in key.split(","))
                except ValueError:
                    raise ConfigError(f"state: bad occupation key {key!r}") from None
                state[occ] = parse_complex(value, f"state.{key}")
            kw["state"] = state
        if "suites" in data and data["suites"] is not None:
            if not isinstance(data["suites"], list) or not all(isinstance(s, str) for s in data["suites"]):
                raise ConfigError("suites: expected a list of names")
            kw["suites"] = list(data["suites"])
        cfg = cls(**kw)
        cfg._validate()
        return cfg

    def _validate(self):
        n = self.modes
        if self.hamiltonian is not None and self.hamiltonian.shape != (n, n):
            raise ConfigError(f"hamiltonian must be {n}x{n}, got {self.hamiltonian.shape}")
        for name, v in self.vectors.items():
            if len(v) > n:
                raise ConfigError(f"vector {name!r} has {len(v)} components but modes = {n}")
        if self.m_modes is not None and self.m_modes > n:
            raise ConfigError(f"m_modes = {self.m_modes} exceeds modes = {n}")
        if self.mode_list is not None:
            if any(m > n for m in self.mode_list) or self.mode_list != sorted(self.mode_list):
                raise ConfigError("mode_list must be ascending with entries <= modes")
        if self.expression is not None:
            ast = parse_expr(self.expression)
            missing = [r for r in references(ast) if r not in self.vectors]
            if missing:
                raise ConfigError(f"expression uses undefined vectors: {', '.join(missing)}")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def one_body(self):
        if self.hamiltonian is None:
            return np.eye(self.modes, dtype=np.complex128)
        return self.hamiltonian


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _real_if_close(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def make_report(command, cfg, value, closed_form=None, std_error=None, truncation_tail=0.0,
                details=None, dim=None):
    if dim is None:
        dim = TruncatedBasis(cfg.modes, cfg.cutoff).dim
    return _jsonable({
        "command": command,
        "value": _real_if_close(value) if isinstance(value, complex) else value,
        "closed_form": (
            _real_if_close(closed_form) if isinstance(closed_form, complex) else closed_form
        ),
        "std_error": std_error,
        "truncation_tail": truncation_tail,
        "seed": cfg.seed,
        "basis": {"modes": cfg.modes, "cutoff": cfg.cutoff, "dim": dim},
        "details": details or {},
    })


def _context(cfg):
    basis = TruncatedBasis(cfg.modes, cfg.cutoff)
    spectrum = thermal_spectrum(cfg.one_body(), cfg.beta, cfg.mu)
    return GibbsContext(basis, spectrum)


def run_partition(cfg):
    ctx = _context(cfg)
    truncated = partition_truncated(ctx)
    closed = partition_closed(ctx.spectrum)
    tail = tail_weight(ctx.spectrum, cfg.cutoff)
    sqrt_variant = partition_sqrt_variant(ctx.spectrum)
    return make_report(
        "partition", cfg, truncated, closed_form=closed, truncation_tail=tail,
        dim=ctx.basis.dim,
        details={
            "lambdas": ctx.spectrum.lambdas,
            "within_tail": bool(0.0 <= closed - truncated <= tail * (1 + 1e-12) + 1e-15 * closed),
            "sqrt_variant": sqrt_variant,
            "sqrt_variant_mismatch": bool(abs(sqrt_variant - truncated) > tail + 1e-12 * closed),
            "deviation": (
                "the product of 1/sqrt(1 - lambda_j) disagrees with the truncated trace; "
                "the closed form reported is the product of 1/(1 - lambda_j)"
            ),
        },
    )


def closed_form_for(ast, spectrum, vectors):
    """Closed-form Gibbs value when the word matches a known pattern, else ``None``.

    Only ``I``, a single ``W(f)``, and ``adag(f_1)..adag(f_m) a(g_1)..a(g_m)``
    with ``m >= 1`` qualify.
    """
    fs = factors(ast)
    if len(fs) == 1 and isinstance(fs[0], Identity):
        return 1.0
    if len(fs) == 1 and isinstance(fs[0], Weyl):
        return weyl_gibbs_closed(spectrum, vectors[fs[0].ref])
    kinds = [type(f) for f in fs]
    m = kinds.count(Create)
    if m and len(fs) == 2 * m and kinds == [Create] * m + [Annihilate] * m:
        return product_gibbs_closed(
            spectrum, [vectors[f.ref] for f in fs[:m]], [vectors[f.ref] for f in fs[m:]]
        )
    return None


def run_gibbs(cfg):
    if cfg.expression is None:
        raise ConfigError("gibbs needs an expression")
    ctx = _context(cfg)
    ast = parse_expr(cfg.expression)
    vectors = {k: as_mode_vector(v, cfg.modes) for k, v in cfg.vectors.items()}
    fs = factors(ast)
    if len(fs) == 1 and isinstance(fs[0], Weyl):
        direct = gibbs_weyl_direct(ctx, vectors[fs[0].ref])
    else:
        op = eval_expr(ast, ctx.basis, vectors, cfg.one_body())
        direct = gibbs_expectation(ctx, op)
    closed = closed_form_for(ast, ctx.spectrum, vectors)
    ladder = sum(isinstance(f, (Create, Annihilate)) for f in fs)
    return make_report(
        "gibbs", cfg, complex(direct), closed_form=closed,
        truncation_tail=ctx.truncation_tail(ladder), dim=ctx.basis.dim,
        details={
            "expression": cfg.expression,
            "lambdas": ctx.spectrum.lambdas,
            "abs_difference": None if closed is None else abs(complex(direct) - closed),
        },
    )


def run_weyl(cfg):
    if cfg.vector is None or cfg.vector not in cfg.vectors:
        raise ConfigError("weyl needs 'vector' naming an entry of 'vectors'")
    basis = TruncatedBasis(cfg.modes, cfg.cutoff)
    x = as_mode_vector(cfg.vectors[cfg.vector], cfg.modes)
    guard = cfg.cutoff - 10 if cfg.level_guard is None else cfg.level_guard
    guard = max(0, min(guard, cfg.cutoff))
    w = weyl_operator(basis, x).toarray()
    u = displacement(basis, -1j * np.conj(x)).toarray()
    residuals = {"weyl_vs_displacement": compressed_norm(basis, w - u, guard)}
    unitarity = compressed_norm(basis, w.conj().T @ w - np.eye(basis.dim), guard)
    if cfg.modes == 1:
        t = toeplitz_quadrature(weyl_symbol(x), cfg.cutoff, order=cfg.quad_order).toarray()
        residuals["weyl_vs_toeplitz"] = compressed_norm(basis, w - t, guard)
        residuals["displacement_vs_toeplitz"] = compressed_norm(basis, u - t, guard)
    r2 = float(np.vdot(x, x).real)
    return make_report(
        "weyl", cfg, max(residuals.values()), truncation_tail=float(gammainc(cfg.cutoff + 1, r2 / 2)),
        dim=basis.dim,
        details={"level_guard": guard, "residuals": residuals, "unitarity": unitarity},
    )


def run_trace_mc(cfg):
    if cfg.expression is None:
        raise ConfigError("trace-mc needs an expression")
    basis = TruncatedBasis(cfg.modes, cfg.cutoff)
    vectors = {k: as_mode_vector(v, cfg.modes) for k, v in cfg.vectors.items()}
    op = eval_expr(parse_expr(cfg.expression), basis, vectors, cfg.one_body())
    m = cfg.m_modes or cfg.modes
    rep = trace_coherent_mc(basis, op, m, cfg.samples, cfg.seed, cfg.workers, cfg.antithetic)
    modes = cfg.mode_list or list(range(1, cfg.modes + 1))
    return make_report(
        "trace-mc", cfg, rep.estimate, closed_form=rep.exact, std_error=rep.std_error,
        truncation_tail=rep.bias_bound, dim=basis.dim,
        details={
            "samples": rep.samples,
            "rejected": rep.rejected,
            "antithetic": cfg.antithetic,
            "z_score": rep.z_score,
            "coherent_integral": coherent_integral_moments(basis, op, m),
            "mode_sequence": [[k, v] for k, v in trace_mode_convergence(basis, op, modes)],
        },
    )


def run_sobolev(cfg):
    if not cfg.state:
        raise ConfigError("sobolev needs a 'state'")
    basis = TruncatedBasis(cfg.modes, cfg.cutoff)
    try:
        p = bargmann_transform_map(basis, cfg.state)
    except ValueError as exc:
        raise ConfigError(f"state: {exc}") from None
    r = cfg.sobolev_order
    chain = sobolev_norm_chain(basis, p, r)
    level = sobolev_norm_level(basis, p, r)
    lo, hi = sobolev_equivalence_bounds(r)
    return make_report(
        "sobolev", cfg, chain,
        closed_form=real_side_chain_norm(inverse_bargmann_transform_map(basis, p), r),
        truncation_tail=0.0, dim=basis.dim,
        details={
            "order": r,
            "level_norm": level,
            "seminorm_without_zero_term": sobolev_norm_chain(basis, p, r, include_zero=False),
            "ratio": chain / level if level else None,
            "equivalence_bounds": [lo, hi],
        },
    )


def run_hermite(cfg):
    k = cfg.hermite_degree
    t, w = gauss_hermite(cfg.quad_order)
    tab = hermite_table(k, t)
    gram = (tab * w) @ tab.T
    pts = np.asarray(cfg.points)
    deriv = [float(np.max(hermite_derivative_check(j, pts))) for j in range(1, k + 1)]
    return make_report(
        "hermite", cfg, float(np.abs(gram - np.eye(k + 1)).max()), truncation_tail=0.0, dim=k + 1,
        details={
            "degree": k,
            "quad_order": cfg.quad_order,
            "values": hermite_table(k, pts)[k],
            "max_derivative_residual": max(deriv, default=0.0),
            "weight_sum": float(w.sum()),
            "second_moment": float(w @ t**2),
            "fourth_moment": float(w @ t**4),
        },
    )


def run_job(cfg, command=None):
    """Execute ``command`` (or ``cfg.command``) and return the report dictionary."""
    command = command or cfg.command
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    if command == "verify":
        from .verify import run_verify

        return run_verify(cfg)
    runner = {
        "partition": run_partition,
        "gibbs": run_gibbs,
        "weyl": run_weyl,
        "trace-mc": run_trace_mc,
        "sobolev": run_sobolev,
        "hermite": run_hermite,
    }[command]
    return runner(cfg)


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, list):
        out[prefix] = json.dumps(value, sort_keys=True)
    elif value is None:
        out[prefix] = ""
    else:
        out[prefix] = repr(value) if isinstance(value, float) else str(value)


def format_report(report, fmt="json"):
    """Serialize a report deterministically as JSON or a one-row CSV."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        flat = {}
        _flatten("", report, flat)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")
