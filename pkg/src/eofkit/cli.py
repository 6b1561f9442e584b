"""Command-line surface.

Exit codes: 0 success / all checks pass, 2 validation error, 3 check
failure, 4 scale-guard refusal. Angles are radians, probabilities are
decimals; all entropies are base-2.
"""

from __future__ import annotations

import sys
import time
from itertools import product as iter_product

import click
import numpy as np

from . import decompositions as dc
from . import entanglement as ent
from .errors import ScaleGuardError
from .io import RunReport, load_state
from .oracle import OracleConfig, eof_bruteforce
from .states import (
    BipartiteDensity,
    IsotropicParams,
    Lemma3Mc,
    McTwoQubit,
    SeparableTag,
    SigmaFamily,
    WernerParams,
    is_maximally_correlated,
    isotropic,
    lemma3_mc,
    mc_two_qubit,
    sigma_family_state,
    werner,
)

EXIT_VALIDATION = 2
EXIT_CHECK_FAILED = 3
EXIT_SCALE_GUARD = 4


def _fmt(x: float) -> str:
    return "%.12g" % x


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(report: RunReport, as_json: bool) -> None:
    if as_json:
        click.echo(report.to_json())
        return
    for key, value in report.results.items():
        if isinstance(value, float):
            click.echo(f"{key} = {_fmt(value)}")
        else:
            click.echo(f"{key} = {value}")
    for check in report.checks:
        status = "pass" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['name']} (measured {_fmt(check['measured'])})")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise click.UsageError(f"could not parse {text!r} as comma-separated floats")


def _coeffs_from_option(c_text: str | None, d: int | None) -> tuple:
    if c_text is None or c_text == "uniform":
        if d is None:
            raise click.UsageError("--c uniform requires --d")
        return tuple([1.0 / np.sqrt(d)] * d)
    values = np.asarray(_parse_floats(c_text), dtype=float)
    if d is not None and values.size != d:
        raise click.UsageError(f"--c has {values.size} entries but --d is {d}")
    nrm = np.linalg.norm(values)
    if nrm == 0:
        raise click.UsageError("--c entries cannot all be zero")
    return tuple(values / nrm)


def _family_options(fn):
    decs = [
        click.option("--family", type=str, default=None, help="Named state family."),
        click.option("--state", "state_path", type=click.Path(exists=False), default=None,
                      help="JSON state file instead of a family."),
        click.option("--p", type=float, default=None),
        click.option("--theta", type=float, default=None, help="Angle in radians."),
        click.option("--q", type=float, default=None),
        click.option("--x", type=float, default=None),
        click.option("--y", type=float, default=None),
        click.option("--z", type=float, default=None),
        click.option("--d", type=int, default=None),
        click.option("--F", "fidelity", type=float, default=None,
                      help="Werner swap expectation / isotropic fidelity."),
        click.option("--f", "split", type=int, default=None,
                      help="Cut index of the truncated ket (lemma3)."),
        click.option("--c", "c_text", type=str, default=None,
                      help="Coefficients: 'uniform' or comma-separated (normalized)."),
        click.option("--m", type=int, default=2, show_default=True,
                      help="Phase-exponent base of the isotropic decomposition."),
    ]
    for dec in reversed(decs):
        fn = dec(fn)
    return fn


def _oracle_options(fn):
    decs = [
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--restarts", type=int, default=None),
        click.option("--ensemble-size", type=int, default=None),
        click.option("--max-iters", type=int, default=None),
        click.option("--tol", type=float, default=None, help="Certification tolerance."),
        click.option("--force", is_flag=True, help="Override the desk-scale guard."),
    ]
    for dec in reversed(decs):
        fn = dec(fn)
    return fn


# click parameter name -> flag shown in error messages
_FLAG_NAMES = {"fidelity": "--F", "split": "--f", "c_text": "--c"}


def _require(option_map: dict, *names: str) -> list:
    missing = [n for n in names if option_map[n] is None]
    if missing:
        flags = ", ".join(_FLAG_NAMES.get(n, f"--{n}") for n in missing)
        raise click.UsageError(f"missing required option(s): {flags}")
    return [option_map[n] for n in names]


def _build_params(family: str, opts: dict):
    if family == "mc2":
        p, theta = _require(opts, "p", "theta")
        return McTwoQubit(p, theta)
    if family == "sigma":
        q, p, x, y, z = _require(opts, "q", "p", "x", "y", "z")
        return SigmaFamily(q, p, x, y, z)
    if family == "lemma3":
        p, split = _require(opts, "p", "split")
        c = _coeffs_from_option(opts["c_text"], opts["d"])
        return Lemma3Mc(p, c, split)
    if family == "werner":
        d, F = _require(opts, "d", "fidelity")
        return WernerParams(d, F)
    if family == "isotropic":
        d, F = _require(opts, "d", "fidelity")
        return IsotropicParams(d, F, opts["m"])
    if family == "separable":
        return SeparableTag()
    raise click.UsageError(f"unknown family {family!r}")


def _state_for_params(params) -> BipartiteDensity:
    if isinstance(params, McTwoQubit):
        return mc_two_qubit(params.p, params.theta)
    if isinstance(params, SigmaFamily):
        return sigma_family_state(params.q, params.p, params.x, params.y, params.z)[0]
    if isinstance(params, Lemma3Mc):
        return lemma3_mc(params.p, params.c, params.f)
    if isinstance(params, WernerParams):
        return werner(params.d, params.F)
    if isinstance(params, IsotropicParams):
        return isotropic(params.d, params.F)
    raise click.UsageError(f"no single state for family record {params!r}")


@click.group()
def main():
    """Formation entanglement from optimal decompositions."""


# ---------------------------------------------------------------------------
# eof
# ---------------------------------------------------------------------------

@main.command("eof")
@_family_options
@click.option("--json", "as_json", is_flag=True, help="Emit the machine-readable report.")
def cmd_eof(family, state_path, as_json, **opts):
    """Formation entanglement of a named family or a JSON state file."""
    start = time.perf_counter()
    report = RunReport(command="eof")
    if (family is None) == (state_path is None):
        raise click.UsageError("provide exactly one of --family or --state")
    try:
        if state_path is not None:
            rho = load_state(state_path)
            report.parameters = {"state": str(state_path)}
            if rho.dims.total != 4:
                _fail(
                    "formation entanglement from a state file is exact only for "
                    "2x2-bipartite inputs; use the oracle command for larger states",
                    EXIT_VALIDATION,
                )
            eof = ent.wootters_eof(rho)
            if is_maximally_correlated(rho):
                # two-qubit MC states sit inside the additive sigma family
                ed = ent.distillable_mc(rho)
                rep = ent.EntanglementReport("state", eof, cost=eof, distillable=ed, gap=eof - ed)
            else:
                rep = ent.EntanglementReport("state", eof)
        elif family == "isotropic-member":
            (d,) = _require(opts, "d")
            report.parameters = {"family": family, "d": d}
            rep = ent.EntanglementReport("isotropic-member", ent.eof_isotropic_member(d))
        else:
            params = _build_params(family, opts)
            report.parameters = {"family": family, **vars(params)}
            rep = ent.family_report(params)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
    report.results["eof"] = rep.eof
    if rep.cost is not None:
        report.results["cost"] = rep.cost
    if rep.distillable is not None:
        report.results["distillable"] = rep.distillable
    if rep.gap is not None:
        report.results["gap"] = rep.gap
    report.wall_time_s = time.perf_counter() - start
    _emit(report, as_json)


# ---------------------------------------------------------------------------
# od verify
# ---------------------------------------------------------------------------

@main.group("od")
def od_group():
    """Operations on optimal decompositions."""


@od_group.command("verify")
@_family_options
@_oracle_options
@click.option("--json", "as_json", is_flag=True)
def cmd_od_verify(family, state_path, as_json, seed, restarts, ensemble_size,
                  max_iters, tol, force, **opts):
    """Check a family decomposition: reconstruction, analytic value, oracle."""
    start = time.perf_counter()
    if family is None:
        raise click.UsageError("od verify requires --family")
    report = RunReport(command="od verify", seed=seed)
    big_state = family in ("werner", "isotropic")
    cfg = OracleConfig(
        ensemble_size=ensemble_size,
        restarts=restarts if restarts is not None else (6 if big_state else 12),
        max_iters=max_iters if max_iters is not None else (120 if big_state else 300),
        value_tolerance=tol if tol is not None else (1e-3 if big_state else 1e-4),
        seed=seed,
        force=True,
    )
    try:
        params = _build_params(family, opts)
        report.parameters = {"family": family, **vars(params)}
        if isinstance(params, McTwoQubit):
            ensemble = dc.od_mc_two_qubit(params.p, params.theta)
            target = mc_two_qubit(params.p, params.theta)
            claim = ent.eof_mc_two_qubit(params.theta)
        elif isinstance(params, SigmaFamily):
            ensemble = dc.od_sigma(params.q, params.p, params.x, params.y, params.z)
            target = sigma_family_state(params.q, params.p, params.x, params.y, params.z)[0]
            claim = ent.eof_sigma(params.p, params.x, params.z)
        elif isinstance(params, Lemma3Mc):
            ensemble = dc.od_lemma3(params.p, params.c, params.f)
            target = lemma3_mc(params.p, params.c, params.f)
            claim = ent.eof_lemma3(params.p, params.c, params.f)
        elif isinstance(params, WernerParams):
            ensemble = dc.od_werner(params.d, params.F)
            target = werner(params.d, params.F)
            claim = ent.eof_werner(params.F)
        elif isinstance(params, IsotropicParams):
            ensemble = dc.od_isotropic(params.d, params.F, params.m)
            target = isotropic(params.d, params.F)
            claim = ent.eof_isotropic_family(params.d, params.F, params.m)
            cm = dc.coeff_matrix(params.d, params.m)
            report.results["L"] = cm.L
            report.results["n"] = cm.n
        else:
            raise click.UsageError(f"od verify does not apply to family {family!r}")
        outcome = dc.verify_od(ensemble, target, claim, oracle_budget=cfg)
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    report.results["members"] = len(ensemble)
    report.results["claimed_eof"] = claim
    report.results["average_entanglement"] = outcome.average_entanglement
    report.results["oracle_min"] = outcome.certification.min_found
    per_ket = [ent.pure_entanglement(k) for k in ensemble.kets()]
    report.results["per_ket_spread"] = max(per_ket) - min(per_ket)
    if isinstance(params, Lemma3Mc):
        report.results["note"] = "per-ket entanglement is unequal for this family"
    report.add_check("reconstruction", outcome.reconstruction_ok, outcome.reconstruction_error)
    report.add_check("average-matches-claim", outcome.average_ok, outcome.average_error)
    report.add_check("oracle-not-below", outcome.certified, outcome.certification.margin)
    report.wall_time_s = time.perf_counter() - start
    _emit(report, as_json)
    if not report.all_passed:
        sys.exit(EXIT_CHECK_FAILED)


# ---------------------------------------------------------------------------
# gap-scan
# ---------------------------------------------------------------------------

def _parse_grid(spec: str) -> np.ndarray:
    """'start:stop:count' -> linspace; a bare number is a single point."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return np.linspace(start, stop, count)
    except ValueError:
        pass
    raise click.UsageError(f"grid spec must be 'start:stop:count' or a number, got {spec!r}")


@main.command("gap-scan")
@click.option("--kind", type=click.Choice(["lemma3", "tensor-mc"]), required=True)
@click.option("--p-grid", type=str, default=None, help="lemma3: grid over the mixing weight.")
@click.option("--theta-grid", type=str, default=None,
              help="Grid over the angle; tensor-mc takes one comma-separated spec per factor.")
@click.option("--weights", type=str, default=None,
              help="tensor-mc: member weights over the composed kets (default uniform).")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Write rows here instead of stdout.")
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Render the scanned grid to an image file.")
@click.option("--assert-positive", is_flag=True,
              help="Exit nonzero if any interior gap fails to be positive.")
def cmd_gap_scan(kind, p_grid, theta_grid, weights, csv_path, plot_path, assert_positive):
    """Scan the cost-minus-distillable gap over a parameter grid (CSV output)."""
    if theta_grid is None:
        raise click.UsageError("--theta-grid is required")
    rows = []
    interior_ok = True
    try:
        if kind == "lemma3":
            if p_grid is None:
                raise click.UsageError("--p-grid is required for kind lemma3")
            header = ["p", "theta", "gap"]
            axes = ["p", "theta"]
            for p in _parse_grid(p_grid):
                for theta in _parse_grid(theta_grid):
                    gap = ent.gap_lemma3(float(p), float(theta))
                    rows.append((float(p), float(theta), gap))
                    if 0.0 < p < 1.0 and gap <= 0.0:
                        interior_ok = False
        else:
            specs = [s for s in theta_grid.split(",") if s.strip()]
            grids = [_parse_grid(s) for s in specs]
            n = len(grids)
            header = [f"theta{i + 1}" for i in range(n)] + ["gap"]
            axes = header[:-1]
            member_weights = None
            if weights is not None:
                member_weights = _parse_floats(weights)
                if len(member_weights) != 2**n:
                    raise click.UsageError(
                        f"--weights needs {2**n} values for {n} factors, got {len(member_weights)}"
                    )
            for point in iter_product(*grids):
                fam = dc.mc_two_qubit_family(float(point[0]))
                for theta in point[1:]:
                    fam = dc.compose(fam, dc.mc_two_qubit_family(float(theta)))
                w = member_weights if member_weights is not None else [1 / len(fam)] * len(fam)
                rho = fam.member(w)
                gap = ent.gap_tensor_mc(list(point), rho)
                rows.append(tuple(float(t) for t in point) + (gap,))
                if gap <= 0.0:
                    interior_ok = False
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)

    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    gaps = [row[-1] for row in rows]
    arg = rows[int(np.argmin(gaps))]
    summary = (
        f"rows = {len(rows)}; min gap = {_fmt(min(gaps))} at "
        + "(" + ", ".join(_fmt(v) for v in arg[:-1]) + ")"
    )
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(text)
        click.echo(summary)
        click.echo(f"csv written to {csv_path}")
    else:
        click.echo(text, nl=False)
        click.echo(f"# {summary}")
    if plot_path is not None:
        from .plotting import render_gap_scan

        try:
            render_gap_scan(axes, rows, plot_path)
        except ValueError as exc:
            _fail(str(exc), EXIT_VALIDATION)
        click.echo(f"figure written to {plot_path}")
    if assert_positive and not interior_ok:
        click.echo("assert-positive failed: an interior gap is not positive", err=True)
        sys.exit(EXIT_CHECK_FAILED)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

@main.command("oracle")
@_family_options
@_oracle_options
@click.option("--json", "as_json", is_flag=True)
def cmd_oracle(family, state_path, as_json, seed, restarts, ensemble_size,
               max_iters, tol, force, **opts):
    """Brute-force convex-roof minimization, with certification when a
    closed-form value exists."""
    start = time.perf_counter()
    if (family is None) == (state_path is None):
        raise click.UsageError("provide exactly one of --family or --state")
    report = RunReport(command="oracle", seed=seed)
    cfg = OracleConfig(
        ensemble_size=ensemble_size,
        restarts=restarts if restarts is not None else 50,
        max_iters=max_iters if max_iters is not None else 400,
        value_tolerance=tol if tol is not None else 1e-6,
        seed=seed,
        force=force,
    )
    claim = None
    try:
        if state_path is not None:
            rho = load_state(state_path)
            report.parameters = {"state": str(state_path)}
            if rho.dims.total == 4:
                claim = ent.wootters_eof(rho)
        else:
            params = _build_params(family, opts)
            report.parameters = {"family": family, **vars(params)}
            rho = _state_for_params(params)
            if isinstance(params, McTwoQubit):
                claim = ent.eof_mc_two_qubit(params.theta)
            elif isinstance(params, SigmaFamily):
                claim = ent.eof_sigma(params.p, params.x, params.z)
            elif isinstance(params, Lemma3Mc):
                claim = ent.eof_lemma3(params.p, params.c, params.f)
            elif isinstance(params, WernerParams) and params.F < 0:
                claim = ent.eof_werner(params.F)
            elif isinstance(params, IsotropicParams):
                claim = ent.eof_isotropic_family(params.d, params.F, params.m)
        result = eof_bruteforce(rho, cfg)
    except ScaleGuardError as exc:
        _fail(str(exc), EXIT_SCALE_GUARD)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
    values = np.asarray(result.per_restart_values)
    report.results["oracle_min"] = result.min_value
    report.results["restart_median"] = float(np.median(values))
    report.results["restart_max"] = float(values.max())
    report.results["converged_fraction"] = result.converged_fraction
    report.results["ensemble_size"] = len(result.argmin)
    certified = True
    if claim is not None:
        report.results["analytic_eof"] = claim
        report.results["abs_error"] = abs(result.min_value - claim)
        certified = result.min_value >= claim - cfg.value_tolerance
        report.add_check("oracle-not-below-analytic", certified,
                         result.min_value - claim)
    report.wall_time_s = time.perf_counter() - start
    _emit(report, as_json)
    if not certified:
        sys.exit(EXIT_CHECK_FAILED)


# ---------------------------------------------------------------------------
# compose
# ---------------------------------------------------------------------------

def _parse_factor(spec: str) -> dc.ODFamily:
    fields = spec.split(",")
    name = fields[0].strip()
    kv = {}
    for field in fields[1:]:
        if "=" not in field:
            raise click.UsageError(f"factor field {field!r} must look like key=value")
        key, value = field.split("=", 1)
        kv[key.strip()] = value.strip()
    try:
        if name == "mc2":
            return dc.mc_two_qubit_family(float(kv["theta"]))
        if name == "sigma":
            return dc.sigma_family(float(kv["p"]), float(kv["x"]), float(kv["y"]), float(kv["z"]))
        if name == "lemma3":
            d = int(kv["d"]) if "d" in kv else None
            c = _coeffs_from_option(kv.get("c", "uniform"), d)
            return dc.lemma3_family(float(kv["p"]), c, int(kv["f"]))
        if name == "werner":
            return dc.werner_family(int(kv["d"]), float(kv["F"]))
        if name == "isotropic":
            return dc.isotropic_family(int(kv["d"]), int(kv.get("m", 2)))
        if name == "separable":
            labels = tuple(kv.get("kets", "00/++").split("/"))
            return dc.separable_family_from_tag(SeparableTag(labels))
    except KeyError as exc:
        raise click.UsageError(f"factor {name!r} is missing parameter {exc}")
    raise click.UsageError(f"unknown factor family {name!r}")


@main.command("compose")
@click.option("--factor", "factors", type=str, multiple=True, required=True,
              help="Family spec like 'mc2,theta=0.7'; repeat per factor.")
@click.option("--weights", type=str, default=None,
              help="Member weights over the composed kets (default uniform).")
@click.option("--json", "as_json", is_flag=True)
def cmd_compose(factors, weights, as_json):
    """Tensor decomposition families and evaluate a member's entanglement."""
    start = time.perf_counter()
    report = RunReport(command="compose")
    report.parameters = {"factors": list(factors), "weights": weights}
    try:
        families = [_parse_factor(spec) for spec in factors]
        fam = families[0]
        for nxt in families[1:]:
            fam = dc.compose(fam, nxt)
        if weights is not None:
            w = _parse_floats(weights)
        else:
            w = [1 / len(fam)] * len(fam)
        eof = dc.family_eof(fam, w)
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    report.results["kets"] = len(fam)
    report.results["dims"] = f"{fam.dims.dA}x{fam.dims.dB}"
    report.results["member_eof"] = eof
    report.results["additive"] = fam.additive
    if fam.additive:
        report.results["cost"] = eof
    report.wall_time_s = time.perf_counter() - start
    _emit(report, as_json)


if __name__ == "__main__":
    main()
