"""Batch command-line surface.

Every subcommand reads JSON spec files, writes CSV to stdout (headers carry
explicit units), and records a JSON run-manifest (inputs, seed, versions,
and the emitted cells at full precision) to a sidecar file.  Identical
arguments, spec files, and seed produce byte-identical CSV.

Exit codes: 2 spec parse error, 3 enumeration cap exceeded, 4 infeasible
construction, 1 when a resolve-check row reports holds=false.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, capacity, exponents, figures, oracle, smc_codec
from .errors import EnumerationCapExceeded, Infeasible, SmclabError
from .probability import ChainSpec, Channel, Distribution
from .renyi import JointSource

LN2 = math.log(2.0)


class SpecError(click.ClickException):
    exit_code = 2


def _fail(message: str):
    raise SpecError(message)


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _fail(f"cannot read spec file {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}")


def _require(data: dict, key: str, where: str):
    if key not in data:
        _fail(f"spec {where} is missing key '{key}'")
    return data[key]


def _load_chain(path: str) -> ChainSpec:
    data = _load_json(path)
    try:
        return ChainSpec.from_dict(data)
    except SmclabError as exc:
        _fail(f"chain spec {path}: {exc}")


def _load_source(path: str) -> JointSource:
    data = _load_json(path)
    shape = tuple(int(s) for s in _require(data, "shape", path))
    probs = np.asarray(_require(data, "probs", path), dtype=float).reshape(-1)
    try:
        return JointSource(shape, Distribution(probs), a_axes=tuple(range(len(shape))))
    except SmclabError as exc:
        _fail(f"source spec {path}: {exc}")


def _load_code(path: str) -> smc_codec.SmcCode:
    data = _load_json(path)
    try:
        if isinstance(data.get("chain"), str):
            chain = _load_chain(data["chain"])
            return smc_codec.SmcCode.from_dict(data, chain=chain)
        return smc_codec.SmcCode.from_dict(data)
    except SmclabError as exc:
        _fail(f"code bundle {path}: {exc}")


def _parse_grid(text: str) -> list[float]:
    try:
        start, stop, count = text.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
    except ValueError:
        _fail(f"cannot parse rho grid '{text}' (expected start:stop:count)")
    return [float(r) for r in grid]


def _parse_index_set(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        _fail(f"cannot parse index set '{text}'")


def _all_subsets(t: int) -> list[tuple[int, ...]]:
    return [c for r in range(1, t + 1) for c in itertools.combinations(range(1, t + 1), r)]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return _json_safe(float(value))
    return value


def _bits_view(header: list[str], rows: list[list]) -> tuple[list[str], list[list]]:
    """Display-only conversion of *_nats columns to bits."""
    new_header = [h.replace("_nats", "_bits") if h.endswith("_nats") else h for h in header]
    cols = [i for i, h in enumerate(header) if h.endswith("_nats")]
    new_rows = []
    for row in rows:
        row = list(row)
        for i in cols:
            if isinstance(row[i], float) and math.isfinite(row[i]):
                row[i] = row[i] / LN2
        new_rows.append(row)
    return new_header, new_rows


def _emit(command, header, rows, *, manifest, inputs, parameters, seed=None, bits=False, figure=None, figures_dir=None):
    if bits:
        header, rows = _bits_view(header, rows)
    click.echo(",".join(header))
    for row in rows:
        click.echo(",".join(_fmt(v) for v in row))
    record = {
        "command": command,
        "argv": sys.argv[1:],
        "parameters": _json_safe(parameters),
        "inputs": {
            path: hashlib.sha256(Path(path).read_bytes()).hexdigest() for path in inputs
        },
        "seed": seed,
        "versions": {
            "smclab": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "csv_header": header,
        "csv_rows": [[_json_safe(v) for v in row] for row in rows],
    }
    manifest_path = manifest or f"{command.replace('-', '_')}_manifest.json"
    Path(manifest_path).write_text(json.dumps(record, indent=2) + "\n")
    if figures_dir and figure is not None:
        figure(header, rows, figures_dir)


def _common_options(fn):
    fn = click.option("--manifest", default=None, help="Run-manifest sidecar path.")(fn)
    fn = click.option("--figures", "figures_dir", default=None, help="Directory for rendered figures.")(fn)
    fn = click.option("--bits", is_flag=True, help="Display rates/entropies in bits (nats internally).")(fn)
    return fn


class _CapAwareGroup(click.Group):
    """Maps enumeration-cap overruns to the dedicated exit code 3."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except EnumerationCapExceeded as exc:
            click.echo(f"cap exceeded: {exc}", err=True)
            sys.exit(3)


@click.group(cls=_CapAwareGroup)
@click.version_option(__version__)
def main():
    """Secure multiplex coding laboratory: bounds, exponents, oracles, codes."""


@main.command()
@click.option("--chain", "chain_path", required=True, help="Chain spec JSON.")
@click.option("--kind", type=click.Choice(["leakage", "practical"]), default="leakage")
@click.option("--construction", type=click.Choice(["first", "second"]), default="first")
@click.option("--rho-grid", default="0.05:0.95:19", help="start:stop:count.")
@click.option("--rates", default=None, help="Comma list R_1..R_T (nats/use) for the uniform profile.")
@click.option("--source", "source_path", default=None, help="Joint message law JSON for the exact profile.")
@click.option("--n", default=1, show_default=True, help="Blocklength folded into the bound.")
@click.option("--log-b1", default=0.0, show_default=True, help="ln|B_1| in nats.")
@click.option("--index-set", default=None, help="Comma list; default: the full secret set.")
@click.option("--all-subsets", is_flag=True, help="Emit one row per nonempty index set.")
@click.option("--no-overhead", is_flag=True, help="Ensemble-average form without the code-selection term.")
@click.option("--no-common", is_flag=True, help="Practical bound without a common message.")
@_common_options
def bound(chain_path, kind, construction, rho_grid, rates, source_path, n, log_b1,
          index_set, all_subsets, no_overhead, no_common, manifest, figures_dir, bits):
    """Leakage bounds (finite blocklength or practical) over a rho grid."""
    chain = _load_chain(chain_path)
    inputs = [chain_path]
    if source_path:
        source = _load_source(source_path)
        profile = exponents.SourceProfile.from_joint(source)
        inputs.append(source_path)
    elif rates:
        profile = exponents.SourceProfile.uniform_independent(
            [float(x) for x in rates.split(",")], n=n
        )
    else:
        _fail("bound needs --rates or --source to build the entropy profile")
    t = profile.t
    sets = _all_subsets(t) if all_subsets else [
        _parse_index_set(index_set) if index_set else tuple(range(1, t + 1))
    ]
    grid = _parse_grid(rho_grid)
    header = ["kind", "construction", "index_set", "rho", "value_nats"]
    rows = []
    for index in sets:
        for rho in grid:
            if kind == "leakage":
                value = exponents.leakage_bound(
                    construction, chain, profile, index, rho,
                    log_b1=log_b1, n=n, include_overhead=not no_overhead,
                )
            else:
                value = exponents.practical_bound(
                    rho, chain.p_z_given_v, n, profile.value(index, rho),
                    log_b1=log_b1, has_common=not no_common, mode="info",
                )
            label = ("no_common" if no_common else "common") if kind == "practical" else construction
            rows.append([kind, label, ";".join(map(str, index)), rho, value])
    _emit("bound", header, rows, manifest=manifest, inputs=inputs,
          parameters={"kind": kind, "construction": construction, "rho_grid": rho_grid,
                      "rates": rates, "n": n, "log_b1": log_b1},
          bits=bits, figure=figures.render_bound, figures_dir=figures_dir)


@main.command()
@click.option("--chain", "chain_path", required=True, help="Chain spec JSON.")
@click.option("--rp", type=float, required=True, help="Private working rate (nats/use).")
@click.option("--rc", type=float, required=True, help="Common working rate (nats/use).")
@click.option("--rates", required=True, help="Comma list R_0..R_T (nats/use).")
@click.option("--index-set", default=None, help="Comma list; default: the full secret set.")
@click.option("--all-subsets", is_flag=True, help="Emit one row per nonempty index set.")
@_common_options
def exponent(chain_path, rp, rc, rates, index_set, all_subsets, manifest, figures_dir, bits):
    """Error/secrecy exponents and the universal quadruples."""
    chain = _load_chain(chain_path)
    rate_list = [float(x) for x in rates.split(",")]
    t = len(rate_list) - 1
    try:
        spec = exponents.RateSpec(t=t, r=tuple(rate_list), r_p=rp, r_c=rc)
    except SmclabError as exc:
        _fail(f"rate specification: {exc}")
    sets = _all_subsets(t) if all_subsets else [
        _parse_index_set(index_set) if index_set else tuple(range(1, t + 1))
    ]
    header = ["index_set", "e_b_nats", "e_e_nats", "e_plus_nats", "e_minus_nats", "e_psi_nats"]
    rows = []
    for index in sets:
        quad = exponents.universal_quadruple(spec, chain, index)
        comp_rate = sum(rate_list[i] for i in range(1, t + 1) if i not in index)
        e_psi = exponents.secrecy_exponent(comp_rate, chain, kernel="psi")
        rows.append([";".join(map(str, index)), quad.e_b, quad.e_e, quad.e_plus, quad.e_minus, e_psi])
    _emit("exponent", header, rows, manifest=manifest, inputs=[chain_path],
          parameters={"rp": rp, "rc": rc, "rates": rates},
          bits=bits, figure=figures.render_exponent, figures_dir=figures_dir)


@main.command("resolve-check")
@click.option("--mode", type=click.Choice(["thm1", "thm2", "lem4"]), required=True)
@click.option("--spec", "spec_path", required=True, help="Instance spec JSON.")
@click.option("--rho", type=float, default=None, help="Single rho value.")
@click.option("--rho-grid", default=None, help="start:stop:count.")
@click.option("--cap", default=oracle.DEFAULT_ORACLE_CAP, show_default=True)
@click.option("--dry-run", is_flag=True, help="Report the enumeration term count only.")
@_common_options
def resolve_check(mode, spec_path, rho, rho_grid, cap, dry_run, manifest, figures_dir, bits):
    """Exhaustive ensemble averages against the resolvability bounds.

    Exits 1 when any row reports holds=false: a violated bound is a defect,
    not a tolerance issue.
    """
    data = _load_json(spec_path)
    instance = _build_instance(mode, data, spec_path)
    if dry_run:
        count = oracle.ensemble_bound_check(mode, instance, 1.0, dry_run=True)
        _emit("resolve-check", ["mode", "term_count"], [[mode, count]],
              manifest=manifest, inputs=[spec_path],
              parameters={"mode": mode, "dry_run": True}, bits=bits)
        return
    grid = _parse_grid(rho_grid) if rho_grid else [rho if rho is not None else 1.0]
    header = ["mode", "rho", "lhs_d", "lhs_psi", "rhs", "holds"]
    rows = []
    any_violation = False
    for r in grid:
        result = oracle.ensemble_bound_check(mode, instance, r, cap=cap)
        rows.append([mode, r, result.lhs_d_avg, result.lhs_psi_avg, result.rhs, result.holds])
        any_violation = any_violation or not result.holds
    _emit("resolve-check", header, rows, manifest=manifest, inputs=[spec_path],
          parameters={"mode": mode, "cap": cap},
          bits=bits, figure=figures.render_resolve, figures_dir=figures_dir)
    if any_violation:
        sys.exit(1)


def _build_instance(mode: str, data: dict, where: str):
    try:
        if mode == "thm1":
            return oracle.Thm1Instance(
                p_a=Distribution(np.asarray(_require(data, "p_a", where), dtype=float)),
                w=Channel(np.asarray(_require(data, "w", where), dtype=float)),
                p=Distribution(np.asarray(_require(data, "p", where), dtype=float)),
            )
        if mode == "thm2":
            q = int(_require(data, "q", where))
            dim = int(_require(data, "dim", where))
            if "w_letter" in data:
                from .probability import tensor_power

                w = tensor_power(Channel(np.asarray(data["w_letter"], dtype=float)), dim)
            else:
                w = Channel(np.asarray(_require(data, "w", where), dtype=float))
            return oracle.Thm2Instance(
                q=q, dim=dim,
                p_a=Distribution(np.asarray(_require(data, "p_a", where), dtype=float)),
                w=w,
            )
        code = smc_codec.SmcCode.from_dict(_require(data, "code", where))
        shape = tuple(code.message_sizes())
        probs = np.asarray(_require(data, "source_probs", where), dtype=float).reshape(-1)
        source = JointSource(shape, Distribution(probs), a_axes=tuple(range(len(shape))))
        index = frozenset(_require(data, "index_set", where))
        return oracle.Lem4Instance(code=code, source=source, index_set=index)
    except SmclabError as exc:
        _fail(f"instance spec {where}: {exc}")


@main.command()
@click.option("--code", "code_path", required=True, help="Code bundle JSON.")
@click.option("--source", "source_path", required=True, help="Joint message law JSON.")
@click.option("--index-set", default=None, help="Comma list; default: the full secret set.")
@click.option("--all-subsets", is_flag=True)
@click.option("--cap", default=oracle.DEFAULT_ORACLE_CAP, show_default=True)
@click.option("--dry-run", is_flag=True, help="Report the enumeration term count only.")
@_common_options
def leakage(code_path, source_path, index_set, all_subsets, cap, dry_run,
            manifest, figures_dir, bits):
    """Exact leaked information of a concrete code bundle."""
    code = _load_code(code_path)
    source = _load_source(source_path)
    t = code.layout.t
    sets = _all_subsets(t) if all_subsets else [
        _parse_index_set(index_set) if index_set else tuple(range(1, t + 1))
    ]
    if dry_run:
        count = oracle.exact_leakage(code, source, sets[0], dry_run=True)
        _emit("leakage", ["term_count"], [[count]], manifest=manifest,
              inputs=[code_path, source_path], parameters={"dry_run": True}, bits=bits)
        return
    header = ["index_set", "leakage_nats"]
    rows = [
        [";".join(map(str, index)), oracle.exact_leakage(code, source, index, cap=cap)]
        for index in sets
    ]
    _emit("leakage", header, rows, manifest=manifest, inputs=[code_path, source_path],
          parameters={"cap": cap}, bits=bits,
          figure=figures.render_leakage, figures_dir=figures_dir)


@main.command()
@click.option("--code", "code_path", required=True, help="Code bundle JSON.")
@click.option("--source", "source_path", required=True, help="Joint message law JSON.")
@click.option("--trials", default=10_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--threads", default=1, show_default=True)
@_common_options
def simulate(code_path, source_path, trials, seed, threads, manifest, figures_dir, bits):
    """Monte Carlo error rates with Wilson 95% radii."""
    code = _load_code(code_path)
    source = _load_source(source_path)
    try:
        result = smc_codec.simulate(code, source, trials, seed, threads=threads)
    except SmclabError as exc:
        _fail(f"simulation: {exc}")
    header = ["trials", "p_b_hat", "p_b_radius", "p_e_hat", "p_e_radius"]
    rows = [[result.trials, result.p_b_hat, result.radius_b, result.p_e_hat, result.radius_e]]
    _emit("simulate", header, rows, manifest=manifest, inputs=[code_path, source_path],
          parameters={"trials": trials, "threads": threads}, seed=seed,
          bits=bits, figure=figures.render_simulate, figures_dir=figures_dir)


@main.command("capacity")
@click.option("--channels", "channels_path", required=True,
              help="JSON with keys w_y and w_z (nested arrays).")
@click.option("--model", type=click.Choice(list(capacity.MODELS)), default="bcc_leaked")
@click.option("--u-size", default=1, show_default=True)
@click.option("--v-size", default=2, show_default=True)
@click.option("--samples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--degraded", is_flag=True, help="Binary-input grid secrecy capacity instead.")
@click.option("--grid", default=10_001, show_default=True, help="Grid points for --degraded.")
@_common_options
def capacity_cmd(channels_path, model, u_size, v_size, samples, seed, degraded, grid,
                 manifest, figures_dir, bits):
    """Sample achievable region points, or the degraded secrecy capacity."""
    data = _load_json(channels_path)
    try:
        w_y = Channel(np.asarray(_require(data, "w_y", channels_path), dtype=float))
        w_z = Channel(np.asarray(_require(data, "w_z", channels_path), dtype=float))
    except SmclabError as exc:
        _fail(f"channel spec {channels_path}: {exc}")
    if degraded:
        try:
            value = capacity.secrecy_capacity_degraded(w_y, w_z, grid=grid)
        except SmclabError as exc:
            _fail(f"degraded evaluator: {exc}")
        header = ["secrecy_capacity_nats"]
        rows = [[value]]
    else:
        points = capacity.region_sample(w_y, w_z, model, u_size, v_size, samples, seed)
        n_floors = len(points[0].floors) if points else 0
        header = (
            ["sample"]
            + [f"rate_{i}_nats" for i in range(len(points[0].rates))]
            + [f"floor_{i}_nats" for i in range(n_floors)]
            + [f"p_u_{u}" for u in range(u_size)]
            + [f"p_v_given_u_{u}_{v}" for u in range(u_size) for v in range(v_size)]
            + [f"xi_{v}_{x}" for v in range(v_size) for x in range(w_y.input_size)]
        )
        rows = []
        for i, point in enumerate(points):
            row = [i, *point.rates, *point.floors]
            row += list(point.chain.p_u.probs)
            row += list(point.chain.p_v_given_u.rows.reshape(-1))
            row += list(point.chain.xi.rows.reshape(-1))
            rows.append(row)
    _emit("capacity", header, rows, manifest=manifest, inputs=[channels_path],
          parameters={"model": model, "u_size": u_size, "v_size": v_size,
                      "samples": samples, "degraded": degraded, "grid": grid},
          seed=seed, bits=bits, figure=figures.render_capacity, figures_dir=figures_dir)


@main.command()
@click.option("--spec", "spec_path", required=True, help="Construction spec JSON.")
@click.option("--seed", default=0, show_default=True)
@_common_options
def construct(spec_path, seed, manifest, figures_dir, bits):
    """Rate allocation on a fixed base code; exits 4 when infeasible."""
    data = _load_json(spec_path)
    chain = ChainSpec.from_dict(_require(data, "chain", spec_path))
    t = int(_require(data, "t", spec_path))
    targets = _require(data, "targets", spec_path)
    eps2 = float(_require(data, "eps2", spec_path))
    rho_grid = data.get("rho_grid", "0.05:0.95:19")
    grid = _parse_grid(rho_grid) if isinstance(rho_grid, str) else [float(r) for r in rho_grid]
    has_common = bool(data.get("has_common", True))
    if "generator_file" in data:
        try:
            text = Path(data["generator_file"]).read_text()
        except OSError as exc:
            _fail(f"cannot read generator file {data['generator_file']}: {exc}")
        base = smc_codec.LinearGenerator.from_text(int(data.get("q", 2)), text)
    elif "generator" in data:
        base = smc_codec.LinearGenerator(
            int(data.get("q", 2)), np.asarray(data["generator"], dtype=np.int64)
        )
    elif "codebook" in data:
        cb = data["codebook"]
        base = smc_codec.BcdCodebook(
            int(_require(cb, "n", spec_path)),
            np.asarray(_require(cb, "table_c", spec_path), dtype=np.int64),
            np.asarray(_require(cb, "table_p", spec_path), dtype=np.int64),
        )
    else:
        _fail(f"spec {spec_path} needs a 'generator' or 'codebook' entry")
    profile = None
    if "profile" in data:
        prof = data["profile"]
        profile = exponents.SourceProfile.uniform_independent(
            [float(x) for x in _require(prof, "rates", spec_path)], n=int(prof.get("n", 1))
        )
    try:
        layout, mixer, report = smc_codec.construct_practical(
            base, chain, t, targets, eps2, grid, profile, has_common, seed=seed
        )
    except Infeasible as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(4)
    except SmclabError as exc:
        _fail(f"construction spec {spec_path}: {exc}")
    header = ["index_set", "bound_nats", "target_nats", "dims", "pad_dims", "mixer_seed"]
    rows = []
    for index, bound_val in sorted(report.per_index_bounds.items()):
        rows.append([
            ";".join(map(str, index)),
            bound_val,
            report.per_index_targets[index],
            ";".join(map(str, report.dims)),
            report.pad_dims,
            seed,
        ])
    _emit("construct", header, rows, manifest=manifest, inputs=[spec_path],
          parameters={"t": t, "eps2": eps2, "rho_grid": rho_grid, "has_common": has_common,
                      "layout": layout.to_dict(), "mixer": mixer.to_dict(),
                      "v_offset": list(report.v_offset) if report.v_offset else None},
          seed=seed, bits=bits, figure=figures.render_construct, figures_dir=figures_dir)


if __name__ == "__main__":
    main()
