
import os
import sys

from tabulate import tabulate

from . complex import betti, build_complex
from . eigen import smallest_eigs
from . errors import InvalidArgumentError
from . fields import make_field
from . foliation import (
    build_kronecker, connes_fack_check, hessian_singular_integral,
    parse_slope, transversality_check
)
from . mesh import build_circle, build_flat_torus, load_mesh
from . morse import find_critical_points
from . oracle import (
    OscillatorModel, aggregate_limit_spectrum, brute_force_oscillator,
    morse_inequalities_check, oscillator_spectrum
)
from . output import write_flow_plots, write_json, write_spectrum_csv
from . witten import (
    deform, kernel_count, laplacian, parse_schedule, spectral_flow
)

# Build the configured model mesh
def get_mesh(config):

    kind = config.get("model.kind")

    if kind == "circle":
        return build_circle(config.get("model.n"), config.get("model.radius"))
    if kind == "torus":
        return build_flat_torus(config.get("model.n"), config.get("model.n2"),
                                config.get("model.l1"), config.get("model.l2"))

    path = config.get("model.path")
    if not path:
        raise InvalidArgumentError("model.path is needed for mesh models")
    return load_mesh(path)

def get_complex(config):
    return build_complex(get_mesh(config),
                         config.get("model.degenerate_weight_ratio"))

def get_field(config):
    return make_field(config.get("field.id"), k=config.get("field.k"),
                      epsilon=config.get("field.epsilon"),
                      value=config.get("field.value"))

def solver_args(config):
    return {
        "tol": config.get("solver.tol"),
        "seed": config.get("solver.seed"),
        "dense_limit": config.get("solver.dense_limit"),
        "lu_fill_limit": config.get("solver.lu_fill_limit"),
    }

def out_path(config, name):
    return os.path.join(config.get("output.dir"), name)

# Oracle block of a flow: the aggregated limit spectrum and its first k
# values
def oracle_block(morse_data, p, k, config):
    spec = aggregate_limit_spectrum(morse_data, p, config.get("oracle.cutoff"),
                                    config.get("oracle.mode"))
    d = spec.to_dict()
    d["limits"] = spec.values()[:k]
    return d

# Spectrum of the deformed Laplacian at one t
def cmd_spectrum(config):

    cx = get_complex(config)
    field = get_field(config)
    t = config.get("schedule.t")
    p = config.get("solver.degree")
    k = config.get("solver.k")

    cx.check_degree(p)

    wc = deform(cx, field, t)
    tbl = smallest_eigs(laplacian(wc, p), k, degree=p, t=t,
                        **solver_args(config))
    count, method = kernel_count(wc, p, tbl)

    write_spectrum_csv(out_path(config, "spectrum-p%d.csv" % p), [tbl])

    print(tabulate(
        [[i, v, tv, r] for _, _, i, v, tv, r in tbl.rows()],
        ["Index", "λ", "t·λ", "Residual"], tablefmt="pretty"
    ))
    print("Kernel dimension %d (%s)" % (count, method))

    return tbl

# Rescaled spectral flow over the configured schedule
def cmd_flow(config):

    cx = get_complex(config)
    field = get_field(config)
    sched = parse_schedule(config.get("schedule.grid"))
    p = config.get("solver.degree")
    k = config.get("solver.k")

    cx.check_degree(p)

    flow = spectral_flow(cx, field, sched, p, k,
                         workers=config.get("run.workers"),
                         **solver_args(config))

    if not field.is_constant():
        md = find_critical_points(field, cx.mesh)
        flow.oracle[p] = oracle_block(md, p, k, config)

    data = flow.to_dict()
    data.update(config.metadata())

    write_json(out_path(config, "flow.json"), data)
    write_flow_plots(out_path(config, "plots"), flow)

    limits = flow.oracle.get(p, {}).get("limits", [])
    last = next((r for r in reversed(flow.degrees[p]) if r is not None), None)
    tbl = [
        [j, None if last is None else last[j],
         limits[j] if j < len(limits) else None]
        for j in range(k)
    ]
    print(tabulate(tbl, ["Track", "t·λ at smallest t", "Oracle"],
                   tablefmt="pretty"))
    if flow.skipped:
        sys.stderr.write("Skipped %d schedule points.\n" % len(flow.skipped))

    return flow

# Critical points, Betti numbers and the Morse inequalities
def cmd_morse_check(config):

    cx = get_complex(config)
    field = get_field(config)

    md = find_critical_points(field, cx.mesh)
    b = betti(cx, tol=config.get("solver.tol"), seed=config.get("solver.seed"))
    report = morse_inequalities_check(md.counts, b)

    data = {
        "mesh": cx.mesh.describe(),
        "field": field.describe(),
        "critical_points": md.to_dict(),
        "report": report.to_dict(),
    }
    data.update(config.metadata())

    write_json(out_path(config, "morse.json"), data)

    print(tabulate(
        [[k, report.C[k], report.b[k], report.slacks[k]]
         for k in range(len(report.C))],
        ["k", "C_k", "b_k", "Slack"], tablefmt="pretty"
    ))
    print("Morse inequalities %s, Euler equality %s" % (
        "pass" if report.passed else "FAIL",
        "holds" if report.euler_equality else "FAILS"
    ))

    return report

# Limit spectra per degree, for the critical points of the configured field
# or for one explicit list of Hessian eigenvalues
def cmd_oracle(config, xi=None, brute=False):

    mode = config.get("oracle.mode")
    cutoff = config.get("oracle.cutoff")

    degrees = {}
    checks = {}

    if xi is not None:
        n = len(xi)
        source = {"xi": [float(v) for v in xi]}
        for p in range(n + 1):
            model = OscillatorModel(xi, p)
            degrees[p] = oscillator_spectrum(model, cutoff, mode)
            if brute:
                checks[p] = brute_force_oscillator(model)
    else:
        cx = get_complex(config)
        field = get_field(config)
        md = find_critical_points(field, cx.mesh)
        source = {"field": field.describe(), "counts": md.counts}
        for p in range(md.dimension + 1):
            degrees[p] = aggregate_limit_spectrum(md, p, cutoff, mode)

    data = {
        "source": source,
        "degrees": {str(p): s.to_dict() for p, s in degrees.items()},
    }
    if checks:
        data["brute_force"] = {str(p): s.to_dict() for p, s in checks.items()}
    data.update(config.metadata())

    write_json(out_path(config, "oracle.json"), data)

    rows = []
    for p, s in sorted(degrees.items()):
        vals = s.values()[:8]
        row = [p, ", ".join("%.6g" % v for v in vals)]
        if brute:
            row.append(", ".join("%.6g" % v for v in checks[p].first(len(vals))))
        rows.append(row)
    hdr = ["Degree", "Limit spectrum (%s)" % mode]
    if brute:
        hdr.append("Brute force")
    print(tabulate(rows, hdr, tablefmt="pretty"))

    return degrees

# Measured Morse inequalities on a Kronecker foliation
def cmd_foliation(config):

    a, b = parse_slope(config.get("foliation.slope"))
    model = build_kronecker(a, b, config.get("foliation.n_leaf"),
                            config.get("foliation.n_trans"))
    field = get_field(config)
    workers = config.get("run.workers")

    report = connes_fack_check(model, field,
                               schedule=config.get("foliation.grid"),
                               phi=config.get("foliation.phi"),
                               k=config.get("foliation.k"), workers=workers)
    trans = transversality_check(field, model)
    integral = hessian_singular_integral(model, field)

    data = report.to_dict()
    data["model"] = model.to_dict()
    data["field"] = field.describe()
    data["transversality"] = trans.to_dict()
    data["hessian_integral"] = integral
    data.update(config.metadata())

    write_json(out_path(config, "foliation.json"), data)

    print(tabulate(
        [[k, report.c[k], report.beta[k], report.slacks[k],
          report.error_bars[k], report.trace_slacks[k]]
         for k in range(len(report.c))],
        ["k", "c_k", "β_k", "Slack", "Error bar", "Trace slack"],
        tablefmt="pretty"
    ))
    print("Connes-Fack inequalities %s; max trace jump %s" % (
        "pass" if report.passed else "FAIL",
        ", ".join("%.4g" % j for j in report.continuity["max_jump_by_degree"])
    ))

    return report

commands = {
    "spectrum": cmd_spectrum,
    "flow": cmd_flow,
    "morse-check": cmd_morse_check,
    "oracle": cmd_oracle,
    "foliation": cmd_foliation,
}
