
import argparse
import logging
import sys

from . config import Config
from . errors import LabError
from . import operations
from . version import version as product_version

# Command-line flags and the configuration keys they override
flag_keys = {
    "n": "model.n",
    "n2": "model.n2",
    "radius": "model.radius",
    "l1": "model.l1",
    "l2": "model.l2",
    "field": "field.id",
    "field_k": "field.k",
    "epsilon": "field.epsilon",
    "value": "field.value",
    "t": "schedule.t",
    "degree": "solver.degree",
    "k": "solver.k",
    "tol": "solver.tol",
    "seed": "solver.seed",
    "oracle_mode": "oracle.mode",
    "cutoff": "oracle.cutoff",
    "slope": "foliation.slope",
    "n_leaf": "foliation.n_leaf",
    "n_trans": "foliation.n_trans",
    "phi": "foliation.phi",
    "out": "output.dir",
    "workers": "run.workers",
}

def parser():

    p = argparse.ArgumentParser(
        prog="witten-lab",
        description="Witten deformation numerical lab"
    )
    p.add_argument("command", choices=list(operations.commands),
                   help="Command to run")
    p.add_argument("--config", "-c", help="Configuration file (INI)")
    p.add_argument("--verbose", "-v", action="count", default=0,
                   help="More logging, -vv for debug")
    p.add_argument("--version", action="version",
                   version="%(prog)s " + product_version)

    p.add_argument("--model", help="circle, torus or mesh:<path>")
    p.add_argument("--n", type=int, help="Vertices (per axis on the torus)")
    p.add_argument("--n2", type=int, help="Torus vertices on the second axis")
    p.add_argument("--radius", type=float, help="Circle radius")
    p.add_argument("--l1", type=float, help="Torus side 1")
    p.add_argument("--l2", type=float, help="Torus side 2")

    p.add_argument("--field", help="Field catalog id")
    p.add_argument("--field-k", type=int, help="Wavenumber for cos-k-theta")
    p.add_argument("--epsilon", type=float, help="Tilt for the tilted field")
    p.add_argument("--value", type=float, help="Value of the constant field")

    p.add_argument("--t", type=float, help="Deformation parameter")
    p.add_argument("--t-grid", help="Schedule, geom:a:b:n or list:t1,t2,...")
    p.add_argument("--degree", type=int, help="Form degree")
    p.add_argument("--k", type=int, help="Number of eigenvalues")
    p.add_argument("--tol", type=float, help="Residual tolerance")
    p.add_argument("--seed", type=int, help="Solver seed")

    p.add_argument("--oracle-mode", help="standard or paper")
    p.add_argument("--cutoff", type=float, help="Oracle cutoff")
    p.add_argument("--xi", help="Hessian eigenvalues for oracle, e.g. 2,-1")
    p.add_argument("--brute-force", action="store_true", default=False,
                   help="Cross-check the oracle by direct diagonalization")

    p.add_argument("--slope", help="Foliation direction a/b")
    p.add_argument("--n-leaf", type=int, help="Vertices per leaf")
    p.add_argument("--n-trans", type=int, help="Sampled leaves")
    p.add_argument("--phi", help="Test function, tent:lo:peak:hi or plateau:a:b")

    p.add_argument("--workers", type=int, help="Worker threads")
    p.add_argument("--out", help="Output directory")

    return p

def get_config(args):

    config = Config(args.config)

    config.set("run.command", args.command)

    if args.model:
        if args.model.startswith("mesh:"):
            config.set("model.kind", "mesh")
            config.set("model.path", args.model[5:])
        else:
            config.set("model.kind", args.model)

    for flag, key in flag_keys.items():
        config.set(key, getattr(args, flag))

    if args.t_grid:
        if args.command == "foliation":
            config.set("foliation.grid", args.t_grid)
        else:
            config.set("schedule.grid", args.t_grid)

    return config

def parse_xi(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("cannot parse xi %r" % text)

def main(argv=None):

    args = parser().parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    try:

        config = get_config(args)
        cmd = operations.commands[args.command]

        if args.command == "oracle":
            xi = None
            if args.xi:
                try:
                    xi = parse_xi(args.xi)
                except argparse.ArgumentTypeError as e:
                    sys.stderr.write("error: config: %s\n" % e)
                    return 2
            cmd(config, xi=xi, brute=args.brute_force)
        else:
            cmd(config)

    except LabError as e:
        sys.stderr.write("error: %s: %s\n" % (e.code, e))
        return e.exit_code

    return 0
