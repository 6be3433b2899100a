
import csv
import json
import os
import sys

# Writers for the result files.  JSON is written with sorted keys so that
# identical runs give byte-identical files.

def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path

def write_json(path, data):
    ensure_dir(os.path.dirname(path) or ".")
    with open(path, "w") as f:
        f.write(json.dumps(data, indent=4, sort_keys=True))
        f.write("\n")
    sys.stderr.write("Wrote %s.\n" % path)

def read_json(path):
    with open(path) as f:
        return json.load(f)

def fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)

spectrum_header = ["degree", "t", "index", "lambda", "t_lambda", "residual"]

def write_spectrum_csv(path, tables):
    ensure_dir(os.path.dirname(path) or ".")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(spectrum_header)
        for tbl in tables:
            for row in tbl.rows():
                w.writerow([fmt(v) for v in row])
    sys.stderr.write("Wrote %s.\n" % path)

# One "t t*lambda" series per eigenvalue track, skipped t left out
def write_flow_plots(directory, flow):
    ensure_dir(directory)
    paths = []
    for p, rows in sorted(flow.degrees.items()):
        ntracks = max((len(r) for r in rows if r is not None), default=0)
        for j in range(ntracks):
            path = os.path.join(directory, "flow-p%d-track%d.dat" % (p, j))
            with open(path, "w") as f:
                f.write("# t t_lambda\n")
                for t, row in zip(flow.schedule, rows):
                    if row is None:
                        continue
                    f.write("%s %s\n" % (fmt(float(t)), fmt(float(row[j]))))
            paths.append(path)
    sys.stderr.write("Wrote %d plot series to %s.\n" % (len(paths), directory))
    return paths
