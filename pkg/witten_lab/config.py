
import configparser
import math

from . errors import ConfigError
from . version import version as product_version

# Configuration schema: section -> key -> (type, default).  A default of None
# means the key has no value unless set.
schema = {
    "run": {
        "command": (str, None),
        "workers": (int, 1),
    },
    "model": {
        "kind": (str, "circle"),
        "n": (int, 256),
        "n2": (int, None),
        "radius": (float, 1.0),
        "l1": (float, 2 * math.pi),
        "l2": (float, 2 * math.pi),
        "path": (str, None),
        "degenerate_weight_ratio": (float, 1e-3),
    },
    "field": {
        "id": (str, "cos-theta"),
        "k": (int, 1),
        "epsilon": (float, 0.3),
        "value": (float, 0.0),
    },
    "schedule": {
        "t": (float, 0.5),
        "grid": (str, "geom:1.0:0.02:25"),
    },
    "solver": {
        "degree": (int, 0),
        "k": (int, 5),
        "tol": (float, 1e-8),
        "seed": (int, 0),
        "dense_limit": (int, 600),
        "lu_fill_limit": (int, 100000000),
    },
    "oracle": {
        "mode": (str, "standard"),
        "cutoff": (float, 6.0),
    },
    "foliation": {
        "slope": (str, "1/1"),
        "n_leaf": (int, 512),
        "n_trans": (int, 64),
        "grid": (str, "geom:0.05:0.01:25"),
        "phi": (str, "tent:1:2:3"),
        "k": (int, 16),
    },
    "output": {
        "dir": (str, "out"),
    },
}

choices = {
    "model.kind": ["circle", "torus", "mesh"],
    "oracle.mode": ["standard", "paper"],
}

def _convert(key, kind, value):
    if value is None:
        return None
    try:
        if kind is int:
            f = float(value)
            if f != int(f):
                raise ValueError(value)
            return int(f)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(
            "%s: expected %s, got %r" % (key, kind.__name__, value)
        )

# Configuration object: defaults from the schema, overlaid by an INI file,
# with path navigation config.get("section.key")
class Config:

    def __init__(self, file=None, config=None):

        self.file = file
        self.config = {
            section: {k: v[1] for k, v in keys.items()}
            for section, keys in schema.items()
        }

        if file:
            self.load(file)

        if config:
            for section, keys in config.items():
                for k, v in keys.items():
                    self.set("%s.%s" % (section, k), v)

    def load(self, file):

        parser = configparser.ConfigParser(interpolation=None)

        try:
            with open(file) as f:
                parser.read_file(f)
        except OSError as e:
            raise ConfigError("cannot read config %s: %s" % (file, e))
        except configparser.Error as e:
            raise ConfigError("cannot parse config %s: %s" % (file, e))

        for section in parser.sections():
            if section not in schema:
                raise ConfigError("unknown configuration section [%s]" % section)
            for k, v in parser.items(section):
                self.set("%s.%s" % (section, k), v)

    def _lookup(self, key):
        parts = key.split(".")
        if len(parts) != 2 or parts[0] not in schema or \
           parts[1] not in schema[parts[0]]:
            raise ConfigError("unknown configuration key %s" % key)
        return parts[0], parts[1], schema[parts[0]][parts[1]][0]

    def get(self, key):
        section, k, kind = self._lookup(key)
        value = self.config[section][k]
        if key == "model.n2" and value is None:
            return self.config["model"]["n"]
        return value

    def set(self, key, value, applyNone=False):
        # None leaves the current value unless applyNone
        if value is None and not applyNone:
            return
        section, k, kind = self._lookup(key)
        value = _convert(key, kind, value)
        if key in choices and value not in choices[key]:
            raise ConfigError(
                "%s must be one of %s, got %s" % (
                    key, ", ".join(choices[key]), value
                )
            )
        self.config[section][k] = value

    # Every key with its resolved value
    def to_dict(self):
        return {
            section: {k: self.get("%s.%s" % (section, k)) for k in keys}
            for section, keys in schema.items()
        }

    # Write back to file
    def write(self, fileOverride=None):
        filename = fileOverride if fileOverride else self.file
        parser = configparser.ConfigParser(interpolation=None)
        for section, keys in self.to_dict().items():
            parser[section] = {
                k: repr(v) if isinstance(v, float) else str(v)
                for k, v in keys.items() if v is not None
            }
        with open(filename, "w") as config_file:
            parser.write(config_file)

    def metadata(self):
        return {"config": self.to_dict(), "version": product_version}
